#include "eventstudy/market_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "eventstudy/error.hpp"
#include "text.hpp"

namespace eventstudy {

ShiftPolicy parse_shift_policy(std::string_view text) {
    if (text == "forward") return ShiftPolicy::Forward;
    if (text == "backward") return ShiftPolicy::Backward;
    throw Error(ErrorKind::InvalidArgument, "unknown shift policy '" + std::string(text) +
                                                "' (expected forward|backward)");
}

// ---------------------------------------------------------------------------
// TradingCalendar

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            throw Error(ErrorKind::InvalidArgument,
                        "trading calendar must be strictly increasing; " + dates_[i - 1].iso() +
                            " is followed by " + dates_[i].iso());
        }
    }
}

TradingCalendar TradingCalendar::from_union(std::span<const Date> dates) {
    std::vector<Date> sorted(dates.begin(), dates.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return TradingCalendar(std::move(sorted));
}

std::optional<std::size_t> TradingCalendar::index_of(Date date) const noexcept {
    const auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
    if (it == dates_.end() || *it != date) return std::nullopt;
    return static_cast<std::size_t>(it - dates_.begin());
}

std::size_t TradingCalendar::resolve(Date date, ShiftPolicy policy) const {
    const auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
    if (it != dates_.end() && *it == date) return static_cast<std::size_t>(it - dates_.begin());
    if (policy == ShiftPolicy::Forward) {
        if (it == dates_.end()) {
            throw Error(ErrorKind::InvalidArgument,
                        "event date " + date.iso() + " is after the last trading date " +
                            (dates_.empty() ? std::string("(empty calendar)") : dates_.back().iso()));
        }
        return static_cast<std::size_t>(it - dates_.begin());
    }
    if (it == dates_.begin()) {
        throw Error(ErrorKind::InvalidArgument,
                    "event date " + date.iso() + " is before the first trading date " +
                        (dates_.empty() ? std::string("(empty calendar)") : dates_.front().iso()));
    }
    return static_cast<std::size_t>(it - dates_.begin()) - 1;
}

// ---------------------------------------------------------------------------
// PricePanel / ReturnPanel

PricePanel::PricePanel(TradingCalendar calendar, std::map<std::string, AlignedSeries> prices)
    : calendar_(std::move(calendar)), prices_(std::move(prices)) {
    for (const auto& [ticker, series] : prices_) {
        if (series.size() != calendar_.size()) {
            throw Error(ErrorKind::InvalidArgument,
                        "price series for " + ticker + " is not aligned with the calendar");
        }
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series[i] && !(*series[i] > 0.0 && std::isfinite(*series[i]))) {
                throw Error(ErrorKind::InvalidArgument,
                            "non-positive price for " + ticker + " on " + calendar_[i].iso());
            }
        }
    }
}

std::vector<std::string> PricePanel::tickers() const {
    std::vector<std::string> out;
    out.reserve(prices_.size());
    for (const auto& [ticker, _] : prices_) out.push_back(ticker);
    return out;
}

const AlignedSeries& PricePanel::prices(const std::string& ticker) const {
    const auto it = prices_.find(ticker);
    if (it == prices_.end()) throw Error(ErrorKind::MissingData, "unknown ticker " + ticker);
    return it->second;
}

std::optional<double> PricePanel::price(const std::string& ticker, Date date) const {
    const auto idx = calendar_.index_of(date);
    if (!idx) return std::nullopt;
    return prices(ticker)[*idx];
}

const AlignedSeries& ReturnPanel::series(const std::string& ticker) const {
    const auto it = returns.find(ticker);
    if (it == returns.end()) throw Error(ErrorKind::MissingData, "no returns for ticker " + ticker);
    return it->second;
}

// ---------------------------------------------------------------------------
// EventFrame

EventFrame::EventFrame(Date event_date, Span span, std::vector<Date> dates,
                       std::map<std::string, AlignedSeries> returns)
    : event_date_(event_date), span_(span), dates_(std::move(dates)), returns_(std::move(returns)) {
    if (span_.min_offset > 0 || span_.max_offset < 0) {
        throw Error(ErrorKind::InvalidArgument, "event frame span must contain day 0");
    }
    if (dates_.size() != span_.size()) {
        throw Error(ErrorKind::InvalidArgument, "event frame dates do not match the span");
    }
    if (dates_[static_cast<std::size_t>(-span_.min_offset)] != event_date_) {
        throw Error(ErrorKind::InvalidArgument, "offset 0 must map to the event date");
    }
    for (const auto& [ticker, series] : returns_) {
        if (series.size() != dates_.size()) {
            throw Error(ErrorKind::InvalidArgument, "returns for " + ticker + " do not match the span");
        }
    }
}

Date EventFrame::date_at(int offset) const {
    if (!covers(offset)) {
        throw Error(ErrorKind::InvalidArgument,
                    "relative day " + std::to_string(offset) + " is outside the event frame");
    }
    return dates_[static_cast<std::size_t>(offset - span_.min_offset)];
}

std::optional<int> EventFrame::offset_of(Date date) const noexcept {
    const auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
    if (it == dates_.end() || *it != date) return std::nullopt;
    return static_cast<int>(it - dates_.begin()) + span_.min_offset;
}

std::vector<std::string> EventFrame::tickers() const {
    std::vector<std::string> out;
    for (const auto& [ticker, _] : returns_) out.push_back(ticker);
    return out;
}

const AlignedSeries& EventFrame::series(const std::string& ticker) const {
    const auto it = returns_.find(ticker);
    if (it == returns_.end()) {
        throw Error(ErrorKind::MissingData, "ticker " + ticker + " is not in the event frame", ticker);
    }
    return it->second;
}

std::optional<double> EventFrame::return_at(const std::string& ticker, int offset) const {
    if (!covers(offset)) return std::nullopt;
    return series(ticker)[static_cast<std::size_t>(offset - span_.min_offset)];
}

std::vector<int> EventFrame::missing_days(const std::string& ticker, int from, int to) const {
    const auto& s = series(ticker);
    std::vector<int> out;
    for (int d = from; d <= to; ++d) {
        if (!covers(d) || !s[static_cast<std::size_t>(d - span_.min_offset)]) out.push_back(d);
    }
    return out;
}

std::map<std::string, std::vector<int>> EventFrame::missing() const {
    std::map<std::string, std::vector<int>> out;
    for (const auto& [ticker, _] : returns_) {
        auto days = missing_days(ticker, span_.min_offset, span_.max_offset);
        if (!days.empty()) out.emplace(ticker, std::move(days));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

struct HeaderLayout {
    std::size_t date = 0, ticker = 1, close = 2, count = 3;
};

HeaderLayout parse_price_header(std::string_view line, char delimiter, const std::string& source) {
    const auto fields = detail::split(line, delimiter);
    HeaderLayout layout;
    layout.count = fields.size();
    std::array<bool, 3> seen{};
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "date") { layout.date = i; seen[0] = true; }
        else if (fields[i] == "ticker") { layout.ticker = i; seen[1] = true; }
        else if (fields[i] == "close") { layout.close = i; seen[2] = true; }
    }
    if (!(seen[0] && seen[1] && seen[2])) {
        throw DataError(source, {{1, "header must name the columns date, ticker, close"}});
    }
    return layout;
}

}  // namespace

std::vector<PriceRecord> read_price_records(std::istream& in, const std::string& source, char delimiter) {
    std::string line;
    std::size_t line_no = 0;
    if (!detail::next_content_line(in, line, line_no)) {
        throw DataError(source, {{0, "empty price file (expected header date,ticker,close)"}});
    }
    const HeaderLayout layout = parse_price_header(line, delimiter, source);

    std::vector<PriceRecord> records;
    std::vector<DataIssue> issues;
    while (detail::next_content_line(in, line, line_no)) {
        const auto fields = detail::split(line, delimiter);
        if (fields.size() != layout.count) {
            issues.push_back({line_no, "expected " + std::to_string(layout.count) + " fields, found " +
                                           std::to_string(fields.size())});
            continue;
        }
        PriceRecord rec;
        rec.row = line_no;
        const auto date = Date::try_parse(fields[layout.date]);
        if (!date) {
            issues.push_back({line_no, "unparseable date '" + std::string(fields[layout.date]) + "'"});
            continue;
        }
        rec.date = *date;
        rec.ticker = std::string(fields[layout.ticker]);
        if (rec.ticker.empty()) {
            issues.push_back({line_no, "empty ticker"});
            continue;
        }
        const auto close = detail::parse_double(fields[layout.close]);
        if (!close) {
            issues.push_back({line_no, "unparseable close '" + std::string(fields[layout.close]) + "'"});
            continue;
        }
        rec.close = *close;
        records.push_back(std::move(rec));
    }
    if (!issues.empty()) throw DataError(source, std::move(issues));
    return records;
}

TradingCalendar read_calendar(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<Date> dates;
    std::vector<DataIssue> issues;
    while (detail::next_content_line(in, line, line_no)) {
        const auto text = detail::trim(line);
        if (dates.empty() && issues.empty() && text == "date") continue;  // optional header
        if (const auto d = Date::try_parse(text)) {
            if (!dates.empty() && !(dates.back() < *d)) {
                issues.push_back({line_no, "calendar dates must be strictly increasing (" + d->iso() + ")"});
                continue;
            }
            dates.push_back(*d);
        } else {
            issues.push_back({line_no, "unparseable date '" + std::string(text) + "'"});
        }
    }
    if (!issues.empty()) throw DataError(source, std::move(issues));
    return TradingCalendar(std::move(dates));
}

TradingCalendar infer_calendar(std::span<const PriceRecord> records) {
    std::vector<Date> dates;
    dates.reserve(records.size());
    for (const auto& r : records) dates.push_back(r.date);
    return TradingCalendar::from_union(dates);
}

PricePanel load_price_panel(std::span<const PriceRecord> records, const TradingCalendar& calendar,
                            const std::string& source) {
    std::map<std::string, AlignedSeries> prices;
    std::map<std::pair<std::string, std::size_t>, std::size_t> first_row;
    std::vector<DataIssue> issues;

    for (const auto& rec : records) {
        if (!(rec.close > 0.0) || !std::isfinite(rec.close)) {
            issues.push_back({rec.row, "non-positive price " + std::to_string(rec.close) + " for " + rec.ticker});
            continue;
        }
        const auto idx = calendar.index_of(rec.date);
        if (!idx) {
            issues.push_back({rec.row, "date " + rec.date.iso() + " is not in the trading calendar"});
            continue;
        }
        const auto [it, inserted] = first_row.emplace(std::make_pair(rec.ticker, *idx), rec.row);
        if (!inserted) {
            issues.push_back({rec.row, "duplicate row for (" + rec.date.iso() + ", " + rec.ticker +
                                           "), first seen at row " + std::to_string(it->second)});
            continue;
        }
        auto& series = prices[rec.ticker];
        if (series.empty()) series.resize(calendar.size());
        series[*idx] = rec.close;
    }
    if (!issues.empty()) throw DataError(source, std::move(issues));
    return PricePanel(calendar, std::move(prices));
}

void write_price_csv(const PricePanel& panel, std::ostream& out) {
    out << "date,ticker,close\n";
    char buf[64];
    const auto& cal = panel.calendar();
    for (std::size_t i = 0; i < cal.size(); ++i) {
        const std::string date = cal[i].iso();
        for (const auto& [ticker, series] : panel.series()) {
            if (!series[i]) continue;
            // 17 significant digits round-trip doubles exactly.
            std::snprintf(buf, sizeof buf, "%.17g", *series[i]);
            out << date << ',' << ticker << ',' << buf << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Returns and event frames

ReturnPanel compute_log_returns(const PricePanel& panel, const ReturnOptions& options) {
    ReturnPanel out;
    out.calendar = panel.calendar();
    std::vector<DataIssue> issues;
    for (const auto& [ticker, prices] : panel.series()) {
        AlignedSeries returns(prices.size());
        std::size_t count = 0;
        for (std::size_t i = 1; i < prices.size(); ++i) {
            if (prices[i] && prices[i - 1]) {
                returns[i] = std::log(*prices[i] / *prices[i - 1]);
                ++count;
            }
        }
        if (count == 0) {
            if (options.strict) {
                issues.push_back({0, "ticker " + ticker + " has fewer than 2 consecutive trading days with prices"});
            } else {
                out.dropped.push_back(ticker);
            }
            continue;
        }
        out.returns.emplace(ticker, std::move(returns));
    }
    if (!issues.empty()) throw DataError("log returns", std::move(issues));
    return out;
}

EventFrame build_event_frame(const ReturnPanel& returns, Date event_date, Span span, ShiftPolicy policy) {
    if (span.min_offset > span.max_offset) {
        throw Error(ErrorKind::InvalidArgument, "event frame span is empty");
    }
    const auto& cal = returns.calendar;
    const auto event_idx = static_cast<long>(cal.resolve(event_date, policy));
    const long first = event_idx + span.min_offset;
    const long last = event_idx + span.max_offset;
    if (first < 0) {
        throw Error(ErrorKind::InvalidArgument,
                    "span start (day " + std::to_string(span.min_offset) + ") falls before the first trading date " +
                        cal.front().iso() + "; only " + std::to_string(event_idx) +
                        " trading days precede the event");
    }
    if (last >= static_cast<long>(cal.size())) {
        throw Error(ErrorKind::InvalidArgument,
                    "span end (day +" + std::to_string(span.max_offset) + ") falls after the last trading date " +
                        cal.back().iso() + "; only " + std::to_string(static_cast<long>(cal.size()) - 1 - event_idx) +
                        " trading days follow the event");
    }

    std::vector<Date> dates(cal.dates().begin() + first, cal.dates().begin() + last + 1);
    std::map<std::string, AlignedSeries> rekeyed;
    for (const auto& [ticker, series] : returns.returns) {
        rekeyed.emplace(ticker, AlignedSeries(series.begin() + first, series.begin() + last + 1));
    }
    return EventFrame(cal[static_cast<std::size_t>(event_idx)], span, std::move(dates), std::move(rekeyed));
}

}  // namespace eventstudy
