#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eventstudy/date.hpp"

namespace eventstudy {

enum class ShiftPolicy { Forward, Backward };

ShiftPolicy parse_shift_policy(std::string_view text);

/// Ordered set of trading dates, strictly increasing.
class TradingCalendar {
  public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<Date> dates);

    /// Sorted union of the given dates; duplicates collapse.
    static TradingCalendar from_union(std::span<const Date> dates);

    std::size_t size() const noexcept { return dates_.size(); }
    bool empty() const noexcept { return dates_.empty(); }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    Date operator[](std::size_t i) const { return dates_.at(i); }
    Date front() const { return dates_.at(0); }
    Date back() const { return dates_.at(dates_.size() - 1); }

    std::optional<std::size_t> index_of(Date date) const noexcept;
    bool contains(Date date) const noexcept { return index_of(date).has_value(); }

    /// Position of `date`, or of the nearest trading day in the policy's
    /// direction when `date` is not a trading day.
    std::size_t resolve(Date date, ShiftPolicy policy) const;

  private:
    std::vector<Date> dates_;
};

/// One slot per calendar position; empty where the observation is absent.
using AlignedSeries = std::vector<std::optional<double>>;

struct PriceRecord {
    std::size_t row = 0;  // 1-based line number in the source
    Date date;
    std::string ticker;
    double close = 0.0;
};

/// Close prices per ticker aligned with a trading calendar. All prices > 0.
class PricePanel {
  public:
    PricePanel() = default;
    PricePanel(TradingCalendar calendar, std::map<std::string, AlignedSeries> prices);

    const TradingCalendar& calendar() const noexcept { return calendar_; }
    const std::map<std::string, AlignedSeries>& series() const noexcept { return prices_; }
    std::vector<std::string> tickers() const;
    bool has_ticker(const std::string& ticker) const { return prices_.contains(ticker); }
    const AlignedSeries& prices(const std::string& ticker) const;
    std::optional<double> price(const std::string& ticker, Date date) const;

  private:
    TradingCalendar calendar_;
    std::map<std::string, AlignedSeries> prices_;
};

/// Daily log returns per ticker on the price panel's calendar. The first
/// calendar date never carries a return.
struct ReturnPanel {
    TradingCalendar calendar;
    std::map<std::string, AlignedSeries> returns;
    /// Tickers removed in lenient mode because they had no computable return.
    std::vector<std::string> dropped;

    const AlignedSeries& series(const std::string& ticker) const;
};

struct ReturnOptions {
    bool strict = true;
};

struct Span {
    int min_offset = -115;
    int max_offset = 10;

    std::size_t size() const noexcept { return static_cast<std::size_t>(max_offset - min_offset + 1); }
};

/// Returns re-keyed by relative day around the event (day 0).
class EventFrame {
  public:
    EventFrame(Date event_date, Span span, std::vector<Date> dates,
               std::map<std::string, AlignedSeries> returns);

    Date event_date() const noexcept { return event_date_; }
    int min_offset() const noexcept { return span_.min_offset; }
    int max_offset() const noexcept { return span_.max_offset; }
    const Span& span() const noexcept { return span_; }
    std::size_t size() const noexcept { return dates_.size(); }
    bool covers(int offset) const noexcept {
        return offset >= span_.min_offset && offset <= span_.max_offset;
    }

    Date date_at(int offset) const;
    std::optional<int> offset_of(Date date) const noexcept;

    std::vector<std::string> tickers() const;
    bool has_ticker(const std::string& ticker) const { return returns_.contains(ticker); }
    std::optional<double> return_at(const std::string& ticker, int offset) const;

    /// Relative days in [from, to] where the ticker has no return.
    std::vector<int> missing_days(const std::string& ticker, int from, int to) const;
    /// Missing days over the whole span, per ticker; tickers without gaps are omitted.
    std::map<std::string, std::vector<int>> missing() const;

  private:
    const AlignedSeries& series(const std::string& ticker) const;

    Date event_date_;
    Span span_;
    std::vector<Date> dates_;
    std::map<std::string, AlignedSeries> returns_;
};

// Ingestion. Readers are locale independent and expect ISO dates.

/// Parses `date,ticker,close` rows. Throws DataError listing every unparseable row.
std::vector<PriceRecord> read_price_records(std::istream& in, const std::string& source = "<prices>",
                                            char delimiter = ',');

/// One ISO date per line; blank lines and lines starting with '#' are skipped.
TradingCalendar read_calendar(std::istream& in, const std::string& source = "<calendar>");

TradingCalendar infer_calendar(std::span<const PriceRecord> records);

/// Throws DataError naming the row of each non-positive price, off-calendar
/// date, or duplicate (date, ticker) key.
PricePanel load_price_panel(std::span<const PriceRecord> records, const TradingCalendar& calendar,
                            const std::string& source = "<prices>");

void write_price_csv(const PricePanel& panel, std::ostream& out);

ReturnPanel compute_log_returns(const PricePanel& panel, const ReturnOptions& options = {});

EventFrame build_event_frame(const ReturnPanel& returns, Date event_date, Span span,
                             ShiftPolicy policy = ShiftPolicy::Forward);

}  // namespace eventstudy
