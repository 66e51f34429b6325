#include "eventstudy/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "eventstudy/error.hpp"
#include "eventstudy/summation.hpp"
#include "text.hpp"

namespace eventstudy {

// ---------------------------------------------------------------------------
// Firm attributes

FirmAttributes make_firm_attributes(const AttributeRecord& record, bool strict, std::vector<std::string>* warnings) {
    const std::string where = record.row > 0 ? "row " + std::to_string(record.row) : record.ticker;
    if (!(record.total_assets > 0.0) || !std::isfinite(record.total_assets)) {
        throw Error(ErrorKind::Data, "total assets must be positive for " + record.ticker, where);
    }
    if (!std::isfinite(record.net_income)) {
        throw Error(ErrorKind::Data, "net income is not finite for " + record.ticker, where);
    }
    FirmAttributes a;
    a.ticker = record.ticker;
    a.size = std::log(record.total_assets);
    if (record.net_income > 0.0) {
        a.income = std::log(record.net_income);
    } else {
        if (strict) {
            throw Error(ErrorKind::Data, "non-positive net income for " + record.ticker + " has no logarithm",
                        where);
        }
        a.income = record.net_income == 0.0 ? 0.0 : -std::log1p(-record.net_income);
        a.income_sign_adjusted = true;
        if (warnings) {
            warnings->push_back("net income of " + record.ticker +
                                " is non-positive; using sign * ln(1 + |income|)");
        }
    }
    return a;
}

std::vector<AttributeRecord> read_attribute_records(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    if (!detail::next_content_line(in, line, line_no)) {
        throw DataError(source, {{0, "empty attributes file (expected header ticker,total_assets,net_income)"}});
    }
    const auto header = detail::split(line, ',');
    if (header.size() != 3 || header[0] != "ticker" || header[1] != "total_assets" || header[2] != "net_income") {
        throw DataError(source, {{line_no, "header must be ticker,total_assets,net_income"}});
    }
    std::vector<AttributeRecord> out;
    std::vector<DataIssue> issues;
    std::set<std::string> seen;
    while (detail::next_content_line(in, line, line_no)) {
        const auto f = detail::split(line, ',');
        if (f.size() != 3) {
            issues.push_back({line_no, "expected 3 fields, found " + std::to_string(f.size())});
            continue;
        }
        const auto assets = detail::parse_double(f[1]);
        const auto income = detail::parse_double(f[2]);
        if (f[0].empty() || !assets || !income) {
            issues.push_back({line_no, "unparseable attribute row"});
            continue;
        }
        if (!seen.insert(std::string(f[0])).second) {
            issues.push_back({line_no, "duplicate row for ticker " + std::string(f[0])});
            continue;
        }
        out.push_back({line_no, std::string(f[0]), *assets, *income});
    }
    if (!issues.empty()) throw DataError(source, std::move(issues));
    return out;
}

void write_attribute_csv(std::span<const AttributeRecord> records, std::ostream& out) {
    out << "ticker,total_assets,net_income\n";
    char buf[96];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.total_assets, r.net_income);
        out << r.ticker << ',' << buf << '\n';
    }
}

std::map<std::string, FirmAttributes> firm_attributes(std::span<const AttributeRecord> records, bool strict,
                                                      std::vector<std::string>* warnings) {
    std::map<std::string, FirmAttributes> out;
    for (const auto& r : records) {
        if (out.contains(r.ticker)) {
            throw Error(ErrorKind::Data, "duplicate attributes for " + r.ticker, r.ticker);
        }
        out.emplace(r.ticker, make_firm_attributes(r, strict, warnings));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Controls

ControlTransform parse_control_transform(std::string_view text) {
    if (text == "log-return" || text == "log_return") return ControlTransform::LogReturn;
    if (text == "level") return ControlTransform::Level;
    throw Error(ErrorKind::InvalidArgument,
                "unknown control transform '" + std::string(text) + "' (expected log-return|level)");
}

std::string_view to_string(ControlTransform transform) noexcept {
    return transform == ControlTransform::LogReturn ? "log-return" : "level";
}

ControlSeries::ControlSeries(TradingCalendar calendar, std::map<std::string, AlignedSeries> levels,
                             ControlTransform transform)
    : calendar_(std::move(calendar)), levels_(std::move(levels)), transform_(transform) {
    for (const auto& [name, series] : levels_) {
        if (series.size() != calendar_.size()) {
            throw Error(ErrorKind::InvalidArgument, "control " + name + " is not aligned with the calendar");
        }
        if (transform_ != ControlTransform::LogReturn) continue;
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series[i] && !(*series[i] > 0.0)) {
                throw Error(ErrorKind::Data, "control " + name + " must be positive for log returns",
                            name + " " + calendar_[i].iso());
            }
        }
    }
}

std::optional<double> ControlSeries::value(const std::string& name, Date date) const {
    const auto it = levels_.find(name);
    if (it == levels_.end()) return std::nullopt;
    const auto idx = calendar_.index_of(date);
    if (!idx) return std::nullopt;
    const auto& s = it->second;
    if (!s[*idx]) return std::nullopt;
    if (transform_ == ControlTransform::Level) return s[*idx];
    if (*idx == 0 || !s[*idx - 1]) return std::nullopt;
    return std::log(*s[*idx] / *s[*idx - 1]);
}

ControlSeries read_controls(std::istream& in, const TradingCalendar& calendar, ControlTransform transform,
                            const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    if (!detail::next_content_line(in, line, line_no)) {
        throw DataError(source, {{0, "empty controls file (expected header date,name,value)"}});
    }
    const auto header = detail::split(line, ',');
    if (header.size() != 3 || header[0] != "date" || header[1] != "name" || header[2] != "value") {
        throw DataError(source, {{line_no, "header must be date,name,value"}});
    }
    std::map<std::string, AlignedSeries> levels;
    std::vector<DataIssue> issues;
    while (detail::next_content_line(in, line, line_no)) {
        const auto f = detail::split(line, ',');
        if (f.size() != 3) {
            issues.push_back({line_no, "expected 3 fields, found " + std::to_string(f.size())});
            continue;
        }
        const auto date = Date::try_parse(f[0]);
        const auto value = detail::parse_double(f[2]);
        if (!date || f[1].empty() || !value) {
            issues.push_back({line_no, "unparseable control row"});
            continue;
        }
        const auto idx = calendar.index_of(*date);
        if (!idx) {
            issues.push_back({line_no, "date " + date->iso() + " is not in the trading calendar"});
            continue;
        }
        auto& series = levels[std::string(f[1])];
        if (series.empty()) series.resize(calendar.size());
        if (series[*idx]) {
            issues.push_back({line_no, "duplicate row for (" + date->iso() + ", " + std::string(f[1]) + ")"});
            continue;
        }
        series[*idx] = *value;
    }
    if (!issues.empty()) throw DataError(source, std::move(issues));
    return ControlSeries(calendar, std::move(levels), transform);
}

void write_controls_csv(const ControlSeries& controls, std::ostream& out) {
    out << "date,name,value\n";
    char buf[64];
    const auto& cal = controls.calendar();
    for (std::size_t i = 0; i < cal.size(); ++i) {
        for (const auto& [name, series] : controls.levels()) {
            if (!series[i]) continue;
            std::snprintf(buf, sizeof buf, "%.17g", *series[i]);
            out << cal[i].iso() << ',' << name << ',' << buf << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Design construction

RegressionSpec parse_regression_spec(std::string_view text) {
    if (text == "eq5") return RegressionSpec::Eq5;
    if (text == "eq6") return RegressionSpec::Eq6;
    throw Error(ErrorKind::InvalidArgument, "unknown regression spec '" + std::string(text) + "' (expected eq5|eq6)");
}

std::string_view to_string(RegressionSpec spec) noexcept { return spec == RegressionSpec::Eq5 ? "eq5" : "eq6"; }

DesignMode parse_design_mode(std::string_view text) {
    if (text == "panel") return DesignMode::Panel;
    if (text == "cross-section" || text == "cross_section") return DesignMode::CrossSection;
    throw Error(ErrorKind::InvalidArgument,
                "unknown design mode '" + std::string(text) + "' (expected panel|cross-section)");
}

std::string_view to_string(DesignMode mode) noexcept {
    return mode == DesignMode::Panel ? "panel" : "cross-section";
}

namespace {

std::string day_label(int day) { return day > 0 ? "+" + std::to_string(day) : std::to_string(day); }

// Firms sorted by ticker so row order never depends on input order.
std::vector<const ARSeries*> sorted_firms(std::span<const ARSeries> ars) {
    std::vector<const ARSeries*> firms;
    firms.reserve(ars.size());
    for (const auto& a : ars) firms.push_back(&a);
    std::sort(firms.begin(), firms.end(), [](const ARSeries* a, const ARSeries* b) { return a->ticker() < b->ticker(); });
    for (std::size_t i = 1; i < firms.size(); ++i) {
        if (firms[i]->ticker() == firms[i - 1]->ticker()) {
            throw Error(ErrorKind::InvalidArgument, "duplicate abnormal return series", firms[i]->ticker());
        }
    }
    if (firms.empty()) throw Error(ErrorKind::InvalidArgument, "no firms for the regression design");
    return firms;
}

const FirmAttributes& attributes_for(const std::map<std::string, FirmAttributes>& attributes,
                                     const std::string& ticker) {
    const auto it = attributes.find(ticker);
    if (it == attributes.end()) throw Error(ErrorKind::MissingData, "missing firm attributes", ticker);
    return it->second;
}

double control_at(const ControlSeries& controls, const EventFrame& frame, std::string_view name, int day,
                  const std::string& ticker) {
    const Date date = frame.date_at(day);
    const auto v = controls.value(std::string(name), date);
    if (!v) {
        throw Error(ErrorKind::MissingData, "missing control value " + std::string(name) + " on " + date.iso(),
                    ticker + " day " + day_label(day));
    }
    return *v;
}

struct Columns {
    std::vector<double> dummy, size, income;
    std::array<std::vector<double>, kControlNames.size()> controls;
};

RegressionDesign assemble(Columns cols, std::vector<double> response, std::vector<std::string> labels,
                          std::string label, const DesignOptions& options) {
    RegressionDesign design;
    design.matrix = DesignMatrix(response.size());
    design.matrix.add_intercept(options.constant_label)
        .add_column(options.dummy_label, cols.dummy)
        .add_column("Size", cols.size)
        .add_column("Income", cols.income);
    if (options.spec == RegressionSpec::Eq6) {
        for (std::size_t c = 0; c < kControlNames.size(); ++c) {
            design.matrix.add_column(std::string(kControlNames[c]), cols.controls[c]);
        }
    }
    design.response = std::move(response);
    design.row_labels = std::move(labels);
    design.label = std::move(label);
    return design;
}

void require_controls(const ControlSeries* controls, const DesignOptions& options) {
    if (options.spec != RegressionSpec::Eq6) return;
    if (!controls) throw Error(ErrorKind::MissingData, "extended specification needs control series");
    for (auto name : kControlNames) {
        if (!controls->has(std::string(name))) {
            throw Error(ErrorKind::MissingData, "control series " + std::string(name) + " not supplied");
        }
    }
}

}  // namespace

RegressionDesign build_design(const EventFrame& frame, std::span<const ARSeries> ars,
                              const std::map<std::string, FirmAttributes>& attributes,
                              const ControlSeries* controls, Window window, const DesignOptions& options) {
    require_controls(controls, options);
    const auto firms = sorted_firms(ars);

    Columns cols;
    std::vector<double> response;
    std::vector<std::string> labels;
    for (const ARSeries* firm : firms) {
        if (!firm->covers(window)) {
            throw Error(ErrorKind::InvalidArgument, "window " + window.label() + " is outside the abnormal returns",
                        firm->ticker());
        }
        const FirmAttributes& attr = attributes_for(attributes, firm->ticker());
        const auto path = car_path(*firm, window.tau1);
        for (int day = window.tau1; day <= window.tau2; ++day) {
            response.push_back(path[static_cast<std::size_t>(day - window.tau1)].car);
            cols.dummy.push_back(day == 1 ? 1.0 : 0.0);
            cols.size.push_back(attr.size);
            cols.income.push_back(attr.income);
            if (options.spec == RegressionSpec::Eq6) {
                for (std::size_t c = 0; c < kControlNames.size(); ++c) {
                    cols.controls[c].push_back(control_at(*controls, frame, kControlNames[c], day, firm->ticker()));
                }
            }
            labels.push_back(firm->ticker() + "@" + day_label(day));
        }
    }
    return assemble(std::move(cols), std::move(response), std::move(labels), window.label(), options);
}

RegressionDesign build_cross_section_design(const EventFrame& frame, std::span<const ARSeries> ars,
                                            const std::map<std::string, FirmAttributes>& attributes,
                                            const ControlSeries* controls, std::span<const Window> windows,
                                            const DesignOptions& options) {
    require_controls(controls, options);
    if (windows.empty()) throw Error(ErrorKind::InvalidArgument, "cross-section design needs at least one window");
    const auto firms = sorted_firms(ars);

    Columns cols;
    std::vector<double> response;
    std::vector<std::string> labels;
    for (const ARSeries* firm : firms) {
        const FirmAttributes& attr = attributes_for(attributes, firm->ticker());
        for (const Window& w : windows) {
            response.push_back(cumulative_abnormal_return(*firm, w));
            cols.dummy.push_back(w.tau1 > 0 ? 1.0 : 0.0);
            cols.size.push_back(attr.size);
            cols.income.push_back(attr.income);
            if (options.spec == RegressionSpec::Eq6) {
                for (std::size_t c = 0; c < kControlNames.size(); ++c) {
                    CompensatedSum acc;
                    for (int day = w.tau1; day <= w.tau2; ++day) {
                        acc.add(control_at(*controls, frame, kControlNames[c], day, firm->ticker()));
                    }
                    const double total = acc.value();
                    cols.controls[c].push_back(controls->transform() == ControlTransform::LogReturn
                                                   ? total
                                                   : total / static_cast<double>(w.length()));
                }
            }
            labels.push_back(firm->ticker() + "@" + w.label());
        }
    }
    std::string label;
    for (const Window& w : windows) label += (label.empty() ? "" : ",") + w.label();
    return assemble(std::move(cols), std::move(response), std::move(labels), label, options);
}

// ---------------------------------------------------------------------------
// Fitting and stars

std::string significance_stars(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "p-value " + std::to_string(p) + " is outside [0, 1]");
    }
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.10) return "*";
    return "";
}

const RegressorEstimate& RegressionResult::at(std::string_view name) const {
    for (const auto& e : estimates) {
        if (e.name == name) return e;
    }
    throw Error(ErrorKind::InvalidArgument, "no regressor '" + std::string(name) + "' in " + label);
}

RegressionResult fit_sector_regression(const RegressionDesign& design, HcVariant robust) {
    OlsOptions options;
    options.robust = robust;
    const OlsFit fit = ols_fit(design.matrix, design.response, options);

    RegressionResult out;
    out.label = design.label;
    out.r2 = fit.r2;
    out.adjusted_r2 = fit.adjusted_r2;
    out.n_obs = fit.n_obs;
    out.robust = robust;
    out.warnings = fit.warnings;

    // Residuals at rounding level relative to the response count as an exact
    // fit; so do coefficients whose contribution is at that level.
    const Eigen::Map<const Eigen::VectorXd> y(design.response.data(), static_cast<Eigen::Index>(design.response.size()));
    const double y_norm = y.norm();
    const bool exact_fit = std::sqrt(fit.ssr) <= 1e-10 * y_norm;
    auto negligible = [&](std::size_t j) {
        const auto col = static_cast<Eigen::Index>(j);
        return std::abs(fit.coefficients(col)) * design.matrix.matrix().col(col).norm() <= 1e-10 * y_norm;
    };
    std::vector<CoefficientTest> tests;
    if (!exact_fit) tests = coefficient_tests(fit, fit.hc_cov);
    for (std::size_t j = 0; j < fit.n_params; ++j) {
        RegressorEstimate e;
        e.name = fit.names[j];
        if (exact_fit) {
            e.estimate = fit.coefficients(static_cast<Eigen::Index>(j));
            e.std_error = 0.0;
            const bool zero = negligible(j);
            e.t_stat = zero ? 0.0 : std::copysign(INFINITY, e.estimate);
            e.p_value = zero ? 1.0 : 0.0;
        } else {
            e.estimate = tests[j].estimate;
            e.std_error = tests[j].std_error;
            e.t_stat = tests[j].t_stat;
            e.p_value = tests[j].p_value;
        }
        e.stars = significance_stars(e.p_value);
        out.estimates.push_back(std::move(e));
    }
    if (exact_fit) out.warnings.push_back("exact fit: residuals are all zero, robust errors degenerate");
    return out;
}

}  // namespace eventstudy
