#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eventstudy/estimation.hpp"
#include "eventstudy/event_study.hpp"
#include "eventstudy/market_data.hpp"

namespace eventstudy {

struct AttributeRecord {
    std::size_t row = 0;
    std::string ticker;
    double total_assets = 0.0;  // USD
    double net_income = 0.0;   // USD
};

/// Firm characteristics on log scale.
struct FirmAttributes {
    std::string ticker;
    double size = 0.0;    // ln(total assets)
    double income = 0.0;  // ln(net income); sign * ln(1 + |income|) when income <= 0
    bool income_sign_adjusted = false;
};

/// Lenient mode maps non-positive income to sign * ln(1 + |income|) and
/// appends a warning; strict mode throws. Total assets must be positive.
FirmAttributes make_firm_attributes(const AttributeRecord& record, bool strict,
                                    std::vector<std::string>* warnings = nullptr);

/// Reads `ticker,total_assets,net_income`.
std::vector<AttributeRecord> read_attribute_records(std::istream& in, const std::string& source = "<attributes>");
void write_attribute_csv(std::span<const AttributeRecord> records, std::ostream& out);

std::map<std::string, FirmAttributes> firm_attributes(std::span<const AttributeRecord> records, bool strict,
                                                      std::vector<std::string>* warnings = nullptr);

enum class ControlTransform { LogReturn, Level };

ControlTransform parse_control_transform(std::string_view text);
std::string_view to_string(ControlTransform transform) noexcept;

/// Market-control variables in the order they enter the extended specification.
inline constexpr std::array<std::string_view, 4> kControlNames{"VIX", "Gold", "Silver", "Bitcoin"};

/// Named daily control levels aligned with a trading calendar, exposed either
/// as levels or as one-day log returns.
class ControlSeries {
  public:
    ControlSeries() = default;
    ControlSeries(TradingCalendar calendar, std::map<std::string, AlignedSeries> levels,
                  ControlTransform transform);

    const TradingCalendar& calendar() const noexcept { return calendar_; }
    ControlTransform transform() const noexcept { return transform_; }
    const std::map<std::string, AlignedSeries>& levels() const noexcept { return levels_; }
    bool has(const std::string& name) const { return levels_.contains(name); }

    /// Transformed value on `date`; empty if the level (or, for log returns,
    /// the previous trading day's level) is absent.
    std::optional<double> value(const std::string& name, Date date) const;

  private:
    TradingCalendar calendar_;
    std::map<std::string, AlignedSeries> levels_;
    ControlTransform transform_ = ControlTransform::LogReturn;
};

/// Reads `date,name,value`. Every date must be on the calendar.
ControlSeries read_controls(std::istream& in, const TradingCalendar& calendar, ControlTransform transform,
                            const std::string& source = "<controls>");
void write_controls_csv(const ControlSeries& controls, std::ostream& out);

enum class RegressionSpec { Eq5, Eq6 };
enum class DesignMode { Panel, CrossSection };

RegressionSpec parse_regression_spec(std::string_view text);
std::string_view to_string(RegressionSpec spec) noexcept;
DesignMode parse_design_mode(std::string_view text);
std::string_view to_string(DesignMode mode) noexcept;

struct DesignOptions {
    RegressionSpec spec = RegressionSpec::Eq5;
    std::string constant_label = "Constant";
    std::string dummy_label = "Trump";
};

struct RegressionDesign {
    DesignMatrix matrix{0};
    std::vector<double> response;
    std::vector<std::string> row_labels;  // "ticker@day" or "ticker@[a;b]"
    std::string label;                    // window label(s) the design covers
};

/// Panel design: one row per (firm, day) in the window; response is
/// CAR[window start; day]; the event dummy is 1 on day +1 only.
/// Columns: constant, dummy, Size, Income, then VIX, Gold, Silver, Bitcoin for Eq6.
RegressionDesign build_design(const EventFrame& frame, std::span<const ARSeries> ars,
                              const std::map<std::string, FirmAttributes>& attributes,
                              const ControlSeries* controls, Window window, const DesignOptions& options = {});

/// Cross-section design: one row per (firm, window); response is the window
/// CAR; the event dummy is 1 for windows that start after day 0. Controls
/// enter as their sum over the window (log returns) or mean (levels).
RegressionDesign build_cross_section_design(const EventFrame& frame, std::span<const ARSeries> ars,
                                            const std::map<std::string, FirmAttributes>& attributes,
                                            const ControlSeries* controls, std::span<const Window> windows,
                                            const DesignOptions& options = {});

struct RegressorEstimate {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
    std::string stars;
};

struct RegressionResult {
    std::string label;
    std::vector<RegressorEstimate> estimates;
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    std::size_t n_obs = 0;
    HcVariant robust = HcVariant::HC1;
    std::vector<std::string> warnings;

    const RegressorEstimate& at(std::string_view name) const;
};

/// OLS with heteroskedasticity-robust p-values and significance stars. An
/// exact fit (all residuals zero) reports p = 1 for zero coefficients and
/// p = 0 otherwise.
RegressionResult fit_sector_regression(const RegressionDesign& design, HcVariant robust = HcVariant::HC1);

/// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.10, else "".
std::string significance_stars(double p);

}  // namespace eventstudy
