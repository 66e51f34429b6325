#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eventstudy/market_data.hpp"

namespace eventstudy {

/// Inclusive relative-day window [tau1; tau2].
struct Window {
    int tau1 = 0;
    int tau2 = 0;

    /// Throws unless tau1 <= tau2.
    static Window make(int tau1, int tau2);
    /// Parses "a:b", e.g. "-10:0" or "+1:+10".
    static Window parse(std::string_view text);
    /// Parses a comma separated list of windows, e.g. "0:0,1:10".
    static std::vector<Window> parse_list(std::string_view text);

    std::size_t length() const noexcept { return static_cast<std::size_t>(tau2 - tau1 + 1); }
    bool contains(int day) const noexcept { return day >= tau1 && day <= tau2; }
    bool contains(const Window& other) const noexcept { return other.tau1 >= tau1 && other.tau2 <= tau2; }
    /// "[-10;+10]" style label.
    std::string label() const;

    friend bool operator==(const Window&, const Window&) = default;
    friend auto operator<=>(const Window&, const Window&) = default;
};

struct MarketModelFit {
    std::string ticker;
    std::string benchmark;
    Window estimation;
    double alpha = 0.0;
    double beta = 0.0;
    double resid_var = 0.0;  // SSR / (n_est - 2)
    std::size_t n_est = 0;

    double df() const noexcept { return static_cast<double>(n_est) - 2.0; }
};

struct MarketModelOptions {
    std::size_t min_observations = 30;
    /// Strict: every estimation-window day must have both returns. Lenient:
    /// days missing either return are skipped.
    bool strict = true;
};

MarketModelFit fit_market_model(const EventFrame& frame, const std::string& ticker, const std::string& benchmark,
                                Window estimation, const MarketModelOptions& options = {});

/// Abnormal returns R_i - alpha - beta * R_M over a contiguous span of relative days.
class ARSeries {
  public:
    ARSeries(std::string ticker, int first_day, std::vector<double> values);

    const std::string& ticker() const noexcept { return ticker_; }
    int first_day() const noexcept { return first_day_; }
    int last_day() const noexcept { return first_day_ + static_cast<int>(values_.size()) - 1; }
    Window span() const noexcept { return Window{first_day(), last_day()}; }
    bool covers(const Window& w) const noexcept { return span().contains(w); }
    std::span<const double> values() const noexcept { return values_; }
    double at(int day) const;

  private:
    std::string ticker_;
    int first_day_;
    std::vector<double> values_;
};

/// Throws MissingData naming the first day without a firm or benchmark return.
ARSeries abnormal_returns(const MarketModelFit& fit, const EventFrame& frame, Window event_period);

/// Compensated sum of the abnormal returns over the window.
double cumulative_abnormal_return(const ARSeries& ars, Window window);

struct CarPoint {
    int day = 0;
    double car = 0.0;
};

/// Running CAR[anchor; day] for every day from `anchor` to the end of the series.
std::vector<CarPoint> car_path(const ARSeries& ars, int anchor);

struct CarTest {
    double t_stat = 0.0;
    double p_value = 1.0;
    bool degenerate = false;  // zero residual variance
};

/// t = CAR / sqrt(L * resid_var), two-sided Student-t with n_est - 2 df.
CarTest car_t_test(double car, Window window, const MarketModelFit& fit);

struct CarResult {
    std::string ticker;
    Window window;
    double car = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
    bool degenerate = false;
};

CarResult make_car_result(const ARSeries& ars, Window window, const MarketModelFit& fit);

struct HypothesisWindows {
    Window h1a{-10, 0};
    Window h1b{0, 1};
    Window h2{1, 10};
};

struct HypothesisVerdict {
    std::string name;
    Window window;
    std::size_t n_firms = 0;
    double mean_car = 0.0;
    std::optional<double> t_stat;
    std::optional<double> p_value;  // one-sided, H0: mean <= 0
    bool supported = false;
    /// Set when fewer than two firms were available and no test was run.
    bool insufficient_firms = false;
};

struct UihVerdict {
    double level = 0.05;
    HypothesisVerdict h1a;
    HypothesisVerdict h1b;
    HypothesisVerdict h2;
};

/// Cross-firm one-sided t-test of mean CAR > 0 for each hypothesis window.
/// Every firm must have a CarResult for each of the three windows.
UihVerdict evaluate_uih(std::span<const CarResult> cars, const HypothesisWindows& windows = {},
                        double level = 0.05);

}  // namespace eventstudy
