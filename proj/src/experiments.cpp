#include "eventstudy/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "eventstudy/error.hpp"
#include "eventstudy/summation.hpp"

namespace eventstudy {

ScenarioAnalysis analyze_scenario(const Scenario& scenario, Window estimation, Window event_period) {
    const ReturnPanel returns = compute_log_returns(scenario.prices);
    const Span span{std::min({estimation.tau1, event_period.tau1, 0}), std::max({estimation.tau2, event_period.tau2, 0})};
    ScenarioAnalysis out{build_event_frame(returns, scenario.truth.event_date, span), {}, {}};
    for (const auto& ticker : scenario.truth.tickers) {
        out.fits.push_back(fit_market_model(out.frame, ticker, scenario.truth.benchmark, estimation));
        out.ars.push_back(abnormal_returns(out.fits.back(), out.frame, event_period));
    }
    return out;
}

namespace {

Window hypothesis_span(const HypothesisWindows& w) {
    return {std::min({w.h1a.tau1, w.h1b.tau1, w.h2.tau1}), std::max({w.h1a.tau2, w.h1b.tau2, w.h2.tau2})};
}

UihVerdict scenario_verdict(const Scenario& s, const HypothesisWindows& windows, double level) {
    const auto a = analyze_scenario(s, {-115, -11}, hypothesis_span(windows));
    std::vector<CarResult> cars;
    for (std::size_t i = 0; i < a.fits.size(); ++i) {
        for (const auto& w : {windows.h1a, windows.h1b, windows.h2}) cars.push_back(make_car_result(a.ars[i], w, a.fits[i]));
    }
    return evaluate_uih(cars, windows, level);
}

int supported_count(const UihVerdict& v) {
    return int(v.h1a.supported) + int(v.h1b.supported) + int(v.h2.supported);
}

}  // namespace

TrialExtractor car_test_extractor(Window window, double level) {
    return [=](const Scenario& s) {
        const auto a = analyze_scenario(s, {-115, -11}, window);
        const double car = cumulative_abnormal_return(a.ars.at(0), window);
        const CarTest t = car_t_test(car, window, a.fits.at(0));
        return TrialOutcome{t.t_stat, t.p_value < level};
    };
}

TrialExtractor beta_recovery_extractor() {
    return [](const Scenario& s) {
        const auto a = analyze_scenario(s);
        CompensatedSum sum;
        for (const auto& f : a.fits) sum.add(f.beta);
        return TrialOutcome{sum.value() / static_cast<double>(a.fits.size()), false};
    };
}

TrialExtractor mean_car_extractor(Window window, double level) {
    return [=](const Scenario& s) {
        const auto a = analyze_scenario(s, {-115, -11}, window);
        std::vector<double> cars;
        for (const auto& ar : a.ars) cars.push_back(cumulative_abnormal_return(ar, window));
        const double n = static_cast<double>(cars.size());
        const double mean = compensated_sum(cars) / n;
        CompensatedSum ss;
        for (double c : cars) ss.add((c - mean) * (c - mean));
        const double sd = std::sqrt(ss.value() / (n - 1.0));
        const bool significant = n >= 2 && sd > 0 && student_t_upper_p(mean / (sd / std::sqrt(n)), n - 1.0) < level;
        return TrialOutcome{mean, significant};
    };
}

TrialExtractor uih_extractor(const HypothesisWindows& windows, double level) {
    return [=](const Scenario& s) {
        const auto v = scenario_verdict(s, windows, level);
        return TrialOutcome{double(supported_count(v)), v.h2.supported && !v.h1a.supported};
    };
}

TrialExtractor uih_any_extractor(const HypothesisWindows& windows, double level) {
    return [=](const Scenario& s) {
        const auto v = scenario_verdict(s, windows, level);
        return TrialOutcome{double(supported_count(v)), supported_count(v) > 0};
    };
}

TrialExtractor regression_extractor(double target, double tolerance, Window window, HcVariant robust) {
    return [=](const Scenario& s) {
        const auto a = analyze_scenario(s, {-115, -11}, window);
        const auto attributes = firm_attributes(s.attributes, false);
        DesignOptions options;
        const auto design = build_design(a.frame, a.ars, attributes, nullptr, window, options);
        const auto result = fit_sector_regression(design, robust);
        const auto& dummy = result.at(options.dummy_label);
        return TrialOutcome{dummy.estimate, std::abs(dummy.estimate - target) <= tolerance && dummy.stars == "***"};
    };
}

std::vector<std::string> extractor_names() {
    return {"car-test-size", "beta-recovery", "mean-car", "uih", "uih-any", "regression"};
}

TrialExtractor named_extractor(std::string_view name, const ExtractorParams& p) {
    if (name == "car-test-size") return car_test_extractor(p.window, p.level);
    if (name == "beta-recovery") return beta_recovery_extractor();
    if (name == "mean-car") return mean_car_extractor(p.window, p.level);
    if (name == "uih") return uih_extractor({}, p.level);
    if (name == "uih-any") return uih_any_extractor({}, p.level);
    if (name == "regression") return regression_extractor(p.target, p.tolerance);
    throw Error(ErrorKind::InvalidArgument, "unknown statistic '" + std::string(name) + "'");
}

}  // namespace eventstudy
