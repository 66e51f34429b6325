#include "eventstudy/event_study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "eventstudy/error.hpp"
#include "eventstudy/estimation.hpp"
#include "eventstudy/summation.hpp"
#include "text.hpp"

namespace eventstudy {

// ---------------------------------------------------------------------------
// Window

Window Window::make(int tau1, int tau2) {
    if (tau1 > tau2) {
        throw Error(ErrorKind::InvalidArgument,
                    "window start " + std::to_string(tau1) + " is after its end " + std::to_string(tau2));
    }
    return Window{tau1, tau2};
}

namespace {

int parse_day(std::string_view text, std::string_view whole) {
    text = detail::trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::InvalidArgument, "unparseable window '" + std::string(whole) + "' (expected a:b)");
    }
    return value;
}

}  // namespace

Window Window::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorKind::InvalidArgument, "unparseable window '" + std::string(text) + "' (expected a:b)");
    }
    return make(parse_day(text.substr(0, colon), text), parse_day(text.substr(colon + 1), text));
}

std::vector<Window> Window::parse_list(std::string_view text) {
    std::vector<Window> out;
    for (auto field : detail::split(text, ',')) {
        if (!field.empty()) out.push_back(parse(field));
    }
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty window list");
    return out;
}

std::string Window::label() const {
    auto day = [](int d) { return d > 0 ? "+" + std::to_string(d) : std::to_string(d); };
    return "[" + day(tau1) + ";" + day(tau2) + "]";
}

// ---------------------------------------------------------------------------
// Market model

MarketModelFit fit_market_model(const EventFrame& frame, const std::string& ticker, const std::string& benchmark,
                                Window estimation, const MarketModelOptions& options) {
    if (!frame.covers(estimation.tau1) || !frame.covers(estimation.tau2)) {
        throw Error(ErrorKind::InvalidArgument,
                    "estimation window " + estimation.label() + " is outside the event frame", ticker);
    }
    std::vector<double> firm;
    std::vector<double> market;
    firm.reserve(estimation.length());
    market.reserve(estimation.length());
    for (int d = estimation.tau1; d <= estimation.tau2; ++d) {
        const auto ri = frame.return_at(ticker, d);
        const auto rm = frame.return_at(benchmark, d);
        if (!ri || !rm) {
            if (options.strict) {
                throw Error(ErrorKind::MissingData,
                            "missing " + std::string(!ri ? "firm" : "benchmark") + " return in estimation window",
                            (!ri ? ticker : benchmark) + " day " + std::to_string(d));
            }
            continue;
        }
        firm.push_back(*ri);
        market.push_back(*rm);
    }
    if (firm.size() < std::max<std::size_t>(options.min_observations, 3)) {
        throw Error(ErrorKind::MissingData,
                    "insufficient observations for market model: " + std::to_string(firm.size()) + " < " +
                        std::to_string(std::max<std::size_t>(options.min_observations, 3)),
                    ticker);
    }
    const auto [lo, hi] = std::minmax_element(market.begin(), market.end());
    if (*lo == *hi) {
        throw Error(ErrorKind::Numerical, "zero benchmark variance over the estimation window", benchmark);
    }

    DesignMatrix x(firm.size());
    x.add_intercept("alpha").add_column("beta", market);
    const OlsFit ols = ols_fit(x, firm);

    MarketModelFit fit;
    fit.ticker = ticker;
    fit.benchmark = benchmark;
    fit.estimation = estimation;
    fit.alpha = ols.coefficients(0);
    fit.beta = ols.coefficients(1);
    fit.resid_var = ols.sigma2;
    fit.n_est = firm.size();
    return fit;
}

// ---------------------------------------------------------------------------
// Abnormal returns and CARs

ARSeries::ARSeries(std::string ticker, int first_day, std::vector<double> values)
    : ticker_(std::move(ticker)), first_day_(first_day), values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "abnormal return series is empty", ticker_);
}

double ARSeries::at(int day) const {
    if (day < first_day() || day > last_day()) {
        throw Error(ErrorKind::InvalidArgument,
                    "day " + std::to_string(day) + " is outside the abnormal return span " + span().label(),
                    ticker_);
    }
    return values_[static_cast<std::size_t>(day - first_day_)];
}

ARSeries abnormal_returns(const MarketModelFit& fit, const EventFrame& frame, Window event_period) {
    if (!frame.covers(event_period.tau1) || !frame.covers(event_period.tau2)) {
        throw Error(ErrorKind::InvalidArgument,
                    "event period " + event_period.label() + " is outside the event frame", fit.ticker);
    }
    std::vector<double> values;
    values.reserve(event_period.length());
    for (int d = event_period.tau1; d <= event_period.tau2; ++d) {
        const auto ri = frame.return_at(fit.ticker, d);
        const auto rm = frame.return_at(fit.benchmark, d);
        if (!ri || !rm) {
            throw Error(ErrorKind::MissingData,
                        "missing " + std::string(!ri ? "firm" : "benchmark") + " return in event period",
                        (!ri ? fit.ticker : fit.benchmark) + " day " + std::to_string(d));
        }
        values.push_back(*ri - fit.alpha - fit.beta * *rm);
    }
    return ARSeries(fit.ticker, event_period.tau1, std::move(values));
}

double cumulative_abnormal_return(const ARSeries& ars, Window window) {
    if (!ars.covers(window)) {
        throw Error(ErrorKind::InvalidArgument,
                    "window " + window.label() + " is outside the abnormal return span " + ars.span().label(),
                    ars.ticker());
    }
    const auto offset = static_cast<std::size_t>(window.tau1 - ars.first_day());
    return compensated_sum(ars.values().subspan(offset, window.length()));
}

std::vector<CarPoint> car_path(const ARSeries& ars, int anchor) {
    if (anchor < ars.first_day() || anchor > ars.last_day()) {
        throw Error(ErrorKind::InvalidArgument,
                    "anchor day " + std::to_string(anchor) + " is outside the abnormal return span", ars.ticker());
    }
    std::vector<CarPoint> path;
    CompensatedSum acc;
    for (int d = anchor; d <= ars.last_day(); ++d) {
        acc.add(ars.at(d));
        path.push_back({d, acc.value()});
    }
    return path;
}

CarTest car_t_test(double car, Window window, const MarketModelFit& fit) {
    if (fit.n_est < 3) throw Error(ErrorKind::InvalidArgument, "market model has no residual degrees of freedom");
    if (fit.resid_var < 0.0) throw Error(ErrorKind::InvalidArgument, "negative residual variance", fit.ticker);
    CarTest out;
    if (fit.resid_var == 0.0) {
        out.degenerate = true;
        if (car == 0.0) {
            out.t_stat = 0.0;
            out.p_value = 1.0;
        } else {
            out.t_stat = std::copysign(std::numeric_limits<double>::infinity(), car);
            out.p_value = 0.0;
        }
        return out;
    }
    out.t_stat = car / std::sqrt(static_cast<double>(window.length()) * fit.resid_var);
    out.p_value = student_t_two_sided_p(out.t_stat, fit.df());
    return out;
}

CarResult make_car_result(const ARSeries& ars, Window window, const MarketModelFit& fit) {
    CarResult r;
    r.ticker = ars.ticker();
    r.window = window;
    r.car = cumulative_abnormal_return(ars, window);
    const CarTest test = car_t_test(r.car, window, fit);
    r.t_stat = test.t_stat;
    r.p_value = test.p_value;
    r.degenerate = test.degenerate;
    return r;
}

// ---------------------------------------------------------------------------
// Uncertain information hypothesis

namespace {

HypothesisVerdict test_mean_positive(std::string name, Window window, std::span<const CarResult> cars,
                                     double level) {
    std::map<std::string, double> by_firm;
    for (const auto& c : cars) {
        if (c.window != window) continue;
        if (!by_firm.emplace(c.ticker, c.car).second) {
            throw Error(ErrorKind::InvalidArgument, "duplicate CAR for window " + window.label(), c.ticker);
        }
    }

    HypothesisVerdict v;
    v.name = std::move(name);
    v.window = window;
    v.n_firms = by_firm.size();
    if (by_firm.empty()) {
        v.insufficient_firms = true;
        return v;
    }

    CompensatedSum sum;
    for (const auto& [_, car] : by_firm) sum.add(car);
    const double n = static_cast<double>(by_firm.size());
    v.mean_car = sum.value() / n;
    if (by_firm.size() < 2) {
        v.insufficient_firms = true;
        return v;
    }

    CompensatedSum ss;
    for (const auto& [_, car] : by_firm) ss.add((car - v.mean_car) * (car - v.mean_car));
    const double sd = std::sqrt(ss.value() / (n - 1.0));
    double t = 0.0;
    if (sd > 0.0) {
        t = v.mean_car / (sd / std::sqrt(n));
    } else if (v.mean_car != 0.0) {
        t = std::copysign(std::numeric_limits<double>::infinity(), v.mean_car);
    }
    v.t_stat = t;
    v.p_value = (sd == 0.0 && v.mean_car == 0.0) ? 1.0 : student_t_upper_p(t, n - 1.0);
    v.supported = *v.p_value < level && v.mean_car > 0.0;
    return v;
}

}  // namespace

UihVerdict evaluate_uih(std::span<const CarResult> cars, const HypothesisWindows& windows, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "significance level must lie in (0, 1)");
    }
    std::map<std::string, int> coverage;
    for (const auto& c : cars) {
        int& mask = coverage[c.ticker];
        if (c.window == windows.h1a) mask |= 1;
        if (c.window == windows.h1b) mask |= 2;
        if (c.window == windows.h2) mask |= 4;
    }
    for (const auto& [ticker, mask] : coverage) {
        if (mask != 7) {
            throw Error(ErrorKind::MissingData, "firm lacks a CAR for at least one hypothesis window", ticker);
        }
    }

    UihVerdict out;
    out.level = level;
    out.h1a = test_mean_positive("H1a", windows.h1a, cars, level);
    out.h1b = test_mean_positive("H1b", windows.h1b, cars, level);
    out.h2 = test_mean_positive("H2", windows.h2, cars, level);
    return out;
}

}  // namespace eventstudy
