#include "eventstudy/simulation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "eventstudy/error.hpp"
#include "eventstudy/random.hpp"
#include "eventstudy/summation.hpp"

namespace eventstudy {

namespace {

struct ControlProcess {
    std::string_view name;
    double start;
    double vol;
};

// Daily log-return volatility of each synthetic control level.
constexpr std::array<ControlProcess, 4> kControlProcesses{{
    {"VIX", 15.0, 0.05},
    {"Gold", 1300.0, 0.01},
    {"Silver", 18.0, 0.015},
    {"Bitcoin", 700.0, 0.03},
}};

Date step_weekday(Date d, int direction) {
    do {
        d = d.add_days(direction);
    } while (d.is_weekend());
    return d;
}

}  // namespace

std::string ScenarioSpec::ticker(std::size_t i) const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", i + 1);
    return firm_prefix + buf;
}

void ScenarioSpec::validate() const {
    if (n_firms == 0) throw Error(ErrorKind::Config, "scenario needs at least one firm", "n_firms");
    if (!firms.empty() && firms.size() != n_firms) {
        throw Error(ErrorKind::Config, "per-firm parameters must list exactly n_firms entries", "firms");
    }
    if (!(benchmark_vol >= 0.0)) throw Error(ErrorKind::Config, "benchmark_vol must be >= 0", "benchmark_vol");
    for (std::size_t i = 0; i < n_firms; ++i) {
        if (!(firm(i).sigma >= 0.0)) throw Error(ErrorKind::Config, "firm sigma must be >= 0", ticker(i));
    }
    if (event_index >= n_days) throw Error(ErrorKind::Config, "event_index must be < n_days", "event_index");
    const auto before = static_cast<long>(event_index);
    const auto after = static_cast<long>(n_days) - 1 - before;
    if (before < -static_cast<long>(required_span.min_offset) || after < required_span.max_offset) {
        throw Error(ErrorKind::Config,
                    "scenario span too short: " + std::to_string(before) + " days before and " +
                        std::to_string(after) + " after the event, need " +
                        std::to_string(-required_span.min_offset) + " and " + std::to_string(required_span.max_offset),
                    "n_days");
    }
    for (const auto& s : shocks) {
        if (s.day < -before || s.day > after) {
            throw Error(ErrorKind::Config, "shock day " + std::to_string(s.day) + " is outside the scenario",
                        "shocks");
        }
    }
    if (benchmark_ticker.empty()) throw Error(ErrorKind::Config, "benchmark ticker is empty", "benchmark");
}

Scenario generate_scenario(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_days;
    const auto event = static_cast<long>(spec.event_index);

    // Calendar: base day plus n return days, weekdays around the event date.
    std::vector<Date> dates(n + 1);
    Date event_date = spec.event_date;
    if (event_date.is_weekend()) event_date = step_weekday(event_date, +1);
    dates[static_cast<std::size_t>(event) + 1] = event_date;
    for (long i = event; i >= 0; --i) dates[static_cast<std::size_t>(i)] = step_weekday(dates[static_cast<std::size_t>(i) + 1], -1);
    for (std::size_t i = static_cast<std::size_t>(event) + 2; i <= n; ++i) dates[i] = step_weekday(dates[i - 1], +1);
    TradingCalendar calendar(dates);

    GaussianSampler gauss(spec.seed);

    std::vector<double> market(n);
    for (auto& r : market) r = spec.benchmark_mean + spec.benchmark_vol * gauss();

    std::vector<double> shock_by_day(n, 0.0);
    for (const auto& s : spec.shocks) shock_by_day[static_cast<std::size_t>(event + s.day)] += s.abnormal_return;

    auto to_prices = [&](const std::vector<double>& returns) {
        AlignedSeries prices(n + 1);
        CompensatedSum cum;
        prices[0] = 100.0;
        for (std::size_t t = 0; t < n; ++t) {
            cum.add(returns[t]);
            prices[t + 1] = 100.0 * std::exp(cum.value());
        }
        return prices;
    };

    std::map<std::string, AlignedSeries> series;
    series.emplace(spec.benchmark_ticker, to_prices(market));

    Scenario out;
    out.truth.event_date = event_date;
    out.truth.benchmark = spec.benchmark_ticker;
    out.truth.benchmark_vol = spec.benchmark_vol;
    out.truth.shocks = spec.shocks;
    out.truth.seed = spec.seed;

    std::vector<double> firm_returns(n);
    for (std::size_t i = 0; i < spec.n_firms; ++i) {
        const FirmParams& p = spec.firm(i);
        for (std::size_t t = 0; t < n; ++t) {
            firm_returns[t] = p.alpha + p.beta * market[t] + p.sigma * gauss() + shock_by_day[t];
        }
        const std::string ticker = spec.ticker(i);
        if (ticker == spec.benchmark_ticker) {
            throw Error(ErrorKind::Config, "firm ticker collides with the benchmark ticker", ticker);
        }
        series.emplace(ticker, to_prices(firm_returns));
        out.truth.tickers.push_back(ticker);
        out.truth.firms.push_back(p);
    }

    for (std::size_t i = 0; i < spec.n_firms; ++i) {
        const double ln_assets = 23.0 + gauss();
        const double ln_income = 20.0 + gauss();
        out.attributes.push_back({0, spec.ticker(i), std::exp(ln_assets), std::exp(ln_income)});
    }

    std::map<std::string, AlignedSeries> levels;
    for (const auto& proc : kControlProcesses) {
        AlignedSeries lv(n + 1);
        double log_level = std::log(proc.start);
        lv[0] = proc.start;
        for (std::size_t t = 0; t < n; ++t) {
            log_level += proc.vol * gauss();
            lv[t + 1] = std::exp(log_level);
        }
        levels.emplace(std::string(proc.name), std::move(lv));
    }

    out.calendar = calendar;
    out.prices = PricePanel(calendar, std::move(series));
    out.controls = ControlSeries(calendar, std::move(levels), ControlTransform::LogReturn);
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

FirmParams firm_from_json(const nlohmann::json& j, FirmParams base) {
    base.alpha = j.value("alpha", base.alpha);
    base.beta = j.value("beta", base.beta);
    base.sigma = j.value("sigma", base.sigma);
    return base;
}

nlohmann::json firm_to_json(const FirmParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"sigma", p.sigma}};
}

}  // namespace

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::Config, "scenario must be a JSON object");
    static const std::set<std::string> known{"n_firms", "n_days", "event_index", "event_date", "benchmark_vol",
                                             "benchmark_mean", "firm", "firms", "shocks", "seed", "benchmark",
                                             "firm_prefix", "required_span"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw Error(ErrorKind::Config, "unknown scenario key '" + key + "'", key);
    }
    ScenarioSpec s;
    try {
        s.n_firms = j.value("n_firms", s.n_firms);
        s.n_days = j.value("n_days", s.n_days);
        s.event_index = j.value("event_index", s.event_index);
        if (j.contains("event_date")) s.event_date = Date::parse(j.at("event_date").get<std::string>());
        s.benchmark_vol = j.value("benchmark_vol", s.benchmark_vol);
        s.benchmark_mean = j.value("benchmark_mean", s.benchmark_mean);
        if (j.contains("firm")) s.default_firm = firm_from_json(j.at("firm"), s.default_firm);
        if (j.contains("firms")) {
            for (const auto& f : j.at("firms")) s.firms.push_back(firm_from_json(f, s.default_firm));
        }
        if (j.contains("shocks")) {
            for (const auto& sh : j.at("shocks")) {
                if (sh.contains("days")) {
                    // {"days": [a, b], "abnormal_return": x} spreads x over every day in [a, b].
                    const int a = sh.at("days").at(0).get<int>();
                    const int b = sh.at("days").at(1).get<int>();
                    for (int d = a; d <= b; ++d) s.shocks.push_back({d, sh.at("abnormal_return").get<double>()});
                } else {
                    s.shocks.push_back({sh.at("day").get<int>(), sh.at("abnormal_return").get<double>()});
                }
            }
        }
        s.seed = j.value("seed", s.seed);
        s.benchmark_ticker = j.value("benchmark", s.benchmark_ticker);
        s.firm_prefix = j.value("firm_prefix", s.firm_prefix);
        if (j.contains("required_span")) {
            s.required_span = {j.at("required_span").at(0).get<int>(), j.at("required_span").at(1).get<int>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed scenario: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json to_json(const ScenarioSpec& spec) {
    nlohmann::json j{{"n_firms", spec.n_firms},
                     {"n_days", spec.n_days},
                     {"event_index", spec.event_index},
                     {"event_date", spec.event_date.iso()},
                     {"benchmark_vol", spec.benchmark_vol},
                     {"benchmark_mean", spec.benchmark_mean},
                     {"firm", firm_to_json(spec.default_firm)},
                     {"seed", spec.seed},
                     {"benchmark", spec.benchmark_ticker},
                     {"firm_prefix", spec.firm_prefix},
                     {"required_span", {spec.required_span.min_offset, spec.required_span.max_offset}}};
    nlohmann::json shocks = nlohmann::json::array();
    for (const auto& s : spec.shocks) shocks.push_back({{"day", s.day}, {"abnormal_return", s.abnormal_return}});
    j["shocks"] = shocks;
    if (!spec.firms.empty()) {
        nlohmann::json firms = nlohmann::json::array();
        for (const auto& f : spec.firms) firms.push_back(firm_to_json(f));
        j["firms"] = firms;
    }
    return j;
}

nlohmann::json to_json(const TrueParameters& truth) {
    nlohmann::json firms = nlohmann::json::object();
    for (std::size_t i = 0; i < truth.tickers.size(); ++i) firms[truth.tickers[i]] = firm_to_json(truth.firms[i]);
    nlohmann::json shocks = nlohmann::json::array();
    for (const auto& s : truth.shocks) shocks.push_back({{"day", s.day}, {"abnormal_return", s.abnormal_return}});
    return {{"event_date", truth.event_date.iso()},
            {"benchmark", truth.benchmark},
            {"benchmark_vol", truth.benchmark_vol},
            {"seed", truth.seed},
            {"firms", firms},
            {"shocks", shocks}};
}

// ---------------------------------------------------------------------------
// Monte Carlo

McSummary summarize(std::span<const TrialOutcome> outcomes) {
    McSummary s;
    s.n_trials = outcomes.size();
    if (outcomes.empty()) return s;
    CompensatedSum sum;
    for (const auto& o : outcomes) {
        sum.add(o.statistic);
        if (o.rejected) ++s.rejections;
    }
    const double n = static_cast<double>(outcomes.size());
    s.mean = sum.value() / n;
    if (outcomes.size() > 1) {
        CompensatedSum ss;
        for (const auto& o : outcomes) ss.add((o.statistic - s.mean) * (o.statistic - s.mean));
        s.sd = std::sqrt(ss.value() / (n - 1.0));
    }
    s.rejection_rate = static_cast<double>(s.rejections) / n;
    return s;
}

McSummary monte_carlo(const ScenarioSpec& spec, std::size_t n_trials, const TrialExtractor& extractor,
                      const McOptions& options) {
    if (n_trials == 0) throw Error(ErrorKind::InvalidArgument, "Monte Carlo needs at least one trial");
    spec.validate();

    std::vector<TrialOutcome> outcomes(n_trials);
    auto run_trial = [&](std::size_t i) {
        ScenarioSpec trial = spec;
        trial.seed = derive_stream_seed(options.master_seed, i);
        outcomes[i] = extractor(generate_scenario(trial));
    };

    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_trials));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n_trials; ++i) run_trial(i);
        return summarize(outcomes);
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n_trials; i = next++) {
                try {
                    run_trial(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = n_trials;
                }
            }
        });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
    return summarize(outcomes);
}

}  // namespace eventstudy
