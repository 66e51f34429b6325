#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eventstudy/cross_section.hpp"
#include "eventstudy/market_data.hpp"

namespace eventstudy {

struct FirmParams {
    double alpha = 0.0;
    double beta = 1.0;
    double sigma = 0.01;  // idiosyncratic daily volatility
};

struct Shock {
    int day = 0;                   // relative to the event
    double abnormal_return = 0.0;  // added to every firm's return on that day
};

/// Synthetic single-factor market around an event date.
///
/// Return days are indexed 0..n_days-1 with the event at `event_index`; the
/// calendar carries one extra leading day holding the base price of 100.
/// Trading days are weekdays counted outward from `event_date`.
struct ScenarioSpec {
    std::size_t n_firms = 20;
    std::size_t n_days = 140;
    std::size_t event_index = 125;
    Date event_date = Date::from_ymd(2016, 11, 8);
    double benchmark_vol = 0.01;
    double benchmark_mean = 0.0;
    FirmParams default_firm;
    std::vector<FirmParams> firms;  // overrides default_firm when non-empty (size n_firms)
    std::vector<Shock> shocks;
    std::uint64_t seed = 20161108;
    std::string benchmark_ticker = "MKT";
    std::string firm_prefix = "F";
    /// Relative days the scenario must cover on each side of the event.
    Span required_span{-115, 10};

    const FirmParams& firm(std::size_t i) const { return firms.empty() ? default_firm : firms.at(i); }
    std::string ticker(std::size_t i) const;
    /// Throws if sigmas are negative, sizes are inconsistent, or the span is too short.
    void validate() const;
};

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioSpec& spec);

struct TrueParameters {
    Date event_date;  // after moving a weekend date to the next weekday
    std::string benchmark;
    std::vector<std::string> tickers;
    std::vector<FirmParams> firms;
    std::vector<Shock> shocks;
    double benchmark_vol = 0.0;
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const TrueParameters& truth);

struct Scenario {
    PricePanel prices;
    TradingCalendar calendar;
    TrueParameters truth;
    std::vector<AttributeRecord> attributes;
    ControlSeries controls;  // levels of VIX, Gold, Silver, Bitcoin
};

/// Draw order, fixed: benchmark returns; firm noise (firm-major, day-minor);
/// attributes (per firm: ln assets, ln income); control log-returns
/// (per control in VIX, Gold, Silver, Bitcoin order, day-minor). Draws are
/// consumed even when a sigma is zero so that the stream layout never changes.
Scenario generate_scenario(const ScenarioSpec& spec);

struct TrialOutcome {
    double statistic = 0.0;
    bool rejected = false;
};

struct McSummary {
    std::size_t n_trials = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n - 1)
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
};

struct McOptions {
    std::uint64_t master_seed = 20161108;
    unsigned threads = 1;  // 0 selects the hardware concurrency
};

using TrialExtractor = std::function<TrialOutcome(const Scenario&)>;

/// Trial i uses the template with seed derive_stream_seed(master_seed, i).
/// Outcomes are stored by trial index and summarized in index order, so the
/// summary does not depend on thread count or execution order. The extractor
/// must be safe to call concurrently.
McSummary monte_carlo(const ScenarioSpec& spec, std::size_t n_trials, const TrialExtractor& extractor,
                      const McOptions& options = {});

McSummary summarize(std::span<const TrialOutcome> outcomes);

}  // namespace eventstudy
