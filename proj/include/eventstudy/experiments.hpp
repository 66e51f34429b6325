#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eventstudy/cross_section.hpp"
#include "eventstudy/event_study.hpp"
#include "eventstudy/simulation.hpp"

namespace eventstudy {

/// Market models and abnormal returns for every firm of a simulated scenario.
struct ScenarioAnalysis {
    EventFrame frame;
    std::vector<MarketModelFit> fits;
    std::vector<ARSeries> ars;
};

ScenarioAnalysis analyze_scenario(const Scenario& scenario, Window estimation = {-115, -11},
                                  Window event_period = {-10, 10});

/// First firm only: t statistic of its CAR, rejected when p < level.
TrialExtractor car_test_extractor(Window window = {0, 0}, double level = 0.05);
/// Mean beta-hat across firms.
TrialExtractor beta_recovery_extractor();
/// Mean CAR across firms, rejected when the cross-firm test is significant.
TrialExtractor mean_car_extractor(Window window = {0, 0}, double level = 0.05);
/// Number of supported hypotheses. Rejected when H2 is supported and H1a is not.
TrialExtractor uih_extractor(const HypothesisWindows& windows = {}, double level = 0.05);
/// Number of supported hypotheses. Rejected when any hypothesis is supported.
TrialExtractor uih_any_extractor(const HypothesisWindows& windows = {}, double level = 0.05);
/// Event-dummy estimate of an eq5 panel regression. Rejected (meaning
/// recovered) when it lies within `tolerance` of `target` with "***".
TrialExtractor regression_extractor(double target, double tolerance, Window window = {0, 1},
                                    HcVariant robust = HcVariant::HC1);

/// Names accepted by the mc verb.
std::vector<std::string> extractor_names();

struct ExtractorParams {
    Window window{0, 0};
    double level = 0.05;
    double target = 0.10;
    double tolerance = 0.01;
};

/// Throws InvalidArgument for unknown names.
TrialExtractor named_extractor(std::string_view name, const ExtractorParams& params = {});

}  // namespace eventstudy
