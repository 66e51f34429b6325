#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eventstudy/cross_section.hpp"
#include "eventstudy/event_study.hpp"
#include "eventstudy/market_data.hpp"
#include "eventstudy/report.hpp"
#include "eventstudy/simulation.hpp"

namespace eventstudy {

inline constexpr std::string_view kVersion = "0.1.0";

struct SectorSpec {
    std::string index;
    std::string sector;
    std::string benchmark;
    std::vector<std::string> firms;  // empty: every non-benchmark ticker
};

struct StudyConfig {
    // Data. Either prices (plus optional files) or a simulation scenario.
    std::optional<std::filesystem::path> prices;
    std::optional<std::filesystem::path> attributes;
    std::optional<std::filesystem::path> controls;
    std::optional<std::filesystem::path> calendar;  // inferred from prices when absent
    std::optional<ScenarioSpec> simulate;

    Date event_date = Date::from_ymd(2016, 11, 8);
    ShiftPolicy shift = ShiftPolicy::Forward;

    Window estimation{-115, -11};
    Window event_period{-10, 10};
    HypothesisWindows hypotheses;
    std::vector<Window> regression_windows;  // empty: mode-dependent default

    std::string benchmark;  // used by sectors that do not name one
    std::vector<SectorSpec> sectors;

    bool run_regressions = true;
    RegressionSpec spec = RegressionSpec::Eq5;
    HcVariant robust = HcVariant::HC1;
    DesignMode mode = DesignMode::Panel;
    std::string dummy_label = "Trump";
    ControlTransform controls_transform = ControlTransform::LogReturn;

    double significance = 0.05;
    bool strict = true;
    std::size_t min_estimation_obs = 30;

    OutputFormat format = OutputFormat::Json;
    std::filesystem::path output_dir = "eventstudy-out";
    bool timestamp = true;

    /// Regression windows after applying the mode default: panel runs
    /// [0;+1] and [+1;+10] separately, cross-section stacks [0;0] and [+1;+10].
    std::vector<Window> effective_regression_windows() const;
    /// Relative-day span the event frame must cover.
    Span frame_span() const;
    /// Throws Error(Config) on ill-formed windows or missing inputs.
    void validate() const;
};

/// Relative paths in the config resolve against `base_dir`.
StudyConfig study_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
StudyConfig load_study_config(const std::filesystem::path& path);
nlohmann::json to_json(const StudyConfig& config);

/// Command-line overrides; unset fields leave the config untouched.
struct StudyOverrides {
    std::optional<Date> event_date;
    std::optional<int> estimation_end;
    std::optional<std::size_t> estimation_length;
    std::optional<std::vector<Window>> windows;
    std::optional<HcVariant> robust;
    std::optional<DesignMode> mode;
    std::optional<OutputFormat> format;
    std::optional<std::uint64_t> seed;
    std::optional<bool> strict;
    std::optional<std::filesystem::path> output_dir;
    bool paper_convention = false;  // estimation window [-115;-10]
    bool no_timestamp = false;
};

void apply_overrides(StudyConfig& config, const StudyOverrides& overrides);

struct ErrorRecord {
    std::string kind;
    std::string message;
    std::string source;
};

struct DroppedFirm {
    std::string ticker;
    std::string reason;
};

struct SectorReport {
    std::string index;
    std::string sector;
    std::string benchmark;
    std::vector<std::string> firms;
    std::vector<DroppedFirm> dropped;
    std::vector<MarketModelFit> market_models;
    std::vector<CarResult> cars;
    std::optional<UihVerdict> uih;
    std::vector<RegressionResult> regressions;
    std::map<std::string, std::vector<CarPoint>> car_paths;
};

struct StudyReport {
    nlohmann::json config;
    std::string version{kVersion};
    std::optional<std::uint64_t> seed;
    std::optional<std::string> generated_at;
    std::vector<SectorReport> sectors;
    std::vector<std::string> warnings;
    std::vector<ErrorRecord> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Loads inputs, fits every firm, tests the hypotheses, and runs the
/// regressions. Input and strict-mode data problems throw; per-sector
/// regression failures become error records in the report.
StudyReport run_study(const StudyConfig& config);

nlohmann::json to_json(const StudyReport& report);
StudyReport report_from_json(const nlohmann::json& j);

/// Coefficient tables, one per (index, regression window), sectors as columns.
std::vector<CoefficientTable> coefficient_tables(const StudyReport& report);

/// Full report in the requested format (JSON is the lossless form).
std::string render_report(const StudyReport& report, OutputFormat format);

/// `ticker,day,car` rows for every firm in every sector.
void write_car_paths(const StudyReport& report, std::ostream& out);

/// Writes report.json, the rendered report, and car_paths.csv into the
/// configured output directory and returns the paths written.
std::vector<std::filesystem::path> write_study_outputs(const StudyReport& report, const StudyConfig& config);

nlohmann::json error_to_json(const std::exception& e);

}  // namespace eventstudy
