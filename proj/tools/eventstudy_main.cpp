// eventstudy: market-model event studies from the command line.
//
//   eventstudy run --config study.json [overrides]
//   eventstudy simulate [--config scenario.json] [--seed N] --output-dir DIR
//   eventstudy mc --statistic NAME [--config scenario.json] [--trials N] [--seed N]
//   eventstudy render --input report.json --format markdown

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eventstudy/error.hpp"
#include "eventstudy/experiments.hpp"
#include "eventstudy/study.hpp"

namespace es = eventstudy;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReportErrors = 1;
constexpr int kExitFatal = 2;

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw es::Error(es::ErrorKind::Io, "cannot open " + path.string(), path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw es::Error(es::ErrorKind::Config, std::string("invalid JSON: ") + e.what(), path.string());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw es::Error(es::ErrorKind::Io, "cannot write output file", path.string());
    out << content;
}

struct RunArgs {
    std::string config;
    std::string event_date;
    std::optional<int> estimation_end;
    std::optional<std::size_t> estimation_length;
    std::string windows;
    std::string robust;
    std::string mode;
    std::string format;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    bool lenient = false;
    bool paper_convention = false;
    bool no_timestamp = false;
    std::string output_dir;
    bool print = false;
};

int do_run(const RunArgs& a) {
    es::StudyConfig config = es::load_study_config(a.config);
    es::StudyOverrides o;
    if (!a.event_date.empty()) {
        const auto d = es::Date::try_parse(a.event_date);
        if (!d) throw es::Error(es::ErrorKind::InvalidArgument, "unparseable date '" + a.event_date + "'", "--event-date");
        o.event_date = *d;
    }
    o.estimation_end = a.estimation_end;
    o.estimation_length = a.estimation_length;
    if (!a.windows.empty()) o.windows = es::Window::parse_list(a.windows);
    if (!a.robust.empty()) o.robust = es::parse_hc_variant(a.robust);
    if (!a.mode.empty()) o.mode = es::parse_design_mode(a.mode);
    if (!a.format.empty()) o.format = es::parse_output_format(a.format);
    o.seed = a.seed;
    if (a.strict) o.strict = true;
    if (a.lenient) o.strict = false;
    if (!a.output_dir.empty()) o.output_dir = a.output_dir;
    o.paper_convention = a.paper_convention;
    o.no_timestamp = a.no_timestamp;
    es::apply_overrides(config, o);

    const es::StudyReport report = es::run_study(config);
    const auto written = es::write_study_outputs(report, config);
    if (a.print) {
        std::cout << es::render_report(report, config.format);
    } else {
        for (const auto& p : written) std::cout << p.string() << '\n';
    }
    for (const auto& e : report.errors) std::cerr << "error: " << e.source << ": " << e.message << '\n';
    return report.ok() ? kExitOk : kExitReportErrors;
}

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string output_dir = "simulated";
};

int do_simulate(const SimulateArgs& a) {
    es::ScenarioSpec spec;
    if (!a.config.empty()) spec = es::scenario_from_json(read_json_file(a.config));
    if (a.seed) spec.seed = *a.seed;
    const es::Scenario sc = es::generate_scenario(spec);

    const fs::path dir(a.output_dir);
    fs::create_directories(dir);
    std::ostringstream prices, attributes, controls;
    es::write_price_csv(sc.prices, prices);
    es::write_attribute_csv(sc.attributes, attributes);
    es::write_controls_csv(sc.controls, controls);
    write_file(dir / "prices.csv", prices.str());
    write_file(dir / "attributes.csv", attributes.str());
    write_file(dir / "controls.csv", controls.str());
    write_file(dir / "truth.json", es::to_json(sc.truth).dump(2) + "\n");

    // A study config that runs directly on the generated files.
    const json study{{"data", {{"prices", "prices.csv"}, {"attributes", "attributes.csv"}, {"controls", "controls.csv"}}},
                     {"event", {{"date", sc.truth.event_date.iso()}}},
                     {"benchmark", sc.truth.benchmark},
                     {"output", {{"dir", "report"}, {"format", "markdown"}}}};
    write_file(dir / "study.json", study.dump(2) + "\n");
    for (const char* name : {"prices.csv", "attributes.csv", "controls.csv", "truth.json", "study.json"}) {
        std::cout << (dir / name).string() << '\n';
    }
    return kExitOk;
}

struct McArgs {
    std::string config;
    std::string statistic;
    std::size_t trials = 1000;
    std::uint64_t seed = 20161108;
    unsigned threads = 1;
    std::string window = "0:0";
    double level = 0.05;
    double target = 0.10;
    double tolerance = 0.01;
};

int do_mc(const McArgs& a) {
    es::ScenarioSpec spec;
    if (!a.config.empty()) spec = es::scenario_from_json(read_json_file(a.config));
    es::ExtractorParams params;
    params.window = es::Window::parse(a.window);
    params.level = a.level;
    params.target = a.target;
    params.tolerance = a.tolerance;
    const auto extractor = es::named_extractor(a.statistic, params);
    const auto s = es::monte_carlo(spec, a.trials, extractor, es::McOptions{a.seed, a.threads});
    const json out{{"statistic", a.statistic},
                   {"master_seed", a.seed},
                   {"n_trials", s.n_trials},
                   {"mean", s.mean},
                   {"sd", s.sd},
                   {"rejections", s.rejections},
                   {"rejection_rate", s.rejection_rate},
                   {"scenario", es::to_json(spec)}};
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

struct RenderArgs {
    std::string input;
    std::string format = "markdown";
    std::string output_dir;
};

int do_render(const RenderArgs& a) {
    const es::StudyReport report = es::report_from_json(read_json_file(a.input));
    const auto format = es::parse_output_format(a.format);
    const std::string text = es::render_report(report, format);
    if (a.output_dir.empty()) {
        std::cout << text;
    } else {
        fs::create_directories(a.output_dir);
        const fs::path path = fs::path(a.output_dir) / ("report" + std::string(es::file_extension(format)));
        write_file(path, text);
        std::cout << path.string() << '\n';
    }
    return report.ok() ? kExitOk : kExitReportErrors;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Market-model event studies: CARs, hypothesis tests, cross-sectional regressions"};
    app.set_version_flag("--version", std::string(es::kVersion));
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a full study from a config file");
    run_cmd->add_option("--config", run.config, "Study config (JSON)")->required();
    run_cmd->add_option("--event-date", run.event_date, "Event date, YYYY-MM-DD");
    run_cmd->add_option("--estimation-end", run.estimation_end, "Last relative day of the estimation window");
    run_cmd->add_option("--estimation-length", run.estimation_length, "Estimation window length in days");
    run_cmd->add_option("--windows", run.windows, "Regression windows, e.g. \"0:1,1:10\"");
    run_cmd->add_option("--robust", run.robust, "hc0 or hc1");
    run_cmd->add_option("--mode", run.mode, "panel or cross-section");
    run_cmd->add_option("--format", run.format, "csv, json or markdown");
    run_cmd->add_option("--seed", run.seed, "Seed for simulated studies");
    auto* strict_flag = run_cmd->add_flag("--strict", run.strict, "Abort on any data problem");
    run_cmd->add_flag("--lenient", run.lenient, "Drop problem firms with a warning")->excludes(strict_flag);
    run_cmd->add_flag("--paper-convention", run.paper_convention, "Estimation window [-115;-10]");
    run_cmd->add_flag("--no-timestamp", run.no_timestamp, "Leave the generation time out of the report");
    run_cmd->add_option("--output-dir", run.output_dir, "Directory for report files");
    run_cmd->add_flag("--print", run.print, "Print the rendered report instead of the file list");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic price panel and matching study config");
    sim_cmd->add_option("--config", sim.config, "Scenario spec (JSON)");
    sim_cmd->add_option("--seed", sim.seed, "Scenario seed");
    sim_cmd->add_option("--output-dir", sim.output_dir, "Directory for the generated files");

    McArgs mc;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo experiment over seeded scenarios");
    mc_cmd->add_option("--statistic", mc.statistic, "Per-trial statistic")
        ->required()
        ->check(CLI::IsMember(es::extractor_names()));
    mc_cmd->add_option("--config", mc.config, "Scenario template (JSON)");
    mc_cmd->add_option("--trials", mc.trials, "Number of trials")->check(CLI::PositiveNumber);
    mc_cmd->add_option("--seed", mc.seed, "Master seed");
    mc_cmd->add_option("--threads", mc.threads, "Worker threads (0 = all cores)");
    mc_cmd->add_option("--window", mc.window, "CAR window for car-test-size and mean-car");
    mc_cmd->add_option("--level", mc.level, "Significance level");
    mc_cmd->add_option("--target", mc.target, "True event-dummy effect for regression");
    mc_cmd->add_option("--tolerance", mc.tolerance, "Allowed estimation error for regression");

    RenderArgs render;
    auto* render_cmd = app.add_subcommand("render", "Re-render a saved report.json");
    render_cmd->add_option("--input", render.input, "Saved report (JSON)")->required();
    render_cmd->add_option("--format", render.format, "csv, json or markdown");
    render_cmd->add_option("--output-dir", render.output_dir, "Write report.<ext> here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitFatal;
    }

    try {
        if (*run_cmd) return do_run(run);
        if (*sim_cmd) return do_simulate(sim);
        if (*mc_cmd) return do_mc(mc);
        if (*render_cmd) return do_render(render);
    } catch (const std::exception& e) {
        std::cerr << es::error_to_json(e).dump(2) << '\n';
        return kExitFatal;
    }
    return kExitFatal;
}
