#include "eventstudy/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "eventstudy/error.hpp"

namespace eventstudy {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

std::vector<Window> StudyConfig::effective_regression_windows() const {
    if (!regression_windows.empty()) return regression_windows;
    if (mode == DesignMode::Panel) return {Window{0, 1}, Window{1, 10}};
    return {Window{0, 0}, Window{1, 10}};
}

Span StudyConfig::frame_span() const {
    return Span{std::min({estimation.tau1, event_period.tau1, 0}), std::max({estimation.tau2, event_period.tau2, 0})};
}

void StudyConfig::validate() const {
    if (prices.has_value() == simulate.has_value()) {
        throw Error(ErrorKind::Config, "config must give exactly one of data.prices or simulate", "data");
    }
    if (estimation.tau1 > estimation.tau2 || event_period.tau1 > event_period.tau2) {
        throw Error(ErrorKind::Config, "windows must satisfy tau1 <= tau2", "windows");
    }
    if (estimation.tau2 >= event_period.tau2) {
        throw Error(ErrorKind::Config, "estimation window must end before the event period ends", "windows.estimation");
    }
    for (const auto* w : {&hypotheses.h1a, &hypotheses.h1b, &hypotheses.h2}) {
        if (!event_period.contains(*w)) {
            throw Error(ErrorKind::Config, "hypothesis window " + w->label() + " is outside the event period",
                        "windows.hypotheses");
        }
    }
    for (const auto& w : effective_regression_windows()) {
        if (!event_period.contains(w)) {
            throw Error(ErrorKind::Config, "regression window " + w.label() + " is outside the event period",
                        "windows.regression");
        }
    }
    if (!(significance > 0.0 && significance < 1.0)) {
        throw Error(ErrorKind::Config, "significance must lie in (0, 1)", "significance");
    }
    if (run_regressions && prices) {
        if (!attributes) throw Error(ErrorKind::Config, "regressions need data.attributes", "data.attributes");
        if (spec == RegressionSpec::Eq6 && !controls) {
            throw Error(ErrorKind::Config, "the eq6 specification needs data.controls", "data.controls");
        }
    }
    if (output_dir.empty()) throw Error(ErrorKind::Config, "output directory is empty", "output.dir");
}

namespace {

Window window_from_json(const json& j, const std::string& key) {
    try {
        if (j.is_string()) return Window::parse(j.get<std::string>());
        if (j.is_array() && j.size() == 2) return Window::make(j.at(0).get<int>(), j.at(1).get<int>());
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what(), key);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, e.what(), key);
    }
    throw Error(ErrorKind::Config, "window must be \"a:b\" or [a, b]", key);
}

json window_to_json(const Window& w) { return json::array({w.tau1, w.tau2}); }

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorKind::Config, "expected an object", where);
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error(ErrorKind::Config, "unknown config key '" + key + "'", where.empty() ? key : where + "." + key);
        }
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T, typename Parse>
void read_enum(const json& obj, const char* key, T& out, Parse parse, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = parse(obj.at(key).get<std::string>());
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what(), where + "." + key);
    }
}

}  // namespace

StudyConfig study_config_from_json(const json& j, const fs::path& base_dir) {
    reject_unknown(j, {"data", "simulate", "event", "windows", "benchmark", "sectors", "regression", "significance",
                       "strict", "min_estimation_obs", "output"},
                   "");
    StudyConfig c;
    try {
        if (j.contains("data")) {
            const auto& d = j.at("data");
            reject_unknown(d, {"prices", "attributes", "controls", "calendar"}, "data");
            auto path_of = [&](const char* key) -> std::optional<fs::path> {
                if (!d.contains(key) || d.at(key).is_null()) return std::nullopt;
                return resolve(base_dir, d.at(key).get<std::string>());
            };
            c.prices = path_of("prices");
            c.attributes = path_of("attributes");
            c.controls = path_of("controls");
            c.calendar = path_of("calendar");
        }
        if (j.contains("simulate")) {
            c.simulate = scenario_from_json(j.at("simulate"));
            c.event_date = c.simulate->event_date;
        }
        if (j.contains("event")) {
            const auto& e = j.at("event");
            reject_unknown(e, {"date", "shift"}, "event");
            if (e.contains("date")) {
                const auto text = e.at("date").get<std::string>();
                const auto d = Date::try_parse(text);
                if (!d) throw Error(ErrorKind::Config, "unparseable event date '" + text + "'", "event.date");
                c.event_date = *d;
            }
            read_enum(e, "shift", c.shift, parse_shift_policy, "event");
        }
        if (j.contains("windows")) {
            const auto& w = j.at("windows");
            reject_unknown(w, {"estimation", "event_period", "hypotheses", "regression"}, "windows");
            if (w.contains("estimation")) c.estimation = window_from_json(w.at("estimation"), "windows.estimation");
            if (w.contains("event_period")) {
                c.event_period = window_from_json(w.at("event_period"), "windows.event_period");
            }
            if (w.contains("hypotheses")) {
                const auto& h = w.at("hypotheses");
                reject_unknown(h, {"h1a", "h1b", "h2"}, "windows.hypotheses");
                if (h.contains("h1a")) c.hypotheses.h1a = window_from_json(h.at("h1a"), "windows.hypotheses.h1a");
                if (h.contains("h1b")) c.hypotheses.h1b = window_from_json(h.at("h1b"), "windows.hypotheses.h1b");
                if (h.contains("h2")) c.hypotheses.h2 = window_from_json(h.at("h2"), "windows.hypotheses.h2");
            }
            if (w.contains("regression")) {
                for (const auto& r : w.at("regression")) {
                    c.regression_windows.push_back(window_from_json(r, "windows.regression"));
                }
            }
        }
        c.benchmark = j.value("benchmark", c.benchmark);
        if (j.contains("sectors")) {
            for (const auto& s : j.at("sectors")) {
                reject_unknown(s, {"index", "sector", "benchmark", "firms"}, "sectors");
                SectorSpec spec;
                spec.index = s.value("index", std::string{});
                spec.sector = s.value("sector", std::string{});
                spec.benchmark = s.value("benchmark", std::string{});
                if (s.contains("firms")) spec.firms = s.at("firms").get<std::vector<std::string>>();
                if (spec.sector.empty()) throw Error(ErrorKind::Config, "sector name is required", "sectors");
                c.sectors.push_back(std::move(spec));
            }
        }
        if (j.contains("regression")) {
            const auto& r = j.at("regression");
            reject_unknown(r, {"enabled", "spec", "robust", "mode", "dummy_label", "controls_transform"}, "regression");
            c.run_regressions = r.value("enabled", c.run_regressions);
            read_enum(r, "spec", c.spec, parse_regression_spec, "regression");
            read_enum(r, "robust", c.robust, parse_hc_variant, "regression");
            read_enum(r, "mode", c.mode, parse_design_mode, "regression");
            read_enum(r, "controls_transform", c.controls_transform, parse_control_transform, "regression");
            c.dummy_label = r.value("dummy_label", c.dummy_label);
        }
        c.significance = j.value("significance", c.significance);
        c.strict = j.value("strict", c.strict);
        c.min_estimation_obs = j.value("min_estimation_obs", c.min_estimation_obs);
        if (j.contains("output")) {
            const auto& o = j.at("output");
            reject_unknown(o, {"dir", "format", "timestamp"}, "output");
            if (o.contains("dir")) c.output_dir = resolve(base_dir, o.at("dir").get<std::string>());
            read_enum(o, "format", c.format, parse_output_format, "output");
            c.timestamp = o.value("timestamp", c.timestamp);
        } else if (!base_dir.empty()) {
            c.output_dir = base_dir / c.output_dir;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
    }
    return c;
}

StudyConfig load_study_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config file", path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what(), path.string());
    }
    return study_config_from_json(j, path.parent_path());
}

json to_json(const StudyConfig& c) {
    json data = json::object();
    auto put = [&](const char* key, const std::optional<fs::path>& p) {
        data[key] = p ? json(p->generic_string()) : json(nullptr);
    };
    put("prices", c.prices);
    put("attributes", c.attributes);
    put("controls", c.controls);
    put("calendar", c.calendar);

    json regression_windows = json::array();
    for (const auto& w : c.effective_regression_windows()) regression_windows.push_back(window_to_json(w));

    json sectors = json::array();
    for (const auto& s : c.sectors) {
        sectors.push_back({{"index", s.index}, {"sector", s.sector}, {"benchmark", s.benchmark}, {"firms", s.firms}});
    }

    json j{{"data", data},
           {"event", {{"date", c.event_date.iso()}, {"shift", c.shift == ShiftPolicy::Forward ? "forward" : "backward"}}},
           {"windows",
            {{"estimation", window_to_json(c.estimation)},
             {"event_period", window_to_json(c.event_period)},
             {"hypotheses",
              {{"h1a", window_to_json(c.hypotheses.h1a)},
               {"h1b", window_to_json(c.hypotheses.h1b)},
               {"h2", window_to_json(c.hypotheses.h2)}}},
             {"regression", regression_windows}}},
           {"benchmark", c.benchmark},
           {"sectors", sectors},
           {"regression",
            {{"enabled", c.run_regressions},
             {"spec", to_string(c.spec)},
             {"robust", to_string(c.robust)},
             {"mode", to_string(c.mode)},
             {"dummy_label", c.dummy_label},
             {"controls_transform", to_string(c.controls_transform)}}},
           {"significance", c.significance},
           {"strict", c.strict},
           {"min_estimation_obs", c.min_estimation_obs},
           {"output", {{"dir", c.output_dir.generic_string()}, {"format", to_string(c.format)}, {"timestamp", c.timestamp}}}};
    if (c.simulate) j["simulate"] = to_json(*c.simulate);
    return j;
}

void apply_overrides(StudyConfig& c, const StudyOverrides& o) {
    if (o.event_date) {
        c.event_date = *o.event_date;
        if (c.simulate) c.simulate->event_date = *o.event_date;
    }
    if (o.paper_convention) c.estimation = Window{-115, -10};
    if (o.estimation_end || o.estimation_length) {
        const int end = o.estimation_end.value_or(c.estimation.tau2);
        const auto length = static_cast<int>(o.estimation_length.value_or(c.estimation.length()));
        if (length < 1) throw Error(ErrorKind::Config, "estimation length must be positive", "--estimation-length");
        c.estimation = Window{end - length + 1, end};
    }
    if (o.windows) c.regression_windows = *o.windows;
    if (o.robust) c.robust = *o.robust;
    if (o.mode) c.mode = *o.mode;
    if (o.format) c.format = *o.format;
    if (o.seed) {
        if (!c.simulate) throw Error(ErrorKind::Config, "--seed only applies to simulated studies", "--seed");
        c.simulate->seed = *o.seed;
    }
    if (o.strict) c.strict = *o.strict;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.no_timestamp) c.timestamp = false;
}

// ---------------------------------------------------------------------------
// Running a study

namespace {

struct StudyInputs {
    PricePanel prices;
    std::optional<std::map<std::string, FirmAttributes>> attributes;
    std::optional<ControlSeries> controls;
    std::optional<std::uint64_t> seed;
    std::string default_benchmark;
};

std::ifstream open_input(const fs::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, std::string("cannot open ") + what + " file " + path.string(), path.string());
    return in;
}

StudyInputs load_inputs(const StudyConfig& c, std::vector<std::string>& warnings) {
    StudyInputs in;
    in.default_benchmark = c.benchmark;
    if (c.simulate) {
        Scenario sc = generate_scenario(*c.simulate);
        in.seed = c.simulate->seed;
        if (in.default_benchmark.empty()) in.default_benchmark = sc.truth.benchmark;
        in.prices = std::move(sc.prices);
        in.attributes = firm_attributes(sc.attributes, c.strict, &warnings);
        in.controls = ControlSeries(sc.controls.calendar(), sc.controls.levels(), c.controls_transform);
        return in;
    }

    const bool need_attributes = c.run_regressions;
    const bool need_controls = c.run_regressions && c.spec == RegressionSpec::Eq6;
    // Check every referenced file before doing any work.
    for (const auto* p : {&c.prices, &c.calendar, &c.attributes, &c.controls}) {
        if (*p && !fs::exists(**p)) {
            throw Error(ErrorKind::Io, "input file does not exist: " + (*p)->string(), (*p)->string());
        }
    }

    auto price_stream = open_input(*c.prices, "prices");
    const auto records = read_price_records(price_stream, c.prices->string());
    TradingCalendar calendar;
    if (c.calendar) {
        auto cal_stream = open_input(*c.calendar, "calendar");
        calendar = read_calendar(cal_stream, c.calendar->string());
    } else {
        calendar = infer_calendar(records);
    }
    in.prices = load_price_panel(records, calendar, c.prices->string());

    if (need_attributes || c.attributes) {
        if (!c.attributes) throw Error(ErrorKind::Config, "regressions need data.attributes", "data.attributes");
        auto attr_stream = open_input(*c.attributes, "attributes");
        in.attributes = firm_attributes(read_attribute_records(attr_stream, c.attributes->string()), c.strict, &warnings);
    }
    if (need_controls || c.controls) {
        if (!c.controls) throw Error(ErrorKind::Config, "the eq6 specification needs data.controls", "data.controls");
        auto ctl_stream = open_input(*c.controls, "controls");
        in.controls = read_controls(ctl_stream, calendar, c.controls_transform, c.controls->string());
    }
    return in;
}

struct FirmWork {
    MarketModelFit fit;
    ARSeries ars;
};

std::string sector_source(const SectorReport& s) {
    return s.index.empty() ? s.sector : s.index + "/" + s.sector;
}

}  // namespace

StudyReport run_study(const StudyConfig& config) {
    config.validate();
    StudyReport report;
    report.config = to_json(config);
    if (config.timestamp) {
        const std::time_t now = std::time(nullptr);
        std::tm utc{};
        gmtime_r(&now, &utc);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
        report.generated_at = buf;
    }

    StudyInputs inputs = load_inputs(config, report.warnings);
    report.seed = inputs.seed;

    const ReturnPanel returns = compute_log_returns(inputs.prices, ReturnOptions{config.strict});
    for (const auto& t : returns.dropped) report.warnings.push_back("dropped " + t + ": no computable returns");
    const EventFrame frame = build_event_frame(returns, config.event_date, config.frame_span(), config.shift);
    if (frame.event_date() != config.event_date) {
        report.warnings.push_back("event date " + config.event_date.iso() + " is not a trading day; using " +
                                  frame.event_date().iso());
    }

    std::vector<SectorSpec> sectors = config.sectors;
    if (sectors.empty()) sectors.push_back(SectorSpec{"", "All", "", {}});
    std::set<std::string> benchmarks;
    for (auto& s : sectors) {
        if (s.benchmark.empty()) s.benchmark = inputs.default_benchmark;
        if (s.benchmark.empty()) {
            throw Error(ErrorKind::Config, "no benchmark configured for sector " + s.sector, "benchmark");
        }
        if (!frame.has_ticker(s.benchmark)) {
            throw Error(ErrorKind::MissingData, "benchmark " + s.benchmark + " has no price data", s.sector);
        }
        benchmarks.insert(s.benchmark);
    }

    std::vector<Window> car_windows{config.hypotheses.h1a, config.hypotheses.h1b, config.hypotheses.h2};
    const auto regression_windows = config.effective_regression_windows();
    car_windows.insert(car_windows.end(), regression_windows.begin(), regression_windows.end());
    std::sort(car_windows.begin(), car_windows.end());
    car_windows.erase(std::unique(car_windows.begin(), car_windows.end()), car_windows.end());

    MarketModelOptions mm_options;
    mm_options.min_observations = config.min_estimation_obs;
    mm_options.strict = config.strict;

    std::vector<DataIssue> strict_issues;
    std::vector<std::vector<FirmWork>> work(sectors.size());

    for (std::size_t si = 0; si < sectors.size(); ++si) {
        const SectorSpec& spec = sectors[si];
        SectorReport sector;
        sector.index = spec.index;
        sector.sector = spec.sector;
        sector.benchmark = spec.benchmark;

        std::vector<std::string> firms = spec.firms;
        if (firms.empty()) {
            for (const auto& t : frame.tickers()) {
                if (!benchmarks.contains(t)) firms.push_back(t);
            }
        }
        std::sort(firms.begin(), firms.end());
        firms.erase(std::unique(firms.begin(), firms.end()), firms.end());

        for (const auto& ticker : firms) {
            try {
                if (!frame.has_ticker(ticker)) {
                    throw Error(ErrorKind::MissingData, "no return data", ticker);
                }
                if (config.strict) {
                    const auto missing = frame.missing_days(ticker, frame.min_offset(), frame.max_offset());
                    if (!missing.empty()) {
                        std::string days;
                        for (int d : missing) days += (days.empty() ? "" : " ") + std::to_string(d);
                        throw Error(ErrorKind::MissingData, "missing returns on relative days " + days, ticker);
                    }
                }
                MarketModelFit fit = fit_market_model(frame, ticker, spec.benchmark, config.estimation, mm_options);
                ARSeries ars = abnormal_returns(fit, frame, config.event_period);
                work[si].push_back(FirmWork{std::move(fit), std::move(ars)});
                sector.firms.push_back(ticker);
            } catch (const Error& e) {
                const std::string where = e.source().empty() || e.source() == ticker ? ticker : ticker + " (" + e.source() + ")";
                if (config.strict) {
                    strict_issues.push_back({0, sector_source(sector) + ": " + where + ": " + e.what()});
                } else {
                    sector.dropped.push_back({ticker, e.what()});
                    report.warnings.push_back("dropped " + ticker + " from " + sector_source(sector) + ": " + e.what());
                }
            }
        }
        report.sectors.push_back(std::move(sector));
    }
    if (!strict_issues.empty()) throw DataError("study (strict mode)", std::move(strict_issues));

    DesignOptions design_options;
    design_options.spec = config.spec;
    design_options.dummy_label = config.dummy_label;

    for (std::size_t si = 0; si < sectors.size(); ++si) {
        SectorReport& sector = report.sectors[si];
        std::vector<ARSeries> ars;
        for (const auto& fw : work[si]) {
            sector.market_models.push_back(fw.fit);
            for (const auto& w : car_windows) sector.cars.push_back(make_car_result(fw.ars, w, fw.fit));
            sector.car_paths.emplace(fw.fit.ticker, car_path(fw.ars, config.event_period.tau1));
            ars.push_back(fw.ars);
        }
        sector.uih = evaluate_uih(sector.cars, config.hypotheses, config.significance);

        if (!config.run_regressions) continue;
        auto run_one = [&](auto&& build, const std::string& label) {
            try {
                sector.regressions.push_back(fit_sector_regression(build(), config.robust));
            } catch (const Error& e) {
                report.errors.push_back({std::string(to_string(e.kind())), e.what(),
                                         sector_source(sector) + " " + label});
            }
        };
        const ControlSeries* controls = inputs.controls ? &*inputs.controls : nullptr;
        if (config.mode == DesignMode::Panel) {
            for (const auto& w : regression_windows) {
                run_one([&] { return build_design(frame, ars, *inputs.attributes, controls, w, design_options); },
                        w.label());
            }
        } else {
            run_one([&] {
                return build_cross_section_design(frame, ars, *inputs.attributes, controls, regression_windows,
                                                  design_options);
            }, "cross-section");
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json verdict_to_json(const HypothesisVerdict& v) {
    return {{"name", v.name},
            {"window", window_to_json(v.window)},
            {"n_firms", v.n_firms},
            {"mean_car", number(v.mean_car)},
            {"t_stat", v.t_stat ? number(*v.t_stat) : json(nullptr)},
            {"p_value", v.p_value ? number(*v.p_value) : json(nullptr)},
            {"supported", v.supported},
            {"insufficient_firms", v.insufficient_firms}};
}

HypothesisVerdict verdict_from_json(const json& j) {
    HypothesisVerdict v;
    v.name = j.at("name").get<std::string>();
    v.window = window_from_json(j.at("window"), "window");
    v.n_firms = j.at("n_firms").get<std::size_t>();
    v.mean_car = number_from(j.at("mean_car"));
    if (!j.at("p_value").is_null()) v.p_value = j.at("p_value").get<double>();
    if (j.contains("t_stat") && v.p_value) v.t_stat = number_from(j.at("t_stat"));
    v.supported = j.at("supported").get<bool>();
    v.insufficient_firms = j.at("insufficient_firms").get<bool>();
    return v;
}

json regression_to_json(const RegressionResult& r) {
    json est = json::array();
    for (const auto& e : r.estimates) {
        est.push_back({{"name", e.name},
                       {"estimate", number(e.estimate)},
                       {"std_error", number(e.std_error)},
                       {"t_stat", number(e.t_stat)},
                       {"p_value", number(e.p_value)},
                       {"stars", e.stars}});
    }
    return {{"label", r.label},
            {"n_obs", r.n_obs},
            {"r2", number(r.r2)},
            {"adjusted_r2", number(r.adjusted_r2)},
            {"robust", to_string(r.robust)},
            {"estimates", est},
            {"warnings", r.warnings}};
}

RegressionResult regression_from_json(const json& j) {
    RegressionResult r;
    r.label = j.at("label").get<std::string>();
    r.n_obs = j.at("n_obs").get<std::size_t>();
    r.r2 = number_from(j.at("r2"));
    r.adjusted_r2 = number_from(j.at("adjusted_r2"));
    r.robust = parse_hc_variant(j.at("robust").get<std::string>());
    for (const auto& e : j.at("estimates")) {
        RegressorEstimate x;
        x.name = e.at("name").get<std::string>();
        x.estimate = number_from(e.at("estimate"));
        x.std_error = number_from(e.at("std_error"));
        x.t_stat = number_from(e.at("t_stat"));
        x.p_value = number_from(e.at("p_value"));
        x.stars = e.at("stars").get<std::string>();
        r.estimates.push_back(std::move(x));
    }
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
}

}  // namespace

json to_json(const StudyReport& report) {
    json meta{{"tool", "eventstudy"}, {"version", report.version}, {"config", report.config}};
    if (report.seed) meta["seed"] = *report.seed;
    if (report.generated_at) meta["generated_at"] = *report.generated_at;

    json sectors = json::array();
    for (const auto& s : report.sectors) {
        json dropped = json::array();
        for (const auto& d : s.dropped) dropped.push_back({{"ticker", d.ticker}, {"reason", d.reason}});
        json models = json::array();
        for (const auto& m : s.market_models) {
            models.push_back({{"ticker", m.ticker},
                              {"benchmark", m.benchmark},
                              {"estimation", window_to_json(m.estimation)},
                              {"alpha", number(m.alpha)},
                              {"beta", number(m.beta)},
                              {"resid_var", number(m.resid_var)},
                              {"n_est", m.n_est}});
        }
        json cars = json::array();
        for (const auto& c : s.cars) {
            cars.push_back({{"ticker", c.ticker},
                            {"window", window_to_json(c.window)},
                            {"car", number(c.car)},
                            {"t_stat", number(c.t_stat)},
                            {"p_value", number(c.p_value)},
                            {"degenerate", c.degenerate}});
        }
        json uih = nullptr;
        if (s.uih) {
            uih = {{"level", s.uih->level},
                   {"hypotheses", json::array({verdict_to_json(s.uih->h1a), verdict_to_json(s.uih->h1b),
                                               verdict_to_json(s.uih->h2)})}};
        }
        json regressions = json::array();
        for (const auto& r : s.regressions) regressions.push_back(regression_to_json(r));
        json paths = json::object();
        for (const auto& [ticker, path] : s.car_paths) {
            json pts = json::array();
            for (const auto& p : path) pts.push_back(json::array({p.day, number(p.car)}));
            paths[ticker] = pts;
        }
        sectors.push_back({{"index", s.index},
                           {"sector", s.sector},
                           {"benchmark", s.benchmark},
                           {"firms", s.firms},
                           {"dropped", dropped},
                           {"market_models", models},
                           {"cars", cars},
                           {"uih", uih},
                           {"regressions", regressions},
                           {"car_paths", paths}});
    }
    json errors = json::array();
    for (const auto& e : report.errors) errors.push_back({{"kind", e.kind}, {"message", e.message}, {"source", e.source}});
    return {{"metadata", meta}, {"sectors", sectors}, {"warnings", report.warnings}, {"errors", errors}};
}

StudyReport report_from_json(const json& j) {
    StudyReport r;
    try {
        const auto& meta = j.at("metadata");
        r.config = meta.value("config", json::object());
        r.version = meta.value("version", std::string(kVersion));
        if (meta.contains("seed")) r.seed = meta.at("seed").get<std::uint64_t>();
        if (meta.contains("generated_at")) r.generated_at = meta.at("generated_at").get<std::string>();
        for (const auto& s : j.at("sectors")) {
            SectorReport sr;
            sr.index = s.at("index").get<std::string>();
            sr.sector = s.at("sector").get<std::string>();
            sr.benchmark = s.at("benchmark").get<std::string>();
            sr.firms = s.at("firms").get<std::vector<std::string>>();
            for (const auto& d : s.at("dropped")) sr.dropped.push_back({d.at("ticker"), d.at("reason")});
            for (const auto& m : s.at("market_models")) {
                MarketModelFit f;
                f.ticker = m.at("ticker").get<std::string>();
                f.benchmark = m.at("benchmark").get<std::string>();
                f.estimation = window_from_json(m.at("estimation"), "estimation");
                f.alpha = number_from(m.at("alpha"));
                f.beta = number_from(m.at("beta"));
                f.resid_var = number_from(m.at("resid_var"));
                f.n_est = m.at("n_est").get<std::size_t>();
                sr.market_models.push_back(std::move(f));
            }
            for (const auto& c : s.at("cars")) {
                CarResult cr;
                cr.ticker = c.at("ticker").get<std::string>();
                cr.window = window_from_json(c.at("window"), "window");
                cr.car = number_from(c.at("car"));
                cr.t_stat = number_from(c.at("t_stat"));
                cr.p_value = number_from(c.at("p_value"));
                cr.degenerate = c.at("degenerate").get<bool>();
                sr.cars.push_back(std::move(cr));
            }
            if (!s.at("uih").is_null()) {
                const auto& u = s.at("uih");
                UihVerdict v;
                v.level = u.at("level").get<double>();
                const auto& h = u.at("hypotheses");
                v.h1a = verdict_from_json(h.at(0));
                v.h1b = verdict_from_json(h.at(1));
                v.h2 = verdict_from_json(h.at(2));
                sr.uih = v;
            }
            for (const auto& g : s.at("regressions")) sr.regressions.push_back(regression_from_json(g));
            for (const auto& [ticker, pts] : s.at("car_paths").items()) {
                std::vector<CarPoint> path;
                for (const auto& p : pts) path.push_back({p.at(0).get<int>(), number_from(p.at(1))});
                sr.car_paths.emplace(ticker, std::move(path));
            }
            r.sectors.push_back(std::move(sr));
        }
        r.warnings = j.value("warnings", std::vector<std::string>{});
        for (const auto& e : j.value("errors", json::array())) {
            r.errors.push_back({e.at("kind"), e.at("message"), e.at("source")});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, std::string("malformed report: ") + e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Rendering

std::vector<CoefficientTable> coefficient_tables(const StudyReport& report) {
    std::vector<CoefficientTable> tables;
    std::vector<std::pair<std::string, std::string>> keys;  // (index, regression label)
    for (const auto& s : report.sectors) {
        for (const auto& r : s.regressions) {
            const auto key = std::make_pair(s.index, r.label);
            auto it = std::find(keys.begin(), keys.end(), key);
            if (it == keys.end()) {
                keys.push_back(key);
                tables.push_back({s.index.empty() ? r.label : s.index + " " + r.label, {}});
                it = keys.end() - 1;
            }
            tables[static_cast<std::size_t>(it - keys.begin())].columns.push_back({s.sector, r});
        }
    }
    return tables;
}

namespace {

std::string uih_cell(const HypothesisVerdict& v, MinusStyle minus) {
    std::string out = format_estimate(v.mean_car, minus);
    out += v.p_value ? " (" + format_p_value(*v.p_value) + ")" : " (n/a)";
    if (v.supported) out += " supported";
    return out;
}

std::string render_markdown_report(const StudyReport& report) {
    std::ostringstream os;
    os << "# Event study report\n\n";
    os << "- version: " << report.version << '\n';
    if (report.seed) os << "- simulation seed: " << *report.seed << '\n';
    if (report.generated_at) os << "- generated: " << *report.generated_at << '\n';
    if (report.config.contains("event")) os << "- event date: " << report.config["event"].value("date", "") << '\n';
    os << "\n## Hypothesis tests\n\n";
    os << "Mean CAR across firms, one-sided p-value in parentheses.\n\n";
    os << "| Sector | Firms | H1a | H1b | H2 |\n|---|---:|---:|---:|---:|\n";
    for (const auto& s : report.sectors) {
        if (!s.uih) continue;
        os << "| " << (s.index.empty() ? s.sector : s.index + " " + s.sector) << " | " << s.firms.size() << " | "
           << uih_cell(s.uih->h1a, MinusStyle::Typographic) << " | " << uih_cell(s.uih->h1b, MinusStyle::Typographic)
           << " | " << uih_cell(s.uih->h2, MinusStyle::Typographic) << " |\n";
    }
    const auto tables = coefficient_tables(report);
    if (!tables.empty()) {
        os << "\n## Cross-sectional regressions\n\n";
        os << "Robust p-values in parentheses. *, **, *** denote significance at the 10%, 5% and 1% levels.\n\n";
        for (const auto& t : tables) os << render_table(t, OutputFormat::Markdown) << '\n';
    }
    if (!report.warnings.empty()) {
        os << "## Warnings\n\n";
        for (const auto& w : report.warnings) os << "- " << w << '\n';
        os << '\n';
    }
    if (!report.errors.empty()) {
        os << "## Errors\n\n";
        for (const auto& e : report.errors) os << "- [" << e.kind << "] " << e.source << ": " << e.message << '\n';
    }
    return os.str();
}

std::string render_csv_report(const StudyReport& report) {
    std::ostringstream os;
    os << "section,table,row,column,estimate,stars,p_value,note\n";
    for (const auto& t : coefficient_tables(report)) {
        const std::string body = render_table(t, OutputFormat::Csv);
        std::istringstream lines(body);
        std::string line;
        std::getline(lines, line);  // header
        while (std::getline(lines, line)) os << "coefficients," << line << ",\n";
    }
    for (const auto& s : report.sectors) {
        if (!s.uih) continue;
        const std::string table = csv_field(s.index.empty() ? s.sector : s.index + " " + s.sector);
        for (const auto* v : {&s.uih->h1a, &s.uih->h1b, &s.uih->h2}) {
            os << "uih," << table << ',' << v->name << ',' << v->window.label() << ',' << format_estimate(v->mean_car)
               << ",," << (v->p_value ? format_p_value(*v->p_value) : "") << ','
               << (v->insufficient_firms ? "insufficient firms" : v->supported ? "supported" : "not supported") << '\n';
        }
    }
    for (const auto& e : report.errors) {
        os << "error," << csv_field(e.source) << ',' << csv_field(e.kind) << ",,,,," << csv_field(e.message) << '\n';
    }
    return os.str();
}

}  // namespace

std::string render_report(const StudyReport& report, OutputFormat format) {
    switch (format) {
        case OutputFormat::Json: return to_json(report).dump(2) + "\n";
        case OutputFormat::Markdown: return render_markdown_report(report);
        case OutputFormat::Csv: return render_csv_report(report);
    }
    return {};
}

void write_car_paths(const StudyReport& report, std::ostream& out) {
    out << "ticker,day,car\n";
    char buf[64];
    for (const auto& s : report.sectors) {
        for (const auto& [ticker, path] : s.car_paths) {
            for (const auto& p : path) {
                std::snprintf(buf, sizeof buf, "%.17g", p.car);
                out << ticker << ',' << p.day << ',' << buf << '\n';
            }
        }
    }
}

std::vector<fs::path> write_study_outputs(const StudyReport& report, const StudyConfig& config) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory: " + ec.message(), config.output_dir.string());

    std::vector<fs::path> written;
    auto write = [&](const std::string& name, const std::string& content) {
        const fs::path path = config.output_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write output file", path.string());
        out << content;
        written.push_back(path);
    };
    write("report.json", render_report(report, OutputFormat::Json));
    if (config.format != OutputFormat::Json) {
        write("report" + std::string(file_extension(config.format)), render_report(report, config.format));
    }
    std::ostringstream paths;
    write_car_paths(report, paths);
    write("car_paths.csv", paths.str());
    return written;
}

json error_to_json(const std::exception& e) {
    json err{{"message", e.what()}};
    if (const auto* ee = dynamic_cast<const Error*>(&e)) {
        err["kind"] = std::string(to_string(ee->kind()));
        err["source"] = ee->source();
        if (const auto* de = dynamic_cast<const DataError*>(&e)) {
            json issues = json::array();
            for (const auto& i : de->issues()) issues.push_back({{"row", i.row}, {"message", i.message}});
            err["issues"] = issues;
        }
    } else {
        err["kind"] = "internal";
        err["source"] = "";
    }
    return {{"error", err}};
}

}  // namespace eventstudy
