#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eventstudy/error.hpp"
#include "eventstudy/experiments.hpp"
#include "eventstudy/study.hpp"

namespace py = pybind11;
namespace es = eventstudy;

namespace {

es::DesignMatrix design_from(const Eigen::MatrixXd& x, std::vector<std::string> names, bool intercept) {
    const auto k = static_cast<std::size_t>(x.cols());
    if (names.empty()) {
        for (std::size_t j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (names.size() != k) throw es::Error(es::ErrorKind::InvalidArgument, "names must match the number of columns");
    es::DesignMatrix d(static_cast<std::size_t>(x.rows()));
    if (intercept) d.add_intercept();
    for (std::size_t j = 0; j < k; ++j) {
        const Eigen::VectorXd col = x.col(static_cast<Eigen::Index>(j));
        d.add_column(names[j], std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
    }
    return d;
}

py::dict ols(const Eigen::MatrixXd& x, const std::vector<double>& y, std::vector<std::string> names, bool intercept,
             const std::string& robust) {
    const auto d = design_from(x, std::move(names), intercept);
    const auto fit = es::ols_fit(d, y, es::OlsOptions{es::parse_hc_variant(robust)});
    py::dict out;
    out["names"] = fit.names;
    out["coefficients"] = fit.coefficients;
    out["residuals"] = fit.residuals;
    out["sigma2"] = fit.sigma2;
    out["r2"] = fit.r2;
    out["adjusted_r2"] = fit.adjusted_r2;
    out["classical_cov"] = fit.classical_cov;
    out["hc_cov"] = fit.hc_cov;
    out["warnings"] = fit.warnings;
    return out;
}

es::MarketModelFit market_model(const std::vector<double>& firm, const std::vector<double>& market) {
    if (firm.size() != market.size()) throw es::Error(es::ErrorKind::InvalidArgument, "series lengths differ");
    es::DesignMatrix d(firm.size());
    d.add_intercept().add_column("market", market);
    const auto fit = es::ols_fit(d, firm);
    es::MarketModelFit m;
    m.alpha = fit.coefficients(0);
    m.beta = fit.coefficients(1);
    m.resid_var = fit.sigma2;
    m.n_est = firm.size();
    return m;
}

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Market-model event study core";
    m.attr("__version__") = std::string(es::kVersion);

    py::register_exception<es::Error>(m, "EventStudyError", PyExc_RuntimeError);

    m.def("ols_fit", &ols, py::arg("x"), py::arg("y"), py::arg("names") = std::vector<std::string>{},
          py::arg("intercept") = true, py::arg("robust") = "hc1");

    m.def("significance_stars", &es::significance_stars, py::arg("p"));
    m.def("format_p_value", &es::format_p_value, py::arg("p"));
    m.def(
        "render_coefficient_cell",
        [](double estimate, double p, bool typographic) {
            return es::render_coefficient_cell(estimate, p,
                                               typographic ? es::MinusStyle::Typographic : es::MinusStyle::Ascii);
        },
        py::arg("estimate"), py::arg("p"), py::arg("typographic") = false);

    m.def(
        "market_model",
        [](const std::vector<double>& firm, const std::vector<double>& market) {
            const auto f = market_model(firm, market);
            return py::make_tuple(f.alpha, f.beta, f.resid_var);
        },
        py::arg("firm_returns"), py::arg("market_returns"), "Returns (alpha, beta, resid_var).");

    m.def(
        "cumulative_abnormal_return",
        [](const std::vector<double>& ar, int first_day, int tau1, int tau2) {
            return es::cumulative_abnormal_return(es::ARSeries("", first_day, ar), es::Window::make(tau1, tau2));
        },
        py::arg("abnormal_returns"), py::arg("first_day"), py::arg("tau1"), py::arg("tau2"));

    m.def(
        "car_t_test",
        [](double car, int window_length, double resid_var, std::size_t n_est) {
            es::MarketModelFit fit;
            fit.resid_var = resid_var;
            fit.n_est = n_est;
            const auto t = es::car_t_test(car, es::Window::make(1, window_length), fit);
            return py::make_tuple(t.t_stat, t.p_value);
        },
        py::arg("car"), py::arg("window_length"), py::arg("resid_var"), py::arg("n_est"),
        "Returns (t, two-sided p).");

    m.def(
        "generate_scenario",
        [](const std::string& spec_json) {
            const auto spec = es::scenario_from_json(nlohmann::json::parse(spec_json.empty() ? "{}" : spec_json));
            const auto sc = es::generate_scenario(spec);
            py::dict prices;
            for (const auto& t : sc.prices.tickers()) {
                std::vector<double> v;
                for (const auto& p : sc.prices.prices(t)) v.push_back(p.value_or(std::nan("")));
                prices[py::str(t)] = v;
            }
            std::vector<std::string> dates;
            for (const auto& d : sc.calendar.dates()) dates.push_back(d.iso());
            py::dict out;
            out["dates"] = dates;
            out["prices"] = prices;
            out["truth"] = json_to_py(es::to_json(sc.truth));
            return out;
        },
        py::arg("spec_json") = "{}");

    m.def(
        "monte_carlo",
        [](const std::string& statistic, std::size_t n_trials, std::uint64_t seed, const std::string& spec_json,
           unsigned threads) {
            const auto spec = es::scenario_from_json(nlohmann::json::parse(spec_json.empty() ? "{}" : spec_json));
            const auto extractor = es::named_extractor(statistic);
            es::McSummary s;
            {
                py::gil_scoped_release release;
                s = es::monte_carlo(spec, n_trials, extractor, es::McOptions{seed, threads});
            }
            py::dict out;
            out["n_trials"] = s.n_trials;
            out["mean"] = s.mean;
            out["sd"] = s.sd;
            out["rejections"] = s.rejections;
            out["rejection_rate"] = s.rejection_rate;
            return out;
        },
        py::arg("statistic"), py::arg("n_trials"), py::arg("seed") = 20161108ULL, py::arg("spec_json") = "{}",
        py::arg("threads") = 1u);

    m.def(
        "run_study",
        [](const std::string& config_json, const std::string& base_dir) {
            auto config = es::study_config_from_json(nlohmann::json::parse(config_json), base_dir);
            config.timestamp = false;
            return json_to_py(es::to_json(es::run_study(config)));
        },
        py::arg("config_json"), py::arg("base_dir") = "",
        "Runs a study and returns the report as a dict; nothing is written to disk.");

    m.def(
        "render_report",
        [](const std::string& report_json, const std::string& format) {
            return es::render_report(es::report_from_json(nlohmann::json::parse(report_json)),
                                     es::parse_output_format(format));
        },
        py::arg("report_json"), py::arg("format") = "markdown");
}
