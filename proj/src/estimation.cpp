#include "eventstudy/estimation.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "eventstudy/error.hpp"

namespace eventstudy {

DesignMatrix::DesignMatrix(std::size_t n_obs) : n_obs_(n_obs), x_(static_cast<Eigen::Index>(n_obs), 0) {}

DesignMatrix& DesignMatrix::add_intercept(std::string name) {
    const std::vector<double> ones(n_obs_, 1.0);
    add_column(std::move(name), ones);
    has_intercept_ = true;
    return *this;
}

DesignMatrix& DesignMatrix::add_column(std::string name, std::span<const double> values) {
    if (values.size() != n_obs_) {
        throw Error(ErrorKind::InvalidArgument, "column '" + name + "' has " + std::to_string(values.size()) +
                                                    " values, expected " + std::to_string(n_obs_));
    }
    if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
        throw Error(ErrorKind::InvalidArgument, "duplicate design column '" + name + "'");
    }
    const auto j = x_.cols();
    x_.conservativeResize(Eigen::NoChange, j + 1);
    for (std::size_t i = 0; i < n_obs_; ++i) x_(static_cast<Eigen::Index>(i), j) = values[i];
    names_.push_back(std::move(name));
    return *this;
}

std::size_t DesignMatrix::column_index(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw Error(ErrorKind::InvalidArgument, "no design column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

HcVariant parse_hc_variant(std::string_view text) {
    if (text == "hc0" || text == "HC0") return HcVariant::HC0;
    if (text == "hc1" || text == "HC1") return HcVariant::HC1;
    throw Error(ErrorKind::InvalidArgument, "unknown robust covariance variant '" + std::string(text) +
                                                "' (expected hc0|hc1)");
}

std::string_view to_string(HcVariant variant) noexcept {
    return variant == HcVariant::HC0 ? "hc0" : "hc1";
}

namespace {

Eigen::MatrixXd sandwich(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& x, const Eigen::VectorXd& e,
                         HcVariant variant) {
    const Eigen::VectorXd e2 = e.array().square();
    const Eigen::MatrixXd meat = x.transpose() * e2.asDiagonal() * x;
    Eigen::MatrixXd cov = bread * meat * bread;
    if (variant == HcVariant::HC1) {
        const double n = static_cast<double>(x.rows());
        const double k = static_cast<double>(x.cols());
        cov *= n / (n - k);
    }
    return 0.5 * (cov + cov.transpose());
}

}  // namespace

OlsFit ols_fit(const DesignMatrix& x, std::span<const double> y, const OlsOptions& options) {
    const std::size_t n = x.n_obs();
    const std::size_t k = x.n_cols();
    if (y.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "response has " + std::to_string(y.size()) +
                                                    " values, design has " + std::to_string(n) + " rows");
    }
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "design matrix has no columns");
    if (n <= k) {
        throw Error(ErrorKind::InvalidArgument, "need more observations than regressors (n = " +
                                                    std::to_string(n) + ", k = " + std::to_string(k) + ")");
    }

    const Eigen::MatrixXd& X = x.matrix();
    const Eigen::Map<const Eigen::VectorXd> Y(y.data(), static_cast<Eigen::Index>(n));

    // Rank is judged on unit-norm columns so regressor units do not matter.
    Eigen::VectorXd norms = X.colwise().norm().transpose();
    std::vector<std::string> dependent;
    for (Eigen::Index j = 0; j < norms.size(); ++j) {
        if (norms(j) == 0.0) dependent.push_back(x.names()[static_cast<std::size_t>(j)]);
    }
    if (!dependent.empty()) throw RankDeficientError(std::move(dependent));

    const Eigen::MatrixXd scaled = X * norms.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(options.rank_tolerance);
    if (static_cast<std::size_t>(qr.rank()) < k) {
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = qr.rank(); j < perm.size(); ++j) {
            dependent.push_back(x.names()[static_cast<std::size_t>(perm(j))]);
        }
        throw RankDeficientError(std::move(dependent));
    }

    OlsFit fit;
    fit.names = x.names();
    fit.n_obs = n;
    fit.n_params = k;
    fit.coefficients = qr.solve(Y).cwiseQuotient(norms);
    fit.fitted = X * fit.coefficients;
    fit.residuals = Y - fit.fitted;
    fit.ssr = fit.residuals.squaredNorm();
    fit.sigma2 = fit.ssr / static_cast<double>(n - k);

    // (X'X)^-1 = D^-1 P R^-1 R^-T P' D^-1 for X D^-1 P = Q R.
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(kk, kk).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(kk, kk));
    const Eigen::MatrixXd scaled_inv = qr.colsPermutation() * (r_inv * r_inv.transpose()) *
                                       qr.colsPermutation().transpose();
    fit.xtx_inverse = norms.cwiseInverse().asDiagonal() * scaled_inv * norms.cwiseInverse().asDiagonal();
    fit.xtx_inverse = 0.5 * (fit.xtx_inverse + fit.xtx_inverse.transpose());

    fit.classical_cov = fit.sigma2 * fit.xtx_inverse;
    fit.hc_variant = options.robust;
    fit.hc_cov = sandwich(fit.xtx_inverse, X, fit.residuals, options.robust);

    double tss = 0.0;
    if (x.has_intercept()) {
        const double mean = Y.mean();
        tss = (Y.array() - mean).square().sum();
    } else {
        tss = Y.squaredNorm();
    }
    if (!(tss > 0.0)) {
        fit.r2 = 0.0;
        fit.warnings.push_back("response has zero variation; R-squared set to 0");
    } else {
        fit.r2 = std::clamp(1.0 - fit.ssr / tss, 0.0, 1.0);
    }
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    const double denom = x.has_intercept() ? dn - 1.0 : dn;
    fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * denom / (dn - dk);
    fit.adjusted_r2 = std::min(fit.adjusted_r2, fit.r2);
    return fit;
}

Eigen::MatrixXd hc_covariance(const OlsFit& fit, const DesignMatrix& x, HcVariant variant) {
    if (x.n_obs() != fit.n_obs || x.n_cols() != fit.n_params) {
        throw Error(ErrorKind::InvalidArgument, "design matrix does not match the fit");
    }
    return sandwich(fit.xtx_inverse, x.matrix(), fit.residuals, variant);
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorKind::InvalidArgument, "Student-t needs positive degrees of freedom");
    if (std::isnan(t)) throw Error(ErrorKind::Numerical, "t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

double student_t_upper_p(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorKind::InvalidArgument, "Student-t needs positive degrees of freedom");
    if (std::isnan(t)) throw Error(ErrorKind::Numerical, "t statistic is NaN");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

std::vector<CoefficientTest> coefficient_tests(const OlsFit& fit, const Eigen::MatrixXd& cov) {
    const auto k = static_cast<Eigen::Index>(fit.n_params);
    if (cov.rows() != k || cov.cols() != k) {
        throw Error(ErrorKind::InvalidArgument, "covariance is " + std::to_string(cov.rows()) + "x" +
                                                    std::to_string(cov.cols()) + ", expected " +
                                                    std::to_string(k) + "x" + std::to_string(k));
    }
    const double df = static_cast<double>(fit.df_resid());
    std::vector<CoefficientTest> out;
    out.reserve(fit.n_params);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double var = cov(j, j);
        if (!(var > 0.0)) {
            throw Error(ErrorKind::Numerical,
                        "non-positive variance for coefficient '" + fit.names[static_cast<std::size_t>(j)] + "'");
        }
        CoefficientTest test;
        test.estimate = fit.coefficients(j);
        test.std_error = std::sqrt(var);
        test.t_stat = test.estimate / test.std_error;
        test.p_value = student_t_two_sided_p(test.t_stat, df);
        out.push_back(test);
    }
    return out;
}

}  // namespace eventstudy
