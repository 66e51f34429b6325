#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace eventstudy {

/// Named regressor columns of equal length.
class DesignMatrix {
  public:
    explicit DesignMatrix(std::size_t n_obs);

    /// Appends a column of ones. Throws if the name is taken.
    DesignMatrix& add_intercept(std::string name = "Constant");
    /// Throws on a length mismatch or duplicate name.
    DesignMatrix& add_column(std::string name, std::span<const double> values);

    std::size_t n_obs() const noexcept { return n_obs_; }
    std::size_t n_cols() const noexcept { return names_.size(); }
    bool has_intercept() const noexcept { return has_intercept_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t column_index(std::string_view name) const;

    const Eigen::MatrixXd& matrix() const noexcept { return x_; }
    Eigen::VectorXd column(std::size_t j) const { return x_.col(static_cast<Eigen::Index>(j)); }

  private:
    std::size_t n_obs_;
    bool has_intercept_ = false;
    std::vector<std::string> names_;
    Eigen::MatrixXd x_;
};

enum class HcVariant { HC0, HC1 };

HcVariant parse_hc_variant(std::string_view text);
std::string_view to_string(HcVariant variant) noexcept;

struct OlsOptions {
    HcVariant robust = HcVariant::HC1;
    /// Column-pivoted QR threshold, relative to the largest pivot of the
    /// unit-norm-scaled design.
    double rank_tolerance = 1e-10;
};

struct OlsFit {
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
    double ssr = 0.0;
    double sigma2 = 0.0;  // ssr / (n - k)
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    Eigen::MatrixXd xtx_inverse;
    Eigen::MatrixXd classical_cov;
    Eigen::MatrixXd hc_cov;
    HcVariant hc_variant = HcVariant::HC1;
    std::vector<std::string> warnings;

    std::size_t df_resid() const noexcept { return n_obs - n_params; }
};

/// Least squares by column-pivoted Householder QR.
///
/// R² is centered when the design has an intercept and uncentered otherwise.
/// A response with zero (centered) variation gets R² = 0 and a warning.
/// Throws RankDeficientError naming the dependent columns, or Error when
/// n <= k or the response length does not match.
OlsFit ols_fit(const DesignMatrix& x, std::span<const double> y, const OlsOptions& options = {});

/// Sandwich (X'X)^-1 X' diag(e²) X (X'X)^-1, scaled by n/(n-k) for HC1.
Eigen::MatrixXd hc_covariance(const OlsFit& fit, const DesignMatrix& x, HcVariant variant);

struct CoefficientTest {
    double estimate = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;  // two-sided, Student-t with n - k df
};

/// Throws if the covariance has the wrong shape or a non-positive diagonal entry.
std::vector<CoefficientTest> coefficient_tests(const OlsFit& fit, const Eigen::MatrixXd& cov);

/// P(|T| >= |t|) for T ~ Student-t(df). Infinite t gives 0.
double student_t_two_sided_p(double t, double df);
/// P(T >= t) for T ~ Student-t(df).
double student_t_upper_p(double t, double df);

}  // namespace eventstudy
