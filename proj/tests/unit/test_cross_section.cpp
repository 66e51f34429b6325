#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "eventstudy/cross_section.hpp"
#include "eventstudy/error.hpp"
#include "support.hpp"

using namespace eventstudy;

TEST(Stars, Thresholds) {
    EXPECT_EQ(significance_stars(0.0991), "*");
    EXPECT_EQ(significance_stars(0.0008), "***");
    EXPECT_EQ(significance_stars(0.2900), "");
    EXPECT_EQ(significance_stars(0.01), "**");
    EXPECT_EQ(significance_stars(0.05), "*");
    EXPECT_EQ(significance_stars(0.10), "");
    EXPECT_EQ(significance_stars(0.0), "***");
    EXPECT_EQ(significance_stars(1.0), "");
    EXPECT_THROW(significance_stars(-0.1), Error);
    EXPECT_THROW(significance_stars(1.5), Error);
    EXPECT_THROW(significance_stars(NAN), Error);
}

TEST(Attributes, LogScaleAndIncomeTransform) {
    const auto a = make_firm_attributes({2, "A", std::exp(20.0), std::exp(15.0)}, true);
    EXPECT_NEAR(a.size, 20.0, 1e-12);
    EXPECT_NEAR(a.income, 15.0, 1e-12);
    EXPECT_FALSE(a.income_sign_adjusted);

    EXPECT_THROW(make_firm_attributes({3, "B", 1e9, -5e6}, true), Error);
    std::vector<std::string> warnings;
    const auto b = make_firm_attributes({3, "B", 1e9, -5e6}, false, &warnings);
    EXPECT_NEAR(b.income, -std::log1p(5e6), 1e-12);
    EXPECT_TRUE(b.income_sign_adjusted);
    EXPECT_EQ(warnings.size(), 1u);
    EXPECT_THROW(make_firm_attributes({4, "C", 0.0, 1.0}, false), Error);
}

TEST(Attributes, ReadAndWriteCsv) {
    std::istringstream in("ticker,total_assets,net_income\nA,1000,10\nB,2000,20\n");
    const auto records = read_attribute_records(in);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[1].row, 3u);
    std::ostringstream out;
    write_attribute_csv(records, out);
    std::istringstream back(out.str());
    EXPECT_EQ(read_attribute_records(back)[1].total_assets, 2000.0);

    std::istringstream dup("ticker,total_assets,net_income\nA,1,1\nA,2,2\n");
    EXPECT_THROW(firm_attributes(read_attribute_records(dup), true), Error);
}

namespace {

struct PanelFixture {
    EventFrame frame;
    std::vector<ARSeries> ars;
    std::map<std::string, FirmAttributes> attrs;
};

PanelFixture fixture() {
    std::map<std::string, std::vector<double>> r;
    const Span span{};
    for (const char* t : {"A", "B", "C", "D", "E"}) r[t] = std::vector<double>(span.size(), 0.0);
    r["M"] = std::vector<double>(span.size(), 0.0);
    PanelFixture f{testing_support::make_frame(r), {}, {}};
    int i = 0;
    for (const char* t : {"A", "B", "C", "D", "E"}) {
        std::vector<double> v(21);
        for (int d = 0; d < 21; ++d) v[std::size_t(d)] = 0.001 * ((d * 7 + i * 3) % 5) - 0.002;
        f.ars.emplace_back(t, -10, v);
        f.attrs[t] = FirmAttributes{t, 20.0 + i, 15.0 + (i * i) % 3, false};
        ++i;
    }
    return f;
}

}  // namespace

TEST(Design, PanelRowsAndColumns) {
    const auto f = fixture();
    const auto d = build_design(f.frame, f.ars, f.attrs, nullptr, {0, 1});
    EXPECT_EQ(d.matrix.n_obs(), 10u);
    EXPECT_EQ(d.matrix.names(), (std::vector<std::string>{"Constant", "Trump", "Size", "Income"}));
    const auto& x = d.matrix.matrix();
    // Rows are firm-major; day 0 then day +1.
    EXPECT_EQ(x(0, 1), 0.0);
    EXPECT_EQ(x(1, 1), 1.0);
    EXPECT_EQ(x(2, 2), 21.0);
    EXPECT_NEAR(d.response[0], f.ars[0].at(0), 1e-15);
    EXPECT_NEAR(d.response[1], f.ars[0].at(0) + f.ars[0].at(1), 1e-15);
}

TEST(Design, Eq6NeedsControls) {
    const auto f = fixture();
    DesignOptions o;
    o.spec = RegressionSpec::Eq6;
    EXPECT_THROW(build_design(f.frame, f.ars, f.attrs, nullptr, {0, 1}, o), Error);
}

TEST(Design, MissingAttributesAreAnError) {
    auto f = fixture();
    f.attrs.erase("C");
    EXPECT_THROW(build_design(f.frame, f.ars, f.attrs, nullptr, {0, 1}), Error);
}

TEST(Design, CrossSectionStacksWindows) {
    const auto f = fixture();
    const std::vector<Window> windows{{0, 0}, {1, 10}};
    const auto d = build_cross_section_design(f.frame, f.ars, f.attrs, nullptr, windows);
    EXPECT_EQ(d.matrix.n_obs(), 10u);
    const auto& x = d.matrix.matrix();
    int dummies = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) dummies += int(x(r, 1));
    EXPECT_EQ(dummies, 5);
}

TEST(Regression, RecoversPlantedEffect) {
    auto f = fixture();
    // Add 0.05 to every firm's day +1 abnormal return.
    std::vector<ARSeries> shifted;
    for (const auto& a : f.ars) {
        std::vector<double> v(a.values().begin(), a.values().end());
        v[11] += 0.05;
        shifted.emplace_back(a.ticker(), a.first_day(), v);
    }
    const auto result = fit_sector_regression(build_design(f.frame, shifted, f.attrs, nullptr, {0, 1}));
    const auto& dummy = result.at("Trump");
    EXPECT_NEAR(dummy.estimate, 0.05 + 0.0, 0.01);
    EXPECT_EQ(result.n_obs, 10u);
    EXPECT_LE(result.adjusted_r2, result.r2);
}

TEST(Regression, ExactFitReportsDegeneratePValues) {
    DesignMatrix x(4);
    const std::vector<double> d{0, 1, 0, 1};
    x.add_intercept().add_column("Trump", d);
    RegressionDesign design{x, {1, 3, 1, 3}, {"a", "b", "c", "d"}, "[0;+1]"};
    const auto r = fit_sector_regression(design);
    EXPECT_NEAR(r.at("Trump").estimate, 2.0, 1e-12);
    EXPECT_EQ(r.at("Trump").p_value, 0.0);
    EXPECT_EQ(r.at("Trump").stars, "***");

    RegressionDesign zero{x, {1, 1, 1, 1}, {"a", "b", "c", "d"}, "[0;+1]"};
    const auto z = fit_sector_regression(zero);
    EXPECT_EQ(z.at("Trump").p_value, 1.0);
}

TEST(Names, ParseAndPrint) {
    EXPECT_EQ(parse_regression_spec("eq6"), RegressionSpec::Eq6);
    EXPECT_EQ(parse_design_mode("cross-section"), DesignMode::CrossSection);
    EXPECT_EQ(to_string(DesignMode::Panel), "panel");
    EXPECT_THROW(parse_design_mode("pooled"), Error);
    EXPECT_EQ(parse_control_transform("level"), ControlTransform::Level);
}
