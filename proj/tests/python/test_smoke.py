import json
import math

import numpy as np
import pytest

import eventstudy as es


def test_ols_three_points():
    fit = es.ols_fit(np.array([[1.0], [2.0], [3.0]]), [2.0, 3.0, 5.0])
    assert fit["names"] == ["Constant", "x1"]
    assert fit["coefficients"][0] == pytest.approx(1 / 3)
    assert fit["coefficients"][1] == pytest.approx(1.5)


def test_ols_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(15, 3))
    y = rng.normal(size=15)
    fit = es.ols_fit(x, y)
    ref, *_ = np.linalg.lstsq(np.column_stack([np.ones(15), x]), y, rcond=None)
    np.testing.assert_allclose(fit["coefficients"], ref, rtol=1e-10)


def test_rank_deficiency_raises():
    x = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0]])
    with pytest.raises(es.EventStudyError):
        es.ols_fit(x, [1.0, 2.0, 2.0, 5.0])


def test_cells_and_stars():
    assert es.render_coefficient_cell(-0.18336, 0.0991, typographic=True) == "−0.18336* (0.0991)"
    assert es.render_coefficient_cell(0.347377, 0.29) == "0.347377 (0.2900)"
    assert es.significance_stars(0.0008) == "***"
    assert es.format_p_value(0.00001) == "0.0000"


def test_car_and_t_test():
    assert es.cumulative_abnormal_return([0.01, -0.02, 0.005], 0, 0, 2) == pytest.approx(-0.005)
    t, p = es.car_t_test(0.03, 9, 1e-4, 102)
    assert t == pytest.approx(1.0)
    assert 0.3 < p < 0.33


def test_market_model_noiseless():
    m = np.sin(np.arange(60) * 0.3) * 0.01
    alpha, beta, resid_var = es.market_model(list(0.001 + 0.8 * m), list(m))
    assert alpha == pytest.approx(0.001)
    assert beta == pytest.approx(0.8)
    assert resid_var == pytest.approx(0.0, abs=1e-20)


def test_scenario_is_seeded():
    a = es.generate_scenario(json.dumps({"n_firms": 2, "seed": 5}))
    b = es.generate_scenario(json.dumps({"n_firms": 2, "seed": 5}))
    assert a["prices"]["F001"] == b["prices"]["F001"]
    assert a["truth"]["event_date"] == "2016-11-08"
    assert len(a["dates"]) == 141


def test_monte_carlo_beta_recovery():
    s = es.monte_carlo("beta-recovery", 50, seed=1)
    assert s["n_trials"] == 50
    assert abs(s["mean"] - 1.0) < 0.02


def test_run_study_and_render():
    config = {
        "simulate": {"n_firms": 25, "shocks": [{"days": [1, 10], "abnormal_return": 0.02}]},
        "regression": {"mode": "cross-section"},
    }
    report = es.run_study(config)
    uih = report["sectors"][0]["uih"]["hypotheses"]
    by_name = {h["name"]: h for h in uih}
    assert by_name["H2"]["supported"]
    assert report["metadata"]["seed"] == 20161108
    md = es.render_report(report, "markdown")
    assert "Hypothesis tests" in md
    assert math.isfinite(report["sectors"][0]["regressions"][0]["r2"])
