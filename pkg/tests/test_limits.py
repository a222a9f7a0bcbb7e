import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from gibbslog.gibbs import GibbsSample, OutOfHypothesisError, exact_Nn_pmf
from gibbslog.limits import (
    LimitError,
    TrendPoint,
    TrendReport,
    card_expectation_identity,
    card_scaled_mean,
    condensation_stats,
    cox_intensity_check,
    expected_count_in_range,
    gamma_estimate,
    gamma_pdf_moments,
    lambda_mass,
    local_limit_check,
    local_limit_ratios,
    moment_check,
    point_process_extract,
    sample_many,
    tv_condensation_report,
)
from gibbslog.models import bridges_model, get_model, log_tail_model


def test_gamma_moments():
    pdf, mom = gamma_pdf_moments(1)
    assert mom(1) == pytest.approx(2) and mom(2) - mom(1) ** 2 == pytest.approx(2)
    assert mom(2) == pytest.approx(6)
    assert gamma_pdf_moments(2)[1](1) == pytest.approx(3)
    assert mom(0) == pytest.approx(1)


@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_gamma_pdf_integrates(alpha):
    pdf, _ = gamma_pdf_moments(alpha)
    x = np.linspace(0, 40, 400_001)
    assert integrate.simpson(pdf(x), x=x) == pytest.approx(1, abs=1e-8)


def test_lambda_mass():
    assert lambda_mass(1, 0.5, 1) == pytest.approx(1)
    assert lambda_mass(1, 0.25, 0.5) == pytest.approx(2)
    assert lambda_mass(0, 0.2, 0.9) == 0
    with pytest.raises(LimitError):
        lambda_mass(1, 0.5, 0.4)


def test_point_process_extract():
    n = 1000
    assert point_process_extract((n - 3, 2, 1), n) == [pytest.approx(math.log(2) / math.log(n))]
    assert point_process_extract((1,) * 7, 7) == []
    assert point_process_extract(GibbsSample(16, (11, 4, 1)))[0] == pytest.approx(0.5)


@given(st.lists(st.integers(1, 500), min_size=1, max_size=20))
def test_points_in_unit_interval(sizes):
    pts = point_process_extract(sizes, sum(sizes) if sum(sizes) > 1 else 2)
    assert all(0 < x <= 1 for x in pts)


def test_local_limit_cube(cube2000):
    r = local_limit_ratios(cube2000, 2000)
    assert np.all((r.ratio >= 0.5) & (r.ratio <= 2))
    assert local_limit_check(cube2000, [100, 2000]).shrinks()


def test_local_limit_colored():
    m = get_model("cube-colored-2", 2000)
    r = local_limit_ratios(m, 2000)
    assert np.all((r.ratio >= 0.5) & (r.ratio <= 2))
    assert local_limit_check(m, [100, 2000]).shrinks()


def test_local_limit_refuses_out_of_hypothesis():
    with pytest.raises(OutOfHypothesisError):
        local_limit_ratios(bridges_model(1, 50), 50)


def test_moments(cube2000):
    rep = moment_check(cube2000, [100, 2000], q=1)
    assert 1.3 <= rep.at(2000).value <= 2.7
    assert rep.shrinks()
    assert moment_check(cube2000, [50], q=0).at(50).value == pytest.approx(1)


def test_mean_components_increase(cube2000):
    means = [exact_Nn_pmf(cube2000, n).mean() for n in (10, 100, 500, 1000, 2000)]
    assert all(a < b for a, b in zip(means, means[1:]))


def test_condensation_stats(cube2000):
    samples = sample_many(cube2000, 2000, 300, seed=4)
    for s in samples:
        assert sum(s.sizes) == 2000
        r = s.ranked()
        assert r[0] + sum(r[1:]) == 2000
    st = condensation_stats(samples)
    assert st["K1"]["q0.5"] > 0.8 and st["K2"]["q0.5"] < 0.2
    with pytest.raises(LimitError):
        condensation_stats([])


def test_gamma_estimates():
    assert 1.6 <= gamma_estimate(log_tail_model(2, 4000), 4000) <= 2.4
    # the cube and bridge tails approach gamma = 1 only logarithmically slowly
    cube = gamma_estimate(get_model("cube", 10_000), 10_000)
    assert gamma_estimate(get_model("cube", 400), 400) < cube < 1


def test_tv_report(cube200):
    rep = tv_condensation_report(cube200, [(12, 3), (4, 3), (5, 1)])
    assert [p.n for p in rep.grid] == [4, 5, 12]
    assert rep.at(12, 3).value < rep.at(4, 3).value
    assert rep.at(5, 1).value == 0
    json.loads(rep.to_json())


def test_cox_counts_match_exact_expectation(cube2000):
    rep = cox_intensity_check(cube2000, 2000, 3000, ((0.3, 0.8), (0.1, 0.3)), seed=8)
    for b in rep.bins:
        assert b.reference_mean == pytest.approx(2 * lambda_mass(1, b.a, b.b))
        sd = math.sqrt(b.variance / rep.reps)
        assert abs(b.mean - b.finite_n_mean) < 4 * sd
        assert b.dispersion > 1
    assert json.loads(rep.to_json())["bins"][0]["a"] == 0.3


def test_expected_count_range(cube200):
    # every component lies in [1, n]
    e = expected_count_in_range(cube200, 100, 0.0, 1.0)
    assert e == pytest.approx(exact_Nn_pmf(cube200, 100).mean(), rel=1e-10)


def test_card_identities(cube2000):
    a, b = card_expectation_identity(50)
    assert a == b
    rep = card_scaled_mean(cube2000, [100, 2000])
    assert rep.shrinks()


def test_trend_report_json_shape():
    rep = TrendReport("s", "m", [TrendPoint(1, 0.5, 1.0, -0.5), TrendPoint(2, 0.75, 1.0, -0.25)], seed=3)
    d = json.loads(rep.to_json())
    assert set(d) == {"statistic", "model", "grid", "seed"}
    assert d["grid"][0] == {"n": 1, "value": 0.5, "reference": 1.0, "deviation": -0.5}
    with pytest.raises(LimitError):
        TrendReport("s", "m", [TrendPoint(2, 0, 0, 0), TrendPoint(1, 0, 0, 0)])


def test_reports_deterministic(cube2000):
    a = cox_intensity_check(cube2000, 2000, 200, seed=5, threads=1).to_json()
    b = cox_intensity_check(cube2000, 2000, 200, seed=5, threads=4).to_json()
    assert a == b


def test_gamma_offset_fit_trends_to_one():
    from gibbslog.limits import gamma_estimate_offset

    fits = [gamma_estimate_offset(get_model("cube", n), n)[1] for n in (1000, 4000, 10_000)]
    assert all(1 < a for a in fits)
    assert fits[0] > fits[1] > fits[2]
