import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbslog import series as ps
from gibbslog.distribution import chi2_test
from gibbslog.gibbs import (
    BudgetExceededError,
    GibbsError,
    GibbsSample,
    OutOfHypothesisError,
    ZeroProbabilityError,
    compositions,
    conv_table,
    count_in_set,
    delete_first_max,
    exact_Nn_pmf,
    exact_Nn_pmfs,
    exact_tau_law,
    gibbs_sampler,
    largest_part_cdf,
    sample_conditioned,
    sample_gibbs,
    u_coefficients,
)
from gibbslog.models import bridges_model, colored, cube_model, custom_model, get_model
from gibbslog.replicates import replicate_rng


def test_conv_table_entries(cube200):
    t = conv_table(cube200, 10, 4, exact=True)
    assert t.prob(1, 1) == Fraction(2, 9)
    assert t.prob(2, 2) == Fraction(2, 9) ** 2
    assert all(t.prob(j, m) == 0 for j in range(1, 5) for m in range(j))
    f = conv_table(cube200, 10, 4)
    assert f.prob(2, 2) == pytest.approx(4 / 81)


def test_conv_table_rows_recurrence(cube200):
    n = 60
    t = conv_table(cube200, n, 6)
    p = np.array(cube200.wbar.coeffs[: n + 1])
    for j in range(2, 7):
        assert np.allclose(t.row(j), np.convolve(t.row(j - 1), p)[: n + 1], rtol=1e-12, atol=1e-300)


def test_row_mass_matches_exact_cumulative(cube200):
    # sum_m P(S_j = m) over m <= n equals P(S_j <= n) computed exactly
    n = 40
    f = conv_table(cube200, n, 5)
    e = conv_table(cube200, n, 5, exact=True)
    for j in range(1, 6):
        exact = sum(e.prob(j, m) for m in range(n + 1))
        assert f.row(j).sum() == pytest.approx(float(exact), abs=1e-10)
        assert exact <= 1


def test_small_pmfs(cube200):
    assert exact_Nn_pmf(cube200, 2, exact=True).probs[1:] == (Fraction(3, 5), Fraction(2, 5))
    assert exact_Nn_pmf(cube200, 1, exact=True).probs[1:] == (1,)
    c2 = colored(cube200, 2)
    p = exact_Nn_pmf(c2, 2, exact=True)
    assert p[1] == Fraction(2 * 54, 2 * 54 + 3 * 36)


def test_float_pmf_matches_exact(cube200):
    exact = exact_Nn_pmfs(cube200, 150)
    for n in (1, 5, 40, 150):
        f = exact_Nn_pmf(cube200, n)
        assert sum(f.probs) == pytest.approx(1, abs=1e-12)
        for k in range(1, len(f)):
            assert f[k] == pytest.approx(float(exact[n][k]), rel=1e-8, abs=1e-15)
        assert f.meta["omitted_bound"] < 1e-12


def test_u_coefficients_against_composition():
    for r in (1, 2, 3):
        m = colored(cube_model(50), r)
        raw = m.raw(50)
        direct = [0] * 51
        for k, row in enumerate(ps.powers(raw, 50, 50)):
            for n in range(51):
                direct[n] += m.v(k) * row[n]
        assert u_coefficients(m, 50) == direct


def test_out_of_hypothesis_refused():
    m3 = bridges_model(3, 30)
    with pytest.raises(OutOfHypothesisError):
        exact_Nn_pmf(m3, 10)
    assert sum(exact_Nn_pmf(m3, 10, exact=True, force=True).probs) == 1


def test_zero_probability():
    m = custom_model("even", [0, 0, 1.0, 0], in_hypothesis=True, Wrho=1.0)
    with pytest.raises(ZeroProbabilityError):
        exact_Nn_pmf(m, 3)


def test_positive_w0_model():
    # w_0 > 0: N_n has unbounded support, the float law still converges
    m = custom_model("lazy", [0.2, 0.5, 0.3], in_hypothesis=True, Wrho=1.0)
    p = exact_Nn_pmf(m, 2)
    assert sum(p.probs) == pytest.approx(1)
    assert len(p) > 5
    with pytest.raises(GibbsError):
        exact_Nn_pmf(m, 2, exact=True)


def test_conditioned_edge_cases(cube200, rng):
    assert sample_conditioned(cube200, 9, 1, rng) == (9,)
    assert sample_conditioned(cube200, 9, 9, rng) == (1,) * 9
    assert sample_gibbs(cube200, 1, rng) == GibbsSample(1, (1,))


def test_conditioned_symmetry(cube200):
    rng = np.random.default_rng(3)
    s = gibbs_sampler(cube200, 3)
    draws = Counter(s.conditioned(2, rng) for _ in range(100_000))
    assert set(draws) == {(1, 2), (2, 1)}
    assert abs(draws[(1, 2)] - 50_000) < 3 * math.sqrt(25_000)


def _joint_law(model, n):
    w = model.raw(n)
    law = {}
    for k in range(1, n + 1):
        for comp in compositions(n, k, [bool(x) for x in w]):
            law[comp] = model.v(k) * math.prod(w[c] for c in comp)
    total = sum(law.values())
    return {c: Fraction(x, total) for c, x in law.items()}


@pytest.mark.parametrize("name,n", [("cube", 6), ("cube-colored-2", 5), ("bridges-m2", 5)])
def test_sampler_joint_law(name, n):
    model = get_model(name, n)
    law = _joint_law(model, n)
    keys = sorted(law)
    s = gibbs_sampler(model, n)
    counts = Counter(s.sample(replicate_rng(7, i)).sizes for i in range(40_000))
    obs = [counts.get(c, 0) for c in keys]
    assert sum(obs) == 40_000
    _, p, _ = chi2_test(obs, [law[c] for c in keys])
    assert p > 1e-3


def test_sampler_n2(cube200):
    s = gibbs_sampler(cube200, 2)
    ns = [s.sample(replicate_rng(1, i)).N for i in range(20_000)]
    _, p, _ = chi2_test(np.bincount(ns, minlength=3), [0, 0.6, 0.4])
    assert p > 1e-3


def test_sampler_large_n_consistency(cube2000):
    rng = np.random.default_rng(0)
    s = gibbs_sampler(cube2000, 2000)
    for _ in range(200):
        x = s.sample(rng)
        assert sum(x.sizes) == 2000 and all(k >= 1 for k in x.sizes)


def test_largest_part_cdf(cube200):
    # compare with the exact joint law at small n
    n = 6
    law = _joint_law(cube200, n)
    for m in range(1, n + 2):
        exact = sum(p for c, p in law.items() if max(c) < m)
        assert largest_part_cdf(cube200, n, m) == pytest.approx(float(exact), abs=1e-12)


def test_delete_first_max():
    assert delete_first_max((1, 3, 2)) == (1, 2)
    assert delete_first_max((2, 2, 1)) == (2, 1)
    assert delete_first_max((5,)) == ()
    with pytest.raises(GibbsError):
        delete_first_max(())


@given(st.lists(st.integers(0, 9), min_size=1, max_size=12))
def test_delete_first_max_properties(xs):
    out = delete_first_max(xs)
    j = xs.index(max(xs))
    assert list(out) == xs[:j] + xs[j + 1 :]


def test_count_in_set():
    assert count_in_set((1, 1, 7), {1}) == 2
    assert count_in_set((1, 1, 7), set()) == 0
    assert count_in_set((1, 1, 7), range(0, 10)) == 3


def test_tau_law_examples(cube200):
    t = exact_tau_law(cube200, 2, 2)
    assert t.tau == {(1,): 1}
    t = exact_tau_law(cube200, 3, 2)
    assert t.tau == {(1,): 1}
    assert exact_tau_law(cube200, 5, 1).tv == 0
    # both laws degenerate only on the tau side: P(X = 1 | X <= 2) = 3/4
    assert exact_tau_law(cube200, 2, 2).tv == Fraction(1, 4)


def test_tau_law_fixtures(cube200):
    assert exact_tau_law(cube200, 4, 3).tv == Fraction(73485304, 116532025)
    tv12 = exact_tau_law(cube200, 12, 3).tv
    assert float(tv12) == pytest.approx(0.3058994196977023, rel=1e-14)
    assert sum(exact_tau_law(cube200, 12, 3).tau.values()) == 1


def test_tau_budget(cube200):
    with pytest.raises(BudgetExceededError):
        exact_tau_law(cube200, 60, 6, budget=1000)


def test_gibbs_sample_invariant():
    with pytest.raises(GibbsError):
        GibbsSample(5, (1, 2))
    assert GibbsSample(5, (3, 2)).ranked() == [3, 2]


@given(st.integers(1, 12), st.integers(1, 4))
@settings(max_examples=25, deadline=None)
def test_compositions_count(n, k):
    allowed = [False] + [True] * n
    assert sum(1 for _ in compositions(n, k, allowed)) == math.comb(n - 1, k - 1)
