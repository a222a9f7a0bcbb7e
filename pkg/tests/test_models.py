import math

import numpy as np
import pytest

from gibbslog import series as ps
from gibbslog.models import (
    ModelError,
    bridges_model,
    bridges_total_series,
    colored,
    cube_model,
    cube_total_series,
    custom_model,
    delannoy_counts,
    delannoy_face_model,
    delannoy_model,
    delannoy_rho,
    delannoy_total_series,
    get_model,
    log_tail_model,
    predicted_tail,
    x_law,
)


def test_cube_totals():
    assert cube_total_series(3).tolist() == [1, 6, 90, 1680]
    f = cube_total_series(3, ps.FLOAT)
    assert f[2] == pytest.approx(90 / 729)


def test_cube_raw_weights(cube200):
    raw = cube200.raw(4)
    assert raw.tolist() == [0, 6, 54, 816, 14814]
    assert cube200.Wrho == 1 and cube200.alpha == 1 and cube200.gamma == 1
    assert cube200.tail_const == pytest.approx(2 * math.pi / math.sqrt(3))


def test_cube_x_law(cube200):
    law = x_law(cube200, 10)
    assert law.pmf[0] == 0
    assert law.pmf[1] == pytest.approx(2 / 9)
    assert law.pmf[2] == pytest.approx(54 / 729)
    assert np.all(np.diff(law.tail) <= 0)
    assert law.pmf.sum() + law.tail[-1] == pytest.approx(1)


def test_first_return_totals_identity():
    T = 60
    A1 = ps.one(T) - ps.reciprocal(cube_total_series(T), T)
    acc = ps.zeros(T)
    for Aj in ps.powers(A1, T, T):
        acc = acc + Aj
    assert acc == cube_total_series(T)


def test_delannoy_counts():
    assert delannoy_counts(1, 1) == 1
    assert delannoy_counts(1, 0) == 6
    assert delannoy_counts(2, 1) == 24
    assert sum(delannoy_counts(2, k) for k in range(3)) == 115
    with pytest.raises(ModelError):
        delannoy_counts(1, 2)


def test_delannoy_series_identity():
    D = delannoy_total_series(30)
    assert D[1] == 7
    for n in range(31):
        assert D[n] == sum(delannoy_counts(n, k) for k in range(n + 1))


def test_delannoy_rho_against_radicals():
    rho = delannoy_rho()
    assert rho == pytest.approx(0.033444, abs=5e-7)
    assert rho / (1 - rho) ** 3 == pytest.approx(1 / 27, rel=1e-12)
    # real root of 27 z = (1 - z)^3 via Cardano: with u = 1 - z, u^3 + 27 u - 27 = 0
    s = math.sqrt(27**2 / 4 + 27**3 / 27)
    u = (27 / 2 + s) ** (1 / 3) - (s - 27 / 2) ** (1 / 3)
    assert rho == pytest.approx(1 - u, abs=1e-13)
    face = delannoy_rho(face=True)
    assert face**2 / (1 - face) ** 3 == pytest.approx(1 / 27, rel=1e-12)


def test_delannoy_models():
    m = delannoy_model(50)
    assert m.wbar[1] == pytest.approx(7 * m.rho, rel=1e-12)
    assert m.Wrho == 1 and m.gamma == 1
    exact = m.raw(10)
    for n in range(1, 11):
        assert m.wbar[n] == pytest.approx(exact[n] * m.rho**n, rel=1e-9)
    f = delannoy_face_model(50)
    assert f.wbar[0] == 0 and np.all(f.wbar.coeffs >= 0)


def test_bridges_models():
    P2 = bridges_total_series(2, 3)
    assert P2.tolist() == [1, 4, 36, 400]
    m2 = bridges_model(2, 100)
    assert m2.raw(2).tolist() == [0, 4, 20]
    assert m2.tail_const == pytest.approx(math.pi)
    assert m2.in_hypothesis
    assert not bridges_model(1, 10).in_hypothesis
    m3 = bridges_model(3, 10)
    assert not m3.in_hypothesis and m3.Wrho < 1
    # sum binom(2n,n)^3 / 64^n has the closed form pi / Gamma(3/4)^4
    assert 1 / (1 - m3.Wrho) == pytest.approx(math.pi / math.gamma(0.75) ** 4, rel=1e-4)


def test_bridges_partial_sums_increase():
    m2 = bridges_model(2, 400)
    sums = np.cumsum(m2.wbar.coeffs)
    assert np.all(np.diff(sums) >= 0) and sums[-1] <= 1


def test_colored():
    base = cube_model(20)
    assert colored(base, 1) is base
    c2 = colored(base, 2)
    assert c2.alpha == 2 and c2.v(3) == 4 and c2.v(0) == 0
    assert colored(base, 3).v(1) == 3
    with pytest.raises(ModelError):
        colored(base, 0)
    assert get_model("cube-colored-2", 20).v(2) == 3


def test_predicted_tail():
    cube = cube_model(10)
    assert predicted_tail(cube, math.e**2) == pytest.approx(math.pi / math.sqrt(3))
    b2 = bridges_model(2, 10)
    assert predicted_tail(b2, 1000) == pytest.approx(math.pi / math.log(1000))
    assert predicted_tail(colored(cube, 3), 50) == predicted_tail(cube, 50)
    with pytest.raises(ModelError):
        predicted_tail(cube, 1)


def test_log_tail_model_is_exact():
    m = log_tail_model(2, 100)
    tail = x_law(m).tail
    ls = np.arange(101)
    assert np.allclose(tail, (math.log(2) / np.log(ls + 2)) ** 2, atol=1e-15)


def test_registry_errors():
    with pytest.raises(ModelError):
        get_model("tetrahedron", 10)
    with pytest.raises(ModelError):
        custom_model("bad", [0.0, -0.1])


def test_x_law_beyond_truncation(cube200):
    with pytest.raises(ModelError):
        x_law(cube200, 201)


def test_every_shipped_model_has_zero_weight_at_zero():
    for name in ("cube", "delannoy", "delannoy-face", "bridges-m2", "cube-colored-3"):
        m = get_model(name, 30)
        assert m.wbar[0] == 0
        assert m.alpha == (1 if m.vkind == "geometric" else m.r)
