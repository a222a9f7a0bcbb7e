"""Concrete weight models: cube walks, Delannoy walks, Dyck-bridge tuples.

Every model stores its component weights normalised by the radius of
convergence, ``wbar_n = w_n * rho**n``, so float arithmetic stays in
``[0, 1]``.  Exact integer weights are available through ``model.raw(T)``
when the model has them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import gammaln

from . import series as ps
from .series import EXACT, FLOAT, PowerSeries

GEOMETRIC = "geometric"
COLORED = "colored"

ROOT_TOL = 1e-14


class ModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeightModel:
    name: str
    wbar: PowerSeries
    Wrho: float
    rho: float
    alpha: float
    gamma: float
    tail_const: float
    vkind: str = GEOMETRIC
    r: int = 1
    in_hypothesis: bool = True
    raw: Callable[[int], PowerSeries] | None = field(default=None, repr=False)
    rho_exact: Fraction | None = None
    note: str = ""

    def __post_init__(self):
        if self.wbar.mode != FLOAT:
            raise ModelError("wbar must be a float series")
        if np.any(self.wbar.coeffs < 0):
            raise ModelError("weights must be non-negative")
        expected_alpha = 1 if self.vkind == GEOMETRIC else self.r
        if self.vkind not in (GEOMETRIC, COLORED) or self.alpha != expected_alpha:
            raise ModelError(f"alpha={self.alpha} does not match vkind={self.vkind}(r={self.r})")

    @property
    def T(self) -> int:
        return self.wbar.T

    def v(self, k: int) -> int:
        """Component-count weight ``v_k``."""
        if k < 1:
            return 0
        if self.vkind == GEOMETRIC:
            return 1
        return math.comb(k + self.r - 1, self.r - 1)


@dataclass(frozen=True, eq=False)
class XLaw:
    pmf: np.ndarray
    tail: np.ndarray

    @property
    def T(self) -> int:
        return len(self.pmf) - 1


# -- total-path series --------------------------------------------------------


def central_multinomials(T: int) -> list[int]:
    """``(3n)! / n!^3`` for ``n = 0..T``."""
    out = [1]
    for n in range(1, T + 1):
        out.append(out[-1] * (3 * n) * (3 * n - 1) * (3 * n - 2) // n**3)
    return out


def cube_total_series(T: int, mode: str = EXACT) -> PowerSeries:
    """``P(z) = sum binom(3n; n,n,n) z^n``; float mode is scaled by ``27^-n``."""
    if mode == EXACT:
        return ps.series(central_multinomials(T))
    c = np.ones(T + 1)
    for n in range(1, T + 1):
        c[n] = c[n - 1] * (3 * n) * (3 * n - 1) * (3 * n - 2) / (27.0 * n**3)
    return PowerSeries(c, FLOAT)


def _normalized_central_binomials(T: int) -> np.ndarray:
    c = np.ones(T + 1)
    for n in range(1, T + 1):
        c[n] = c[n - 1] * (2 * n - 1) / (2 * n)
    return c


def bridges_total_series(m: int, T: int, mode: str = EXACT) -> PowerSeries:
    """``P_m(z) = sum binom(2n, n)^m z^n`` as an m-fold Hadamard power."""
    if m < 1:
        raise ModelError("need at least one bridge")
    if mode == EXACT:
        base = ps.series([math.comb(2 * n, n) for n in range(T + 1)])
    else:
        base = PowerSeries(_normalized_central_binomials(T), FLOAT)
    out = base
    for _ in range(m - 1):
        out = ps.hadamard(out, base)
    return out


def delannoy_counts(n: int, k: int) -> int:
    """Cube Delannoy paths from ``(n,n,n)`` using exactly ``k`` diagonal steps."""
    if not 0 <= k <= n:
        raise ModelError(f"need 0 <= k <= n, got n={n}, k={k}")
    j = n - k
    return math.factorial(3 * j) // math.factorial(j) ** 3 * math.comb(3 * j + k, k)


def _delannoy_inner(T: int, face: bool) -> PowerSeries:
    # z/(1-z)^3 or z^2/(1-z)^3
    lead = 2 if face else 1
    cs = [0] * (T + 1)
    for i in range(T + 1 - lead):
        cs[i + lead] = math.comb(i + 2, 2)
    return ps.series(cs)


def delannoy_total_series(T: int, face: bool = False) -> PowerSeries:
    """Exact ``D(z) = P(inner(z)) / (1 - z)`` built by series composition."""
    P = cube_total_series(T)
    composed = ps.substitute(P, _delannoy_inner(T, face), T)
    return ps.mul(ps.geometric(T), composed, T)


def delannoy_rho(face: bool = False, tol: float = ROOT_TOL) -> float:
    """Real root of ``z/(1-z)^3 = 1/27`` (or ``z^2/(1-z)^3`` for the face walk)."""
    power = 2 if face else 1

    def f(z):
        return z**power / (1 - z) ** 3 - 1.0 / 27.0

    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _delannoy_normalized_totals(T: int, rho: float, face: bool) -> np.ndarray:
    """``d_n rho^n`` from the closed-form sums, evaluated in log space."""
    logp = np.log(cube_total_series(T, FLOAT).coeffs) + np.arange(T + 1) * math.log(27.0)
    out = np.empty(T + 1)
    for n in range(T + 1):
        mmax = n // 2 if face else n
        m = np.arange(mmax + 1)
        if face:
            # p_m * binom(n + m, 3m)
            logc = gammaln(n + m + 1) - gammaln(3 * m + 1) - gammaln(n - 2 * m + 1)
        else:
            # p_m * binom(n + 2m, n - m)
            logc = gammaln(n + 2 * m + 1) - gammaln(n - m + 1) - gammaln(3 * m + 1)
        out[n] = np.exp(logp[m] + logc + n * math.log(rho)).sum()
    return out


# -- weight models --------------------------------------------------------------


def _components_from_totals(total: PowerSeries, T: int) -> PowerSeries:
    """``1 - 1/total``: the first-return (arch) series."""
    return ps.one(T, total.mode) - ps.reciprocal(total, T)


def _clean(wbar: PowerSeries) -> PowerSeries:
    # rounding can leave -1e-18 where the true weight is 0
    c = np.array(wbar.coeffs)
    c[np.abs(c) < 1e-300] = 0.0
    c[0] = 0.0
    return PowerSeries(np.maximum(c, 0.0), FLOAT)


def _cached_raw(fn: Callable[[int], PowerSeries]) -> Callable[[int], PowerSeries]:
    """Compute once at the largest requested order and truncate."""
    cache: dict[str, PowerSeries] = {}

    def raw(T: int) -> PowerSeries:
        have = cache.get("s")
        if have is None or have.T < T:
            have = cache["s"] = fn(max(T, 2 * have.T if have is not None else T))
        return have.truncate(T)

    return raw


_cube_raw_cached = _cached_raw(lambda T: _components_from_totals(cube_total_series(T), T))


def cube_model(T: int) -> WeightModel:
    """First-return weights of the simple walk from ``(n,n,n)`` to the origin."""
    wbar = _components_from_totals(cube_total_series(T, FLOAT), T)
    return WeightModel(
        name="cube",
        wbar=_clean(wbar),
        Wrho=1.0,
        rho=1 / 27,
        alpha=1,
        gamma=1.0,
        tail_const=2 * math.pi / math.sqrt(3),
        raw=_cube_raw_cached,
        rho_exact=Fraction(1, 27),
    )


def _delannoy_raw_factory(face: bool):
    return _cached_raw(lambda T: _components_from_totals(delannoy_total_series(T, face), T))


_delannoy_raw = {False: _delannoy_raw_factory(False), True: _delannoy_raw_factory(True)}


def _delannoy(T: int, face: bool) -> WeightModel:
    rho = delannoy_rho(face)
    totals = PowerSeries(_delannoy_normalized_totals(T, rho, face), FLOAT)
    wbar = _components_from_totals(totals, T)
    return WeightModel(
        name="delannoy-face" if face else "delannoy",
        wbar=_clean(wbar),
        Wrho=1.0,
        rho=rho,
        alpha=1,
        gamma=1.0,
        # D ~ P(H(z)) / (1 - rho) near rho, so the arch tail picks up (1 - rho)
        tail_const=2 * math.pi * (1 - rho) / math.sqrt(3),
        raw=_delannoy_raw[face],
    )


def delannoy_model(T: int) -> WeightModel:
    return _delannoy(T, face=False)


def delannoy_face_model(T: int) -> WeightModel:
    return _delannoy(T, face=True)


def bridges_value_at_rho(m: int, terms: int = 1_000_000) -> float:
    """``P_m(4^-m)`` for ``m >= 3``: partial sum plus an integral tail estimate."""
    if m < 3:
        return math.inf
    n = np.arange(1, terms + 1)
    logc = np.cumsum(np.log((2 * n - 1) / (2 * n)))
    partial = 1.0 + np.exp(m * logc).sum()
    # binom(2n,n)/4^n = (pi n)^(-1/2) (1 - 1/(8n) + ...)
    N = terms + 0.5
    h = m / 2
    tail = math.pi ** (-h) * (N ** (1 - h) / (h - 1) - m / 8 * N ** (-h) / h)
    return partial + tail


def bridges_model(m: int, T: int) -> WeightModel:
    """Simultaneous-return weights of ``m`` Dyck bridges.

    Only ``m = 2`` sits in the logarithmic regime; other ``m`` are built but
    flagged so limit-law routines refuse them.
    """
    if m < 1:
        raise ModelError("need at least one bridge")
    total = bridges_total_series(m, T, FLOAT)
    wbar = _clean(_components_from_totals(total, T))
    if m <= 2:
        Wrho = 1.0
    else:
        Wrho = 1.0 - 1.0 / bridges_value_at_rho(m)
    note = {
        1: "square-root regime: returns grow like sqrt(n), outside the logarithmic class",
        2: "",
    }.get(m, "subcritical: finitely many simultaneous returns")
    return WeightModel(
        name=f"bridges-m{m}",
        wbar=wbar,
        Wrho=Wrho,
        rho=4.0**-m,
        alpha=1,
        gamma=1.0 if m == 2 else math.nan,
        tail_const=math.pi if m == 2 else math.nan,
        in_hypothesis=(m == 2),
        raw=_cached_raw(lambda t: _components_from_totals(bridges_total_series(m, t), t)),
        rho_exact=Fraction(1, 4**m),
        note=note,
    )


def colored(base: WeightModel, r: int) -> WeightModel:
    """Same component weights, ``v_k = binom(k + r - 1, r - 1)``."""
    if r < 1:
        raise ModelError("need at least one color")
    if base.vkind != GEOMETRIC:
        raise ModelError("base model must have geometric count weights")
    if r == 1:
        return base
    return replace(base, name=f"{base.name}-colored-{r}", vkind=COLORED, r=r, alpha=r)


def log_tail_model(gamma: float, T: int) -> WeightModel:
    """Synthetic model with ``P(X > l) = (log 2 / log(l + 2))**gamma`` exactly."""
    l = np.arange(T + 1)
    tail = (math.log(2) / np.log(l + 2.0)) ** gamma
    w = np.zeros(T + 1)
    w[1:] = tail[:-1] - tail[1:]
    return WeightModel(
        name=f"log-tail-{gamma:g}",
        wbar=PowerSeries(w, FLOAT),
        Wrho=1.0,
        rho=1.0,
        alpha=1,
        gamma=float(gamma),
        tail_const=gamma * math.log(2) ** gamma,
    )


def custom_model(name: str, wbar, vkind: str = GEOMETRIC, r: int = 1, **kw) -> WeightModel:
    """A model from explicit normalised weights; ``Wrho`` defaults to their sum."""
    w = PowerSeries(list(wbar), FLOAT)
    kw.setdefault("Wrho", float(np.sum(w.coeffs)))
    kw.setdefault("rho", 1.0)
    kw.setdefault("gamma", math.nan)
    kw.setdefault("tail_const", math.nan)
    kw.setdefault("in_hypothesis", False)
    return WeightModel(
        name=name, wbar=w, vkind=vkind, r=r, alpha=1 if vkind == GEOMETRIC else r, **kw
    )


# -- derived laws -------------------------------------------------------------------


def x_law(model: WeightModel, T: int | None = None) -> XLaw:
    """Law of the size-biased component ``X`` with ``E z^X = W(rho z)/W(rho)``."""
    T = model.T if T is None else T
    if T > model.T:
        raise ModelError(f"model truncated at {model.T}, asked for {T}")
    pmf = np.array(model.wbar.coeffs[: T + 1]) / model.Wrho
    tail = np.maximum(1.0 - np.cumsum(pmf), 0.0)
    return XLaw(pmf=pmf, tail=tail)


def predicted_tail(model: WeightModel, n: float) -> float:
    """Leading-order ``P(X > n) ~ c / (W(rho) gamma log(n)^gamma)``."""
    if n <= 1:
        raise ModelError("predicted tail needs n > 1")
    g = model.gamma
    return model.tail_const / (model.Wrho * g * math.log(n) ** g)


# -- registry -----------------------------------------------------------------------

MODEL_NAMES = ("cube", "delannoy", "delannoy-face", "bridges-m2", "cube-colored-r")

_COLORED = re.compile(r"^(cube|delannoy|delannoy-face|bridges-m2)-colored-(\d+)$")
_BRIDGES = re.compile(r"^bridges-m(\d+)$")


def get_model(name: str, T: int) -> WeightModel:
    """Look up a model by its registry name, e.g. ``cube`` or ``cube-colored-2``."""
    if name == "cube":
        return cube_model(T)
    if name == "delannoy":
        return delannoy_model(T)
    if name == "delannoy-face":
        return delannoy_face_model(T)
    if m := _BRIDGES.match(name):
        return bridges_model(int(m.group(1)), T)
    if m := _COLORED.match(name):
        return colored(get_model(m.group(1), T), int(m.group(2)))
    raise ModelError(f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")


def total_series(name: str, T: int) -> PowerSeries:
    """Exact total-path series for a registry name (colour ignored)."""
    m = _COLORED.match(name)
    base = m.group(1) if m else name
    if base == "cube":
        return cube_total_series(T)
    if base in ("delannoy", "delannoy-face"):
        return delannoy_total_series(T, face=base == "delannoy-face")
    if b := _BRIDGES.match(base):
        return bridges_total_series(int(b.group(1)), T)
    raise ModelError(f"unknown model {name!r}")
