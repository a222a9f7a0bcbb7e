"""Gibbs partitions: exact component-count laws and exact samplers.

A Gibbs partition of ``n`` is a tuple ``(K_1, ..., K_N)`` with probability
``v_N * prod w_{K_i} / u_n``.  After normalising weights by ``rho**n`` this is
the law of i.i.d. copies of ``X`` conditioned on their sum, mixed over ``N``.
All float tables store each convolution power with a separate log scale so
long rows do not underflow.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import stats

from . import series as ps
from .distribution import Distribution
from .models import GEOMETRIC, WeightModel, x_law

#: Relative mass allowed outside the computed support of ``N_n``.
KCUT_TOL = 1e-12

#: Default cap on the number of tuples enumerated by ``exact_tau_law``.
TAU_BUDGET = 500_000


class GibbsError(ValueError):
    pass


class OutOfHypothesisError(GibbsError):
    pass


class ZeroProbabilityError(GibbsError):
    pass


class BudgetExceededError(GibbsError):
    pass


@dataclass(frozen=True)
class GibbsSample:
    n: int
    sizes: tuple[int, ...]

    def __post_init__(self):
        if sum(self.sizes) != self.n:
            raise GibbsError(f"sizes {self.sizes} do not sum to {self.n}")

    @property
    def N(self) -> int:
        return len(self.sizes)

    def ranked(self) -> list[int]:
        return sorted(self.sizes, reverse=True)


@dataclass(frozen=True, eq=False)
class ConvTable:
    """``P(S_j = m)`` for ``0 <= j <= k_max`` and ``0 <= m <= n``.

    Float tables keep ``rows[j] * exp(log_scale[j])``; exact tables keep the
    integer convolution powers ``w^{(j)}_m`` of the raw weights.
    """

    model: WeightModel
    n: int
    k_max: int
    rows: np.ndarray | None = None
    log_scale: np.ndarray | None = None
    raw: list[list[int]] | None = None

    @property
    def exact(self) -> bool:
        return self.raw is not None

    def prob(self, j: int, m: int):
        if not (0 <= j <= self.k_max and 0 <= m <= self.n):
            raise GibbsError(f"({j}, {m}) outside table ({self.k_max}, {self.n})")
        if self.exact:
            rho = self.model.rho_exact
            if rho is None or self.model.Wrho != 1:
                raise GibbsError(f"{self.model.name} has no exact normalisation")
            return Fraction(self.raw[j][m]) * rho**m
        val = self.rows[j, m]
        return float(val * math.exp(self.log_scale[j])) if val else 0.0

    def row(self, j: int) -> np.ndarray:
        if self.exact:
            return np.array([float(self.prob(j, m)) for m in range(self.n + 1)])
        return self.rows[j] * math.exp(self.log_scale[j])

    def log_prob(self, j: int, m: int) -> float:
        if self.exact:
            p = self.prob(j, m)
            return math.log(p) if p else -math.inf
        val = self.rows[j, m]
        return math.log(val) + self.log_scale[j] if val > 0 else -math.inf


def _xpmf(model: WeightModel, n: int) -> np.ndarray:
    if n > model.T:
        raise ps.TruncationLimitError(f"model {model.name} truncated at {model.T} < n = {n}")
    return x_law(model, n).pmf


def _next_row(prev: np.ndarray, prev_log: float, p: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    row = np.convolve(prev, p)[: n + 1]
    top = row.max()
    if top <= 0:
        return row, -math.inf
    return row / top, prev_log + math.log(top)


def _float_rows(p: np.ndarray, n: int, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    rows = np.zeros((k_max + 1, n + 1))
    logs = np.zeros(k_max + 1)
    rows[0, 0] = 1.0
    for j in range(1, k_max + 1):
        rows[j], logs[j] = _next_row(rows[j - 1], logs[j - 1], p, n)
    return rows, logs


def _exact_rows(model: WeightModel, n: int, k_max: int) -> list[list[int]]:
    if model.raw is None:
        raise GibbsError(f"{model.name} has no exact weights")
    w = model.raw(n)
    out = [ps.one(n)]
    for _ in range(k_max):
        out.append(ps.mul(out[-1], w, n))
    return [list(s.coeffs) for s in out]


def conv_table(model: WeightModel, n: int, k_max: int, exact: bool = False) -> ConvTable:
    """Convolution powers of the law of ``X`` up to ``k_max`` summands."""
    if exact:
        return ConvTable(model, n, k_max, raw=_exact_rows(model, n, k_max))
    rows, logs = _float_rows(_xpmf(model, n), n, k_max)
    return ConvTable(model, n, k_max, rows=rows, log_scale=logs)


def _log_count_tail(model: WeightModel, j: int, log_t: float, p0: float, n: int) -> float:
    """``log sum_{k>j} v_k W^k min(t^k, P(Bin(k, 1 - p0) <= n))``, ``t = P(X <= n)``."""
    logW = math.log(model.Wrho)
    if p0 == 0:
        # at most n parts fit; nothing is omitted past k = n
        if j >= n:
            return -math.inf
    if model.vkind == GEOMETRIC and log_t + logW < 0 and p0 == 0:
        a = log_t + logW
        return (j + 1) * a - math.log(-math.expm1(a))
    terms = []
    k = j + 1
    while True:
        lb = log_t * k
        if p0 > 0:
            lb = min(lb, stats.binom.logcdf(n, k, 1 - p0))
        term = math.log(model.v(k)) + k * logW + lb
        terms.append(term)
        if k > j + 50 and term < max(terms) - 60 and terms[-1] < terms[-2]:
            break
        if p0 == 0 and k >= n:
            break
        if k > j + 1_000_000:
            raise GibbsError("component-count tail does not converge")
        k += 1
    top = max(terms)
    return top + math.log(sum(math.exp(t - top) for t in terms))


def _nn_pmf_float(model: WeightModel, n: int, tol: float):
    p = _xpmf(model, n)
    q = float(p.sum())
    log_t = math.log(q) if q > 0 else -math.inf
    rows = [np.eye(1, n + 1, 0)[0]]
    logs = [0.0]
    logw = [-math.inf]
    log_bound = -math.inf
    j = 0
    while True:
        j += 1
        row, lg = _next_row(rows[-1], logs[-1], p, n)
        rows.append(row)
        logs.append(lg)
        s = row[n]
        logw.append(math.log(model.v(j)) + j * math.log(model.Wrho) + math.log(s) + lg if s > 0 else -math.inf)
        finite = [w for w in logw if w > -math.inf]
        if finite:
            top = max(finite)
            log_norm = top + math.log(sum(math.exp(w - top) for w in finite))
            log_bound = _log_count_tail(model, j, log_t, float(p[0]), n)
            if log_bound - log_norm < math.log(tol):
                break
        if p[0] == 0 and j >= n:
            # S_j >= j, so no later row reaches n
            log_bound = -math.inf
            break
        if j > 100_000:
            raise GibbsError("component count did not converge")
    if not any(w > -math.inf for w in logw):
        raise ZeroProbabilityError(f"no decomposition of n={n}")
    top = max(logw)
    weights = [math.exp(w - top) if w > -math.inf else 0.0 for w in logw]
    table = ConvTable(model, n, j, rows=np.array(rows), log_scale=np.array(logs))
    bound = math.exp(log_bound - log_norm) if log_bound > -math.inf else 0.0
    dist = Distribution.from_weights(
        weights,
        exact=False,
        n=n,
        model=model.name,
        k_cut=j,
        omitted_bound=bound,
        log_normalization=log_norm,
    )
    return dist, table


def _check_hypothesis(model: WeightModel, force: bool):
    if not model.in_hypothesis and not force:
        raise OutOfHypothesisError(
            f"{model.name} is outside the logarithmic regime ({model.note or 'flagged'})"
        )


def exact_Nn_pmf(
    model: WeightModel, n: int, exact: bool = False, tol: float = KCUT_TOL, force: bool = False
) -> Distribution:
    """Law of the number of components ``N_n``.

    Float mode stops at the first ``k_cut`` whose rigorous bound on the
    omitted relative mass is below ``tol``.  Exact mode needs ``w_0 = 0`` and
    integer weights, and returns Fractions over the full support ``1..n``.
    """
    if n < 1:
        raise GibbsError("n must be at least 1")
    _check_hypothesis(model, force)
    if exact:
        return exact_Nn_pmfs(model, n, force=force)[n]
    return _nn_pmf_float(model, n, tol)[0]


def exact_Nn_pmfs(model: WeightModel, nmax: int, force: bool = False) -> list[Distribution | None]:
    """Exact laws of ``N_n`` for every ``1 <= n <= nmax`` from one table."""
    _check_hypothesis(model, force)
    if model.raw is None:
        raise GibbsError(f"{model.name} has no exact weights")
    if model.raw(1)[0] != 0:
        raise GibbsError("exact mode needs w_0 = 0 (finite support of N_n)")
    rows = _exact_rows(model, nmax, nmax)
    out: list[Distribution | None] = [None]
    for n in range(1, nmax + 1):
        weights = [model.v(k) * rows[k][n] for k in range(n + 1)]
        out.append(Distribution.from_weights(weights, exact=True, n=n, model=model.name, k_cut=n, omitted_bound=0))
    return out


def u_series(model: WeightModel, T: int) -> ps.PowerSeries:
    """``U(z) = V(W(z))`` on raw weights, by series composition."""
    w = model.raw(T)
    if model.vkind == GEOMETRIC:
        V = ps.series([0] + [1] * T)
    else:
        V = ps.series([0] + [model.v(k) for k in range(1, T + 1)])
    return ps.substitute(V, w, T)


def u_coefficients(model: WeightModel, T: int) -> list[int]:
    """``u_n = sum_k v_k w^{(k)}_n`` from the convolution table."""
    rows = _exact_rows(model, T, T)
    return [sum(model.v(k) * rows[k][n] for k in range(T + 1)) for n in range(T + 1)]


# -- sampling --------------------------------------------------------------------


def _draw(weights: np.ndarray, rng: np.random.Generator) -> int:
    c = np.cumsum(weights)
    total = c[-1]
    if not total > 0:
        raise ZeroProbabilityError("nothing to draw from")
    i = int(np.searchsorted(c, rng.random() * total, side="right"))
    return min(i, len(weights) - 1)


class GibbsSampler:
    """Exact sampler for the Gibbs partition of a fixed ``n``.

    ``N`` is drawn from the exact component-count law; the sizes given ``N``
    are drawn backwards through the convolution table, so no rejection is
    needed however strongly the mass condenses.
    """

    def __init__(self, model: WeightModel, n: int, tol: float = KCUT_TOL, force: bool = False):
        _check_hypothesis(model, force)
        self.model = model
        self.n = n
        self.pmf, self.table = _nn_pmf_float(model, n, tol)
        self.p = _xpmf(model, n)
        self._cdf = np.cumsum(self.pmf.as_array())
        self._lock = threading.Lock()

    def _ensure_rows(self, k: int) -> ConvTable:
        t = self.table
        if k <= t.k_max:
            return t
        with self._lock:
            t = self.table
            if k <= t.k_max:
                return t
            rows, logs = list(t.rows), list(t.log_scale)
            for _ in range(t.k_max, k):
                r, lg = _next_row(rows[-1], logs[-1], self.p, self.n)
                rows.append(r)
                logs.append(lg)
            self.table = ConvTable(self.model, self.n, k, rows=np.array(rows), log_scale=np.array(logs))
            return self.table

    def conditioned(self, k: int, rng: np.random.Generator) -> tuple[int, ...]:
        if k < 1:
            raise GibbsError("need at least one component")
        rows = self._ensure_rows(k).rows
        if rows[k, self.n] <= 0:
            raise ZeroProbabilityError(f"P(S_{k} = {self.n}) = 0")
        p = self.p
        m = self.n
        out = [0] * k
        for i in range(k, 1, -1):
            w = p[: m + 1] * rows[i - 1, m::-1]
            x = _draw(w, rng)
            out[i - 1] = x
            m -= x
        out[0] = m
        return tuple(out)

    def draw_N(self, rng: np.random.Generator) -> int:
        i = int(np.searchsorted(self._cdf, rng.random() * self._cdf[-1], side="right"))
        return min(i, len(self._cdf) - 1)

    def sample(self, rng: np.random.Generator) -> GibbsSample:
        return GibbsSample(self.n, self.conditioned(self.draw_N(rng), rng))


@lru_cache(maxsize=64)
def gibbs_sampler(model: WeightModel, n: int, force: bool = False) -> GibbsSampler:
    return GibbsSampler(model, n, force=force)


def sample_conditioned(model: WeightModel, n: int, k: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Sizes ``(X_1..X_k)`` given ``X_1 + ... + X_k = n``."""
    return gibbs_sampler(model, n, force=not model.in_hypothesis).conditioned(k, rng)


def sample_gibbs(model: WeightModel, n: int, rng: np.random.Generator) -> GibbsSample:
    return gibbs_sampler(model, n).sample(rng)



def largest_part_cdf(model: WeightModel, n: int, m: int, force: bool = False) -> float:
    """``P(K_(1) < m)`` from convolutions of the weights truncated below ``m``."""
    _check_hypothesis(model, force)
    sampler = gibbs_sampler(model, n, force=force)
    q = sampler.p.copy()
    q[max(m, 0):] = 0.0
    table = sampler.table
    rows, logs = _float_rows(q, n, table.k_max)
    total = 0.0
    for k, pk in enumerate(sampler.pmf.probs):
        if k and pk and rows[k, n] > 0:
            total += pk * math.exp(math.log(rows[k, n]) + logs[k] - table.log_prob(k, n))
    return min(total, 1.0)

# -- composition operators -------------------------------------------------------


def delete_first_max(sizes: Sequence[int]) -> tuple[int, ...]:
    """Drop the earliest occurrence of the maximum."""
    if len(sizes) == 0:
        raise GibbsError("cannot delete from an empty tuple")
    j = max(range(len(sizes)), key=lambda i: (sizes[i], -i))
    return tuple(sizes[:j]) + tuple(sizes[j + 1 :])


def count_in_set(sizes: Iterable[int], A) -> int:
    """Number of components whose size lies in ``A``."""
    return sum(1 for s in sizes if s in A)


# -- exact law of tau(X_1..X_k | S_k = n) ----------------------------------------


@dataclass(frozen=True)
class TauLaw:
    n: int
    k: int
    tau: dict = field(repr=False)
    product: dict = field(repr=False)
    tv: object = 0


def compositions(n: int, k: int, allowed: Sequence[bool]) -> Iterator[tuple[int, ...]]:
    """Ordered ``k``-tuples summing to ``n`` whose parts are all ``allowed``."""
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(n + 1):
        if allowed[first]:
            for rest in compositions(n - first, k - 1, allowed):
                yield (first,) + rest


def _exact_x_weights(model: WeightModel, n: int):
    if model.raw is not None and model.rho_exact is not None:
        raw = model.raw(n)
        return [Fraction(raw[l]) * model.rho_exact**l for l in range(n + 1)]
    return [float(w) for w in model.wbar.coeffs[: n + 1]]


def exact_tau_law(model: WeightModel, n: int, k: int, budget: int = TAU_BUDGET) -> TauLaw:
    """Exact law of ``tau(X_1..X_k)`` given ``S_k = n`` next to i.i.d. ``(X | X <= n)``."""
    if k < 1 or n < 0:
        raise GibbsError("need k >= 1 and n >= 0")
    w = _exact_x_weights(model, n)
    allowed = [bool(x) for x in w]
    support = [l for l in range(n + 1) if allowed[l]]
    cost = math.comb(n + k - 1, k - 1) + len(support) ** (k - 1)
    if cost > budget:
        raise BudgetExceededError(f"enumeration of {cost} tuples exceeds budget {budget}")
    tau: dict = {}
    total = 0
    for comp in compositions(n, k, allowed):
        weight = math.prod(w[c] for c in comp) if comp else 1
        key = delete_first_max(comp)
        tau[key] = tau.get(key, 0) + weight
        total += weight
    if not total:
        raise ZeroProbabilityError(f"P(S_{k} = {n}) = 0")
    tau = {key: val / total for key, val in tau.items()}
    z = sum(w[l] for l in support)
    prod_law = {}
    for vec in product(support, repeat=k - 1):
        prod_law[vec] = math.prod(w[l] / z for l in vec) if vec else 1
    keys = set(tau) | set(prod_law)
    tv = sum(abs(tau.get(x, 0) - prod_law.get(x, 0)) for x in keys) / 2
    return TauLaw(n, k, tau, prod_law, tv)
