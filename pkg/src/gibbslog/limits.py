"""Finite-n checks of the Gamma, condensation and Cox-process limits.

Convergence is on a log scale, so every check reports a trend over an
n-grid next to a generous absolute band rather than a tight tolerance.
``P(X > n)`` is always the exact tail of the truncated model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

from .distribution import Distribution
from .gibbs import (
    GibbsSample,
    OutOfHypothesisError,
    delete_first_max,
    exact_Nn_pmf,
    exact_tau_law,
    gibbs_sampler,
)
from .models import WeightModel, x_law
from .replicates import map_replicates
from .walks import card_c33_pmf, card_game_thinning


class LimitError(ValueError):
    pass


def _require_hypothesis(model: WeightModel, force: bool):
    if not model.in_hypothesis and not force:
        raise OutOfHypothesisError(f"{model.name} is outside the logarithmic regime")


def _jsonable(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


# -- reports ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrendPoint:
    n: int
    value: float
    reference: float
    deviation: float
    k: int | None = None

    def as_dict(self) -> dict:
        d = {"n": self.n, "value": _jsonable(self.value), "reference": _jsonable(self.reference),
             "deviation": _jsonable(self.deviation)}
        if self.k is not None:
            d["k"] = self.k
        if isinstance(self.value, Fraction):
            d["exact"] = str(self.value)
        return d


@dataclass
class TrendReport:
    statistic: str
    model: str
    grid: list[TrendPoint]
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = [(p.n, -1 if p.k is None else p.k) for p in self.grid]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise LimitError("trend grid must be strictly increasing")

    def at(self, n: int, k: int | None = None) -> TrendPoint:
        for p in self.grid:
            if p.n == n and p.k == k:
                return p
        raise KeyError((n, k))

    def shrinks(self) -> bool:
        """Deviation at the largest n is below that at the smallest."""
        return len(self.grid) >= 2 and abs(self.grid[-1].deviation) < abs(self.grid[0].deviation)

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "model": self.model,
            "grid": [p.as_dict() for p in self.grid],
            "seed": self.seed,
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


# -- Gamma limit -------------------------------------------------------------------------


def gamma_pdf_moments(alpha: float) -> tuple[Callable[[np.ndarray], np.ndarray], Callable[[float], float]]:
    """Density and moment function of ``Gamma(alpha + 1, 1)``."""
    if alpha <= -1:
        raise LimitError("alpha must exceed -1")
    lg = special.gammaln(alpha + 1)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(alpha * np.log(x[pos]) - x[pos] - lg)
        if alpha == 0:
            out[x == 0] = 1.0
        return out

    def moment(q: float) -> float:
        return float(np.exp(special.gammaln(q + alpha + 1) - lg))

    return pdf, moment


def tail_at(model: WeightModel, n: int) -> float:
    """Exact ``P(X > n)`` of the truncated model."""
    return float(x_law(model, n).tail[n])


@dataclass(frozen=True)
class LocalRatios:
    n: int
    p_n: float
    k: np.ndarray
    ratio: np.ndarray

    @property
    def sup_deviation(self) -> float:
        return float(np.max(np.abs(self.ratio - 1))) if len(self.ratio) else math.nan


def local_limit_ratios(model: WeightModel, n: int, x_range=(0.5, 4.0), force: bool = False) -> LocalRatios:
    """``P(N_n = k) / (p_n x^a e^-x / Gamma(a+1))`` for ``x = k p_n`` in ``x_range``."""
    _require_hypothesis(model, force)
    pmf = exact_Nn_pmf(model, n, force=force)
    p = tail_at(model, n)
    pdf, _ = gamma_pdf_moments(model.alpha)
    lo, hi = x_range
    ks = np.arange(max(1, math.ceil(lo / p)), math.floor(hi / p) + 1)
    if len(ks) == 0:
        raise LimitError(f"no integer k with k*P(X>n) in {x_range} at n={n}")
    exact = np.array([float(pmf[k]) for k in ks])
    return LocalRatios(n, p, ks, exact / (p * pdf(ks * p)))


def local_limit_check(model: WeightModel, ns: Sequence[int], force: bool = False) -> TrendReport:
    """Sup-norm deviation of the local-limit ratios over an n-grid."""
    grid, extra = [], {}
    for n in ns:
        r = local_limit_ratios(model, n, force=force)
        grid.append(TrendPoint(n, r.sup_deviation, 0.0, r.sup_deviation))
        extra[str(n)] = {"min_ratio": float(r.ratio.min()), "max_ratio": float(r.ratio.max()),
                         "k_min": int(r.k[0]), "k_max": int(r.k[-1]), "p_n": r.p_n}
    return TrendReport("local-limit-sup-deviation", model.name, grid, extra=extra)


def moment_check(model: WeightModel, ns: Sequence[int], q: float = 1, force: bool = False) -> TrendReport:
    """``E[(N_n P(X>n))^q]`` against ``Gamma(q+a+1)/Gamma(a+1)``."""
    _require_hypothesis(model, force)
    _, mom = gamma_pdf_moments(model.alpha)
    ref = mom(q)
    grid = []
    for n in ns:
        val = exact_Nn_pmf(model, n, force=force).moment(q, scale=tail_at(model, n))
        grid.append(TrendPoint(n, val, ref, val - ref))
    return TrendReport(f"moment-q{q:g}", model.name, grid)


# -- condensation ------------------------------------------------------------------------


def sample_many(model: WeightModel, n: int, reps: int, seed: int, threads: int = 1, force: bool = False) -> list[GibbsSample]:
    _require_hypothesis(model, force)
    sampler = gibbs_sampler(model, n, force=force)
    return map_replicates(lambda _, rng: sampler.sample(rng), reps, seed, threads)


def top_two(sample: GibbsSample) -> tuple[int, int]:
    r = sample.ranked()
    return r[0], (r[1] if len(r) > 1 else 0)


def condensation_stats(samples: Sequence[GibbsSample], quantiles=(0.1, 0.5, 0.9)) -> dict:
    """Empirical quantiles of ``K_(1)/n`` and ``K_(2)/n``."""
    if not samples:
        raise LimitError("no samples")
    k1 = np.array([top_two(s)[0] / s.n for s in samples])
    k2 = np.array([top_two(s)[1] / s.n for s in samples])
    return {
        "reps": len(samples),
        "K1": {f"q{q:g}": float(np.quantile(k1, q)) for q in quantiles},
        "K2": {f"q{q:g}": float(np.quantile(k2, q)) for q in quantiles},
        "K1_mean": float(k1.mean()),
        "K2_mean": float(k2.mean()),
    }


def condensation_trend(model: WeightModel, ns: Sequence[int], reps: int, seed: int, threads: int = 1) -> tuple[TrendReport, TrendReport]:
    """Median ``K_(1)/n`` (reference 1) and median ``K_(2)/n`` (reference 0)."""
    g1, g2 = [], []
    for n in ns:
        st = condensation_stats(sample_many(model, n, reps, seed, threads))
        m1, m2 = st["K1"]["q0.5"], st["K2"]["q0.5"]
        g1.append(TrendPoint(n, m1, 1.0, m1 - 1.0))
        g2.append(TrendPoint(n, m2, 0.0, m2))
    return (TrendReport("median-K1/n", model.name, g1, seed, {"reps": reps}),
            TrendReport("median-K2/n", model.name, g2, seed, {"reps": reps}))


# -- point process -------------------------------------------------------------------------


def lambda_mass(gamma: float, a: float, b: float) -> float:
    """``a^-gamma - b^-gamma``."""
    if not 0 < a < b <= 1:
        raise LimitError("need 0 < a < b <= 1")
    return a ** -gamma - b ** -gamma


def point_process_extract(sample: GibbsSample | Sequence[int], n: int | None = None) -> list[float]:
    """``log K / log n`` over the components left by ``tau`` with ``K > 1``."""
    sizes = sample.sizes if isinstance(sample, GibbsSample) else tuple(sample)
    n = sample.n if n is None and isinstance(sample, GibbsSample) else n
    if n is None or n < 2:
        raise LimitError("need n >= 2")
    if not sizes:
        return []
    ln = math.log(n)
    return sorted(math.log(k) / ln for k in delete_first_max(sizes) if k > 1)


@dataclass(frozen=True)
class BinStat:
    a: float
    b: float
    mean: float
    variance: float
    reference_mean: float
    reference_variance: float
    finite_n_mean: float | None = None

    @property
    def dispersion(self) -> float:
        return self.variance / self.mean if self.mean > 0 else math.nan

    @property
    def relative_error(self) -> float:
        return self.mean / self.reference_mean - 1


@dataclass
class CoxReport:
    model: str
    n: int
    reps: int
    seed: int
    bins: list[BinStat]

    def as_dict(self) -> dict:
        return {
            "statistic": "cox-bin-counts",
            "model": self.model,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "bins": [dict(b.__dict__, dispersion=b.dispersion) for b in self.bins],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def cox_intensity_check(
    model: WeightModel,
    n: int,
    reps: int,
    bins: Sequence[tuple[float, float]] = ((0.3, 0.8),),
    seed: int = 0,
    threads: int = 1,
    force: bool = False,
) -> CoxReport:
    """Bin counts of the extracted points against the Cox mean and variance.

    With ``Z ~ Gamma(a+1, 1)`` the count in ``[s, t]`` has mean
    ``(a+1) L`` and variance ``(a+1) L + (a+1) L^2`` where ``L = Lambda([s, t])``.
    """
    samples = sample_many(model, n, reps, seed, threads, force)
    counts = np.zeros((len(bins), reps))
    for r, s in enumerate(samples):
        pts = np.array(point_process_extract(s))
        for i, (a, b) in enumerate(bins):
            counts[i, r] = np.count_nonzero((pts >= a) & (pts <= b)) if len(pts) else 0
    ez = model.alpha + 1
    out = []
    for i, (a, b) in enumerate(bins):
        lam = lambda_mass(model.gamma, a, b)
        out.append(BinStat(a, b, float(counts[i].mean()), float(counts[i].var(ddof=1)),
                           ez * lam, ez * lam + ez * lam**2, expected_count_in_range(model, n, a, b)))
    return CoxReport(model.name, n, reps, seed, out)


def expected_count_in_range(model: WeightModel, n: int, a: float, b: float) -> float:
    """Exact ``E #{i : n^a <= K_i <= n^b}`` over all components at finite ``n``.

    Includes the largest component, which lies in the range with negligible
    probability once ``b < 1``; used as the finite-n reference for the bins.
    """
    sampler = gibbs_sampler(model, n, force=not model.in_hypothesis)
    lo, hi = math.ceil(n**a - 1e-9), math.floor(n**b + 1e-9)
    p = sampler.p
    table = sampler.table
    total = 0.0
    for k, pk in enumerate(sampler.pmf.probs):
        if not pk or k == 0:
            continue
        prev, cur = table.row(k - 1), table.row(k)[n]
        hit = sum(p[l] * prev[n - l] for l in range(lo, hi + 1))
        total += pk * k * hit / cur
    return float(total)


# -- gamma index ----------------------------------------------------------------------------


def gamma_estimate(model: WeightModel, n: int, force: bool = False) -> float:
    """``log(P(X > floor(sqrt n)) / P(X > n)) / log 2`` from the exact tail."""
    _require_hypothesis(model, force)
    if n < 4:
        raise LimitError("need n >= 4")
    tail = x_law(model, n).tail
    lo, hi = tail[math.isqrt(n)], tail[n]
    if not (lo > 0 and hi > 0):
        raise LimitError("tail vanished; cannot estimate gamma")
    return math.log(lo / hi) / math.log(2)



def gamma_estimate_offset(model: WeightModel, n: int, force: bool = False) -> tuple[float, float]:
    """Diagnostic ``(b, gamma)`` fitting ``P(X > m) = c / (log m + b)^gamma``.

    Uses the exact tail at ``n^(1/4)``, ``sqrt n`` and ``n``.  A constant
    offset ``b`` biases :func:`gamma_estimate` for a long way; this fit
    removes it.  Not a replacement for the two-point estimator.
    """
    _require_hypothesis(model, force)
    if n < 256:
        raise LimitError("need n >= 256")
    tail = x_law(model, n).tail
    m1, m2 = round(n**0.25), math.isqrt(n)
    l1, l2, l3 = math.log(m1), math.log(m2), math.log(n)
    r1 = math.log(tail[m1] / tail[m2])
    r2 = math.log(tail[m2] / tail[n])

    def f(b):
        return r2 / r1 - math.log((l3 + b) / (l2 + b)) / math.log((l2 + b) / (l1 + b))

    grid = np.linspace(-l1 + 1e-6, 10 * l3 + 100, 4001)
    vals = np.array([f(b) for b in grid])
    hits = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(hits) == 0:
        raise LimitError("no offset fits the three tail points")
    b = optimize.brentq(f, grid[hits[0]], grid[hits[0] + 1])
    return b, r2 / math.log((l3 + b) / (l2 + b))

# -- total variation after deleting the maximum ---------------------------------------------


def tv_condensation_report(model: WeightModel, grid: Sequence[tuple[int, int]]) -> TrendReport:
    """Exact TV between ``tau(X | S_k = n)`` and i.i.d. ``(X | X <= n)``."""
    points = []
    for n, k in sorted(grid):
        tv = exact_tau_law(model, n, k).tv
        points.append(TrendPoint(n, tv, 0, tv, k=k))
    return TrendReport("tv-delete-max", model.name, points)


# -- card guessing ----------------------------------------------------------------------------


def card_expectation_identity(n: int) -> tuple[Fraction, Fraction]:
    """``(E[C^(3,3)], E[N_n] / 3)`` from the exact laws; equal by thinning."""
    from .walks import cube_return_profile

    nn = cube_return_profile(n).distribution()
    return card_c33_pmf(n).mean(), nn.mean() / 3


def card_scaled_mean(model: WeightModel, ns: Sequence[int]) -> TrendReport:
    """``E[C] * 2 sqrt(3) pi / log n`` against the Gamma(2, 1) mean 2."""
    grid = []
    for n in ns:
        val = float(exact_Nn_pmf(model, n).mean()) / 3 * 2 * math.sqrt(3) * math.pi / math.log(n)
        grid.append(TrendPoint(n, val, 2.0, val - 2.0))
    return TrendReport("card-scaled-mean", model.name, grid)


def card_samples(n: int, reps: int, seed: int, threads: int = 1) -> list[int]:
    return map_replicates(lambda _, rng: card_game_thinning(n, rng), reps, seed, threads)


def empirical(values: Sequence[int]) -> Distribution:
    return Distribution.from_counts(np.bincount(np.asarray(values, dtype=int)).tolist())
