"""Probability mass functions on the non-negative integers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy import stats


@dataclass(frozen=True, eq=False)
class Distribution:
    """``probs[k] = P(value == k)``; exact distributions hold Fractions."""

    probs: tuple
    exact: bool = False
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_weights(cls, weights: Sequence, exact: bool | None = None, **meta) -> Distribution:
        if exact is None:
            exact = all(isinstance(w, (int, Fraction)) for w in weights)
        if exact:
            total = sum(weights)
            if total == 0:
                raise ZeroDivisionError("all weights are zero")
            probs = tuple(Fraction(w) / total for w in weights)
        else:
            w = np.asarray(weights, dtype=float)
            total = w.sum()
            if not total > 0:
                raise ZeroDivisionError("all weights are zero")
            probs = tuple((w / total).tolist())
        return cls(probs, exact, dict(meta))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int] | Sequence[int], **meta) -> Distribution:
        if isinstance(counts, Mapping):
            top = max(counts) if counts else 0
            counts = [counts.get(k, 0) for k in range(top + 1)]
        return cls.from_weights(list(counts), exact=False, **meta)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, k: int):
        if 0 <= k < len(self.probs):
            return self.probs[k]
        return Fraction(0) if self.exact else 0.0

    def support(self) -> list[int]:
        return [k for k, p in enumerate(self.probs) if p]

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def total(self):
        return sum(self.probs)

    def moment(self, q: float, scale=1):
        """``E[(scale * V)^q]``; exact when both the pmf and ``scale`` are."""
        if self.exact and isinstance(q, int) and isinstance(scale, (int, Fraction)):
            return sum(p * (scale * k) ** q for k, p in enumerate(self.probs) if p)
        a = self.as_array()
        k = np.arange(len(a), dtype=float) * float(scale)
        return float(np.sum(a * k**q)) if q else float(a.sum())

    def mean(self):
        return self.moment(1)

    def variance(self):
        return self.moment(2) - self.mean() ** 2

    def tv(self, other: Distribution):
        """Total variation distance ``(1/2) sum |p - q|``."""
        n = max(len(self), len(other))
        if self.exact and other.exact:
            return sum(abs(self[k] - other[k]) for k in range(n)) / 2
        return 0.5 * sum(abs(float(self[k]) - float(other[k])) for k in range(n))

    def sample(self, rng: np.random.Generator, size=None):
        return rng.choice(len(self.probs), p=self.as_array() / self.as_array().sum(), size=size)


def tv_distance(p: Mapping, q: Mapping):
    """TV distance between two pmfs keyed by arbitrary hashable outcomes."""
    keys = set(p) | set(q)
    return sum(abs(p.get(k, 0) - q.get(k, 0)) for k in keys) / 2


def chi2_test(observed: Sequence[int], probs: Sequence, min_expected: float = 5.0):
    """Pearson chi-square of counts against a pmf, pooling sparse cells.

    Cells are merged from the right until each has expected count at least
    ``min_expected``.  Returns ``(statistic, p_value, dof)``.
    """
    probs = np.array([float(p) for p in probs])
    size = max(len(observed), len(probs))
    obs = np.zeros(size)
    obs[: len(observed)] = observed
    exp_p = np.zeros(size)
    exp_p[: len(probs)] = probs
    total = obs.sum()
    exp = exp_p * total
    if obs[exp == 0].sum() > 0:
        return float("inf"), 0.0, 0
    keep = exp > 0
    obs, exp = obs[keep], exp[keep]
    bins_o, bins_e = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        if bins_e:
            bins_o[-1] += acc_o
            bins_e[-1] += acc_e
        else:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
    if len(bins_e) < 2:
        return 0.0, 1.0, 0
    bins_e = np.array(bins_e)
    bins_e *= total / bins_e.sum()
    stat, pval = stats.chisquare(bins_o, bins_e)
    return float(stat), float(pval), len(bins_e) - 1
