"""Lattice walks in the cube and the plane: exact return counts, oracles, samplers."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from . import series as ps
from .distribution import Distribution
from .models import central_multinomials, cube_model, get_model, total_series

CUBE = ((-1, 0, 0), (0, -1, 0), (0, 0, -1))
DELANNOY = CUBE + ((-1, -1, -1),)
DELANNOY_FACE = ((-1, -1, 0), (0, -1, -1), (-1, 0, -1), (-1, -1, -1))
CUBE4 = ((-1, 0, 0), (0, -1, 0), (-1, 0, -1), (0, -1, -1))
KREWERAS = ((-1, 0), (0, -1), (1, 1))
LAZY_KREWERAS = KREWERAS + ((0, 0),)
BRIDGE = ((-1, 0), (0, -1))


def diagonal_steps(m: int) -> tuple[tuple[int, ...], ...]:
    """The ``2^m`` steps ``(+-1, ..., +-1)`` in a fixed order."""
    return tuple(product((-1, 1), repeat=m))


ALPHABETS = {
    "cube": CUBE,
    "delannoy": DELANNOY,
    "delannoy-face": DELANNOY_FACE,
    "cube4": CUBE4,
    "kreweras": KREWERAS,
    "lazy-kreweras": LAZY_KREWERAS,
    "bridge": BRIDGE,
}

#: Alphabets whose walks must stay in the non-negative orthant.
MONOTONE = {"cube", "delannoy", "delannoy-face", "cube4", "bridge"}

#: Largest cube side the path-by-path DFS oracle accepts (a_5 = 756756 paths).
DFS_MAX_N = 5


class WalkError(ValueError):
    pass


def alphabet(name: str) -> tuple[tuple[int, ...], ...]:
    if name in ALPHABETS:
        return ALPHABETS[name]
    if name.startswith("diagonal"):
        return diagonal_steps(int(name[len("diagonal") :]))
    raise WalkError(f"unknown alphabet {name!r}")


@dataclass(frozen=True)
class LatticePath:
    alphabet: str
    start: tuple[int, ...]
    steps: tuple[int, ...]

    def __post_init__(self):
        steps = alphabet(self.alphabet)
        if len(steps[0]) != len(self.start):
            raise WalkError("start point has the wrong dimension")
        if any(not 0 <= s < len(steps) for s in self.steps):
            raise WalkError(f"step index outside alphabet {self.alphabet}")
        if self.alphabet in MONOTONE and any(min(p) < 0 for p in self.points()):
            raise WalkError("monotone walk left the non-negative orthant")

    @property
    def dim(self) -> int:
        return len(self.start)

    def vectors(self) -> list[tuple[int, ...]]:
        steps = alphabet(self.alphabet)
        return [steps[s] for s in self.steps]

    def points(self) -> list[tuple[int, ...]]:
        steps = alphabet(self.alphabet)
        p = list(self.start)
        out = [tuple(p)]
        for s in self.steps:
            p = [a + b for a, b in zip(p, steps[s])]
            out.append(tuple(p))
        return out

    @property
    def end(self) -> tuple[int, ...]:
        return self.points()[-1]

    def __len__(self) -> int:
        return len(self.steps)


def on_diagonal(p: Sequence[int]) -> bool:
    return all(c == p[0] for c in p)


def is_origin(p: Sequence[int]) -> bool:
    return not any(p)


def returns(path: LatticePath, hit=None) -> int:
    """Visits to the diagonal (monotone walks) or origin (others), after time 0."""
    if hit is None:
        hit = on_diagonal if path.alphabet in MONOTONE else is_origin
    return sum(1 for p in path.points()[1:] if hit(p))


def return_times(path: LatticePath, hit=None) -> list[int]:
    if hit is None:
        hit = on_diagonal if path.alphabet in MONOTONE else is_origin
    return [t for t, p in enumerate(path.points()) if t and hit(p)]


@dataclass(frozen=True)
class ReturnProfile:
    """``counts[j-1]`` paths of size ``n`` with exactly ``j`` returns."""

    n: int
    counts: tuple[int, ...]
    total: int

    def __post_init__(self):
        if sum(self.counts) != self.total and self.n > 0:
            raise WalkError(f"profile counts do not sum to total at n={self.n}")

    def count(self, j: int) -> int:
        return self.counts[j - 1] if 1 <= j <= len(self.counts) else 0

    def distribution(self) -> Distribution:
        if self.n == 0:
            return Distribution((Fraction(1),), exact=True, meta={"n": 0})
        return Distribution.from_weights([0, *self.counts], exact=True, n=self.n)

    def rows(self) -> list[tuple]:
        if self.n == 0:
            return [(0, "", "", self.total)]
        return [(self.n, j, c, self.total) for j, c in enumerate(self.counts, 1)]


def profiles_csv(profiles: Sequence[ReturnProfile]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "j", "a_nj", "total"])
    for prof in profiles:
        for row in prof.rows():
            w.writerow([str(x) for x in row])
    return buf.getvalue()


# -- exact enumeration ----------------------------------------------------------


@lru_cache(maxsize=8)
def cube_return_profiles(nmax: int) -> tuple[ReturnProfile, ...]:
    """Profiles for ``n = 0..nmax`` from the first-return recurrences.

    ``a_{n,1}`` comes from ``a_n = sum_{k<n} a_k a_{n-k,1}`` and
    ``a_{n,j} = sum_k a_{k,j-1} a_{n-k,1}``, with plain integer arithmetic.
    """
    if nmax < 1:
        return (ReturnProfile(0, (), 1),)
    a = central_multinomials(nmax)
    first = [0] * (nmax + 1)
    for n in range(1, nmax + 1):
        first[n] = a[n] - sum(a[k] * first[n - k] for k in range(1, n))
    table = [[0] * (nmax + 1) for _ in range(nmax + 1)]  # table[j][n]
    table[1] = first[:]
    for j in range(2, nmax + 1):
        prev = table[j - 1]
        row = table[j]
        for n in range(j, nmax + 1):
            row[n] = sum(prev[k] * first[n - k] for k in range(j - 1, n))
    out = [ReturnProfile(0, (), 1)]
    for n in range(1, nmax + 1):
        out.append(ReturnProfile(n, tuple(table[j][n] for j in range(1, n + 1)), a[n]))
    return tuple(out)


def cube_return_profile(n: int) -> ReturnProfile:
    return cube_return_profiles(n)[n]


def return_profiles(name: str, nmax: int) -> list[ReturnProfile]:
    """Profiles for any registry model: ``count_j = v_j [z^n] W(z)^j``."""
    model = get_model(name, max(nmax, 1))
    total = total_series(name, nmax)
    W = ps.one(nmax) - ps.reciprocal(total, nmax)
    pows = ps.powers(W, nmax, nmax)
    out = [ReturnProfile(0, (), 1)]
    for n in range(1, nmax + 1):
        counts = tuple(model.v(j) * pows[j][n] for j in range(1, n + 1))
        out.append(ReturnProfile(n, counts, sum(counts)))
    return out


def _dfs_profile(start: tuple[int, ...], steps) -> dict[int, int]:
    hist: dict[int, int] = {}

    def walk(x, y, z, r):
        if x == 0 and y == 0 and z == 0:
            hist[r] = hist.get(r, 0) + 1
            return
        for dx, dy, dz in steps:
            nx, ny, nz = x + dx, y + dy, z + dz
            if nx >= 0 and ny >= 0 and nz >= 0:
                walk(nx, ny, nz, r + (nx == ny == nz))

    walk(*start, 0)
    return hist


def brute_force_profile(n: int, alphabet_name: str = "cube", max_n: int = DFS_MAX_N) -> ReturnProfile:
    """Walk every path from ``(n,n,n)`` and histogram its diagonal returns."""
    if n > max_n:
        raise WalkError(f"DFS oracle limited to n <= {max_n}")
    if n == 0:
        return ReturnProfile(0, (), 1)
    hist = _dfs_profile((n, n, n), alphabet(alphabet_name))
    top = max(hist)
    counts = tuple(hist.get(j, 0) for j in range(1, max(top, n) + 1))
    return ReturnProfile(n, counts[: max(n, top)], sum(hist.values()))


def iter_paths(alphabet_name: str, start: Sequence[int], length: int | None = None) -> Iterator[LatticePath]:
    """All monotone paths from ``start`` to the origin (or all walks of ``length``
    from ``start`` back to ``start`` for unrestricted alphabets)."""
    steps = alphabet(alphabet_name)
    start = tuple(start)
    monotone = alphabet_name in MONOTONE
    target = tuple(0 for _ in start) if monotone else start

    def rec(p, acc, left):
        if monotone:
            if p == target:
                yield LatticePath(alphabet_name, start, tuple(acc))
                return
        elif left == 0:
            if p == target:
                yield LatticePath(alphabet_name, start, tuple(acc))
            return
        for i, s in enumerate(steps):
            q = tuple(a + b for a, b in zip(p, s))
            if monotone and min(q) < 0:
                continue
            acc.append(i)
            yield from rec(q, acc, None if left is None else left - 1)
            acc.pop()

    if not monotone and length is None:
        raise WalkError("unrestricted walks need a length")
    yield from rec(start, [], length)


# -- return-count laws -------------------------------------------------------------


def _scheme_pmf(total: ps.PowerSeries, n: int, v=lambda j: 1) -> Distribution:
    W = ps.one(n) - ps.reciprocal(total, n)
    pows = ps.powers(W, n, n)
    weights = [0] + [v(j) * pows[j][n] for j in range(1, n + 1)]
    if n == 0:
        return Distribution((Fraction(1),), exact=True)
    return Distribution.from_weights(weights, exact=True, n=n)


def delannoy_return_pmf(n: int, face: bool = False) -> Distribution:
    """``P(N = j) = [z^n] (1 - 1/D)^j / d_n``."""
    return _scheme_pmf(total_series("delannoy-face" if face else "delannoy", n), n)


def bridges_return_pmf(m: int, n: int) -> Distribution:
    """Simultaneous returns of ``m`` Dyck bridges of length ``2n``."""
    return _scheme_pmf(total_series(f"bridges-m{m}", n), n)


def first_return_pmf(n: int) -> tuple[Distribution, Distribution]:
    """Law of the cube side ``k`` left after the first return, and of ``n - k``."""
    if n < 1:
        raise WalkError("n must be at least 1")
    prof = cube_return_profiles(n)
    a = central_multinomials(n)
    first = [0] + [prof[l].count(1) for l in range(1, n + 1)]
    probs = [Fraction(first[n - k] * a[k], a[n]) for k in range(n)]
    rev = [Fraction(0)] * (n + 1)
    for k, p in enumerate(probs):
        rev[n - k] = p
    return (
        Distribution(tuple(probs), exact=True, meta={"n": n}),
        Distribution(tuple(rev), exact=True, meta={"n": n, "reversed": True}),
    )


# -- sampling -------------------------------------------------------------------------


def sample_cube_path(n: int, rng: np.random.Generator, start: Sequence[int] | None = None):
    """Uniform monotone path via the sampling-without-replacement urn.

    Returns the path and the times at which all three counts agree.
    """
    counts = list(start) if start is not None else [n, n, n]
    begin = tuple(counts)
    total = sum(counts)
    u = rng.random(total)
    steps = []
    times = []
    for t in range(total):
        x = u[t] * (total - t)
        i = 0 if x < counts[0] else (1 if x < counts[0] + counts[1] else 2)
        counts[i] -= 1
        steps.append(i)
        if counts[0] == counts[1] == counts[2]:
            times.append(t + 1)
    return LatticePath("cube", begin, tuple(steps)), times


@lru_cache(maxsize=32)
def _cube_nn_pmf(n: int) -> Distribution:
    from .gibbs import exact_Nn_pmf

    return exact_Nn_pmf(cube_model(max(n, 1)), n)


def card_game_thinning(n: int, rng: np.random.Generator, N: int | None = None) -> int:
    """Pure-luck guesses ``C^(3,3) = Binomial(N_n, 1/3)``."""
    if N is None:
        N = int(_cube_nn_pmf(n).sample(rng))
    return int(rng.binomial(N, 1 / 3))


def card_c33_pmf(n: int) -> Distribution:
    """Exact law of ``C^(3,3)`` by thinning the exact law of ``N_n``."""
    nn = cube_return_profile(n).distribution()
    third = Fraction(1, 3)
    out = [Fraction(0)] * len(nn)
    for k, pk in enumerate(nn.probs):
        if pk:
            for c in range(k + 1):
                out[c] += pk * math.comb(k, c) * third**c * (1 - third) ** (k - c)
    return Distribution(tuple(out), exact=True, meta={"n": n})


def play_card_game(n: int, rng: np.random.Generator) -> tuple[int, int]:
    """Play the three-suit guessing game with an optimal guesser.

    Returns ``(pure-luck correct guesses, all correct guesses)``; a guess is
    pure luck when all three suits are present in equal numbers.
    """
    path, _ = sample_cube_path(n, rng)
    counts = [n, n, n]
    luck = correct = 0
    for card in path.steps:
        top = max(counts)
        tied = [i for i in range(3) if counts[i] == top]
        guess = tied[int(rng.integers(len(tied)))]
        hit = guess == card
        correct += hit
        if len(tied) == 3:
            luck += hit
        counts[card] -= 1
    return luck, correct
