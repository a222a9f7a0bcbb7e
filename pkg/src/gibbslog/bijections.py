"""Step-wise bijections between cube walks and planar walks.

All maps relabel steps one at a time, so each is O(length) and inverted by
the inverse relabelling; the inverse recovers the start point from the step
counts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .walks import (
    LatticePath,
    alphabet,
    diagonal_steps,
    is_origin,
    iter_paths,
    on_diagonal,
    returns,
)


class BijectionError(ValueError):
    pass


@dataclass(frozen=True)
class StepMap:
    name: str
    source: str
    target: str
    assignment: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.assignment) != list(range(len(alphabet(self.target)))):
            raise BijectionError(f"{self.name} is not a bijection of step sets")
        if len(self.assignment) != len(alphabet(self.source)):
            raise BijectionError(f"{self.name} does not cover the source alphabet")

    def forward(self, steps: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.assignment[s] for s in steps)

    def backward(self, steps: Sequence[int]) -> tuple[int, ...]:
        inv = {t: s for s, t in enumerate(self.assignment)}
        return tuple(inv[s] for s in steps)


#: (-1,0,0) -> (-1,0), (0,-1,0) -> (0,-1), (0,0,-1) -> (1,1)
PHI = StepMap("phi", "cube", "kreweras", (0, 1, 2))
#: as PHI, plus (-1,-1,-1) -> (0,0)
PSI = StepMap("psi", "delannoy", "lazy-kreweras", (0, 1, 2, 3))


def _require(path: LatticePath, name: str):
    if path.alphabet != name:
        raise BijectionError(f"expected a {name} path, got {path.alphabet}")


def phi(path: LatticePath) -> LatticePath:
    """Cube walk from ``(n1,n2,n3)`` to Kreweras walk from ``(n1-n3, n2-n3)``."""
    _require(path, "cube")
    x, y, z = path.start
    return LatticePath("kreweras", (x - z, y - z), PHI.forward(path.steps))


def phi_inv(path: LatticePath) -> LatticePath:
    _require(path, "kreweras")
    c = Counter(path.steps)
    start = (c[0], c[1], c[2])
    if (start[0] - start[2], start[1] - start[2]) != path.start:
        raise BijectionError("Kreweras walk does not end at the origin")
    return LatticePath("cube", start, PHI.backward(path.steps))


def psi(path: LatticePath) -> LatticePath:
    """Delannoy walk to lazy Kreweras walk; diagonal steps become stays."""
    _require(path, "delannoy")
    x, y, z = path.start
    return LatticePath("lazy-kreweras", (x - z, y - z), PSI.forward(path.steps))


def psi_inv(path: LatticePath) -> LatticePath:
    _require(path, "lazy-kreweras")
    c = Counter(path.steps)
    start = (c[0] + c[3], c[1] + c[3], c[2] + c[3])
    if (start[0] - start[2], start[1] - start[2]) != path.start:
        raise BijectionError("lazy Kreweras walk does not end at the origin")
    return LatticePath("delannoy", start, PSI.backward(path.steps))


def bridges_to_diagonal(bridges: Sequence[LatticePath]) -> LatticePath:
    """``m`` Dyck bridges of length ``2n`` to a walk in Z^m with steps (+-1,..,+-1).

    Each bridge is read from the origin end; an x-step moves its coordinate
    down, a y-step moves it up.
    """
    if not bridges:
        raise BijectionError("need at least one bridge")
    for b in bridges:
        _require(b, "bridge")
    length = len(bridges[0])
    if any(len(b) != length for b in bridges):
        raise BijectionError("bridges must have equal length")
    index = {s: i for i, s in enumerate(diagonal_steps(len(bridges)))}
    steps = []
    for t in range(length - 1, -1, -1):
        signs = tuple(-1 if b.steps[t] == 0 else 1 for b in bridges)
        steps.append(index[signs])
    return LatticePath(f"diagonal{len(bridges)}", (0,) * len(bridges), tuple(steps))


def diagonal_to_bridges(walk: LatticePath) -> list[LatticePath]:
    m = walk.dim
    _require(walk, f"diagonal{m}")
    if not is_origin(walk.start) or not is_origin(walk.end):
        raise BijectionError("diagonal walk must start and end at the origin")
    vecs = walk.vectors()[::-1]
    n = len(vecs) // 2
    return [
        LatticePath("bridge", (n, n), tuple(0 if v[k] == -1 else 1 for v in vecs)) for k in range(m)
    ]


# cube4 step -> (bridge 1 step, bridge 2 step); 0 = x-step, 1 = y-step
_CUBE4_PAIRS = ((0, 0), (1, 0), (0, 1), (1, 1))


def cube4_to_bridge_pair(path: LatticePath) -> tuple[LatticePath, LatticePath]:
    """Walk with steps (-1,0,0), (0,-1,0), (-1,0,-1), (0,-1,-1) to two Dyck bridges.

    Bridge 1 tracks ``(x, y)``; bridge 2 takes an x-step on the first two
    step types, so both sit on their diagonal exactly when ``x = y = z``.
    """
    _require(path, "cube4")
    n = path.start[0]
    if path.start != (n, n, n):
        raise BijectionError("cube4 walk must start at a corner (n,n,n)")
    if path.end != (0, 0, 0):
        raise BijectionError("cube4 walk must end at the origin")
    b1 = tuple(_CUBE4_PAIRS[s][0] for s in path.steps)
    b2 = tuple(_CUBE4_PAIRS[s][1] for s in path.steps)
    return LatticePath("bridge", (n, n), b1), LatticePath("bridge", (n, n), b2)


def bridge_pair_to_cube4(b1: LatticePath, b2: LatticePath) -> LatticePath:
    _require(b1, "bridge")
    _require(b2, "bridge")
    if len(b1) != len(b2) or b1.start != b2.start:
        raise BijectionError("bridges must have equal length")
    if b1.end != (0, 0) or b2.end != (0, 0):
        raise BijectionError("bridges must end at the origin")
    index = {pair: i for i, pair in enumerate(_CUBE4_PAIRS)}
    n = b1.start[0]
    return LatticePath("cube4", (n, n, n), tuple(index[p] for p in zip(b1.steps, b2.steps)))


def simultaneous_returns(bridges: Sequence[LatticePath]) -> int:
    pts = [b.points() for b in bridges]
    return sum(1 for t in range(1, len(pts[0])) if all(on_diagonal(p[t]) for p in pts))


# -- exhaustive checks -----------------------------------------------------------


@dataclass
class BijectionReport:
    map: str
    n: int
    checked: int = 0
    round_trips: int = 0
    returns_preserved: int = 0
    images_valid: int = 0
    distinct_images: int = 0
    target_size: int | None = None

    @property
    def ok(self) -> bool:
        n = self.checked
        return (
            n > 0
            and self.round_trips == n
            and self.returns_preserved == n
            and self.images_valid == n
            and self.distinct_images == n
            and (self.target_size is None or self.target_size == n)
        )

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def _lazy_target_size(n: int) -> int:
    # lazy Kreweras walks closing at the origin with #(1,1) + #stay == n
    total = 0
    for length in range(n, 3 * n + 1):
        for w in iter_paths("lazy-kreweras", (0, 0), length):
            c = Counter(w.steps)
            total += c[2] + c[3] == n
    return total


def check_phi(n: int) -> BijectionReport:
    rep = BijectionReport("phi", n)
    images = set()
    for p in iter_paths("cube", (n, n, n)):
        q = phi(p)
        rep.checked += 1
        rep.round_trips += phi_inv(q) == p
        rep.returns_preserved += returns(p) == returns(q)
        rep.images_valid += q.start == (0, 0) and q.end == (0, 0)
        images.add(q.steps)
    rep.distinct_images = len(images)
    rep.target_size = sum(1 for _ in iter_paths("kreweras", (0, 0), 3 * n))
    return rep


def check_psi(n: int) -> BijectionReport:
    rep = BijectionReport("psi", n)
    images = set()
    for p in iter_paths("delannoy", (n, n, n)):
        q = psi(p)
        rep.checked += 1
        rep.round_trips += psi_inv(q) == p
        rep.returns_preserved += returns(p) == returns(q)
        rep.images_valid += q.start == (0, 0) and q.end == (0, 0)
        images.add(q.steps)
    rep.distinct_images = len(images)
    rep.target_size = _lazy_target_size(n)
    return rep


def check_diagonal(n: int, m: int = 2) -> BijectionReport:
    rep = BijectionReport(f"diag-m{m}", n)
    bridges = list(iter_paths("bridge", (n, n)))
    images = set()
    for tup in product(bridges, repeat=m):
        w = bridges_to_diagonal(tup)
        rep.checked += 1
        rep.round_trips += diagonal_to_bridges(w) == list(tup)
        rep.returns_preserved += simultaneous_returns(tup) == returns(w)
        rep.images_valid += is_origin(w.start) and is_origin(w.end)
        images.add(w.steps)
    rep.distinct_images = len(images)
    rep.target_size = sum(1 for _ in iter_paths(f"diagonal{m}", (0,) * m, 2 * n))
    return rep


def check_cube4(n: int) -> BijectionReport:
    rep = BijectionReport("cube4", n)
    images = set()
    for p in iter_paths("cube4", (n, n, n)):
        b1, b2 = cube4_to_bridge_pair(p)
        rep.checked += 1
        rep.round_trips += bridge_pair_to_cube4(b1, b2) == p
        rep.returns_preserved += returns(p) == simultaneous_returns((b1, b2))
        rep.images_valid += b1.end == (0, 0) and b2.end == (0, 0)
        images.add((b1.steps, b2.steps))
    rep.distinct_images = len(images)
    rep.target_size = sum(1 for _ in iter_paths("bridge", (n, n))) ** 2
    return rep


CHECKS = {"phi": check_phi, "psi": check_psi, "diag": check_diagonal, "cube4": check_cube4}


def check(kind: str, n: int, m: int = 2) -> BijectionReport:
    if kind not in CHECKS:
        raise BijectionError(f"unknown map {kind!r}; choose from {', '.join(CHECKS)}")
    if kind == "diag":
        return check_diagonal(n, m)
    return CHECKS[kind](n)
