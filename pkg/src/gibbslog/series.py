"""Truncated formal power series with exact or floating coefficients.

Every operation takes an explicit truncation order ``T`` and returns a series
with exactly ``T + 1`` coefficients.  Exact series hold Python ``int`` or
``Fraction`` values and never round; float series hold finite ``float64``
values and refuse to produce ``inf``/``nan``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

try:  # GMP multiplication is an order of magnitude faster on packed operands
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = None

EXACT = "exact"
FLOAT = "float"

#: Largest truncation order any operation will accept.
MAX_TRUNCATION = 10_000

#: Float-mode reciprocal refuses leading coefficients below this magnitude.
FLOAT_PIVOT_MIN = 1e-12


class SeriesError(ValueError):
    pass


class ModeMismatchError(SeriesError):
    pass


class SingularReciprocalError(SeriesError, ZeroDivisionError):
    pass


class CompositionDivergenceError(SeriesError):
    pass


class TruncationLimitError(SeriesError):
    pass


class NonFiniteError(SeriesError, OverflowError):
    pass


def _check_T(T: int) -> int:
    T = int(T)
    if T < 0:
        raise SeriesError(f"truncation must be non-negative, got {T}")
    if T > MAX_TRUNCATION:
        raise TruncationLimitError(f"truncation {T} exceeds hard cap {MAX_TRUNCATION}")
    return T


def _normalize_exact(c):
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    if isinstance(c, (int, np.integer)):
        return int(c)
    raise SeriesError(f"exact coefficients must be int or Fraction, got {type(c).__name__}")


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Coefficients ``c_0..c_T`` of a series truncated after ``z^T``."""

    coeffs: tuple | np.ndarray
    mode: str = EXACT

    def __post_init__(self):
        if self.mode == EXACT:
            object.__setattr__(self, "coeffs", tuple(_normalize_exact(c) for c in self.coeffs))
        elif self.mode == FLOAT:
            arr = np.array(self.coeffs, dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise NonFiniteError("float series has non-finite coefficients")
            arr.setflags(write=False)
            object.__setattr__(self, "coeffs", arr)
        else:
            raise SeriesError(f"unknown mode {self.mode!r}")
        if len(self.coeffs) == 0:
            raise SeriesError("a series needs at least one coefficient")
        _check_T(len(self.coeffs) - 1)

    @property
    def T(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in list(self.coeffs)[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"PowerSeries({self.mode}, T={self.T}, [{head}{more}])"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        if other.mode != self.mode or other.T != self.T:
            return False
        if self.mode == FLOAT:
            return bool(np.array_equal(self.coeffs, other.coeffs))
        return self.coeffs == other.coeffs

    __hash__ = object.__hash__

    def __add__(self, other: PowerSeries) -> PowerSeries:
        return add(self, other)

    def __sub__(self, other: PowerSeries) -> PowerSeries:
        return add(self, scale(other, -1))

    def __neg__(self) -> PowerSeries:
        return scale(self, -1)

    def truncate(self, T: int) -> PowerSeries:
        """Cut or zero-pad to order ``T``."""
        return _make(_padded(self, _check_T(T)), self.mode)

    def to_float(self) -> PowerSeries:
        if self.mode == FLOAT:
            return self
        return PowerSeries([float(c) for c in self.coeffs], FLOAT)

    def tolist(self) -> list:
        return list(self.coeffs)


def _make(coeffs, mode: str) -> PowerSeries:
    return PowerSeries(coeffs, mode)


def _padded(a: PowerSeries, T: int):
    if a.mode == FLOAT:
        out = np.zeros(T + 1)
        m = min(T + 1, len(a))
        out[:m] = a.coeffs[:m]
        return out
    cs = list(a.coeffs[: T + 1])
    return cs + [0] * (T + 1 - len(cs))


def _same_mode(a: PowerSeries, b: PowerSeries) -> str:
    if a.mode != b.mode:
        raise ModeMismatchError(f"cannot combine {a.mode} and {b.mode} series")
    return a.mode


# -- constructors ---------------------------------------------------------


def series(coeffs: Iterable, T: int | None = None, mode: str = EXACT) -> PowerSeries:
    s = PowerSeries(list(coeffs), mode)
    return s if T is None else s.truncate(T)


def zeros(T: int, mode: str = EXACT) -> PowerSeries:
    return series([0] * (_check_T(T) + 1), mode=mode)


def one(T: int, mode: str = EXACT) -> PowerSeries:
    return monomial(0, T, mode)


def monomial(k: int, T: int, mode: str = EXACT, coeff=1) -> PowerSeries:
    cs = [0] * (_check_T(T) + 1)
    if k <= T:
        cs[k] = coeff
    return series(cs, mode=mode)


def geometric(T: int, ratio=1, mode: str = EXACT) -> PowerSeries:
    """``1 / (1 - ratio z)``."""
    return series([ratio**n for n in range(_check_T(T) + 1)], mode=mode)


# -- integer convolution via Kronecker substitution ------------------------


def _kron_nonneg(a: Sequence[int], b: Sequence[int], T: int) -> list[int]:
    """Truncated product of non-negative integer sequences.

    Packs each sequence into one big integer with slots wide enough that no
    coefficient of the product can spill into its neighbour.
    """
    va = next((i for i, c in enumerate(a) if c), None)
    vb = next((i for i, c in enumerate(b) if c), None)
    if va is None or vb is None or va + vb > T:
        return [0] * (T + 1)
    shift = va + vb
    a = a[va : T + 1 - vb]
    b = b[vb : T + 1 - va]
    T -= shift
    ma, mb = max(a), max(b)
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 1
    width = (bits + 7) // 8
    pa = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in a), "little")
    pb = int.from_bytes(b"".join(c.to_bytes(width, "little") for c in b), "little")
    nslots = len(a) + len(b) - 1
    prod = int(_mpz(pa) * _mpz(pb)) if _mpz is not None else pa * pb
    raw = prod.to_bytes(nslots * width, "little")
    out = [
        int.from_bytes(raw[i * width : (i + 1) * width], "little") for i in range(min(nslots, T + 1))
    ]
    return [0] * shift + out + [0] * (T + 1 - len(out))


def _int_convolve(a: Sequence[int], b: Sequence[int], T: int) -> list[int]:
    if len(a) * len(b) <= 64:
        out = [0] * (T + 1)
        for i, x in enumerate(a[: T + 1]):
            if x:
                for j, y in enumerate(b[: T + 1 - i]):
                    out[i + j] += x * y
        return out
    ap = [max(c, 0) for c in a]
    an = [max(-c, 0) for c in a]
    bp = [max(c, 0) for c in b]
    bn = [max(-c, 0) for c in b]
    has_an, has_bn = any(an), any(bn)
    out = _kron_nonneg(ap, bp, T)
    terms = []
    if has_bn:
        terms.append((-1, _kron_nonneg(ap, bn, T)))
    if has_an:
        terms.append((-1, _kron_nonneg(an, bp, T)))
    if has_an and has_bn:
        terms.append((1, _kron_nonneg(an, bn, T)))
    for sign, t in terms:
        out = [x + sign * y for x, y in zip(out, t)]
    return out


def _common_denominator(cs: Sequence) -> int:
    d = 1
    for c in cs:
        if isinstance(c, Fraction):
            d = lcm(d, c.denominator)
    return d


def _exact_convolve(a: Sequence, b: Sequence, T: int) -> list:
    da, db = _common_denominator(a), _common_denominator(b)
    ai = [int(c * da) for c in a] if da != 1 else list(a)
    bi = [int(c * db) for c in b] if db != 1 else list(b)
    prod = _int_convolve(ai, bi, T)
    d = da * db
    if d == 1:
        return prod
    return [Fraction(c, d) for c in prod]


# -- operations -------------------------------------------------------------


def add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    mode = _same_mode(a, b)
    if a.T != b.T:
        raise SeriesError(f"truncation mismatch: {a.T} vs {b.T}")
    if mode == FLOAT:
        return _make(a.coeffs + b.coeffs, mode)
    return _make([x + y for x, y in zip(a.coeffs, b.coeffs)], mode)


def scale(a: PowerSeries, c) -> PowerSeries:
    if a.mode == FLOAT:
        return _make(a.coeffs * float(c), FLOAT)
    return _make([x * c for x in a.coeffs], EXACT)


def mul(a: PowerSeries, b: PowerSeries, T: int) -> PowerSeries:
    """Cauchy product truncated at ``z^T``."""
    mode = _same_mode(a, b)
    T = _check_T(T)
    if mode == FLOAT:
        prod = np.convolve(a.coeffs[: T + 1], b.coeffs[: T + 1])[: T + 1]
        out = np.zeros(T + 1)
        out[: len(prod)] = prod
        if not np.all(np.isfinite(out)):
            raise NonFiniteError("float product overflowed")
        return _make(out, FLOAT)
    return _make(_exact_convolve(list(a.coeffs), list(b.coeffs), T), EXACT)


def reciprocal(a: PowerSeries, T: int) -> PowerSeries:
    """``1/a`` through ``b_n = -(1/a_0) sum_{i=1}^n a_i b_{n-i}``."""
    T = _check_T(T)
    a0 = a.coeffs[0]
    if a.mode == FLOAT:
        if abs(a0) <= FLOAT_PIVOT_MIN:
            raise SingularReciprocalError(f"leading coefficient {a0!r} too small to invert")
        ac = _padded(a, T)
        b = np.zeros(T + 1)
        b[0] = 1.0 / a0
        for n in range(1, T + 1):
            b[n] = -np.dot(ac[1 : n + 1], b[n - 1 :: -1]) / a0
        if not np.all(np.isfinite(b)):
            raise NonFiniteError("float reciprocal overflowed")
        return _make(b, FLOAT)
    if a0 == 0:
        raise SingularReciprocalError("constant term is zero")
    ac = _padded(a, T)
    inv0 = Fraction(1, 1) / a0
    unit = inv0.denominator == 1
    if unit:
        inv0 = int(inv0)
    b = [inv0] + [0] * T
    for n in range(1, T + 1):
        s = sum(ac[i] * b[n - i] for i in range(1, n + 1) if ac[i])
        b[n] = -s * inv0
    return _make(b, EXACT)


def power(a: PowerSeries, j: int, T: int) -> PowerSeries:
    """``a^j`` truncated at ``z^T``; ``j = 0`` gives the constant 1."""
    T = _check_T(T)
    if j < 0:
        raise SeriesError("power exponent must be non-negative")
    result = one(T, a.mode)
    base = a.truncate(T)
    while j:
        if j & 1:
            result = mul(result, base, T)
        j >>= 1
        if j:
            base = mul(base, base, T)
    return result


def powers(a: PowerSeries, jmax: int, T: int) -> list[PowerSeries]:
    """``[a^0, a^1, ..., a^jmax]``, each truncated at ``z^T``."""
    T = _check_T(T)
    out = [one(T, a.mode)]
    base = a.truncate(T)
    for _ in range(jmax):
        out.append(mul(out[-1], base, T))
    return out


def hadamard(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Coefficient-wise product."""
    mode = _same_mode(a, b)
    if a.T != b.T:
        raise SeriesError(f"hadamard needs equal truncation, got {a.T} and {b.T}")
    if mode == FLOAT:
        out = a.coeffs * b.coeffs
        if not np.all(np.isfinite(out)):
            raise NonFiniteError("float hadamard product overflowed")
        return _make(out, FLOAT)
    return _make([x * y for x, y in zip(a.coeffs, b.coeffs)], EXACT)


def substitute(a: PowerSeries, inner: PowerSeries, T: int) -> PowerSeries:
    """Composition ``a(inner(z))`` truncated at ``z^T``; needs ``inner_0 = 0``."""
    _same_mode(a, inner)
    T = _check_T(T)
    if inner.coeffs[0] != 0:
        raise CompositionDivergenceError("inner series must have zero constant term")
    inner = inner.truncate(T)
    # Horner; inner has valuation >= 1, so a_n with n > T never contributes.
    top = min(a.T, T)
    acc = monomial(0, T, a.mode, a.coeffs[top])
    for n in range(top - 1, -1, -1):
        acc = mul(acc, inner, T)
        c0 = acc.coeffs[0] + a.coeffs[n]
        cs = acc.tolist() if a.mode == EXACT else acc.coeffs.copy()
        cs[0] = c0
        acc = _make(cs, a.mode)
    return acc
