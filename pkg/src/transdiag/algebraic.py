"""Real algebraic numbers as (polynomial, isolating dyadic interval) pairs.

The canonical enumeration walks size classes ``degree + height`` upward;
each class is finite, so every algebraic real in a window turns up at a
finite index.  Duplicates are dropped by an exact gcd test, never by a
tolerance.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .polynomial import (
    IntPolynomial,
    cauchy_bound_pow2,
    count_roots_open,
    poly_gcd,
    size_class_polynomials,
    squarefree_part,
)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def dyadic_parts(q: Fraction) -> tuple[int, int]:
    """Return (numerator, exponent) with q == numerator * 2**exponent."""
    if not is_dyadic(q):
        raise ValueError(f"{q} is not dyadic")
    return q.numerator, -(q.denominator.bit_length() - 1)


def dyadic_from_parts(numerator: int, exponent: int) -> Fraction:
    if exponent >= 0:
        return Fraction(numerator << exponent)
    return Fraction(numerator, 1 << -exponent)


@dataclass(frozen=True)
class DyadicInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not (is_dyadic(lo) and is_dyadic(hi)):
            raise ValueError(f"endpoints must be dyadic: {lo}, {hi}")
        if lo >= hi:
            raise ValueError(f"degenerate interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"lo": list(dyadic_parts(self.lo)), "hi": list(dyadic_parts(self.hi))}

    @classmethod
    def from_json(cls, data: dict) -> "DyadicInterval":
        return cls(dyadic_from_parts(*data["lo"]), dyadic_from_parts(*data["hi"]))

    def __str__(self) -> str:
        return f"({self.lo}, {self.hi})"


class Order(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class AlgebraicReal:
    """The unique root of a square-free ``poly`` strictly inside ``isolator``.

    Isolator endpoints are never roots, so the sign of ``poly`` changes
    exactly once across the interval.
    """

    poly: IntPolynomial
    isolator: DyadicInterval

    @property
    def lo(self) -> Fraction:
        return self.isolator.lo

    @property
    def hi(self) -> Fraction:
        return self.isolator.hi

    def bisect(self) -> "AlgebraicReal":
        """One refinement step; the new isolator has half the width."""
        lo, hi = self.isolator.lo, self.isolator.hi
        mid = (lo + hi) / 2
        s_mid = self.poly.sign_at(mid)
        if s_mid == 0:
            quarter = (hi - lo) / 4
            return AlgebraicReal(self.poly, DyadicInterval(mid - quarter, mid + quarter))
        if self.poly.sign_at(lo) == s_mid:
            return AlgebraicReal(self.poly, DyadicInterval(mid, hi))
        return AlgebraicReal(self.poly, DyadicInterval(lo, mid))

    def approx(self, bits: int = 60) -> float:
        return float(refine(self, -bits).isolator.midpoint)

    def to_json(self) -> dict:
        return {"poly": list(self.poly.coefficients), "isolator": self.isolator.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "AlgebraicReal":
        return cls(IntPolynomial(tuple(data["poly"])), DyadicInterval.from_json(data["isolator"]))

    def __str__(self) -> str:
        return f"root of {self.poly} in {self.isolator}"


def refine(a: AlgebraicReal, target_width_log2: int) -> AlgebraicReal:
    """Bisect until the isolator width is at most ``2**target_width_log2``."""
    target = Fraction(2) ** target_width_log2
    while a.isolator.width > target:
        a = a.bisect()
    return a


def _shrink_off_roots(p: IntPolynomial, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    # Exactly one root in (lo, hi); make sure neither endpoint is a root.
    while p.sign_at(lo) == 0 or p.sign_at(hi) == 0:
        mid = (lo + hi) / 2
        if p.sign_at(mid) == 0:
            quarter = (hi - lo) / 4
            lo, hi = mid - quarter, mid + quarter
        elif count_roots_open(p, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


def _isolate_all(p: IntPolynomial, lo: Fraction, hi: Fraction, keep) -> list[tuple[Fraction, Fraction]]:
    """Isolators for the roots of square-free ``p`` in (lo, hi) that ``keep`` accepts."""
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(lo, hi, count_roots_open(p, lo, hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0 or not keep(a, b):
            continue
        if n == 1:
            out.append(_shrink_off_roots(p, a, b))
            continue
        mid = (a + b) / 2
        if p.sign_at(mid) == 0:
            delta = (b - a) / 4
            while count_roots_open(p, mid - delta, mid + delta) > 1:
                delta /= 2
            out.append(_shrink_off_roots(p, mid - delta, mid + delta))
        stack.append((mid, b, count_roots_open(p, mid, b)))
        stack.append((a, mid, count_roots_open(p, a, mid)))
    out.sort()
    # isolators around an exact midpoint root may overlap a neighbour
    items = [AlgebraicReal(p, DyadicInterval(a, b)) for a, b in out]
    changed = True
    while changed:
        changed = False
        for i in range(len(items) - 1):
            if items[i].hi > items[i + 1].lo:
                items[i] = items[i].bisect()
                items[i + 1] = items[i + 1].bisect()
                changed = True
        items.sort(key=lambda r: r.lo)
    return [(r.lo, r.hi) for r in items]


def _side_of(a: AlgebraicReal, q: Fraction) -> tuple[AlgebraicReal, Order]:
    """Exact order of the root against a rational ``q`` (refining as needed)."""
    while True:
        if a.hi <= q:
            return a, Order.LESS
        if a.lo >= q:
            return a, Order.GREATER
        if a.poly.sign_at(q) == 0:
            return a, Order.EQUAL
        a = a.bisect()


def compare_rational(a: AlgebraicReal, q: Fraction) -> Order:
    return _side_of(a, Fraction(q))[1]


def isolate_roots(poly: IntPolynomial, window: tuple[Fraction, Fraction] | DyadicInterval) -> list[DyadicInterval]:
    """Disjoint dyadic isolators, ascending, one per root strictly inside ``window``."""
    wlo, whi = _window_bounds(window)
    q = squarefree_part(poly)
    if q.degree == 0:
        return []
    bound = cauchy_bound_pow2(q)
    keep = lambda a, b: b > wlo and a < whi  # noqa: E731
    result = []
    for lo, hi in _isolate_all(q, Fraction(-bound), Fraction(bound), keep):
        a = AlgebraicReal(q, DyadicInterval(lo, hi))
        a, side_lo = _side_of(a, wlo)
        if side_lo is not Order.GREATER:
            continue
        a, side_hi = _side_of(a, whi)
        if side_hi is not Order.LESS:
            continue
        result.append(a.isolator)
    return result


def _window_bounds(window) -> tuple[Fraction, Fraction]:
    if isinstance(window, DyadicInterval):
        return window.lo, window.hi
    lo, hi = (Fraction(w) for w in window)
    if lo >= hi:
        raise ValueError(f"empty window ({lo}, {hi})")
    return lo, hi


def compare(a: AlgebraicReal, b: AlgebraicReal) -> Order:
    """Exact trichotomy; equality is decided by a common root of gcd(a, b)."""
    gcd_checked = False
    while True:
        if a.hi <= b.lo:
            return Order.LESS
        if b.hi <= a.lo:
            return Order.GREATER
        if not gcd_checked:
            g = poly_gcd(a.poly, b.poly)
            if g.degree == 0:
                gcd_checked = True
            else:
                lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
                if count_roots_open(g, lo, hi) > 0:
                    return Order.EQUAL
        a, b = a.bisect(), b.bisect()


# -- canonical enumeration ------------------------------------------------------------

_DEDUP_BITS = 24
_BUCKET_BITS = 20


class _WindowEnumeration:
    """Memoized prefix of the canonical enumeration for one window."""

    def __init__(self, lo: Fraction, hi: Fraction):
        self.window = (lo, hi)
        self.items: list[AlgebraicReal] = []
        self.sources: list[IntPolynomial] = []
        self._buckets: dict[int, list[int]] = {}
        self._lock = threading.Lock()
        self._pending = self._candidates()

    def _candidates(self) -> Iterator[tuple[IntPolynomial, AlgebraicReal]]:
        size = 2
        while True:
            for p in size_class_polynomials(size):
                q = squarefree_part(p)
                for iso in isolate_roots(q, self.window):
                    yield p, AlgebraicReal(q, iso)
            size += 1

    def _bucket_keys(self, a: AlgebraicReal) -> range:
        scale = 1 << _BUCKET_BITS
        return range((a.lo * scale).__floor__(), (a.hi * scale).__floor__() + 1)

    def _is_new(self, a: AlgebraicReal) -> bool:
        for key in self._bucket_keys(a):
            for j in self._buckets.get(key, ()):
                if compare(a, self.items[j]) is Order.EQUAL:
                    return False
        return True

    def get(self, index: int) -> tuple[IntPolynomial, AlgebraicReal]:
        if index < len(self.items):
            return self.sources[index], self.items[index]
        with self._lock:
            while index >= len(self.items):
                p, a = next(self._pending)
                a = refine(a, -_DEDUP_BITS)
                if self._is_new(a):
                    for key in self._bucket_keys(a):
                        self._buckets.setdefault(key, []).append(len(self.items))
                    self.sources.append(p)
                    self.items.append(a)
        return self.sources[index], self.items[index]


_ENUMERATIONS: dict[tuple[Fraction, Fraction], _WindowEnumeration] = {}
_ENUM_LOCK = threading.Lock()


def _enumeration(window) -> _WindowEnumeration:
    key = _window_bounds(window)
    with _ENUM_LOCK:
        if key not in _ENUMERATIONS:
            _ENUMERATIONS[key] = _WindowEnumeration(*key)
        return _ENUMERATIONS[key]


def enumerate_algebraics(index: int, window) -> AlgebraicReal:
    """The ``index``-th (0-based) distinct algebraic real strictly inside ``window``."""
    if index < 0:
        raise ValueError("index must be non-negative")
    return _enumeration(window).get(index)[1]


def enumeration_source(index: int, window) -> IntPolynomial:
    """The polynomial whose root first produced enumeration entry ``index``."""
    return _enumeration(window).get(index)[0]
