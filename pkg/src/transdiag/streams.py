"""Lazy memoized binary expansions of reals in [0, 1).

Every stream caches the digit prefix it has computed so far.  Digits are
stored as ASCII ``'0'``/``'1'`` bytes so that prefixes convert to integers
and strings without a per-digit loop.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Union

from .algebraic import AlgebraicReal, DyadicInterval
from .polynomial import _sign_homogeneous

_CHUNK = 32


class PrecisionExhausted(Exception):
    """A stream cannot produce the requested digit (finite data or budget)."""


class _ExtractionCounter:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.value = 0

    def add(self, n: int) -> None:
        with self._lock:
            self.value += n

    def reset(self) -> None:
        with self._lock:
            self.value = 0


BASE_EXTRACTIONS = _ExtractionCounter()


def base_digit_extractions() -> int:
    """Digits computed so far by algebraic (base-level) streams, process wide."""
    return BASE_EXTRACTIONS.value


class DigitStream:
    """Base class; subclasses implement ``_extend`` and ``descriptor``."""

    def __init__(self) -> None:
        self._digits = bytearray()
        self._lock = threading.RLock()

    def digit_at(self, position: int) -> int:
        if position < 1:
            raise ValueError("positions start at 1")
        if position > len(self._digits):
            with self._lock:
                if position > len(self._digits):
                    self._extend(position)
        return self._digits[position - 1] - 48

    def prefix(self, n: int) -> str:
        if n <= 0:
            return ""
        self.digit_at(n)
        return self._digits[:n].decode()

    def prefix_int(self, n: int) -> int:
        """floor(2**n * x) as read off the first ``n`` digits."""
        if n <= 0:
            return 0
        return int(self.prefix(n), 2)

    @property
    def computed(self) -> int:
        return len(self._digits)

    def seed(self, digits: str) -> None:
        """Install a previously computed prefix (checkpoint resume)."""
        with self._lock:
            have = self._digits.decode()
            n = min(len(have), len(digits))
            if have[:n] != digits[:n]:
                raise ValueError("seeded digits disagree with computed prefix")
            if len(digits) > len(have):
                self._digits = bytearray(digits.encode())

    def _append(self, bits: str) -> None:
        self._digits.extend(bits.encode())

    def _extend(self, n: int) -> None:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor()}>"


def _bits(m: int, n: int) -> str:
    return format(m, f"0{n}b") if n else ""


class ConstantStream(DigitStream):
    """A rational in [0, 1), canonical (terminating) expansion."""

    def __init__(self, value: Fraction | int | str):
        super().__init__()
        value = Fraction(value)
        if not 0 <= value < 1:
            raise ValueError(f"constant {value} outside [0, 1)")
        self.value = value

    def _extend(self, n: int) -> None:
        n = max(n, len(self._digits) + _CHUNK)
        m = (self.value * (1 << n)).__floor__()
        self._append(_bits(m, n)[len(self._digits):])

    def descriptor(self) -> dict:
        return {"kind": "constant", "value": str(self.value)}


def _liouville_digit(n: int) -> int:
    k = 1
    while factorial(k) < n:
        k += 1
    return int(factorial(k) == n)


ORACLE_RULES: dict[str, Callable[[int], int]] = {
    "liouville": _liouville_digit,
    "zeros": lambda n: 0,
    "ones": lambda n: 1,
}


class OracleStream(DigitStream):
    """Digits from a named closed-form rule; ``liouville`` has ones exactly at n!."""

    def __init__(self, name: str):
        super().__init__()
        if name not in ORACLE_RULES:
            raise ValueError(f"unknown oracle {name!r}; known: {sorted(ORACLE_RULES)}")
        self.name = name
        self._rule = ORACLE_RULES[name]

    def _extend(self, n: int) -> None:
        start = len(self._digits) + 1
        self._append("".join("1" if self._rule(i) else "0" for i in range(start, n + 1)))

    def descriptor(self) -> dict:
        return {"kind": "oracle", "name": self.name}


class PeriodicStream(DigitStream):
    """Eventually periodic digit pattern, e.g. ``0.0111...`` is ('0', '1')."""

    def __init__(self, head: str, period: str):
        super().__init__()
        if not period or set(head + period) - {"0", "1"}:
            raise ValueError("head/period must be binary strings, period non-empty")
        self.head, self.period = head, period

    def _extend(self, n: int) -> None:
        out = []
        for i in range(len(self._digits), n):
            if i < len(self.head):
                out.append(self.head[i])
            else:
                out.append(self.period[(i - len(self.head)) % len(self.period)])
        self._append("".join(out))

    def descriptor(self) -> dict:
        return {"kind": "periodic", "head": self.head, "period": self.period}


class PrefixStream(DigitStream):
    """A finite, externally supplied prefix; digits beyond it are unknown."""

    def __init__(self, digits: str, label: str = "prefix"):
        super().__init__()
        if set(digits) - {"0", "1"}:
            raise ValueError("prefix must contain only '0' and '1'")
        self.label = label
        self._append(digits)

    def _extend(self, n: int) -> None:
        raise PrecisionExhausted(f"{self.label}: only {len(self._digits)} digits known, asked for {n}")

    def descriptor(self) -> dict:
        return {"kind": "prefix", "label": self.label, "digits": self._digits.decode()}


class ConcatStream(DigitStream):
    """Fixed leading bits followed by another stream's digits."""

    def __init__(self, head: str, tail: DigitStream):
        super().__init__()
        self.head, self.tail = head, tail

    def _extend(self, n: int) -> None:
        h = len(self.head)
        start = len(self._digits)
        out = [self.head[i] for i in range(start, min(n, h))]
        for i in range(max(start, h), n):
            out.append("1" if self.tail.digit_at(i - h + 1) else "0")
        self._append("".join(out))

    def descriptor(self) -> dict:
        return {"kind": "concat", "head": self.head, "tail": self.tail.descriptor()}


class AlgebraicStream(DigitStream):
    """Digits of (x - M) / (W - M) for an algebraic x strictly inside (M, W)."""

    def __init__(self, number: AlgebraicReal, window: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1))):
        super().__init__()
        self.number = number
        self.window = (Fraction(window[0]), Fraction(window[1]))
        # isolator as integers: root in (lo / 2**k, hi / 2**k), sign of poly at lo
        lo, hi = number.lo, number.hi
        self._k = max(lo.denominator.bit_length(), hi.denominator.bit_length()) - 1
        self._lo = lo.numerator << (self._k - lo.denominator.bit_length() + 1)
        self._hi = hi.numerator << (self._k - hi.denominator.bit_length() + 1)
        self._coeffs = number.poly.coefficients
        self._sign_lo = self._sign(self._lo)

    def _sign(self, n: int) -> int:
        return _sign_homogeneous(self._coeffs, n, 1 << self._k)

    def _bisect(self) -> None:
        self._k += 1
        lo, hi = self._lo << 1, self._hi << 1
        mid = (lo + hi) >> 1
        s = self._sign(mid)
        if s == 0:
            quarter = (hi - lo) >> 2
            self._k += 1
            self._lo, self._hi = (mid - quarter) << 1, (mid + quarter) << 1
            self._sign_lo = self._sign(self._lo)
        elif s == self._sign_lo:
            self._lo, self._hi = mid, hi
        else:
            self._lo, self._hi = lo, mid

    def _extend(self, n: int) -> None:
        n = -(-n // _CHUNK) * _CHUNK
        m = self._scaled_floor(n)
        old = len(self._digits)
        self._append(_bits(m, n)[old:])
        BASE_EXTRACTIONS.add(n - old)

    def _scaled_floor(self, n: int) -> int:
        lo_w, hi_w = self.window
        span = hi_w - lo_w
        # cheap integer-only bisection down to width < span / 2**(n+1)
        rhs = span.numerator
        while ((self._hi - self._lo) << (n + 1)) * span.denominator >= rhs << self._k:
            self._bisect()
        scale = 1 << n
        while True:
            den = 1 << self._k
            m = ((Fraction(self._lo, den) - lo_w) * scale / span).__floor__()
            upper = lo_w + span * Fraction(m + 1, scale)
            if Fraction(self._hi, den) <= upper:
                break
            if self.number.poly.sign_at(upper) == 0:
                m += 1
                break
            self._bisect()
        if not 0 <= m < scale:
            raise ValueError(f"{self.number} lies outside window {self.window}")
        return m

    def descriptor(self) -> dict:
        return {
            "kind": "algebraic",
            "number": self.number.to_json(),
            "window": [str(self.window[0]), str(self.window[1])],
        }


Enclosure = Callable[[int], tuple[Fraction, Fraction]]


class EnclosureStream(DigitStream):
    """Digits of a real given by shrinking closed enclosures ``enclose(k)``.

    ``enclose(k)`` must contain the value and have width tending to zero.
    A value sitting exactly on a dyadic boundary never resolves; the level
    cap turns that into PrecisionExhausted instead of a hang.
    """

    def __init__(self, enclose: Enclosure, descriptor: dict, max_level: int = 1 << 14):
        super().__init__()
        self._enclose = enclose
        self._descriptor = descriptor
        self.max_level = max_level

    def _extend(self, n: int) -> None:
        n = -(-n // _CHUNK) * _CHUNK
        scale = 1 << n
        k = n + 8
        while k <= self.max_level:
            lo, hi = self._enclose(k)
            m = (lo * scale).__floor__()
            if hi * scale < m + 1:
                if not 0 <= m < scale:
                    raise ValueError("enclosed value outside [0, 1)")
                self._append(_bits(m, n)[len(self._digits):])
                return
            k += max(8, k // 4)
        raise PrecisionExhausted(f"could not separate digit {n} from a dyadic boundary")

    def descriptor(self) -> dict:
        return self._descriptor


def to_interval(s: DigitStream, precision: int) -> DyadicInterval:
    """The closed width-2**-precision interval fixed by the first ``precision`` digits."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    m = s.prefix_int(precision)
    scale = Fraction(1, 1 << precision)
    return DyadicInterval(m * scale, (m + 1) * scale)


@dataclass(frozen=True)
class ProvedDifferent:
    position: int


@dataclass(frozen=True)
class Unresolved:
    budget: int


DifferenceResult = Union[ProvedDifferent, Unresolved]


def intervals_disjoint(a_prefix: int, b_prefix: int) -> bool:
    # closed intervals [m, m+1] / 2**p touch when prefixes differ by one
    return abs(a_prefix - b_prefix) >= 2


def reals_differ(s: DigitStream, t: DigitStream, budget: int) -> DifferenceResult:
    """Sound test that two streams denote different reals.

    Returns the least precision at which the digit intervals are disjoint,
    or Unresolved when none is found within ``budget`` digits (or the
    streams run out of known digits first).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    checked = 0
    p = min(8, budget)
    while True:
        try:
            separated = intervals_disjoint(s.prefix_int(p), t.prefix_int(p))
        except PrecisionExhausted:
            return Unresolved(checked)
        if separated:
            break
        checked = p
        if p == budget:
            return Unresolved(budget)
        p = min(2 * p, budget)
    lo, hi = checked + 1, p
    while lo < hi:
        mid = (lo + hi) // 2
        if intervals_disjoint(s.prefix_int(mid), t.prefix_int(mid)):
            hi = mid
        else:
            lo = mid + 1
    return ProvedDifferent(lo)
