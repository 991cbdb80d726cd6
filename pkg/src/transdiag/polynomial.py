"""Integer polynomials with exact sign evaluation and Sturm chains."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterator, Sequence


@dataclass(frozen=True)
class IntPolynomial:
    """Primitive integer polynomial, coefficients stored constant term first.

    Construction normalizes: trailing zeros are stripped, the content is
    divided out and the leading coefficient is made positive.  Scaling by a
    nonzero constant never moves a root, so this is safe everywhere we use it.
    """

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = list(self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise ValueError("zero polynomial")
        content = 0
        for c in coeffs:
            content = gcd(content, c)
        if coeffs[-1] < 0:
            content = -content
        object.__setattr__(self, "coefficients", tuple(c // content for c in coeffs))

    @classmethod
    def of(cls, *coefficients: int) -> "IntPolynomial":
        return cls(tuple(coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def height(self) -> int:
        """Sum of absolute coefficient values."""
        return sum(abs(c) for c in self.coefficients)

    @property
    def size_class(self) -> int:
        return self.degree + self.height

    def sign_at(self, x: Fraction | int) -> int:
        """Exact sign of ``self(x)`` using integer arithmetic only."""
        if isinstance(x, int):
            n, d = x, 1
        else:
            n, d = x.numerator, x.denominator
        return _sign_homogeneous(self.coefficients, n, d)

    def __call__(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPolynomial | None":
        if self.degree == 0:
            return None
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coefficients) if i > 0))

    def __str__(self) -> str:
        terms = []
        for power in range(self.degree, -1, -1):
            c = self.coefficients[power]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if power == 0:
                body = str(mag)
            else:
                body = ("" if mag == 1 else f"{mag}*") + ("x" if power == 1 else f"x^{power}")
            terms.append((sign, body))
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _sign_homogeneous(coeffs: Sequence[int], n: int, d: int) -> int:
    # sign of sum c_i n^i d^(deg-i); d > 0 so this equals sign of p(n/d)
    acc = coeffs[-1]
    dpow = 1
    for c in reversed(coeffs[:-1]):
        dpow *= d
        acc = acc * n + c * dpow
    return (acc > 0) - (acc < 0)


# -- exact arithmetic over Q, results brought back to primitive integer form --


def _to_fractions(p: IntPolynomial) -> list[Fraction]:
    return [Fraction(c) for c in p.coefficients]


def _divmod_q(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        factor = a[-1] / lead
        q[shift] = factor
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _primitive_int(coeffs: Sequence[Fraction]) -> tuple[int, ...]:
    """Clear denominators and divide out content; the sign is preserved."""
    denom = 1
    for c in coeffs:
        denom = denom * c.denominator // gcd(denom, c.denominator)
    ints = [int(c * denom) for c in coeffs]
    content = 0
    for c in ints:
        content = gcd(content, c)
    content = content or 1
    return tuple(c // content for c in ints)


@lru_cache(maxsize=65536)
def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Greatest common divisor, primitive with positive leading coefficient."""
    x, y = _to_fractions(a), _to_fractions(b)
    while y and any(y):
        _, r = _divmod_q(x, y)
        x, y = y, r
    return IntPolynomial(_primitive_int(x))


def exact_quotient(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    q, r = _divmod_q(_to_fractions(a), _to_fractions(b))
    if r and any(r):
        raise ValueError(f"{b} does not divide {a}")
    return IntPolynomial(_primitive_int(q))


@lru_cache(maxsize=65536)
def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    dp = p.derivative()
    if dp is None:
        return p
    g = poly_gcd(p, dp)
    if g.degree == 0:
        return p
    return exact_quotient(p, g)


@lru_cache(maxsize=65536)
def sturm_chain(p: IntPolynomial) -> tuple[tuple[int, ...], ...]:
    """Sturm chain of ``p`` with every member scaled by a positive constant."""
    dp = p.derivative()
    chain = [p.coefficients]
    if dp is None:
        return tuple(chain)
    chain.append(dp.coefficients)
    prev, cur = _to_fractions(p), _to_fractions(dp)
    while len(cur) > 1:
        _, r = _divmod_q(prev, cur)
        if not r or not any(r):
            break
        neg = [-c for c in r]
        chain.append(_primitive_int(neg))
        prev, cur = cur, neg
    return tuple(chain)


def sign_variations(chain: Sequence[Sequence[int]], x: Fraction | int) -> int:
    if isinstance(x, int):
        n, d = x, 1
    else:
        n, d = x.numerator, x.denominator
    count = 0
    last = 0
    for coeffs in chain:
        s = _sign_homogeneous(coeffs, n, d)
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def count_roots_open(p: IntPolynomial, lo: Fraction | int, hi: Fraction | int) -> int:
    """Number of distinct real roots of square-free ``p`` in the open interval (lo, hi)."""
    if lo >= hi:
        return 0
    chain = sturm_chain(p)
    n = sign_variations(chain, lo) - sign_variations(chain, hi)
    if p.sign_at(hi) == 0:
        n -= 1
    return n


def count_roots_closed(p: IntPolynomial, lo: Fraction | int, hi: Fraction | int) -> int:
    n = count_roots_open(p, lo, hi)
    n += p.sign_at(lo) == 0
    if hi != lo:
        n += p.sign_at(hi) == 0
    return n


def cauchy_bound_pow2(p: IntPolynomial) -> int:
    """A power of two strictly exceeding the modulus of every root."""
    lead = abs(p.coefficients[-1])
    ratio = Fraction(max(abs(c) for c in p.coefficients[:-1]), lead) if p.degree else Fraction(0)
    bound = 1
    while bound <= 1 + ratio:
        bound *= 2
    return bound


def size_class_polynomials(size: int) -> Iterator[IntPolynomial]:
    """All primitive, sign-normalized polynomials with degree + height == size.

    Within the class the order is ascending degree, then lexicographic on
    the coefficients read from the leading term down, where integers are
    ranked 0, 1, -1, 2, -2, ...
    """
    for degree in range(1, size):
        height = size - degree
        vectors = []
        for lead in range(1, height + 1):
            for rest in _signed_compositions(height - lead, degree):
                vectors.append((lead,) + rest)
        vectors.sort(key=lambda v: tuple((abs(c), c < 0) for c in v))
        for v in vectors:
            content = 0
            for c in v:
                content = gcd(content, c)
            if content == 1:
                yield IntPolynomial(tuple(reversed(v)))


def _signed_compositions(total: int, length: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors of the given length whose absolute values sum to ``total``."""
    if length == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _signed_compositions(total - first, length - 1):
            yield (first,) + rest
            if first:
                yield (-first,) + rest


def polynomials_up_to(height: int, degree: int) -> Iterator[IntPolynomial]:
    """Primitive sign-normalized polynomials with 1 <= deg <= degree and height <= ``height``."""
    for d in range(1, degree + 1):
        for h in range(1, height + 1):
            for lead in range(1, h + 1):
                for rest in _signed_compositions(h - lead, d):
                    v = (lead,) + rest
                    content = 0
                    for c in v:
                        content = gcd(content, c)
                    if content == 1:
                        yield IntPolynomial(tuple(reversed(v)))
