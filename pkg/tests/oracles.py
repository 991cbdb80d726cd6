"""Independent reference computations used to freeze expected values.

Nothing here imports transdiag; each helper recomputes its answer from
first principles with sympy, mpmath or plain integer arithmetic.
"""

from __future__ import annotations

import itertools
from functools import reduce
from math import factorial, gcd

import mpmath
import sympy

X = sympy.Symbol("x")
mpmath.mp.dps = 80


def _rank(c: int) -> int:
    # 0, 1, -1, 2, -2, ... -> 0, 1, 2, 3, 4, ...
    return 2 * c - 1 if c > 0 else -2 * c


def brute_force_algebraics(window, max_size: int):
    """(value, leading-first coefficients) for every distinct real root in the open window.

    Ordered by size class, then degree, then ranked coefficients from the
    leading term down, then root value.
    """
    lo, hi = (sympy.Rational(str(w)) for w in window)
    polys = []
    for deg in range(1, max_size):
        bound = max_size - deg
        for coeffs in itertools.product(range(-bound, bound + 1), repeat=deg + 1):
            height = sum(abs(c) for c in coeffs)
            if coeffs[0] <= 0 or height + deg > max_size or reduce(gcd, coeffs) != 1:
                continue
            polys.append(((height + deg, deg, tuple(_rank(c) for c in coeffs)), coeffs))
    polys.sort()
    found: list[tuple[mpmath.mpf, tuple[int, ...]]] = []
    for _, coeffs in polys:
        roots = sorted(set(sympy.Poly(list(coeffs), X).real_roots()), key=lambda r: float(r))
        for r in roots:
            if not (lo < r < hi):
                continue
            v = mpmath.mpf(str(sympy.N(r, 70)))
            if all(abs(v - w) > mpmath.mpf(10) ** -50 for w, _ in found):
                found.append((v, coeffs))
    return found


def liouville_digit(n: int) -> int:
    k = 1
    while factorial(k) < n:
        k += 1
    return int(factorial(k) == n)


def binary_digits(value, n: int) -> str:
    """First n binary digits of a real in [0, 1) via repeated doubling at high precision."""
    x = mpmath.mpf(value)
    out = []
    for _ in range(n):
        x *= 2
        d = int(mpmath.floor(x))
        out.append(str(d))
        x -= d
    return "".join(out)
