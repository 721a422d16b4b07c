"""Exact combinatorial counts and lattice point enumeration.

The two lattice sets used throughout the package are

    M1(n, k) = {x in Z^n : x_i >= 0, sum(x) <= k}
    M2(n, k) = {x in Z^n : sum(|x_i|) <= k}

i.e. the integer points of the k-dilated standard simplex and cross-polytope.
Counts are exact Python integers; the Stirling-type quantities are evaluated
with mpmath at the working precision returned by :func:`precision_digits`.
"""

from __future__ import annotations

import math
import os
from typing import Iterator

import mpmath

DEFAULT_DIGITS = 50
PRECISION_ENV = "HOMOTHET_COVER_PRECISION"


def precision_digits() -> int:
    """Significant digits for high-precision evaluation (env-overridable)."""
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return DEFAULT_DIGITS
    digits = int(raw)
    if digits < 15:
        raise ValueError(f"{PRECISION_ENV} must be at least 15, got {digits}")
    return digits


class LatticeVector(tuple):
    """Integer coordinate vector, an element of M1(n, k) or M2(n, k)."""

    __slots__ = ()

    def __new__(cls, coords=()):
        coords = tuple(coords)
        for c in coords:
            if not isinstance(c, int) or isinstance(c, bool):
                raise TypeError(f"lattice coordinates must be int, got {c!r}")
        return super().__new__(cls, coords)

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def coords(self) -> tuple[int, ...]:
        return tuple(self)

    def in_M1(self, k: int) -> bool:
        return all(c >= 0 for c in self) and sum(self) <= k

    def in_M2(self, k: int) -> bool:
        return sum(abs(c) for c in self) <= k

    def __repr__(self) -> str:
        return f"LatticeVector({tuple(self)!r})"


def binomial(n: int, k: int) -> int:
    """C(n, k) for nonnegative n, k; zero when k > n."""
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return math.comb(n, k)


def robbins_bracket(n: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Two-sided Robbins bounds on n!.

    Returns ``(lower, upper)`` with
    ``sqrt(2 pi) n^(n+1/2) e^(-n) e^(1/(12n+1)) < n! < ... e^(1/(12n))``.
    """
    if n < 1:
        raise ValueError(f"robbins_bracket needs n >= 1, got {n}")
    with mpmath.workdps(precision_digits()):
        n_mp = mpmath.mpf(n)
        base = mpmath.sqrt(2 * mpmath.pi) * n_mp ** (n_mp + mpmath.mpf(1) / 2) * mpmath.exp(-n_mp)
        lower = base * mpmath.exp(mpmath.mpf(1) / (12 * n + 1))
        upper = base * mpmath.exp(mpmath.mpf(1) / (12 * n))
    return lower, upper


def card_M1(n: int, k: int) -> int:
    """|M1(n, k)| = C(n + k, n)."""
    return math.comb(n + k, n)


def card_M2(n: int, k: int) -> int:
    """|M2(n, k)| = sum_{i=0}^{n} 2^(n-i) C(n, i) C(k, n-i), with C(k, j) = 0 for j > k."""
    return sum((1 << (n - i)) * math.comb(n, i) * math.comb(k, n - i) for i in range(n + 1))


def enumerate_M1(n: int, k: int) -> Iterator[LatticeVector]:
    """Lazily yield M1(n, k) in lexicographic order."""
    if n < 1 or k < 0:
        return

    def rec(prefix: list[int], budget: int, remaining: int) -> Iterator[LatticeVector]:
        if remaining == 0:
            yield LatticeVector(prefix)
            return
        for c in range(budget + 1):
            prefix.append(c)
            yield from rec(prefix, budget - c, remaining - 1)
            prefix.pop()

    yield from rec([], k, n)


def enumerate_M2(n: int, k: int) -> Iterator[LatticeVector]:
    """Lazily yield M2(n, k) in lexicographic order."""
    if n < 1 or k < 0:
        return

    def rec(prefix: list[int], budget: int, remaining: int) -> Iterator[LatticeVector]:
        if remaining == 0:
            yield LatticeVector(prefix)
            return
        for c in range(-budget, budget + 1):
            prefix.append(c)
            yield from rec(prefix, budget - abs(c), remaining - 1)
            prefix.pop()

    yield from rec([], k, n)


def binom_upper(n: int, k: int) -> mpmath.mpf:
    """Stirling-type upper estimate ``((n+k)/(2 pi n k))^(1/2) * f(k/n)^n`` of C(n+k, n).

    Uses the identity ``f(k/n)^n = (n+k)^(n+k) / (n^n k^k)`` so that the only
    rounding is in the final mpmath operations.
    """
    if n < 1 or k < 1:
        raise ValueError(f"binom_upper needs n, k >= 1, got ({n}, {k})")
    with mpmath.workdps(precision_digits()):
        n_mp, k_mp = mpmath.mpf(n), mpmath.mpf(k)
        prefactor = mpmath.sqrt((n_mp + k_mp) / (2 * mpmath.pi * n_mp * k_mp))
        log_power = (n_mp + k_mp) * mpmath.log(n_mp + k_mp) - n_mp * mpmath.log(n_mp) - k_mp * mpmath.log(k_mp)
        value = prefactor * mpmath.exp(log_power)
    return value
