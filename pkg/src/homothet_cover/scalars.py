"""Scalar functions f, g, their inverses a(t), b(t) and integer thresholds.

    f(x) = (1+x)^(1+x) / x^x,    g(x) = 2^x f(x)

Both are strictly increasing on (0, inf) with limit 1 at 0+, f(1) = 4 and
g(1) = 8.  The thresholds

    k(n, t):  C(n+k, n)       <= t^n < C(n+k+1, n)
    l(n, t):  2^l C(n+l, n)   <= t^n < 2^(l+1) C(n+l+1, n)

are computed exactly for t = 2^(u/v) by raising both sides to the v-th power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .combinatorics import precision_digits

__all__ = [
    "SolverConfig",
    "TwoPowerRational",
    "bisect_increasing",
    "eval_f",
    "eval_g",
    "solve_a",
    "solve_b",
    "k_of",
    "l_of",
    "p_of",
    "p_bracket",
    "p_residual",
    "high_precision_power",
]

A_BRACKET = (1e-9, 1.0)
B_BRACKET = (1e-9, 1.0)


@dataclass(frozen=True)
class SolverConfig:
    abs_tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if not self.abs_tolerance > 0:
            raise ValueError("abs_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True)
class TwoPowerRational:
    """The real number t = 2^(num/den), stored with the exponent in lowest terms."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("den must be positive")
        if self.num < 0:
            raise ValueError("num must be nonnegative")
        g = math.gcd(self.num, self.den)
        if g > 1:
            object.__setattr__(self, "num", self.num // g)
            object.__setattr__(self, "den", self.den // g)

    @classmethod
    def parse(cls, text: str) -> "TwoPowerRational":
        """Parse an exponent string ``"u/v"`` or ``"u"`` into 2^(u/v)."""
        exponent = Fraction(text.strip())
        return cls(exponent.numerator, exponent.denominator)

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.num, self.den)

    def in_unit_range(self) -> bool:
        """True iff t lies in (1, 2]."""
        return 0 < self.num <= self.den

    def power_ge(self, count: int, n: int) -> bool:
        """Exact test of ``count <= t^n``."""
        return count ** self.den <= 1 << (n * self.num)

    def power_lt(self, count: int, n: int) -> bool:
        """Exact test of ``t^n < count``."""
        return not self.power_ge(count, n)

    def __float__(self) -> float:
        return 2.0 ** (self.num / self.den)

    def to_mpf(self) -> mpmath.mpf:
        return mpmath.power(2, mpmath.mpf(self.num) / self.den)

    def __str__(self) -> str:
        return f"2^({self.num}/{self.den})"


def _require_unit_range(t: TwoPowerRational) -> None:
    if not isinstance(t, TwoPowerRational):
        raise TypeError("threshold operations need an exact TwoPowerRational t")
    if not t.in_unit_range():
        raise ValueError(f"t = {t} is outside (1, 2]")


def _log_f(x: float) -> float:
    # (1+x) ln(1+x) - x ln x, computed without forming the large powers
    return (1.0 + x) * math.log1p(x) - x * math.log(x)


def eval_f(x: float) -> float:
    if not x > 0:
        raise ValueError(f"f is defined for x > 0, got {x}")
    return math.exp(_log_f(x))


def eval_g(x: float) -> float:
    if not x > 0:
        raise ValueError(f"g is defined for x > 0, got {x}")
    return 2.0**x * math.exp(_log_f(x))


def bisect_increasing(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    config: SolverConfig = DEFAULT_SOLVER,
) -> tuple[float, float]:
    """Shrink a bracket around the root of an increasing function.

    Requires ``func(lo) <= 0 <= func(hi)``.  Returns a final bracket
    ``(lo, hi)`` that still satisfies this sign condition and has width at
    most ``config.abs_tolerance`` unless ``max_iterations`` ran out first.
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_lo > 0 or f_hi < 0:
        raise ValueError(f"root not bracketed: f({lo})={f_lo}, f({hi})={f_hi}")
    if f_lo == 0:
        return lo, lo
    if f_hi == 0:
        return hi, hi
    for _ in range(config.max_iterations):
        if hi - lo <= config.abs_tolerance:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = func(mid)
        if f_mid == 0:
            return mid, mid
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _solve_increasing(func, target: float, bracket, config: SolverConfig) -> float:
    lo, hi = bisect_increasing(lambda x: func(x) - target, bracket[0], bracket[1], config)
    return 0.5 * (lo + hi)


def solve_a(t: float, config: SolverConfig = DEFAULT_SOLVER) -> float:
    """Root a(t) of f(x) = t for t in (1, 4]."""
    t = float(t)
    if not 1.0 < t <= 4.0:
        raise ValueError(f"solve_a needs t in (1, 4], got {t}")
    lo, hi = A_BRACKET
    if t <= eval_f(lo):
        return lo
    return _solve_increasing(eval_f, t, (lo, hi), config)


def solve_b(t: float, config: SolverConfig = DEFAULT_SOLVER) -> float:
    """Root b(t) of g(x) = t for t in (1, 8]."""
    t = float(t)
    if not 1.0 < t <= 8.0:
        raise ValueError(f"solve_b needs t in (1, 8], got {t}")
    lo, hi = B_BRACKET
    if t <= eval_g(lo):
        return lo
    return _solve_increasing(eval_g, t, (lo, hi), config)


def k_of(n: int, t: TwoPowerRational) -> int:
    """Largest k >= 0 with C(n+k, n) <= t^n (exact)."""
    _require_unit_range(t)
    if n < 1:
        raise ValueError("n must be positive")
    k = 0
    nxt = n + 1  # C(n+k+1, n)
    while t.power_ge(nxt, n):
        k += 1
        nxt = nxt * (n + k + 1) // (k + 1)
    return k


def l_of(n: int, t: TwoPowerRational) -> int:
    """Largest l >= 0 with 2^l C(n+l, n) <= t^n (exact)."""
    _require_unit_range(t)
    if n < 1:
        raise ValueError("n must be positive")
    l = 0
    binom_next = n + 1  # C(n+l+1, n)
    while t.power_ge(binom_next << (l + 1), n):
        l += 1
        binom_next = binom_next * (n + l + 1) // (l + 1)
    return l


def p_bracket(n: int, config: SolverConfig = DEFAULT_SOLVER) -> tuple[float, float]:
    """Closed-form interval [ln n / ln(3/2), ln n / ln(1/2 + 1/(1+b(2)))] containing p(n)."""
    b2 = solve_b(2.0, config)
    log_n = math.log(n)
    return log_n / math.log(1.5), log_n / math.log(0.5 + 1.0 / (1.0 + b2))


def _p_gap(n: int, shift: int) -> Callable[[float], float]:
    ratio = n / (n + shift)

    def gap(p: float) -> float:
        return ratio ** (1.0 / p) - (n ** (1.0 / p) - 0.5)

    return gap


def p_of(n: int, config: SolverConfig = DEFAULT_SOLVER) -> float:
    """Crossing point p(n) of (n/(n+floor(b(2) n)))^(1/p) and n^(1/p) - 1/2.

    The first expression increases and the second decreases in p, so their
    difference is bracketed on the closed-form interval widened by 10%.
    The upper end of the final bisection bracket is returned.
    """
    if n < 3:
        raise ValueError(f"p_of needs n >= 3, got {n}")
    shift = math.floor(solve_b(2.0, config) * n)
    lo, hi = p_bracket(n, config)
    _, upper = bisect_increasing(_p_gap(n, shift), 0.9 * lo, 1.1 * hi, config)
    return upper


def p_residual(n: int, p: float, config: SolverConfig = DEFAULT_SOLVER) -> float:
    shift = math.floor(solve_b(2.0, config) * n)
    return abs(_p_gap(n, shift)(p))


def high_precision_power(t: TwoPowerRational, n: int) -> mpmath.mpf:
    """t^n at the package working precision (cross-check for the exact comparisons)."""
    with mpmath.workdps(precision_digits()):
        return mpmath.power(2, mpmath.mpf(n * t.num) / t.den)
