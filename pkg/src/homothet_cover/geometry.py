"""Canonical bodies and their constructive lattice decompositions.

Two scaled bodies in R^n are used, both with p-th-power budget n:

    orthant body   {x : x_i >= 0, sum x_i^p <= n}
    ball body      {x : sum |x_i|^p <= n}

Dilating either body by ((n+k)/n)^(1/p) keeps it inside the union of its
translates by M1(n, k) (orthant) or M2(n, k) (ball).  ``decompose_orthant``
and ``decompose_ball`` produce the translate and the remainder for a given
point, following a three-way case split on the coordinates of magnitude >= 1.

The decomposition core is subtraction-only, so it works unchanged on floats,
``Fraction`` coordinates, or integer numerators over a common ``unit``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence

import numpy as np

from .combinatorics import LatticeVector

MEMBERSHIP_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-12


class PreconditionError(ValueError):
    """An input lies outside the domain an operation is defined on."""


@dataclass(frozen=True)
class OrthantBallSpec:
    """{x : x_i >= 0, sum x_i^p <= n}."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.p < 1:
            raise ValueError("p must be >= 1")


@dataclass(frozen=True)
class BallSpec:
    """{x : sum |x_i|^p <= n}."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.p < 1:
            raise ValueError("p must be >= 1")


@dataclass(frozen=True)
class DecompositionResult:
    """``point = lattice + remainder``; ``case_tag`` is the case that fired (1, 2 or 3)."""

    lattice: LatticeVector
    remainder: tuple
    case_tag: int

    def to_dict(self) -> dict:
        return {
            "lattice": list(self.lattice),
            "remainder": [_real_to_json(r) for r in self.remainder],
            "case": self.case_tag,
        }


def _real_to_json(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    return format(float(x), ".17g")


def _check_dim(z: Sequence, n: int) -> None:
    if len(z) != n:
        raise ValueError(f"dimension mismatch: point has {len(z)} coordinates, body has n={n}")


def _power_sum(values, p: float):
    """sum |v|^p, exact when p == 1 and values are rational."""
    if p == 1:
        return sum(abs(v) for v in values)
    return math.fsum(abs(float(v)) ** p for v in values)


def member_orthant(z: Sequence[Real], spec: OrthantBallSpec, tol: float = MEMBERSHIP_TOL) -> bool:
    _check_dim(z, spec.n)
    if any(zi < -tol for zi in z):
        return False
    return _power_sum([max(zi, 0) for zi in z], spec.p) <= spec.n + tol


def member_ball(z: Sequence[Real], spec: BallSpec, tol: float = MEMBERSHIP_TOL) -> bool:
    _check_dim(z, spec.n)
    return _power_sum(z, spec.p) <= spec.n + tol


def lp_inequality_gap(x: float, a: float, p: float) -> float:
    """``|x|^p - |a|^p - |x-a|^p``; nonnegative whenever x >= a >= 0 or x <= a <= 0."""
    return abs(x) ** p - abs(a) ** p - abs(x - a) ** p


def _sgn(v) -> int:
    return 1 if v > 0 else (-1 if v < 0 else 0)


def lattice_split(z: Sequence, k: int, signed: bool, unit=1) -> tuple[list[int], int]:
    """Choose the lattice translate for ``z`` (coordinates measured in ``unit``).

    Returns ``(lattice, case_tag)``.  With ``unit != 1`` the coordinates are
    integer numerators over ``unit`` and the lattice is in whole units.
    """
    mags = [abs(v) for v in z] if signed else list(z)
    big = [i for i, v in enumerate(mags) if v >= unit]
    lattice = [0] * len(z)
    if len(big) >= k:
        case = 1
        for i in big[:k]:
            lattice[i] = 1
    else:
        floors = {i: int(mags[i] // unit) for i in big}
        if sum(floors.values()) >= k:
            case = 2
            budget = k
            for i in big:
                take = min(floors[i], budget)
                lattice[i] = take
                budget -= take
                if budget == 0:
                    break
        else:
            case = 3
            for i in big:
                lattice[i] = floors[i]
    if signed:
        lattice = [c * _sgn(v) for c, v in zip(lattice, z)]
    return lattice, case


def _decompose(z: Sequence, k: int, signed: bool) -> DecompositionResult:
    lattice, case = lattice_split(z, k, signed)
    remainder = tuple(zi - li for zi, li in zip(z, lattice))
    return DecompositionResult(LatticeVector(lattice), remainder, case)


def decompose_orthant(z: Sequence[Real], n: int, k: int, p: float = 1.0) -> DecompositionResult:
    """Split z in the ((n+k)/n)^(1/p)-dilated orthant body as lattice (in M1) plus remainder."""
    _check_dim(z, n)
    if k < 1:
        raise ValueError("k must be positive")
    if any(zi < -MEMBERSHIP_TOL for zi in z):
        raise PreconditionError("point has a negative coordinate")
    total = _power_sum([max(zi, 0) for zi in z], p)
    # sum |z_i|^p <= n + k is the ((n+k)/n)^(1/p) dilate of the budget-n body
    if total > n + k + MEMBERSHIP_TOL:
        raise PreconditionError(f"sum z_i^p = {float(total):.17g} exceeds n + k = {n + k}")
    return _decompose(z, k, signed=False)


def decompose_ball(z: Sequence[Real], n: int, k: int, p: float = 1.0) -> DecompositionResult:
    """Split z in the ((n+k)/n)^(1/p)-dilated ball body as lattice (in M2) plus remainder."""
    _check_dim(z, n)
    if k < 1:
        raise ValueError("k must be positive")
    total = _power_sum(z, p)
    if total > n + k + MEMBERSHIP_TOL:
        raise PreconditionError(f"sum |z_i|^p = {float(total):.17g} exceeds n + k = {n + k}")
    return _decompose(z, k, signed=True)


# -- sampling -------------------------------------------------------------

BOUNDARY_FRACTION = 0.25


def unit_lp_batch(n: int, p: float, size: int, rng: np.random.Generator, signed: bool) -> np.ndarray:
    """Points of the unit l_p ball (or its nonnegative part), shape (size, n).

    Radial part is uniform-in-volume except for a quarter of the draws, which
    are pushed to the boundary; the mixture keeps full support while putting
    weight on the tight cases.
    """
    # |x_i| with density proportional to exp(-x^p): x = G^(1/p), G ~ Gamma(1/p)
    mags = rng.gamma(1.0 / p, 1.0, size=(size, n)) ** (1.0 / p)
    norms = np.sum(mags**p, axis=1) ** (1.0 / p)
    norms[norms == 0] = 1.0
    directions = mags / norms[:, None]
    radii = rng.random(size) ** (1.0 / n)
    radii[rng.random(size) < BOUNDARY_FRACTION] = 1.0
    pts = directions * radii[:, None]
    if signed:
        pts *= rng.choice([-1.0, 1.0], size=(size, n))
    return pts


def _clip_to_budget(pts: np.ndarray, p: float, budget: float) -> np.ndarray:
    # rounding can push boundary draws a few ulps outside
    totals = np.sum(np.abs(pts) ** p, axis=1)
    over = totals > budget
    if np.any(over):
        pts[over] *= ((budget / totals[over]) ** (1.0 / p))[:, None] * (1 - 1e-15)
    return pts


def sample_scaled_orthant_batch(n: int, k: int, p: float, size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    budget = float(n + k)
    pts = unit_lp_batch(n, p, size, rng, signed=False) * budget ** (1.0 / p)
    return _clip_to_budget(pts, p, budget)


def sample_scaled_ball_batch(n: int, k: int, p: float, size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    budget = float(n + k)
    pts = unit_lp_batch(n, p, size, rng, signed=True) * budget ** (1.0 / p)
    return _clip_to_budget(pts, p, budget)


def sample_scaled_orthant(n: int, k: int, p: float, seed: int) -> tuple[float, ...]:
    """One point of the dilated orthant body, deterministic per seed."""
    return tuple(float(v) for v in sample_scaled_orthant_batch(n, k, p, 1, seed)[0])


def sample_scaled_ball(n: int, k: int, p: float, seed: int) -> tuple[float, ...]:
    """One point of the dilated ball body, deterministic per seed."""
    return tuple(float(v) for v in sample_scaled_ball_batch(n, k, p, 1, seed)[0])
