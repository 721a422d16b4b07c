"""Covering bounds and explicit homothetic covering certificates.

A polytope K with M vertices is the image of the standard (M-1)-simplex
under the affine map S(x) = v0 + sum x_i (v_i - v0); a centrally symmetric
polytope conv{+-v_1..+-v_m} is the image of the m-dimensional cross-polytope
under S(x) = sum x_i v_i.  Coverings of the canonical body Q by translates of
gamma*Q therefore push forward to coverings of K:

    S(c + gamma*y) = (S(c) - gamma*S(0)) + gamma*S(y).

The canonical coverings come from the lattice decompositions in
:mod:`homothet_cover.geometry` with p = 1: for Q the standard simplex,
(m+k)Q lies in mQ + M1(m, k), so Q is covered by the translates
w/(m+k) + (m/(m+k))Q, w in M1(m, k).  The cross-polytope case is the same
with M2.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .combinatorics import LatticeVector, card_M1, card_M2, enumerate_M1, enumerate_M2
from .geometry import PreconditionError, lattice_split, unit_lp_batch
from .scalars import TwoPowerRational, k_of, l_of, p_of, solve_a, solve_b

IMAGE_TOL = 1e-9
SIMPLEX = "simplex"
CROSSPOLYTOPE = "crosspolytope"

# verification samples q in Q as integer numerators over this denominator
_SAMPLE_DENOM = 1 << 50
_SHARD_SIZE = 4096
_SNAP_FRACTION = 0.05
_MAX_FAILURE_EXAMPLES = 10


class NoShrinkingCertificate(PreconditionError):
    """The vertex count is too large for the lattice construction to shrink."""


class InconsistentCertificate(ValueError):
    """A certificate does not match the polytope it is checked against."""


def format_real(x: float) -> str:
    return format(float(x), ".17g")


# -- polytopes and lift maps ----------------------------------------------


@dataclass
class PolytopeV:
    """Polytope in R^n given by its vertex list, or by the half list v_1..v_m of conv{+-v_i}."""

    n: int
    vertices: list[tuple[float, ...]] = field(default_factory=list)
    symmetric_half: Optional[list[tuple[float, ...]]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        self.vertices = [tuple(float(c) for c in v) for v in self.vertices]
        if self.symmetric_half is not None:
            if self.vertices:
                raise ValueError("give either vertices or symmetric_half, not both")
            self.symmetric_half = [tuple(float(c) for c in v) for v in self.symmetric_half]
        for v in self.generators:
            if len(v) != self.n:
                raise ValueError(f"vertex {v} does not have dimension {self.n}")
            if not all(math.isfinite(c) for c in v):
                raise ValueError(f"vertex {v} has a non-finite coordinate")

    @property
    def symmetric(self) -> bool:
        return self.symmetric_half is not None

    @property
    def generators(self) -> list[tuple[float, ...]]:
        return self.symmetric_half if self.symmetric else self.vertices

    @property
    def vertex_count(self) -> int:
        return 2 * len(self.symmetric_half) if self.symmetric else len(self.vertices)

    def all_vertices(self) -> list[tuple[float, ...]]:
        if not self.symmetric:
            return list(self.vertices)
        return [v for h in self.symmetric_half for v in (h, tuple(-c for c in h))]

    def to_dict(self) -> dict:
        key = "symmetric_half" if self.symmetric else "vertices"
        return {"dim": self.n, key: [[format_real(c) for c in v] for v in self.generators]}

    @classmethod
    def from_dict(cls, data: dict) -> "PolytopeV":
        if "dim" not in data:
            raise ValueError("polytope JSON needs a 'dim' field")
        n = int(data["dim"])
        if "symmetric_half" in data:
            if "vertices" in data:
                raise ValueError("polytope JSON has both 'vertices' and 'symmetric_half'")
            half = [[float(c) for c in v] for v in data["symmetric_half"]]
            return cls(n, symmetric_half=half)
        if "vertices" not in data:
            raise ValueError("polytope JSON needs 'vertices' or 'symmetric_half'")
        return cls(n, vertices=[[float(c) for c in v] for v in data["vertices"]])


@dataclass(frozen=True)
class AffineMapSpec:
    """x -> matrix @ x + offset, from R^m to R^n."""

    matrix: np.ndarray
    offset: np.ndarray

    @property
    def source_dim(self) -> int:
        return self.matrix.shape[1]

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float) + self.offset

    def apply_rows(self, xs: np.ndarray) -> np.ndarray:
        return xs @ self.matrix.T + self.offset


def lift_map(poly: PolytopeV) -> AffineMapSpec:
    """Affine map sending the canonical simplex / cross-polytope onto ``poly``.

    This is the composite of the lift v_i -> (v_i, e_i) into R^(n+m) and the
    coordinate projection back onto R^n.
    """
    if poly.symmetric:
        if not poly.symmetric_half:
            raise ValueError("symmetric_half is empty")
        matrix = np.array(poly.symmetric_half, dtype=float).T
        return AffineMapSpec(matrix.reshape(poly.n, -1), np.zeros(poly.n))
    if len(poly.vertices) < 2:
        raise ValueError("simplex lift needs at least 2 vertices")
    verts = np.array(poly.vertices, dtype=float)
    v0 = verts[0]
    return AffineMapSpec((verts[1:] - v0).T.copy(), v0.copy())


# -- canonical coverings ----------------------------------------------------


def q_cover_simplex(m: int, k: int) -> tuple[Fraction, list[tuple[Fraction, ...]]]:
    """Covering of the standard m-simplex by C(m+k, m) copies scaled by m/(m+k)."""
    if m < 1 or k < 1:
        raise ValueError("q_cover_simplex needs m, k >= 1")
    scale = m + k
    return Fraction(m, scale), [tuple(Fraction(c, scale) for c in w) for w in enumerate_M1(m, k)]


def q_cover_cross(m: int, l: int) -> tuple[Fraction, list[tuple[Fraction, ...]]]:
    """Covering of the m-dimensional cross-polytope by |M2(m, l)| copies scaled by m/(m+l)."""
    if m < 1 or l < 1:
        raise ValueError("q_cover_cross needs m, l >= 1")
    scale = m + l
    return Fraction(m, scale), [tuple(Fraction(c, scale) for c in w) for w in enumerate_M2(m, l)]


# -- certificates -------------------------------------------------------------


@dataclass
class CoveringCertificate:
    gamma: Fraction
    centers: list[tuple[float, ...]]
    lift_kind: str
    m: int
    k: int
    q_centers: Optional[list[tuple[Fraction, ...]]] = None

    def __post_init__(self):
        if self.lift_kind not in (SIMPLEX, CROSSPOLYTOPE):
            raise ValueError(f"unknown lift_kind {self.lift_kind!r}")
        self.gamma = Fraction(self.gamma)

    @property
    def expected_count(self) -> int:
        return card_M1(self.m, self.k) if self.lift_kind == SIMPLEX else card_M2(self.m, self.k)

    def to_dict(self) -> dict:
        return {
            "gamma": {"num": self.gamma.numerator, "den": self.gamma.denominator},
            "lift_kind": self.lift_kind,
            "m": self.m,
            "k": self.k,
            "centers": [[format_real(c) for c in v] for v in self.centers],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "CoveringCertificate":
        try:
            gamma = Fraction(int(data["gamma"]["num"]), int(data["gamma"]["den"]))
            centers = [tuple(float(c) for c in v) for v in data["centers"]]
            return cls(gamma, centers, data["lift_kind"], int(data["m"]), int(data["k"]))
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed certificate JSON: {exc}") from exc


def make_certificate(poly: PolytopeV, n: Optional[int] = None) -> CoveringCertificate:
    """Certificate with at most 2^n centers covering ``poly`` by copies shrunk by gamma < 1.

    Symmetric input (``symmetric_half``) takes the cross-polytope route,
    everything else the simplex route.
    """
    n = poly.n if n is None else n
    if n != poly.n:
        raise ValueError(f"n = {n} does not match polytope dimension {poly.n}")
    smap = lift_map(poly)
    if poly.symmetric:
        m = len(poly.symmetric_half)
        if m < n:
            raise PreconditionError(f"symmetric polytope needs m >= n half-vertices, got m = {m}")
        k = l_of(m, TwoPowerRational(n, m))
        if k == 0:
            raise NoShrinkingCertificate(
                f"no shrinking certificate: 2m = {2 * m} vertices needs 2(m+1) <= 2^n = {2 ** n}"
            )
        gamma, q_centers = q_cover_cross(m, k)
        kind = CROSSPOLYTOPE
    else:
        count = len(poly.vertices)
        if count < n + 1:
            raise PreconditionError(f"need at least n+1 = {n + 1} vertices, got {count}")
        if count > 2**n:
            raise NoShrinkingCertificate(
                f"no shrinking certificate: {count} vertices exceeds 2^n = {2 ** n}"
            )
        m = count - 1
        k = k_of(m, TwoPowerRational(n, m))
        gamma, q_centers = q_cover_simplex(m, k)
        kind = SIMPLEX
    if len(q_centers) > 2**n:
        raise AssertionError("center count exceeds 2^n")  # excluded by the choice of k
    qs = np.array([[float(c) for c in q] for q in q_centers], dtype=float)
    shift = float(gamma) * smap.offset
    centers = [tuple(row) for row in (smap.apply_rows(qs) - shift)]
    return CoveringCertificate(gamma, centers, kind, m, k, q_centers)


@dataclass
class VerificationReport:
    samples: int
    failures: int
    max_residual: float
    case_counts: dict[int, int]
    failure_examples: list[dict]

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "failures": self.failures,
            "max_residual": format_real(self.max_residual),
            "case_counts": {str(c): self.case_counts.get(c, 0) for c in (1, 2, 3)},
            "failure_examples": self.failure_examples,
            "ok": self.ok,
        }


def _sample_q(m: int, size: int, rng: np.random.Generator, signed: bool, scale: int) -> list[list[int]]:
    """Points of Q as integer numerators over _SAMPLE_DENOM, exactly inside Q."""
    pts = unit_lp_batch(m, 1.0, size, rng, signed=signed)
    # a few points snapped to the (1/scale)-grid exercise the case-split ties
    snap = rng.random(size) < _SNAP_FRACTION
    pts[snap] = np.trunc(pts[snap] * scale) / scale
    nums = np.trunc(pts * _SAMPLE_DENOM).astype(np.int64).tolist()
    for row in nums:
        excess = sum(abs(v) for v in row) - _SAMPLE_DENOM
        if excess > 0:
            i = max(range(m), key=lambda j: abs(row[j]))
            row[i] -= excess if row[i] > 0 else -excess
    return nums


def _verify_shard(args) -> tuple[int, float, dict[int, int], list[dict]]:
    (matrix, offset, centers, gamma_num, gamma_den, kind, m, k, size, seed, start) = args
    signed = kind == CROSSPOLYTOPE
    scale = m + k
    rng = np.random.default_rng(seed)
    nums = _sample_q(m, size, rng, signed, scale)
    D = _SAMPLE_DENOM

    failures = 0
    cases = {1: 0, 2: 0, 3: 0}
    examples: list[dict] = []
    remainders = []
    witnesses = []
    exact_ok = []
    # y = r / (scale * gamma * D) must lie in Q
    y_budget = scale * gamma_num * D
    for a in nums:
        z = [scale * v for v in a]
        w, case = lattice_split(z, k, signed, unit=D)
        cases[case] += 1
        lv = LatticeVector(w)
        r = [zi - wi * D for zi, wi in zip(z, w)]
        in_m = lv.in_M2(k) if signed else lv.in_M1(k)
        if signed:
            in_q = sum(abs(v) for v in r) * gamma_den <= y_budget
        else:
            in_q = all(v >= 0 for v in r) and sum(r) * gamma_den <= y_budget
        witnesses.append(w)
        remainders.append(r)
        exact_ok.append((in_m, in_q))

    q = np.array(nums, dtype=float) / D
    gamma = gamma_num / gamma_den
    y = np.array(remainders, dtype=float) * (gamma_den / (scale * gamma_num * D))
    targets = (q @ matrix.T + offset) - gamma * (y @ matrix.T + offset)
    if len(centers):
        dist, _ = cKDTree(centers).query(targets, k=1, p=np.inf)
    else:
        dist = np.full(len(targets), np.inf)
    max_res = 0.0
    for idx, ((in_m, in_q), d) in enumerate(zip(exact_ok, dist)):
        reason = None
        if not in_m:
            reason = "witness outside lattice set"
        elif not in_q:
            reason = "remainder outside scaled body"
        elif not d <= IMAGE_TOL:
            reason = "no matching center"
        else:
            max_res = max(max_res, float(d))
        if reason is not None:
            failures += 1
            if len(examples) < _MAX_FAILURE_EXAMPLES:
                examples.append(
                    {"sample": start + idx, "witness": witnesses[idx], "reason": reason,
                     "residual": format_real(d)}
                )
    return failures, max_res, cases, examples


def verify_certificate(
    poly: PolytopeV,
    cert: CoveringCertificate,
    samples: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> VerificationReport:
    """Monte Carlo check that the certificate covers ``poly``.

    Each sampled q in the canonical body is split exactly (integer arithmetic)
    as q = w/(m+k) + gamma*y; the witness w must lie in the lattice set, y in
    Q, and the image point S(q) - gamma*S(y) must coincide with a listed
    center to within IMAGE_TOL.  Samples are split into fixed-size shards with
    seeds spawned from ``seed``, so the result does not depend on ``workers``.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    smap = lift_map(poly)
    kind = CROSSPOLYTOPE if poly.symmetric else SIMPLEX
    if cert.lift_kind != kind:
        raise InconsistentCertificate(f"certificate is {cert.lift_kind}, polytope needs {kind}")
    if cert.m != smap.source_dim:
        raise InconsistentCertificate(f"certificate m = {cert.m}, polytope lift has m = {smap.source_dim}")
    if cert.k < 1:
        raise InconsistentCertificate("certificate k must be positive")
    if cert.gamma <= 0:
        raise InconsistentCertificate("certificate gamma must be positive")
    centers = np.array(cert.centers, dtype=float).reshape(-1, poly.n)

    n_shards = -(-samples // _SHARD_SIZE)
    seeds = np.random.SeedSequence(seed).spawn(n_shards)
    jobs = []
    for i, ss in enumerate(seeds):
        size = min(_SHARD_SIZE, samples - i * _SHARD_SIZE)
        jobs.append((smap.matrix, smap.offset, centers, cert.gamma.numerator, cert.gamma.denominator,
                     kind, cert.m, cert.k, size, ss, i * _SHARD_SIZE))
    if workers > 1 and n_shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_shard, jobs))
    else:
        results = [_verify_shard(job) for job in jobs]

    failures, max_res, cases, examples = 0, 0.0, {1: 0, 2: 0, 3: 0}, []
    for f, r, c, ex in results:
        failures += f
        max_res = max(max_res, r)
        for key, val in c.items():
            cases[key] += val
        examples.extend(ex)
    return VerificationReport(samples, failures, max_res, cases, examples[:_MAX_FAILURE_EXAMPLES])


# -- bounds -------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    n: int
    vertex_count: int
    symmetric: bool
    t: TwoPowerRational
    threshold: int
    theorem_bound: Fraction
    floor_bound: Fraction
    general_bound: Fraction
    general_applicable: bool
    best: Fraction
    shrinking: bool
    center_count: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "vertex_count": self.vertex_count,
            "symmetric": self.symmetric,
            "t": {"num": self.t.num, "den": self.t.den},
            "threshold": self.threshold,
            "theorem_bound": _fraction_dict(self.theorem_bound),
            "theorem_bound_decimal": format_real(self.theorem_bound),
            "floor_bound": _fraction_dict(self.floor_bound),
            "floor_bound_decimal": format_real(self.floor_bound),
            "general_bound": _fraction_dict(self.general_bound),
            "general_applicable": self.general_applicable,
            "best": _fraction_dict(self.best),
            "best_decimal": format_real(self.best),
            "shrinking": self.shrinking,
            "center_count": self.center_count,
        }


def _fraction_dict(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _floor_scaled_root(solver, t: TwoPowerRational, m: int) -> int:
    t_float = float(t)
    if t_float <= 1.0:
        return 0
    return math.floor(solver(t_float) * m)


def bound_report(n: int, vertex_count: int, symmetric: bool = False) -> BoundReport:
    """Upper bounds on the 2^n-covering functional of a polytope known only by its vertex count."""
    if n < 3:
        raise PreconditionError(f"bound_report needs n >= 3, got {n}")
    if symmetric:
        if vertex_count % 2:
            raise PreconditionError("a centrally symmetric polytope has an even vertex count")
        m = vertex_count // 2
        if m < n:
            raise PreconditionError(f"symmetric polytope needs at least 2n = {2 * n} vertices")
        t = TwoPowerRational(n, m)
        threshold = l_of(m, t)
        floor_part = _floor_scaled_root(solve_b, t, m)
        center_count = card_M2(m, threshold)
    else:
        if vertex_count < n + 1:
            raise PreconditionError(f"need at least n+1 = {n + 1} vertices, got {vertex_count}")
        m = vertex_count - 1
        t = TwoPowerRational(n, m)
        threshold = k_of(m, t)
        floor_part = _floor_scaled_root(solve_a, t, m)
        center_count = card_M1(m, threshold)
    theorem = Fraction(m, m + threshold)
    floor_bound = Fraction(m, m + floor_part)
    general = 1 - Fraction(1, n + 1)
    # the comparator 1 - 1/(n+1) only covers polytopes with at most 2^n vertices
    general_applicable = vertex_count <= 2**n
    best = min(theorem, general) if general_applicable else theorem
    return BoundReport(n, vertex_count, symmetric, t, threshold, theorem, floor_bound, general,
                       general_applicable, best, theorem < 1, center_count)


@dataclass(frozen=True)
class LpBallBound:
    n: int
    p: float
    lattice_term: float
    distance_term: float
    bound: float
    p_n: float
    uniform_bound: float
    vacuous: bool

    def to_dict(self) -> dict:
        return {k: (format_real(v) if isinstance(v, float) else v) for k, v in self.__dict__.items()}


def lp_ball_bound(n: int, p: float) -> LpBallBound:
    """min{(n/(n+floor(b(2) n)))^(1/p), n^(1/p) - 1/2} for the 2^n-covering functional of the l_p ball.

    ``vacuous`` flags small n where floor(b(2) n) = 0 and the lattice term is 1.
    """
    if n < 3:
        raise PreconditionError(f"lp_ball_bound needs n >= 3, got {n}")
    if p < 1:
        raise PreconditionError(f"lp_ball_bound needs p >= 1, got {p}")
    shift = math.floor(solve_b(2.0) * n)
    ratio = n / (n + shift)
    lattice_term = ratio ** (1.0 / p)
    distance_term = n ** (1.0 / p) - 0.5
    p_n = p_of(n)
    return LpBallBound(n, float(p), lattice_term, distance_term, min(lattice_term, distance_term),
                       p_n, ratio ** (1.0 / p_n), shift == 0)


def theorem_table(n_from: int, n_to: int, ratio: int) -> list[BoundReport]:
    """Bound reports for vertex count ratio*n + 1, n in [n_from, n_to]."""
    return [bound_report(n, ratio * n + 1) for n in range(n_from, n_to + 1)]
