"""Acceptance criteria, one test per criterion, each with its runtime budget.

A pass/fail line per criterion is printed in the terminal summary.
"""

import io
import json
import math
import time
from fractions import Fraction

import mpmath
import numpy as np

from homothet_cover.cli import EXIT_OK, EXIT_VERIFY_FAILED, run
from homothet_cover.combinatorics import (
    card_M1,
    card_M2,
    enumerate_M1,
    enumerate_M2,
    robbins_bracket,
)
from homothet_cover.covering import bound_report
from homothet_cover.geometry import (
    BallSpec,
    OrthantBallSpec,
    decompose_ball,
    decompose_orthant,
    member_ball,
    member_orthant,
    sample_scaled_ball_batch,
    sample_scaled_orthant_batch,
)
from homothet_cover.scalars import TwoPowerRational, k_of, l_of, p_bracket, p_of, p_residual, solve_a, solve_b


def criterion(label):
    def mark(fn):
        fn.criterion = label
        return fn

    return mark


class Budget:
    def __init__(self, seconds, record):
        self.seconds = seconds
        self.record = record

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        self.record("detail", f"({self.elapsed:.2f}s of {self.seconds}s)")
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s, budget {self.seconds}s"


@criterion("1. constants a(2), b(2), a(sqrt 2)")
def test_c01_constants(record_property):
    with Budget(1, record_property):
        assert abs(solve_a(2) - 0.293815) <= 5e-6
        assert abs(solve_b(2) - 0.205597) <= 5e-6
        assert abs(solve_a(math.sqrt(2)) - 0.104828) <= 5e-6


@criterion("2. headline bound 4/5 for n=6, 9 vertices")
def test_c02_headline(record_property):
    with Budget(1, record_property):
        rep = bound_report(6, 9, False)
        assert rep.theorem_bound == Fraction(4, 5)
        assert k_of(8, TwoPowerRational(3, 4)) == 2
        assert rep.center_count == card_M1(8, 2) == 45 <= 64


@criterion("3. asymptotic remark, M-1 = 2n")
def test_c03_asymptotic(record_property):
    limit = 1 / 1.104828
    with Budget(10, record_property):
        reps = [bound_report(n, 2 * n + 1) for n in (50, 200, 500)]
        for rep in reps:
            assert 0.90 < rep.theorem_bound <= 0.9052
            assert rep.theorem_bound <= rep.floor_bound
            # the floor-based bound sits above the limit
            assert rep.floor_bound >= limit
        bounds = [rep.theorem_bound for rep in reps]
        assert bounds == sorted(bounds)
        assert abs(reps[-1].theorem_bound - limit) <= 5e-3
        assert abs(reps[-1].floor_bound - limit) <= 5e-3


@criterion("4. degenerate comparator M = 2^n")
def test_c04_degenerate(record_property):
    with Budget(1, record_property):
        for n in range(3, 11):
            rep = bound_report(n, 2**n, False)
            assert rep.theorem_bound == 1 - Fraction(1, 2**n)
            assert rep.best == rep.general_bound == 1 - Fraction(1, n + 1)


@criterion("5. threshold lemma suite, n <= 200")
def test_c05_threshold_lemma(record_property):
    with Budget(30, record_property):
        for j in range(1, 9):
            t = TwoPowerRational(j, 8)
            a, b = solve_a(float(t)), solve_b(float(t))
            for n in range(1, 201):
                k, l = k_of(n, t), l_of(n, t)
                assert k >= math.floor(a * n)
                assert l >= math.floor(b * n)
                assert (k > 0) == t.power_ge(n + 1, n)
                assert (l > 0) == t.power_ge(2 * (n + 1), n)


@criterion("6. cardinality oracles")
def test_c06_cardinalities(record_property):
    with Budget(30, record_property):
        for n in range(1, 7):
            for k in range(0, 7):
                assert sum(1 for _ in enumerate_M1(n, k)) == card_M1(n, k)
                assert sum(1 for _ in enumerate_M2(n, k)) == card_M2(n, k)
        for n in range(1, 21):
            for k in range(0, 21):
                assert card_M2(n, k) <= 2**k * card_M1(n, k)


@criterion("7. Robbins bracket, n <= 50")
def test_c07_robbins(record_property):
    with Budget(5, record_property):
        for n in range(1, 51):
            lower, upper = robbins_bracket(n)
            with mpmath.workdps(60):
                assert lower < math.factorial(n) < upper
        lower, upper = robbins_bracket(5)
        # lower = 119.96985..., quoted to two decimals as 119.97
        assert round(float(lower), 2) == 119.97
        assert lower < 120 < upper < 120.005


def _decomposition_failures(n, k, p, samples, seed):
    failures = 0
    orth, ball = OrthantBallSpec(n, p), BallSpec(n, p)
    m1 = set(enumerate_M1(n, k)) if n <= 4 and k <= 4 else None
    m2 = set(enumerate_M2(n, k)) if n <= 4 and k <= 4 else None
    for sampler, decompose, member, spec, lattice_set, in_set in (
        (sample_scaled_orthant_batch, decompose_orthant, member_orthant, orth, m1,
         lambda v: v.in_M1(k)),
        (sample_scaled_ball_batch, decompose_ball, member_ball, ball, m2,
         lambda v: v.in_M2(k)),
    ):
        pts = sampler(n, k, p, samples, seed)
        for z in pts.tolist():
            res = decompose(z, n, k, p)
            ok = in_set(res.lattice) and member(res.remainder, spec, 1e-9)
            if lattice_set is not None:
                ok = ok and res.lattice in lattice_set
            recon = max(abs(zi - (li + ri)) for zi, li, ri in zip(z, res.lattice, res.remainder))
            ok = ok and recon <= 1e-12
            failures += not ok
    return failures


@criterion("8. decomposition property suite")
def test_c08_decomposition_suite(record_property):
    with Budget(120, record_property):
        total = 0
        for n in range(1, 7):
            for k in range(1, 5):
                for p in (1.0, 1.5, 2.0, 3.0):
                    total += _decomposition_failures(n, k, p, 10_000, seed=1000 * n + 10 * k + int(2 * p))
        assert total == 0


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return run([str(a) for a in argv], out=out, err=err), out.getvalue()


CERT_CONFIGS = [(3, count, False) for count in range(4, 9)] + [(3, 3, True), (6, 9, False)]


@criterion("9. certificate end-to-end + mutations")
def test_c09_certificates(tmp_path, record_property):
    with Budget(300, record_property):
        for n, count, symmetric in CERT_CONFIGS:
            for rep in range(20):
                seed = 7919 * n + 104729 * count + rep + (1 << 20) * symmetric
                rng = np.random.default_rng(seed)
                key = "symmetric_half" if symmetric else "vertices"
                poly_path = tmp_path / f"poly_{n}_{count}_{symmetric}_{rep}.json"
                poly_path.write_text(json.dumps({"dim": n, key: rng.normal(size=(count, n)).tolist()}))
                cert_path = tmp_path / f"cert_{n}_{count}_{symmetric}_{rep}.json"
                code, _ = _cli("certify", "--in", poly_path, "--out", cert_path, "--n", n)
                assert code == EXIT_OK
                code, _ = _cli("verify", "--poly", poly_path, "--cert", cert_path,
                               "--samples", 10_000, "--seed", seed)
                assert code == EXIT_OK, (n, count, symmetric, rep)

                cert = json.loads(cert_path.read_text())
                removed = dict(cert, centers=[c for i, c in enumerate(cert["centers"])
                                              if i != seed % len(cert["centers"])])
                bad_path = tmp_path / "removed.json"
                bad_path.write_text(json.dumps(removed))
                code, _ = _cli("verify", "--poly", poly_path, "--cert", bad_path,
                               "--samples", 10_000, "--seed", seed)
                assert code == EXIT_VERIFY_FAILED, ("center removal undetected", n, count, symmetric, rep)

                halved = dict(cert, gamma={"num": cert["gamma"]["num"], "den": 2 * cert["gamma"]["den"]})
                bad_path.write_text(json.dumps(halved))
                code, _ = _cli("verify", "--poly", poly_path, "--cert", bad_path,
                               "--samples", 10_000, "--seed", seed)
                assert code == EXIT_VERIFY_FAILED, ("gamma halving undetected", n, count, symmetric, rep)


@criterion("10. p(n) brackets, 3 <= n <= 100")
def test_c10_p_brackets(record_property):
    with Budget(5, record_property):
        for n in range(3, 101):
            p = p_of(n)
            lo, hi = p_bracket(n)
            assert lo <= p <= hi, (n, lo, p, hi)
            assert p_residual(n, p) <= 1e-10
