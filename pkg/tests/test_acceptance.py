"""Acceptance checks, one test per criterion.

Each test prints a ``[ACCEPT n] PASS|FAIL`` line straight to the terminal,
so ``pytest -v`` output doubles as the acceptance report.
"""

import contextlib
import io
import json
import time

import numpy as np
import pytest

from opstable.cli import main
from opstable.closedform import EMPTY, critical_beta, dim_double_points, lemma_alpha_check
from opstable.errors import DegenerateSpectrum
from opstable.numlab import (
    CONVERGENT,
    DIVERGENT,
    SeriesTerm,
    doubling_radii,
    dyadic_series_case_d,
    dyadic_series_sum,
    estimate_critical_beta_series,
    existence_integral_estimate,
)
from opstable.psi import PsiModel
from opstable.spectral import analyze_exponent, profile_from_alphas, validate_exponent

SERIES_SET = [(2.0, 1.0), (1.9, 1.6), (1.8, 1.2), (2.0, 2.0, 2.0), (2.0, 1.8, 1.6)]
M_MAX = {2: 12, 3: 8}

_estimates: dict = {}


@pytest.fixture
def announce(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPT {n}] {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def series_estimate(alphas):
    # shared by the bracket check and the rescaling check
    if alphas not in _estimates:
        t0 = time.perf_counter()
        est = estimate_critical_beta_series(alphas, len(alphas), tol=0.1, m_max=M_MAX[len(alphas)])
        _estimates[alphas] = (est, time.perf_counter() - t0)
    return _estimates[alphas]


def test_duality_identity(announce):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst, count = 0.0, {2: 0, 3: 0}
    for d in (2, 3):
        while count[d] < 10_000:
            alphas = tuple(sorted(rng.uniform(0.6, 2.0, d), reverse=True))
            if 2.0 - sum(1.0 / a for a in alphas) <= 0:
                continue
            rep = dim_double_points(profile_from_alphas(alphas))
            worst = max(worst, abs(d - rep.critical_beta - rep.raw_formula_value))
            count[d] += 1
    elapsed = time.perf_counter() - t0
    announce(1, worst <= 1e-12 and elapsed < 1.0,
             f"duality: max error {worst:.2e} over 2x10^4 tuples in {elapsed:.2f}s")


def test_brownian_anchors(announce):
    planar = dim_double_points(profile_from_alphas((2.0, 2.0))).dim_value
    spatial = dim_double_points(profile_from_alphas((2.0, 2.0, 2.0))).dim_value
    announce(2, planar == 2.0 and spatial == 1.0, f"Brownian anchors: dim {planar} (d=2), {spatial} (d=3)")


def test_alpha_inequality_grid(announce):
    grid = [round(2.0 - 0.01 * i, 2) for i in range(100)]  # 2.00 down to 1.01
    t0 = time.perf_counter()
    points = violations = 0
    for i, a1 in enumerate(grid):
        for j in range(i, len(grid)):
            for k in range(j, len(grid)):
                points += 1
                violations += not lemma_alpha_check(a1, grid[j], grid[k])
    elapsed = time.perf_counter() - t0
    announce(3, violations == 0 and elapsed < 5.0,
             f"exponent inequality: {violations} violations at {points} points in {elapsed:.2f}s")


@pytest.mark.parametrize("alphas", SERIES_SET)
def test_series_brackets_closed_form(announce, alphas):
    est, elapsed = series_estimate(alphas)
    target = critical_beta(profile_from_alphas(alphas))
    ok = est.beta_lo - 0.1 <= target <= est.beta_hi + 0.1 and elapsed < 60.0
    announce(4, ok, f"series bracket {alphas}: [{est.beta_lo:.4f}, {est.beta_hi:.4f}] "
                    f"vs {target:.4f} in {elapsed:.1f}s")


def test_case_d_boundary(announce):
    t0 = time.perf_counter()
    below = dyadic_series_case_d(1.4, 40)
    at = dyadic_series_case_d(1.5, 40)
    n = np.array(at.index)
    keep = (n >= 20) & (n <= 40)
    slope = np.polyfit(np.log2(n[keep]), np.log2(np.array(at.block_sums)[keep]), 1)[0]
    elapsed = time.perf_counter() - t0
    ok = below.verdict == DIVERGENT and at.verdict == CONVERGENT and slope <= -1.8 and elapsed < 30
    announce(5, ok, f"case d: 1.4 {below.verdict}, 1.5 {at.verdict} (slope {slope:.2f}) in {elapsed:.2f}s")


def test_case_b_divergence(announce):
    model = PsiModel((1.0, 1.0), (0, 1))
    verdicts = {}
    for doublings in (10, 11, 12, 13, 14):
        radii = doubling_radii(4.0, doublings)
        verdicts[int(radii[-1])] = existence_integral_estimate(model, radii).verdict
    ok = all(v == DIVERGENT for v in verdicts.values())
    announce(6, ok, f"log-corrected model diverges at outer radii {sorted(verdicts)}")


def _random_exponent(rng, d):
    kind = rng.integers(4)
    if kind == 0:
        # distinct real parts on a 0.05 grid
        return np.diag(0.5 + np.sort(rng.choice(11, d, replace=False)) / 20)
    lead = rng.uniform(0.7, 0.8)
    B = np.diag([lead] * d)
    if kind == 1:
        B[1, 0] = rng.uniform(0.3, 2.0)
    elif kind == 2:
        w = rng.uniform(0.3, 2.0)
        B[0, 1], B[1, 0] = -w, w
    if d == 3 and kind in (1, 2):
        B[2, 2] = lead + rng.choice([-0.2, 0.2])
    return B


def test_similarity_invariance(announce):
    rng = np.random.default_rng(7)
    mismatches, cases = 0, set()
    for i in range(50):
        d = 2 + i % 2
        B = _random_exponent(rng, d)
        while True:
            P = rng.normal(size=(d, d))
            if np.linalg.cond(P) < 100:
                break
        ref = analyze_exponent(validate_exponent(B))
        try:
            got = analyze_exponent(validate_exponent(P @ B @ np.linalg.inv(P)))
        except DegenerateSpectrum:
            mismatches += 1
            continue
        cases.add(ref.case_label)
        same = got.case_label == ref.case_label and np.allclose(got.alphas, ref.alphas, rtol=0, atol=1e-6)
        mismatches += not same
    announce(7, mismatches == 0, f"similarity invariance: {mismatches}/50 mismatches, cases {sorted(cases)}")


def test_high_dim_empty(announce):
    rng = np.random.default_rng(11)
    failures = 0
    for i in range(100):
        d = 4 + i % 2
        B = np.diag(rng.uniform(0.5, 1.5, d))
        rep = dim_double_points(analyze_exponent(validate_exponent(B)))
        failures += not (rep.dim_value == EMPTY and rep.exists is False)
    announce(8, failures == 0, f"d=4,5 emptiness: {failures}/100 failures")


def _verify_json(threads):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["analyze", "--matrix", "[[0.5,0],[0,1]]", "--verify", "--json",
                     "--seed", "3", "--threads", str(threads)])
    assert code == 0
    return buf.getvalue()


def test_determinism(announce):
    first, second, wide = _verify_json(1), _verify_json(1), _verify_json(8)
    ok = first == second == wide and "critical_beta_series" in json.loads(first)["estimates"]
    announce(9, ok, f"verify JSON byte-identical across runs and threads ({len(first)} bytes)")


def test_rescaling_keeps_verdicts(announce):
    changed = []
    for alphas in SERIES_SET:
        est, _ = series_estimate(alphas)
        runs = [est] + ([est.companion] if est.companion is not None else [])
        for run in runs:
            for tr in (run.trace_at_lo, run.trace_at_hi, run.trace_below, run.trace_above):
                if tr is None:
                    continue
                meta = tr.meta
                term = SeriesTerm.for_alphas(meta["alphas"], meta["beta"], scale=4.0)
                scaled = dyadic_series_sum(term, meta["d_sum"], meta["m_max"], meta["m0"])
                if scaled.verdict != tr.verdict or (scaled.rate >= 0) != (tr.rate >= 0):
                    changed.append((tuple(meta["alphas"]), meta["beta"]))
    announce(10, not changed, f"x4 rescaling: {len(changed)} verdict changes {changed}")
