"""Acceptance criteria, each at its stated tolerance; one summary line per criterion."""

import json
import math
import pathlib
import time

import numpy as np
import pytest
from scipy.special import gamma

from conftest import record
from morrey_lab.grid import (ELLIPTIC, GridFunction, ParabolicCylinder, centered_grid, diff_x, diff_xx, read_pmg,
                             write_pmg)
from morrey_lab.harness import REGISTRY, SMOKE, run_case
from morrey_lab.harness import families as fam
from morrey_lab.harness.cases import Context, _thm41_pairs, default_prepare
from morrey_lab.harness.checks import check_theorem41, run_lemma21, theorem41_crosscheck
from morrey_lab.harness.counterexample import DEFAULT_DELTAS, fd_gradient_check, run_counterexample_3_11
from morrey_lab.harness.engine import case_grid
from morrey_lab.maximal import sandwich
from morrey_lab.norms import Domain, lp_norm, mixed_morrey_norm, mixed_norm, morrey_norm, slashed_lp_norm
from morrey_lab.potentials import apply_P_alpha, riesz_potential, time_marginal
from morrey_lab.transforms import hestenes_seam_identities

BASELINES = pathlib.Path(__file__).parent / "baselines" / "counterexample.json"
POINTWISE = ("eq2.2", "eq2.3", "cor2.6")


def rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a)


@pytest.fixture(scope="module")
def registry_run():
    """Every registry case under the smoke configuration, timed."""
    t0 = time.perf_counter()
    reports = {cid: run_case(cid, SMOKE) for cid in sorted(REGISTRY)}
    return reports, time.perf_counter() - t0


# -- 1 -------------------------------------------------------------------------------------

def _scaling_errors():
    R, p, beta = 2, 2.0, 1.2
    g = centered_grid(2, 24, 0.15, (-0.4, 1.6))
    v = GridFunction(g, fam.gaussians()[1].values(g) + 0.3 * fam.solution_family()[0].values(g))
    u = GridFunction(g.scaled(R), v.values)
    c1, cR = Domain.cylinder(1.0), Domain.cylinder(float(R))
    errs = {}
    errs["slashed L_p over C_R"] = rel(slashed_lp_norm(u, p, ParabolicCylinder(R, (0.0, 0.0, 0.0))),
                                       slashed_lp_norm(v, p, ParabolicCylinder(1.0, (0.0, 0.0, 0.0))))
    errs["Morrey over Q_R"] = rel(morrey_norm(u, p, beta, cR).value, R ** beta * morrey_norm(v, p, beta, c1).value)
    grad = lambda w: GridFunction(w.grid, np.sqrt(sum(c.values ** 2 for c in diff_x(w))))
    errs["gradient"] = rel(morrey_norm(grad(u), p, beta, cR).value,
                           R ** (beta - 1) * morrey_norm(grad(v), p, beta, c1).value)
    errs["Hessian"] = rel(morrey_norm(diff_xx(u).norm(), p, beta, cR).value,
                          R ** (beta - 2) * morrey_norm(diff_xx(v).norm(), p, beta, c1).value)
    return errs


def _holder_max(case_id):
    case = REGISTRY[case_id]
    grid = case_grid(case, SMOKE, SMOKE.nx[0])
    P = {k: float(v) for k, v in case.resolved_params(grid.d).items()}
    worst = 0.0
    for sample in case.family():
        data = (case.prepare or default_prepare)(case, sample, grid)
        worst = max([worst] + case.evaluate(Context(grid, 1.0), data, P).holder)
    assert worst > 0, f"{case_id} produced no split ratios"
    return worst


def test_criterion_1_exact_identities(tmp_path):
    t0 = time.perf_counter()
    errs = {f"scaling: {k}": e for k, e in _scaling_errors().items()}
    rng = np.random.default_rng(0)
    g = centered_grid(2, 12, 0.2, (-0.5, 0.5))
    f = GridFunction(g, rng.normal(size=g.shape))
    for q in (1.0, 1.5, 3.0):
        errs[f"mixed collapse q={q}"] = rel(mixed_norm(f, q, q), lp_norm(f, q))
    errs["mixed Morrey collapse"] = rel(mixed_morrey_norm(f, 2.0, 2.0, 1.0).value, morrey_norm(f, 2.0, 1.0).value)
    for cid in ("eq2.7", "eq3.4", "eq5.8"):
        errs[f"Holder split {cid}"] = max(0.0, _holder_max(cid) - 1.0)
    errs["seam identities"] = max(abs(s - 1) for s in hestenes_seam_identities())
    path = tmp_path / "f.pmg"
    write_pmg(path, f)
    errs["PMG round-trip"] = float(np.max(np.abs(read_pmg(path).values - f.values)))
    elapsed = time.perf_counter() - t0
    worst = max(errs, key=errs.get)
    ok = errs[worst] <= 1e-12 and elapsed < 30.0
    record(1, ok, f"{len(errs)} identities, worst {worst} = {errs[worst]:.2e} (tol 1e-12), {elapsed:.1f} s (< 30 s)")
    assert ok, errs


# -- 2 -------------------------------------------------------------------------------------

def test_criterion_2_kernel_analytics():
    marg = max(rel(time_marginal(a, d, r), gamma((d - a) / 2) * r ** (a - d))
               for d in (1, 2, 3) for a in (0.5, 1.0, 1.5) if a < d for r in (0.25, 1.0, 3.0))
    riesz = {}
    for d, nx in ((2, 64), (3, 40)):
        g = centered_grid(d, nx, 3.0 / nx, mode=ELLIPTIC)
        _, *xs = g.coords()
        r2 = np.broadcast_to(sum(x * x for x in xs), g.shape)
        f = GridFunction(g, np.maximum(1 - r2 / 0.64, 0.0) ** 3)
        a = apply_P_alpha(f, 1.0).values
        b = gamma((d - 1) / 2) * riesz_potential(f, 1.0).values
        inner = r2 < 0.25
        riesz[d] = float(np.max(np.abs(a - b)[inner] / b[inner]))
    ok = marg <= 1e-3 and max(riesz.values()) <= 0.02
    record(2, ok, f"time marginal rel err {marg:.2e} (tol 1e-3); Riesz reduction d=2 {riesz[2]:.2e}, "
                  f"d=3 {riesz[3]:.2e} (tol 2e-2)")
    assert ok


# -- 3 -------------------------------------------------------------------------------------

def test_criterion_3_lemma21():
    reps = run_lemma21()
    worst = max(r.rel_error for r in reps)
    ok = len(reps) == 3 and worst <= 1e-6
    record(3, ok, f"{len(reps)} profiles, max rel error {worst:.2e} (tol 1e-6)")
    assert ok


# -- 4, 5 ----------------------------------------------------------------------------------

def _case_ok(rep, growth=0.10):
    return (rep.verdict == "pass" and math.isfinite(rep.N) and not rep.hard_failures
            and (math.isnan(rep.dilation_deviation) or rep.dilation_deviation <= 0.03)
            and (math.isnan(rep.drift) or rep.drift <= growth))


def test_criterion_4_pointwise(registry_run):
    reports, _ = registry_run
    reps = [reports[c] for c in POINTWISE]
    assert all(r.d == 1 for r in reps) and SMOKE.nx == (32, 64)
    ok = all(_case_ok(r) for r in reps)
    detail = ", ".join(f"{r.case_id} N={r.N:.3g} drift={r.drift:.2e} dil={r.dilation_deviation:.2e}" for r in reps)
    record(4, ok, f"d=1 nx 32/64: {detail}")
    assert ok


def test_criterion_5_embedding_suites(registry_run):
    reports, elapsed = registry_run
    others = [r for cid, r in reports.items() if cid not in POINTWISE]
    bad = [r.case_id for r in others if not _case_ok(r)]
    hard = [r.case_id for r in reports.values() if r.hard_failures]
    worst_drift = max(r.drift for r in others if not math.isnan(r.drift))
    worst_dil = max(r.dilation_deviation for r in others if not math.isnan(r.dilation_deviation))
    ok = not bad and not hard and elapsed <= 300.0
    record(5, ok, f"{len(others)} cases, failing {bad or 'none'}, hard {hard or 'none'}, worst drift "
                  f"{worst_drift:.3f}, worst dilation {worst_dil:.2e}, registry {elapsed:.0f} s (<= 300 s)")
    assert ok


# -- 6 -------------------------------------------------------------------------------------

def test_criterion_6_sandwich(registry_run):
    reports, _ = registry_run
    per_dim = {}
    for d, nx in ((1, 64), (2, 32)):
        g = centered_grid(d, nx, 4.0 / nx, (-2.5, 2.5))
        reps = [sandwich(g, r) for r in (0.25, 0.5, 1.0)]
        per_dim[d] = (max(r.N for r in reps), min(r.lower for r in reps))
    # the single constant of d = 1 does not move under refinement
    g = centered_grid(1, 128, 4.0 / 128, (-2.5, 2.5))
    n_fine = max(sandwich(g, r).N for r in (0.25, 0.5, 1.0))
    drift1 = abs(n_fine / per_dim[1][0] - 1)
    dev44 = reports["lem4.2b"].dilation_deviation
    ok = (all(math.isfinite(n) and lo > 0 for n, lo in per_dim.values()) and drift1 <= 0.10
          and dev44 <= 0.03 and reports["lem4.2b"].verdict == "pass")
    record(6, ok, f"N(d=1) = {per_dim[1][0]:.3g} (refined {n_fine:.3g}), N(d=2) = {per_dim[2][0]:.3g} over "
                  f"r in {{1/4, 1/2, 1}}; integral bound dilation deviation {dev44:.2e} (tol 3e-2)")
    assert ok


# -- 7 -------------------------------------------------------------------------------------

def test_criterion_7_drift_estimate():
    b, f = next((b, f) for b, f in _thm41_pairs() if b.name == "b_inv_x" and f.name == "gauss_w0.35")
    rep = check_theorem41(b, f, 1.5, 3.0, d=2)
    direct, via_lebesgue = theorem41_crosscheck(b, f, 1.5, d=2)
    agree = rel(direct, via_lebesgue)
    ok = (math.isfinite(rep.ratio()) and rep.drift() <= 0.10 and rep.dilation_deviation() <= 0.03
          and agree <= 0.05)
    record(7, ok, f"ratio {rep.ratio():.4g}, drift {rep.drift():.3f} (tol 0.10), dilation "
                  f"{rep.dilation_deviation():.1e}; cross-check {direct:.4g} vs {via_lebesgue:.4g} "
                  f"({agree:.3f}, tol 0.05)")
    assert ok


# -- 8, 9 ----------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def counterexample_runs():
    return {nx: run_counterexample_3_11(nx=nx) for nx in (48, 96)}


def test_criterion_8_counterexample(counterexample_runs):
    base = json.loads(BASELINES.read_text())
    coarse, fine = counterexample_runs[48], counterexample_runs[96]
    a = fine.column("a")
    c_min = {nx: float(rep.column("c").min()) for nx, rep in counterexample_runs.items()}
    regression = max(rel(row[k], ref[k]) for nx, rep in counterexample_runs.items()
                     for row, ref in zip(rep.rows, base[str(nx)]["rows"]) for k in ("a", "b", "c"))
    ok = (list(fine.column("delta")) == list(DEFAULT_DELTAS) and fine.d == 3 and fine.q == 1.25
          and all(np.diff(a) < 0) and a[-1] / a[0] <= 0.6
          and fine.spread("b") <= 2.0 and fine.spread("c") <= 2.0
          and c_min[96] > 0 and c_min[96] >= 0.9 * c_min[48]
          and coarse.passed and fine.passed and regression <= 1e-6)
    rows = "; ".join(f"delta={r['delta']}: a={r['a']:.4g} b={r['b']:.4g} c={r['c']:.4g}" for r in fine.rows)
    record(8, ok, f"nx=96 {rows}; a last/first {a[-1] / a[0]:.3f} (<= 0.6), b spread {fine.spread('b'):.2f}, "
                  f"c spread {fine.spread('c'):.2f} (<= 2), min c {c_min[48]:.3g} -> {c_min[96]:.3g}, "
                  f"baseline drift {regression:.1e}")
    assert ok


def test_criterion_9_derivative_formulas(counterexample_runs):
    checks = [fd_gradient_check(delta) for delta in DEFAULT_DELTAS]
    worst = max(c.max_rel_error for c in checks)
    ok = worst <= 0.02 and all(c.cells > 0 for c in checks)
    record(9, ok, f"max FD vs closed-form gradient error {worst:.2e} over {sum(c.cells for c in checks)} cells "
                  f"(tol 2e-2)")
    assert ok
