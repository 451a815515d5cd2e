"""Run registry cases at two resolutions and one dilation; aggregate verdicts."""

from __future__ import annotations

import io
import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..grid import ELLIPTIC, PARABOLIC, centered_grid
from .cases import (REGISTRY, Context, InequalityCase, as_float, default_prepare, dilate, fmt_params,
                    sample_name)

SCHEMA = "mlab-report/1"
HOLDER_TOL = 1e-12
IDENTITY_TOL = 1e-12

EXIT_PASS, EXIT_HARD, EXIT_TOLERANCE = 0, 2, 3


class UnknownCaseError(KeyError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    name: str
    d: int
    nx: tuple
    xlim: float = 2.0
    t_range: tuple = (-2.5, 2.5)
    dilation: int = 2
    counterexample_nx: int = 48

    def to_json(self) -> dict:
        return {"name": self.name, "d": self.d, "nx": list(self.nx), "xlim": self.xlim,
                "t_range": list(self.t_range), "dilation": self.dilation,
                "counterexample_nx": self.counterexample_nx}


SMOKE = SuiteConfig("smoke", 1, (32, 64))
FULL = SuiteConfig("full", 2, (32, 64), counterexample_nx=96)
CONFIGS = {"smoke": SMOKE, "full": FULL}


def case_grid(case: InequalityCase, config: SuiteConfig, nx: int):
    geo = case.geometry
    d = case.dim(config.d)
    xlim = geo.get("xlim", config.xlim)
    hx = 2.0 * xlim / nx
    if case.elliptic:
        return centered_grid(d, nx, hx, mode=ELLIPTIC)
    return centered_grid(d, nx, hx, geo.get("t_range", config.t_range), mode=PARABOLIC)


def _case_nx(case: InequalityCase, config: SuiteConfig) -> tuple:
    return tuple(case.geometry.get("nx", config.nx))


@dataclass
class SampleResult:
    run: str
    sample: str
    label: str
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return math.nan if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    def to_json(self) -> dict:
        return {"run": self.run, "sample": self.sample, "label": self.label,
                "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio}


@dataclass
class InequalityReport:
    case_id: str
    title: str
    mode: str
    d: int
    params: dict
    samples: list = field(default_factory=list)
    n_emp: dict = field(default_factory=dict)
    drift: float = math.nan
    dilation_deviation: float = math.nan
    holder_max: float | None = None
    identity_max: float | None = None
    hard_failures: list = field(default_factory=list)
    tolerance_failures: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def verdict(self) -> str:
        if self.hard_failures:
            return "hard"
        if self.tolerance_failures:
            return "tolerance"
        return "pass"

    @property
    def N(self) -> float:
        vals = [v for v in self.n_emp.values() if not math.isnan(v)]
        return max(vals) if vals else math.nan

    def to_json(self) -> dict:
        return {"case": self.case_id, "title": self.title, "mode": self.mode, "d": self.d,
                "params": self.params, "n_emp": self.n_emp, "N": self.N, "drift": self.drift,
                "dilation_deviation": self.dilation_deviation, "holder_max": self.holder_max,
                "identity_max": self.identity_max, "hard_failures": self.hard_failures,
                "tolerance_failures": self.tolerance_failures, "tolerances": self.tolerances,
                "verdict": self.verdict, "extra": self.extra, "notes": self.notes,
                "samples": [s.to_json() for s in self.samples]}


def _n_emp(results: list) -> float:
    ratios = [s.ratio for s in results if not math.isnan(s.ratio)]
    return max(ratios) if ratios else math.nan


def _evaluate(case, ctx, data, P, run, name, report, extras):
    out = case.evaluate(ctx, data, P)
    for row in out.rows:
        res = SampleResult(run, name, row.label, float(row.lhs), float(row.rhs))
        report.samples.append(res)
        if not (math.isfinite(res.lhs) and math.isfinite(res.rhs)):
            report.hard_failures.append(f"{run}/{name}/{row.label}: non-finite value")
        elif res.rhs == 0 and res.lhs > 0:
            report.hard_failures.append(f"{run}/{name}/{row.label}: LHS > 0 with RHS = 0")
    if out.holder:
        h = max(out.holder)
        report.holder_max = h if report.holder_max is None else max(report.holder_max, h)
    if out.identity:
        e = max(out.identity)
        report.identity_max = e if report.identity_max is None else max(report.identity_max, e)
    for k, v in out.extra.items():
        extras.setdefault(k, {})[f"{run}/{name}"] = v


def run_case(case: InequalityCase | str, config: SuiteConfig = SMOKE, family: list | None = None) -> InequalityReport:
    """Evaluate one case on coarse, fine and dilated-coarse grids."""
    if isinstance(case, str):
        case = get_case(case)
    d = case.dim(config.d)
    P = case.resolved_params(d)
    Pf = as_float(P)
    samples = case.family() if family is None else family
    report = InequalityReport(case.id, case.title, case.mode, d, fmt_params(P), notes=case.notes,
                              tolerances={"drift": case.drift_tol, "dilation": case.dilation_tol,
                                          "growth_factor": case.growth_factor, "holder": HOLDER_TOL})
    prep = case.prepare or default_prepare
    R = float(config.dilation)
    extras = {}
    nx_pair = _case_nx(case, config)
    for run, nx in zip(("coarse", "fine"), nx_pair):
        grid = case_grid(case, config, nx)
        for sample in samples:
            data = prep(case, sample, grid)
            name = sample_name(sample)
            _evaluate(case, Context(grid, 1.0), data, Pf, run, name, report, extras)
            if run == "coarse":
                _evaluate(case, Context(grid.scaled(R), R), dilate(data, R), Pf, "dilated", name, report, extras)
    report.extra = extras
    runs = ("coarse", "fine", "dilated")
    report.n_emp = {r: _n_emp([s for s in report.samples if s.run == r]) for r in runs}
    _judge(case, report)
    return report


def _judge(case: InequalityCase, report: InequalityReport) -> None:
    n = report.n_emp
    if report.holder_max is not None and report.holder_max > 1 + HOLDER_TOL:
        report.hard_failures.append(f"exact split violated: ratio {report.holder_max!r}")
    if report.identity_max is not None and report.identity_max > IDENTITY_TOL:
        report.hard_failures.append(f"exact identity violated: relative error {report.identity_max!r}")
    if all(math.isnan(v) for v in n.values()):
        # every sample 0/0 (e.g. a zero input): trivially satisfied
        report.extra.setdefault("trivial", True)
        return
    if any(math.isinf(v) for v in n.values()):
        report.hard_failures.append("N_emp infinite")
        return
    c, f, dl = n["coarse"], n["fine"], n["dilated"]
    if c > 0 and not math.isnan(f):
        report.drift = abs(f / c - 1.0)
        if f / c > case.growth_factor:
            report.hard_failures.append(f"N_emp grows by {f / c:.4g} under refinement")
        elif report.drift > case.drift_tol:
            report.tolerance_failures.append(f"refinement drift {report.drift:.4g} > {case.drift_tol}")
    if c > 0 and not math.isnan(dl):
        report.dilation_deviation = abs(dl / c - 1.0)
        if report.dilation_deviation > case.dilation_tol:
            report.tolerance_failures.append(
                f"dilation deviation {report.dilation_deviation:.4g} > {case.dilation_tol}")


def get_case(case_id: str) -> InequalityCase:
    try:
        return REGISTRY[case_id]
    except KeyError:
        raise UnknownCaseError(case_id) from None


def known_ids() -> list:
    from .suite import EXTRA_IDS
    return sorted(REGISTRY) + list(EXTRA_IDS)


def run_cases(ids: list, config: SuiteConfig = SMOKE, threads: int = 1) -> list:
    """Run registry cases, in parallel when ``threads > 1``; output ordered by id."""
    for i in ids:
        get_case(i)
    ids = sorted(ids)
    if threads > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(run_case, ids, [config] * len(ids)))
    else:
        reports = [run_case(i, config) for i in ids]
    return reports


def default_threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))


# -- serialisation -------------------------------------------------------------------------

def fmt_float(x: float) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with every float printed to 17 significant digits and sorted keys."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{dumps(str(k))}: {dumps(v, indent + 1)}' for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [inner + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def samples_csv(reports: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "run", "sample", "label", "lhs", "rhs", "ratio"])
    for rep in reports:
        for s in getattr(rep, "samples", []):
            w.writerow([rep.case_id, s.run, s.sample, s.label, fmt_float(s.lhs).strip('"'),
                        fmt_float(s.rhs).strip('"'), fmt_float(s.ratio).strip('"')])
    return buf.getvalue()
