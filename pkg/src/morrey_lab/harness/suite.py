"""Aggregate registry cases with the standalone checks into one report."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cases import REGISTRY
from .checks import run_lemma21
from .counterexample import run_counterexample_3_11
from .engine import (EXIT_HARD, EXIT_PASS, EXIT_TOLERANCE, SCHEMA, SMOKE, SuiteConfig, UnknownCaseError,
                     dumps, fmt_float, run_cases, samples_csv)

EXTRA_IDS = ("lem2.1", "counterexample")


def resolve_ids(ids) -> list:
    """Expand ``"all"`` and validate ids; raises :class:`UnknownCaseError`."""
    if isinstance(ids, str):
        ids = [i for i in ids.split(",") if i]
    ids = list(ids)
    if "all" in ids:
        return sorted(REGISTRY) + list(EXTRA_IDS)
    bad = [i for i in ids if i not in REGISTRY and i not in EXTRA_IDS]
    if bad:
        raise UnknownCaseError(", ".join(bad))
    seen = []
    for i in ids:
        if i not in seen:
            seen.append(i)
    return seen


@dataclass
class SuiteReport:
    config: SuiteConfig
    cases: list = field(default_factory=list)
    lemma21: list | None = None
    counterexample: object | None = None

    @property
    def exit_code(self) -> int:
        verdicts = [c.verdict for c in self.cases]
        if "hard" in verdicts or (self.lemma21 is not None and not all(r.passed for r in self.lemma21)):
            return EXIT_HARD
        if "tolerance" in verdicts or (self.counterexample is not None and not self.counterexample.passed):
            return EXIT_TOLERANCE
        return EXIT_PASS

    def summary_lines(self) -> list:
        out = []
        for c in self.cases:
            out.append(f"{c.case_id:10s} {c.verdict:9s} N={c.N:.4g} drift={c.drift:.3g} "
                       f"dilation={c.dilation_deviation:.3g}")
        if self.lemma21 is not None:
            worst = max(r.rel_error for r in self.lemma21)
            ok = all(r.passed for r in self.lemma21)
            out.append(f"{'lem2.1':10s} {'pass' if ok else 'hard':9s} max_rel_error={worst:.3g}")
        if self.counterexample is not None:
            ce = self.counterexample
            out.append(f"{'counterex':10s} {'pass' if ce.passed else 'tolerance':9s} "
                       f"a_drop={ce.a_drop:.3g} b_spread={ce.spread('b'):.3g} c_spread={ce.spread('c'):.3g}")
        return out

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "config": self.config.to_json(),
                "cases": [c.to_json() for c in self.cases],
                "lemma21": None if self.lemma21 is None else [r.to_json() for r in self.lemma21],
                "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
                "exit_code": self.exit_code}

    def dumps(self) -> str:
        return dumps(self.to_json())

    def csv(self) -> str:
        text = samples_csv(self.cases)
        if self.counterexample is not None:
            ce = self.counterexample
            for row in ce.rows:
                for key in ("a", "b", "c", "eps_emp"):
                    text += f"counterexample,nx={ce.nx},delta={row['delta']!r},{key},{fmt_float(row[key])},,\n"
        return text


def run_suite(ids="all", config: SuiteConfig = SMOKE, threads: int = 1,
              counterexample: dict | None = None) -> SuiteReport:
    """Run ``ids``; ``counterexample`` overrides keyword arguments of the radial table."""
    ids = resolve_ids(ids)
    case_ids = [i for i in ids if i in REGISTRY]
    rep = SuiteReport(config, run_cases(case_ids, config, threads))
    if "lem2.1" in ids:
        rep.lemma21 = run_lemma21()
    if "counterexample" in ids:
        kw = {"nx": config.counterexample_nx, **(counterexample or {})}
        rep.counterexample = run_counterexample_3_11(**kw)
    return rep
