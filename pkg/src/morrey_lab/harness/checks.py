"""Standalone checks: the integration-by-parts identity, Poincare, the drift
estimate with a potential, and thin wrappers over :func:`engine.run_case`."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..grid import ELLIPTIC, GridFunction, centered_grid
from ..norms import unit_ball_volume
from .cases import REGISTRY, theorem41_terms, poincare_terms, L
from .engine import SMOKE, InequalityReport, SuiteConfig, run_case
from . import families as fam

LEMMA21_TOL = 1e-6


# -- one-dimensional identity ----------------------------------------------------------------

@dataclass(frozen=True)
class Lemma21Report:
    name: str
    beta: float
    S: float
    lhs: float
    rhs: float

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return 0.0 if scale == 0 else abs(self.lhs - self.rhs) / scale

    @property
    def passed(self) -> bool:
        return self.rel_error <= LEMMA21_TOL

    def to_json(self) -> dict:
        return {"name": self.name, "beta": self.beta, "S": self.S, "lhs": self.lhs, "rhs": self.rhs,
                "rel_error": self.rel_error, "passed": self.passed}


def _panels(a: float, b: float, breaks: Sequence[float], per: int, graded: bool) -> list:
    """Panel edges on [a, b] through ``breaks``; geometric grading toward ``a`` when ``graded``."""
    pts = sorted({a, b, *[x for x in breaks if a < x < b]})
    edges = []
    for lo, hi in zip(pts, pts[1:]):
        if graded and lo == 0.0:
            seg = [0.0] + list(hi * 2.0 ** -np.arange(40, -1, -1))
        else:
            seg = list(np.linspace(lo, hi, per + 1))
        edges.extend(seg if not edges else seg[1:])
    return edges


def check_lemma21(f_1d: Callable, beta: float, S: float, support: tuple | None = None,
                  breakpoints: Sequence[float] = (), name: str = "f", nodes: int = 20,
                  panels: int = 64) -> Lemma21Report:
    """Compare ``int_S^inf t^-beta f`` with ``beta int_S^inf t^(-beta-1) F(t) dt``, ``F(t) = int_S^t f``.

    ``support = (a, b)`` with ``S <= a`` bounds the support of ``f``; beyond
    ``b`` the second integral has the closed form ``F(b) b^-beta``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if S < 0:
        raise ValueError("S must be >= 0 so that t^-beta is defined on [S, inf)")
    a, b = (S, S + 1.0) if support is None else (float(support[0]), float(support[1]))
    if a < S or b <= a:
        raise ValueError("support must satisfy S <= a < b")
    x, w = leggauss(nodes)
    edges = _panels(a, b, breakpoints, panels, graded=(a == 0.0))
    ts, ws = [], []
    for lo, hi in zip(edges, edges[1:]):
        ts.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * w)
    t = np.concatenate(ts)
    wt = np.concatenate(ws)
    fv = np.asarray(f_1d(t), dtype=float)
    if np.any(fv < 0):
        raise ValueError("f must be nonnegative")
    if a == 0.0 and beta >= 1 and np.any(fv[: nodes] > 0):
        raise ValueError("t^-beta f is not integrable at 0")
    lhs = float(np.sum(wt * t ** -beta * fv))
    # F at every outer node: whole panels before it plus a partial panel
    panel_int = np.array([np.sum(wp * fp) for wp, fp in zip(ws, np.split(fv, len(ws)))])
    before = np.concatenate([[0.0], np.cumsum(panel_int)[:-1]])
    F = np.empty_like(t)
    k = 0
    for j, (lo, hi) in enumerate(zip(edges, edges[1:])):
        for tn in ts[j]:
            sub = 0.5 * (tn - lo) * x + 0.5 * (tn + lo)
            F[k] = before[j] + np.sum(0.5 * (tn - lo) * w * np.asarray(f_1d(sub), dtype=float))
            k += 1
    total = float(np.sum(panel_int))
    rhs = float(beta * np.sum(wt * t ** (-beta - 1) * F) + total * b ** -beta)
    return Lemma21Report(name, float(beta), float(S), lhs, rhs)


def lemma21_profiles() -> list:
    """Three compactly supported profiles: an indicator, a smooth bump, a C^1 ramp."""
    def indicator(t):
        return ((t >= 1.0) & (t <= 2.0)).astype(float)

    def bump(t):
        z = np.clip(1.0 - ((t - 1.5) / 0.9) ** 2, 0.0, None)
        return z ** 3

    def ramp(t):
        return np.where((t > 1.0) & (t < 3.0), np.sin(0.5 * np.pi * (t - 1.0)) ** 2, 0.0)

    return [("indicator[1,2]", indicator, 2.0, 1.0, (1.0, 2.0), ()),
            ("bump", bump, 1.0, 0.5, (0.6, 2.4), ()),
            ("sin2[1,3]", ramp, 1.5, 0.5, (1.0, 3.0), (2.0,))]


def run_lemma21() -> list:
    return [check_lemma21(f, beta, S, support, brk, name=name)
            for name, f, beta, S, support, brk in lemma21_profiles()]


# -- wrappers over the registry engine --------------------------------------------------------

def _case(case):
    return REGISTRY[case] if isinstance(case, str) else case


def check_pointwise(case, f=None, config: SuiteConfig = SMOKE) -> InequalityReport:
    """Pointwise cases (eq2.2, eq2.3, cor2.6) for one source or the default family."""
    c = _case(case)
    if c.mode != "pointwise":
        raise ValueError(f"{c.id} is not a pointwise case")
    return run_case(c, config, None if f is None else [f])


def check_embedding(case, family: list | None = None, config: SuiteConfig = SMOKE) -> InequalityReport:
    c = _case(case)
    if c.mode == "pointwise":
        raise ValueError(f"{c.id} is a pointwise case")
    return run_case(c, config, family)


def check_drift(case, b=None, u=None, config: SuiteConfig = SMOKE) -> InequalityReport:
    c = _case(case)
    if "b" not in c.needs:
        raise ValueError(f"{c.id} has no drift")
    return run_case(c, config, None if b is None else [(b, u)])


# -- Poincare --------------------------------------------------------------------------------

@dataclass(frozen=True)
class PoincareReport:
    rho: float
    lhs: float
    rhs: float
    lhs_scaled: float
    rhs_scaled: float

    @property
    def ratio(self) -> float:
        return 0.0 if self.lhs == 0 else self.lhs / self.rhs

    @property
    def ratio_scaled(self) -> float:
        return 0.0 if self.lhs_scaled == 0 else self.lhs_scaled / self.rhs_scaled

    @property
    def deviation(self) -> float:
        if self.ratio == 0:
            return 0.0 if self.ratio_scaled == 0 else math.inf
        return abs(self.ratio_scaled / self.ratio - 1.0)


def check_poincare(u: fam.Profile, r1: float, r2: float, rho: float = 1.0, d: int = 1, nx: int = 32,
                   xlim: float = 2.0, t_range: tuple = (-2.5, 2.5), R: int = 2) -> PoincareReport:
    """Poincare ratio on ``C_rho`` and on ``C_{R rho}`` for the dilated function."""
    if not (1 <= r1 < math.inf and 1 <= r2 < math.inf):
        raise ValueError("need 1 <= r1, r2 < inf")
    grid = centered_grid(d, nx, 2.0 * xlim / nx, t_range)
    fields = u.fields(grid)
    lhs, rhs = poincare_terms(fields, r1, r2, rho)
    lhs2, rhs2 = poincare_terms(fields.scaled(R), r1, r2, R * rho)
    return PoincareReport(rho, lhs, rhs, lhs2, rhs2)


# -- the drift estimate with P_1 ------------------------------------------------------------------

@dataclass
class Theorem41Report:
    p: float
    q: float
    runs: dict = field(default_factory=dict)   # run -> (I, ||b||_E, ||f||_p)

    def ratio(self, run: str = "coarse", reading: str = "pth") -> float:
        I, eb, nf = self.runs[run]
        if I == 0:
            return 0.0
        return I / (eb ** self.p * (nf ** self.p if reading == "pth" else nf))

    def drift(self) -> float:
        return abs(self.ratio("fine") / self.ratio("coarse") - 1.0)

    def dilation_deviation(self, reading: str = "pth") -> float:
        return abs(self.ratio("dilated", reading) / self.ratio("coarse", reading) - 1.0)


def check_theorem41(b, f, p: float, q: float, d: int = 2, nx: tuple = (24, 48), xlim: float = 1.5,
                    t_range: tuple = (-1.0, 1.0), R: int = 2) -> Theorem41Report:
    """``I = int |b|^p (P_1 f)^p`` against ``||b||^p_{E_{q,1}} ||f||^p_{L_p}`` at two resolutions and a dilation."""
    if not (d + 2 >= q > p > 1):
        raise ValueError("need d+2 >= q > p > 1")
    rep = Theorem41Report(p, q)
    for run, n in zip(("coarse", "fine"), nx):
        grid = centered_grid(d, n, 2.0 * xlim / n, t_range)
        bg = GridFunction(grid, b.values(grid))
        fg = GridFunction(grid, f.values(grid))
        if np.any(fg.values < 0):
            raise ValueError("f must be nonnegative")
        rep.runs[run] = theorem41_terms(bg, fg, p, q)
        if run == "coarse":
            bs = GridFunction(grid.scaled(R), bg.values / R)
            fs = GridFunction(grid.scaled(R), fg.values)
            rep.runs["dilated"] = theorem41_terms(bs, fs, p, q)
    return rep


def theorem41_crosscheck(b, f, p: float, d: int = 2, nx: int = 24, xlim: float = 1.5,
                         t_range: tuple = (-1.0, 1.0)) -> tuple:
    """At ``q = d + 2`` the Morrey norm of ``b`` reduces to ``omega_d^(-1/(d+2)) ||b||_{L_{d+2}}``.

    Returns the ratios ``I / (||b||_E^p ||f||_p^p)`` and
    ``I / ((omega^(-1/(d+2)) ||b||_{L_{d+2}})^p ||f||_p^p)``.
    """
    q = d + 2
    grid = centered_grid(d, nx, 2.0 * xlim / nx, t_range)
    bg = GridFunction(grid, b.values(grid))
    fg = GridFunction(grid, f.values(grid))
    I, eb, nf = theorem41_terms(bg, fg, p, q)
    lb = unit_ball_volume(d) ** (-1.0 / q) * L(grid, bg.values, q)
    return I / (eb ** p * nf ** p), I / (lb ** p * nf ** p)


def elliptic_grid(d: int, nx: int, xlim: float):
    return centered_grid(d, nx, 2.0 * xlim / nx, mode=ELLIPTIC)
