"""Registry of inequality cases.

Each case fixes its exponents as exact fractions, checks the exponent
relations symbolically, names a test family and supplies an evaluator that
returns LHS/RHS rows for one sample on one grid.  Geometric parameters
(radii, strips, cylinders) are multiplied by the dilation factor ``ctx.R`` so
the same evaluator serves the dilated run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction as F
from typing import Callable

import numpy as np

from ..grid import GridFunction, ParabolicCylinder, diff_xx, region_cells
from ..maximal import M, M_beta, M_hat, check_44, sandwich
from ..norms import (Domain, lp_norm, mixed_morrey_norm, mixed_norm, morrey_norm, slashed_lp_norm,
                     time_morrey_norm)
from ..potentials import apply_P_alpha, kernel_weights
from ..transforms import HESTENES_TERMS, RadialMap, annulus_pullback, time_fold
from . import families as fam

INF = math.inf
ACTIVE_REL = 1e-9  # pointwise cells with LHS below this fraction of max LHS are round-off


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    label: str
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return math.nan if self.lhs == 0 else math.inf
        return self.lhs / self.rhs


@dataclass
class Outcome:
    rows: list = field(default_factory=list)
    holder: list = field(default_factory=list)    # ratios of exact inequalities, must be <= 1 + 1e-12
    identity: list = field(default_factory=list)  # relative errors of exact identities, must be <= 1e-12
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Context:
    grid: object
    R: float = 1.0


@dataclass(frozen=True)
class InequalityCase:
    id: str
    title: str
    mode: str                      # pointwise | per-cylinder | global-norm
    lhs: str
    rhs_terms: tuple
    params: Callable               # d -> dict of Fractions
    constraints: tuple             # ((text, predicate(P, d)), ...)
    family: Callable               # () -> list of samples
    evaluate: Callable             # (ctx, data, P) -> Outcome
    needs: tuple = ("f",)          # data keys: f, u, b, or custom via prepare
    prepare: Callable | None = None
    elliptic: bool = False
    dim: Callable = lambda d: d
    geometry: dict = field(default_factory=dict)
    drift_tol: float = 0.10
    dilation_tol: float = 0.03
    growth_factor: float = 2.0
    notes: str = ""

    def resolved_params(self, d: int) -> dict:
        P = self.params(d)
        for text, pred in self.constraints:
            if not pred(P, d):
                raise ConstraintError(f"{self.id}: constraint {text} fails for {fmt_params(P)}")
        return P


def fmt_params(P: dict) -> dict:
    return {k: str(v) for k, v in P.items()}


def as_float(P: dict) -> dict:
    return {k: float(v) for k, v in P.items()}


# -- sample preparation ------------------------------------------------------------

# amplitude degree of each data key under the parabolic dilation
DEGREES = {"f": 0.0, "b": -1.0, "v": 0.0, "w": 0.0, "d2v": -2.0}


def default_prepare(case: InequalityCase, sample, grid) -> dict:
    if "b" in case.needs:
        b, u = sample
        data = {"b": GridFunction(grid, b.values(grid))}
        if "u" in case.needs:
            data["u"] = u.fields(grid)
        else:
            data["f"] = GridFunction(grid, u.values(grid))
        return data
    if "u" in case.needs:
        return {"u": sample.fields(grid)}
    if "f" in case.needs:
        return {"f": GridFunction(grid, sample.values(grid))}
    return {}


def dilate(data: dict, R: float) -> dict:
    out = {}
    for key, val in data.items():
        if key == "u":
            out[key] = val.scaled(R)
        else:
            a = R ** DEGREES.get(key, 0.0)
            out[key] = GridFunction(val.grid.scaled(R), a * val.values)
    return out


def sample_name(sample) -> str:
    if isinstance(sample, tuple):
        return "+".join(s.name for s in sample)
    return getattr(sample, "name", str(sample))


# -- numerical helpers ---------------------------------------------------------------

def _gf(grid, values) -> GridFunction:
    return GridFunction(grid, np.broadcast_to(values, grid.shape))


def E(grid, values, p, beta, domain=None) -> float:
    return morrey_norm(_gf(grid, values), p, beta, domain).value


def EM(grid, values, q1, q2, beta, domain=None) -> float:
    return mixed_morrey_norm(_gf(grid, values), q1, q2, beta, domain).value


def L(grid, values, p, region=None) -> float:
    return lp_norm(_gf(grid, values), p, region)


def LM(grid, values, q1, q2, region=None, normalized=False) -> float:
    return mixed_norm(_gf(grid, values), q1, q2, region, normalized)


def origin_index(grid) -> tuple:
    return grid.index_of((0.0,) * (grid.d + 1))


def cylinder_mask(grid, rho, base=None) -> np.ndarray:
    base = (0.0,) * (grid.d + 1) if base is None else base
    return region_cells(grid, ParabolicCylinder(rho, base)).mask()


def potential_at(values: np.ndarray, grid, alpha: float, idx: tuple) -> float:
    """``P_alpha`` at one cell by a direct sum against the discrete kernel."""
    W = kernel_weights(grid, alpha)
    n = grid.nx
    k = idx[0]
    src = values[k:]
    key = (slice(0, grid.nt - k),) + tuple(slice(n - 1 - i, 2 * n - 1 - i) for i in idx[1:])
    return float(np.sum(W[key] * src))


def pointwise_row(label: str, lhs: np.ndarray, rhs: np.ndarray, mask=None) -> Row | None:
    """Row at the cell of largest ratio; 0/0 cells are skipped.

    Cells below ``ACTIVE_REL`` times the largest LHS anywhere on the grid
    (the scale of FFT round-off) count as zero.
    """
    lhs = np.asarray(lhs)
    rhs = np.broadcast_to(rhs, lhs.shape)
    sel = np.ones(lhs.shape, dtype=bool) if mask is None else mask
    top = float(np.max(np.where(sel, lhs, 0.0)))
    if top <= 0:
        return None
    active = sel & (lhs > ACTIVE_REL * float(np.max(lhs)))
    bad = active & (rhs <= 0)
    if bad.any():
        k = np.argmax(np.where(bad, lhs, -1.0))
        return Row(label, float(lhs.flat[k]), 0.0)
    ratio = np.where(active, lhs / np.where(active, rhs, 1.0), -1.0)
    k = int(np.argmax(ratio))
    return Row(label, float(lhs.flat[k]), float(rhs.flat[k]))


def probe_cylinders(grid, R: float) -> list:
    """A fixed set of cylinders (balls on elliptic grids) snapped to cell centres."""
    d = grid.d
    out = []
    if grid.parabolic:
        times = (-1.0, -0.4, 0.0, 0.3)
    else:
        times = (0.0,)
    spots = [(-0.6,), (0.0,), (0.5, 0.3)]
    for t in times:
        for xs in spots:
            pt = (t * R * R,) + tuple((xs[i] if i < len(xs) else 0.0) * R for i in range(d))
            base = grid.cell_center(grid.index_of(pt))
            if not grid.parabolic:
                base = (0.0,) + tuple(base[1:])
            for rho in (0.25, 0.5, 1.0):
                out.append(ParabolicCylinder(rho * R, base))
    return out


def holder_split(grid, prod, a, g, q, s, r, R, mixed=False) -> list:
    """Per-cylinder ratios ``||a g||#_q / (||a||#_s ||g||#_r)`` (exponent pairs when ``mixed``)."""
    out = []
    for cyl in probe_cylinders(grid, R):
        if mixed:
            lhs = LM(grid, prod, q[0], q[1], cyl, True)
            rhs = LM(grid, a, s[0], s[1], cyl, True) * LM(grid, g, r[0], r[1], cyl, True)
        else:
            lhs = slashed_lp_norm(_gf(grid, prod), q, cyl)
            rhs = slashed_lp_norm(_gf(grid, a), s, cyl) * slashed_lp_norm(_gf(grid, g), r, cyl)
        if lhs == 0:
            continue
        out.append(math.inf if rhs == 0 else lhs / rhs)
    return out


# -- potentials and maximal functions -----------------------------------------------

def ev_eq22(ctx, data, P):
    f = data["f"]
    grid = f.grid
    a, b = P["alpha"], P["beta"]
    o = origin_index(grid)
    mf = M(f).values[o]
    mb = M_beta(f, b).values[o]
    out = Outcome()
    for rho0 in (0.25, 0.5, 1.0, 2.0):
        rho = rho0 * ctx.R
        inside = cylinder_mask(grid, rho)
        pin = potential_at(np.where(inside, f.values, 0.0), grid, a, o)
        pout = potential_at(np.where(inside, 0.0, f.values), grid, a, o)
        out.rows.append(Row(f"rho={rho0}:inner", pin, rho ** a * mf))
        out.rows.append(Row(f"rho={rho0}:outer", pout, rho ** (a - b) * mb))
    return out


def ev_eq23(ctx, data, P):
    f = data["f"]
    a, b = P["alpha"], P["beta"]
    pf = apply_P_alpha(f, a).values
    rhs = M_beta(f, b).values ** (a / b) * M(f).values ** (1 - a / b)
    row = pointwise_row("cells", pf, rhs)
    return Outcome([row] if row else [])


def ev_cor26(ctx, data, P):
    f = data["f"]
    grid = f.grid
    a, b = P["alpha"], P["beta"]
    mb = M_beta(f, b).values
    out = Outcome()
    for rho0 in (0.25, 0.5, 1.0):
        rho = rho0 * ctx.R
        outer = ~cylinder_mask(grid, 2 * rho)
        pf = apply_P_alpha(GridFunction(grid, np.where(outer, f.values, 0.0)), a).values
        row = pointwise_row(f"rho={rho0}", pf, rho ** (a - b) * mb, mask=cylinder_mask(grid, rho))
        if row:
            out.rows.append(row)
    return out


def ev_eq24(ctx, data, P):
    f = data["f"]
    grid = f.grid
    a, b = P["alpha"], P["beta"]
    gamma = cylinder_mask(grid, ctx.R)
    pf = apply_P_alpha(f, a).values
    mb = M_beta(f, b).values
    lhs = L(grid, pf, P["r"], gamma)
    rhs = L(grid, mb, P["p"], gamma) ** (a / b) * L(grid, f.values, P["q"]) ** (1 - a / b)
    return Outcome([Row("Gamma=C_R", lhs, rhs)])


def ev_cor24a(ctx, data, P):
    f = data["f"]
    pf = apply_P_alpha(f, P["alpha"]).values
    return Outcome([Row("L", L(f.grid, pf, P["r"]), L(f.grid, f.values, P["q"]))])


def ev_cor24b(ctx, data, P):
    u = data["u"]
    return Outcome([Row("L", L(u.grid, u.grad, P["r"]), L(u.grid, u.heat, P["q"]))])


def ev_eq27(ctx, data, P):
    u, b = data["u"], data["b"]
    grid = u.grid
    ab = np.abs(b.values)
    prod = ab * u.grad
    lhs = L(grid, prod, P["q"])
    nb = L(grid, ab, P["s"])
    out = Outcome()
    out.holder.append(lhs / (nb * L(grid, u.grad, P["r"])) if lhs > 0 else 0.0)
    out.holder += holder_split(grid, prod, ab, u.grad, P["q"], P["s"], P["r"], ctx.R)
    out.rows.append(Row("chain", lhs, nb * L(grid, u.heat, P["q"])))
    return out


# -- Morrey embeddings ----------------------------------------------------------------

def ev_thm31(ctx, data, P):
    f = data["f"]
    pf = apply_P_alpha(f, P["alpha"]).values
    lhs = E(f.grid, pf, P["r"], P["beta"] - P["alpha"])
    return Outcome([Row("E", lhs, E(f.grid, f.values, P["q"], P["beta"]))])


def ev_cor34(ctx, data, P):
    u = data["u"]
    lhs = E(u.grid, u.grad, P["r"], P["beta"] - 1)
    return Outcome([Row("E", lhs, E(u.grid, u.heat, P["q"], P["beta"]))])


def ev_eq34(ctx, data, P):
    u, b = data["u"], data["b"]
    grid = u.grid
    q, s, r, beta = P["q"], P["s"], P["r"], P["beta"]
    ab = np.abs(b.values)
    prod = ab * u.grad
    lhs = E(grid, prod, q, beta)
    eb = E(grid, ab, s, 1.0)
    out = Outcome()
    out.holder += holder_split(grid, prod, ab, u.grad, q, s, r, ctx.R)
    if lhs > 0:
        out.holder.append(lhs / (eb * E(grid, u.grad, r, beta - 1)))
    out.rows.append(Row("chain", lhs, eb * E(grid, u.heat, q, beta)))
    return out


def ev_thm37(ctx, data, P):
    u = data["u"]
    grid = u.grid
    S, T = -ctx.R ** 2, ctx.R ** 2
    Q = Domain.strip(S, T)
    q, beta = P["q"], P["beta"]
    lhs = E(grid, u.grad, P["r"], beta - 1, Q)
    main = E(grid, np.abs(u.ut) + np.abs(u.lap), q, beta, Q)
    low = E(grid, u.u, q, beta, Q) / (T - S)
    return Outcome([Row("strip", lhs, main + low)])


def ev_eq36(ctx, data, P):
    u = data["u"]
    grid = u.grid
    S, T = -ctx.R ** 2, ctx.R ** 2
    w = time_fold(u.gf(u.u), S, T)
    big = Domain.strip(1.5 * S, 1.5 * T).mask(grid)
    lhs = E(grid, np.where(big, w.values, 0.0), P["q"], P["beta"])
    rhs = E(grid, u.u, P["q"], P["beta"], Domain.strip(S, T))
    return Outcome([Row("fold", lhs, rhs)])


def prep_lem38(case, sample, grid):
    v = GridFunction(grid, sample.values(grid))
    return {"v": v, "w": annulus_pullback(v, RadialMap())}


def ev_lem38(ctx, data, P):
    v, w = data["v"], data["w"]
    R = ctx.R
    lhs = E(v.grid, v.values, P["q"], P["beta"], Domain.slab(0.0, R * R, float(P["R2"]) * R))
    rhs = E(w.grid, w.values, P["q"], P["beta"], Domain.cylinder(R))
    return Outcome([Row("annulus", lhs, rhs)])


EPSILONS = (1.0, 0.5, 0.25)


def ev_lem39(ctx, data, P):
    u = data["u"]
    grid = u.grid
    R = ctx.R
    C = Domain.cylinder(R)
    p, beta = P["p"], P["beta"]
    lhs = E(grid, u.grad, p, beta, C)
    A = E(grid, np.abs(u.ut) + u.d2, p, beta, C)
    B = E(grid, u.u, p, beta, C)
    return Outcome([Row(f"eps={e}", lhs, e * R * A + B / (e * R)) for e in EPSILONS])


def ev_eq38(ctx, data, P):
    u = data["u"]
    grid = u.grid
    d = grid.d
    R = ctx.R
    p, beta = P["p"], P["beta"]
    inR = cylinder_mask(grid, R)
    grad = _gf(grid, np.where(inR, u.grad, 0.0))
    w = _gf(grid, np.where(inR, np.abs(u.ut) + u.d2, 0.0))
    cmean = float(np.mean(u.u[inR]))
    shifted = {c: _gf(grid, np.where(inR, u.u - c, 0.0)) for c in (0.0, cmean)}
    out = Outcome()
    centres = ((0.5, 0.0), (0.25, 0.5), (0.75, -1.0 / 3.0))
    for tc, xc in centres:
        gc = (tc * R * R, xc * R) + (0.0,) * (d - 1)
        for rho0 in (0.25, 0.5):
            rho = rho0 * R
            C = ParabolicCylinder(rho, (gc[0] - rho * rho / 2,) + gc[1:])
            lhs = rho ** beta * slashed_lp_norm(grad, p, C)
            svals = [rho * 2 ** (k / 2) for k in range(20) if rho * 2 ** (k / 2) <= 2 * R * (1 + 1e-12)]
            fam_s = [ParabolicCylinder(s, (gc[0] - s * s / 2,) + gc[1:]) for s in svals]
            A = max(s ** beta * slashed_lp_norm(w, p, c) for s, c in zip(svals, fam_s))
            for cname, g in zip(("c=0", "c=mean"), shifted.values()):
                B = max(s ** beta * slashed_lp_norm(g, p, c) for s, c in zip(svals, fam_s))
                for e in EPSILONS:
                    out.rows.append(Row(f"gc=({tc},{xc:.3g}):rho={rho0}:{cname}:eps={e}", lhs,
                                        e * R * A + B / (e * R)))
    return out


def ev_thm310(ctx, data, P):
    u = data["u"]
    grid = u.grid
    R = ctx.R
    C = Domain.cylinder(R)
    q, beta = P["q"], P["beta"]
    lhs = E(grid, u.grad, P["r"], beta - 1, C)
    rhs = E(grid, np.abs(u.ut) + u.d2, q, beta, C) + E(grid, u.u, q, beta, C) / R ** 2
    return Outcome([Row("C_R", lhs, rhs)])


def exact_extension(profile, grid, R: float = 1.0, reach: float = 1.3) -> np.ndarray:
    """Three-term reflection of a closed-form profile, evaluated without interpolation.

    The formula is carried past ``6R/5`` so the Hessian stencil at the edge of
    the norm domain stays smooth.
    """
    t, *xs = grid.coords()
    rad = np.sqrt(sum(x * x for x in xs))
    safe = np.where(rad > 0, rad, 1.0)
    ext = 0.0
    for a, m in HESTENES_TERMS:
        scale = ((m + 1) * R - m * rad) / safe
        ext = ext + a * profile.evaluate(t, *[x * scale for x in xs])
    inner = profile.evaluate(t, *xs)
    v = np.where(rad < R, inner, np.where(rad <= reach * R, ext, 0.0))
    return np.array(np.broadcast_to(v, grid.shape))


def prep_eq312(case, sample, grid):
    u = sample.fields(grid)
    v = GridFunction(grid, exact_extension(sample, grid))
    return {"u": u, "d2v": GridFunction(grid, diff_xx(v).norm().values)}


def ev_eq312(ctx, data, P):
    u, d2v = data["u"], data["d2v"]
    grid = u.grid
    R = ctx.R
    q, beta = P["q"], P["beta"]
    lhs = E(grid, d2v.values, q, beta, Domain.slab(0.0, R * R, 1.2 * R))
    C = Domain.cylinder(R)
    rhs = E(grid, u.d2, q, beta, C) + E(grid, u.u, q, beta, C) / R ** 2
    return Outcome([Row("extension", lhs, rhs)])


def ev_eq313(ctx, data, P):
    u = data["u"]
    grid = u.grid
    R = ctx.R
    B = Domain.ball(R)
    q, beta = P["q"], P["beta"]
    lhs = E(grid, u.grad, P["r"], beta - 1, B)
    rhs = E(grid, u.d2, q, beta, B) + E(grid, u.u, q, beta, B) / R ** 2
    return Outcome([Row("B_R", lhs, rhs)])


def ev_eq314(ctx, data, P):
    u, b = data["u"], data["b"]
    grid = u.grid
    R = ctx.R
    B = Domain.ball(R)
    q, s, r, beta = P["q"], P["s"], P["r"], P["beta"]
    inB = B.mask(grid)
    ab = np.where(inB, np.abs(b.values), 0.0)
    grad = np.where(inB, u.grad, 0.0)
    prod = ab * grad
    lhs = E(grid, prod, q, beta, B)
    eb = E(grid, ab, s, 1.0, B)
    out = Outcome()
    out.holder += holder_split(grid, prod, ab, grad, q, s, r, R)
    if lhs > 0:
        out.holder.append(lhs / (eb * E(grid, grad, r, beta - 1, B)))
    rhs = eb * E(grid, np.abs(u.lap), q, beta, B) + E(grid, u.u, q, beta, B) / R ** 2
    out.rows.append(Row("B_R", lhs, rhs))
    return out


# -- maximal functions of indicators and the drift estimate -------------------------

def ev_lem42a(ctx, data, P):
    grid = ctx.grid
    out = Outcome()
    for r0 in (0.25, 0.5, 1.0):
        rep = sandwich(grid, r0 * ctx.R)
        out.rows.append(Row(f"r={r0}:upper", rep.upper, 1.0))
        out.rows.append(Row(f"r={r0}:lower", 1.0, rep.lower))
    return out


def ev_lem42b(ctx, data, P):
    f = data["f"]
    out = Outcome()
    for r0 in (0.25, 0.5, 1.0):
        c = check_44(f, P["q"], P["beta"], P["alpha"], r0 * ctx.R)
        out.rows.append(Row(f"r={r0}", c.lhs, c.rhs))
    return out


def theorem41_terms(b: GridFunction, f: GridFunction, p: float, q: float) -> tuple:
    """``(I, ||b||_{E_{q,1}}, ||f||_{L_p})`` with ``I = int |b|^p (P_1 f)^p``."""
    grid = f.grid
    pf = np.maximum(apply_P_alpha(f, 1.0).values, 0.0)
    I = float(np.sum(np.abs(b.values) ** p * pf ** p) * grid.cell_volume)
    return I, E(grid, b.values, q, 1.0), L(grid, f.values, p)


def ev_thm41(ctx, data, P):
    p, q = P["p"], P["q"]
    I, eb, nf = theorem41_terms(data["b"], data["f"], p, q)
    out = Outcome([Row("pth-power", I, eb ** p * nf ** p)])
    out.extra["linear_reading"] = I / (eb ** p * nf) if eb * nf > 0 else math.nan
    return out


# -- mixed norms ----------------------------------------------------------------------

def ev_lem51(ctx, data, P):
    f = data["f"]
    mh = M_hat(f).values
    q1, q2 = P["q1"], P["q2"]
    return Outcome([Row("L_q1q2", LM(f.grid, mh, q1, q2), LM(f.grid, f.values, q1, q2))])


def ev_lem52(ctx, data, P):
    f = data["f"]
    grid = f.grid
    a, b = P["alpha"], P["beta"]
    gamma = cylinder_mask(grid, ctx.R)
    pf = apply_P_alpha(f, a).values
    mb = M_beta(f, b).values
    lhs = LM(grid, pf, P["r1"], P["r2"], gamma)
    rhs = L(grid, mb, INF, gamma) ** (a / b) * LM(grid, f.values, P["q1"], P["q2"]) ** (1 - a / b)
    return Outcome([Row("Gamma=C_R", lhs, rhs)])


def ev_cor53(ctx, data, P):
    f = data["f"]
    pf = apply_P_alpha(f, P["alpha"]).values
    return Outcome([Row("L_mixed", LM(f.grid, pf, P["r1"], P["r2"]), LM(f.grid, f.values, P["q1"], P["q2"]))])


def ev_eq54(ctx, data, P):
    u = data["u"]
    return Outcome([Row("L_mixed", LM(u.grid, u.grad, P["r1"], P["r2"]), LM(u.grid, u.heat, P["q1"], P["q2"]))])


def ev_eq55(ctx, data, P):
    u, b = data["u"], data["b"]
    grid = u.grid
    q, s, r = (P["q1"], P["q2"]), (P["s1"], P["s2"]), (P["r1"], P["r2"])
    ab = np.abs(b.values)
    prod = ab * u.grad
    lhs = LM(grid, prod, *q)
    nb = LM(grid, ab, *s)
    out = Outcome()
    if lhs > 0:
        out.holder.append(lhs / (nb * LM(grid, u.grad, *r)))
    out.holder += holder_split(grid, prod, ab, u.grad, q, s, r, ctx.R, mixed=True)
    out.rows.append(Row("chain", lhs, nb * LM(grid, u.heat, *q)))
    return out


def ev_thm56(ctx, data, P):
    f = data["f"]
    pf = apply_P_alpha(f, P["alpha"]).values
    lhs = EM(f.grid, pf, P["r1"], P["r2"], P["beta"] - P["alpha"])
    return Outcome([Row("E_mixed", lhs, EM(f.grid, f.values, P["q1"], P["q2"], P["beta"]))])


def ev_cor57(ctx, data, P):
    u = data["u"]
    lhs = EM(u.grid, u.grad, P["r1"], P["r2"], P["beta"] - 1)
    return Outcome([Row("E_mixed", lhs, EM(u.grid, u.heat, P["q1"], P["q2"], P["beta"]))])


def ev_eq58(ctx, data, P):
    u, b = data["u"], data["b"]
    grid = u.grid
    beta = P["beta"]
    q, s, r = (P["q1"], P["q2"]), (P["s1"], P["s2"]), (P["r1"], P["r2"])
    ab = np.abs(b.values)
    prod = ab * u.grad
    lhs = EM(grid, prod, *q, beta)
    eb = EM(grid, ab, *s, 1.0)
    out = Outcome()
    out.holder += holder_split(grid, prod, ab, u.grad, q, s, r, ctx.R, mixed=True)
    if lhs > 0:
        out.holder.append(lhs / (eb * EM(grid, u.grad, *r, beta - 1)))
    out.rows.append(Row("chain", lhs, eb * EM(grid, u.heat, *q, beta)))
    return out


def ev_rem58t(ctx, data, P):
    u, b = data["u"], data["b"]
    grid = u.grid
    beta = P["beta"]
    q = (P["q1"], P["q2"])
    bhat = b.values.reshape(grid.nt, -1)[:, 0]
    l2 = float(np.sqrt(np.sum(bhat ** 2) * grid.ht))
    tm = time_morrey_norm(bhat, grid.ht, 2.0, 0.5)
    out = Outcome()
    out.identity.append(abs(tm - l2) / l2)
    out.extra["E_s1s2_1_over_L2"] = EM(grid, b.values, P["s1"], P["s2"], 1.0) / l2
    lhs = EM(grid, np.abs(b.values) * u.grad, *q, beta)
    out.rows.append(Row("time-drift", lhs, l2 * EM(grid, u.heat, *q, beta)))
    return out


def ev_rem58e(ctx, data, P):
    u, b = data["u"], data["b"]
    grid = u.grid
    q1 = P["q1"]
    lhs = L(grid, np.abs(b.values) * u.grad, q1)
    rhs = L(grid, b.values, grid.d) * L(grid, u.lap, q1)
    return Outcome([Row("steady", lhs, rhs)])


def poincare_terms(u: fam.Fields, r1: float, r2: float, rho: float) -> tuple:
    """Normalised mixed norms of ``Du - (Du)_C`` and ``rho (|u_t| + |D^2 u|)`` on ``C_rho``."""
    grid = u.grid
    cyl = ParabolicCylinder(rho, (0.0,) * (grid.d + 1))
    m = region_cells(grid, cyl).mask()
    dev = np.sqrt(sum((g - np.mean(g[m])) ** 2 for g in u.du))
    lhs = LM(grid, np.where(m, dev, 0.0), r1, r2, cyl, True)
    rhs = rho * LM(grid, np.abs(u.ut) + u.d2, r1, r2, cyl, True)
    return lhs, rhs


def ev_lem59(ctx, data, P):
    u = data["u"]
    out = Outcome()
    for rho0 in (0.5, 1.0):
        lhs, rhs = poincare_terms(u, P["r1"], P["r2"], rho0 * ctx.R)
        out.rows.append(Row(f"rho={rho0}", lhs, rhs))
    return out


def ev_lem510(ctx, data, P):
    u = data["u"]
    grid = u.grid
    R = ctx.R
    C = Domain.cylinder(R)
    q1, q2, beta = P["q1"], P["q2"], P["beta"]
    lhs = EM(grid, u.grad, q1, q2, beta, C)
    A = EM(grid, np.abs(u.ut) + u.d2, q1, q2, beta, C)
    B = EM(grid, u.u, q1, q2, beta, C)
    return Outcome([Row(f"eps={e}", lhs, e * R * A + B / (e * R)) for e in EPSILONS])


def ev_thm511(ctx, data, P):
    u = data["u"]
    grid = u.grid
    R = ctx.R
    C = Domain.cylinder(R)
    q1, q2, beta = P["q1"], P["q2"], P["beta"]
    lhs = EM(grid, u.grad, P["r1"], P["r2"], beta - 1, C)
    rhs = EM(grid, np.abs(u.ut) + u.d2, q1, q2, beta, C) + EM(grid, u.u, q1, q2, beta, C) / R ** 2
    return Outcome([Row("C_R", lhs, rhs)])


# -- parameter sets ----------------------------------------------------------------------

def _pointwise_params(d):
    return {"alpha": F(1), "beta": F(2)}


def _lebesgue_params(d):
    q, a = F(2), F(1)
    r = (d + 2) / ((d + 2) / q - a)
    return {"q": q, "alpha": a, "r": r, "s": F(d + 2)}


def _eq24_params(d):
    a, b, p, q = F(1), F(2), F(4), F(2)
    return {"alpha": a, "beta": b, "p": p, "q": q, "r": 1 / ((a / b) / p + (1 - a / b) / q)}


def _thm31_params(d):
    q, a = F(2), F(1)
    beta = F(d + 2) / q
    return {"q": q, "alpha": a, "beta": beta, "r": q * beta / (beta - a)}


def _thm31b_params(d):
    q, a, beta = F(2), F(1, 2), F(1)
    return {"q": q, "alpha": a, "beta": beta, "r": q * beta / (beta - a)}


def _morrey_grad_params(d):
    q, beta = F(3, 2), F(9, 5)
    return {"q": q, "beta": beta, "r": q * beta / (beta - 1), "s": beta * q}


def _elliptic_params(d):
    q, beta = F(3, 2), F(4, 3)
    return {"q": q, "beta": beta, "r": q * beta / (beta - 1), "s": beta * q}


def _mixed_lebesgue_params(d):
    q1, q2, a = F(2), F(3, 2), F(1)
    beta = d / q1 + 2 / q2
    return {"q1": q1, "q2": q2, "alpha": a, "beta": beta,
            "r1": q1 * beta / (beta - a), "r2": q2 * beta / (beta - a),
            "s1": beta * q1, "s2": beta * q2}


def _mixed_morrey_params(d):
    q1, q2, a, beta = F(2), F(3, 2), F(1), F(3, 2)
    return {"q1": q1, "q2": q2, "alpha": a, "beta": beta,
            "r1": q1 * beta / (beta - a), "r2": q2 * beta / (beta - a),
            "s1": beta * q1, "s2": beta * q2}


def _time_drift_params(d):
    q1, q2 = F(2), F(3, 2)
    beta = 2 / q2
    return {"q1": q1, "q2": q2, "beta": beta, "r1": q1 * beta / (beta - 1), "r2": q2 * beta / (beta - 1),
            "s1": beta * q1, "s2": beta * q2}


def _lem52_params(d):
    q1, q2, a, b = F(2), F(3, 2), F(1), F(2)
    inv_p = F(0)  # p = infinity
    return {"q1": q1, "q2": q2, "alpha": a, "beta": b, "inv_p": inv_p,
            "r1": 1 / ((a / b) * inv_p + (1 - a / b) / q1), "r2": 1 / ((a / b) * inv_p + (1 - a / b) / q2)}


def _thm41_params(d):
    return {"p": F(3, 2), "q": F(5, 2) if d == 1 else F(3)}


# -- constraints -------------------------------------------------------------------------

def _c(text, pred):
    return (text, pred)


ALPHA_BETA = (_c("0 < alpha < beta <= d+2", lambda P, d: 0 < P["alpha"] < P["beta"] <= d + 2),)
LEBESGUE = (_c("(d+2)/q - alpha = (d+2)/r", lambda P, d: (d + 2) / P["q"] - P["alpha"] == (d + 2) / P["r"]),
            _c("q > 1", lambda P, d: P["q"] > 1))
HOLDER_27 = (_c("1/q = 1/(d+2) + 1/r", lambda P, d: 1 / P["q"] == F(1, d + 2) + 1 / P["r"]),)
THM31 = (_c("r(beta - alpha) = q beta", lambda P, d: P["r"] * (P["beta"] - P["alpha"]) == P["q"] * P["beta"]),
         _c("0 < alpha < beta <= (d+2)/q", lambda P, d: 0 < P["alpha"] < P["beta"] <= F(d + 2) / P["q"]),
         _c("q > 1", lambda P, d: P["q"] > 1))
GRAD = (_c("r(beta - 1) = q beta", lambda P, d: P["r"] * (P["beta"] - 1) == P["q"] * P["beta"]),
        _c("1 < q < d+2", lambda P, d: 1 < P["q"] < d + 2),
        _c("1 < beta <= (d+2)/q", lambda P, d: 1 < P["beta"] <= F(d + 2) / P["q"]))
SPLIT = (_c("1/q = 1/s + 1/r with s = beta q", lambda P, d: P["s"] == P["beta"] * P["q"]
            and 1 / P["q"] == 1 / P["s"] + 1 / P["r"]),)
ELLIPTIC = (_c("1 < q < d", lambda P, d: 1 < P["q"] < d),
            _c("1 < beta <= d/q", lambda P, d: 1 < P["beta"] <= F(d) / P["q"]),
            _c("r(beta - 1) = q beta", lambda P, d: P["r"] * (P["beta"] - 1) == P["q"] * P["beta"]))
INTERP = (_c("1 < p < inf", lambda P, d: P["p"] > 1),
          _c("0 < beta <= (d+2)/p", lambda P, d: 0 < P["beta"] <= F(d + 2) / P["p"]))


def _mixed_index(P, d):
    return d / P["q1"] + 2 / P["q2"]


MIXED_POT = (_c("q_i beta = r_i (beta - alpha)", lambda P, d: all(
    P[f"q{i}"] * P["beta"] == P[f"r{i}"] * (P["beta"] - P["alpha"]) for i in (1, 2))),
    _c("0 < alpha < beta <= d/q1 + 2/q2", lambda P, d: 0 < P["alpha"] < P["beta"] <= _mixed_index(P, d)),
    _c("q1, q2 > 1", lambda P, d: P["q1"] > 1 and P["q2"] > 1))
MIXED_GRAD = (_c("r_i (beta - 1) = q_i beta", lambda P, d: all(
    P[f"r{i}"] * (P["beta"] - 1) == P[f"q{i}"] * P["beta"] for i in (1, 2))),
    _c("1 < beta <= d/q1 + 2/q2", lambda P, d: 1 < P["beta"] <= _mixed_index(P, d)),
    _c("q1, q2 > 1", lambda P, d: P["q1"] > 1 and P["q2"] > 1))
MIXED_SPLIT = (_c("s_i = beta q_i and 1/q_i = 1/s_i + 1/r_i", lambda P, d: all(
    P[f"s{i}"] == P["beta"] * P[f"q{i}"] and 1 / P[f"q{i}"] == 1 / P[f"s{i}"] + 1 / P[f"r{i}"] for i in (1, 2))),)


# -- registry ----------------------------------------------------------------------------

def _solutions():
    return fam.solution_family()


def _drift_pairs():
    sols = fam.solution_family()
    return [(b, u) for b in fam.drift_family() for u in (sols[0], sols[2])]


def _steady_drift_pairs():
    sols = fam.steady_family()
    return [(b, u) for b in fam.drift_family(steady=True) for u in sols[:2]]


def _time_drift_pairs():
    sols = fam.solution_family()
    bs = [fam.TimeOnly("bhat_bump", fam.Shape("bump", 0.8), 0.1),
          fam.TimeOnly("bhat_gauss", fam.Shape("gauss", 0.25), -0.1)]
    return [(b, u) for b in bs for u in (sols[0], sols[1])]


def _thm41_pairs():
    fs = fam.gaussians(0.2)[:2]
    bs = [fam.CappedPower("b_inv_x", 1.0, 4.0, fam.Shape("bump", 0.9), fam.Shape("bump", 1.3)),
          fam.CappedPower("b_inv_sqrt", 0.5, 4.0, fam.Shape("bump", 0.9), fam.Shape("bump", 1.0))]
    return [(b, f) for b in bs for f in fs]


def _single():
    return [fam.Indicator("indicator_D_r", 1.0)]


def _lem52_family():
    return fam.source_family()


def _shells():
    return fam.shell_family()


ELLIPTIC_DIM = lambda d: max(d, 2)

STRIP_NOTE = "right side evaluated with |u_t| + |Laplacian u|"
MIXED_NOTE = "mixed right side read as the norm of |u_t| + |D^2 u|"

CASES = [
    InequalityCase("eq2.2", "P_alpha split at the origin: inner by rho^alpha Mf(0), outer by rho^(alpha-beta) M_beta f(0)",
                   "pointwise", "P_alpha(I_C f)(0), P_alpha(I_{C^c} f)(0)",
                   ("rho^alpha Mf(0)", "rho^(alpha-beta) M_beta f(0)"), _pointwise_params, ALPHA_BETA,
                   fam.source_family, ev_eq22),
    InequalityCase("eq2.3", "P_alpha f <= N (M_beta f)^(alpha/beta) (Mf)^(1-alpha/beta)", "pointwise",
                   "P_alpha f", ("(M_beta f)^(alpha/beta) (M f)^(1-alpha/beta)",), _pointwise_params,
                   ALPHA_BETA, fam.source_family, ev_eq23),
    InequalityCase("cor2.6", "P_alpha(I_{C_2rho^c} g) <= N rho^(alpha-beta) M_beta g on C_rho", "pointwise",
                   "P_alpha(I_{C_2rho^c} g)", ("rho^(alpha-beta) M_beta g",), _pointwise_params, ALPHA_BETA,
                   fam.source_family, ev_cor26),
    InequalityCase("eq2.4", "||P_alpha f||_{L_r(Gamma)} <= N ||M_beta f||^(alpha/beta)_{L_p(Gamma)} ||f||^(1-alpha/beta)_{L_q}",
                   "global-norm", "||P_alpha f||_{L_r(C_R)}", ("||M_beta f||_{L_p}^(a/b) ||f||_{L_q}^(1-a/b)",),
                   _eq24_params, ALPHA_BETA + (_c("1/r = (alpha/beta)/p + (1-alpha/beta)/q", lambda P, d:
                   1 / P["r"] == (P["alpha"] / P["beta"]) / P["p"] + (1 - P["alpha"] / P["beta"]) / P["q"]),),
                   fam.source_family, ev_eq24),
    InequalityCase("cor2.4a", "||P_alpha f||_{L_r} <= N ||f||_{L_q}", "global-norm", "||P_alpha f||_{L_r}",
                   ("||f||_{L_q}",), _lebesgue_params, LEBESGUE, fam.source_family, ev_cor24a),
    InequalityCase("cor2.4b", "||Du||_{L_r} <= N ||u_t + Laplacian u||_{L_q}", "global-norm", "||Du||_{L_r}",
                   ("||u_t + Lap u||_{L_q}",), _lebesgue_params, LEBESGUE, _solutions, ev_cor24b, needs=("u",)),
    InequalityCase("eq2.7", "||b.Du||_{L_q} <= ||b||_{L_{d+2}} ||Du||_{L_r} <= N ||b||_{L_{d+2}} ||u_t + Lap u||_{L_q}",
                   "global-norm", "||b.Du||_{L_q}", ("||b||_{L_{d+2}} ||u_t + Lap u||_{L_q}",), _lebesgue_params,
                   LEBESGUE + HOLDER_27, _drift_pairs, ev_eq27, needs=("b", "u")),
    InequalityCase("thm3.1", "||P_alpha f||_{E_{r,beta-alpha}} <= N ||f||_{E_{q,beta}}", "global-norm",
                   "||P_alpha f||_{E_{r,beta-alpha}}", ("||f||_{E_{q,beta}}",), _thm31_params, THM31,
                   fam.gaussians, ev_thm31),
    InequalityCase("thm3.1b", "||P_alpha f||_{E_{r,beta-alpha}} <= N ||f||_{E_{q,beta}} below the index",
                   "global-norm", "||P_alpha f||_{E_{r,beta-alpha}}", ("||f||_{E_{q,beta}}",), _thm31b_params,
                   THM31, fam.source_family, ev_thm31),
    InequalityCase("cor3.4", "||Du||_{E_{r,beta-1}} <= N ||u_t + Lap u||_{E_{q,beta}}", "global-norm",
                   "||Du||_{E_{r,beta-1}}", ("||u_t + Lap u||_{E_{q,beta}}",), _morrey_grad_params, GRAD,
                   _solutions, ev_cor34, needs=("u",)),
    InequalityCase("eq3.4", "||b.Du||_{E_{q,beta}} <= ||b||_{E_{beta q,1}} ||Du||_{E_{r,beta-1}} <= N ...",
                   "per-cylinder", "||b.Du||_{E_{q,beta}}", ("||b||_{E_{beta q,1}} ||u_t + Lap u||_{E_{q,beta}}",),
                   _morrey_grad_params, GRAD + SPLIT, _drift_pairs, ev_eq34, needs=("b", "u")),
    InequalityCase("thm3.7", "strip estimate for Du with the (T-S)^-1 lower-order term", "global-norm",
                   "||Du||_{E_{r,beta-1}(Q_ST)}", ("||u_t| + |Lap u||_{E_{q,beta}(Q_ST)}",
                                                    "(T-S)^-1 ||u||_{E_{q,beta}(Q_ST)}"),
                   _morrey_grad_params, GRAD, fam.strip_family, ev_thm37, needs=("u",), notes=STRIP_NOTE),
    InequalityCase("eq3.6", "time fold: ||w I_{Q_-3/2,3/2}||_{E_{q,beta}} <= N ||v||_{E_{q,beta}(Q_-1,1)}",
                   "global-norm", "||w I||_{E_{q,beta}}", ("||v||_{E_{q,beta}(Q_-1,1)}",), _morrey_grad_params,
                   GRAD, fam.strip_family, ev_eq36, needs=("u",)),
    InequalityCase("lem3.8", "annulus transfer ||v||_{E_{q,beta}((0,1) x B_R2)} <= N ||u||_{E_{q,beta}(C_1)}",
                   "global-norm", "||v||_{E_{q,beta}((0,1) x B_R2)}", ("||u||_{E_{q,beta}(C_1)}",),
                   lambda d: {"q": F(2), "beta": F(1), "R1": F(4, 5), "R2": F(6, 5)},
                   (_c("0 < R1 < 1 < R2", lambda P, d: 0 < P["R1"] < 1 < P["R2"]),
                    _c("0 < beta <= (d+2)/q", lambda P, d: 0 < P["beta"] <= F(d + 2) / P["q"])),
                   _shells, ev_lem38, needs=("v", "w"), prepare=prep_lem38,
                   geometry={"xlim": 1.5, "t_range": (-0.25, 1.25), "nx": (64, 128)}),
    InequalityCase("lem3.9", "interpolation ||Du||_{E_{p,beta}(C_R)} <= N eps R ||..|| + N (eps R)^-1 ||u||",
                   "global-norm", "||Du||_{E_{p,beta}(C_R)}", ("eps R |||u_t| + |D^2 u|||_{E_{p,beta}(C_R)}",
                                                             "(eps R)^-1 ||u||_{E_{p,beta}(C_R)}"),
                   lambda d: {"p": F(2), "beta": F(1)}, INTERP, _solutions, ev_lem39, needs=("u",)),
    InequalityCase("eq3.8", "per-cylinder interpolation over concentric families", "per-cylinder",
                   "rho^beta ||I_{C_R} Du||_{L_p(C)}", ("eps R sup_s s^beta |||u_t|+|D^2u|||",
                                                       "(eps R)^-1 sup_s s^beta ||u - c||"),
                   lambda d: {"p": F(2), "beta": F(1)}, INTERP, _solutions, ev_eq38, needs=("u",)),
    InequalityCase("thm3.10", "local embedding on C_R with R^-2 lower-order term", "global-norm",
                   "||Du||_{E_{r,beta-1}(C_R)}", ("|||u_t| + |D^2 u|||_{E_{q,beta}(C_R)}",
                                                  "R^-2 ||u||_{E_{q,beta}(C_R)}"),
                   _morrey_grad_params, GRAD, _solutions, ev_thm310, needs=("u",)),
    InequalityCase("eq3.12", "three-term reflection extension controls D^2 on (0,1) x B_6/5", "global-norm",
                   "||D^2 v||_{E_{q,beta}((0,1) x B_6/5)}", ("||D^2 u||_{E_{q,beta}(C_1)}", "R^-2 ||u||_{E_{q,beta}(C_1)}"),
                   _morrey_grad_params, GRAD, _solutions, ev_eq312, needs=("u", "d2v"), prepare=prep_eq312,
                   geometry={"xlim": 1.5, "t_range": (-0.25, 1.25), "nx": (48, 96)},
                   notes="D^2 v reaches ~27 |D^2 u| near |x| = 6/5; hx = 1/8 does not resolve it"),
    InequalityCase("eq3.13", "elliptic local embedding on B_R", "global-norm", "||Du||_{E_{r,beta-1}(B_R)}",
                   ("||D^2 u||_{E_{q,beta}(B_R)}", "R^-2 ||u||_{E_{q,beta}(B_R)}"), _elliptic_params, ELLIPTIC,
                   fam.steady_family, ev_eq313, needs=("u",), elliptic=True, dim=ELLIPTIC_DIM),
    InequalityCase("eq3.14", "elliptic drift bound on B_1", "per-cylinder", "||b.Du||_{E_{q,beta}(B_R)}",
                   ("||b||_{E_{beta q,1}(B_R)} ||Lap u||_{E_{q,beta}(B_R)}", "R^-2 ||u||_{E_{q,beta}(B_R)}"),
                   _elliptic_params, ELLIPTIC + SPLIT, _steady_drift_pairs, ev_eq314, needs=("b", "u"),
                   elliptic=True, dim=ELLIPTIC_DIM,
                   notes="lower-order term carries R^-2 so the bound is dilation covariant; R = 1 is the unit-ball form"),
    InequalityCase("lem4.2a", "sandwich of M_hat I_{D_r} by the closed-form envelope", "pointwise",
                   "max(M_hat I / envelope, envelope / M_hat I)", ("N",), lambda d: {}, (), _single, ev_lem42a,
                   needs=(), notes="the best constant is approached far from D_r, so it depends on the grid extent"),
    InequalityCase("lem4.2b", "int |g|^q (M_hat I_{D_r})^alpha <= N r^(d+2-q beta) ||g||^q_{E_{q,beta}}",
                   "global-norm", "int |g|^q (M_hat I_{D_r})^alpha", ("r^(d+2-q beta) ||g||^q_{E_{q,beta}}",),
                   lambda d: {"q": F(2), "beta": F(1), "alpha": F(1)},
                   (_c("alpha > 0 and alpha > 1 - q beta/(d+2)", lambda P, d: P["alpha"] > 0
                       and P["alpha"] > 1 - P["q"] * P["beta"] / (d + 2)),
                    _c("0 < beta <= d+2, q >= 1", lambda P, d: 0 < P["beta"] <= d + 2 and P["q"] >= 1)),
                   fam.source_family, ev_lem42b),
    InequalityCase("thm4.1", "int |b|^p (P_1 f)^p <= N ||b||^p_{E_{q,1}} ||f||^p_{L_p}", "global-norm",
                   "int |b|^p (P_1 f)^p", ("||b||^p_{E_{q,1}} ||f||^p_{L_p}",), _thm41_params,
                   (_c("d+2 >= q > p > 1", lambda P, d: d + 2 >= P["q"] > P["p"] > 1),),
                   _thm41_pairs, ev_thm41, needs=("b", "f"),
                   notes="p-th power on ||f||_{L_p}; the linear reading is reported in extra"),
    InequalityCase("lem5.1", "||M_hat f||_{L_{q1,q2}} <= N ||f||_{L_{q1,q2}}", "global-norm",
                   "||M_hat f||_{L_{q1,q2}}", ("||f||_{L_{q1,q2}}",), lambda d: {"q1": F(2), "q2": F(3, 2)},
                   (_c("q1, q2 > 1", lambda P, d: P["q1"] > 1 and P["q2"] > 1),), fam.gaussians, ev_lem51),
    InequalityCase("lem5.2", "||P_alpha f||_{L_{r1,r2}(Gamma)} <= N ||M_beta f||^(a/b)_{L_p(Gamma)} ||f||^(1-a/b)_{L_{q1,q2}}",
                   "global-norm", "||P_alpha f||_{L_{r1,r2}(C_R)}", ("||M_beta f||_inf^(a/b) ||f||_{L_{q1,q2}}^(1-a/b)",),
                   _lem52_params, ALPHA_BETA + (_c("1/r_i = (alpha/beta)/p + (1-alpha/beta)/q_i", lambda P, d: all(
                       1 / P[f"r{i}"] == (P["alpha"] / P["beta"]) * P["inv_p"] + (1 - P["alpha"] / P["beta"]) / P[f"q{i}"]
                       for i in (1, 2))),), _lem52_family, ev_lem52),
    InequalityCase("cor5.3", "||P_alpha f||_{L_{r1,r2}} <= N ||f||_{L_{q1,q2}}", "global-norm",
                   "||P_alpha f||_{L_{r1,r2}}", ("||f||_{L_{q1,q2}}",), _mixed_lebesgue_params,
                   MIXED_POT + (_c("beta = d/q1 + 2/q2", lambda P, d: P["beta"] == _mixed_index(P, d)),),
                   fam.source_family, ev_cor53),
    InequalityCase("eq5.4", "||Du||_{L_{r1,r2}} <= N ||u_t + Lap u||_{L_{q1,q2}}", "global-norm",
                   "||Du||_{L_{r1,r2}}", ("||u_t + Lap u||_{L_{q1,q2}}",), _mixed_lebesgue_params,
                   MIXED_GRAD + (_c("beta = d/q1 + 2/q2", lambda P, d: P["beta"] == _mixed_index(P, d)),),
                   _solutions, ev_eq54, needs=("u",)),
    InequalityCase("eq5.5", "||b.Du||_{L_{q1,q2}} <= N ||b||_{L_{beta q1, beta q2}} ||u_t + Lap u||_{L_{q1,q2}}",
                   "per-cylinder", "||b.Du||_{L_{q1,q2}}", ("||b||_{L_{s1,s2}} ||u_t + Lap u||_{L_{q1,q2}}",),
                   _mixed_lebesgue_params, MIXED_GRAD + MIXED_SPLIT, _drift_pairs, ev_eq55, needs=("b", "u")),
    InequalityCase("thm5.6", "||P_alpha f||_{E_{r1,r2,beta-alpha}} <= N ||f||_{E_{q1,q2,beta}}", "global-norm",
                   "||P_alpha f||_{E_{r1,r2,beta-alpha}}", ("||f||_{E_{q1,q2,beta}}",), _mixed_morrey_params,
                   MIXED_POT, fam.source_family, ev_thm56),
    InequalityCase("cor5.7", "||Du||_{E_{r1,r2,beta-1}} <= N ||u_t + Lap u||_{E_{q1,q2,beta}}", "global-norm",
                   "||Du||_{E_{r1,r2,beta-1}}", ("||u_t + Lap u||_{E_{q1,q2,beta}}",), _mixed_morrey_params,
                   MIXED_GRAD, _solutions, ev_cor57, needs=("u",)),
    InequalityCase("eq5.8", "||b.Du||_{E_{q1,q2,beta}} <= ||b||_{E_{s1,s2,1}} ||Du||_{E_{r1,r2,beta-1}} <= N ...",
                   "per-cylinder", "||b.Du||_{E_{q1,q2,beta}}", ("||b||_{E_{s1,s2,1}} ||u_t + Lap u||_{E_{q1,q2,beta}}",),
                   _mixed_morrey_params, MIXED_GRAD + MIXED_SPLIT, _drift_pairs, ev_eq58, needs=("b", "u")),
    InequalityCase("rem5.8t", "time-only drift: ||b.Du||_{E_{q1,q2,beta}} <= N ||bhat||_{L_2} ||u_t + Lap u||",
                   "global-norm", "||bhat Du||_{E_{q1,q2,beta}}", ("||bhat||_{L_2(R)} ||u_t + Lap u||_{E_{q1,q2,beta}}",),
                   _time_drift_params, MIXED_GRAD + MIXED_SPLIT + (_c("beta q2 = 2", lambda P, d: P["beta"] * P["q2"] == 2),),
                   _time_drift_pairs, ev_rem58t, needs=("b", "u")),
    InequalityCase("rem5.8e", "steady drift: ||b.Du||_{L_q1} <= N ||b||_{L_d} ||Lap u||_{L_q1}", "global-norm",
                   "||b.Du||_{L_q1}", ("||b||_{L_d} ||Lap u||_{L_q1}",), lambda d: {"q1": F(3, 2)},
                   (_c("1 < q1 < d", lambda P, d: 1 < P["q1"] < d),), _steady_drift_pairs, ev_rem58e,
                   needs=("b", "u"), elliptic=True, dim=ELLIPTIC_DIM),
    InequalityCase("lem5.9", "Poincare: ||Du - (Du)_C||_{L_{r1,r2}(C_rho)} <= N rho |||u_t| + |D^2 u|||", "per-cylinder",
                   "||Du - (Du)_C||#_{L_{r1,r2}(C_rho)}", ("rho |||u_t| + |D^2 u|||#_{L_{r1,r2}(C_rho)}",),
                   lambda d: {"r1": F(2), "r2": F(3, 2)},
                   (_c("1 <= r1, r2 < inf", lambda P, d: P["r1"] >= 1 and P["r2"] >= 1),),
                   _solutions, ev_lem59, needs=("u",)),
    InequalityCase("lem5.10", "mixed interpolation on C_R with eps sweep", "global-norm",
                   "||Du||_{E_{q1,q2,beta}(C_R)}", ("eps R |||u_t| + |D^2 u|||", "(eps R)^-1 ||u||"),
                   lambda d: {"q1": F(2), "q2": F(3, 2), "beta": F(1)},
                   (_c("0 < beta <= d/q1 + 2/q2", lambda P, d: 0 < P["beta"] <= _mixed_index(P, d)),),
                   _solutions, ev_lem510, needs=("u",), notes=MIXED_NOTE),
    InequalityCase("thm5.11", "mixed local embedding on C_R with R^-2 lower-order term", "global-norm",
                   "||Du||_{E_{r1,r2,beta-1}(C_R)}", ("|||u_t| + |D^2 u|||_{E_{q1,q2,beta}(C_R)}",
                                                      "R^-2 ||u||_{E_{q1,q2,beta}(C_R)}"),
                   lambda d: {k: v for k, v in _mixed_morrey_params(d).items() if k not in ("alpha",)},
                   (MIXED_GRAD[0], MIXED_GRAD[1], MIXED_GRAD[2]), _solutions, ev_thm511, needs=("u",),
                   notes=MIXED_NOTE),
]

REGISTRY = {c.id: c for c in CASES}
