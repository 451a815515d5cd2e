"""Discrete space-time grids, cell-centred grid functions and region sums.

A parabolic grid samples ``R^{d+1}`` at cell centres ``(t_k, x_i)`` with
``t_k = t0 + k*ht`` and ``x_i = x0 + i*hx``, where ``ht = hx**2``.  With that
alignment a cylinder ``C_rho(t, x) = {|x - y| < rho, t <= s < t + rho**2}``
whose radius is ``k*hx`` covers exactly ``k**2`` time layers.  Elliptic grids
carry a single time layer and ignore ``ht``.

Values are stored t-major, shape ``(nt, nx, ..., nx)``.  Functions are taken
to vanish outside the grid.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

PARABOLIC = "parabolic"
ELLIPTIC = "elliptic"

# Cells allowed in a single grid; override with MORREY_LAB_MAX_CELLS.
MAX_CELLS = int(os.environ.get("MORREY_LAB_MAX_CELLS", 40_000_000))

# Relative slack used by all centre-inclusion tests.
_REL_TOL = 1e-9


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    d: int
    nx: int
    nt: int
    hx: float
    origin: tuple
    mode: str = PARABOLIC

    @property
    def ht(self) -> float:
        return self.hx * self.hx

    @property
    def parabolic(self) -> bool:
        return self.mode == PARABOLIC

    @property
    def shape(self) -> tuple:
        return (self.nt,) + (self.nx,) * self.d

    @property
    def size(self) -> int:
        return self.nt * self.nx ** self.d

    @property
    def cell_volume(self) -> float:
        vol = self.hx ** self.d
        return vol * self.ht if self.parabolic else vol

    @property
    def t(self) -> np.ndarray:
        return self.origin[0] + self.ht * np.arange(self.nt)

    def x(self, axis: int = 0) -> np.ndarray:
        return self.origin[1 + axis] + self.hx * np.arange(self.nx)

    def coords(self, sparse: bool = True) -> list:
        """Broadcastable coordinate arrays ``[t, x1, ..., xd]``."""
        axes = [self.t] + [self.x(i) for i in range(self.d)]
        return np.meshgrid(*axes, indexing="ij", sparse=sparse)

    def radius(self) -> np.ndarray:
        """|x| at every cell, broadcastable against ``shape``."""
        _, *xs = self.coords()
        r2 = sum(xi * xi for xi in xs)
        return np.sqrt(r2)

    def cell_center(self, index: Sequence[int]) -> tuple:
        t = self.origin[0] + self.ht * index[0]
        return (t,) + tuple(self.origin[1 + i] + self.hx * index[1 + i] for i in range(self.d))

    def index_of(self, point: Sequence[float]) -> tuple:
        """Nearest cell index of a space-time point (not clipped)."""
        kt = round((point[0] - self.origin[0]) / self.ht) if self.parabolic else 0
        ks = [round((point[1 + i] - self.origin[1 + i]) / self.hx) for i in range(self.d)]
        return (int(kt),) + tuple(int(k) for k in ks)

    def scaled(self, factor: float) -> "Grid":
        """Same lattice after the parabolic dilation ``(t, x) -> (f^2 t, f x)``."""
        origin = (self.origin[0] * factor * factor,) + tuple(o * factor for o in self.origin[1:])
        return Grid(self.d, self.nx, self.nt, self.hx * factor, origin, self.mode)

    def to_header(self) -> str:
        fields = ["pmg", str(self.d), self.mode, str(self.nt), str(self.nx), repr(float(self.hx))]
        fields += [repr(float(o)) for o in self.origin]
        return " ".join(fields)


def make_grid(d: int, nx: int, nt: int, hx: float, origin: Sequence[float] | None = None,
              mode: str = PARABOLIC, max_cells: int | None = None) -> Grid:
    """Build a grid; ``origin`` is the centre of cell ``(0, ..., 0)``.

    The default origin puts ``t = 0`` at the first layer and centres the
    spatial lattice on zero.
    """
    if d not in (1, 2, 3):
        raise GridError(f"dimension must be 1, 2 or 3, got {d}")
    if mode not in (PARABOLIC, ELLIPTIC):
        raise GridError(f"unknown mode {mode!r}")
    if not hx > 0:
        raise GridError("hx must be positive")
    if nx < 2:
        raise GridError("need at least 2 points per spatial axis")
    if mode == ELLIPTIC:
        if nt != 1:
            raise GridError("elliptic grids carry exactly one time layer")
    elif nt < 2:
        raise GridError("need at least 2 time layers")
    budget = MAX_CELLS if max_cells is None else max_cells
    cells = nt * nx ** d
    if cells > budget:
        raise GridError(f"{cells} cells exceed the memory budget of {budget}")
    if origin is None:
        origin = (0.0,) + (-(nx - 1) * hx / 2.0,) * d
    origin = tuple(float(o) for o in origin)
    if len(origin) != d + 1:
        raise GridError(f"origin needs {d + 1} coordinates, got {len(origin)}")
    return Grid(d, int(nx), int(nt), float(hx), origin, mode)


def centered_grid(d: int, nx: int, hx: float, t_range: tuple | None = None,
                  mode: str = PARABOLIC, x_shift: int | None = None) -> Grid:
    """Grid whose spatial lattice contains the point 0 as a cell centre.

    ``t_range = (t_lo, t_hi)`` is rounded outward to whole layers; ``t = 0`` is
    always a layer centre.  ``x_shift`` overrides the index of the zero cell.
    """
    zero = nx // 2 if x_shift is None else x_shift
    x0 = -zero * hx
    if mode == ELLIPTIC:
        return make_grid(d, nx, 1, hx, (0.0,) + (x0,) * d, mode=ELLIPTIC)
    ht = hx * hx
    lo, hi = t_range
    k_lo = math.floor(lo / ht + _REL_TOL)
    k_hi = math.ceil(hi / ht - _REL_TOL)
    return make_grid(d, nx, k_hi - k_lo, hx, (k_lo * ht,) + (x0,) * d)


class GridFunction:
    """Immutable cell-centred samples of a real function on a grid."""

    __slots__ = ("grid", "values")
    __array_priority__ = 20

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=float)
        if arr.shape != grid.shape:
            if arr.size == grid.size:
                arr = arr.reshape(grid.shape)
            else:
                raise GridError(f"expected {grid.size} values for shape {grid.shape}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise GridError(f"non-finite value at cell {tuple(bad)} = {grid.cell_center(bad)}")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    def __repr__(self):
        return f"GridFunction(d={self.grid.d}, shape={self.grid.shape}, max|f|={np.abs(self.values).max():.4g})"

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridError("grid mismatch")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._other(other))

    def __rsub__(self, other):
        return self.with_values(self._other(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._other(other))

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def __pow__(self, p):
        return self.with_values(self.values ** p)

    def integral(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)


def zeros(grid: Grid) -> GridFunction:
    return GridFunction(grid, np.zeros(grid.shape))


def magnitude(components: Iterable[GridFunction]) -> GridFunction:
    """Pointwise Euclidean length of a vector (or matrix) field."""
    comps = list(components)
    total = np.zeros(comps[0].grid.shape)
    for c in comps:
        total += c.values * c.values
    return GridFunction(comps[0].grid, np.sqrt(total))


def sample(expr: Callable, grid: Grid, singular_value: float | None = None) -> GridFunction:
    """Evaluate ``expr(t, *x)`` at every cell centre.

    Non-finite samples raise :class:`GridError` naming the cell, unless a
    ``singular_value`` is given (either here or as ``expr.singular_value``),
    in which case it replaces them.
    """
    t, *xs = grid.coords()
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = np.broadcast_to(np.asarray(expr(t, *xs), dtype=float), grid.shape).copy()
    cap = singular_value if singular_value is not None else getattr(expr, "singular_value", None)
    bad = ~np.isfinite(vals)
    if bad.any():
        if cap is None:
            idx = tuple(np.argwhere(bad)[0])
            raise GridError(f"non-finite sample at cell {idx}, coordinates {grid.cell_center(idx)}")
        vals[bad] = cap
    return GridFunction(grid, vals)


# -- regions -----------------------------------------------------------------

CYLINDER = "cylinder"
BOX = "box"


@dataclass(frozen=True)
class ParabolicCylinder:
    """``C_rho(base)`` (forward in time) or the symmetric box ``D_rho`` at ``base``."""

    rho: float
    base: tuple
    kind: str = CYLINDER

    def __post_init__(self):
        if not self.rho > 0:
            raise GridError("rho must be positive")
        if self.kind not in (CYLINDER, BOX):
            raise GridError(f"unknown region kind {self.kind!r}")
        object.__setattr__(self, "base", tuple(float(b) for b in self.base))

    @property
    def geometric_center(self) -> tuple:
        if self.kind == BOX:
            return self.base
        return (self.base[0] + self.rho ** 2 / 2.0,) + self.base[1:]

    def contains(self, t, *xs):
        """Boolean test on (broadcast) coordinates, centre-inclusion semantics."""
        r2 = self.rho * self.rho
        tol = _REL_TOL * max(r2, 1e-300)
        dist2 = sum((xi - b) ** 2 for xi, b in zip(xs, self.base[1:]))
        ds = t - self.base[0]
        if self.kind == CYLINDER:
            in_t = (ds >= -tol) & (ds < r2 - tol)
            return in_t & (dist2 < r2 - tol)
        return (np.abs(ds) <= r2 + tol) & (dist2 <= r2 + tol)

    def measure(self, d: int, parabolic: bool = True) -> float:
        """Continuum measure."""
        omega = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
        vol = omega * self.rho ** d
        if not parabolic:
            return vol
        return vol * self.rho ** 2 * (2.0 if self.kind == BOX else 1.0)


@dataclass
class CellRegion:
    """Cells of a grid inside a region, stored as row spans.

    ``rows`` holds ``(t_index, lead_indices, lo, hi)`` meaning cells
    ``[t_index, *lead_indices, lo:hi]``.  ``total`` counts lattice cells of the
    region including those outside the grid (the denominator of averages).
    """

    grid: Grid
    rows: list = field(default_factory=list)
    total: int = 0

    @property
    def count(self) -> int:
        return sum(hi - lo for *_, lo, hi in self.rows)

    @property
    def empty(self) -> bool:
        return self.count == 0

    def mask(self) -> np.ndarray:
        m = np.zeros(self.grid.shape, dtype=bool)
        for t, lead, lo, hi in self.rows:
            m[(t,) + tuple(lead) + (slice(lo, hi),)] = True
        return m


def _lattice_range(center: float, origin: float, h: float, half: float, n: int | None):
    lo = math.floor((center - half - origin) / h) - 1
    hi = math.ceil((center + half - origin) / h) + 1
    if n is not None:
        lo, hi = max(lo, 0), min(hi, n - 1)
    return lo, hi


def region_cells(grid: Grid, cyl: ParabolicCylinder, clip: bool = True) -> CellRegion:
    """Cells whose centres lie in ``cyl``; ``total`` counts the unclipped lattice."""
    d = grid.d
    rho = cyl.rho
    base = cyl.base
    if grid.parabolic:
        if cyl.kind == CYLINDER:
            t_lo, t_hi = _lattice_range(base[0] + rho * rho / 2, grid.origin[0], grid.ht, rho * rho / 2, None)
        else:
            t_lo, t_hi = _lattice_range(base[0], grid.origin[0], grid.ht, rho * rho, None)
        t_idx = np.arange(t_lo, t_hi + 1)
        t_vals = grid.origin[0] + grid.ht * t_idx
        if cyl.kind == CYLINDER:
            tol = _REL_TOL * rho * rho
            ds = t_vals - base[0]
            t_ok = (ds >= -tol) & (ds < rho * rho - tol)
        else:
            t_ok = np.abs(t_vals - base[0]) <= rho * rho * (1 + _REL_TOL)
        t_idx = t_idx[t_ok]
    else:
        t_idx = np.array([0])
    ranges = [_lattice_range(base[1 + i], grid.origin[1 + i], grid.hx, rho, None) for i in range(d)]
    axes = [np.arange(lo, hi + 1) for lo, hi in ranges]
    pts = np.meshgrid(*[grid.origin[1 + i] + grid.hx * axes[i] for i in range(d)], indexing="ij")
    dist2 = sum((p - b) ** 2 for p, b in zip(pts, base[1:]))
    r2 = rho * rho
    inside = dist2 < r2 * (1 - _REL_TOL) if cyl.kind == CYLINDER else dist2 <= r2 * (1 + _REL_TOL)
    region = CellRegion(grid)
    region.total = int(inside.sum()) * len(t_idx)
    if region.total == 0:
        return region
    lead_shape = inside.shape[:-1]
    last = axes[-1]
    for lead in np.ndindex(*lead_shape) if lead_shape else [()]:
        row = inside[lead]
        if not row.any():
            continue
        hits = np.nonzero(row)[0]
        lo, hi = int(last[hits[0]]), int(last[hits[-1]]) + 1
        lead_idx = tuple(int(axes[i][lead[i]]) for i in range(d - 1))
        if clip:
            if any(li < 0 or li >= grid.nx for li in lead_idx):
                continue
            lo, hi = max(lo, 0), min(hi, grid.nx)
            if hi <= lo:
                continue
        for t in t_idx:
            if clip and not 0 <= t < grid.nt:
                continue
            region.rows.append((int(t), lead_idx, lo, hi))
    return region


# -- summed tables -------------------------------------------------------------

class SummedTable:
    """Prefix sums of ``|f|**p`` over every grid axis (or a chosen subset).

    The table has one extra leading zero along each summed axis so that any
    half-open index box is an inclusion-exclusion of ``2**k`` corners.
    Accumulation is done in extended precision.
    """

    def __init__(self, grid: Grid, p: float, data: np.ndarray, axes: tuple):
        self.grid = grid
        self.p = p
        self.axes = axes
        table = np.asarray(data, dtype=np.longdouble)
        for ax in axes:
            pad = [(0, 0)] * table.ndim
            pad[ax] = (1, 0)
            table = np.cumsum(np.pad(table, pad), axis=ax, dtype=np.longdouble)
        if not np.all(np.isfinite(table[(slice(-1, None),) * table.ndim])):
            raise OverflowError("summed table overflowed")
        self.table = table

    def raw_box(self, lo: Sequence[int], hi: Sequence[int]) -> float:
        """Raw sum over the half-open index box ``[lo, hi)``, clipped to the grid."""
        shape = self.grid.shape
        los = [min(max(int(l), 0), shape[a]) for a, l in enumerate(lo)]
        his = [min(max(int(h), 0), shape[a]) for a, h in enumerate(hi)]
        if any(h <= l for l, h in zip(los, his)):
            return 0.0
        total = np.longdouble(0)
        n = len(self.axes)
        for corner in range(1 << n):
            idx = list(los)
            sign = 1
            for bit, ax in enumerate(self.axes):
                if corner >> bit & 1:
                    idx[ax] = his[ax]
                else:
                    sign = -sign
            # non-summed axes index a single slab
            key = tuple(idx[a] if a in self.axes else slice(los[a], his[a]) for a in range(len(shape)))
            val = self.table[key]
            total += sign * (np.sum(val) if np.ndim(val) else val)
        return float(total)

    def box_sum(self, lo: Sequence[int], hi: Sequence[int]) -> float:
        """Integral of ``|f|**p`` over the index box ``[lo, hi)``."""
        return self.raw_box(lo, hi) * self.grid.cell_volume

    def region_sum(self, region: CellRegion) -> float:
        """Integral of ``|f|**p`` over a :class:`CellRegion` (one lookup set per row)."""
        total = 0.0
        for t, lead, lo, hi in region.rows:
            total += self.raw_box((t,) + tuple(lead) + (lo,), (t + 1,) + tuple(l + 1 for l in lead) + (hi,))
        return total * self.grid.cell_volume


def build_table(f: GridFunction, p: float, axes: Sequence[int] | None = None) -> SummedTable:
    if not (np.isfinite(p) and p >= 1):
        raise ValueError("table exponent must be finite and >= 1")
    data = np.abs(f.values) ** p
    if axes is None:
        axes = tuple(range(f.grid.d + 1)) if f.grid.parabolic else tuple(range(1, f.grid.d + 1))
    return SummedTable(f.grid, p, data, tuple(axes))


# -- anchored cylinder sums over the whole grid ----------------------------------

def _near_int(v: float) -> float:
    r = round(v)
    return float(r) if abs(v - r) <= _REL_TOL * max(1.0, abs(v)) else v


def ball_rows(kappa: float, d: int) -> list:
    """Row decomposition of the lattice ball ``{v in Z^d : |v| < kappa}``.

    Returns ``(lead_offsets, w)`` pairs: the row at ``lead_offsets`` spans
    ``-w..w`` along the last axis.
    """
    k2 = _near_int(kappa * kappa)
    reach = math.ceil(math.sqrt(k2)) if k2 > 0 else 0
    rows = []
    if d == 1:
        w = _half_width(k2)
        return [((), w)] if w >= 0 else []
    for lead in np.ndindex(*(2 * reach + 1,) * (d - 1)):
        off = tuple(int(i) - reach for i in lead)
        rem = k2 - sum(o * o for o in off)
        w = _half_width(rem)
        if w >= 0:
            rows.append((off, w))
    return rows


def _half_width(rem: float) -> int:
    """Largest integer w with w*w < rem, or -1."""
    if rem <= 0:
        return -1
    w = math.isqrt(int(math.ceil(rem)) - 1) if rem == int(rem) else math.floor(math.sqrt(rem))
    while w * w >= rem:
        w -= 1
    while (w + 1) * (w + 1) < rem:
        w += 1
    return w


def ball_count(kappa: float, d: int) -> int:
    return sum(2 * w + 1 for _, w in ball_rows(kappa, d))


def time_layers(grid: Grid, rho: float) -> int:
    """Number of layers ``j >= 0`` with ``j*ht < rho**2``."""
    if not grid.parabolic:
        return 1
    tau = _near_int(rho * rho / grid.ht)
    return max(int(math.ceil(tau)), 1)


def cylinder_cell_count(grid: Grid, rho: float) -> int:
    """Lattice cells in ``C_rho`` anchored at a cell centre (grid clipping ignored)."""
    return ball_count(rho / grid.hx, grid.d) * time_layers(grid, rho)


def _window(prefix: np.ndarray, axis: int, lo_off: int, hi_off: int) -> np.ndarray:
    """Sums over ``[i + lo_off, i + hi_off)`` along ``axis`` from a prefix table."""
    n = prefix.shape[axis] - 1
    idx = np.arange(n)
    hi = np.clip(idx + hi_off, 0, n)
    lo = np.clip(idx + lo_off, 0, n)
    return np.take(prefix, hi, axis=axis) - np.take(prefix, lo, axis=axis)


def _shift_add(acc: np.ndarray, src: np.ndarray, axis: int, off: int) -> None:
    """acc[i] += src[i + off] along ``axis`` with zero fill."""
    n = src.shape[axis]
    if abs(off) >= n:
        return
    dst = [slice(None)] * src.ndim
    s = [slice(None)] * src.ndim
    if off >= 0:
        dst[axis] = slice(0, n - off)
        s[axis] = slice(off, n)
    else:
        dst[axis] = slice(-off, n)
        s[axis] = slice(0, n + off)
    acc[tuple(dst)] += src[tuple(s)]


# Ball row counts above which d >= 2 sums switch to FFT convolution.
FFT_ROW_THRESHOLD = 48


def cylinder_sums(table: SummedTable, rho: float, method: str = "auto") -> np.ndarray:
    """Raw sums of the tabulated data over ``C_rho(z)`` for every anchor cell ``z``.

    Parabolic tables must be summed over all axes; elliptic tables give ball
    sums.  ``method`` is ``"table"``, ``"fft"`` or ``"auto"``.
    """
    grid = table.grid
    d = grid.d
    rows = ball_rows(rho / grid.hx, d)
    if method == "auto":
        method = "fft" if d >= 2 and len(rows) > FFT_ROW_THRESHOLD else "table"
    pref = table.table
    if grid.parabolic:
        if 0 not in table.axes:
            raise ValueError("cylinder sums need a table summed over time")
        pref = _window(pref, 0, 0, time_layers(grid, rho))
    else:
        pref = pref  # leading time axis has length 1 and is not summed
    if method == "fft":
        return _ball_sums_fft(_unprefix(pref, d), rows, d)
    return _ball_sums_table(pref, rows, d)


def _unprefix(pref: np.ndarray, d: int) -> np.ndarray:
    out = pref
    for ax in range(1, d + 1):
        out = np.diff(out, axis=ax)
    return np.asarray(out, dtype=float)


def _ball_sums_table(pref: np.ndarray, rows: list, d: int) -> np.ndarray:
    shape = (pref.shape[0],) + tuple(n - 1 for n in pref.shape[1:])
    out = np.zeros(shape, dtype=np.longdouble)
    if not rows:
        return out.astype(float)
    last = d
    by_w = {}
    for off, w in rows:
        by_w.setdefault(w, []).append(off)
    for w, offs in by_w.items():
        seg = _window(pref, last, -w, w + 1)
        # remaining leading spatial axes are still in prefix form
        for off in offs:
            part = seg
            for ax, o in enumerate(off, start=1):
                part = _window(part, ax, o, o + 1)
            out += part
    return np.asarray(out, dtype=float)


def _ball_sums_fft(data: np.ndarray, rows: list, d: int) -> np.ndarray:
    from scipy.signal import fftconvolve

    reach = max(max((abs(o) for o in off), default=0) for off, _ in rows)
    reach = max(reach, max(w for _, w in rows))
    # offsets beyond the data extent never meet data, so the kernel is cut there
    reach = min(reach, max(data.shape[1:]) - 1)
    size = 2 * reach + 1
    ball = np.zeros((size,) * d)
    for off, w in rows:
        if any(abs(o) > reach for o in off):
            continue
        w = min(w, reach)
        key = tuple(o + reach for o in off) + (slice(reach - w, reach + w + 1),)
        ball[key] = 1.0
    out = fftconvolve(data, ball[None], mode="same", axes=tuple(range(1, d + 1)))
    np.maximum(out, 0.0, out=out)
    return out


def ball_max(values: np.ndarray, d: int, kappa: float) -> np.ndarray:
    """Max of ``values`` (>= 0) over the lattice ball ``|v| < kappa`` at every cell."""
    from scipy.ndimage import maximum_filter1d

    rows = ball_rows(kappa, d)
    out = np.zeros_like(values)
    by_w = {}
    for off, w in rows:
        by_w.setdefault(w, []).append(off)
    for w, offs in by_w.items():
        seg = maximum_filter1d(values, 2 * w + 1, axis=d, mode="constant", cval=0.0)
        for off in offs:
            shifted = seg
            for ax, o in enumerate(off, start=1):
                if o:
                    tmp = np.zeros_like(shifted)
                    _shift_add(tmp, shifted, ax, o)
                    shifted = tmp
            np.maximum(out, shifted, out=out)
    return out


def time_window_max(values: np.ndarray, length: int, forward: bool = True) -> np.ndarray:
    """Max over ``[k, k+L)`` (forward) or ``(k-L, k]`` along the time axis."""
    from scipy.ndimage import maximum_filter1d

    if length <= 1:
        return values.copy()
    origin = -(length // 2) if forward else (length - 1) // 2
    return maximum_filter1d(values, length, axis=0, mode="constant", cval=0.0, origin=origin)


def time_window_sum(values: np.ndarray, length: int) -> np.ndarray:
    """Sum over layers ``[k, k+L)`` with zero extension."""
    pref = np.concatenate([np.zeros((1,) + values.shape[1:]), np.cumsum(values, axis=0)])
    return _window(pref, 0, 0, length)


def spatial_ball_sums(values: np.ndarray, d: int, kappa: float, method: str = "auto") -> np.ndarray:
    """Ball sums per time layer (no time window)."""
    rows = ball_rows(kappa, d)
    if method == "auto":
        method = "fft" if d >= 2 and len(rows) > FFT_ROW_THRESHOLD else "table"
    if method == "fft":
        return _ball_sums_fft(np.asarray(values, float), rows, d)
    pref = np.asarray(values, dtype=np.longdouble)
    for ax in range(1, d + 1):
        pad = [(0, 0)] * pref.ndim
        pad[ax] = (1, 0)
        pref = np.cumsum(np.pad(pref, pad), axis=ax)
    return _ball_sums_table(pref, rows, d)


# -- finite differences ----------------------------------------------------------

def _check_stencil(n: int, need: int, what: str):
    if n < need:
        raise GridError(f"{what} needs at least {need} points per axis, grid has {n}")


def diff_x(u: GridFunction) -> tuple:
    """Spatial gradient ``(D_1 u, ..., D_d u)``; central inside, one-sided 2nd order at edges."""
    _check_stencil(u.grid.nx, 3, "diff_x")
    h = u.grid.hx
    return tuple(GridFunction(u.grid, np.gradient(u.values, h, axis=1 + i, edge_order=2))
                 for i in range(u.grid.d))


def _second(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / (h * h)
    out[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / (h * h)
    out[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / (h * h)
    return np.moveaxis(out, 0, axis)


@dataclass(frozen=True)
class Hessian:
    components: dict
    laplacian: GridFunction

    def __getitem__(self, ij):
        i, j = ij
        return self.components[(min(i, j), max(i, j))]

    def norm(self) -> GridFunction:
        """Frobenius norm ``|D^2 u|``."""
        grid = self.laplacian.grid
        total = np.zeros(grid.shape)
        for (i, j), c in self.components.items():
            total += (1 if i == j else 2) * c.values ** 2
        return GridFunction(grid, np.sqrt(total))


def diff_xx(u: GridFunction) -> Hessian:
    _check_stencil(u.grid.nx, 4, "diff_xx")
    h = u.grid.hx
    d = u.grid.d
    comps = {}
    grads = None
    for i in range(d):
        comps[(i, i)] = GridFunction(u.grid, _second(u.values, 1 + i, h))
    if d > 1:
        grads = [np.gradient(u.values, h, axis=1 + i, edge_order=2) for i in range(d)]
        for i in range(d):
            for j in range(i + 1, d):
                comps[(i, j)] = GridFunction(u.grid, np.gradient(grads[i], h, axis=1 + j, edge_order=2))
    lap = sum(comps[(i, i)].values for i in range(d))
    return Hessian(comps, GridFunction(u.grid, lap))


def diff_t(u: GridFunction) -> GridFunction:
    if not u.grid.parabolic:
        raise GridError("diff_t needs a parabolic grid")
    _check_stencil(u.grid.nt, 3, "diff_t")
    return GridFunction(u.grid, np.gradient(u.values, u.grid.ht, axis=0, edge_order=2))


def boundary_mask(grid: Grid, width: int = 1) -> np.ndarray:
    """True on cells at least ``width`` cells away from every grid face."""
    m = np.ones(grid.shape, dtype=bool)
    axes = range(grid.d + 1) if grid.parabolic else range(1, grid.d + 1)
    for ax in axes:
        sl = [slice(None)] * m.ndim
        sl[ax] = slice(0, width)
        m[tuple(sl)] = False
        sl[ax] = slice(grid.shape[ax] - width, None)
        m[tuple(sl)] = False
    return m


# -- PMG/1 files -----------------------------------------------------------------

class PMGFormatError(ValueError):
    pass


def write_pmg(path, f: GridFunction) -> None:
    """ASCII header line, then little-endian float64 values (t-major)."""
    with open(path, "wb") as fh:
        fh.write((f.grid.to_header() + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_pmg(path) -> GridFunction:
    with open(path, "rb") as fh:
        raw = fh.read()
    nl = raw.find(b"\n")
    if nl < 0:
        raise PMGFormatError("missing header line")
    try:
        fields = raw[:nl].decode("ascii").split()
    except UnicodeDecodeError as exc:
        raise PMGFormatError("header is not ASCII") from exc
    if len(fields) < 6 or fields[0] != "pmg":
        raise PMGFormatError("header must start with 'pmg <d> <mode> <nt> <nx> <hx>'")
    try:
        d, mode, nt, nx, hx = int(fields[1]), fields[2], int(fields[3]), int(fields[4]), float(fields[5])
        origin = tuple(float(v) for v in fields[6:])
    except ValueError as exc:
        raise PMGFormatError(f"bad header field: {exc}") from exc
    try:
        grid = make_grid(d, nx, nt, hx, origin, mode=mode)
    except GridError as exc:
        raise PMGFormatError(str(exc)) from exc
    body = raw[nl + 1:]
    if len(body) != 8 * grid.size:
        raise PMGFormatError(f"expected {8 * grid.size} data bytes, found {len(body)}")
    vals = np.frombuffer(body, dtype="<f8").astype(float).reshape(grid.shape)
    try:
        return GridFunction(grid, vals)
    except GridError as exc:
        raise PMGFormatError(str(exc)) from exc
