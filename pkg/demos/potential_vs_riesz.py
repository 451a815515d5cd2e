"""Parabolic potential of time-independent data against the Riesz potential."""

import numpy as np
from scipy.special import gamma

from morrey_lab.grid import ELLIPTIC, GridFunction, centered_grid
from morrey_lab.potentials import apply_P_alpha, riesz_potential

for d, nx in ((2, 64), (3, 40)):
    g = centered_grid(d, nx, 3.0 / nx, mode=ELLIPTIC)
    _, *xs = g.coords()
    r2 = np.broadcast_to(sum(x * x for x in xs), g.shape)
    f = GridFunction(g, np.maximum(1 - r2 / 0.64, 0.0) ** 3)
    p = apply_P_alpha(f, 1.0).values
    i = gamma((d - 1) / 2) * riesz_potential(f, 1.0).values
    inner = r2 < 0.25
    print(f"d={d}: max relative gap on |x| < 1/2: {np.max(np.abs(p - i)[inner] / i[inner]):.2e}")
