"""Morrey norms of a capped power profile, and their exact parabolic scaling."""

import numpy as np

from morrey_lab.grid import GridFunction, centered_grid
from morrey_lab.norms import lp_norm, morrey_norm

g = centered_grid(1, 64, 1.0 / 16, (-1.0, 1.0))
t, x = g.coords()
with np.errstate(divide="ignore"):
    cap = np.minimum(np.abs(x) ** -0.6, 8.0)
f = GridFunction(g, np.broadcast_to(cap * (np.abs(x) < 0.75) * (np.abs(t) < 0.5), g.shape))

print(f"L_2 norm: {lp_norm(f, 2.0):.6g}")
for beta in (0.5, 1.0, 1.5):
    res = morrey_norm(f, 2.0, beta)
    print(f"E_(2,{beta}): {res.value:.6g}  attained at rho={res.rho_star:.4g}, base={res.center_star}")

for R in (2, 4):
    scaled = morrey_norm(GridFunction(g.scaled(R), f.values), 2.0, 1.0).value
    print(f"R={R}: scaled / R^beta = {scaled / R:.15g}")
