"""Symmetric maximal function of a cylinder indicator against its closed-form envelope."""

from morrey_lab.grid import centered_grid
from morrey_lab.maximal import sandwich

g = centered_grid(1, 64, 1.0 / 16, (-2.5, 2.5))
for r in (0.25, 0.5, 1.0):
    rep = sandwich(g, r)
    print(f"r={r:<5} min ratio {rep.lower:.4f}  max ratio {rep.upper:.4f}  N={rep.N:.4f}")
