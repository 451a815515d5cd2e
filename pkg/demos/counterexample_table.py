"""Radial log-profile family in d=3: the drift term does not become small as delta shrinks."""

import sys

from morrey_lab.harness.counterexample import run_counterexample_3_11

nx = int(sys.argv[1]) if len(sys.argv) > 1 else 48
rep = run_counterexample_3_11(nx=nx)
print(f"d={rep.d} q={rep.q} beta={rep.beta} nx={rep.nx} hx={rep.hx:.4g}")
print(f"{'delta':>6} {'||u||':>12} {'||D2u||':>12} {'||Du/x||':>12} {'eps_emp':>10}")
for row in rep.rows:
    print(f"{row['delta']:>6} {row['a']:>12.6g} {row['b']:>12.6g} {row['c']:>12.6g} {row['eps_emp']:>10.4g}")
for name, ok in rep.checks().items():
    print(f"  {name}: {'ok' if ok else 'FAILED'}")
