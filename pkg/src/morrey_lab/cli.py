"""``morrey-lab`` command line: norms and operators on PMG files, inequality suites."""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
import warnings

from .grid import GridError, PMGFormatError, read_pmg, write_pmg
from .norms import (DegenerateNormWarning, Domain, lp_norm, mixed_morrey_norm, mixed_norm, morrey_norm,
                    slashed_lp_norm)

EXIT_OK, EXIT_USAGE, EXIT_SPEC = 0, 1, 4

NORM_KINDS = ("morrey", "mixed-morrey", "lp", "slashed", "mixed")
OPS = ("Palpha", "P1adj", "riesz", "M", "Mbeta", "Mhat", "scale", "fold", "hestenes")


def _emit(obj) -> None:
    from .harness.engine import dumps
    sys.stdout.write(dumps(obj) + "\n")


def _fail(msg: str, code: int = EXIT_USAGE) -> int:
    sys.stderr.write(f"morrey-lab: {msg}\n")
    return code


def parse_domain(text: str | None) -> Domain:
    """``whole``, ``cylinder:R``, ``strip:S,T``, ``ball:R`` or ``slab:t0,t1,R``."""
    if not text or text == "whole":
        return Domain.whole()
    kind, _, rest = text.partition(":")
    try:
        vals = [float(v) for v in rest.split(",") if v]
    except ValueError:
        raise ValueError(f"bad domain {text!r}") from None
    table = {"cylinder": (Domain.cylinder, 1), "strip": (Domain.strip, 2), "ball": (Domain.ball, 1),
             "slab": (Domain.slab, 3)}
    if kind not in table or len(vals) != table[kind][1]:
        raise ValueError(f"bad domain {text!r}")
    return table[kind][0](*vals)


def _load(path):
    try:
        return read_pmg(path), None
    except (PMGFormatError, OSError, ValueError) as exc:
        return None, _fail(f"cannot read {path}: {exc}")


# -- norm ---------------------------------------------------------------------------------

def cmd_norm(args) -> int:
    f, err = _load(args.inp)
    if err is not None:
        return err
    try:
        domain = parse_domain(args.domain)
    except ValueError as exc:
        return _fail(str(exc))
    out = {"kind": args.kind}
    degenerate = False
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateNormWarning)
            if args.kind in ("morrey", "mixed-morrey"):
                if args.beta is None:
                    return _fail("--beta is required for Morrey norms")
                if args.kind == "morrey":
                    if args.p is None:
                        return _fail("--p is required")
                    res = morrey_norm(f, args.p, args.beta, domain)
                else:
                    if args.q1 is None or args.q2 is None:
                        return _fail("--q1 and --q2 are required")
                    res = mixed_morrey_norm(f, args.q1, args.q2, args.beta, domain)
                out.update(value=res.value, rho_star=res.rho_star,
                           center_star=None if res.center_star is None else list(res.center_star),
                           degenerate=res.degenerate)
                degenerate = res.degenerate
            elif args.kind in ("lp", "slashed"):
                if args.p is None:
                    return _fail("--p is required")
                fn = lp_norm if args.kind == "lp" else slashed_lp_norm
                out["value"] = fn(f, args.p, domain.mask(f.grid))
            else:
                if args.q1 is None or args.q2 is None:
                    return _fail("--q1 and --q2 are required")
                out["value"] = mixed_norm(f, args.q1, args.q2, domain.mask(f.grid))
        for w in caught:
            sys.stderr.write(f"warning: {w.message}\n")
    except (ValueError, GridError) as exc:
        return _fail(str(exc))
    out.update(p=args.p, beta=args.beta, q1=args.q1, q2=args.q2, domain=domain.to_json())
    _emit(out)
    return EXIT_SPEC if degenerate else EXIT_OK


# -- apply --------------------------------------------------------------------------------

def _apply_op(op: str, f, args):
    from . import maximal, potentials, transforms

    info = {"op": op}
    if op == "Palpha":
        g = potentials.apply_P_alpha(f, args.alpha)
        info.update(alpha=args.alpha, quadrature_error=potentials.quadrature_error(f, args.alpha))
    elif op == "P1adj":
        g = potentials.apply_P1_adjoint(f)
        info["quadrature_error"] = potentials.quadrature_error(f, 1.0)
    elif op == "riesz":
        g = potentials.riesz_potential(f, args.alpha)
        info["alpha"] = args.alpha
    elif op == "M":
        g = maximal.M(f)
    elif op == "Mbeta":
        g = maximal.M_beta(f, args.beta)
        info["beta"] = args.beta
    elif op == "Mhat":
        g = maximal.M_hat(f)
    elif op == "scale":
        g = transforms.parabolic_scale(f, args.R)
        info["R"] = args.R
    elif op == "fold":
        g = transforms.time_fold(f, args.S, args.T)
        info.update(S=args.S, T=args.T)
    elif op == "hestenes":
        g = transforms.hestenes_extend(f, args.R)
        info["R"] = args.R
    else:
        raise ValueError(f"unknown op {op!r}")
    return g, info


def cmd_apply(args) -> int:
    f, err = _load(args.inp)
    if err is not None:
        return err
    try:
        g, info = _apply_op(args.op, f, args)
    except (ValueError, GridError) as exc:
        return _fail(str(exc))
    if args.out:
        write_pmg(args.out, g)
        info["out"] = args.out
    info["max_abs"] = float(abs(g.values).max()) if g.values.size else 0.0
    _emit(info)
    return EXIT_OK


# -- check --------------------------------------------------------------------------------

def cmd_check(args) -> int:
    from .harness.engine import CONFIGS, UnknownCaseError, known_ids
    from .harness.suite import resolve_ids, run_suite

    try:
        ids = resolve_ids(args.suite)
    except UnknownCaseError as exc:
        sys.stderr.write(f"morrey-lab: unknown suite id(s): {exc.args[0]}\n")
        sys.stderr.write("known ids: all, " + ", ".join(known_ids()) + "\n")
        return EXIT_USAGE
    config = CONFIGS[args.config]
    if args.d is not None:
        if args.d not in (1, 2, 3):
            return _fail("--d must be 1, 2 or 3")
        config = dataclasses.replace(config, d=args.d)
    ce = {}
    if args.d is not None and args.d >= 3:
        ce["d"] = args.d
    if args.q is not None:
        ce["q"] = args.q
    try:
        rep = run_suite(ids, config, threads=max(1, args.threads), counterexample=ce)
    except ValueError as exc:
        return _fail(str(exc))
    with open(args.out + ".json", "w") as fh:
        fh.write(rep.dumps() + "\n")
    with open(args.out + ".csv", "w") as fh:
        fh.write(rep.csv())
    for line in rep.summary_lines():
        sys.stdout.write(line + "\n")
    if rep.counterexample is not None:
        for row in rep.counterexample.rows:
            sys.stdout.write("  delta={delta:<5g} a={a:.6g} b={b:.6g} c={c:.6g} eps_emp={eps_emp:.6g}\n".format(**row))
    sys.stdout.write(f"exit {rep.exit_code}; report {args.out}.json, {args.out}.csv\n")
    return rep.exit_code


# -- parser --------------------------------------------------------------------------------

def _positive(text: str) -> float:
    v = float(text)
    if not v > 0 or math.isnan(v):
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _exponent(text: str) -> float:
    return math.inf if text in ("inf", "Inf", "infinity") else _positive(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morrey-lab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    n = sub.add_parser("norm", help="norm of a PMG grid function (JSON on stdout)")
    n.add_argument("--kind", choices=NORM_KINDS, default="morrey")
    n.add_argument("--p", type=_exponent)
    n.add_argument("--beta", type=_positive)
    n.add_argument("--q1", type=_exponent)
    n.add_argument("--q2", type=_exponent)
    n.add_argument("--domain", default="whole", help="whole | cylinder:R | strip:S,T | ball:R | slab:t0,t1,R")
    n.add_argument("--in", dest="inp", required=True)
    n.set_defaults(func=cmd_norm)

    def op_args(p):
        p.add_argument("--alpha", type=_positive, default=1.0)
        p.add_argument("--beta", type=_positive, default=1.0)
        p.add_argument("--R", type=_positive, default=1.0)
        p.add_argument("--S", type=float, default=-1.0)
        p.add_argument("--T", type=float, default=1.0)
        p.add_argument("--in", dest="inp", required=True)
        p.add_argument("--out")

    a = sub.add_parser("apply", help="apply a potential, maximal operator or transform")
    a.add_argument("--op", choices=OPS, required=True)
    op_args(a)
    a.set_defaults(func=cmd_apply)

    for name, choices, default in (("potential", ("Palpha", "P1adj", "riesz"), "Palpha"),
                                   ("maximal", ("M", "Mbeta", "Mhat"), "Mhat"),
                                   ("transform", ("scale", "fold", "hestenes"), "scale")):
        p = sub.add_parser(name, help=f"shorthand for apply with --op in {', '.join(choices)}")
        p.add_argument("--op", "--kind", dest="op", choices=choices, default=default)
        op_args(p)
        p.set_defaults(func=cmd_apply)

    c = sub.add_parser("check", help="run registry cases and standalone checks")
    c.add_argument("--suite", default="all", help="'all' or comma-separated ids")
    c.add_argument("--config", choices=("smoke", "full"), default="smoke")
    c.add_argument("--d", type=int)
    c.add_argument("--q", type=_positive, help="exponent for the counterexample table")
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out", default="mlab-report", help="report path prefix (.json and .csv)")
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
