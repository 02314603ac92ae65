"""Batch command-line front end.

Flat key=value config files (# comments) feed experiment parameters; CLI
flags override file values.  Reports are JSON lines, optionally mirrored
to CSV with columns x, empirical, predicted, ratio.  Exit codes: 0 ok,
1 verification failure, 2 usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from fractions import Fraction

from .constellation import (ConstellationSpec, alpha_scan,
                            search_constellation, verify_certificate)
from .correlation import (CorrelationReport, LinearFormSystem,
                          auto_correlation_check, cross_correlation_sum,
                          hypergraph_conditions_report,
                          singular_series_direct, singular_series_main_term)
from .errors import BudgetExceededError, IdealSieveError
from .ideals import (FractionalIdeal, enumerate_prime_ideals, factor_ideal,
                     mobius)
from .lattice import Parallelotope, fundamental_domain_reduce
from .numberfield import field_by_name
from .sieve import SieveConfig, c_phi, c_phi_derivative_route, lambda_R

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def read_config(path):
    """Flat key = value file with # comments."""
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _emit(args, lines):
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, rows):
    if not getattr(args, "csv", None):
        return
    with open(args.csv, "w") as fh:
        fh.write("x,empirical,predicted,ratio\n")
        for x, emp, pred in rows:
            ratio = emp / pred if pred else math.inf
            fh.write(f"{x},{emp!r},{pred!r},{ratio!r}\n")


def _field(args):
    return field_by_name(args.field)


def _report_line(op, empirical, predicted, params):
    ratio = empirical / predicted if predicted else math.inf
    return json.dumps({"op": op, "empirical": empirical,
                       "predicted": predicted, "ratio": ratio,
                       "params": params}, sort_keys=True)


def cmd_primes(args):
    K = _field(args)
    lines = [json.dumps({"op": "prime", "p": P.p, "g": list(P.gpoly),
                         "e": P.e, "f": P.f, "norm": P.norm(),
                         "params": {"field": K.name, "bound": args.bound}},
                        sort_keys=True)
             for P in enumerate_prime_ideals(K, args.bound)]
    _emit(args, lines)
    return EXIT_OK


def cmd_mobius(args):
    K = _field(args)
    lines = []
    for m in range(1, args.bound + 1):
        a = FractionalIdeal.principal(K, K.element(m))
        lines.append(json.dumps({"op": "mobius", "m": m, "mu": mobius(a),
                                 "params": {"field": K.name}},
                                sort_keys=True))
    _emit(args, lines)
    return EXIT_OK


def cmd_lambda(args):
    K = _field(args)
    lines = []
    rows = []
    for P in enumerate_prime_ideals(K, args.bound):
        val = lambda_R(P.ideal(), args.R)
        lines.append(_report_line("lambda", val, 1.0,
                                  {"field": K.name, "R": args.R,
                                   "norm": P.norm(), "p": P.p,
                                   "g": list(P.gpoly)}))
        rows.append((P.norm(), val, 1.0))
    _emit(args, lines)
    _emit_csv(args, rows)
    return EXIT_OK


def cmd_cphi(args):
    val = c_phi(rel_tol=args.tol)
    other = c_phi_derivative_route()
    _emit(args, [_report_line("cphi", val, other,
                              {"tol": args.tol, "delta": abs(val - other)})])
    return EXIT_OK


def _square_region(K):
    one = K.one
    edges = [K.theta_power(j) for j in range(K.degree)]
    n = K.degree
    origin = K.zero
    for e in edges:
        origin = origin - e * K.element(Fraction(1, 2))
    return Parallelotope(K, origin, edges)


def _random_forms(K, rng, s, m):
    while True:
        coeffs = [[K.element([rng.randint(-2, 2) for _ in range(K.degree)])
                   for _ in range(m)] for _ in range(s)]
        try:
            return LinearFormSystem(K, coeffs,
                                    shifts=[K.element(rng.randint(-3, 3))
                                            for _ in range(s)])
        except ValueError:
            continue


def cmd_correlate(args):
    K = _field(args)
    if args.s > 1 and args.m < 2:
        raise ValueError(
            "pairwise non-proportional forms need m >= 2 once s >= 2")
    rng = random.Random(args.seed)
    forms = _random_forms(K, rng, args.s, args.m)
    region = _square_region(K)
    rep = cross_correlation_sum(forms, region, args.lam,
                                lambda x: 1.0, workers=args.workers)
    _emit(args, [rep.to_json()])
    _emit_csv(args, [(args.lam, rep.empirical, rep.predicted)])
    return EXIT_OK


def cmd_singular_series(args):
    K = _field(args)
    forms = LinearFormSystem(
        K, [[int(i == j) for j in range(args.s)] for i in range(args.s)])
    lines, rows = [], []
    for R in args.R:
        S = singular_series_direct(forms, R, args.W)
        main = singular_series_main_term(forms, R, args.W)
        lines.append(_report_line("singular_series", S, main,
                                  {"field": K.name, "R": R, "W": args.W,
                                   "s": args.s}))
        rows.append((R, S, main))
    _emit(args, lines)
    _emit_csv(args, rows)
    return EXIT_OK


def cmd_autocorr(args):
    K = _field(args)
    cfg = SieveConfig(K, N=args.N, s=args.s, w=args.w)
    y = [K.element(v) for v in args.y]
    rep = auto_correlation_check(y, _square_region(K), cfg,
                                 workers=args.workers)
    _emit(args, [rep.to_json()])
    return EXIT_OK


def cmd_hypergraph(args):
    K = _field(args)
    cfg = SieveConfig(K, N=args.N, k=args.k, w=args.w)
    if K.degree == 1:
        table = [1.0] * args.N
    else:
        table = {}
        raise NotImplementedError("hypergraph tables only built over degree 1")
    rep = hypergraph_conditions_report(cfg, table)
    _emit(args, [json.dumps(dict(rep, op="hypergraph"), sort_keys=True)])
    return EXIT_OK


def cmd_search(args):
    K = _field(args)
    spec = ConstellationSpec(K, FractionalIdeal.unit_ideal(K), args.k,
                             anchor_bound=args.anchor_bound,
                             step_bound=args.step_bound,
                             max_hits=args.max_hits)
    hits = search_constellation(spec)
    _emit(args, [h.to_json() for h in hits])
    return EXIT_OK


def cmd_verify(args):
    from .constellation import Certificate

    ok_all = True
    lines = []
    with open(args.certificate) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cert = Certificate.from_json(line)
            ok, diag = verify_certificate(cert)
            ok_all &= ok
            lines.append(json.dumps({"op": "verify", "ok": ok,
                                     "diagnoses": diag}, sort_keys=True))
    _emit(args, lines)
    return EXIT_OK if ok_all else EXIT_VERIFY


def cmd_alpha_scan(args):
    K = _field(args)
    cfg = SieveConfig(K, N=args.window[1], w=args.w, logR=math.log(args.R))
    res = alpha_scan(cfg, tuple(args.window))
    masses = {",".join(k): float(v) for k, v in sorted(res.masses.items())}
    _emit(args, [json.dumps({"op": "alpha_scan", "masses": masses,
                             "total": float(res.total),
                             "maximizer": list(res.maximizer),
                             "count": res.count,
                             "partition_exact": res.partition_exact(),
                             "params": {"field": K.name, "W": cfg.W,
                                        "window": list(args.window)}},
                            sort_keys=True)])
    return EXIT_OK


def cmd_residue(args):
    K = _field(args)
    x = K.element(args.x)
    ideal = FractionalIdeal.unit_ideal(K)
    red, shift = fundamental_domain_reduce(K, ideal, x, args.N)
    _emit(args, [json.dumps({"op": "residue",
                             "x": [str(c) for c in x.coords],
                             "reduced": [str(c) for c in red.coords],
                             "shift": [str(c) for c in shift.coords],
                             "N": args.N}, sort_keys=True)])
    return EXIT_OK


def build_parser():
    top = argparse.ArgumentParser(prog="idealsieve")
    top.add_argument("--config", help="flat key=value config file")
    top.add_argument("--seed", type=int, default=0)
    top.add_argument("--workers", type=int, default=1)
    top.add_argument("--output", help="report file (default stdout)")
    top.add_argument("--csv", help="CSV mirror of the report")
    sub = top.add_subparsers(dest="command")

    def add(name, fn, **kw):
        p = sub.add_parser(name)
        p.set_defaults(fn=fn)
        p.add_argument("--field", default="Q")
        return p

    p = add("primes", cmd_primes)
    p.add_argument("--bound", type=int, default=100)
    p = add("mobius", cmd_mobius)
    p.add_argument("--bound", type=int, default=50)
    p = add("lambda", cmd_lambda)
    p.add_argument("--bound", type=int, default=200)
    p.add_argument("--R", type=float, default=50.0)
    p = add("cphi", cmd_cphi)
    p.add_argument("--tol", type=float, default=1e-8)
    p = add("correlate", cmd_correlate)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--lam", type=float, default=12.0)
    p = add("singular-series", cmd_singular_series)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--W", type=int, default=6)
    p.add_argument("--R", type=float, nargs="+", default=[100.0])
    p = add("autocorr", cmd_autocorr)
    p.add_argument("--N", type=int, default=500)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--w", type=int, default=3)
    p.add_argument("--y", type=int, nargs="+", default=[0, 2])
    p = add("hypergraph", cmd_hypergraph)
    p.add_argument("--N", type=int, default=101)
    p.add_argument("--k", type=float, default=1.5)
    p.add_argument("--w", type=int, default=3)
    p = add("search", cmd_search)
    p.add_argument("--k", type=float, default=1.5)
    p.add_argument("--anchor-bound", type=float, default=100.0)
    p.add_argument("--step-bound", type=float, default=12.0)
    p.add_argument("--max-hits", type=int, default=10)
    p = add("verify", cmd_verify)
    p.add_argument("certificate")
    p = add("alpha-scan", cmd_alpha_scan)
    p.add_argument("--w", type=int, default=3)
    p.add_argument("--R", type=float, default=50.0)
    p.add_argument("--window", type=int, nargs=2, default=[100, 10000])
    p = add("residue", cmd_residue)
    p.add_argument("--x", type=int, default=17)
    p.add_argument("--N", type=int, default=10)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "fn", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.config:
        try:
            cfg = read_config(args.config)
        except (OSError, ValueError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for key, val in cfg.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and f"--{key}" not in (argv or sys.argv):
                cur = getattr(args, attr)
                if isinstance(cur, bool):
                    val = val.lower() in ("1", "true", "yes")
                elif isinstance(cur, int):
                    val = int(val)
                elif isinstance(cur, float):
                    val = float(val)
                setattr(args, attr, val)
    try:
        return args.fn(args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except IdealSieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
