"""Command-line harness: verification suites, eigenfunction demos and
constant tables with reproducible configuration and NDJSON reports.

Exit codes: 0 all checks passed, 1 at least one check failed, 2
configuration error.  Reports are newline-delimited JSON with numbers
rendered to 17 significant digits; identical configurations reproduce
identical reports except for the wall_ms timing field.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from .coupling import CouplingData
from .elliptic import LatticeParams
from .errors import EllkernError, InvalidContour, InvalidCoupling, InvalidLattice
from .eigen import residual_example1, residual_example2
from .identities import ResidualReport, check_all, lattice_label
from .operators import (
    ConstantKind,
    KernelParams,
    admissible_points,
    check_symmetries,
    constants,
    corollary_coupling,
    residual_corollary,
    residual_source,
)

_DEF_OMEGA1 = math.pi / 2


class ConfigError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Complex literal in `a+bi` form (also plain reals and `i`)."""
    s = text.strip().replace("I", "i").replace("j", "i")
    s = s.replace("i", "j")
    if s in ("j", "+j"):
        s = "1j"
    if s == "-j":
        s = "-1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex literal {text!r}") from exc


def parse_complex_list(text: str):
    return tuple(parse_complex(part) for part in text.split(",") if part.strip())


def parse_int_list(text: str):
    return tuple(int(part) for part in text.split(",") if part.strip())


def _fmt_number(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        return '"%r"' % x
    return f"{x:.17g}"


def _fmt_json(obj) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return _fmt_json([obj.real, obj.imag])
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(k)}:{_fmt_json(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_fmt_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)}")


def params_digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, default=repr).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


class Reporter:
    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []
        self.all_pass = True

    def add(self, check: str, digest: str, n_points: int, max_abs: float,
            max_rel: float, worst_point, passed: bool, wall_ms: float,
            extra: dict | None = None):
        rec = {
            "check": check,
            "params_digest": digest,
            "n_points": n_points,
            "max_abs": float(max_abs),
            "max_rel": float(max_rel),
            "worst_point": [[z.real, z.imag] for z in worst_point],
            "pass": bool(passed),
            "wall_ms": float(wall_ms),
        }
        if extra:
            rec.update(extra)
        line = _fmt_json(rec)
        self.lines.append(line)
        self.all_pass &= bool(passed)
        status = "PASS" if passed else "FAIL"
        print(f"{status} {check}: max_rel={max_rel:.3e} ({n_points} points)")

    def add_report(self, rep: ResidualReport, digest: str, wall_ms: float):
        self.add(rep.identity, digest, rep.n_points, rep.max_abs, rep.max_rel,
                 rep.worst_point, rep.passed, wall_ms)

    def flush(self):
        if self.path:
            with open(self.path, "w") as fh:
                for line in self.lines:
                    fh.write(line + "\n")


def build_lattice(args) -> LatticeParams:
    if args.tau is not None and args.q is not None:
        raise ConfigError("give exactly one of --tau or --q")
    if args.tau is not None:
        return LatticeParams.from_tau(parse_complex(args.tau), omega1=args.omega1)
    q = args.q if args.q is not None else 0.3
    return LatticeParams.from_q(q, omega1=args.omega1)


def _sample_real_coords(lat: LatticeParams, n: int, seed: int, lo=0.15, hi=0.85):
    """Distinct real coordinates in (lo, hi)*omega1 with pairwise sums and
    differences clear of the lattice."""
    rng = np.random.default_rng(seed)
    delta = lat.delta
    for _ in range(500):
        xs = sorted(rng.uniform(lo * lat.omega1, hi * lat.omega1, size=n))
        ok = all(b - a > delta for a, b in zip(xs, xs[1:]))
        ok &= all(abs((a + b) - 2 * lat.omega1) > delta and (a + b) > delta
                  for a in xs for b in xs)
        if ok:
            return tuple(float(v) for v in xs)
    raise ConfigError("could not sample admissible real coordinates")


def cmd_verify_appendix(args, lat, rep: Reporter):
    digest = params_digest({"suite": "appendix", "lat": lattice_label(lat),
                            "points": args.points, "seed": args.seed,
                            "tol": args.tol})
    t0 = time.perf_counter()
    for r in check_all(lat, args.points, args.seed, args.tol):
        rep.add_report(r, digest, 1000 * (time.perf_counter() - t0))
        t0 = time.perf_counter()


def cmd_verify_source(args, lat, rep: Reporter):
    masses = parse_complex_list(args.masses)
    d = parse_complex_list(args.d)
    lam = parse_complex(getattr(args, "lambda"))
    n = args.n if args.n is not None else len(masses)
    if len(masses) != n:
        raise ConfigError(f"--n {n} but {len(masses)} masses given")
    if len(d) != 4:
        raise ConfigError("--d needs exactly four entries")
    cpl = CouplingData.make(masses, d, lam)
    digest = params_digest({"suite": "source", "masses": masses, "d": d,
                            "lam": lam, "lat": lattice_label(lat),
                            "points": args.points, "seed": args.seed})
    t0 = time.perf_counter()
    pts = admissible_points(lat, args.points, n, args.seed)
    max_abs = max_rel = 0.0
    worst = ()
    for X in pts:
        r = residual_source(cpl, X, lat, relative=True)
        if abs(r) >= max_rel:
            max_rel, worst = abs(r), X
            max_abs = abs(residual_source(cpl, X, lat))
    rep.add("source", digest, len(pts), max_abs, max_rel, worst,
            max_rel < args.tol, 1000 * (time.perf_counter() - t0))


def _corollary_params(args):
    counts = parse_int_list(args.counts)
    lam = parse_complex(getattr(args, "lambda"))
    g = parse_complex_list(args.g)
    if len(g) != 4:
        raise ConfigError("--g needs exactly four entries")
    k = args.which
    if k == 1:
        if len(counts) != 1:
            raise ConfigError("corollary 1 takes --counts N")
        return k, dict(n=counts[0], g=g, lam=lam)
    if k in (2, 3):
        if len(counts) != 2:
            raise ConfigError(f"corollary {k} takes --counts N,M")
        if k == 3 and lam == 0:
            raise ConfigError("lambda must be nonzero")
        return k, dict(n=counts[0], m=counts[1], g=g, lam=lam)
    if k == 4:
        if len(counts) != 4:
            raise ConfigError("corollary 4 takes --counts N,Nt,M,Mt")
        if lam == 0:
            raise ConfigError("lambda must be nonzero")
        d = tuple(v - lam / 2 for v in g)
        return k, dict(n=counts[0], nt=counts[1], m=counts[2], mt=counts[3],
                       d=d, lam=lam)
    raise ConfigError("--which must be 1, 2, 3 or 4")


def cmd_verify_corollary(args, lat, rep: Reporter):
    k, params = _corollary_params(args)
    cpl = corollary_coupling(k, **params)
    digest = params_digest({"suite": f"corollary{k}", "params": repr(params),
                            "lat": lattice_label(lat), "points": args.points,
                            "seed": args.seed})
    t0 = time.perf_counter()
    pts = admissible_points(lat, args.points, cpl.script_n, args.seed)
    r = residual_corollary(k, lat, pts, tol=args.tol, **params)
    rep.add_report(r, digest, 1000 * (time.perf_counter() - t0))


def cmd_verify_symmetries(args, lat, rep: Reporter):
    counts = parse_int_list(args.counts)
    if len(counts) != 4:
        raise ConfigError("--counts needs N,Nt,M,Mt")
    g = parse_complex_list(args.g)
    if len(g) != 4:
        raise ConfigError("--g needs exactly four entries")
    lam = parse_complex(getattr(args, "lambda"))
    if lam == 0:
        raise ConfigError("lambda must be nonzero")
    p = KernelParams(counts[0], counts[1], counts[2], counts[3], g, lam)
    digest = params_digest({"suite": "symmetries", "counts": counts,
                            "g": g, "lam": lam, "lat": lattice_label(lat)})
    t0 = time.perf_counter()
    checks = check_symmetries(p, lat)
    for name, defect in checks.items():
        rep.add(f"symmetry/{name}", digest, 1, defect, defect, (),
                defect < args.tol, 1000 * (time.perf_counter() - t0))
        t0 = time.perf_counter()


def cmd_eigen_example1(args, lat, rep: Reporter):
    counts = parse_int_list(args.counts)
    if len(counts) != 2:
        raise ConfigError("--counts needs N,Nt")
    n, nt = counts
    gt = parse_int_list(args.gtilde)
    if len(gt) != 4 or any(v not in (0, 1) for v in gt):
        raise ConfigError("--gtilde needs four entries from {0,1}")
    lam = parse_complex(getattr(args, "lambda"))
    if lam == 0:
        raise ConfigError("lambda must be nonzero")
    if abs(lam * n - round((lam * n).real)) > 1e-12:
        raise ConfigError(
            "line transform needs lambda*N integer (single-valued integrand)"
        )
    lo, hi = parse_int_list(args.nrange)
    x = _sample_real_coords(lat, n, args.seed)
    xt = _sample_real_coords(lat, nt, args.seed + 1, lo=0.2, hi=0.8) if nt else ()
    digest = params_digest({"suite": "example1", "counts": counts, "gt": gt,
                            "lam": lam, "x": x, "xt": xt,
                            "lat": lattice_label(lat)})
    for nn in range(lo, hi + 1):
        t0 = time.perf_counter()
        r = residual_example1(x, xt, gt, lam, nn, lat)
        rep.add(f"example1/n={nn}", digest, 1, abs(r), abs(r),
                tuple(complex(v) for v in x + xt),
                abs(r) < args.tol, 1000 * (time.perf_counter() - t0))


def cmd_eigen_example2(args, lat, rep: Reporter):
    counts = parse_int_list(args.counts)
    if len(counts) != 2:
        raise ConfigError("--counts needs N,Nt")
    n, nt = counts
    if n < 1:
        raise ConfigError("need N >= 1")
    t_val = parse_complex(args.tparam) if args.tparam else (0.31 + 0.22j) * lat.omega1 / _DEF_OMEGA1
    lam = parse_complex(getattr(args, "lambda")) if getattr(args, "lambda") else None
    x = _sample_real_coords(lat, n, args.seed, lo=0.3, hi=0.8)
    xt = _sample_real_coords(lat, nt, args.seed + 1, lo=0.55, hi=0.9) if nt else ()
    digest = params_digest({"suite": "example2", "counts": counts, "t": t_val,
                            "lam": lam, "x": x, "xt": xt,
                            "lat": lattice_label(lat)})
    t0 = time.perf_counter()
    r = residual_example2(n, nt, x, xt, t_val, lat, lam=lam)
    rep.add("example2", digest, 1, abs(r), abs(r),
            tuple(complex(v) for v in x + xt) + (t_val,),
            abs(r) < args.tol, 1000 * (time.perf_counter() - t0))


def cmd_table_constants(args, lat, rep: Reporter):
    k, params = _corollary_params(args)
    kind = {1: ConstantKind.COR1, 2: ConstantKind.COR2,
            3: ConstantKind.COR3, 4: ConstantKind.COR4}[k]
    digest = params_digest({"suite": f"constants{k}", "params": repr(params),
                            "lat": lattice_label(lat)})
    t0 = time.perf_counter()
    cst = constants(kind, lat, **params)
    print(f"corollary {k}: A = {cst.A:.12g}")
    print(f"corollary {k}: C = {cst.C:.12g}")
    print(f"corollary {k}: c0 = {cst.c0:.12g}, |g| = {cst.g_abs:.12g}")
    rep.add(f"constants/corollary{k}", digest, 1, 0.0, 0.0, (), True,
            1000 * (time.perf_counter() - t0),
            extra={"A": [cst.A.real, cst.A.imag], "C": [cst.C.real, cst.C.imag]})


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega1", type=float, default=argparse.SUPPRESS)
    common.add_argument("--tau", type=str, default=argparse.SUPPRESS, help="a+bi")
    common.add_argument("--q", type=float, default=argparse.SUPPRESS,
                        help="real nome")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--points", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--report", type=str, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="ellkern",
        description="Verification suites for elliptic kernel-function identities",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification suite")
    vsub = verify.add_subparsers(dest="suite", required=True)

    vsub.add_parser("appendix", help="all elliptic-function identities",
                    parents=[common])

    src = vsub.add_parser("source", help="master heat-type identity",
                          parents=[common])
    src.add_argument("--n", type=int, default=None)
    src.add_argument("--masses", type=str, required=True)
    src.add_argument("--lambda", type=str, required=True)
    src.add_argument("--d", type=str, required=True)

    cor = vsub.add_parser("corollary", help="kernel-function corollaries",
                          parents=[common])
    cor.add_argument("--which", type=int, required=True)
    cor.add_argument("--counts", type=str, required=True)
    cor.add_argument("--g", type=str, required=True)
    cor.add_argument("--lambda", type=str, required=True)

    sym = vsub.add_parser("symmetries", help="constants transformation laws",
                          parents=[common])
    sym.add_argument("--counts", type=str, required=True)
    sym.add_argument("--g", type=str, required=True)
    sym.add_argument("--lambda", type=str, required=True)

    eig = sub.add_parser("eigen", help="integral-transform eigenfunctions")
    esub = eig.add_subparsers(dest="suite", required=True)
    ex1 = esub.add_parser("example1", help="line-contour transform",
                          parents=[common])
    ex1.add_argument("--counts", type=str, default="1,0")
    ex1.add_argument("--gtilde", type=str, default="1,1,0,0")
    ex1.add_argument("--lambda", type=str, default="1")
    ex1.add_argument("--nrange", type=str, default="-2,2")
    ex2 = esub.add_parser("example2", help="figure-eight one-gap eigenfunction",
                          parents=[common])
    ex2.add_argument("--counts", type=str, default="1,0")
    ex2.add_argument("--tparam", type=str, default=None,
                     help="spectral parameter t as a+bi")
    ex2.add_argument("--lambda", type=str, default=None)

    table = sub.add_parser("table", help="print named constants")
    tsub = table.add_subparsers(dest="suite", required=True)
    tc = tsub.add_parser("constants", parents=[common])
    tc.add_argument("--which", type=int, required=True)
    tc.add_argument("--counts", type=str, required=True)
    tc.add_argument("--g", type=str, required=True)
    tc.add_argument("--lambda", type=str, required=True)
    return parser


_DISPATCH = {
    ("verify", "appendix"): cmd_verify_appendix,
    ("verify", "source"): cmd_verify_source,
    ("verify", "corollary"): cmd_verify_corollary,
    ("verify", "symmetries"): cmd_verify_symmetries,
    ("eigen", "example1"): cmd_eigen_example1,
    ("eigen", "example2"): cmd_eigen_example2,
    ("table", "constants"): cmd_table_constants,
}


_GLOBAL_DEFAULTS = {
    "omega1": _DEF_OMEGA1,
    "tau": None,
    "q": None,
    "seed": 1,
    "points": 50,
    "tol": 1e-9,
    "report": None,
}


def run(argv) -> int:
    """Execute one CLI invocation; deterministic given (config, seed)."""
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    for key, val in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, val)
    try:
        if args.points < 1:
            raise ConfigError("--points must be >= 1")
        if args.tol <= 0:
            raise ConfigError("--tol must be positive")
        lat = build_lattice(args)
        rep = Reporter(args.report)
        _DISPATCH[(args.command, args.suite)](args, lat, rep)
        rep.flush()
    except (ConfigError, InvalidLattice, InvalidCoupling, InvalidContour) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EllkernError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0 if rep.all_pass else 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
