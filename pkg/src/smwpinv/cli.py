"""Command-line front end.

Exit codes: 0 success (or a valid result), 2 conditions failed under
``--check``, 3 I/O, parse or usage error, 4 precondition violation.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bench import run_bench
from .block import BlockMatrix, block_pinv
from .errors import (
    DimensionError,
    ParseError,
    PreconditionError,
    SearchExhaustedError,
    SingularSystemError,
)
from .fileio import RunReport, read_bundle, read_mtx, write_bundle, write_mtx
from .generate import REGIMES, GenSpec, generate, oracle_pinv
from .linalg import DEFAULT_TOL, penrose_check, pinv, relative_error
from .smw import (
    UpdateInstance,
    check_conditions,
    schur_factors,
    smw_classic,
    smw_pinv,
    smw_pinv_simplified,
)

EXIT_OK = 0
EXIT_CONDITIONS = 2
EXIT_IO = 3
EXIT_PRECONDITION = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _inputs(paths, mats):
    return [{"path": str(p), "shape": list(m.shape)} for p, m in zip(paths, mats)]


def _emit(report, args, lines):
    if getattr(args, "report", None):
        Path(args.report).write_text(report.to_json())
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        for line in lines:
            print(line)


def _update_verdict(cond, penrose, tol):
    if cond.verdict_thm37 and max(penrose.residuals) <= tol:
        return "valid"
    if cond.ranges_hold and penrose.residuals[0] <= tol:
        return "one-inverse-only"
    return "invalid"


def cmd_update(args):
    if args.bundle:
        _, mats = read_bundle(args.bundle)
        paths = [Path(args.bundle) / f"{k}.mtx" for k in "auv"]
        a, u, v = (mats[k] for k in "auv")
        default_out = Path(args.bundle) / "pinv.mtx"
    else:
        if len(args.paths) != 3:
            raise _UsageError("update needs A U V files or --bundle DIR")
        paths = args.paths
        a, u, v = (read_mtx(p) for p in paths)
        default_out = Path("pinv.mtx")
    out = Path(args.out) if args.out else default_out
    tol = args.tol
    inst = UpdateInstance.create(a, u, v, tol=tol)

    t0 = time.perf_counter()
    factors = schur_factors(inst, tol)
    cond = check_conditions(inst, factors, tol) if args.check else None
    if args.method == "full":
        z = smw_pinv(inst, factors, tol, cond, check=False).pinv
    elif args.method == "simplified":
        z = smw_pinv_simplified(inst, factors, tol, cond, check=False).pinv
    else:
        rank = pinv(inst.a, check=False).numerical_rank
        m, n, _ = inst.shape
        if m != n or rank < n:
            raise PreconditionError(
                f"classic method needs a nonsingular A (shape {inst.a.shape}, "
                f"numerical rank {rank})", {"rank": rank})
        z = smw_classic(inst.a_pinv, inst.u, inst.v)
    t_update = time.perf_counter() - t0
    write_mtx(out, z)

    dense = inst.updated()
    penrose = penrose_check(dense, z, tol)
    report = RunReport(
        command="update", inputs=_inputs(paths, (a, u, v)), tol=tol,
        output=str(out), method=args.method,
        penrose_residuals=list(penrose.residuals),
    )
    lines = [f"wrote {out}  ({z.shape[0]}x{z.shape[1]}, method={args.method})",
             str(penrose)]
    if cond is not None:
        report.condition_report = cond.as_dict()
        report.verdict = _update_verdict(cond, penrose, tol)
        lines.append(
            f"range inclusions: U {cond.r_u_in_a[1]:.2e}, V {cond.r_v_in_astar[1]:.2e}, "
            f"U* {cond.r_ustar_in_s[1]:.2e}, V* {cond.r_vstar_in_sstar[1]:.2e}")
        lines.append(
            f"hermitian UE {cond.herm_ue:.2e}, hermitian UF {cond.herm_uf:.2e}, "
            f"zero middle {cond.zero_middle:.2e}")
    if args.oracle or args.bench:
        t0 = time.perf_counter()
        ref = oracle_pinv(dense)
        t_oracle = time.perf_counter() - t0
        err = relative_error(z, ref)
        report.oracle = {"relative_error": err, "agrees": err <= tol}
        lines.append(f"oracle relative error {err:.3e} "
                     f"({'agrees' if err <= tol else 'DISAGREES'})")
        if args.bench:
            report.timings = {"update_s": t_update, "oracle_s": t_oracle,
                              "speedup": t_oracle / t_update}
            lines.append(f"update {t_update:.4f}s, oracle {t_oracle:.4f}s")
    lines.append(f"verdict: {report.verdict}")
    _emit(report, args, lines)
    if args.check and report.verdict != "valid":
        return EXIT_CONDITIONS
    return EXIT_OK


def cmd_pinv(args):
    a = read_mtx(args.path)
    res = pinv(a, check=True, check_tol=args.tol,
               tol=args.rank_tol)
    out = Path(args.out) if args.out else Path("pinv.mtx")
    write_mtx(out, res.pinv)
    report = RunReport(
        command="pinv", inputs=_inputs([args.path], [a]), tol=args.tol,
        output=str(out), penrose_residuals=list(res.penrose.residuals),
        verdict="valid" if res.penrose.all_pass else "invalid",
        details={"numerical_rank": res.numerical_rank,
                 "singular_values": [float(s) for s in res.singular_values],
                 "rank_tol": res.tol},
    )
    _emit(report, args, [f"wrote {out}  rank {res.numerical_rank}", str(res.penrose)])
    return EXIT_OK


def cmd_block(args):
    paths = args.paths
    mats = [read_mtx(p) for p in paths]
    out = Path(args.out) if args.out else Path("pinv.mtx")
    report = RunReport(command="block", inputs=_inputs(paths, mats), tol=args.tol)
    try:
        res = block_pinv(BlockMatrix.create(*mats), args.tol)
    except PreconditionError as exc:
        report.verdict = "invalid"
        report.error = str(exc)
        report.details = {"precondition_residuals": exc.residuals}
        _emit(report, args, [f"error: {exc}", f"residuals: {exc.residuals}"])
        return EXIT_PRECONDITION
    write_mtx(out, res.pinv)
    report.output = str(out)
    report.penrose_residuals = list(res.penrose.residuals)
    report.verdict = "valid" if res.penrose.all_pass else "invalid"
    _emit(report, args, [f"wrote {out}", str(res.penrose)])
    return EXIT_OK


def cmd_gen(args):
    spec = GenSpec(m=args.m, n=args.n, r=args.r, rank=args.rank,
                   regime=args.regime, seed=args.seed, scale=args.scale, s=args.s)
    obj = generate(spec)
    if args.regime == "xny":
        mats = dict(zip(("x", "n", "y"), obj))
        expected = {"xny_conditions": True}
    elif args.regime == "block":
        mats = {"a": obj.a, "b": obj.b, "c": obj.c, "d": obj.d}
        expected = {"block_conditions": True}
    else:
        mats = {"a": obj.a, "u": obj.u, "v": obj.v}
        cond = check_conditions(obj)
        expected = {"verdict_thm32": bool(cond.verdict_thm32),
                    "verdict_thm37": bool(cond.verdict_thm37),
                    "provenance": obj.provenance}
    manifest = write_bundle(args.out_dir, mats, args.regime, spec.as_dict(), expected)
    if args.json:
        sys.stdout.write(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    else:
        shapes = ", ".join(f"{k} {tuple(v)}" for k, v in manifest.shapes.items())
        print(f"wrote {args.out_dir}: {shapes}")
    return EXIT_OK


def cmd_bench(args):
    rows = run_bench(args.m, args.n, args.r_list, args.seeds, args.repeats)
    report = RunReport(command="bench", inputs=[], details={"rows": rows},
                       verdict="valid" if all(r["gate_passed"] for r in rows)
                       else "invalid")
    report.timings = {
        "median_update_s": float(np.median([r["update_s"] for r in rows])),
        "median_oracle_s": float(np.median([r["oracle_s"] for r in rows
                                            if r["oracle_s"] is not None] or [np.nan])),
    }
    lines = [f"{'m':>6} {'n':>6} {'r':>3} {'seed':>5} {'update_s':>10} "
             f"{'oracle_s':>10} {'speedup':>9} {'error':>10}"]
    for r in rows:
        speed = "gate-fail" if r["speedup"] is None else f"{r['speedup']:.1f}x"
        oracle = "-" if r["oracle_s"] is None else f"{r['oracle_s']:.4f}"
        lines.append(f"{r['m']:>6} {r['n']:>6} {r['r']:>3} {r['seed']:>5} "
                     f"{r['update_s']:>10.4f} {oracle:>10} {speed:>9} {r['error']:>10.2e}")
    _emit(report, args, lines)
    return EXIT_OK if report.verdict == "valid" else EXIT_CONDITIONS


class _UsageError(Exception):
    pass


def _int_list(text):
    return [int(t) for t in text.split(",") if t]


def build_parser():
    parser = _Parser(prog="smwpinv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out=True):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="residual tolerance (default %(default)g)")
        p.add_argument("--json", action="store_true", help="print the JSON report")
        p.add_argument("--report", help="also write the JSON report here")
        if out:
            p.add_argument("-o", "--out", help="output Matrix Market file")

    p = sub.add_parser("update", help="pseudoinverse of A + U V^* from A^+")
    p.add_argument("paths", nargs="*", metavar="FILE", help="A, U and V files")
    p.add_argument("--bundle", help="bundle directory holding a/u/v.mtx")
    p.add_argument("--method", choices=("full", "simplified", "classic"),
                   default="full")
    p.add_argument("--check", action="store_true",
                   help="evaluate the conditions; exit 2 unless the result is valid")
    p.add_argument("--oracle", action="store_true",
                   help="compare against a full SVD pseudoinverse")
    p.add_argument("--bench", action="store_true", help="time update vs oracle")
    common(p)
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("pinv", help="SVD pseudoinverse of one matrix")
    p.add_argument("path")
    p.add_argument("--rank-tol", type=float, default=None,
                   help="relative singular value cutoff (default max(m,n)*eps)")
    common(p)
    p.set_defaults(func=cmd_pinv)

    p = sub.add_parser("block", help="pseudoinverse of [[A, C], [B, D]]")
    p.add_argument("paths", nargs=4, metavar=("A", "B", "C", "D"))
    common(p)
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("gen", help="write a seeded instance bundle")
    p.add_argument("--regime", choices=REGIMES, default="thm32")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--s", type=int, default=None, help="block regime: columns of C, D")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--scale", type=float, default=0.5)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time update vs full recomputation")
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--r-list", type=_int_list, default=[2])
    p.add_argument("--seeds", type=_int_list, default=[0])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors, --help and --version
        return exc.code
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"smwpinv: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParseError, OSError, DimensionError, ValueError) as exc:
        print(f"smwpinv: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PreconditionError, SingularSystemError, SearchExhaustedError) as exc:
        print(f"smwpinv: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
