"""``schottky-spectral`` command-line entry point.

Each subcommand is a pure function of the input file and the flags.  Results
go to ``<out>/<command>/<label>/`` where the label defaults to a hash of the
configuration, so rerunning a command overwrites its own directory with
identical bytes.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import os
import random
import sys
from pathlib import Path
from typing import Callable

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .congruence import audit_ptau, build_context, count_Nn, min_offdiagonal_norm_squared
from .errors import InputError, SchottkyError, ValidationError
from .reporting import OutputDir
from .schottky import (
    BUILTIN_DATA,
    SchottkyData,
    audit_lemmas,
    build_tau_block,
    count_prefixes_in,
    count_suffixes_in,
    is_partition,
    load_schottky,
    random_reduced_word,
    validate,
)
from .spectral import Circle, Rect, delta_two_methods, find_zeros, multiplicity_pipeline
from .transfer import DEFAULT_M, ClassicalDeterminant, RepDescriptor, ZetaTauN, fredholm_logdet

class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for failed validation here
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def available_cores() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def parse_region(text: str):
    """``cx,cy,r`` gives a disk and ``x0,x1,y0,y1`` a rectangle."""
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse region {text!r}") from exc
    if len(vals) == 3:
        cx, cy, r = vals
        if not r > 0:
            raise InputError("disk radius must be positive")
        return Circle(complex(cx, cy), r)
    if len(vals) == 4:
        x0, x1, y0, y1 = vals
        if not (x1 > x0 and y1 > y0):
            raise InputError("rectangle needs x0 < x1 and y0 < y1")
        return Rect(x0, x1, y0, y1)
    raise InputError("region must be cx,cy,r or x0,x1,y0,y1")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", default="gamma_ex",
                        help=f"Schottky data JSON path or builtin name ({', '.join(BUILTIN_DATA)})")
    common.add_argument("--out", default="out", help="output root directory")
    common.add_argument("--label", help="output subdirectory name (default: config hash)")
    common.add_argument("--threads", type=int, help="cap BLAS/LAPACK worker threads")
    common.add_argument("--tol", type=float, help="numerical tolerance")
    common.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    parser = _Parser(prog="schottky-spectral", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common], help="check Schottky data")

    p = sub.add_parser("delta", parents=[common], help="growth exponent by two routes")
    p.add_argument("--basis", type=int, default=DEFAULT_M, help="monomials per disk minus one")

    for name, helptext in (("zeros", "locate zeta zeros in a region"),
                           ("zeta-grid", "sample the zeta function on a grid")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--region", required=True, help="cx,cy,r or x0,x1,y0,y1 (use --region=-1,...)")
        p.add_argument("--n", type=int, default=1, help="congruence level")
        p.add_argument("--tau", type=float, help="block scale; omitted means the single-move operator")
        p.add_argument("--basis", type=int, default=DEFAULT_M)
        if name == "zeta-grid":
            p.add_argument("--step", type=float, default=0.1, help="grid spacing")

    p = sub.add_parser("count", parents=[common], help="lattice points of level n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=float, required=True, help="norm bound R")

    p = sub.add_parser("audit", parents=[common], help="lemma and pair-set audits")
    p.add_argument("--max-len", type=int, help="word length for the lemma audit")
    p.add_argument("--tau", type=float, help="block scale for the pair-set audit")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="seed for random long words")
    p.add_argument("--samples", type=int, default=1000, help="random words in the block check")

    p = sub.add_parser("pipeline", parents=[common], help="Jensen multiplicity pipeline")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--basis", type=int, default=DEFAULT_M)
    return parser


def _config(args) -> dict:
    skip = {"out", "label", "threads", "no_figures"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _figure(out: OutputDir, args, render: Callable, name: str, *payload, **options) -> None:
    if args.no_figures:
        return
    render(*payload, path=out.path / name, metadata=out.figure_metadata(), **options)
    out.files.append(name)


def _load(args, check: bool = True) -> SchottkyData:
    return load_schottky(args.input, check=check)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, out: OutputDir) -> int:
    data = _load(args, check=False)
    report = validate(data, tol=args.tol or 1e-12, raise_on_fail=False)
    out.write_json("report.json", report)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} min_gap={report.min_gap!r} pairing_residual={report.pairing_residual!r}")
    for msg in report.messages:
        print(f"  {msg}")
    return 0 if report.passed else ValidationError.exit_code


def cmd_delta(args, out: OutputDir) -> int:
    data = _load(args)
    est = delta_two_methods(data, args.basis, args.tol or 1e-8)
    out.write_json("report.json", est)
    print(repr(est.eigenvalue_route))
    print(f"determinant route {est.determinant_route!r} residual {est.residual:.3g}")
    return 0


def _zeta(data: SchottkyData, args):
    """Zeta callable and a matching ``(phase, log|·|)`` evaluator."""
    ctx = build_context(data, args.n)
    if args.tau is not None:
        zeta = ZetaTauN(data, ctx, args.tau, args.basis)
        return zeta, zeta.logdet, "det(I - L^2), block operator"
    rep = RepDescriptor.regular(ctx) if ctx.n > 1 else None
    det = ClassicalDeterminant(data, args.basis, rep)
    return det, lambda s: fredholm_logdet(det.family.matrix(s)), "det(I - L), single-move operator"


def cmd_zeros(args, out: OutputDir) -> int:
    from .plotting import zeros_figure

    data = _load(args)
    region = parse_region(args.region)
    fun, _, kind = _zeta(data, args)
    report = find_zeros(fun, region, args.tol or 1e-10).to_dict()
    report["function"] = kind
    out.write_json("report.json", report)
    out.write_csv("zeros.csv", ["re", "im", "multiplicity", "eigenvalue"],
                  [(z["re"], z["im"], z["multiplicity"],
                    z["re"] * (1 - z["re"]) if z["re"] > 0.5 and abs(z["im"]) < 1e-9 else None)
                   for z in report["zeros"]])
    _figure(out, args, zeros_figure, "zeros.png", report)
    print(f"{report['counts']['argument_principle']} zeros (argument principle)")
    for z in report["zeros"]:
        print(f"  {z['re']!r} {z['im']!r} x{z['multiplicity']}")
    return 0


def _grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def cmd_zeta_grid(args, out: OutputDir) -> int:
    from .plotting import zeta_grid_figure

    if not args.step > 0:
        raise InputError("--step must be positive")
    data = _load(args)
    region = parse_region(args.region)
    box = region.bounding_box() if isinstance(region, Circle) else region
    _, logdet, kind = _zeta(data, args)
    rows = []
    for y in _grid_axis(box.y0, box.y1, args.step):
        for x in _grid_axis(box.x0, box.x1, args.step):
            phase, logabs = logdet(complex(x, y))
            if logabs == -math.inf:
                val, log10 = 0j, -math.inf
            else:
                val = phase * math.exp(min(logabs, 700.0))
                log10 = logabs / math.log(10)
            rows.append((float(x), float(y), val.real, val.imag, log10))
    out.write_csv("grid.csv", ["re_s", "im_s", "re_zeta", "im_zeta", "log10_abs_zeta"], rows)
    out.write_json("report.json", {"function": kind, "points": len(rows),
                                   "region": box.to_dict(), "step": args.step,
                                   "basis": args.basis})
    _figure(out, args, zeta_grid_figure, "grid.png", rows, title=kind)
    print(f"{len(rows)} grid points written to {out.path / 'grid.csv'}")
    return 0


def cmd_count(args, out: OutputDir) -> int:
    from .plotting import count_figure

    count, witnesses = count_Nn(args.n, args.radius)
    out.write_json("report.json", {"n": args.n, "R": args.radius, "count": count,
                                   "min_offdiagonal_norm_squared": min_offdiagonal_norm_squared(witnesses)})
    out.write_csv("witnesses.csv", ["a", "b", "c", "d"], witnesses)
    _figure(out, args, count_figure, "count.png", witnesses, args.n, args.radius)
    print(count)
    return 0


def cmd_audit(args, out: OutputDir) -> int:
    from .plotting import block_growth_figure, bucket_figure

    data = _load(args)
    result = {}
    max_len = args.max_len if args.max_len is not None or args.tau is not None else 8
    if max_len is not None:
        lemmas = audit_lemmas(data, max_len)
        result["lemmas"] = lemmas.to_dict()
        _figure(out, args, block_growth_figure, "blocks.png", lemmas.tau_grid, lemmas.block_sizes,
                lemmas.block_slope, lemmas.block_intercept)
        print(f"lemma audit over {lemmas.word_count} words: nesting "
              f"{'ok' if lemmas.nesting_ok else 'FAILED'}, contraction {lemmas.contraction:.4f}, "
              f"block slope {lemmas.block_slope:.4f}")
    if args.tau is not None:
        ctx = build_context(data, args.n)
        pairs = audit_ptau(data, ctx, args.tau)
        block = build_tau_block(data, args.tau)
        rng = random.Random(args.seed)
        length = block.max_word_length + 4
        samples = [random_reduced_word(rng, data.N, length) for _ in range(args.samples)]
        prefix_counts = [count_prefixes_in(w, block.mirror_words) for w in samples]
        suffix_counts = [count_suffixes_in(w, block.words) for w in samples]
        result["pairs"] = pairs.to_dict()
        result["block"] = {
            "tau": args.tau,
            "size": len(block.words),
            "mirror_set_is_prefix_code": is_partition(block.mirror_words, data.N),
            "sample_length": length,
            "samples": args.samples,
            "seed": args.seed,
            "words_with_one_prefix_in_mirror_set": sum(c == 1 for c in prefix_counts),
            "words_with_one_suffix_in_block": sum(c == 1 for c in suffix_counts),
        }
        out.write_csv("buckets.csv", ["a", "c", "count", "scaled"], pairs.bucket_rows())
        _figure(out, args, bucket_figure, "buckets.png", pairs.bucket_rows(),
                title=f"n={args.n}, tau={args.tau}")
        print(f"P_n(tau): {pairs.size} pairs ({pairs.diagonal} diagonal), "
              f"bucket constant {pairs.bucket_constant:.4g}, size ratio {pairs.size_bound_ratio:.4g}")
    out.write_json("report.json", result)
    return 0


def cmd_pipeline(args, out: OutputDir) -> int:
    from .plotting import pipeline_figure

    data = _load(args)
    report = multiplicity_pipeline(data, args.n, args.beta, args.basis, tol=args.tol or 1e-10)
    body = report.to_dict()
    out.write_json("report.json", body)
    out.write_csv("zeros.csv", ["re", "im", "multiplicity", "eigenvalue"],
                  [(z["re"], z["im"], z["multiplicity"], z["eigenvalue"]) for z in report.zeros])
    out.write_csv("c_grid.csv", ["c", "minus_log_abs_zeta"], report.c_grid)
    _figure(out, args, pipeline_figure, "pipeline.png", body)
    s = report.summary
    print(f"regime {s['regime']}  delta {s['delta']!r}  alpha {s['gap_parameters']['alpha']!r}")
    print(f"tau_n {s['tau_n']!r}  index {s['index']}  c {s['c']}  R {s['jensen_radius']!r}")
    print(f"Jensen sum {s['jensen_sum']:.6g}  zero bound {s['jensen_zero_bound']:.6g}  "
          f"argument count {s['argument_count']}")
    for z in report.zeros:
        lam = f"  lambda {z['eigenvalue']!r}" if z["eigenvalue"] is not None else ""
        print(f"  zero {z['re']!r} {z['im']!r} x{z['multiplicity']}{lam}")
    print(f"new-eigenvalue multiplicity threshold {s['new_eigenvalue_threshold']:.6g}")
    return 0


HANDLERS = {
    "validate": cmd_validate,
    "delta": cmd_delta,
    "zeros": cmd_zeros,
    "zeta-grid": cmd_zeta_grid,
    "count": cmd_count,
    "audit": cmd_audit,
    "pipeline": cmd_pipeline,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        raise InputError("--threads must be at least 1")
    if args.input not in BUILTIN_DATA and not Path(args.input).exists():
        raise InputError(f"no such input: {args.input}")
    limits = contextlib.nullcontext()
    if args.threads:
        # more BLAS threads than cores makes OpenBLAS spin; the flag is a cap, not a request
        limits = threadpool_limits(limits=min(args.threads, available_cores()))
    with limits:
        out = OutputDir(args.out, args.command, _config(args), args.label)
        out.write_config()
        return HANDLERS[args.command](args, out)


def main(argv=None) -> int:
    try:
        code = run(argv)
    except SchottkyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = InputError.exit_code
    return code


if __name__ == "__main__":
    sys.exit(main())
