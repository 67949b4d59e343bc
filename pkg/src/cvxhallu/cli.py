"""Command-line interface.

Subcommands print machine-readable ``key=value`` lines on stdout; human
messages go to stderr. Exit codes: 0 success, 1 usage error, 2 runtime
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .cg import CgConfig
from .image_core import ImageError, load_image, save_image
from .metrics import quality
from .oracle import OracleConfig, compare_with_pd
from .pd_solver import SolverConfig
from .pipeline import degrade, hallucinate, load_candidates, synth_candidates

log = logging.getLogger("cvxhallu")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
ORACLE_GAP = 0.005


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return "inf" if np.isinf(v) else f"{v:.6f}"
    return str(v)


def emit(key: str, value) -> None:
    print(f"{key}={_fmt(value)}")


def _add_solver_flags(p):
    p.add_argument("--scale", type=int, default=4)
    p.add_argument("--lambda", dest="lam", type=float, default=5e4)
    p.add_argument("--gamma", type=float, default=20.0)
    p.add_argument("--iters", type=int, default=400)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="parallel channel solves")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="only key=value output")
    parser = _Parser(prog="cvxhallu", description="Face hallucination by convex TV super-resolution.")
    parser.add_argument("--quiet", action="store_true", help="only key=value output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("degrade", help="bicubic-degrade an HR image")
    p.add_argument("--hr", required=True, help="ground-truth HR image")
    p.add_argument("--scale", type=int, default=4)
    p.add_argument("--lr-out", required=True)
    p.add_argument("--baseline-out", help="bicubic re-upsampled LR")
    p.add_argument("--candidates-out", help="directory for synthetic candidates")
    p.add_argument("--k", type=int, default=6, help="number of synthetic candidates")
    p.add_argument("--max-shift", type=int, default=2)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)

    p = add("hallucinate", help="super-resolve an LR image from candidates")
    p.add_argument("--lr", required=True)
    p.add_argument("--candidates", required=True, help="comma-separated, ordered")
    p.add_argument("--out", required=True)
    p.add_argument("--hr", help="optional ground truth for PSNR/SSIM")
    _add_solver_flags(p)

    p = add("evaluate", help="PSNR/SSIM of an image pair")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = add("oracle-check", help="primal-dual vs slow reference solver")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=8)
    p.add_argument("--candidates", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--oracle-iters", type=int, default=1_000_000)
    p.add_argument("--eps", type=float, default=1e-4)
    return parser


def cmd_degrade(args) -> int:
    hr = load_image(args.hr)
    lr, up = degrade(hr, args.scale)
    save_image(lr, args.lr_out)
    if args.baseline_out:
        save_image(up, args.baseline_out)
    if args.candidates_out:
        out = Path(args.candidates_out)
        out.mkdir(parents=True, exist_ok=True)
        cands = synth_candidates(hr, args.k, args.max_shift, args.noise, args.seed)
        paths = []
        for i, im in enumerate(cands.images):
            path = out / f"candidate_{i}.png"
            save_image(im, path)
            paths.append(str(path))
        emit("candidates", ",".join(paths))
    emit("lr_width", lr.width)
    emit("lr_height", lr.height)
    rep = quality(up, hr)
    emit("baseline_psnr_db", rep.psnr_db)
    emit("baseline_ssim", rep.ssim)
    return EXIT_OK


def cmd_hallucinate(args) -> int:
    lr = load_image(args.lr)
    paths = [s for s in args.candidates.split(",") if s]
    if not paths:
        raise UsageError("--candidates needs at least one path")
    cands = load_candidates(paths)
    cfg = SolverConfig(
        lam=args.lam,
        gamma=args.gamma,
        max_outer_iters=args.iters,
        rel_change_tol=args.tol,
        seed=args.seed,
        cg=CgConfig(),
    )
    log.info("solving %d channel(s), %d candidates", lr.n_channels, len(cands))
    out, diags = hallucinate(lr, cands, args.scale, cfg, workers=args.workers)
    save_image(out, args.out)
    for c, d in enumerate(diags):
        pre = f"ch{c}."
        emit(pre + "iterations", d.iterations_run)
        emit(pre + "cg_iterations", d.cg_total_iters)
        emit(pre + "op_norm", d.op_norm)
        emit(pre + "energy_first", d.energy_trace[0])
        emit(pre + "energy_min", min(d.energy_trace))
        emit(pre + "energy_final", d.final_energy)
        emit(pre + "rel_change_final", d.rel_change_trace[-1])
    if args.hr:
        for line in quality(out, load_image(args.hr)).lines():
            print(line)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    rep = quality(load_image(args.a), load_image(args.b))
    for line in rep.lines():
        print(line)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    if args.size % 4:
        raise UsageError("--size must be a multiple of 4")
    r = compare_with_pd(
        args.seed,
        size=args.size,
        n=args.candidates,
        lam=args.lam,
        gamma=args.gamma,
        cfg=OracleConfig(huber_eps=args.eps, iters=args.oracle_iters),
    )
    emit("energy_pd", r["energy_pd"])
    emit("energy_oracle", r["energy_oracle"])
    emit("rel_gap", r["rel_gap"])
    if r["rel_gap"] > ORACLE_GAP:
        log.error("relative energy gap %.3g exceeds %.3g", r["rel_gap"], ORACLE_GAP)
        return EXIT_RUNTIME
    return EXIT_OK


COMMANDS = {
    "degrade": cmd_degrade,
    "hallucinate": cmd_hallucinate,
    "evaluate": cmd_evaluate,
    "oracle-check": cmd_oracle_check,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ImageError, ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"cvxhallu {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
