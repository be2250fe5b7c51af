"""Command-line entry point: ``regfact {svd,rpca,rsvd,gen-noisy,denoise-demo}``."""
from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .descent import DescentConfig
from .experiment import SIGNALS, ExperimentSpec, gen_noisy, rel_err, run_denoise_demo
from .io import MatrixFormatError, read_matrix_csv, write_manifest, write_matrix_csv
from .matrix_core import svd, truncate_svd
from .regularizers import KINDS, RegularizerError, RegularizerMatrix, regularizer
from .rpca import PcaProblem, solve_rpca
from .rsvd import RsvdProblem, solve_rsvd


class UsageError(Exception):
    pass


def _reg_arg(text: str) -> tuple[str, str | None]:
    kind, _, path = text.partition(":")
    kind = kind.replace("-", "_")
    if kind not in KINDS:
        raise argparse.ArgumentTypeError(f"unknown regulariser kind {kind!r} (choose from {', '.join(KINDS)})")
    if kind in ("graph_laplacian", "custom") and not path:
        raise argparse.ArgumentTypeError(f"{kind} needs a CSV path: {kind}:PATH")
    return kind, path or None


def _seed_arg(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regfact", description=__doc__)
    parser.add_argument("--version", action="version", version=f"regfact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--input", type=Path, help="matrix CSV (no header)")
    io.add_argument("--output-dir", type=Path, default=Path("out"))

    rank = argparse.ArgumentParser(add_help=False)
    rank.add_argument("--rank", type=int, default=1)

    def reg(weight: float) -> argparse.ArgumentParser:
        # parents share action objects, so each subcommand gets its own copy of these defaults
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--lambda", dest="lam", type=float, default=weight)
        p.add_argument("--mu", type=float, default=weight)
        p.add_argument("--reg-d", type=_reg_arg, default=("second_difference", None), metavar="KIND[:PATH]")
        p.add_argument("--reg-g", type=_reg_arg, default=("second_difference", None), metavar="KIND[:PATH]")
        return p

    descent = argparse.ArgumentParser(add_help=False)
    d = DescentConfig()
    descent.add_argument("--strategy", choices=("steepest", "random"))
    descent.add_argument("--max-iters", type=int, default=d.max_iters)
    descent.add_argument("--tol", type=float, default=d.tol_rel, help="relative progress tolerance")
    descent.add_argument("--step", type=float, default=d.t0, help="initial rotation angle")
    descent.add_argument("--seed", type=_seed_arg, default=0)
    descent.add_argument("--init", choices=("warm", "random"), default="warm")

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument("--n", type=int, default=60)
    experiment.add_argument("--m", type=int, default=60)
    experiment.add_argument("--tau", type=float, default=0.06)
    experiment.add_argument("--signal", choices=SIGNALS, default="gaussian_bump")
    experiment.add_argument("--u-csv")
    experiment.add_argument("--v-csv")

    sub.add_parser("svd", parents=[io, rank], help="truncated SVD baseline")
    sub.add_parser("rpca", parents=[io, rank, reg(0.0)], help="closed-form regularised PCA")
    sub.add_parser("rsvd", parents=[io, rank, reg(0.0), descent], help="regularised SVD by rotation descent")
    gen = sub.add_parser("gen-noisy", parents=[experiment], help="write a noisy rank-one test matrix")
    gen.add_argument("--output-dir", type=Path, default=Path("out"))
    gen.add_argument("--seed", type=_seed_arg, default=0)
    demo = sub.add_parser("denoise-demo", parents=[experiment, rank, reg(1.5), descent],
                          help="SVD vs regularised SVD on a noisy rank-one matrix")
    demo.add_argument("--output-dir", type=Path, default=Path("out"))
    return parser


def _load_input(args) -> np.ndarray:
    if args.input is None:
        raise UsageError(f"{args.command} needs --input PATH (a headerless CSV matrix)")
    if not args.input.is_file():
        raise UsageError(f"input file not found: {args.input}")
    return read_matrix_csv(args.input)


def _regulariser(spec, size: int, side: str, weight: float = 1.0) -> RegularizerMatrix:
    kind, path = spec
    if weight == 0.0:
        # a zero-weight penalty never enters the solution; skip size checks on it
        kind, path = "none", None
    matrix = None
    if path is not None:
        if not Path(path).is_file():
            raise UsageError(f"--reg-{side} file not found: {path}")
        matrix = read_matrix_csv(path)
    try:
        return regularizer(kind, size, matrix)
    except RegularizerError as exc:
        raise UsageError(f"--reg-{side}: {exc}") from None


def _check_rank(k: int, A: np.ndarray):
    if not 1 <= k <= min(A.shape):
        raise UsageError(f"--rank {k} is out of range for a {A.shape[0]}x{A.shape[1]} matrix (1..{min(A.shape)})")


def _descent(args, default_strategy: str) -> DescentConfig:
    try:
        return DescentConfig(strategy=args.strategy or default_strategy, t0=args.step,
                             max_iters=args.max_iters, tol_rel=args.tol, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _base_manifest(args, solver) -> dict:
    return {
        "command": args.command,
        "solver": solver,
        "version": __version__,
        "argv": getattr(args, "argv", None),
        "input": None if getattr(args, "input", None) is None else str(args.input),
        "output_dir": str(args.output_dir),
        "seed": getattr(args, "seed", None),
    }


def _write(out: Path, files: dict) -> list:
    out.mkdir(parents=True, exist_ok=True)
    for name, X in files.items():
        write_matrix_csv(X, out / name)
    return sorted(files)


def cmd_svd(args) -> dict:
    A = _load_input(args)
    _check_rank(args.rank, A)
    t = time.perf_counter()
    res = svd(A)
    A_k = truncate_svd(res, args.rank)
    ms = 1e3 * (time.perf_counter() - t)
    r = min(args.rank, res.rank)
    outputs = _write(args.output_dir, {"U.csv": res.U[:, :r], "sigma.csv": res.sigma[None, :],
                                       "V.csv": res.V[:, :r], "recon.csv": A_k})
    return {**_base_manifest(args, "svd"), "k": args.rank, "lambda": 0.0, "mu": 0.0,
            "reg_d": None, "reg_g": None, "outputs": outputs,
            "metrics": {"input_err": rel_err(A_k, A), "sigma": res.sigma, "rank": res.rank},
            "timings_ms": {"solve": ms}}


def cmd_rpca(args) -> dict:
    A = _load_input(args)
    _check_rank(args.rank, A)
    L = _regulariser(args.reg_d, A.shape[0], "d", args.lam)
    M = _regulariser(args.reg_g, A.shape[1], "g", args.mu)
    try:
        prob = PcaProblem(A, args.rank, args.lam, args.mu, L, M)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    t = time.perf_counter()
    sol = solve_rpca(prob)
    ms = 1e3 * (time.perf_counter() - t)
    recon = sol.reconstruct()
    outputs = _write(args.output_dir, {"P.csv": sol.P, "Q.csv": sol.Q, "recon.csv": recon,
                                       "k_spectrum.csv": sol.k_spectrum[None, :]})
    return {**_base_manifest(args, "rpca"), "k": args.rank, "lambda": args.lam, "mu": args.mu,
            "reg_d": args.reg_d[0], "reg_g": args.reg_g[0], "outputs": outputs,
            "metrics": {"input_err": rel_err(recon, A), "objective": sol.objective,
                        "k_spectrum": sol.k_spectrum, "degenerate": sol.diagnostics["degenerate"]},
            "timings_ms": {"solve": ms}}


def cmd_rsvd(args) -> dict:
    A = _load_input(args)
    _check_rank(args.rank, A)
    L = _regulariser(args.reg_d, A.shape[0], "d", args.lam)
    M = _regulariser(args.reg_g, A.shape[1], "g", args.mu)
    config = _descent(args, "steepest")
    try:
        prob = RsvdProblem(A, args.rank, args.lam, args.mu, L, M, config, init=args.init)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sol = solve_rsvd(prob)
    recon = sol.reconstruct()
    outputs = _write(args.output_dir, {"P.csv": sol.P, "Q.csv": sol.Q, "beta.csv": sol.beta[None, :],
                                       "recon.csv": recon,
                                       "psi_trace.csv": np.asarray(sol.psi_trace)[:, None]})
    return {**_base_manifest(args, "rsvd"), "k": args.rank, "lambda": args.lam, "mu": args.mu,
            "reg_d": args.reg_d[0], "reg_g": args.reg_g[0], "init": args.init,
            "descent": dataclasses.asdict(config), "outputs": outputs,
            "metrics": {"input_err": rel_err(recon, A), "objective": sol.objective,
                        "psi_final": sol.diagnostics["psi_final"], "iters": sol.iterations,
                        "converged": sol.converged, "beta": sol.beta,
                        "p_gram_offdiag": sol.diagnostics["p_gram_offdiag"]},
            "timings_ms": {"solve": 1e3 * sol.diagnostics["seconds"]}}


def _experiment(args) -> ExperimentSpec:
    try:
        return ExperimentSpec(args.n, args.m, args.signal, args.tau, args.seed, args.u_csv, args.v_csv)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_gen_noisy(args) -> dict:
    spec = _experiment(args)
    A, u, v = gen_noisy(spec)
    outputs = _write(args.output_dir, {"A.csv": A, "truth.csv": np.outer(u, v),
                                       "u.csv": u[:, None], "v.csv": v[:, None]})
    return {**_base_manifest(args, None), "experiment": dataclasses.asdict(spec), "outputs": outputs,
            "metrics": {"noise_energy_per_entry": float(np.mean((A - np.outer(u, v)) ** 2))}}


def cmd_denoise_demo(args) -> None:
    spec = _experiment(args)
    if args.reg_d[1] or args.reg_g[1]:
        raise UsageError("denoise-demo supports only built-in regulariser kinds")
    _regulariser(args.reg_d, spec.n, "d", args.lam)
    _regulariser(args.reg_g, spec.m, "g", args.mu)
    if not 1 <= args.rank <= min(spec.n, spec.m):
        raise UsageError(f"--rank {args.rank} is out of range for a {spec.n}x{spec.m} matrix")
    # the demo writes its own files and manifest
    run_denoise_demo(spec, args.rank, args.lam, args.mu, _descent(args, "random"),
                     output_dir=args.output_dir, reg_d=args.reg_d[0], reg_g=args.reg_g[0],
                     init=args.init, extra={"argv": args.argv})


COMMANDS = {"svd": cmd_svd, "rpca": cmd_rpca, "rsvd": cmd_rsvd,
            "gen-noisy": cmd_gen_noisy, "denoise-demo": cmd_denoise_demo}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    try:
        manifest = COMMANDS[args.command](args)
        if manifest is not None:
            write_manifest(manifest, args.output_dir / "manifest.json")
    except (UsageError, MatrixFormatError, RegularizerError) as exc:
        print(f"regfact {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
