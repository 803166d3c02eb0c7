"""Command-line driver.

Subcommands: solve, thresholds, plant, certify, nmf, biclique. Every run
emits a JSON record containing the result payload and a manifest (command,
inputs, parameters, tool version, wall-clock duration). Matrix index sets
in records are 1-based; see README for the record schema.
"""

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .analysis import (BlockSelector, row_zero_threshold, theta_A, theta_B,
                       top_block)
from .generate import (NOISE_FAMILIES, PlantedModel, plant_biclique,
                       plant_rank_one, two_block_matrix)
from .linalg import theta_norm
from .mmio import FORMATS, MatrixParseError, parse_matrix, write_matrix
from .nmf import greedy_extract
from .solver import (ConvergenceError, DualCertificate, SolverConfig,
                     check_optimality, recover_dual, solve)


@dataclass(frozen=True)
class RunManifest:
    """Provenance serialized with every result record."""

    command: str
    inputs: dict
    parameters: dict
    version: str
    duration_seconds: float


def _one_based(indices):
    return [int(i) + 1 for i in indices]


def _vector(v):
    return [float(x) for x in v]


def _emit(record, output):
    text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _solver_config(args):
    tol = args.tol
    return SolverConfig(theta=args.theta,
                        penalty=args.penalty,
                        max_iters=args.max_iters,
                        tol_primal=args.tol_primal or tol,
                        tol_dual=args.tol_dual or tol,
                        tol_gap=args.tol_gap or tol,
                        support_tol=args.support_tol)


def _add_solver_flags(sub, theta_required=True):
    if theta_required:
        sub.add_argument("--theta", type=float, required=True,
                         help="l1 weight in the objective (no default: results "
                              "depend qualitatively on it)")
    sub.add_argument("--penalty", type=float, default=1.0)
    sub.add_argument("--max-iters", type=int, default=50000)
    sub.add_argument("--tol", type=float, default=1e-8,
                     help="sets all three tolerances unless overridden")
    sub.add_argument("--tol-primal", type=float, default=None)
    sub.add_argument("--tol-dual", type=float, default=None)
    sub.add_argument("--tol-gap", type=float, default=None)
    sub.add_argument("--support-tol", type=float, default=1e-6)


def _add_io_flags(sub):
    sub.add_argument("--input", required=True, help="matrix file to read")
    sub.add_argument("--format", choices=FORMATS, default=None,
                     help="input format (default: detect from header)")
    sub.add_argument("--output", default=None,
                     help="result record path (default: stdout)")


def _cmd_solve(args):
    a = parse_matrix(args.input, args.format)
    config = _solver_config(args)
    sol = solve(a, config)
    result = {
        "sigma": sol.sigma,
        "u": _vector(sol.u),
        "v": _vector(sol.v),
        "support_rows": _one_based(sol.support_rows),
        "support_cols": _one_based(sol.support_cols),
        "objective": sol.objective,
        "dual_gap": sol.gap,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "non_unique": sol.non_unique,
    }
    if args.solution_output:
        write_matrix(args.solution_output, sol.x)
        result["solution_path"] = args.solution_output
    if args.certificate_output:
        cert = recover_dual(a, args.theta, sol.state)
        cert_record = {
            "y": [_vector(row) for row in cert.y],
            "z": [_vector(row) for row in cert.z],
            "alpha": cert.alpha,
            "beta": cert.beta,
            "dual_norm": cert.dual_norm,
            "lambda_star": cert.lambda_star,
            "spectral_gap": cert.spectral_gap,
            "linf_argmax_count": cert.linf_argmax_count,
        }
        with open(args.certificate_output, "w", encoding="utf-8") as handle:
            json.dump(cert_record, handle, indent=2, sort_keys=True)
            handle.write("\n")
        result["certificate_path"] = args.certificate_output
    inputs = {"matrix": args.input}
    params = {"theta": args.theta, "tol_primal": config.tol_primal,
              "tol_dual": config.tol_dual, "tol_gap": config.tol_gap,
              "support_tol": config.support_tol, "penalty": config.penalty,
              "max_iters": config.max_iters}
    return result, inputs, params


def _parse_index_list(text):
    return [int(t) - 1 for t in text.split(",") if t.strip()]


def _cmd_thresholds(args):
    a = parse_matrix(args.input, args.format)
    m = a.shape[0]
    result = {"theta_A": theta_A(a)}
    if bool(args.rows) != bool(args.cols):
        raise ValueError("--rows and --cols must be given together")
    if args.rows and args.cols:
        block = BlockSelector(rows=np.array(_parse_index_list(args.rows)),
                              cols=np.array(_parse_index_list(args.cols)))
        tb = theta_B(a, block)
        result["theta_B"] = tb
        result["theta_B_applicable"] = tb is not None
        result["block_rows"] = _one_based(block.rows)
        result["block_cols"] = _one_based(block.cols)
    table = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == j:
                row.append(None)
            else:
                row.append(row_zero_threshold(a, i, j))
        table.append(row)
    result["row_zero_thresholds"] = table
    inputs = {"matrix": args.input}
    params = {"rows": args.rows, "cols": args.cols}
    return result, inputs, params


def _cmd_plant(args):
    if args.kind == "two-block":
        a = two_block_matrix()
        write_matrix(args.matrix_output, a)
        result = {"matrix_path": args.matrix_output, "rows": 6, "cols": 6,
                  "truth_rows": None, "truth_cols": None}
        params = {"kind": args.kind}
        return result, {}, params
    model = PlantedModel(m=args.m, n=args.n, M=args.M, N=args.N,
                         sigma0=args.sigma0, c1=args.c1, c2=args.c2,
                         c3=args.c3, noise_family=args.noise_family,
                         p_seed=args.p_seed, q_seed=args.q_seed)
    inst = plant_rank_one(model, args.seed)
    write_matrix(args.matrix_output, inst.a)
    result = {
        "matrix_path": args.matrix_output,
        "rows": args.m, "cols": args.n,
        "truth_rows": _one_based(inst.truth.rows),
        "truth_cols": _one_based(inst.truth.cols),
    }
    params = {"kind": args.kind, "m": args.m, "n": args.n, "M": args.M,
              "N": args.N, "sigma0": args.sigma0, "c1": args.c1,
              "c2": args.c2, "c3": args.c3,
              "noise_family": args.noise_family, "seed": args.seed,
              "p_seed": args.p_seed, "q_seed": args.q_seed}
    return result, {}, params


def _cmd_certify(args):
    a = parse_matrix(args.input, args.format)
    x = parse_matrix(args.solution)
    with open(args.certificate, "r", encoding="utf-8") as handle:
        raw = json.load(handle)
    cert = DualCertificate(
        y=np.array(raw["y"], dtype=float),
        z=np.array(raw["z"], dtype=float),
        alpha=float(raw["alpha"]),
        beta=float(raw["beta"]),
        dual_norm=float(raw["dual_norm"]),
        lambda_star=float(raw["lambda_star"]),
        spectral_gap=float(raw.get("spectral_gap", 0.0)),
        linf_argmax_count=int(raw.get("linf_argmax_count", 0)))
    scale = theta_norm(x, args.theta)
    report = check_optimality(a, args.theta, x / scale, cert)
    result = {
        "balance": report.balance,
        "nuclear_alignment": report.nuclear_alignment,
        "l1_alignment": report.l1_alignment,
        "scalar_sum": report.scalar_sum,
        "normalization": report.normalization,
        "decomposition": report.decomposition,
        "gap": report.gap,
        "max_residual": report.max_residual,
        "passed": report.passed(args.residual_tol),
        "residual_tol": args.residual_tol,
    }
    inputs = {"matrix": args.input, "solution": args.solution,
              "certificate": args.certificate}
    params = {"theta": args.theta, "residual_tol": args.residual_tol}
    return result, inputs, params


def _cmd_nmf(args):
    a = parse_matrix(args.input, args.format)
    thetas = [float(t) for t in args.theta.split(",")]
    theta = thetas[0] if len(thetas) == 1 else thetas
    config = _solver_config_with(args, thetas[0])
    res = greedy_extract(a, args.features, theta, config)
    write_matrix(args.w_output, res.w)
    write_matrix(args.h_output, res.h)
    result = {
        "w_path": args.w_output,
        "h_path": args.h_output,
        "residual_norms": _vector(res.residual_norms),
        "supports": [{"rows": _one_based(b.rows), "cols": _one_based(b.cols)}
                     for b in res.supports],
        "extracted": res.extracted,
        "requested": res.requested,
        "short_count": res.short_count,
    }
    inputs = {"matrix": args.input}
    params = {"theta": args.theta, "features": args.features,
              "tol": args.tol}
    return result, inputs, params


def _solver_config_with(args, theta):
    return SolverConfig(theta=theta,
                        penalty=args.penalty,
                        max_iters=args.max_iters,
                        tol_primal=args.tol_primal or args.tol,
                        tol_dual=args.tol_dual or args.tol,
                        tol_gap=args.tol_gap or args.tol,
                        support_tol=args.support_tol)


def _cmd_biclique(args):
    theta = args.theta
    if theta is None:
        theta = 1.0 / math.sqrt(args.M * args.N)
    inst = plant_biclique(args.m, args.n, args.M, args.N, args.p_edge,
                          args.seed)
    if args.matrix_output:
        write_matrix(args.matrix_output, inst.a)
    config = _solver_config_with(args, theta)
    sol = solve(inst.a, config)
    rows, cols, complete = top_block(inst.a, sol, args.M, args.N)
    exact = (list(rows) == list(inst.truth.rows)
             and list(cols) == list(inst.truth.cols))
    result = {
        "theta": theta,
        "truth_rows": _one_based(inst.truth.rows),
        "truth_cols": _one_based(inst.truth.cols),
        "recovered_rows": _one_based(rows),
        "recovered_cols": _one_based(cols),
        "biclique_complete": complete,
        "recovered": bool(exact and complete),
        "support_rows": _one_based(sol.support_rows),
        "support_cols": _one_based(sol.support_cols),
        "support_matches_truth": (
            list(sol.support_rows) == list(inst.truth.rows)
            and list(sol.support_cols) == list(inst.truth.cols)),
        "iterations": sol.iterations,
        "converged": sol.converged,
        "dual_gap": sol.gap,
    }
    if args.matrix_output:
        result["matrix_path"] = args.matrix_output
    params = {"m": args.m, "n": args.n, "M": args.M, "N": args.N,
              "p_edge": args.p_edge, "seed": args.seed, "theta": theta,
              "tol": args.tol}
    return result, {}, params


def build_parser():
    parser = argparse.ArgumentParser(
        prog="laros",
        description="Locate large approximately rank-one submatrices of "
                    "nonnegative matrices by convex relaxation.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("solve", help="solve the relaxation for a matrix")
    _add_io_flags(p)
    _add_solver_flags(p)
    p.add_argument("--solution-output", default=None,
                   help="write the optimizer X as a MatrixMarket file")
    p.add_argument("--certificate-output", default=None,
                   help="write the dual certificate as JSON")
    p.set_defaults(func=_cmd_solve)

    p = subs.add_parser("thresholds", help="closed-form theta thresholds")
    _add_io_flags(p)
    p.add_argument("--rows", default=None,
                   help="1-based row indices of a candidate block, comma-separated")
    p.add_argument("--cols", default=None,
                   help="1-based column indices of a candidate block")
    p.set_defaults(func=_cmd_thresholds)

    p = subs.add_parser("plant", help="generate a planted instance")
    p.add_argument("--kind", choices=("planted", "two-block"),
                   default="planted")
    p.add_argument("--m", type=int, default=120)
    p.add_argument("--n", type=int, default=120)
    p.add_argument("--M", type=int, default=40)
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--c1", type=float, default=0.0)
    p.add_argument("--c2", type=float, default=0.0)
    p.add_argument("--c3", type=float, default=0.1)
    p.add_argument("--noise-family", choices=NOISE_FAMILIES, default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-seed", type=int, default=0)
    p.add_argument("--q-seed", type=int, default=0)
    p.add_argument("--matrix-output", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_plant)

    p = subs.add_parser("certify", help="check a solution/certificate pair")
    _add_io_flags(p)
    p.add_argument("--solution", required=True, help="solution matrix file")
    p.add_argument("--certificate", required=True, help="certificate JSON")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--residual-tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_certify)

    p = subs.add_parser("nmf", help="greedy rank-one factorization")
    _add_io_flags(p)
    p.add_argument("--theta", required=True,
                   help="l1 weight, or a comma-separated per-round schedule")
    p.add_argument("--features", type=int, required=True)
    p.add_argument("--penalty", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=50000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--tol-primal", type=float, default=None)
    p.add_argument("--tol-dual", type=float, default=None)
    p.add_argument("--tol-gap", type=float, default=None)
    p.add_argument("--support-tol", type=float, default=1e-6)
    p.add_argument("--w-output", required=True)
    p.add_argument("--h-output", required=True)
    p.set_defaults(func=_cmd_nmf)

    p = subs.add_parser("biclique",
                        help="plant a biclique, solve, and score recovery")
    p.add_argument("--m", type=int, default=60)
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--M", type=int, default=15)
    p.add_argument("--N", type=int, default=15)
    p.add_argument("--p-edge", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", type=float, default=None,
                   help="default: 1/sqrt(M*N)")
    p.add_argument("--penalty", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=50000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--tol-primal", type=float, default=None)
    p.add_argument("--tol-dual", type=float, default=None)
    p.add_argument("--tol-gap", type=float, default=None)
    p.add_argument("--support-tol", type=float, default=1e-6)
    p.add_argument("--matrix-output", default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_biclique)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        result, inputs, params = args.func(args)
    except (ValueError, OSError, ConvergenceError, MatrixParseError) as exc:
        print(f"laros {args.command}: {exc}", file=sys.stderr)
        return 1
    manifest = RunManifest(command=args.command, inputs=inputs,
                           parameters=params, version=__version__,
                           duration_seconds=time.perf_counter() - start)
    record = {"manifest": asdict(manifest), "result": result}
    _emit(record, getattr(args, "output", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
