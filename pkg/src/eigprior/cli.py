"""Command-line front end: data generation, learning, projection, evaluation.

Subcommands: generate | learn | project | fgft | eval | bench | verify.
Every command writes a ``manifest.json`` into its output directory recording
the resolved configuration, input digests, and output digests, so a run can
be audited and reproduced. Exit codes: 0 success, 1 failed verify checks,
2 validation error, 3 numeric failure, 4 finished but unconverged.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .config import SolverConfig
from .cone import EigenPrior, cone_contains, project_to_cone
from .errors import NumericalError
from .estimator import proj_lasso, run_record
from .fgft import approximate_eigenvectors, greedy_givens_diagonalize
from .glasso import solve_glasso
from .io import (
    load_matrix,
    load_prior,
    save_matrix,
    save_prior,
    save_vectors,
    sha256_file,
)
from .linalg import cholesky, derive_seed, eig_sym
from .metrics import DELTACON_CONVENTIONS, compare_laplacians
from .synthetic import GraphSpec, generate

#: Published baseline results for the default 20-node / 20-signal protocol;
#: external methods are not reimplemented here, the numbers are echoed as a
#: footnote for context.
REFERENCE_BASELINES = {
    "GL-SigRep": {"re": 0.7740, "deltacon": 0.9449, "lambda_distance": 8.7168},
    "DDGL": {"re": 0.7543, "deltacon": 0.9407, "lambda_distance": 28.7918},
}

METRIC_COLUMNS = ("re", "deltacon", "lambda_distance")


@dataclass
class RunManifest:
    command: str
    config: dict
    input_hashes: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    timing_seconds: float = 0.0


def _write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    manifest.outputs = [
        {"path": str(p), "sha256": sha256_file(p)} for p in manifest.outputs
    ]
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n")
    return path


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        rho=args.rho,
        tol=args.tol,
        max_outer=args.max_iter,
        seed=getattr(args, "seed", 0),
    )


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# ---------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    t0 = time.perf_counter()
    spec = GraphSpec(
        n=args.n,
        er_prob=args.er_prob,
        sigma=args.sigma,
        weight_threshold=args.weight_threshold,
        flip_prob=args.flip_prob,
        diag_eps=args.diag_eps,
        m_signals=args.m,
        seed=args.seed,
    )
    gt = generate(spec)
    out = _out_dir(args)
    files = {
        "positions.txt": lambda p: save_vectors(p, gt.positions),
        "adjacency.txt": lambda p: save_matrix(p, gt.adjacency),
        "laplacian.txt": lambda p: save_matrix(p, gt.laplacian),
        "covariance.txt": lambda p: save_matrix(p, gt.covariance),
        "signals.txt": lambda p: save_vectors(p, gt.signals),
        "empirical_cov.txt": lambda p: save_matrix(p, gt.empirical_cov),
    }
    written = []
    for name, writer in files.items():
        path = out / name
        writer(path)
        written.append(path)
    manifest = RunManifest(
        command="generate",
        config=asdict(spec),
        outputs=written,
        timing_seconds=time.perf_counter() - t0,
    )
    _write_manifest(out, manifest)
    print(f"generated {spec.n}-node ground truth into {out}")
    return 0


# ------------------------------------------------------------------- learn


def cmd_learn(args) -> int:
    t0 = time.perf_counter()
    if args.mode == "proj-lasso" and not args.prior:
        print("error: --prior is required for --mode proj-lasso", file=sys.stderr)
        return 2
    cfg = _solver_config(args)
    emp_cov = load_matrix(args.input)
    inputs = {str(args.input): sha256_file(args.input)}

    if args.mode == "glasso":
        result = solve_glasso(emp_cov, cfg.rho, cfg)
        laplacian, covariance = result.laplacian, result.covariance
        converged, trace = result.converged, result.dual_objective_trace
        iterations = result.sweeps
    else:
        prior = load_prior(args.prior)
        inputs[str(args.prior)] = sha256_file(args.prior)
        report = proj_lasso(emp_cov, prior, cfg)
        laplacian, covariance = report.laplacian, report.covariance
        converged, trace = report.converged, report.objective_trace
        iterations = report.outer_iters
        record = run_record(report, cfg, inputs)
        with (
            _out_dir(args) / "runs.jsonl"
        ).open("a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    out = _out_dir(args)
    lap_path = out / "laplacian.txt"
    cov_path = out / "covariance.txt"
    trace_path = out / "objective_trace.txt"
    save_matrix(lap_path, laplacian)
    save_matrix(cov_path, covariance)
    save_vectors(trace_path, np.asarray(trace, dtype=float).reshape(1, -1))
    manifest = RunManifest(
        command="learn",
        config={
            "mode": args.mode,
            "rho": cfg.rho,
            "tol": cfg.tol,
            "max_outer": cfg.max_outer,
            "iterations": iterations,
            "converged": converged,
        },
        input_hashes=inputs,
        outputs=[lap_path, cov_path, trace_path],
        timing_seconds=time.perf_counter() - t0,
    )
    _write_manifest(out, manifest)
    print(f"{args.mode}: {'converged' if converged else 'NOT converged'} "
          f"after {iterations} iterations")
    return 0 if converged else 4


# ----------------------------------------------------------------- project


def cmd_project(args) -> int:
    t0 = time.perf_counter()
    matrix = load_matrix(args.input)
    prior = load_prior(args.prior)
    cfg = SolverConfig(mu_floor_ratio=args.mu_floor_ratio)
    result = project_to_cone(matrix, prior, cfg)
    out = _out_dir(args)
    paths = {
        "projected.txt": result.projected,
        "cov_approx.txt": result.cov_approx,
    }
    written = []
    for name, mat in paths.items():
        path = out / name
        save_matrix(path, mat)
        written.append(path)
    coeff_path = out / "coeffs.txt"
    save_vectors(coeff_path, result.coeffs.reshape(1, -1))
    written.append(coeff_path)
    manifest = RunManifest(
        command="project",
        config={"mu_floor_ratio": cfg.mu_floor_ratio, "k": prior.k, "n": prior.n},
        input_hashes={
            str(args.input): sha256_file(args.input),
            str(args.prior): sha256_file(args.prior),
        },
        outputs=written,
        timing_seconds=time.perf_counter() - t0,
    )
    _write_manifest(out, manifest)
    print(f"projected {prior.n}x{prior.n} matrix with K={prior.k} prior into {out}")
    return 0


# -------------------------------------------------------------------- fgft


def cmd_fgft(args) -> int:
    t0 = time.perf_counter()
    laplacian = load_matrix(args.input)
    if args.k < 1:
        print("error: --k must be >= 1", file=sys.stderr)
        return 2
    gp = greedy_givens_diagonalize(laplacian, args.givens)
    prior = approximate_eigenvectors(gp, args.k)
    out = _out_dir(args)
    prior_path = out / "prior.txt"
    save_prior(prior_path, prior)
    off = gp.lambda_hat - np.diag(gp.lambda_hat.diagonal())
    manifest = RunManifest(
        command="fgft",
        config={
            "givens": args.givens,
            "rotations_used": len(gp.rotations),
            "k": args.k,
            "offdiag_frobenius": float(np.linalg.norm(off)),
        },
        input_hashes={str(args.input): sha256_file(args.input)},
        outputs=[prior_path],
        timing_seconds=time.perf_counter() - t0,
    )
    _write_manifest(out, manifest)
    print(f"wrote K={args.k} approximate-eigenvector prior to {prior_path}")
    return 0


# -------------------------------------------------------------------- eval


def cmd_eval(args) -> int:
    t0 = time.perf_counter()
    truth = load_matrix(args.truth)
    learned = load_matrix(args.learned)
    triple = compare_laplacians(truth, learned)
    out = _out_dir(args)

    csv_path = out / "eval.csv"
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRIC_COLUMNS)
    writer.writerow([_fmt(triple.re), _fmt(triple.deltacon), _fmt(triple.lambda_dist)])
    csv_path.write_text(buf.getvalue())

    md_path = out / "eval.md"
    md = [
        "| Metric | Value |",
        "|---|---|",
        f"| RE | {_fmt(triple.re)} |",
        f"| DeltaCon | {_fmt(triple.deltacon)} |",
        f"| lambda-distance | {_fmt(triple.lambda_dist)} |",
    ]
    md_path.write_text("\n".join(md) + "\n")

    print((csv_path if args.format == "csv" else md_path).read_text(), end="")
    manifest = RunManifest(
        command="eval",
        config={"deltacon_conventions": DELTACON_CONVENTIONS},
        input_hashes={
            str(args.truth): sha256_file(args.truth),
            str(args.learned): sha256_file(args.learned),
        },
        outputs=[csv_path, md_path],
        timing_seconds=time.perf_counter() - t0,
    )
    _write_manifest(out, manifest)
    return 0


# ------------------------------------------------------------------- bench


def run_bench_trial(
    trial: int,
    base_seed: int,
    graph_kwargs: dict,
    cfg_kwargs: dict,
    prior_source: str,
    k_values: tuple[int, ...],
    givens_steps: int,
) -> list[dict]:
    """All method rows for one trial; pure function of its arguments."""
    seed = derive_seed(base_seed, trial)
    gt = generate(GraphSpec(seed=seed, **graph_kwargs))
    cfg = SolverConfig(seed=seed, **cfg_kwargs)
    truth = gt.laplacian
    rows = []

    def add(method: str, learned: np.ndarray, converged: bool) -> None:
        triple = compare_laplacians(truth, learned)
        rows.append(
            {
                "trial": trial,
                "method": method,
                "re": triple.re,
                "deltacon": triple.deltacon,
                "lambda_distance": triple.lambda_dist,
                "converged": int(converged),
            }
        )

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if prior_source == "truth":
            result = solve_glasso(gt.empirical_cov, cfg.rho, cfg)
            add("GLASSO", result.laplacian, result.converged)
            basis_rows = eig_sym(truth).eigenvectors.T
        else:
            gp = greedy_givens_diagonalize(truth, givens_steps)
            full = approximate_eigenvectors(gp, truth.shape[0])
            basis_rows = full.vectors
            report = proj_lasso(gt.empirical_cov, full, cfg)
            add("Givens K=N", report.laplacian, report.converged)
        for k in k_values:
            report = proj_lasso(gt.empirical_cov, EigenPrior(basis_rows[:k]), cfg)
            add(f"Proj-Lasso K={k}", report.laplacian, report.converged)
    return rows


def _bench_csv(rows: list[dict], methods: list[str]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "method", *METRIC_COLUMNS, "converged"])
    for row in rows:
        writer.writerow(
            [
                row["trial"],
                row["method"],
                *(_fmt(row[m]) for m in METRIC_COLUMNS),
                row["converged"],
            ]
        )
    for method in methods:
        subset = [r for r in rows if r["method"] == method]
        writer.writerow(
            [
                "mean",
                method,
                *(_fmt(float(np.mean([r[m] for r in subset]))) for m in METRIC_COLUMNS),
                _fmt(float(np.mean([r["converged"] for r in subset]))),
            ]
        )
    return buf.getvalue()


def _bench_markdown(rows: list[dict], methods: list[str], prior_source: str) -> str:
    means = {
        method: {
            m: float(np.mean([r[m] for r in rows if r["method"] == method]))
            for m in METRIC_COLUMNS
        }
        for method in methods
    }
    lines = ["| Metric | " + " | ".join(methods) + " |"]
    lines.append("|---" * (len(methods) + 1) + "|")
    labels = {"re": "RE", "deltacon": "DeltaCon", "lambda_distance": "lambda-distance"}
    for m in METRIC_COLUMNS:
        cells = " | ".join(_fmt(means[method][m]) for method in methods)
        lines.append(f"| {labels[m]} | {cells} |")
    if prior_source == "truth":
        lines.append("")
        lines.append(
            "Reference baselines (published results for this protocol, "
            "not computed by this run):"
        )
        for name, vals in REFERENCE_BASELINES.items():
            lines.append(
                f"- {name}: RE {vals['re']}, DeltaCon {vals['deltacon']}, "
                f"lambda-distance {vals['lambda_distance']}"
            )
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return 2
    cfg = _solver_config(args)  # validates rho/tol/max-iter up front
    graph_kwargs = {
        "n": args.n,
        "er_prob": args.er_prob,
        "sigma": args.sigma,
        "weight_threshold": args.weight_threshold,
        "flip_prob": args.flip_prob,
        "diag_eps": args.diag_eps,
        "m_signals": args.m,
    }
    GraphSpec(seed=0, **graph_kwargs)  # fail fast on bad protocol flags
    cfg_kwargs = {"rho": cfg.rho, "tol": cfg.tol, "max_outer": cfg.max_outer}
    k_values = tuple(args.k_values)
    trial_args = [
        (t, args.seed, graph_kwargs, cfg_kwargs, args.prior_source, k_values, args.givens)
        for t in range(args.trials)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            per_trial = list(pool.map(_run_bench_trial_packed, trial_args))
    else:
        per_trial = [_run_bench_trial_packed(a) for a in trial_args]
    rows = [row for trial_rows in per_trial for row in trial_rows]

    if args.prior_source == "truth":
        methods = ["GLASSO"] + [f"Proj-Lasso K={k}" for k in k_values]
    else:
        methods = ["Givens K=N"] + [f"Proj-Lasso K={k}" for k in k_values]

    out = _out_dir(args)
    csv_path = out / "bench.csv"
    md_path = out / "bench.md"
    csv_path.write_text(_bench_csv(rows, methods))
    md_path.write_text(_bench_markdown(rows, methods, args.prior_source))
    manifest = RunManifest(
        command="bench",
        config={
            "trials": args.trials,
            "seed": args.seed,
            "prior_source": args.prior_source,
            "k_values": list(k_values),
            "givens": args.givens,
            "jobs": args.jobs,
            "graph": graph_kwargs,
            "solver": cfg_kwargs,
            "deltacon_conventions": DELTACON_CONVENTIONS,
        },
        outputs=[csv_path, md_path],
        timing_seconds=time.perf_counter() - t0,
    )
    _write_manifest(out, manifest)
    print(md_path.read_text(), end="")
    return 0


def _run_bench_trial_packed(packed) -> list[dict]:
    return run_bench_trial(*packed)


# ------------------------------------------------------------------ verify


def cmd_verify(args) -> int:
    matrix = load_matrix(args.input)
    checks = list(args.check) if args.check else []
    if not checks:
        checks = ["pd"]
        if args.prior:
            checks.append("cone")
        if args.cbar:
            checks.append("feasibility")
    if "cone" in checks and not args.prior:
        print("error: cone check requires --prior", file=sys.stderr)
        return 2
    if "feasibility" in checks and not args.cbar:
        print("error: feasibility check requires --cbar", file=sys.stderr)
        return 2

    all_pass = True
    for check in checks:
        if check == "pd":
            eigenvalues = eig_sym(matrix).eigenvalues
            ok = bool(eigenvalues[0] > 0)
            detail = f"min eigenvalue {eigenvalues[0]:.6e}"
        elif check == "cone":
            prior = load_prior(args.prior)
            ok = cone_contains(matrix, prior, args.tol)
            worst = 0.0
            for u in prior.vectors:
                rq = float(u @ matrix @ u)
                worst = max(worst, float(np.linalg.norm(matrix @ u - rq * u)))
            detail = f"max invariant-direction residual {worst:.6e} (tol {args.tol:g})"
        else:
            cbar = load_matrix(args.cbar)
            gap = float(np.abs(matrix - cbar).max()) - args.rho
            ok = gap <= 1e-12
            detail = f"max |C - Cbar| - rho = {gap:.6e}"
        all_pass &= ok
        print(f"{'PASS' if ok else 'FAIL'} {check}: {detail}")
    return 0 if all_pass else 1


# ------------------------------------------------------------------ parser


def _add_common(p: argparse.ArgumentParser, *, seed=True, solver=False) -> None:
    p.add_argument("--out-dir", default=".", help="directory for outputs")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    if solver:
        p.add_argument("--rho", type=float, default=SolverConfig().rho,
                       help="l1 shrinkage (> 0)")
        p.add_argument("--tol", type=float, default=SolverConfig().tol,
                       help="convergence tolerance")
        p.add_argument("--max-iter", type=int, default=SolverConfig().max_outer,
                       help="iteration cap")


def _add_protocol(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=20, help="node count")
    p.add_argument("--m", type=int, default=20, help="signal count")
    p.add_argument("--er-prob", type=float, default=0.6)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--weight-threshold", type=float, default=0.75)
    p.add_argument("--flip-prob", type=float, default=0.5)
    p.add_argument("--diag-eps", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigprior",
        description="Learn graph Laplacians from covariance with fixed leading eigenvectors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic ground truth")
    _add_protocol(p)
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("learn", help="estimate a Laplacian from a covariance file")
    p.add_argument("--mode", choices=["glasso", "proj-lasso"], required=True)
    p.add_argument("--input", required=True, help="empirical covariance matrix file")
    p.add_argument("--prior", help="eigenvector prior file (proj-lasso)")
    _add_common(p, solver=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("project", help="project a PD matrix into a prior cone")
    p.add_argument("--input", required=True, help="matrix file")
    p.add_argument("--prior", required=True, help="eigenvector prior file")
    p.add_argument("--mu-floor-ratio", type=float, default=SolverConfig().mu_floor_ratio)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("fgft", help="approximate leading eigenvectors by Givens rotations")
    p.add_argument("--input", required=True, help="Laplacian matrix file")
    p.add_argument("--givens", type=int, default=200, help="rotation count")
    p.add_argument("--k", type=int, required=True, help="prior size")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_fgft)

    p = sub.add_parser("eval", help="compare a learned Laplacian against a reference")
    p.add_argument("--truth", required=True)
    p.add_argument("--learned", required=True)
    p.add_argument("--format", choices=["csv", "md"], default="csv")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="multi-trial benchmark table")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--prior-source", choices=["truth", "fgft"], default="truth")
    p.add_argument("--givens", type=int, default=200,
                   help="rotation count for --prior-source fgft")
    p.add_argument("--k-values", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    p.add_argument("--format", choices=["csv", "md"], default="md")
    _add_protocol(p)
    _add_common(p, solver=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="check invariants of a matrix file")
    p.add_argument("--input", required=True, help="matrix file to check")
    p.add_argument("--prior", help="prior file for the cone check")
    p.add_argument("--cbar", help="empirical covariance file for the feasibility check")
    p.add_argument("--rho", type=float, default=SolverConfig().rho)
    p.add_argument("--tol", type=float, default=1e-6, help="cone check tolerance")
    p.add_argument("--check", action="append", choices=["pd", "cone", "feasibility"],
                   help="repeatable; default: pd plus any check whose inputs were given")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
