"""Command-line entry point.

Per-trial random streams are ``SeedSequence([seed, trial_index])``, so output
is byte-identical for identical subcommand, flags and ``--seed``.

Table schemas (``--format csv``; JSON uses the same keys):
  sweep-angle      alpha,mean_survival,max_dev
  uniqueness       c2sq,singlet_fidelity,worst_violation,n_x,n_y,n_z,
                   nprime_x,nprime_y,nprime_z,phi_perp
  antiparallel     theta,singlet_fidelity,triplet_fidelity,parallel_singlet_fidelity
  finite-strategy  ensemble_size,worst_error
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import analysis, qcore
from .fields import Promise
from .locc import run_locc
from .runs import draw_scenario, trial_rng
from .verify import FAULTS, Settings, run_checks


def _fmt(x) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


def _write_table(args, columns: list[str], rows: list[list[float]]) -> None:
    if args.format == "json":
        rows = [[v if isinstance(v, int) else float(v) for v in r] for r in rows]
        text = json.dumps([dict(zip(columns, r)) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _note(args, msg: str) -> None:
    # keep stdout clean for the table when no --out is given
    print(msg, file=sys.stdout if args.out else sys.stderr)


def _direction(d) -> str:
    return f"({d.x:+.6f}, {d.y:+.6f}, {d.z:+.6f})"


def cmd_demo(args) -> int:
    promise = Promise.parse(args.promise) if args.promise else None
    scenario, rng = draw_scenario(args.seed, 0, promise)
    rec, transcript = run_locc(scenario, rng, seed=args.seed)
    lines = [
        f"seed        {args.seed}",
        f"promise     {scenario.promise}",
        f"field A (n) {_direction(scenario.n)}",
        f"field B (m) {_direction(scenario.m)}",
        "transcript:",
        *("  " + line for line in transcript.lines()),
        f"classical bits {transcript.classical_bits}, singlets consumed {transcript.pairs_consumed}",
        f"verdict     {rec.verdict.value}",
        f"correct     {rec.correct}",
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rec.correct and not transcript.audit() else 1


def cmd_verify(args) -> int:
    settings = Settings(args.seed, args.trials, args.tol)
    if args.inject_fault:
        settings.hadamard = FAULTS[args.inject_fault]()
    results = run_checks(settings)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failing property: {failed[0].name}")
        return 1
    print("all properties pass")
    return 0


def cmd_sweep_angle(args) -> int:
    alphas = args.alphas if args.alphas else [k * np.pi / 12 for k in range(13)]
    rows = analysis.angle_sweep(alphas, args.trials, trial_rng(args.seed, 0))
    _write_table(args, ["alpha", "mean_survival", "max_dev"],
                 [[r.alpha, r.mean_survival, r.max_dev] for r in rows])
    dev = max(abs(r.mean_survival - np.cos(r.alpha) ** 2) for r in rows)
    spread = max(r.max_dev for r in rows)
    _note(args, f"max |mean - cos^2(alpha)| = {dev:.3e}; max frame spread = {spread:.3e}")
    return 0 if max(dev, spread) < args.tol else 1


def cmd_uniqueness(args) -> int:
    rng = trial_rng(args.seed, 0)
    reports = analysis.uniqueness_scan(args.states, args.samples, rng)
    rows, singlet_residual, others = [], None, []
    for r in reports:
        state = r.state_descriptor.reconstruct()
        f = qcore.fidelity(qcore.singlet(), state)
        s = r.argmax_sample
        rows.append([r.c2sq, f, r.worst_violation, *s.n.vec, *s.nprime.vec, s.phi_perp])
        if f > 1 - 1e-12:
            singlet_residual = r.worst_violation if singlet_residual is None else max(singlet_residual, r.worst_violation)
        elif f < analysis.UNIQUENESS_FIDELITY_CUTOFF:
            others.append(r.worst_violation)
    _write_table(args, ["c2sq", "singlet_fidelity", "worst_violation", "n_x", "n_y", "n_z",
                        "nprime_x", "nprime_y", "nprime_z", "phi_perp"], rows)
    floor = analysis.UNIQUENESS_VIOLATION_FLOOR
    min_other = min(others) if others else float("nan")
    _note(args, f"singlet residual {singlet_residual:.3e} (tol {args.tol:g}); "
                f"min worst violation among {len(others)} non-singlet states {min_other:.4f} "
                f"(floor {floor})")
    ok = singlet_residual is not None and singlet_residual < args.tol and all(v >= floor for v in others)
    return 0 if ok else 1


def cmd_antiparallel(args) -> int:
    grid = args.thetas if args.thetas else [k * np.pi / 16 for k in range(17)]
    rows = analysis.antiparallel_check(grid, trial_rng(args.seed, 0))
    _write_table(args, ["theta", "singlet_fidelity", "triplet_fidelity", "parallel_singlet_fidelity"],
                 [[r.theta, r.singlet_fidelity, r.triplet_fidelity, r.parallel_singlet_fidelity]
                  for r in rows])
    dev = max(abs(r.singlet_fidelity - np.cos(r.theta) ** 2) for r in rows)
    par = max(abs(1 - r.parallel_singlet_fidelity) for r in rows)
    _note(args, f"max |F_singlet - cos^2(theta)| = {dev:.3e}; max parallel infidelity = {par:.3e}")
    return 0 if max(dev, par) < args.tol else 1


def cmd_finite_strategy(args) -> int:
    sizes = args.sizes if args.sizes else [1, 6, 24, 96]
    ensembles = analysis.nested_ensembles(sizes, trial_rng(args.seed, 0))
    errors = [analysis.finite_strategy_worst_error(e, args.trials, trial_rng(args.seed, 1))
              for e in ensembles]
    _write_table(args, ["ensemble_size", "worst_error"], [[k, e] for k, e in zip(sizes, errors)])
    monotone = all(b <= a for a, b in zip(errors, errors[1:]))
    _note(args, f"worst errors {', '.join(f'{e:.4g}' for e in errors)}; "
                f"non-increasing: {monotone}; all positive: {min(errors) > 0}")
    return 0 if monotone and min(errors) > 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singletfields",
        description=__doc__.split("\n")[0],
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    common.add_argument("--tol", type=float, help="pass/fail tolerance (default 1e-12; 1e-9 for sweep-angle)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, trials, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--trials", type=int, default=trials)
        p.set_defaults(func=func)
        return p

    p = add("demo", cmd_demo, 1, "one seeded end-to-end LOCC run with its transcript")
    p.add_argument("--promise", help="parallel | orthogonal (default: drawn from the seed)")
    p = add("verify", cmd_verify, 2000, "run the invariant suite")
    p.add_argument("--inject-fault", choices=sorted(FAULTS), help="deliberately break a component")
    p = add("sweep-angle", cmd_sweep_angle, 100, "singlet survival versus field angle (trials = frames per angle)")
    p.add_argument("--alphas", type=float, nargs="+", help="angles in radians (default 13 points on [0, pi])")
    p.set_defaults(default_tol=1e-9)
    p = add("uniqueness", cmd_uniqueness, 1, "scan maximally entangled states for uniqueness violations")
    p.add_argument("--states", type=int, default=200)
    p.add_argument("--samples", type=int, default=1000, help="random direction triples on top of the grid")
    p = add("antiparallel", cmd_antiparallel, 1, "anti-parallel evolution of the singlet")
    p.add_argument("--thetas", type=float, nargs="+")
    p = add("finite-strategy", cmd_finite_strategy, 2000,
            "worst-case error of finite unentangled probe ensembles (trials = random directions)")
    p.add_argument("--sizes", type=int, nargs="+")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is None:
        args.tol = getattr(args, "default_tol", qcore.TOL)
    if getattr(args, "trials", 1) < 1 or args.tol <= 0:
        print("--trials must be >= 1 and --tol > 0", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
