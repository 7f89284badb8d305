"""Command-line entry point: ``starlattice <command> [options]``."""
from __future__ import annotations

import argparse
from dataclasses import replace
import json
import logging
import os
from pathlib import Path
import sys

from . import envelope as env
from .config import RunConfig, dump_config, load_config
from .errors import StarLatticeError
from .fem import assemble, build_pbc_constraints, dump_system, solve_constrained
from .geometry import RveParams, build_rve, check_finite_positive, validate_params
from .homogenize import REFERENCE_TEMPERATURE, get_evaluator
from .mesh import mesh_rve
from .optimize import OBJECTIVES, OPTIMIZERS, compare_optimizers, design_problem, report_csv
from .plot import render_svg
from .validation import run_validation


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", dest="config_file", metavar="FILE", help="JSON run configuration")
    p.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    p.add_argument("--workers", type=int, default=None, help="evaluator processes (default: available cores)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _design_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h1", type=float, required=True)
    p.add_argument("--h2", type=float, required=True)
    p.add_argument("--theta", type=float, required=True, help="degrees")
    p.add_argument("--t", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="starlattice", description=__doc__)
    ap.add_argument("--config", metavar="FILE", help="JSON run configuration")
    ap.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("evaluate", parents=[common], help="effective properties of one design")
    _design_args(p)
    p.add_argument("--dump-system", metavar="FILE", help="write K, F, constraints and U for both load cases")

    p = sub.add_parser("optimize", parents=[common], help="single constrained optimization")
    p.add_argument("--objective", choices=OBJECTIVES, required=True)
    p.add_argument("--constraint", action="append", default=[], help="e.g. 'ncte>=-0.1' (repeatable)")
    p.add_argument("--optimizer", choices=sorted(OPTIMIZERS), default="alpso")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-evals", type=int, default=None)

    p = sub.add_parser("compare", parents=[common], help="both optimizers on the three objectives (CSV)")
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--max-evals", type=int, default=None)
    p.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")

    p = sub.add_parser("envelope", parents=[common], help="run the envelope schedule")
    p.add_argument("--schedule", metavar="FILE", help="JSON list of {label, objective, constraints}")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True, help="also write envelope.svg")
    p.add_argument("--optimizer", choices=sorted(OPTIMIZERS), default="alpso")
    p.add_argument("--max-evals", type=int, default=None)
    p.add_argument("--no-warm-start", action="store_true", help="clean-slate start for every problem")

    sub.add_parser("validate", parents=[common], help="analytic oracle battery")

    p = sub.add_parser("render", parents=[common], help="geometry document or envelope plot")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--geometry", action="store_true", help="dump the resolved unit cell (needs --h1 ... --t)")
    g.add_argument("--envelope", metavar="FILE", help="envelope CSV/JSON to plot as SVG")
    p.add_argument("--h1", type=float)
    p.add_argument("--h2", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--out", metavar="FILE")
    return ap


def _emit(args, payload, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(human)


def _workers(args) -> int:
    w = args.workers if args.workers is not None else (os.cpu_count() or 1)
    if w < 1:
        raise StarLatticeError("--workers must be >= 1")
    return w


def _optimizer_config(cfg: RunConfig, args) -> RunConfig:
    opt = cfg.optimizer
    if getattr(args, "max_evals", None) is not None:
        opt = replace(opt, max_evaluations=args.max_evals)
    if getattr(args, "seed", None) is not None:
        opt = replace(opt, seed=args.seed)
    return replace(cfg, optimizer=opt)


def _params(args) -> RveParams:
    p = RveParams(args.h1, args.h2, args.theta, args.t)
    check_finite_positive(p)
    return p


def cmd_evaluate(cfg: RunConfig, args) -> int:
    params = _params(args)
    for v in validate_params(params, cfg.bounds):
        print(f"warning: {v}", file=sys.stderr)
    settings = cfg.settings()
    props = get_evaluator(settings)(params)
    d = props.diagnostics
    payload = {
        "h1": params.h1, "h2": params.h2, "theta_deg": params.theta, "t": params.t,
        "nu": props.nu, "alpha": props.alpha, "ncte": props.ncte,
        "edge_length": d["edge_length"], "elements": d["elements"],
    }
    human = "\n".join(
        [
            f"Poisson's ratio   {props.nu: .6f}",
            f"CTE (1/K)         {props.alpha: .6e}",
            f"NCTE              {props.ncte: .6f}",
            f"edge length L     {d['edge_length']:.6g}",
            f"elements          {d['elements']}",
        ]
    )
    if args.dump_system:
        mesh = mesh_rve(build_rve(params, settings.template), settings.seed_factor, settings.kappa)
        cons = build_pbc_constraints(mesh)
        mech = assemble(mesh, REFERENCE_TEMPERATURE, 0.0, settings.materials)
        therm = assemble(mesh, REFERENCE_TEMPERATURE + settings.delta_t, settings.delta_t, settings.materials)
        doc = {
            "geometry": build_rve(params, settings.template).to_document(),
            "mechanical": dump_system(mech, cons, solve_constrained(mech, cons, settings.prescribed_strain * mesh.edge_length)),
            "thermal": dump_system(therm, cons, solve_constrained(therm, cons)),
        }
        Path(args.dump_system).write_text(json.dumps(doc, indent=1) + "\n")
    _emit(args, payload, human)
    return 0


def cmd_optimize(cfg: RunConfig, args) -> int:
    cfg = _optimizer_config(cfg, args)
    problem = design_problem(args.objective, args.constraint, cfg.settings(), cfg.bounds)
    res = OPTIMIZERS[args.optimizer](problem, cfg.optimizer, workers=_workers(args))
    props = get_evaluator(cfg.settings())(res.design, count=False)
    payload = {
        "label": problem.label,
        "optimizer": args.optimizer,
        "seed": res.seed,
        "h1": res.design.h1, "h2": res.design.h2, "theta_deg": res.design.theta, "t": res.design.t,
        "nu": props.nu, "ncte": props.ncte, "alpha": props.alpha,
        "objective": res.f,
        "constraints": res.g.tolist(),
        "evaluations": res.evaluations,
        "feasible": res.feasible,
        "history": list(res.history),
    }
    d = res.design
    human = "\n".join(
        [
            f"problem      {problem.label} ({args.optimizer}, seed {res.seed})",
            f"design       h1={d.h1:.4f} h2={d.h2:.4f} theta={d.theta:.4f} t={d.t:.4f}",
            f"nu           {props.nu: .6f}",
            f"NCTE         {props.ncte: .6f}",
            f"evaluations  {res.evaluations}",
            f"feasible     {'yes' if res.feasible else 'NO'}",
        ]
    )
    _emit(args, payload, human)
    return 0 if res.feasible else 1


def cmd_compare(cfg: RunConfig, args) -> int:
    cfg = _optimizer_config(cfg, args)
    rows = compare_optimizers(seeds=args.seeds, config=cfg.optimizer, settings=cfg.settings(), workers=_workers(args))
    text = report_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    if args.json:
        print(json.dumps(rows, indent=2))
    elif not args.out:
        sys.stdout.write(text)
    return 0


def cmd_envelope(cfg: RunConfig, args) -> int:
    cfg = _optimizer_config(cfg, args)
    schedule = env.EnvelopeSchedule.load(args.schedule) if args.schedule else env.default_problem_schedule()
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def progress(k, n, point):
        if not args.json:
            flag = "" if point.feasible else "  (infeasible)"
            print(f"[{k + 1}/{n}] {point.label}: nu={point.nu:.4f} NCTE={point.ncte:.4f}{flag}", file=sys.stderr)

    points = env.build_envelope(
        schedule, cfg.optimizer, cfg.optimizer.seed, settings=cfg.settings(), bounds=cfg.bounds,
        optimizer=args.optimizer, warm_start=not args.no_warm_start, workers=_workers(args), progress=progress,
    )
    env.export(points, "csv", out / "envelope.csv")
    env.export(points, "json", out / "envelope.json")
    if args.svg:
        render_svg(points, out / "envelope.svg")
    summary = env.summarize(points)
    summary["monotonicity_violations"] = env.monotonicity_violations(schedule, points, cfg.optimizer.constraint_tol)
    if args.json:
        print(json.dumps({"output_dir": str(out), "summary": summary}, indent=2))
    else:
        print(f"wrote {len(points)} points to {out}")
        for k, v in summary.items():
            print(f"  {k:12s} {v}")
    return 0


def cmd_validate(cfg: RunConfig, args) -> int:
    results = run_validation(cfg)
    if args.json:
        print(json.dumps([r.__dict__ for r in results], indent=2))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:24s} {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def cmd_render(cfg: RunConfig, args) -> int:
    if args.geometry:
        missing = [n for n in ("h1", "h2", "theta", "t") if getattr(args, n) is None]
        if missing:
            raise StarLatticeError(f"render --geometry needs --{' --'.join(missing)}")
        doc = json.dumps(build_rve(_params(args), cfg.template).to_document(), indent=2) + "\n"
        if args.out:
            Path(args.out).write_text(doc)
        else:
            sys.stdout.write(doc)
        return 0
    try:
        points = env.load_points(args.envelope)
    except OSError as exc:
        raise StarLatticeError(f"cannot read {args.envelope}: {exc.strerror}") from None
    svg = render_svg(points, args.out)
    if not args.out:
        sys.stdout.write(svg)
    return 0


COMMANDS = {
    "evaluate": cmd_evaluate,
    "optimize": cmd_optimize,
    "compare": cmd_compare,
    "envelope": cmd_envelope,
    "validate": cmd_validate,
    "render": cmd_render,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(getattr(args, "config_file", None) or args.config)
        if args.print_config:
            sys.stdout.write(dump_config(cfg))
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 2
        return COMMANDS[args.command](cfg, args)
    except StarLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
