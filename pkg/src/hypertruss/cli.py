"""Command-line entry point: ``hypertruss analyze`` and ``hypertruss run``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import convergence_profile, success_rate
from .benchmarks import BENCHMARK_IDS, REGISTRY, get_benchmark
from .domain import DecompositionPlan, SearchDomain, informed_decomposition
from .hypersphere import HypersphereTracer, SeedSphereError, SphereSchedule
from .io import (ModelFileError, load_model, model_from_dict, validate_run_config,
                 load_run_config, write_results_csv)
from .model import InvalidModelError, control_batch
from .optimizers import ALGORITHMS, InvalidConfigError, OptimizerConfig, derive_seed, optimize
from .svg import emit_svg

log = logging.getLogger("hypertruss")

OUT_ENV = "HYPERTRUSS_OUT"
DEFAULT_OUT = "hypertruss-out"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SEED = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunOutcome:
    rows: list
    summary: dict
    files: list = field(default_factory=list)


def _resolve_model(spec, source="config"):
    if isinstance(spec, dict):
        return model_from_dict(spec, f"{source}: model"), None
    if spec in REGISTRY:
        bench = get_benchmark(spec)
        return bench.build(), bench
    path = Path(spec)
    if path.exists():
        return load_model(path), None
    raise ConfigError(f"model {spec!r} is neither a benchmark id ({', '.join(BENCHMARK_IDS)}) "
                      f"nor an existing file")


def _resolve_domain(cfg, model, bench):
    dom = cfg.get("domain")
    if dom is None:
        if bench is None:
            raise ConfigError("a domain is required for models loaded from files")
        return bench.domain(model)
    if "lower" in dom or "upper" in dom:
        if not ("lower" in dom and "upper" in dom):
            raise ConfigError("domain needs both lower and upper")
        d = SearchDomain(dom["lower"], dom["upper"])
    else:
        if "displacement" not in dom or "lambda" not in dom:
            raise ConfigError("domain needs displacement and lambda ranges")
        make = SearchDomain.along_control if dom.get("along_control", True) else SearchDomain.uniform
        d = make(model, dom["displacement"], dom["lambda"])
    try:
        d.check(model)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return d


def _control_range(model, domain):
    """``(lo, hi)`` of ``d`` implied by the bounds on the control DoF."""
    c = model.control
    if c.mode != "node-axis":
        raise ConfigError("informed decomposition needs a node-axis control point")
    j = model.free_dof_index(c.node, c.axis)
    lo, hi = sorted(c.sign * np.array([domain.lower[j], domain.upper[j]]))
    return float(lo), float(hi)


def _row(run_id, strategy, sphere, is_center, model, cand, generations, seed):
    return {
        "run_id": run_id, "strategy": strategy, "sphere_index": sphere, "is_center": is_center,
        "d_mm": float(control_batch(model, cand.u)), "lambda": float(cand.lam),
        "objective": float(cand.objective), "generations": generations, "seed": seed,
    }


def _run_summary(records, tol=1e-3):
    rate, hits, total = success_rate(records, tol)
    return {"runs": total, "converged": sum(r.converged for r in records),
            "success_rate": rate, "success_tol": tol}


def _single(cfg, model, domain, opt):
    runs = cfg.get("single", {}).get("runs", 100)
    records, rows = [], []
    for i in range(runs):
        seed = derive_seed(opt.seed, i)
        rec = optimize(model, domain, opt.replace(seed=seed))
        records.append(rec)
        rows.append(_row(i, "single", -1, False, model, rec.best, rec.generations_used, seed))
    return rows, _run_summary(records), records


def _informed(cfg, model, domain, opt):
    icfg = cfg.get("informed")
    if icfg is None:
        plan = DecompositionPlan.even(*_control_range(model, domain), 10, trials_per_cell=10)
    else:
        plan = DecompositionPlan(icfg["control_intervals"], icfg.get("variable_stages", []),
                                 icfg.get("trials_per_cell", 10))
    records = informed_decomposition(model, domain, plan, opt)
    rows = [_row(i, "informed", r.cell, False, model, r.best, r.generations_used, r.seed)
            for i, r in enumerate(records)]
    return rows, _run_summary(records), records


def _hypersphere(cfg, model, bench, opt):
    h = dict(cfg.get("hypersphere", {}))
    schedule = SphereSchedule(h.get("schedule", "fixed"), h.get("r0", 5.0),
                              h.get("additive_increment", 5.0), h.get("min_radius", 0.1))
    base = None
    if "domain" in cfg:
        base = _resolve_domain(cfg, model, bench)
    tracer = HypersphereTracer(
        optimizer=opt, schedule=schedule,
        trials_per_sphere=h.get("trials_per_sphere", 5),
        d_max=h.get("d_max", bench.d_max if bench else np.inf),
        max_spheres=h.get("max_spheres", 1000),
        seed_box=tuple(h.get("seed_box", bench.seed_box if bench else (10.0, 0.2))),
        lambda_ratio=h.get("lambda_ratio", bench.lambda_ratio if bench else 0.04),
        tol_opt=opt.target_objective,
        max_stalls=h.get("max_stalls", 2),
        base_domain=base,
        lambda_weight=h.get("lambda_weight", 1.0),
    )
    res = tracer.fit(model).result_
    by_cand = {id(r.best): (i, r) for i, r in enumerate(res.records)}
    center_ids = {id(c) for c in res.centers}
    rows = []
    for c, sphere in zip(res.centers, res.center_spheres):
        if id(c) not in by_cand:  # the unloaded origin or a resume point
            rows.append(_row(-1, "hypersphere", sphere, True, model, c, 0, opt.seed))
    for cand, sphere in zip(res.all_optimal, res.optimal_spheres):
        i, rec = by_cand[id(cand)]
        rows.append(_row(i, "hypersphere", sphere, id(cand) in center_ids, model, cand,
                         rec.generations_used, rec.seed))
    summary = {
        "termination": res.termination,
        "centers": len(res.centers),
        "spheres": len(res.efforts),
        "final_d": float(res.path(model)[-1, 0]),
        "total_generations": res.total_generations,
    }
    return rows, summary, res


def execute(cfg: dict, out_dir=None) -> RunOutcome:
    """Run a validated configuration and write its artifacts."""
    cfg = validate_run_config(cfg)
    model, bench = _resolve_model(cfg["model"])
    o = cfg.get("optimizer", {})
    try:
        opt = OptimizerConfig(o.get("algorithm", "de-rand-1-bin"), o.get("population_size", 50),
                              o.get("max_generations", 1000), o.get("target_objective", 1e-5),
                              cfg.get("seed", 0), o.get("params", {}))
        opt.build()
    except (InvalidConfigError, TypeError) as exc:
        raise ConfigError(str(exc)) from None

    output = cfg.get("output", {})
    out = Path(out_dir or output.get("dir") or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)

    strategy = cfg["strategy"]
    if strategy == "hypersphere":
        rows, summary, payload = _hypersphere(cfg, model, bench, opt)
    else:
        domain = _resolve_domain(cfg, model, bench)
        run = _single if strategy == "single" else _informed
        rows, summary, payload = run(cfg, model, domain, opt)

    files = []
    csv_path = out / output.get("csv", "results.csv")
    write_results_csv(rows, csv_path)
    files.append(csv_path)

    if strategy != "hypersphere":
        prof_path = out / output.get("profile_csv", "profile.csv")
        prof = convergence_profile(payload)
        lines = ["generation,mean,std,n"] + [f"{g},{m!r},{s!r},{n}" for g, m, s, n in prof.rows()]
        prof_path.write_text("\n".join(lines) + "\n")
        files.append(prof_path)

    if output.get("svg", False):
        if strategy == "hypersphere":
            shapes = payload.centers
        else:
            shapes = [min((r.best for r in payload), key=lambda c: c.objective)]
        for k, cand in enumerate(shapes):
            files.append(emit_svg(model, cand, out / f"shape_{k:03d}.svg"))

    summary = {"model": model.name, "strategy": strategy, "algorithm": opt.algorithm,
               "seed": opt.seed, **summary}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    files.append(out / "summary.json")
    return RunOutcome(rows, summary, files)


def _analyze_config(args) -> dict:
    cfg = {
        "model": args.benchmark if args.benchmark else args.model,
        "strategy": args.strategy,
        "seed": args.seed,
        "optimizer": {"algorithm": args.algo},
        "output": {"svg": bool(args.svg)},
    }
    if args.pop is not None:
        cfg["optimizer"]["population_size"] = args.pop
    if args.max_gen is not None:
        cfg["optimizer"]["max_generations"] = args.max_gen
    if args.target is not None:
        cfg["optimizer"]["target_objective"] = args.target
    if args.displacement or args.lam:
        if not (args.displacement and args.lam):
            raise ConfigError("--displacement and --lambda go together")
        cfg["domain"] = {"displacement": args.displacement, "lambda": args.lam}
    if args.strategy == "single" and args.runs is not None:
        cfg["single"] = {"runs": args.runs}
    if args.strategy == "informed" and (args.cells or args.runs):
        model, bench = _resolve_model(cfg["model"])
        dom = _resolve_domain(cfg, model, bench)
        edges = np.linspace(*_control_range(model, dom), (args.cells or 10) + 1)
        cfg["informed"] = {
            "control_intervals": [[float(x), float(y)] for x, y in zip(edges[:-1], edges[1:])],
            "trials_per_cell": args.runs or 10,
        }
    if args.strategy == "hypersphere":
        h = {}
        for key, val in (("r0", args.r0), ("d_max", args.d_max), ("schedule", args.schedule),
                         ("trials_per_sphere", args.runs)):
            if val is not None:
                h[key] = val
        cfg["hypersphere"] = h
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hypertruss",
        description="Trace equilibrium paths of space trusses with gradient-free optimizers.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run one strategy on a benchmark or model file")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--benchmark", choices=BENCHMARK_IDS)
    src.add_argument("--model", help="JSON model file")
    a.add_argument("--strategy", choices=["single", "informed", "hypersphere"], default="single")
    a.add_argument("--algo", choices=sorted(ALGORITHMS), default="de-rand-1-bin")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    a.add_argument("--svg", action="store_true", help="write SVG wireframes")
    a.add_argument("--runs", type=int,
                   help="runs (single), trials per cell (informed) or per sphere (hypersphere)")
    a.add_argument("--cells", type=int, help="number of equal control-point cells (informed)")
    a.add_argument("--r0", type=float, help="initial sphere radius in mm")
    a.add_argument("--d-max", type=float, help="stop the trace beyond this control value")
    a.add_argument("--schedule", choices=["fixed", "halving", "additive"])
    a.add_argument("--pop", type=int, help="population size")
    a.add_argument("--max-gen", type=int, help="generation budget per run")
    a.add_argument("--target", type=float, help="objective target (default 1e-5)")
    a.add_argument("--displacement", type=float, nargs=2, metavar=("LO", "HI"))
    a.add_argument("--lambda", dest="lam", type=float, nargs=2, metavar=("LO", "HI"))

    r = sub.add_parser("run", help="execute a JSON run-configuration file")
    r.add_argument("config")
    r.add_argument("--out", help="override the output directory")

    sub.add_parser("list", help="list benchmark ids")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        for b in BENCHMARK_IDS:
            m = REGISTRY[b].build()
            print(f"{b}\t{len(m.nodes)} nodes\t{len(m.members)} members\t{m.n_free} DoF")
        return EXIT_OK
    try:
        if args.command == "run":
            cfg = load_run_config(args.config)
        else:
            cfg = _analyze_config(args)
        outcome = execute(cfg, args.out)
    except SeedSphereError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEED
    except (ConfigError, ModelFileError, InvalidModelError, InvalidConfigError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for key in sorted(outcome.summary):
        print(f"{key}: {outcome.summary[key]}")
    for f in outcome.files:
        print(f"wrote {f}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
