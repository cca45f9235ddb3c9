"""Benchmark orchestration: solver x strategy x problem grids, persisted fronts,
metric tables, and performance-profile data."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .catalog import get_problem, problem_names
from .fronts import (
    Front,
    FrontPoint,
    build_reference_front,
    front_to_csv,
    line_starts,
    nondominated_filter,
    rand_starts,
    weighted_sum_solve,
)
from .metrics import (
    MetricUndefined,
    delta_spread,
    fe1,
    front_extremes,
    gamma_spread,
    performance_profile,
    purity,
)
from .problems import EvalCounter, EvaluationError, FEASIBILITY_TOL
from .solver import SolverConfig, Status, solve

MEMBERSHIP_TOL = 1e-8

SOLVER_TAGS = ("MOSQP", "MOS")
STRATEGY_TAGS = ("LINE", "RAND")


class ReportError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    problems: Tuple[str, ...] = tuple(problem_names())
    solvers: Tuple[str, ...] = SOLVER_TAGS
    strategies: Tuple[str, ...] = STRATEGY_TAGS
    starts: int = 100
    runs: int = 10
    seed: int = 0
    solver_config: SolverConfig = SolverConfig()
    output_dir: str = "bench-out"
    workers: int = 0  # 0 = pick from cpu count

    def __post_init__(self):
        unknown = [s for s in self.solvers if s not in SOLVER_TAGS]
        if unknown:
            raise ValueError(f"unknown solvers {unknown}")
        unknown = [s for s in self.strategies if s not in STRATEGY_TAGS]
        if unknown:
            raise ValueError(f"unknown strategies {unknown}")
        if "LINE" in self.strategies:
            for name in self.problems:
                if get_problem(name).m != 2:
                    raise ValueError(f"LINE strategy needs m = 2; {name} has m != 2")


def config_from_dict(data: dict) -> RunConfig:
    data = dict(data or {})
    sc = data.pop("solver", None) or data.pop("solver_config", None)
    kwargs = {}
    for fld in ("problems", "solvers", "strategies"):
        if fld in data:
            kwargs[fld] = tuple(data.pop(fld))
    for fld in ("starts", "runs", "seed", "workers"):
        if fld in data:
            kwargs[fld] = int(data.pop(fld))
    if "output_dir" in data:
        kwargs["output_dir"] = str(data.pop("output_dir"))
    if data:
        raise ValueError(f"unknown config keys: {sorted(data)}")
    if sc:
        kwargs["solver_config"] = SolverConfig(**sc)
    return RunConfig(**kwargs)


@dataclass
class CellResult:
    problem: str
    solver: str
    strategy: str
    run_id: int
    points: List[FrontPoint]
    evals: EvalCounter
    status_counts: Dict[str, int]
    n_failures: int


def _cell_seed(seed: int, prob_idx: int, solver: str, strategy: str, run_id: int) -> int:
    ss = np.random.SeedSequence(
        entropy=(seed, prob_idx, SOLVER_TAGS.index(solver),
                 STRATEGY_TAGS.index(strategy), run_id))
    return int(ss.generate_state(1)[0])


def _run_cell(args) -> CellResult:
    problem_name, solver_tag, strategy, run_id, starts, cell_seed, solver_config = args
    problem = get_problem(problem_name)
    counter = EvalCounter()
    statuses: Counter = Counter()
    n_failures = 0
    points: List[FrontPoint] = []

    if solver_tag == "MOSQP":
        if strategy == "LINE":
            x0s = line_starts(problem, starts)
        else:
            x0s = rand_starts(problem, starts, cell_seed)
        for sid, x0 in enumerate(x0s):
            try:
                out = solve(problem, x0, solver_config, counter)
            except EvaluationError:
                n_failures += 1
                continue
            statuses[out.status.value] += 1
            points.append(FrontPoint(
                x=out.final_x, f=out.final_f, phi=out.final_phi,
                feasible=out.final_phi <= solver_config.feasibility_tol,
                status=out.status.value, run_id=run_id, start_id=sid))
    else:  # MOS: weighted-sum scalarizations solved by the same iteration
        if strategy == "LINE":
            ws = np.column_stack([np.arange(starts) / (starts - 1),
                                  1.0 - np.arange(starts) / (starts - 1)])
            x0s = np.tile((problem.lower + problem.upper) / 2.0, (starts, 1))
        else:
            rng = np.random.default_rng(cell_seed)
            x0s = rand_starts(problem, starts, rng)
            ws = rng.random((starts, problem.m))
            zero = ~np.any(ws > 0, axis=1)
            ws[zero] = 1.0  # measure-zero guard
            ws = ws / ws.sum(axis=1, keepdims=True)
        for sid, (x0, w) in enumerate(zip(x0s, ws)):
            try:
                out = weighted_sum_solve(problem, w, x0, solver_config, counter)
                fx = problem.eval_f(out.final_x, counter)
            except EvaluationError:
                n_failures += 1
                continue
            statuses[out.status.value] += 1
            points.append(FrontPoint(
                x=out.final_x, f=fx, phi=out.final_phi,
                feasible=out.final_phi <= solver_config.feasibility_tol,
                status=out.status.value, run_id=run_id, start_id=sid))
    return CellResult(problem=problem_name, solver=solver_tag, strategy=strategy,
                      run_id=run_id, points=points, evals=counter,
                      status_counts=dict(statuses), n_failures=n_failures)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _survivors(front: Front, reference: Front) -> int:
    if not front.points or not reference.points:
        return 0
    ref = reference.objective_matrix()
    return sum(1 for pt in front.points
               if float(np.abs(ref - pt.f).max(axis=1).min()) <= MEMBERSHIP_TOL)


def _metric_row(problem: str, front: Front, reference: Front, extremes, n_dim: int) -> dict:
    try:
        pur = purity(front, reference)
    except MetricUndefined:
        pur = None
    try:
        gam = gamma_spread(front, extremes)
    except MetricUndefined:
        gam = None
    try:
        dlt = delta_spread(front, extremes)
    except MetricUndefined:
        dlt = None
    try:
        cost = fe1(front.evals, n_dim, len(front.points))
    except MetricUndefined:
        cost = None
    return {"problem": problem, "solver": front.solver_tag, "n_points": len(front.points),
            "purity": pur, "gamma": gam, "delta": dlt, "fe1": cost}


def run_benchmark(config: RunConfig) -> Path:
    """Execute the full grid and persist fronts, metrics, profiles, and a manifest."""
    out = Path(config.output_dir)
    (out / "fronts").mkdir(parents=True, exist_ok=True)

    cells = []
    for pi, pname in enumerate(config.problems):
        for solver_tag in config.solvers:
            for strategy in config.strategies:
                n_runs = config.runs if strategy == "RAND" else 1
                for run_id in range(n_runs):
                    cells.append((pname, solver_tag, strategy, run_id, config.starts,
                                  _cell_seed(config.seed, pi, solver_tag, strategy, run_id),
                                  config.solver_config))

    workers = config.workers if config.workers > 0 else min(8, os.cpu_count() or 1)
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=1))
    else:
        results = [_run_cell(c) for c in cells]

    files: Dict[str, str] = {}

    def write(relpath: str, text: str) -> None:
        path = out / relpath
        data = text.encode()
        path.write_bytes(data)
        files[relpath] = hashlib.sha256(data).hexdigest()

    # per-run fronts
    fronts: Dict[tuple, Front] = {}
    for res in results:
        problem = get_problem(res.problem)
        front = nondominated_filter(res.points, solver_tag=res.solver, evals=res.evals)
        fronts[(res.problem, res.solver, res.strategy, res.run_id)] = front
        write(f"fronts/{res.problem}_{res.solver}_{res.strategy}_run{res.run_id}.csv",
              front_to_csv(front, problem.n, problem.m))

    # best/worst run selection for RAND, by survivors in the cross-run reference
    selections: Dict[tuple, int] = {}
    rand_refs: Dict[str, Front] = {}
    survivors_by_cell: Dict[tuple, int] = {}
    if "RAND" in config.strategies:
        for pname in config.problems:
            pool_fronts = [fronts[(pname, s, "RAND", r)]
                           for s in config.solvers for r in range(config.runs)]
            ref = build_reference_front(pool_fronts)
            rand_refs[pname] = ref
            for s in config.solvers:
                counts = []
                for r in range(config.runs):
                    cnt = _survivors(fronts[(pname, s, "RAND", r)], ref)
                    survivors_by_cell[(pname, s, r)] = cnt
                    counts.append(cnt)
                selections[(pname, s, "best")] = int(np.argmax(counts))
                selections[(pname, s, "worst")] = int(np.argmin(counts))

    # run summary
    lines = ["problem,solver,strategy,run,n_starts,n_failures,n_strongly_critical,"
             "n_points,num_f,num_grad_f,survivors"]
    for res in results:
        surv = survivors_by_cell.get((res.problem, res.solver, res.run_id), "") \
            if res.strategy == "RAND" else ""
        lines.append(",".join(str(v) for v in (
            res.problem, res.solver, res.strategy, res.run_id, config.starts,
            res.n_failures, res.status_counts.get(Status.STRONGLY_CRITICAL.value, 0),
            len(fronts[(res.problem, res.solver, res.strategy, res.run_id)].points),
            res.evals.num_f, res.evals.num_grad_f, surv)))
    write("runs.csv", "\n".join(lines) + "\n")

    # category fronts and metric tables
    categories: Dict[str, Dict[str, Dict[str, Front]]] = {}
    if "LINE" in config.strategies:
        categories["line"] = {p: {s: fronts[(p, s, "LINE", 0)] for s in config.solvers}
                              for p in config.problems}
    if "RAND" in config.strategies:
        for kind in ("best", "worst"):
            categories[f"rand_{kind}"] = {
                p: {s: fronts[(p, s, "RAND", selections[(p, s, kind)])]
                    for s in config.solvers}
                for p in config.problems}

    header = ("# purity = |reference| / |front intersect reference| "
              "(smaller is better; inf = no contribution)\n")
    metric_keys = ("purity", "gamma", "delta")
    for category, per_problem in categories.items():
        rows = []
        scores = {k: [] for k in metric_keys}
        for pname in config.problems:
            problem = get_problem(pname)
            solver_fronts = [per_problem[pname][s] for s in config.solvers]
            reference = build_reference_front(solver_fronts)
            try:
                extremes = front_extremes(solver_fronts)
            except MetricUndefined:
                extremes = None
            prob_scores = {k: [] for k in metric_keys}
            for fr in solver_fronts:
                if extremes is None:
                    row = {"problem": pname, "solver": fr.solver_tag,
                           "n_points": 0, "purity": None, "gamma": None,
                           "delta": None, "fe1": None}
                else:
                    row = _metric_row(pname, fr, reference, extremes, problem.n)
                rows.append(row)
                for k in metric_keys:
                    v = row[k]
                    prob_scores[k].append(math.inf if v is None else v)
            for k in metric_keys:
                scores[k].append(prob_scores[k])
        table = [header + "problem,solver,n_points,purity,gamma,delta,fe1"]
        for row in rows:
            table.append(",".join(_fmt(row[c]) for c in
                                  ("problem", "solver", "n_points", "purity",
                                   "gamma", "delta", "fe1")))
        write(f"metrics_{category}.csv", "\n".join(table) + "\n")

        for k in metric_keys:
            mat = np.array(scores[k], dtype=float)
            try:
                curves = performance_profile(config.solvers, mat)
            except MetricUndefined:
                curves = []
            plines = ["solver,tau,rho"]
            for curve in curves:
                for tau, rho in curve.samples:
                    plines.append(f"{curve.solver},{_fmt(float(tau))},{_fmt(float(rho))}")
            write(f"profile_{k}_{category}.csv", "\n".join(plines) + "\n")

    manifest = {
        "config": _config_to_jsonable(config),
        "seed": config.seed,
        "files": {k: files[k] for k in sorted(files)},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out


def _config_to_jsonable(config: RunConfig) -> dict:
    data = dataclasses.asdict(config)
    data["problems"] = list(config.problems)
    data["solvers"] = list(config.solvers)
    data["strategies"] = list(config.strategies)
    return data


def report(output_dir) -> str:
    """Summarize a benchmark directory; returns the printed text."""
    out = Path(output_dir)
    manifest_path = out / "manifest.json"
    if not manifest_path.is_file():
        raise ReportError(f"no manifest in {out}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except (ValueError, OSError) as exc:
        raise ReportError(f"corrupt manifest: {exc}") from exc

    single_solver = len(manifest["config"]["solvers"]) < 2
    # strongly-critical fraction per (problem, solver)
    crit: Dict[tuple, list] = {}
    runs_path = out / "runs.csv"
    if runs_path.is_file():
        for ln in runs_path.read_text().strip().splitlines()[1:]:
            cells = ln.split(",")
            key = (cells[0], cells[1])
            crit.setdefault(key, [0, 0])
            crit[key][0] += int(cells[6])
            crit[key][1] += int(cells[4])

    lines = []
    for path in sorted(out.glob("metrics_*.csv")):
        category = path.stem.replace("metrics_", "")
        lines.append(f"== {category} ==")
        lines.append(f"{'problem':10} {'solver':6} {'npts':>5} {'purity':>10} "
                     f"{'gamma':>12} {'delta':>10} {'fe1':>12} {'crit%':>7}")
        for ln in path.read_text().strip().splitlines():
            if ln.startswith("#") or ln.startswith("problem,"):
                continue
            cells = ln.split(",")
            pname, solver = cells[0], cells[1]
            frac = ""
            if (pname, solver) in crit and crit[(pname, solver)][1]:
                num, den = crit[(pname, solver)]
                frac = f"{100.0 * num / den:.1f}"
            pur = cells[3] if not single_solver else (cells[3] + " (degenerate)")
            vals = [cells[2], pur, cells[4], cells[5], cells[6], frac]
            vals = [v if v else "-" for v in vals]
            lines.append(f"{pname:10} {solver:6} {vals[0]:>5} {vals[1]:>10} "
                         f"{vals[2]:>12} {vals[3]:>10} {vals[4]:>12} {vals[5]:>7}")
        lines.append("")
    text = "\n".join(lines)
    print(text)
    return text
