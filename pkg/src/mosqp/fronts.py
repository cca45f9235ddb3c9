"""Multi-start front generation, dominance filtering, and front serialization."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .problems import EvalCounter, FEASIBILITY_TOL, Problem, scalarize
from .solver import SolveOutcome, SolverConfig, solve

Array = np.ndarray

# points closer than this in objective space collapse to one representative
DUPLICATE_TOL = 1e-8


@dataclass(frozen=True)
class FrontPoint:
    x: Array
    f: Array
    phi: float
    feasible: bool
    status: str
    run_id: int
    start_id: int


@dataclass
class Front:
    points: List[FrontPoint]
    solver_tag: str = ""
    evals: EvalCounter = field(default_factory=EvalCounter)

    def objective_matrix(self) -> Array:
        if not self.points:
            return np.empty((0, 0))
        return np.array([pt.f for pt in self.points])


def line_starts(problem: Problem, count: int = 100) -> Array:
    """count points evenly spaced on the segment from l to u, endpoints included."""
    if count < 2:
        raise ValueError("LINE needs at least 2 starts")
    ks = np.arange(count).reshape(count, 1)
    return problem.lower + ks * (problem.upper - problem.lower) / (count - 1)


def rand_starts(problem: Problem, count: int, seed) -> Array:
    """count componentwise-uniform points in [l, u] from a seeded generator."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return problem.lower + rng.random((count, problem.n)) * (problem.upper - problem.lower)


def weighted_sum_solve(problem: Problem, w, x0, config: SolverConfig = SolverConfig(),
                       counter: Optional[EvalCounter] = None) -> SolveOutcome:
    """Solve min sum_j w_j f_j(x) over the same constraints with the SQP iteration."""
    return solve(scalarize(problem, w), x0, config, counter)


def _dominates(a: Array, b: Array) -> bool:
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_filter(points: Sequence[FrontPoint], solver_tag: str = "",
                        evals: Optional[EvalCounter] = None,
                        duplicate_tol: float = DUPLICATE_TOL) -> Front:
    """Drop infeasible points, collapse objective-space duplicates (first by run
    order wins), then remove every dominated point."""
    feas = [pt for pt in points if pt.feasible]
    unique: List[FrontPoint] = []
    fmat = None
    for pt in feas:
        if fmat is not None and fmat.size:
            if float(np.abs(fmat - pt.f).max(axis=1).min()) <= duplicate_tol:
                continue
        unique.append(pt)
        fmat = np.array([q.f for q in unique])
    if not unique:
        return Front(points=[], solver_tag=solver_tag,
                     evals=evals if evals is not None else EvalCounter())
    F = np.array([pt.f for pt in unique])
    keep = []
    for i in range(len(unique)):
        le = np.all(F <= F[i], axis=1)
        lt = np.any(F < F[i], axis=1)
        if not np.any(le & lt):
            keep.append(unique[i])
    return Front(points=keep, solver_tag=solver_tag,
                 evals=evals if evals is not None else EvalCounter())


def build_reference_front(fronts: Sequence[Front]) -> Front:
    """Union of all fronts with dominated points removed."""
    pts: List[FrontPoint] = []
    evals = EvalCounter()
    for fr in fronts:
        pts.extend(fr.points)
        evals.merge(fr.evals)
    return nondominated_filter(pts, solver_tag="reference", evals=evals)


def front_to_csv(front: Front, n: int, m: int) -> str:
    """One row per point: run_id, start_id, solver, x_*, f_*, phi, status."""
    buf = io.StringIO()
    cols = (["run_id", "start_id", "solver"]
            + [f"x_{i + 1}" for i in range(n)]
            + [f"f_{j + 1}" for j in range(m)]
            + ["phi", "status"])
    buf.write(",".join(cols) + "\n")
    for pt in front.points:
        row = [str(pt.run_id), str(pt.start_id), front.solver_tag]
        row += [repr(float(v)) for v in pt.x]
        row += [repr(float(v)) for v in pt.f]
        row += [repr(float(pt.phi)), str(pt.status)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def front_from_csv(text: str) -> Front:
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    n = sum(1 for c in header if c.startswith("x_"))
    m = sum(1 for c in header if c.startswith("f_"))
    points = []
    tag = ""
    for ln in lines[1:]:
        cells = ln.split(",")
        run_id, start_id, tag = int(cells[0]), int(cells[1]), cells[2]
        x = np.array([float(v) for v in cells[3:3 + n]])
        f = np.array([float(v) for v in cells[3 + n:3 + n + m]])
        phi = float(cells[3 + n + m])
        status = cells[4 + n + m]
        points.append(FrontPoint(x=x, f=f, phi=phi, feasible=phi <= FEASIBILITY_TOL,
                                 status=status, run_id=run_id, start_id=start_id))
    return Front(points=points, solver_tag=tag)
