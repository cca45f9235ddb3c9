"""Penalty-SQP iteration: direction, penalty update, Armijo backtracking, stopping."""
from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .problems import (
    EvalCounter,
    FEASIBILITY_TOL,
    PenaltyValue,
    Problem,
    penalty_from_g,
    phi_star_from_parts,
)
from .qp import MaxQpIterations, QpInstance, QpSolution, solve_qp

Array = np.ndarray

# lambda_j above this counts as strictly positive in the criticality test
LAMBDA_POSITIVE_TOL = 1e-8
# Phi* this close to zero makes the penalty-update quotient meaningless
PHI_STAR_DEGENERATE_TOL = 1e-12
# direction norm below which an infeasible iterate counts as stalled
D_NORM_FLOOR = 1e-12


class Status(str, enum.Enum):
    STRONGLY_CRITICAL = "StronglyCritical"
    WEAKLY_CRITICAL_SUSPECTED = "WeaklyCriticalSuspected"
    MAX_ITERATIONS = "MaxIterations"
    QP_FAILURE = "QpFailure"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


class PenaltyUpdateDegenerate(RuntimeError):
    """Phi*(x; d) is not negative where the penalty update divides by it."""


class LineSearchError(RuntimeError):
    """Backtracking underflowed the step-length floor."""


@dataclass(frozen=True)
class SolverConfig:
    r: float = 0.5
    beta: float = 0.1
    sigma0: float = 1.0
    epsilon: float = 1e-5
    max_iters: int = 500
    sigma_cap: float = 1e8
    qp_tol: float = 1e-8
    feasibility_tol: float = FEASIBILITY_TOL
    alpha_min: float = 1e-16

    def __post_init__(self):
        if not (0.0 < self.r < 1.0 and 0.0 < self.beta < 1.0):
            raise ValueError("r and beta must lie in (0, 1)")
        if self.sigma0 <= 0 or self.epsilon <= 0:
            raise ValueError("sigma0 and epsilon must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """One accepted step, with everything needed to re-verify its certificates."""

    k: int
    x: Array
    t: float
    d: Array
    d_norm: float
    sigma: float
    alpha: float
    phi: float
    theta: Array       # per-objective, at the sigma used for the step
    psi_before: Array  # per-objective merit at x
    psi_after: Array   # per-objective merit at x + alpha d


@dataclass
class SolveOutcome:
    status: Status
    final_x: Array
    final_f: Array
    final_phi: float
    lam: Array
    mu: Array
    final_d_norm: float
    iterations: int
    trace: List[IterationRecord]
    evals: EvalCounter


def update_sigma(sigma: float, phi: float, thetas: Array, grad_f_dot_d: Array,
                 dtd: float, phi_star_val: float) -> float:
    """Keep sigma when d is already a merit descent direction, else grow it.

    The growth rule takes max(2 sigma, (grad f_j . d + 0.5 d'd) / (-Phi*)).
    """
    if phi == 0.0 or bool(np.all(thetas <= -0.5 * dtd)):
        return sigma
    if phi_star_val >= -PHI_STAR_DEGENERATE_TOL:
        raise PenaltyUpdateDegenerate(
            f"Phi* = {phi_star_val} is not negative at an infeasible point")
    return max(2.0 * sigma, float(np.max((grad_f_dot_d + 0.5 * dtd) / (-phi_star_val))))


def _backtrack(problem: Problem, x: Array, d: Array, sigma: float, thetas: Array,
               psi0: Array, config: SolverConfig, counter: EvalCounter):
    """Return (alpha, x_trial, f_trial, g_trial, phi_trial) for the first accepted step."""
    alpha = 1.0
    while True:
        xt = x + alpha * d
        ft = problem.eval_f(xt, counter)
        gt = problem.eval_g(xt)
        phit = float(max(0.0, gt.max(initial=0.0)))
        psit = ft + sigma * phit
        if bool(np.all(psit - psi0 <= alpha * config.beta * thetas)):
            return alpha, xt, ft, gt, phit, psit
        alpha *= config.r
        if alpha < config.alpha_min:
            raise LineSearchError(f"step length underflowed below {config.alpha_min}")


def line_search(problem: Problem, x: Array, d: Array, sigma: float,
                config: SolverConfig = SolverConfig(),
                counter: Optional[EvalCounter] = None) -> float:
    """Largest alpha in {1, r, r^2, ...} with simultaneous merit decrease for all j."""
    counter = counter if counter is not None else EvalCounter()
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    fx = problem.eval_f(x, counter)
    gx = problem.eval_g(x)
    pen = penalty_from_g(gx)
    gf = problem.eval_grad_f(x, counter)
    ps = phi_star_from_parts(pen, problem.eval_grad_g(x), d)
    thetas = gf @ d + sigma * ps
    psi0 = fx + sigma * pen.phi
    alpha, *_ = _backtrack(problem, x, d, sigma, thetas, psi0, config, counter)
    return alpha


def classify_terminal(lam: Array, phi: float, config: SolverConfig) -> Status:
    """Classification once the direction norm has dropped below epsilon."""
    if phi <= config.feasibility_tol and float(lam.max(initial=0.0)) > LAMBDA_POSITIVE_TOL:
        return Status.STRONGLY_CRITICAL
    return Status.WEAKLY_CRITICAL_SUSPECTED


def solve(problem: Problem, x0, config: SolverConfig = SolverConfig(),
          counter: Optional[EvalCounter] = None) -> SolveOutcome:
    """Run the penalty-SQP iteration from x0 (feasibility not required)."""
    counter = counter if counter is not None else EvalCounter()
    x = np.asarray(x0, dtype=float).reshape(problem.n).copy()
    sigma = config.sigma0
    trace: List[IterationRecord] = []
    lam = np.zeros(problem.m)
    mu = np.zeros(problem.p)
    k = 0
    support = None  # warm start for the QP active set across iterations

    def outcome(status, fx, phi, d_norm):
        return SolveOutcome(status=status, final_x=x.copy(), final_f=fx,
                            final_phi=phi, lam=lam, mu=mu, final_d_norm=d_norm,
                            iterations=k, trace=trace, evals=counter)

    while True:
        fx = problem.eval_f(x, counter)
        gx = problem.eval_g(x)
        pen = penalty_from_g(gx)
        if k >= config.max_iters:
            return outcome(Status.MAX_ITERATIONS, fx, pen.phi, np.inf)
        gf = problem.eval_grad_f(x, counter)
        gg = problem.eval_grad_g(x)
        try:
            qp = solve_qp(QpInstance(grad_f=gf, grad_g=gg, g_vals=gx, phi=pen.phi),
                          tol=config.qp_tol, support0=support)
        except MaxQpIterations:
            return outcome(Status.QP_FAILURE, fx, pen.phi, np.inf)
        lam, mu = qp.lam, qp.mu
        support = np.flatnonzero(np.concatenate([lam, mu]) > 0.0)
        d = qp.d
        d_norm = float(np.linalg.norm(d))
        if d_norm < config.epsilon:
            # while infeasible, d != 0 is guaranteed under MFCQ and further
            # steps keep shrinking Phi, so only stop once feasibility is
            # resolved (or the direction collapses to the numerical floor)
            if pen.phi <= config.feasibility_tol or d_norm < D_NORM_FLOOR:
                return outcome(classify_terminal(lam, pen.phi, config), fx, pen.phi, d_norm)

        dtd = float(d @ d)
        gfd = gf @ d
        ps = phi_star_from_parts(pen, gg, d)
        thetas = gfd + sigma * ps
        try:
            sigma = update_sigma(sigma, pen.phi, thetas, gfd, dtd, ps)
        except PenaltyUpdateDegenerate:
            return outcome(Status.QP_FAILURE, fx, pen.phi, d_norm)
        thetas = gfd + sigma * ps
        if sigma > config.sigma_cap:
            return outcome(Status.WEAKLY_CRITICAL_SUSPECTED, fx, pen.phi, d_norm)

        psi0 = fx + sigma * pen.phi
        try:
            alpha, xt, _ft, _gt, _phit, psit = _backtrack(
                problem, x, d, sigma, thetas, psi0, config, counter)
        except LineSearchError:
            return outcome(Status.LINE_SEARCH_FAILURE, fx, pen.phi, d_norm)
        trace.append(IterationRecord(
            k=k, x=x.copy(), t=qp.t, d=d.copy(), d_norm=d_norm, sigma=sigma,
            alpha=alpha, phi=pen.phi, theta=thetas.copy(),
            psi_before=psi0.copy(), psi_after=psit.copy()))
        x = xt
        k += 1


def trace_to_table(trace: List[IterationRecord]) -> str:
    """Tabular text export of a run trace for debugging."""
    buf = io.StringIO()
    if not trace:
        return ""
    m = trace[0].theta.shape[0]
    n = trace[0].x.shape[0]
    cols = (["k", "t", "d_norm", "sigma", "alpha", "phi"]
            + [f"theta_{j + 1}" for j in range(m)]
            + [f"x_{i + 1}" for i in range(n)])
    buf.write(",".join(cols) + "\n")
    for rec in trace:
        row = [str(rec.k), repr(rec.t), repr(rec.d_norm), repr(rec.sigma),
               repr(rec.alpha), repr(rec.phi)]
        row += [repr(float(v)) for v in rec.theta]
        row += [repr(float(v)) for v in rec.x]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()
