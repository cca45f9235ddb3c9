"""Problem abstraction, evaluation counting, and the penalty/merit scalars."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

Array = np.ndarray

# Indices i with g_i(x) within this of the max count as active.
ACTIVE_TIE_TOL = 1e-10
# Phi at or below this counts as feasible for reporting.
FEASIBILITY_TOL = 1e-6


class EvaluationError(RuntimeError):
    """An objective or constraint returned a non-finite value."""

    def __init__(self, kind: str, index: int):
        super().__init__(f"non-finite {kind} value (component {index})")
        self.kind = kind
        self.index = index


@dataclass
class EvalCounter:
    """Counts vector-objective and vector-gradient evaluations."""

    num_f: int = 0
    num_grad_f: int = 0

    def merge(self, other: "EvalCounter") -> None:
        self.num_f += other.num_f
        self.num_grad_f += other.num_grad_f


@dataclass(frozen=True)
class Problem:
    """An inequality-constrained multi-objective problem.

    Box bounds are already expanded into the constraint list: g holds the
    user constraints first, then l_i - x_i <= 0, then x_i - u_i <= 0,
    so p = p_user + 2n.  All callables are vectorized over components:
    f(x) -> (m,), grad_f(x) -> (m, n), g(x) -> (p,), grad_g(x) -> (p, n).
    """

    name: str
    n: int
    m: int
    p: int
    f: Callable[[Array], Array]
    grad_f: Callable[[Array], Array]
    g: Callable[[Array], Array]
    grad_g: Callable[[Array], Array]
    lower: Array
    upper: Array

    def eval_f(self, x: Array, counter: Optional[EvalCounter] = None) -> Array:
        if counter is not None:
            counter.num_f += 1
        v = np.asarray(self.f(x), dtype=float).reshape(self.m)
        bad = ~np.isfinite(v)
        if bad.any():
            raise EvaluationError("objective", int(np.argmax(bad)))
        return v

    def eval_grad_f(self, x: Array, counter: Optional[EvalCounter] = None) -> Array:
        if counter is not None:
            counter.num_grad_f += 1
        v = np.asarray(self.grad_f(x), dtype=float).reshape(self.m, self.n)
        if not np.isfinite(v).all():
            raise EvaluationError("objective gradient", int(np.argmax(~np.isfinite(v).any(axis=1))))
        return v

    def eval_g(self, x: Array) -> Array:
        v = np.asarray(self.g(x), dtype=float).reshape(self.p)
        bad = ~np.isfinite(v)
        if bad.any():
            raise EvaluationError("constraint", int(np.argmax(bad)))
        return v

    def eval_grad_g(self, x: Array) -> Array:
        v = np.asarray(self.grad_g(x), dtype=float).reshape(self.p, self.n)
        if not np.isfinite(v).all():
            raise EvaluationError("constraint gradient", int(np.argmax(~np.isfinite(v).any(axis=1))))
        return v


def forward_difference(fun: Callable[[Array], Array], x: Array, h_rel: float = 1e-7) -> Array:
    """Forward-difference Jacobian, step h = h_rel * max(1, |x_i|) per coordinate."""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(np.asarray(fun(x), dtype=float))
    out = np.empty(f0.shape + (x.size,))
    for i in range(x.size):
        h = h_rel * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += h
        out[..., i] = (np.atleast_1d(np.asarray(fun(xp), dtype=float)) - f0) / h
    return out


def central_difference(fun: Callable[[Array], Array], x: Array, h_rel: float = 1e-6) -> Array:
    """Central-difference Jacobian, used as the gradient-validation oracle."""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(np.asarray(fun(x), dtype=float))
    out = np.empty(f0.shape + (x.size,))
    for i in range(x.size):
        h = h_rel * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        out[..., i] = (np.atleast_1d(np.asarray(fun(xp), dtype=float))
                       - np.atleast_1d(np.asarray(fun(xm), dtype=float))) / (2 * h)
    return out


def make_problem(
    name: str,
    n: int,
    m: int,
    f: Callable[[Array], Array],
    lower,
    upper,
    grad_f: Optional[Callable[[Array], Array]] = None,
    g_extra: Optional[Callable[[Array], Array]] = None,
    grad_g_extra: Optional[Callable[[Array], Array]] = None,
    p_extra: int = 0,
) -> Problem:
    """Build a Problem, expanding box bounds into 2n inequality constraints.

    Missing gradients are synthesized by forward differences.
    """
    lower = np.asarray(lower, dtype=float).reshape(n)
    upper = np.asarray(upper, dtype=float).reshape(n)
    if m < 2:
        raise ValueError("multi-objective problems need m >= 2")
    if not np.all(lower < upper):
        raise ValueError("bounds must satisfy l < u componentwise")
    if g_extra is not None and grad_g_extra is None:
        grad_g_extra = lambda x, _g=g_extra: forward_difference(_g, x)
    if grad_f is None:
        grad_f = lambda x, _f=f: forward_difference(_f, x)

    eye = np.eye(n)

    def g_full(x, _g=g_extra):
        parts = [lower - x, x - upper]
        if _g is not None:
            parts.insert(0, np.atleast_1d(np.asarray(_g(x), dtype=float)))
        return np.concatenate(parts)

    def grad_g_full(x, _gg=grad_g_extra):
        parts = [-eye, eye]
        if _gg is not None:
            parts.insert(0, np.asarray(_gg(x), dtype=float).reshape(p_extra, n))
        return np.vstack(parts)

    return Problem(
        name=name, n=n, m=m, p=p_extra + 2 * n,
        f=f, grad_f=grad_f, g=g_full, grad_g=grad_g_full,
        lower=lower, upper=upper,
    )


def scalarize(problem: Problem, w) -> Problem:
    """Weighted-sum reduction to a single-objective problem (m = 1).

    Constraints (bounds included) are reused untouched.
    """
    w = np.asarray(w, dtype=float).reshape(problem.m)
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be nonnegative and not all zero")

    def f(x, _p=problem, _w=w):
        return np.array([float(_w @ np.asarray(_p.f(x), dtype=float))])

    def grad_f(x, _p=problem, _w=w):
        return (_w @ np.asarray(_p.grad_f(x), dtype=float).reshape(_p.m, _p.n)).reshape(1, _p.n)

    return replace(problem, name=problem.name + "+ws", m=1, f=f, grad_f=grad_f)


@dataclass(frozen=True)
class PenaltyValue:
    """Phi(x) = max(0, g_i(x)) together with the active/most-violated set I(x)."""

    phi: float
    active_set: tuple
    g_vals: Array = field(repr=False, default=None)


def penalty_from_g(g_vals: Array, tie_tol: float = ACTIVE_TIE_TOL) -> PenaltyValue:
    phi = float(max(0.0, g_vals.max(initial=0.0)))
    active = tuple(int(i) for i in np.flatnonzero(g_vals >= phi - tie_tol))
    return PenaltyValue(phi=phi, active_set=active, g_vals=g_vals)


def evaluate_phi(problem: Problem, x: Array, tie_tol: float = ACTIVE_TIE_TOL) -> PenaltyValue:
    """Penalty value and active set at x."""
    return penalty_from_g(problem.eval_g(x), tie_tol)


def merit(problem: Problem, x: Array, j: int, sigma: float,
          counter: Optional[EvalCounter] = None) -> float:
    """Merit value f_j(x) + sigma * Phi(x)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    fx = problem.eval_f(x, counter)
    return float(fx[j] + sigma * evaluate_phi(problem, x).phi)


def phi_star_from_parts(pen: PenaltyValue, grad_g: Array, d: Array) -> float:
    """Linearized penalty decrease max(0, max_{i in I} (g_i + grad_g_i.d)) - Phi."""
    if not pen.active_set:
        return 0.0
    idx = list(pen.active_set)
    inner = float((pen.g_vals[idx] + grad_g[idx] @ d).max())
    return max(0.0, inner) - pen.phi


def phi_star(problem: Problem, x: Array, d: Array, active: PenaltyValue) -> float:
    """Continuous approximation of the directional derivative of Phi at x along d."""
    if not active.active_set:
        return 0.0
    return phi_star_from_parts(active, problem.eval_grad_g(x), np.asarray(d, dtype=float))


def theta(problem: Problem, x: Array, d: Array, j: int, sigma: float) -> float:
    """Approximate directional derivative of the merit function along d."""
    d = np.asarray(d, dtype=float)
    pen = evaluate_phi(problem, x)
    gf = problem.eval_grad_f(x)
    return float(gf[j] @ d + sigma * phi_star(problem, x, d, pen))
