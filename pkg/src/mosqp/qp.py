"""Direction-finding sub-problem: min t + 0.5 d'd with linearized bounds on t.

The sub-problem is always feasible ((t, d) = (Phi(x), 0) satisfies every
constraint) and strictly convex in d, so it is solved through its dual:
minimize 0.5 ||G'w||^2 - c'w over the unit simplex in w = (lambda, mu),
where G stacks the objective and constraint gradients and c = (0, g).
The primal is recovered as d = -G'w, t = max row left-hand side.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

Array = np.ndarray

KKT_TOL = 1e-8


class MaxQpIterations(RuntimeError):
    """The inner simplex active-set loop stalled; signals numerical breakdown."""


@dataclass(frozen=True)
class QpInstance:
    grad_f: Array  # (m, n)
    grad_g: Array  # (p, n)
    g_vals: Array  # (p,)
    phi: float

    @property
    def m(self) -> int:
        return self.grad_f.shape[0]

    @property
    def p(self) -> int:
        return self.g_vals.shape[0]

    @property
    def n(self) -> int:
        return self.grad_f.shape[1]


@dataclass(frozen=True)
class QpSolution:
    t: float
    d: Array
    lam: Array
    mu: Array
    kkt_residual: float


@dataclass(frozen=True)
class KktCertificate:
    stationarity: float
    normalization: float
    nonnegativity: float
    complementarity: float
    primal_feasibility: float
    passed: bool

    @property
    def max_residual(self) -> float:
        return max(self.stationarity, self.normalization, self.nonnegativity,
                   self.complementarity, self.primal_feasibility)


def _eq_solve(M: Array, c: Array, support: Array) -> tuple:
    """Minimize the dual objective over the support with sum(w) = 1 free-sign.

    Stationarity: M_SS w - c_S - nu * 1 = 0, 1'w = 1.
    """
    k = support.shape[0]
    A = np.empty((k + 1, k + 1))
    A[:k, :k] = M[support[:, None], support]
    A[:k, k] = -1.0
    A[k, :k] = 1.0
    A[k, k] = 0.0
    b = np.empty(k + 1)
    b[:k] = c[support]
    b[k] = 1.0
    try:
        sol = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(A, b, rcond=None)[0]
    if not np.isfinite(sol).all() or np.abs(A @ sol - b).max() > 1e-9 * (1.0 + np.abs(b).max()):
        # singular working set (duplicate gradients); nudge toward strict convexity
        A[:k, :k] += 1e-12 * (1.0 + np.trace(M[np.ix_(support, support)])) * np.eye(k)
        sol = np.linalg.lstsq(A, b, rcond=None)[0]
    return sol[:k], float(sol[k])


def _simplex_qp(M: Array, c: Array, max_iters: int, support0=None) -> tuple:
    """Primal active-set loop for min 0.5 w'Mw - c'w on the unit simplex.

    support0 warm-starts the working set (e.g. from the previous iterate's
    multipliers); correctness does not depend on it.
    """
    q = M.shape[0]
    scale = 1.0 + max(np.abs(M).max(initial=0.0), np.abs(c).max(initial=0.0))
    if support0 is not None and len(support0) > 0:
        support = np.unique(np.asarray(support0, dtype=int))
        w = np.zeros(q)
        w[support] = 1.0 / support.shape[0]
    else:
        vertex_vals = 0.5 * np.diag(M) - c
        j0 = int(np.argmin(vertex_vals))
        w = np.zeros(q)
        w[j0] = 1.0
        support = np.array([j0])
    for _ in range(max_iters):
        w_s, nu = _eq_solve(M, c, support)
        if np.all(w_s >= -1e-12):
            w = np.zeros(q)
            np.maximum(w_s, 0.0, out=w_s)
            w[support] = w_s
            s = M @ w - c - nu
            s[support] = 0.0
            j_min = int(np.argmin(s))
            if s[j_min] >= -1e-10 * scale:
                return w, nu
            support = np.sort(np.append(support, j_min))
        else:
            cur = w[support]
            delta = w_s - cur
            blocking = np.flatnonzero(w_s < -1e-12)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = cur[blocking] / (cur[blocking] - w_s[blocking])
            k_blk = int(blocking[np.argmin(ratios)])
            alpha = max(0.0, float(np.min(ratios)))
            new = cur + alpha * delta
            new[k_blk] = 0.0
            w = np.zeros(q)
            w[support] = np.maximum(new, 0.0)
            support = np.delete(support, k_blk)
            if support.shape[0] == 0:  # cannot happen for alpha<1 steps, but stay safe
                support = np.array([int(np.argmax(w)) if w.max() > 0 else k_blk])
    raise MaxQpIterations(f"simplex QP did not converge within {max_iters} iterations")


def solve_qp(instance: QpInstance, tol: float = KKT_TOL, max_iters: int = None,
             support0=None) -> QpSolution:
    """Solve the direction-finding sub-problem and attach its KKT residual.

    support0 optionally warm-starts the active set with multiplier indices
    from a nearby instance (e.g. the previous outer iteration).
    """
    m, p, n = instance.m, instance.p, instance.n
    G = np.vstack([instance.grad_f.reshape(m, n), instance.grad_g.reshape(p, n)])
    if not np.isfinite(G).all() or not np.isfinite(instance.g_vals).all():
        raise ValueError("QP instance contains non-finite entries")
    c = np.concatenate([np.zeros(m), instance.g_vals])
    # unconditional feasibility of (t, d) = (Phi, 0)
    assert instance.phi >= 0.0 and instance.g_vals.max(initial=0.0) <= instance.phi + 1e-12

    if not np.any(G) and np.all(instance.g_vals <= 0.0):
        # degenerate instance: all gradients zero at a feasible point
        return QpSolution(t=0.0, d=np.zeros(n), lam=np.full(m, 1.0 / m),
                          mu=np.zeros(p), kkt_residual=0.0)

    if max_iters is None:
        max_iters = 500 * (m + p)
    M = G @ G.T
    w, _nu = _simplex_qp(M, c, max_iters, support0=support0)
    d = -(G.T @ w)
    t = float((G @ d + c).max())
    sol = QpSolution(t=t, d=d, lam=w[:m], mu=w[m:], kkt_residual=0.0)
    cert = certify_kkt(instance, sol, tol)
    return replace(sol, kkt_residual=cert.max_residual)


def certify_kkt(instance: QpInstance, sol: QpSolution, tol: float = KKT_TOL) -> KktCertificate:
    """Per-group residuals for the sub-problem optimality conditions."""
    m, p, n = instance.m, instance.p, instance.n
    gf = instance.grad_f.reshape(m, n)
    gg = instance.grad_g.reshape(p, n)
    d, t = sol.d, sol.t
    lam, mu = sol.lam, sol.mu

    stat = float(np.abs(d + gf.T @ lam + gg.T @ mu).max(initial=0.0))
    norm = abs(1.0 - lam.sum() - mu.sum())
    nonneg = float(max(0.0, -lam.min(initial=0.0), -mu.min(initial=0.0)))
    slack_f = gf @ d - t
    slack_g = instance.g_vals + gg @ d - t
    comp = float(max(np.abs(lam * slack_f).max(initial=0.0),
                     np.abs(mu * slack_g).max(initial=0.0)))
    feas = float(max(0.0, slack_f.max(initial=0.0), slack_g.max(initial=0.0)))
    cert = KktCertificate(stationarity=stat, normalization=norm, nonnegativity=nonneg,
                          complementarity=comp, primal_feasibility=feas, passed=False)
    return replace(cert, passed=cert.max_residual <= tol)
