"""Front-quality metrics: purity, largest-gap and gap-uniformity spreads,
performance profiles, and average evaluation cost per non-dominated point."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .fronts import Front
from .problems import EvalCounter

Array = np.ndarray

MEMBERSHIP_TOL = 1e-8


class MetricUndefined(ValueError):
    """The metric has no value on this input (empty reference, N too small, ...)."""


@dataclass(frozen=True)
class MetricReport:
    problem: str
    solver: str
    purity: float          # >= 1, or inf when the solver contributes nothing
    gamma: float
    delta: Optional[float]  # None when undefined (front too small)
    fe1: Optional[float]
    n_points: int = 0


@dataclass(frozen=True)
class ProfileCurve:
    solver: str
    samples: List[tuple]  # (tau, rho(tau)), non-decreasing in tau


def front_extremes(fronts: Sequence[Front]) -> Array:
    """Per-objective (min, max) over all points of all supplied fronts, shape (m, 2)."""
    mats = [fr.objective_matrix() for fr in fronts if fr.points]
    if not mats:
        raise MetricUndefined("no points to take extremes over")
    allf = np.vstack(mats)
    return np.column_stack([allf.min(axis=0), allf.max(axis=0)])


def purity(front: Front, reference: Front, tol: float = MEMBERSHIP_TOL) -> float:
    """|reference| / |front intersect reference|; inf when the intersection is empty.

    Smaller is better; 1 means the front contains the whole reference front.
    """
    if not reference.points:
        raise MetricUndefined("empty reference front")
    ref = reference.objective_matrix()
    hits = 0
    for pt in front.points:
        if float(np.abs(ref - pt.f).max(axis=1).min()) <= tol:
            hits += 1
    if hits == 0:
        return math.inf
    return len(reference.points) / hits


def gamma_spread(front: Front, extremes: Array) -> float:
    """Largest consecutive gap per objective (extremes prepended/appended), max over j."""
    if not front.points:
        raise MetricUndefined("empty front")
    F = front.objective_matrix()
    worst = -math.inf
    for j in range(F.shape[1]):
        vals = np.sort(F[:, j])
        seq = np.concatenate([[extremes[j, 0]], vals, [extremes[j, 1]]])
        worst = max(worst, float(np.diff(seq).max()))
    return worst


def delta_spread(front: Front, extremes: Array) -> float:
    """Gap-uniformity measure per objective, max over objectives.

    Needs at least two front points; a fully degenerate objective (all gaps
    zero including the extremes) contributes 0.
    """
    if len(front.points) < 2:
        raise MetricUndefined("spread uniformity needs at least 2 points")
    F = front.objective_matrix()
    n_pts = F.shape[0]
    worst = -math.inf
    for j in range(F.shape[1]):
        vals = np.sort(F[:, j])
        d0 = vals[0] - extremes[j, 0]
        dN = extremes[j, 1] - vals[-1]
        inner = np.diff(vals)  # N-1 gaps
        dbar = float(inner.mean())
        denom = d0 + dN + (n_pts - 1) * dbar
        if denom == 0.0:
            value = 0.0
        else:
            value = float((d0 + dN + np.abs(inner - dbar).sum()) / denom)
        worst = max(worst, value)
    return worst


def performance_profile(solvers: Sequence[str], scores: Array) -> List[ProfileCurve]:
    """Cumulative ratio-to-best curves from a (problems x solvers) score matrix.

    Infinite scores give infinite ratios and never enter the curve; problems
    where every solver scores infinite are dropped from the denominator.
    """
    scores = np.asarray(scores, dtype=float)
    rows = []
    for row in scores:
        finite = row[np.isfinite(row)]
        if finite.size == 0:
            warnings.warn("problem with all-infinite scores excluded from profile")
            continue
        rows.append(row)
    if not rows:
        raise MetricUndefined("no problems with a finite score")
    S = np.array(rows)
    best = np.min(np.where(np.isfinite(S), S, math.inf), axis=1)
    with np.errstate(invalid="ignore"):
        ratios = S / best[:, None]
    n_prob = S.shape[0]
    finite_ratios = ratios[np.isfinite(ratios)]
    taus = sorted(set([1.0] + [float(v) for v in finite_ratios]))
    curves = []
    for s, name in enumerate(solvers):
        samples = [(tau, float(np.sum(ratios[:, s] <= tau)) / n_prob) for tau in taus]
        curves.append(ProfileCurve(solver=name, samples=samples))
    return curves


def fe1(evals: EvalCounter, n: int, n1: int) -> float:
    """Average evaluation cost (#f + n #grad f) per non-dominated point."""
    if n1 < 1:
        raise MetricUndefined("no non-dominated points")
    return (evals.num_f + n * evals.num_grad_f) / n1
