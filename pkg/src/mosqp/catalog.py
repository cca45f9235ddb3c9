"""Benchmark problem catalog: analytic objectives, gradients, constraints, bounds.

Formulas follow the standard literature versions of each problem (Huband et
al.'s review for the bound-constrained set, Deb's constrained suite for the
rest); every transcription is guarded by finite-difference gradient checks
and, where an analytic efficient set is known, by front sampling checks in
validate_entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .fronts import FrontPoint, nondominated_filter
from .problems import FEASIBILITY_TOL, Problem, central_difference, evaluate_phi, make_problem

Array = np.ndarray


class CatalogValidationError(RuntimeError):
    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.problem_name = name


@dataclass(frozen=True)
class CatalogEntry:
    problem: Problem
    known_front: Optional[Callable[[int], Array]]  # count -> (count, n) efficient points
    source_note: str


def _bk1() -> CatalogEntry:
    def f(x):
        return np.array([x[0] ** 2 + x[1] ** 2,
                         (x[0] - 5.0) ** 2 + (x[1] - 5.0) ** 2])

    def gf(x):
        return np.array([[2 * x[0], 2 * x[1]],
                         [2 * (x[0] - 5.0), 2 * (x[1] - 5.0)]])

    prob = make_problem("BK1", 2, 2, f, lower=[-5, -5], upper=[10, 10], grad_f=gf)
    front = lambda c: np.linspace([0.0, 0.0], [5.0, 5.0], c)
    return CatalogEntry(prob, front, "Huband et al. review, BK1")


def _fonseca() -> CatalogEntry:
    def f(x):
        return np.array([1.0 - math.exp(-((x[0] - 1) ** 2 + (x[1] + 1) ** 2)),
                         1.0 - math.exp(-((x[0] + 1) ** 2 + (x[1] - 1) ** 2))])

    def gf(x):
        e1 = math.exp(-((x[0] - 1) ** 2 + (x[1] + 1) ** 2))
        e2 = math.exp(-((x[0] + 1) ** 2 + (x[1] - 1) ** 2))
        return np.array([[2 * (x[0] - 1) * e1, 2 * (x[1] + 1) * e1],
                         [2 * (x[0] + 1) * e2, 2 * (x[1] - 1) * e2]])

    prob = make_problem("Fonseca", 2, 2, f, lower=[-4, -4], upper=[4, 4], grad_f=gf)
    front = lambda c: np.linspace([1.0, -1.0], [-1.0, 1.0], c)
    return CatalogEntry(prob, front, "Fonseca & Fleming two-Gaussian example")


def _mop2() -> CatalogEntry:
    a = 1.0 / math.sqrt(2.0)

    def f(x):
        return np.array([1.0 - math.exp(-np.sum((x - a) ** 2)),
                         1.0 - math.exp(-np.sum((x + a) ** 2))])

    def gf(x):
        e1 = math.exp(-np.sum((x - a) ** 2))
        e2 = math.exp(-np.sum((x + a) ** 2))
        return np.vstack([2 * (x - a) * e1, 2 * (x + a) * e2])

    prob = make_problem("MOP2", 2, 2, f, lower=[-4, -4], upper=[4, 4], grad_f=gf)
    front = lambda c: np.linspace([-a, -a], [a, a], c)
    return CatalogEntry(prob, front, "Van Veldhuizen MOP2 (Fonseca type), n = 2")


def _mop3() -> CatalogEntry:
    A1 = 0.5 * math.sin(1) - 2 * math.cos(1) + math.sin(2) - 1.5 * math.cos(2)
    A2 = 1.5 * math.sin(1) - math.cos(1) + 2 * math.sin(2) - 0.5 * math.cos(2)

    def f(x):
        B1 = 0.5 * math.sin(x[0]) - 2 * math.cos(x[0]) + math.sin(x[1]) - 1.5 * math.cos(x[1])
        B2 = 1.5 * math.sin(x[0]) - math.cos(x[0]) + 2 * math.sin(x[1]) - 0.5 * math.cos(x[1])
        return np.array([1.0 + (A1 - B1) ** 2 + (A2 - B2) ** 2,
                         (x[0] + 3.0) ** 2 + (x[1] + 1.0) ** 2])

    def gf(x):
        B1 = 0.5 * math.sin(x[0]) - 2 * math.cos(x[0]) + math.sin(x[1]) - 1.5 * math.cos(x[1])
        B2 = 1.5 * math.sin(x[0]) - math.cos(x[0]) + 2 * math.sin(x[1]) - 0.5 * math.cos(x[1])
        dB1 = np.array([0.5 * math.cos(x[0]) + 2 * math.sin(x[0]),
                        math.cos(x[1]) + 1.5 * math.sin(x[1])])
        dB2 = np.array([1.5 * math.cos(x[0]) + math.sin(x[0]),
                        2 * math.cos(x[1]) + 0.5 * math.sin(x[1])])
        g1 = -2 * (A1 - B1) * dB1 - 2 * (A2 - B2) * dB2
        g2 = np.array([2 * (x[0] + 3.0), 2 * (x[1] + 1.0)])
        return np.vstack([g1, g2])

    prob = make_problem("MOP3", 2, 2, f, lower=[-math.pi, -math.pi],
                        upper=[math.pi, math.pi], grad_f=gf)
    return CatalogEntry(prob, None, "Poloni's problem, minimization form (MOP3)")


def _sp1() -> CatalogEntry:
    def f(x):
        return np.array([(x[0] - 1.0) ** 2 + (x[0] - x[1]) ** 2,
                         (x[1] - 3.0) ** 2 + (x[0] - x[1]) ** 2])

    def gf(x):
        c = 2 * (x[0] - x[1])
        return np.array([[2 * (x[0] - 1.0) + c, -c],
                         [c, 2 * (x[1] - 3.0) - c]])

    prob = make_problem("SP1", 2, 2, f, lower=[-1, -1], upper=[5, 5], grad_f=gf)
    return CatalogEntry(prob, None, "Huband et al. review, SP1")


def _ssfyy1() -> CatalogEntry:
    def f(x):
        return np.array([x[0] ** 2 + x[1] ** 2,
                         (x[0] - 1.0) ** 2 + (x[1] - 2.0) ** 2])

    def gf(x):
        return np.array([[2 * x[0], 2 * x[1]],
                         [2 * (x[0] - 1.0), 2 * (x[1] - 2.0)]])

    prob = make_problem("SSFYY1", 2, 2, f, lower=[-100, -100], upper=[100, 100], grad_f=gf)
    front = lambda c: np.linspace([0.0, 0.0], [1.0, 2.0], c)
    return CatalogEntry(prob, front, "Huband et al. review, SSFYY1")


def _lrs1() -> CatalogEntry:
    def f(x):
        return np.array([x[0] ** 2 + x[1] ** 2,
                         (x[0] + 2.0) ** 2 + x[1] ** 2])

    def gf(x):
        return np.array([[2 * x[0], 2 * x[1]],
                         [2 * (x[0] + 2.0), 2 * x[1]]])

    prob = make_problem("LRS1", 2, 2, f, lower=[-50, -50], upper=[50, 50], grad_f=gf)
    front = lambda c: np.linspace([0.0, 0.0], [-2.0, 0.0], c)
    return CatalogEntry(prob, front, "Huband et al. review, LRS1")


def _dtlz2n2() -> CatalogEntry:
    def f(x):
        g = (x[1] - 0.5) ** 2
        a = math.pi * x[0] / 2.0
        return np.array([(1.0 + g) * math.cos(a), (1.0 + g) * math.sin(a)])

    def gf(x):
        g = (x[1] - 0.5) ** 2
        a = math.pi * x[0] / 2.0
        dg = 2 * (x[1] - 0.5)
        return np.array([[-(1.0 + g) * (math.pi / 2) * math.sin(a), dg * math.cos(a)],
                         [(1.0 + g) * (math.pi / 2) * math.cos(a), dg * math.sin(a)]])

    prob = make_problem("DTLZ2n2", 2, 2, f, lower=[0, 0], upper=[1, 1], grad_f=gf)

    def front(c):
        t = np.linspace(0.0, 1.0, c)
        return np.column_stack([t, np.full(c, 0.5)])

    return CatalogEntry(prob, front, "DTLZ2 with n = 2, m = 2")


def _bnh() -> CatalogEntry:
    def f(x):
        return np.array([4 * x[0] ** 2 + 4 * x[1] ** 2,
                         (x[0] - 5.0) ** 2 + (x[1] - 5.0) ** 2])

    def gf(x):
        return np.array([[8 * x[0], 8 * x[1]],
                         [2 * (x[0] - 5.0), 2 * (x[1] - 5.0)]])

    def g(x):
        return np.array([(x[0] - 5.0) ** 2 + x[1] ** 2 - 25.0,
                         7.7 - (x[0] - 8.0) ** 2 - (x[1] + 3.0) ** 2])

    def gg(x):
        return np.array([[2 * (x[0] - 5.0), 2 * x[1]],
                         [-2 * (x[0] - 8.0), -2 * (x[1] + 3.0)]])

    prob = make_problem("BNH", 2, 2, f, lower=[0, 0], upper=[5, 3], grad_f=gf,
                        g_extra=g, grad_g_extra=gg, p_extra=2)

    def front(c):
        c1 = c // 2
        seg1 = np.linspace([0.0, 0.0], [3.0, 3.0], c1)               # x1 = x2 in [0, 3]
        seg2 = np.linspace([3.0, 3.0], [5.0, 3.0], c - c1 + 1)[1:]   # x2 = 3, x1 in (3, 5]
        return np.vstack([seg1, seg2])

    return CatalogEntry(prob, front, "Binh & Korn (BNH), Deb's constrained suite")


def _srn() -> CatalogEntry:
    def f(x):
        return np.array([2.0 + (x[0] - 2.0) ** 2 + (x[1] - 1.0) ** 2,
                         9 * x[0] - (x[1] - 1.0) ** 2])

    def gf(x):
        return np.array([[2 * (x[0] - 2.0), 2 * (x[1] - 1.0)],
                         [9.0, -2 * (x[1] - 1.0)]])

    def g(x):
        return np.array([x[0] ** 2 + x[1] ** 2 - 225.0,
                         x[0] - 3 * x[1] + 10.0])

    def gg(x):
        return np.array([[2 * x[0], 2 * x[1]],
                         [1.0, -3.0]])

    prob = make_problem("SRN", 2, 2, f, lower=[-20, -20], upper=[20, 20], grad_f=gf,
                        g_extra=g, grad_g_extra=gg, p_extra=2)
    return CatalogEntry(prob, None, "Srinivas & Deb (SRN)")


def _tnk() -> CatalogEntry:
    def f(x):
        return np.array([x[0], x[1]])

    def gf(x):
        return np.array([[1.0, 0.0], [0.0, 1.0]])

    def g(x):
        a = math.atan2(x[0], x[1])
        return np.array([1.0 + 0.1 * math.cos(16.0 * a) - x[0] ** 2 - x[1] ** 2,
                         (x[0] - 0.5) ** 2 + (x[1] - 0.5) ** 2 - 0.5])

    def gg(x):
        r2 = max(x[0] ** 2 + x[1] ** 2, 1e-12)
        a = math.atan2(x[0], x[1])
        s = -1.6 * math.sin(16.0 * a)
        return np.array([[s * (x[1] / r2) - 2 * x[0], s * (-x[0] / r2) - 2 * x[1]],
                         [2 * (x[0] - 0.5), 2 * (x[1] - 0.5)]])

    prob = make_problem("TNK", 2, 2, f, lower=[0, 0], upper=[math.pi, math.pi],
                        grad_f=gf, g_extra=g, grad_g_extra=gg, p_extra=2)
    return CatalogEntry(prob, None, "Tanaka et al. (TNK)")


def _osy() -> CatalogEntry:
    def f(x):
        f1 = -(25 * (x[0] - 2) ** 2 + (x[1] - 2) ** 2 + (x[2] - 1) ** 2
               + (x[3] - 4) ** 2 + (x[4] - 1) ** 2)
        return np.array([f1, float(np.sum(x ** 2))])

    def gf(x):
        g1 = -np.array([50 * (x[0] - 2), 2 * (x[1] - 2), 2 * (x[2] - 1),
                        2 * (x[3] - 4), 2 * (x[4] - 1), 0.0])
        return np.vstack([g1, 2 * x])

    def g(x):
        return np.array([
            2.0 - x[0] - x[1],            # linear
            x[0] + x[1] - 6.0,            # linear
            x[1] - x[0] - 2.0,            # linear
            x[0] - 3 * x[1] - 2.0,        # linear
            (x[2] - 3.0) ** 2 + x[3] - 4.0,       # nonlinear
            4.0 - (x[4] - 3.0) ** 2 - x[5],       # nonlinear
        ])

    def gg(x):
        return np.array([
            [-1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            [-1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, -3.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 2 * (x[2] - 3.0), 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, -2 * (x[4] - 3.0), -1.0],
        ])

    prob = make_problem("OSY", 6, 2, f, lower=[0, 0, 1, 0, 1, 0],
                        upper=[10, 10, 5, 6, 5, 10], grad_f=gf,
                        g_extra=g, grad_g_extra=gg, p_extra=6)
    return CatalogEntry(prob, None, "Osyczka & Kundu (OSY)")


_BUILDERS = {
    "BK1": _bk1,
    "Fonseca": _fonseca,
    "MOP2": _mop2,
    "MOP3": _mop3,
    "SP1": _sp1,
    "SSFYY1": _ssfyy1,
    "LRS1": _lrs1,
    "DTLZ2n2": _dtlz2n2,
    "BNH": _bnh,
    "SRN": _srn,
    "TNK": _tnk,
    "OSY": _osy,
}


def catalog() -> List[CatalogEntry]:
    return [builder() for builder in _BUILDERS.values()]


def problem_names() -> List[str]:
    return list(_BUILDERS)


def get_entry(name: str) -> CatalogEntry:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(_BUILDERS)}") from None


def get_problem(name: str) -> Problem:
    return get_entry(name).problem


def validate_entry(entry: CatalogEntry, n_points: int = 20, rel_tol: float = 1e-3,
                   seed: int = 0, front_samples: int = 30) -> None:
    """Check analytic gradients against central differences at random interior
    points and, when an efficient set is known, that its samples are feasible
    and mutually non-dominated.  Raises CatalogValidationError on failure."""
    prob = entry.problem
    rng = np.random.default_rng(seed)
    span = prob.upper - prob.lower
    for _ in range(n_points):
        x = prob.lower + (0.05 + 0.9 * rng.random(prob.n)) * span
        for label, fun, grad in (("objective", prob.f, prob.grad_f),
                                 ("constraint", prob.g, prob.grad_g)):
            analytic = np.asarray(grad(x), dtype=float)
            fd = central_difference(fun, x)
            scale = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(fd)))
            err = float((np.abs(analytic - fd) / scale).max())
            if err > rel_tol:
                raise CatalogValidationError(
                    prob.name, f"{label} gradient mismatch {err:.2e} at x={x}")
    if entry.known_front is not None:
        xs = entry.known_front(front_samples)
        pts = []
        for i, x in enumerate(xs):
            phi = evaluate_phi(prob, np.asarray(x, dtype=float)).phi
            if phi > FEASIBILITY_TOL:
                raise CatalogValidationError(prob.name, f"known-front point {x} infeasible")
            pts.append(FrontPoint(x=np.asarray(x, dtype=float), f=prob.eval_f(np.asarray(x, dtype=float)),
                                  phi=phi, feasible=True, status="known", run_id=0, start_id=i))
        kept = nondominated_filter(pts)
        if len(kept.points) != len(pts):
            raise CatalogValidationError(prob.name, "known-front samples are not mutually non-dominated")
