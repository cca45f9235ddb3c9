import math

import numpy as np
import pytest

from mosqp.fronts import Front, FrontPoint
from mosqp.metrics import (
    MetricUndefined,
    delta_spread,
    fe1,
    front_extremes,
    gamma_spread,
    performance_profile,
    purity,
)
from mosqp.problems import EvalCounter


def front_of(fvals, tag=""):
    pts = [FrontPoint(x=np.asarray(v, dtype=float), f=np.asarray(v, dtype=float),
                      phi=0.0, feasible=True, status="StronglyCritical",
                      run_id=0, start_id=i)
           for i, v in enumerate(fvals)]
    return Front(points=pts, solver_tag=tag)


def test_purity_hand_example():
    # reference has 3 points, solver contributes 2 -> 1.5
    ref = front_of([[1, 2], [1.5, 1.5], [2, 1]])
    mine = front_of([[1, 2], [2, 1], [3, 3]])
    assert purity(mine, ref) == pytest.approx(1.5)


def test_purity_full_and_empty_contribution():
    ref = front_of([[1, 2], [2, 1]])
    assert purity(ref, ref) == 1.0
    assert purity(front_of([[5, 5]]), ref) == math.inf
    with pytest.raises(MetricUndefined):
        purity(ref, front_of([]))


def test_purity_order_invariant():
    ref = front_of([[1, 2], [1.5, 1.5], [2, 1]])
    mine = front_of([[2, 1], [3, 3], [1, 2]])
    assert purity(mine, ref) == pytest.approx(1.5)


def test_extremes():
    a = front_of([[1, 5], [2, 4]])
    b = front_of([[0, 6]])
    ext = front_extremes([a, b])
    np.testing.assert_allclose(ext, [[0, 2], [4, 6]])
    with pytest.raises(MetricUndefined):
        front_extremes([front_of([])])


def one_objective_front(vals):
    pts = [FrontPoint(x=np.array([float(v)]), f=np.array([float(v)]), phi=0.0,
                      feasible=True, status="s", run_id=0, start_id=i)
           for i, v in enumerate(vals)]
    return Front(points=pts)


def test_gamma_hand_example():
    # values {1} with extremes (0, 3): gaps 1 and 2 -> 2
    ext = np.array([[0.0, 3.0]])
    assert gamma_spread(one_objective_front([1.0]), ext) == pytest.approx(2.0)


def test_gamma_uniform_spacing():
    ext = np.array([[0.0, 4.0]])
    assert gamma_spread(one_objective_front([1.0, 2.0, 3.0, 0.0, 4.0]), ext) \
        == pytest.approx(1.0)


def test_gamma_two_objectives_outer_max():
    front = front_of([[0.0, 0.0], [1.0, 3.0]])
    ext = np.array([[0.0, 1.0], [0.0, 3.0]])
    assert gamma_spread(front, ext) == pytest.approx(3.0)
    with pytest.raises(MetricUndefined):
        gamma_spread(front_of([]), ext)


def test_delta_hand_example():
    # interior {1, 2} with extremes (0, 4): (1 + 2 + 0) / (1 + 2 + 1) = 0.75
    ext = np.array([[0.0, 4.0]])
    assert delta_spread(one_objective_front([1.0, 2.0]), ext) == pytest.approx(0.75)


def test_delta_uniform_interior():
    # delta0 = deltaN = dbar -> 2 / (N + 1)
    n_pts = 5
    vals = np.arange(1, n_pts + 1, dtype=float)
    ext = np.array([[0.0, float(n_pts + 1)]])
    assert delta_spread(one_objective_front(vals), ext) \
        == pytest.approx(2.0 / (n_pts + 1))


def test_delta_two_objectives_outer_max():
    front = front_of([[1.0, 1.0], [2.0, 3.0]])
    ext = np.array([[0.0, 4.0], [0.0, 4.0]])
    v1 = delta_spread(one_objective_front([1.0, 2.0]), np.array([[0.0, 4.0]]))
    v2 = delta_spread(one_objective_front([1.0, 3.0]), np.array([[0.0, 4.0]]))
    assert delta_spread(front, ext) == pytest.approx(max(v1, v2))


def test_delta_needs_two_points():
    with pytest.raises(MetricUndefined):
        delta_spread(one_objective_front([1.0]), np.array([[0.0, 2.0]]))


def test_profile_hand_example():
    curves = performance_profile(["s1", "s2"], np.array([[1.0, 2.0], [4.0, 2.0]]))
    c1 = dict(curves[0].samples)
    assert c1[1.0] == pytest.approx(0.5)
    assert c1[2.0] == pytest.approx(1.0)
    c2 = dict(curves[1].samples)
    assert c2[1.0] == pytest.approx(0.5)
    assert c2[2.0] == pytest.approx(1.0)


def test_profile_dominant_solver():
    curves = performance_profile(["a", "b"], np.array([[1.0, 3.0], [2.0, 5.0]]))
    assert dict(curves[0].samples)[1.0] == 1.0


def test_profile_infinite_scores():
    # solver with all-infinite scores stays at rho = 0
    curves = performance_profile(["a", "b"],
                                 np.array([[1.0, math.inf], [2.0, math.inf]]))
    assert all(rho == 0.0 for _, rho in curves[1].samples)
    # a problem where everyone is infinite is excluded with a warning
    with pytest.warns(UserWarning):
        curves = performance_profile(
            ["a", "b"], np.array([[1.0, 2.0], [math.inf, math.inf]]))
    assert dict(curves[0].samples)[1.0] == 1.0
    with pytest.raises(MetricUndefined):
        performance_profile(["a"], np.array([[math.inf]]))


def test_profile_monotone():
    rng = np.random.default_rng(0)
    curves = performance_profile(["a", "b", "c"], rng.uniform(1, 9, size=(6, 3)))
    for curve in curves:
        rhos = [rho for _, rho in curve.samples]
        assert all(x <= y for x, y in zip(rhos, rhos[1:]))
        assert 0.0 <= rhos[0] and rhos[-1] <= 1.0


def test_fe1_hand_example():
    # (#f + n #grad f) / n1 = (300 + 2 * 100) / 50 = 10
    assert fe1(EvalCounter(num_f=300, num_grad_f=100), n=2, n1=50) == pytest.approx(10.0)
    assert fe1(EvalCounter(num_f=40, num_grad_f=0), n=3, n1=4) == pytest.approx(10.0)
    with pytest.raises(MetricUndefined):
        fe1(EvalCounter(num_f=1, num_grad_f=1), n=2, n1=0)
