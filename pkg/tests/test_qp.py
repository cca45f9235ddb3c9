import numpy as np
import pytest

from mosqp.qp import (
    KKT_TOL,
    QpInstance,
    QpSolution,
    certify_kkt,
    solve_qp,
)


def random_instance(rng, n_max=2, m_max=3, p_max=3):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    p = int(rng.integers(0, p_max + 1))
    gf = rng.uniform(-5, 5, size=(m, n))
    gg = rng.uniform(-5, 5, size=(p, n))
    g = rng.uniform(-5, 5, size=p)
    phi = float(max(0.0, g.max(initial=0.0)))
    return QpInstance(grad_f=gf, grad_g=gg, g_vals=g, phi=phi)


def brute_force_objective(inst, span=6.0, step=1e-3):
    """Grid search over d for min t(d) + 0.5 d'd with t(d) the tight bound."""
    n = inst.n
    axes = [np.arange(-span, span + step, step) for _ in range(n)]
    if n == 1:
        D = axes[0].reshape(-1, 1)
    else:
        # coarser grid in 2-D to keep the oracle tractable
        axes = [np.arange(-span, span + 5e-3, 5e-3) for _ in range(n)]
        D = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    tf = (inst.grad_f @ D.T).max(axis=0)
    if inst.p:
        tg = (inst.g_vals[:, None] + inst.grad_g @ D.T).max(axis=0)
        t = np.maximum(tf, tg)
    else:
        t = tf
    vals = t + 0.5 * np.sum(D * D, axis=1)
    return float(vals.min())


def test_two_objective_hand_example():
    # f1 = x^2, f2 = (x-2)^2 at x = 3
    inst = QpInstance(grad_f=np.array([[6.0], [2.0]]),
                      grad_g=np.zeros((0, 1)), g_vals=np.zeros(0), phi=0.0)
    sol = solve_qp(inst)
    assert sol.t == pytest.approx(-4.0, abs=1e-8)
    assert sol.d[0] == pytest.approx(-2.0, abs=1e-8)
    np.testing.assert_allclose(sol.lam, [0.0, 1.0], atol=1e-8)


def test_constrained_hand_example():
    # f = x, g = x - 1 at x = 2
    inst = QpInstance(grad_f=np.array([[1.0]]), grad_g=np.array([[1.0]]),
                      g_vals=np.array([1.0]), phi=1.0)
    sol = solve_qp(inst)
    assert sol.t == pytest.approx(0.0, abs=1e-8)
    assert sol.d[0] == pytest.approx(-1.0, abs=1e-8)


def test_zero_direction_hand_example():
    # f1 = x^2, f2 = (x-2)^2 at x = 1: gradients (2, -2), optimum d = 0
    inst = QpInstance(grad_f=np.array([[2.0], [-2.0]]),
                      grad_g=np.zeros((0, 1)), g_vals=np.zeros(0), phi=0.0)
    sol = solve_qp(inst)
    assert sol.t == pytest.approx(0.0, abs=1e-8)
    assert sol.d[0] == pytest.approx(0.0, abs=1e-8)
    np.testing.assert_allclose(sol.lam, [0.5, 0.5], atol=1e-8)


def test_degenerate_all_zero_gradients():
    inst = QpInstance(grad_f=np.zeros((2, 3)), grad_g=np.zeros((1, 3)),
                      g_vals=np.array([-1.0]), phi=0.0)
    sol = solve_qp(inst)
    assert sol.t == 0.0
    np.testing.assert_allclose(sol.d, 0.0)
    np.testing.assert_allclose(sol.lam, 0.5)
    np.testing.assert_allclose(sol.mu, 0.0)


def test_nonfinite_instance_rejected():
    inst = QpInstance(grad_f=np.array([[np.inf]]), grad_g=np.zeros((0, 1)),
                      g_vals=np.zeros(0), phi=0.0)
    with pytest.raises(ValueError):
        solve_qp(inst)


def test_kkt_residual_small_on_random_instances():
    rng = np.random.default_rng(1)
    for _ in range(100):
        sol = solve_qp(random_instance(rng))
        assert sol.kkt_residual <= KKT_TOL


def test_lemma_bound_on_random_instances():
    # t <= Phi - 0.5 d'd on every solved instance
    rng = np.random.default_rng(2)
    for _ in range(100):
        inst = random_instance(rng)
        sol = solve_qp(inst)
        assert sol.t <= inst.phi - 0.5 * float(sol.d @ sol.d) + 1e-8


def test_brute_force_oracle_small_sample():
    rng = np.random.default_rng(3)
    for _ in range(10):
        inst = random_instance(rng, n_max=1)
        sol = solve_qp(inst)
        obj = sol.t + 0.5 * float(sol.d @ sol.d)
        assert abs(obj - brute_force_objective(inst)) < 1e-2
        assert obj <= inst.phi + 1e-10  # feasible-start bound


def test_uniqueness_under_constraint_shuffle():
    rng = np.random.default_rng(4)
    for _ in range(50):
        inst = random_instance(rng)
        if inst.p == 0:
            continue
        sol = solve_qp(inst)
        perm = rng.permutation(inst.p)
        shuffled = QpInstance(grad_f=inst.grad_f, grad_g=inst.grad_g[perm],
                              g_vals=inst.g_vals[perm], phi=inst.phi)
        sol2 = solve_qp(shuffled)
        assert abs(sol.t - sol2.t) < 1e-7
        assert float(np.abs(sol.d - sol2.d).max()) < 1e-7


def test_warm_start_matches_cold_start():
    rng = np.random.default_rng(5)
    for _ in range(50):
        inst = random_instance(rng)
        cold = solve_qp(inst)
        q = inst.m + inst.p
        sup = rng.choice(q, size=int(rng.integers(1, q + 1)), replace=False)
        warm = solve_qp(inst, support0=sup)
        assert abs(cold.t - warm.t) < 1e-7
        assert float(np.abs(cold.d - warm.d).max()) < 1e-7


def test_certify_passes_hand_solution():
    inst = QpInstance(grad_f=np.array([[6.0], [2.0]]),
                      grad_g=np.zeros((0, 1)), g_vals=np.zeros(0), phi=0.0)
    sol = QpSolution(t=-4.0, d=np.array([-2.0]), lam=np.array([0.0, 1.0]),
                     mu=np.zeros(0), kkt_residual=0.0)
    assert certify_kkt(inst, sol, tol=1e-8).passed


def test_certify_fails_perturbed_direction():
    inst = QpInstance(grad_f=np.array([[6.0], [2.0]]),
                      grad_g=np.zeros((0, 1)), g_vals=np.zeros(0), phi=0.0)
    sol = QpSolution(t=-4.0, d=np.array([-1.9]), lam=np.array([0.0, 1.0]),
                     mu=np.zeros(0), kkt_residual=0.0)
    cert = certify_kkt(inst, sol, tol=1e-8)
    assert not cert.passed
    assert cert.stationarity == pytest.approx(0.1, abs=1e-12)


def test_certify_fails_trivial_feasible_pair():
    # (t, d) = (Phi, 0) is feasible but not optimal when d* != 0
    inst = QpInstance(grad_f=np.array([[6.0], [2.0]]),
                      grad_g=np.zeros((0, 1)), g_vals=np.zeros(0), phi=0.0)
    sol = QpSolution(t=0.0, d=np.zeros(1), lam=np.array([0.5, 0.5]),
                     mu=np.zeros(0), kkt_residual=0.0)
    cert = certify_kkt(inst, sol, tol=1e-8)
    assert not cert.passed
    assert max(cert.stationarity, cert.complementarity) > 1e-8
