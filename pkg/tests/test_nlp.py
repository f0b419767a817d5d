"""Augmented-Lagrangian outer loop on analytically solvable toy problems."""

import numpy as np
import pytest
from scipy import optimize

from cruiseopt.nlp import FAILURE_PENALTY, solve_augmented_lagrangian


def nm_inner(model, z0):
    res = optimize.minimize(model, z0, method="Nelder-Mead",
                            options={"maxfev": 400, "xatol": 1e-12,
                                     "fatol": 1e-12})
    return res.x, res.nfev


def quadratic_with_sum_constraint(z):
    # min (z0 - 1)^2 + z1^2  s.t.  z0 + z1 = 2; optimum at (1.5, 0.5)
    j = (z[0] - 1.0) ** 2 + z[1] ** 2
    return j, np.array([z[0] + z[1] - 2.0])


def test_converges_to_kkt_point():
    res = solve_augmented_lagrangian(
        quadratic_with_sum_constraint, np.array([0.0, 0.0]), 1, nm_inner,
        feas_tol=1e-8, max_outer=20, rho0=1.0)
    assert res.converged
    assert res.z == pytest.approx([1.5, 0.5], abs=1e-5)
    # the converged multiplier equals the analytic Lagrange multiplier -1
    assert res.nu[0] == pytest.approx(-1.0, abs=1e-3)
    assert np.max(np.abs(res.resid)) <= 1e-8


def test_multiplier_warm_start_reuses_progress():
    cold = solve_augmented_lagrangian(
        quadratic_with_sum_constraint, np.array([0.0, 0.0]), 1, nm_inner,
        feas_tol=1e-10, max_outer=30, rho0=1.0)
    warm = solve_augmented_lagrangian(
        quadratic_with_sum_constraint, cold.z, 1, nm_inner,
        feas_tol=1e-10, max_outer=30, rho0=cold.rho, nu0=cold.nu)
    assert warm.converged
    assert warm.n_outer <= cold.n_outer


def test_history_records_every_outer_iteration():
    res = solve_augmented_lagrangian(
        quadratic_with_sum_constraint, np.array([5.0, -5.0]), 1, nm_inner,
        feas_tol=1e-8, max_outer=15, rho0=0.1)
    assert len(res.history) == res.n_outer
    assert all({"outer", "cost", "feas", "rho"} <= set(h) for h in res.history)


def test_failing_evaluation_reports_divergence():
    def always_fails(z):
        return None

    res = solve_augmented_lagrangian(
        always_fails, np.array([0.0]), 1, nm_inner, max_outer=3)
    assert not res.converged
    assert not np.isfinite(res.cost)


def test_penalty_wall_respected():
    # the inner model must see the failure penalty, not an exception
    def partial(z):
        if z[0] < 0.0:
            return None
        return (z[0] - 2.0) ** 2, np.array([z[0] - 1.0])

    res = solve_augmented_lagrangian(
        partial, np.array([3.0]), 1, nm_inner, feas_tol=1e-8, max_outer=20,
        rho0=1.0)
    assert res.converged
    assert res.z[0] == pytest.approx(1.0, abs=1e-5)
    assert res.cost < FAILURE_PENALTY
