import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cvxhallu.cg import CgConfig
from cvxhallu.linops import DegradationModel, apply_A, apply_At
from cvxhallu.oracle import dense_problem
from cvxhallu.prox import DualVars, PrimalVars, project_unit_ball, prox_fstar, prox_g, shrink


def _p(vx, vy):
    return np.array([[[vx]], [[vy]]], dtype=np.float64)


def test_ball_projection_interior_unchanged():
    np.testing.assert_array_equal(project_unit_ball(_p(0.3, 0.4)), _p(0.3, 0.4))


def test_ball_projection_radial():
    np.testing.assert_allclose(project_unit_ball(_p(3.0, 4.0)), _p(0.6, 0.8), atol=1e-15)


def test_fstar_r_update():
    # prox of sigma * <Hg, r> moves r against Hg
    y = DualVars(np.zeros((2, 1, 1)), np.zeros((1, 1, 1)))
    out = prox_fstar(y, 2.0, np.full((1, 1, 1), 0.25))
    assert out.r[0, 0, 0] == -0.5


def test_fstar_projection_idempotent_and_bounded(rng):
    p = 5 * rng.standard_normal((2, 9, 9))
    y = DualVars(p, rng.standard_normal((2, 9, 9)))
    hg = rng.standard_normal((2, 9, 9))
    once = prox_fstar(y, 0.3, hg)
    np.testing.assert_array_equal(project_unit_ball(once.p), once.p)
    assert np.sqrt(once.p[0] ** 2 + once.p[1] ** 2).max() <= 1 + 1e-12


def test_shrink_cases():
    assert shrink(np.array([0.5]), 0.2)[0] == pytest.approx(0.3)
    assert shrink(np.array([-0.1]), 0.2)[0] == 0.0
    assert shrink(np.array([-0.5]), 0.2)[0] == pytest.approx(-0.3)
    assert shrink(np.array([0.2]), 0.2)[0] == 0.0


@settings(max_examples=60, deadline=None)
@given(
    a=arrays(np.float64, 16, elements=st.floats(-10, 10)),
    b=arrays(np.float64, 16, elements=st.floats(-10, 10)),
    t=st.floats(0, 5),
)
def test_shrink_odd_and_nonexpansive(a, b, t):
    np.testing.assert_array_equal(shrink(-a, t), -shrink(a, t))
    assert np.all(np.abs(shrink(a, t) - shrink(b, t)) <= np.abs(a - b) + 1e-12)


def test_prox_g_shrinks_w_at_tau_gamma(rng):
    m = DegradationModel.for_hr(2, (4, 4))
    x = PrimalVars(np.zeros((4, 4)), np.full((1, 4, 4), 0.5))
    x.w[0, 0, 0] = -0.1
    out, _ = prox_g(x, 0.1, 1.0, 2.0, np.zeros((2, 2)), m, CgConfig(), np.zeros((4, 4)))
    assert out.w[0, 1, 1] == pytest.approx(0.3)
    assert out.w[0, 0, 0] == 0.0


def test_prox_g_zero_lambda_is_identity(rng):
    m = DegradationModel.for_hr(4, (8, 8))
    ut = rng.standard_normal((8, 8))
    x = PrimalVars(ut, np.zeros((2, 8, 8)))
    out, rep = prox_g(x, 0.5, 0.0, 1.0, rng.standard_normal((2, 2)), m, CgConfig(), ut)
    np.testing.assert_array_equal(out.u, ut)
    assert rep.iterations_used == 0


@pytest.mark.parametrize("seed", range(3))
def test_prox_g_u_matches_dense_solve(seed):
    rng = np.random.default_rng(seed)
    m = DegradationModel.for_hr(4, (8, 8))
    lam, tau = 7.0, 0.3
    ut = rng.uniform(size=(8, 8))
    f = rng.uniform(size=(2, 2))
    x = PrimalVars(ut, np.zeros((1, 8, 8)))
    out, rep = prox_g(x, tau, lam, 1.0, f, m, CgConfig(100, 1e-14), np.zeros((8, 8)))

    a = dense_problem(f, [], m, lam, 1.0).a
    c = 2 * lam * tau
    direct = np.linalg.solve(np.eye(64) + c * a.T @ a, ut.ravel() + c * a.T @ f.ravel())
    assert np.max(np.abs(out.u.ravel() - direct)) <= 1e-8


def test_prox_g_optimality_residual(rng):
    m = DegradationModel.for_hr(4, (16, 16))
    lam, tau, cfg = 5e4, 0.25, CgConfig(30, 1e-6)
    ut = rng.uniform(size=(16, 16))
    f = rng.uniform(size=(4, 4))
    out, _ = prox_g(PrimalVars(ut, np.zeros((1, 16, 16))), tau, lam, 1.0, f, m, cfg, ut)
    c = 2 * lam * tau
    resid = out.u + c * apply_At(apply_A(out.u, m), m) - c * apply_At(f, m) - ut
    initial = ut + c * apply_At(apply_A(ut, m), m) - c * apply_At(f, m) - ut
    # CG tolerance is relative to the warm-start residual
    assert np.linalg.norm(resid) <= 10 * cfg.rel_tol * np.linalg.norm(initial)
