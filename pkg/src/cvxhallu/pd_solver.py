"""First-order primal-dual solver for TV + reconstruction + L1 hallucination.

Minimizes

    E(u) = sum_px |grad u|_2 + lam ||A u - f||^2 + gamma sum_i ||H (u - g_i)||_1

through the saddle point ``min_x max_y <K x, y> + G(x) - F*(y)`` with
``K = [grad, 0; H, -I; ...; H, -I]`` acting on ``x = (u, w_1..w_n)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cg import CgConfig
from .linops import (
    DegradationModel,
    GaussianKernel,
    apply_A,
    div,
    estimate_op_norm,
    grad,
    highpass,
    highpass_adjoint,
)
from .prox import DualVars, PrimalVars, prox_fstar, prox_g
from .resample import zoom_plane

__all__ = [
    "SolverConfig",
    "SolveDiagnostics",
    "StepSizeError",
    "energy",
    "apply_K",
    "apply_Kt",
    "operator_norm",
    "solve",
]

log = logging.getLogger(__name__)

STEP_MARGIN = 0.01


class StepSizeError(AssertionError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 5e4
    gamma: float = 20.0
    theta: float = 1.0
    max_outer_iters: int = 400
    rel_change_tol: float = 1e-5
    step_ratio: float = 30.0  # sigma / tau; duals live on a scale up to gamma
    power_iters: int = 200
    seed: int = 0
    cg: CgConfig = field(default_factory=CgConfig)

    def __post_init__(self):
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("lam and gamma must be non-negative")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.step_ratio <= 0:
            raise ValueError("step_ratio must be > 0")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")


@dataclass
class SolveDiagnostics:
    energy_trace: list[float] = field(default_factory=list)
    rel_change_trace: list[float] = field(default_factory=list)
    iterations_run: int = 0
    cg_total_iters: int = 0
    op_norm: float = float("nan")
    tau: float = float("nan")
    sigma: float = float("nan")

    @property
    def final_energy(self) -> float:
        return self.energy_trace[-1] if self.energy_trace else float("nan")


def tv(u: np.ndarray) -> float:
    g = grad(u)
    return float(np.sqrt(g[0] ** 2 + g[1] ** 2).sum())


def energy(
    u: np.ndarray,
    f: np.ndarray,
    g: Sequence[np.ndarray],
    model: DegradationModel,
    lam: float,
    gamma: float,
) -> float:
    """Primal objective with isotropic TV."""
    if u.shape != model.hr_shape or f.shape != model.lr_shape:
        raise ValueError("u/f shapes inconsistent with degradation model")
    data = apply_A(u, model) - f
    e = tv(u) + lam * float(np.vdot(data, data))
    if gamma:
        hu = highpass(u, model.kernel)
        for gi in g:
            if gi.shape != u.shape:
                raise ValueError("candidate shape differs from HR shape")
            e += gamma * float(np.abs(hu - highpass(gi, model.kernel)).sum())
    return e


def apply_K(x: PrimalVars, k: GaussianKernel) -> DualVars:
    hu = highpass(x.u, k)
    return DualVars(grad(x.u), hu[None] - x.w)


def apply_Kt(y: DualVars, k: GaussianKernel) -> PrimalVars:
    u = -div(y.p)
    if len(y.r):
        u = u + highpass_adjoint(y.r.sum(axis=0), k)
    return PrimalVars(u, -y.r)


def operator_norm(shape: tuple[int, int], n: int, k: GaussianKernel, iters: int = 200, seed: int = 0) -> float:
    """Power-iteration estimate of ``||K||`` for ``n`` candidates on ``shape`` planes."""

    def ktk(vec):
        x = PrimalVars.unflatten(vec, shape, n)
        return apply_Kt(apply_K(x, k), k).flatten()

    return estimate_op_norm(ktk, shape[0] * shape[1] * (n + 1), iters=iters, seed=seed)


def solve(
    f: np.ndarray,
    g: Sequence[np.ndarray],
    model: DegradationModel,
    cfg: SolverConfig = SolverConfig(),
    u0: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveDiagnostics]:
    """Run the primal-dual iteration and return the HR estimate.

    ``u0`` defaults to the bicubic upsampling of ``f``. An empty ``g`` gives
    plain TV-regularized super-resolution.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.shape != model.lr_shape:
        raise ValueError(f"f has shape {f.shape}, model expects {model.lr_shape}")
    hr = model.hr_shape
    gs = np.array([np.asarray(gi, dtype=np.float64) for gi in g]).reshape((-1,) + hr) if len(g) else np.zeros((0,) + hr)
    if any(np.asarray(gi).shape != hr for gi in g):
        raise ValueError(f"candidates must be HR-sized {hr}")
    n = gs.shape[0]
    k = model.kernel

    L = operator_norm(hr, n, k, cfg.power_iters, cfg.seed)
    base = 1.0 / (L * (1.0 + STEP_MARGIN))
    tau, sigma = base / cfg.step_ratio, base * cfg.step_ratio
    if not tau * sigma * L * L < 1.0:
        raise StepSizeError(f"tau*sigma*L^2 = {tau * sigma * L * L} violates < 1")
    diag = SolveDiagnostics(op_norm=L, tau=tau, sigma=sigma)

    hg = np.array([highpass(gi, k) for gi in gs]).reshape(gs.shape)
    u = zoom_plane(f, model.scale, down=False) if u0 is None else np.array(u0, dtype=np.float64)
    x = PrimalVars(u, highpass(u, k)[None] - hg)
    y = DualVars.zeros(hr, n)
    y_bar = y

    for it in range(cfg.max_outer_iters):
        x_new, report = prox_g(
            x - tau * apply_Kt(y_bar, k), tau, cfg.lam, cfg.gamma, f, model, cfg.cg, x.u
        )
        y_new = prox_fstar(y + sigma * apply_K(x_new, k), sigma, hg)
        y_bar = y_new + cfg.theta * (y_new - y)

        nu = np.linalg.norm(x.u)
        change = np.linalg.norm(x_new.u - x.u) / (nu if nu > 0 else 1.0)
        x, y = x_new, y_new

        diag.cg_total_iters += report.iterations_used
        diag.energy_trace.append(energy(x.u, f, gs, model, cfg.lam, cfg.gamma))
        diag.rel_change_trace.append(float(change))
        diag.iterations_run = it + 1
        if change <= cfg.rel_change_tol:
            break

    log.debug(
        "pd solve: %d iters, energy %.6g, cg iters %d",
        diag.iterations_run,
        diag.final_energy,
        diag.cg_total_iters,
    )
    return x.u, diag
