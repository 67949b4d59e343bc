"""Resolvent operators for the stacked primal and dual variables.

The saddle-point form pairs a primal ``x = (u, w_1..w_n)`` with a dual
``y = (p, r_1..r_n)``: ``p`` dualizes total variation, each ``r_i`` is the
multiplier of the constraint ``w_i = H (u - g_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cg import CgConfig, CgReport, cg_solve
from .linops import DegradationModel, apply_A, apply_At

__all__ = [
    "PrimalVars",
    "DualVars",
    "project_unit_ball",
    "shrink",
    "prox_fstar",
    "prox_g",
]

BALL_SLACK = 1e-12


@dataclass
class PrimalVars:
    u: np.ndarray  # (h, w)
    w: np.ndarray  # (n, h, w)

    def __add__(self, other):
        return PrimalVars(self.u + other.u, self.w + other.w)

    def __sub__(self, other):
        return PrimalVars(self.u - other.u, self.w - other.w)

    def __mul__(self, s: float):
        return PrimalVars(s * self.u, s * self.w)

    __rmul__ = __mul__

    def dot(self, other) -> float:
        return float(np.vdot(self.u, other.u) + np.vdot(self.w, other.w))

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.u.ravel(), self.w.ravel()])

    @classmethod
    def unflatten(cls, vec: np.ndarray, shape: tuple[int, int], n: int) -> "PrimalVars":
        k = shape[0] * shape[1]
        return cls(vec[:k].reshape(shape), vec[k:].reshape((n,) + tuple(shape)))


@dataclass
class DualVars:
    p: np.ndarray  # (2, h, w)
    r: np.ndarray  # (n, h, w)

    def __add__(self, other):
        return DualVars(self.p + other.p, self.r + other.r)

    def __sub__(self, other):
        return DualVars(self.p - other.p, self.r - other.r)

    def __mul__(self, s: float):
        return DualVars(s * self.p, s * self.r)

    __rmul__ = __mul__

    def dot(self, other) -> float:
        return float(np.vdot(self.p, other.p) + np.vdot(self.r, other.r))

    @classmethod
    def zeros(cls, shape: tuple[int, int], n: int) -> "DualVars":
        return cls(np.zeros((2,) + tuple(shape)), np.zeros((n,) + tuple(shape)))


def project_unit_ball(p: np.ndarray) -> np.ndarray:
    """Project every pixel's 2-vector onto the closed unit disc.

    Vectors within ``BALL_SLACK`` of the disc are left alone, which makes the
    projection exactly idempotent despite rounding in the rescale.
    """
    norm = np.sqrt(p[0] ** 2 + p[1] ** 2)
    return p / np.where(norm > 1.0 + BALL_SLACK, norm, 1.0)


def shrink(v: np.ndarray, t: float) -> np.ndarray:
    """Soft threshold: the prox of ``t * |.|``."""
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def prox_fstar(y: DualVars, sigma: float, hg: np.ndarray) -> DualVars:
    """Resolvent of ``sigma * dF*`` with ``F*(y) = indicator(|p| <= 1) + sum <H g_i, r_i>``.

    ``hg`` holds the precomputed high-passed candidates, shape ``(n, h, w)``.
    """
    return DualVars(project_unit_ball(y.p), y.r - sigma * hg)


def prox_g(
    x: PrimalVars,
    tau: float,
    lam: float,
    gamma: float,
    f: np.ndarray,
    model: DegradationModel,
    cg_cfg: CgConfig,
    u_warm: np.ndarray,
) -> tuple[PrimalVars, CgReport]:
    """Resolvent of ``tau * dG`` with ``G(x) = lam ||A u - f||^2 + gamma sum ||w_i||_1``.

    The ``w_i`` are soft-thresholded at ``tau * gamma``. ``u`` solves
    ``(I + 2 lam tau A^T A) u = u~ + 2 lam tau A^T f`` by CG, started at ``u_warm``.
    """
    w = shrink(x.w, tau * gamma)
    c = 2.0 * lam * tau

    def apply_m(v):
        return v + c * apply_At(apply_A(v, model), model)

    rhs = x.u + c * apply_At(f, model)
    u, report = cg_solve(apply_m, rhs, u_warm, cg_cfg)
    return PrimalVars(u, w), report
