"""Warm-started conjugate gradient for symmetric positive-definite systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["CgConfig", "CgReport", "CgError", "cg_solve"]


class CgError(ArithmeticError):
    """Raised when CG meets non-finite values (non-SPD or badly scaled system)."""


@dataclass(frozen=True)
class CgConfig:
    max_iters: int = 30
    rel_tol: float = 1e-6

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")


@dataclass(frozen=True)
class CgReport:
    iterations_used: int
    final_rel_residual: float
    converged: bool


def cg_solve(
    apply_m: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    x0: np.ndarray,
    cfg: CgConfig = CgConfig(),
) -> tuple[np.ndarray, CgReport]:
    """Solve ``M x = b`` starting from ``x0``.

    Convergence is measured relative to the residual of the warm start:
    ``||M x - b|| <= rel_tol * ||M x0 - b||``. If the warm start is already
    exact, no iteration is performed. Arrays of any shape are accepted;
    inner products run over all elements.
    """
    if b.shape != x0.shape:
        raise ValueError(f"b and x0 shapes differ: {b.shape} vs {x0.shape}")
    x = np.array(x0, dtype=np.float64)
    r = b - apply_m(x)
    rr = float(np.vdot(r, r))
    if not np.isfinite(rr):
        raise CgError("non-finite initial residual")
    r0 = np.sqrt(rr)
    if r0 == 0.0:
        return x, CgReport(0, 0.0, True)

    p = r.copy()
    rel = 1.0
    it = 0
    while it < cfg.max_iters:
        mp = apply_m(p)
        pmp = float(np.vdot(p, mp))
        if not np.isfinite(pmp) or pmp <= 0.0:
            raise CgError(f"curvature p^T M p = {pmp} at iteration {it}")
        alpha = rr / pmp
        x += alpha * p
        r -= alpha * mp
        rr_new = float(np.vdot(r, r))
        if not np.isfinite(rr_new):
            raise CgError(f"non-finite residual at iteration {it}")
        it += 1
        rel = np.sqrt(rr_new) / r0
        if rel <= cfg.rel_tol:
            break
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x, CgReport(it, float(rel), bool(rel <= cfg.rel_tol))
