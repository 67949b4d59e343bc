"""Slow reference minimizer for tiny instances.

Everything here is built from explicit dense matrices assembled pixel by
pixel, so it shares no code path with :mod:`cvxhallu.linops` or the
primal-dual loop it is used to check. Non-smooth terms are replaced by
``sqrt(v**2 + eps**2) - eps`` and the result is minimized by plain gradient
descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linops import DegradationModel

__all__ = [
    "OracleConfig",
    "OracleDivergenceError",
    "DenseProblem",
    "dense_problem",
    "oracle_solve",
    "random_instance",
    "compare_with_pd",
]

MAX_SIDE = 16


class OracleDivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    huber_eps: float = 1e-4
    step: float | None = None  # None: 1 / Lipschitz bound
    iters: int = 1_000_000

    def __post_init__(self):
        if self.huber_eps <= 0:
            raise ValueError("huber_eps must be > 0")
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be > 0")


def _gradient_matrices(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    n = h * w
    gx = np.zeros((n, n))
    gy = np.zeros((n, n))
    for i in range(h):
        for j in range(w):
            row = i * w + j
            if j + 1 < w:
                gx[row, row] = -1.0
                gx[row, row + 1] = 1.0
            if i + 1 < h:
                gy[row, row] = -1.0
                gy[row, row + w] = 1.0
    return gx, gy


def _blur_dense(h: int, w: int, taps: Sequence[float]) -> np.ndarray:
    r = len(taps) // 2
    n = h * w
    b = np.zeros((n, n))
    for i in range(h):
        for j in range(w):
            for a in range(-r, r + 1):
                for c in range(-r, r + 1):
                    ii = min(max(i + a, 0), h - 1)
                    jj = min(max(j + c, 0), w - 1)
                    b[i * w + j, ii * w + jj] += taps[a + r] * taps[c + r]
    return b


def _decimation_dense(h: int, w: int, scale: int) -> np.ndarray:
    lh, lw = h // scale, w // scale
    off = scale // 2
    d = np.zeros((lh * lw, h * w))
    for i in range(lh):
        for j in range(lw):
            d[i * lw + j, (i * scale + off) * w + (j * scale + off)] = 1.0
    return d


@dataclass
class DenseProblem:
    """Explicit matrices of the energy on a tiny grid (pixels in row-major order)."""

    gx: np.ndarray
    gy: np.ndarray
    a: np.ndarray
    h: np.ndarray
    f: np.ndarray
    hg: np.ndarray  # (n, pixels)
    lam: float
    gamma: float
    shape: tuple[int, int]

    def smoothed_energy(self, u: np.ndarray, eps: float) -> float:
        gx, gy = self.gx @ u, self.gy @ u
        tv = np.sum(np.sqrt(gx * gx + gy * gy + eps * eps) - eps)
        res = self.a @ u - self.f
        z = (self.h @ u)[None] - self.hg
        l1 = np.sum(np.sqrt(z * z + eps * eps) - eps)
        return float(tv + self.lam * res @ res + self.gamma * l1)

    def smoothed_gradient(self, u: np.ndarray, eps: float) -> np.ndarray:
        gx, gy = self.gx @ u, self.gy @ u
        s = np.sqrt(gx * gx + gy * gy + eps * eps)
        z = (self.h @ u)[None] - self.hg
        t = z / np.sqrt(z * z + eps * eps)
        return (
            self.gx.T @ (gx / s)
            + self.gy.T @ (gy / s)
            + 2.0 * self.lam * self.a.T @ (self.a @ u - self.f)
            + self.gamma * self.h.T @ t.sum(axis=0)
        )

    def exact_energy(self, u: np.ndarray) -> float:
        gx, gy = self.gx @ u, self.gy @ u
        res = self.a @ u - self.f
        z = (self.h @ u)[None] - self.hg
        return float(
            np.sum(np.sqrt(gx * gx + gy * gy)) + self.lam * res @ res + self.gamma * np.abs(z).sum()
        )

    def lipschitz_bound(self, eps: float) -> float:
        n = self.hg.shape[0]
        a2 = np.linalg.norm(self.a, 2) ** 2
        h2 = np.linalg.norm(self.h, 2) ** 2
        return 8.0 / eps + 2.0 * self.lam * a2 + n * self.gamma * h2 / eps


def dense_problem(
    f: np.ndarray,
    g: Sequence[np.ndarray],
    model: DegradationModel,
    lam: float,
    gamma: float,
) -> DenseProblem:
    hh, ww = model.hr_shape
    if max(hh, ww) > MAX_SIDE:
        raise ValueError(f"oracle limited to {MAX_SIDE}x{MAX_SIDE} HR grids, got {hh}x{ww}")
    gx, gy = _gradient_matrices(hh, ww)
    b = _blur_dense(hh, ww, model.kernel.taps)
    a = _decimation_dense(hh, ww, model.scale) @ b
    hp = np.eye(hh * ww) - b
    hg = np.array([hp @ np.asarray(gi, dtype=np.float64).ravel() for gi in g]).reshape(len(g), hh * ww)
    return DenseProblem(gx, gy, a, hp, np.asarray(f, dtype=np.float64).ravel(), hg, lam, gamma, (hh, ww))


def oracle_solve(
    f: np.ndarray,
    g: Sequence[np.ndarray],
    model: DegradationModel,
    lam: float,
    gamma: float,
    cfg: OracleConfig = OracleConfig(),
    trace: list | None = None,
) -> np.ndarray:
    """Gradient descent on the smoothed energy from a pixel-replicated ``f``.

    If ``trace`` is given, the smoothed energy of every iterate is appended.
    """
    prob = dense_problem(f, g, model, lam, gamma)
    eps = cfg.huber_eps
    step = cfg.step if cfg.step is not None else 1.0 / prob.lipschitz_bound(eps)
    s = model.scale
    u = np.kron(np.asarray(f, dtype=np.float64), np.ones((s, s))).ravel()

    # one stacked operator so each step costs two mat-vecs
    m = np.vstack([prob.gx, prob.gy, prob.a, prob.h])
    npx = u.size
    nlr = prob.a.shape[0]
    lam2 = 2.0 * lam
    e_prev = math.inf
    rising = 0
    for _ in range(cfg.iters):
        z = m @ u
        gx, gy = z[:npx], z[npx : 2 * npx]
        res = z[2 * npx : 2 * npx + nlr] - prob.f
        d = z[2 * npx + nlr :][None] - prob.hg
        sq = np.sqrt(gx * gx + gy * gy + eps * eps)
        sd = np.sqrt(d * d + eps * eps)
        e = float(np.sum(sq) - npx * eps + lam * res @ res + gamma * (np.sum(sd) - sd.size * eps))
        if trace is not None:
            trace.append(e)
        if e > e_prev:
            rising += 1
            if rising >= 10:
                raise OracleDivergenceError("smoothed energy rose for 10 consecutive steps")
        else:
            rising = 0
        e_prev = e
        weights = np.concatenate([gx / sq, gy / sq, lam2 * res, gamma * (d / sd).sum(axis=0)])
        u = u - step * (m.T @ weights)
    return u.reshape(prob.shape)


def random_instance(seed: int, size: int = 8, n: int = 2, scale: int = 4):
    """Seeded tiny problem: uniform HR, noisy LR observation, noisy candidates.

    Returns ``(model, truth, f, g)``.
    """
    rng = np.random.default_rng(seed)
    model = DegradationModel.for_hr(scale, (size, size))
    truth = rng.uniform(size=(size, size))
    blurred = _blur_dense(size, size, model.kernel.taps) @ truth.ravel()
    f = (_decimation_dense(size, size, scale) @ blurred).reshape(model.lr_shape)
    f = f + 0.02 * rng.standard_normal(f.shape)
    g = [truth + 0.1 * rng.standard_normal(truth.shape) for _ in range(n)]
    return model, truth, f, g


def compare_with_pd(
    seed: int,
    size: int = 8,
    n: int = 2,
    lam: float = 10.0,
    gamma: float = 0.5,
    cfg: OracleConfig = OracleConfig(),
    pd_iters: int = 5000,
) -> dict:
    """Run both solvers on one random instance and report exact energies."""
    from .cg import CgConfig
    from .pd_solver import SolverConfig, energy, solve

    model, _, f, g = random_instance(seed, size, n)
    pd_cfg = SolverConfig(
        lam=lam,
        gamma=gamma,
        max_outer_iters=pd_iters,
        rel_change_tol=1e-10,
        seed=seed,
        cg=CgConfig(100, 1e-12),
    )
    u_pd, diag = solve(f, g, model, pd_cfg)
    u_or = oracle_solve(f, g, model, lam, gamma, cfg)
    e_pd = energy(u_pd, f, g, model, lam, gamma)
    e_or = energy(u_or, f, g, model, lam, gamma)
    return {
        "energy_pd": e_pd,
        "energy_oracle": e_or,
        "rel_gap": abs(e_pd - e_or) / e_or,
        "pd_iterations": diag.iterations_run,
    }
