"""The four segmentation solvers and their shared primitives.

All solvers share the same model machinery (edge weight g, kernel-weighted
region means, data force eta) and the same stopping rule: sup-norm change
below tol, or the thresholded mask unchanged for three consecutive
iterations, or the iteration cap. ``rdls`` evolves an unconstrained level
set by alternating reaction and diffusion steps; ``sbrd``, ``fprd1`` and
``fprd2`` minimize the convex edge-weighted anisotropic-TV objective with
phi (or its auxiliary psi) kept in [0, 1].
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, InvalidInputError, NumericFailureError
from .grid_ops import _as_field, div_adjoint, grad_forward, laplacian
from .metrics import dice as dice_score
from .metrics import pp_uniformity
from .model import (
    ModelParams,
    data_force,
    delta_eps,
    edge_detector,
    heaviside_eps,
    local_means,
    region_means,
    scalar_force,
    weighted_curvature,
)

ALGORITHMS = ("rdls", "sbrd", "fprd1", "fprd2")

#: consecutive iterations with an unchanged mask that stop a run
MASK_STABLE_ITERS = 3

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    _HAVE_NUMBA = False


@dataclass(frozen=True)
class SolverConfig:
    """Per-algorithm parameter record; build one with :func:`default_config`."""

    algorithm: str
    model: ModelParams
    lam: float = 1.0
    alpha: float = 12.0
    t: float = 1e-4
    gamma: float = 0.5
    xi: float = 1.0
    dt1: float = 0.1
    dt2: float = 0.15
    max_iter: int = 500
    tol: float = 1e-3
    means_update_every: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        for name in ("lam", "alpha", "xi", "dt1", "dt2", "tol"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be > 0")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigurationError("gamma must lie in (0, 1)")
        if self.max_iter < 1 or self.means_update_every < 1:
            raise ConfigurationError("iteration counts must be >= 1")
        if self.algorithm in ("fprd1", "fprd2"):
            if not 0.0 < self.t < 1.0:
                raise ConfigurationError("relaxation t must lie strictly in (0, 1)")
            if self.lam / self.alpha > 0.25:
                raise ConfigurationError(
                    f"lambda/alpha = {self.lam / self.alpha:.4g} exceeds the "
                    "fixed-point stability bound 1/4"
                )


def default_config(algorithm: str, **overrides) -> SolverConfig:
    """Library defaults for each algorithm; keyword overrides may target
    either SolverConfig or ModelParams fields."""
    if algorithm == "rdls":
        cfg = SolverConfig(algorithm, ModelParams(mu=15.0, beta=20.0))
    elif algorithm == "sbrd":
        # alpha is the strict-convexity weight; small keeps the implicit
        # smoothing strong (lambda-dominated).
        cfg = SolverConfig(algorithm, ModelParams(mu=6.0, beta=20.0), lam=1000.0, alpha=1.0)
    elif algorithm == "fprd1":
        cfg = SolverConfig(algorithm, ModelParams(mu=0.15, beta=20.0), lam=1.0, alpha=12.0)
    elif algorithm == "fprd2":
        cfg = SolverConfig(algorithm, ModelParams(mu=0.1, beta=12.0), lam=1.0, alpha=8.0)
    else:
        raise ConfigurationError(
            f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}"
        )
    if overrides:
        model_fields = {
            k: v for k, v in overrides.items() if k in ModelParams.__dataclass_fields__
        }
        solver_fields = {
            k: v
            for k, v in overrides.items()
            if k in SolverConfig.__dataclass_fields__ and k not in ("model", "algorithm")
        }
        unknown = set(overrides) - set(model_fields) - set(solver_fields)
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        if model_fields:
            cfg = replace(cfg, model=replace(cfg.model, **model_fields))
        if solver_fields:
            cfg = replace(cfg, **solver_fields)
    return cfg


@dataclass
class BregmanState:
    """Split variables d, Bregman variables b, and the fprd2 multiplier c."""

    d_x: np.ndarray
    d_y: np.ndarray
    b_x: np.ndarray
    b_y: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, shape) -> "BregmanState":
        return cls(*(np.zeros(shape) for _ in range(5)))


@dataclass
class SegmentationResult:
    """Final level set, thresholded mask, and run statistics."""

    phi: np.ndarray
    mask: np.ndarray
    iterations: int
    wall_seconds: float
    pp: float
    dice: Optional[float] = None


def shrink(v, threshold) -> np.ndarray:
    """Soft threshold sgn(v) * max(|v| - threshold, 0); threshold may be a field."""
    v = np.asarray(v, dtype=np.float64)
    tau = np.asarray(threshold, dtype=np.float64)
    if np.any(tau < 0):
        raise InvalidInputError("shrink threshold must be nonnegative")
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def threshold_mask(phi, gamma: float) -> np.ndarray:
    """Binary mask {phi > gamma} for gamma in (0, 1); strict inequality."""
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError("gamma must lie in (0, 1)")
    return (np.asarray(phi) > gamma).astype(np.uint8)


# ---------------------------------------------------------------------------
# Gauss-Seidel sweep for the sbrd linear subproblem
# ---------------------------------------------------------------------------

def _gs_sweep_python(phi, a, eta, lam, alpha, mu):
    h, w = phi.shape
    denom = alpha + 4.0 * lam
    for i in range(h):
        for j in range(w):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < h - 1 else h - 1
            jm = j - 1 if j > 0 else 0
            jp = j + 1 if j < w - 1 else w - 1
            beta_ij = (
                lam * (phi[im, j] + phi[ip, j] + phi[i, jm] + phi[i, jp] + a[i, j])
                + 0.5 * alpha
                - mu * eta[i, j]
            ) / denom
            phi[i, j] = min(max(beta_ij, 0.0), 1.0)


if _HAVE_NUMBA:
    _gs_sweep_fast = njit(cache=True)(_gs_sweep_python)
else:  # pragma: no cover
    _gs_sweep_fast = _gs_sweep_python


def gauss_seidel_sweep(phi, div_adj_db, eta, lam: float, alpha: float, mu: float) -> np.ndarray:
    """One raster-order Gauss-Seidel sweep of the clamped linear update.

    Solves one relaxation pass of (alpha*I - lam*Lap) phi = 0.5*alpha
    - mu*eta + lam*div_adj_db with reflective neighbors, projecting each
    pixel onto [0, 1]. ``div_adj_db`` is the adjoint-gradient of d - b,
    precomputed by the caller.
    """
    out = _as_field(phi, "phi").copy()
    a = _as_field(div_adj_db, "div_adj_db")
    e = _as_field(eta, "eta")
    if out.shape != a.shape or out.shape != e.shape:
        raise InvalidInputError("phi, div_adj_db and eta must share a shape")
    _gs_sweep_fast(out, a, e, float(lam), float(alpha), float(mu))
    return out


# ---------------------------------------------------------------------------
# shared run scaffolding
# ---------------------------------------------------------------------------

class _RunControl:
    """Stopping logic shared by the four solvers."""

    def __init__(self, cfg: SolverConfig, first_field: np.ndarray):
        self.cfg = cfg
        self.prev = first_field.copy()
        self.prev_mask = threshold_mask(first_field, cfg.gamma)
        self.stable = 0
        self.iterations = 0

    def step(self, current: np.ndarray) -> bool:
        """Record one finished iteration; return True when the run should stop."""
        self.iterations += 1
        if not np.all(np.isfinite(current)):
            raise NumericFailureError(
                f"non-finite level set at iteration {self.iterations}", self.iterations
            )
        delta = float(np.max(np.abs(current - self.prev)))
        mask = threshold_mask(current, self.cfg.gamma)
        self.stable = self.stable + 1 if np.array_equal(mask, self.prev_mask) else 0
        self.prev = current.copy()
        self.prev_mask = mask
        if delta < self.cfg.tol:
            return True
        if self.stable >= MASK_STABLE_ITERS:
            return True
        return self.iterations >= self.cfg.max_iter


def _prepare(f, cfg: SolverConfig, algorithm: str):
    f = _as_field(f, "f")
    if cfg.algorithm != algorithm:
        raise ConfigurationError(
            f"config is for {cfg.algorithm!r}, solver is {algorithm!r}"
        )
    if f.min() <= 0:
        raise InvalidInputError("image must be strictly positive")
    g = edge_detector(f, cfg.model.beta, cfg.model.sigma)
    phi0 = f / f.max()
    return f, g, phi0


def _force(f, region_weight, cfg: SolverConfig) -> np.ndarray:
    """Kernel-local statistics force (rdls and sbrd)."""
    means = local_means(f, region_weight, cfg.model.kernel_sigma)
    return data_force(f, means, cfg.model.kernel_sigma, cfg.model.data_term)


def _force_global(f, mask, cfg: SolverConfig) -> np.ndarray:
    """Whole-region statistics force (fprd1 and fprd2, per their listings)."""
    c1, c2 = region_means(f, mask)
    return scalar_force(f, c1, c2, cfg.model.data_term)


def _finish(f, phi, mask_source, control: _RunControl, t0: float, cfg, truth) -> SegmentationResult:
    mask = threshold_mask(mask_source, cfg.gamma)
    result = SegmentationResult(
        phi=phi,
        mask=mask,
        iterations=control.iterations,
        wall_seconds=time.perf_counter() - t0,
        pp=pp_uniformity(f, mask),
        dice=None if truth is None else dice_score(mask, truth),
    )
    return result


Callback = Optional[Callable[[int, np.ndarray], None]]


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

def run_rdls(f, cfg: SolverConfig, truth=None, callback: Callback = None) -> SegmentationResult:
    """Reaction-diffusion level-set evolution (explicit two-step scheme)."""
    t0 = time.perf_counter()
    f, g, phi = _prepare(f, cfg, "rdls")
    mp = cfg.model
    control = _RunControl(cfg, phi)
    eta = _force(f, heaviside_eps(phi, mp.eps), cfg)
    while True:
        if control.iterations > 0 and control.iterations % cfg.means_update_every == 0:
            eta = _force(f, heaviside_eps(phi, mp.eps), cfg)
        curv = weighted_curvature(phi, g)
        phi = phi + (cfg.dt1 / cfg.xi) * delta_eps(phi, mp.eps) * (curv - mp.mu * eta)
        if not np.all(np.isfinite(phi)):
            raise NumericFailureError(
                f"non-finite level set at iteration {control.iterations + 1}",
                control.iterations + 1,
            )
        phi = phi + (cfg.dt2 * cfg.xi) * laplacian(phi)
        done = control.step(phi)
        if callback is not None:
            callback(control.iterations, phi)
        if done:
            return _finish(f, phi, phi, control, t0, cfg, truth)


def run_sbrd(f, cfg: SolverConfig, truth=None, callback: Callback = None) -> SegmentationResult:
    """Split-Bregman minimization of the convex edge-weighted TV objective."""
    t0 = time.perf_counter()
    f, g, phi = _prepare(f, cfg, "sbrd")
    mp = cfg.model
    tau = g / cfg.lam
    state = BregmanState.zeros(f.shape)
    control = _RunControl(cfg, phi)
    eta = _force(f, threshold_mask(phi, cfg.gamma).astype(np.float64), cfg)
    while True:
        a = div_adjoint(state.d_x - state.b_x, "x") + div_adjoint(state.d_y - state.b_y, "y")
        phi = gauss_seidel_sweep(phi, a, eta, cfg.lam, cfg.alpha, mp.mu)
        gx = grad_forward(phi, "x")
        gy = grad_forward(phi, "y")
        state.d_x = shrink(gx + state.b_x, tau)
        state.d_y = shrink(gy + state.b_y, tau)
        state.b_x = state.b_x + gx - state.d_x
        state.b_y = state.b_y + gy - state.d_y
        done = control.step(phi)
        if callback is not None:
            callback(control.iterations, phi)
        if done:
            return _finish(f, phi, phi, control, t0, cfg, truth)
        if control.iterations % cfg.means_update_every == 0:
            eta = _force(f, threshold_mask(phi, cfg.gamma).astype(np.float64), cfg)


def _relaxed_clip(v, tau, b, t):
    """Relaxed residual update t*b + (1-t)*(I - shrink)(v)."""
    return t * b + (1.0 - t) * (v - shrink(v, tau))


def run_fprd1(f, cfg: SolverConfig, truth=None, callback: Callback = None) -> SegmentationResult:
    """First fixed-point scheme: explicit proximal steps on the TV objective."""
    t0 = time.perf_counter()
    f, g, phi = _prepare(f, cfg, "fprd1")
    mp = cfg.model
    tau = g / cfg.lam
    state = BregmanState.zeros(f.shape)
    control = _RunControl(cfg, phi)
    eta = _force_global(f, threshold_mask(phi, cfg.gamma).astype(np.float64), cfg)
    while True:
        state.b_x = _relaxed_clip(grad_forward(phi, "x") + state.b_x, tau, state.b_x, cfg.t)
        state.b_y = _relaxed_clip(grad_forward(phi, "y") + state.b_y, tau, state.b_y, cfg.t)
        phi = phi - (mp.mu / cfg.alpha) * eta - (cfg.lam / cfg.alpha) * (
            div_adjoint(state.b_x, "x") + div_adjoint(state.b_y, "y")
        )
        np.clip(phi, 0.0, 1.0, out=phi)
        done = control.step(phi)
        if callback is not None:
            callback(control.iterations, phi)
        if done:
            return _finish(f, phi, phi, control, t0, cfg, truth)
        if control.iterations % cfg.means_update_every == 0:
            eta = _force_global(f, threshold_mask(phi, cfg.gamma).astype(np.float64), cfg)


def run_fprd2(f, cfg: SolverConfig, truth=None, callback: Callback = None) -> SegmentationResult:
    """Second fixed-point scheme: splitting with an extra multiplier field c.

    phi carries the TV part unconstrained; the clamped auxiliary psi drives
    the mask, the region statistics, and the stopping rule.
    """
    t0 = time.perf_counter()
    f, g, phi = _prepare(f, cfg, "fprd2")
    mp = cfg.model
    tau = g / cfg.lam
    state = BregmanState.zeros(f.shape)
    psi = phi.copy()
    control = _RunControl(cfg, psi)
    eta = _force_global(f, threshold_mask(phi, cfg.gamma).astype(np.float64), cfg)
    while True:
        state.b_x = _relaxed_clip(grad_forward(phi, "x") + state.b_x, tau, state.b_x, cfg.t)
        state.b_y = _relaxed_clip(grad_forward(phi, "y") + state.b_y, tau, state.b_y, cfg.t)
        phi = psi + state.c - (cfg.lam / cfg.alpha) * (
            div_adjoint(state.b_x, "x") + div_adjoint(state.b_y, "y")
        )
        psi_pre = phi - state.c - (mp.mu / cfg.alpha) * eta
        state.c = state.c + psi_pre - phi
        psi = np.clip(psi_pre, 0.0, 1.0)
        done = control.step(psi)
        if callback is not None:
            callback(control.iterations, psi)
        if done:
            return _finish(f, psi, psi, control, t0, cfg, truth)
        if control.iterations % cfg.means_update_every == 0:
            eta = _force_global(f, threshold_mask(psi, cfg.gamma).astype(np.float64), cfg)


_RUNNERS = {
    "rdls": run_rdls,
    "sbrd": run_sbrd,
    "fprd1": run_fprd1,
    "fprd2": run_fprd2,
}


def run(f, cfg: SolverConfig, truth=None, callback: Callback = None) -> SegmentationResult:
    """Dispatch to the solver named by ``cfg.algorithm``."""
    return _RUNNERS[cfg.algorithm](f, cfg, truth=truth, callback=callback)
