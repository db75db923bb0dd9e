"""Maximisation of a scalar objective over real density matrices.

States are parametrised without constraints: sigma = L L^T / tr(L L^T) with L
lower triangular for the full set of real states, and sigma = v v^T / |v|^2
for pure real states. A multi-start adaptive Nelder-Mead search runs on these
coordinates. ``grid_oracle_qubit`` is an independent brute-force scan used as
ground truth for qubits.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import NumericalError, ValidationError

FULL, PURE = 0, 1
TIE_TOL = 1e-12
INITIAL_STEP = 0.3
POLISH_STEP = 0.05


@dataclass(frozen=True)
class OptConfig:
    restarts: int = 16
    max_evals: int = 20000
    tol: float = 1e-11
    seed: int = 0
    # extra Nelder-Mead runs restarted from the incumbent to escape simplex collapse
    polish: int = 3

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_evals < 10:
            raise ValidationError(f"max_evals must be at least 10, got {self.max_evals}")
        if not (self.tol > 0):
            raise ValidationError(f"tol must be positive, got {self.tol}")


def n_params(dim, mode):
    return dim * (dim + 1) // 2 if mode == FULL else dim


def sigma_from_params(x, dim, mode=FULL):
    """Real density matrix for coordinates x; None when the trace degenerates."""
    return _backend.impl.sigma_from_params(np.asarray(x, dtype=float), int(dim), int(mode))


def _first_start(dim, mode):
    if mode == FULL:
        lower = np.eye(dim) / math.sqrt(dim)
        return lower[np.tril_indices(dim)]
    return np.ones(dim) / math.sqrt(dim)


class _GenericObjective:
    """Wraps an arbitrary sigma -> real callable into the minimisation target."""

    def __init__(self, objective, dim, mode):
        self.objective = objective
        self.dim = dim
        self.mode = mode

    def value(self, sigma):
        val = self.objective(sigma)
        if isinstance(val, complex):
            val = val.real
        val = float(val)
        if not math.isfinite(val):
            raise NumericalError(f"objective returned {val} at sigma =\n{np.array2string(sigma.real)}")
        return val

    def __call__(self, x):
        sigma = sigma_from_params(x, self.dim, self.mode)
        if sigma is None:
            return math.inf
        pen = float(x @ x) - 1.0
        return -self.value(sigma) + pen * pen


def _target(objective, dim, mode):
    impl = _backend.impl
    if isinstance(objective, impl.KernelObjective):
        if objective.dim != dim:
            raise ValidationError(f"objective acts on dim {objective.dim}, not {dim}")
        return impl.ParamObjective(objective, mode), lambda s: objective(s).real
    wrapped = _GenericObjective(objective, dim, mode)
    return wrapped, wrapped.value


def _local_search(target, x0, cfg):
    nm = _backend.impl.nelder_mead
    xtol = math.sqrt(cfg.tol)
    budget = cfg.max_evals
    x, f, used = nm(target, x0, INITIAL_STEP, cfg.tol, xtol, budget)
    budget -= used
    for _ in range(cfg.polish):
        if budget <= 2 * len(x0) + 2:
            break
        x2, f2, used = nm(target, x, POLISH_STEP, cfg.tol, xtol, budget)
        budget -= used
        improved = f - f2
        if f2 <= f:
            x, f = x2, f2
        if improved <= cfg.tol:
            break
    return x, f


def _maximize(objective, dim, cfg, mode):
    cfg = cfg or OptConfig()
    dim = int(dim)
    if dim < 1:
        raise ValidationError(f"dim must be positive, got {dim}")
    target, evaluate = _target(objective, dim, mode)
    rng = np.random.default_rng(cfg.seed)
    npar = n_params(dim, mode)
    best_sigma, best_val = None, -math.inf
    for start in range(cfg.restarts):
        if start == 0:
            x0 = _first_start(dim, mode)
        else:
            x0 = rng.normal(size=npar)
            x0 /= np.linalg.norm(x0)
        x, _ = _local_search(target, x0, cfg)
        sigma = sigma_from_params(x, dim, mode)
        if sigma is None:
            continue
        val = evaluate(sigma)
        # keep the earliest start unless a later one is better by more than the tie tolerance
        if val > best_val + TIE_TOL:
            best_sigma, best_val = sigma, val
    if best_sigma is None:
        raise NumericalError("every optimizer start collapsed to a zero-trace state")
    return best_sigma, float(best_val)


def maximize_over_real_states(objective, dim, cfg=None):
    """Maximise ``objective(sigma)`` over all real density matrices of size dim.

    ``objective`` may be any callable returning a real number or a backend
    ``KernelObjective`` (which takes a fast compiled path). Returns
    ``(sigma_star, value)`` with ``value == objective(sigma_star)``.
    """
    return _maximize(objective, dim, cfg, FULL)


def maximize_over_pure_real_states(objective, dim, cfg=None):
    """Same as maximize_over_real_states restricted to sigma = v v^T."""
    return _maximize(objective, dim, cfg, PURE)


def real_qubit_state(theta, q):
    """R(theta) diag(q, 1-q) R(theta)^T."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([
        [q * c * c + (1 - q) * s * s, (2 * q - 1) * c * s],
        [(2 * q - 1) * c * s, q * s * s + (1 - q) * c * c],
    ], dtype=complex)


def grid_oracle_qubit(objective, resolution=256, refine_levels=40, refine_points=9):
    """Brute-force maximum over all real qubit states.

    Scans theta in [0, pi) and q in [0, 1] on a resolution x resolution grid,
    then zooms in around the best cell: each level re-samples a
    refine_points x refine_points grid over the current window and halves it.
    """
    resolution = int(resolution)
    if resolution < 64:
        raise ValidationError(f"grid resolution must be at least 64, got {resolution}")

    def value(theta, q):
        v = objective(real_qubit_state(theta, q))
        return float(v.real if isinstance(v, complex) else v)

    thetas = np.arange(resolution) * (math.pi / resolution)
    qs = np.linspace(0.0, 1.0, resolution)
    best = (-math.inf, 0.0, 0.0)
    for th in thetas:
        for q in qs:
            v = value(th, q)
            if v > best[0]:
                best = (v, th, q)
    dth, dq = math.pi / resolution, 1.0 / (resolution - 1)
    for _ in range(refine_levels):
        _, th0, q0 = best
        for th in th0 + np.linspace(-dth, dth, refine_points):
            for q in np.clip(q0 + np.linspace(-dq, dq, refine_points), 0.0, 1.0):
                v = value(th, q)
                if v > best[0]:
                    best = (v, th, q)
        dth, dq = dth / 2, dq / 2
    val, th, q = best
    return real_qubit_state(th, q), val
