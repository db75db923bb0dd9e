"""Pure-Python/NumPy implementation of the hot kernels.

Mirrors ``_core.pyx`` function for function. It is used when the compiled
extension is missing or when ``IMAGINARITY_BACKEND=python`` is set, and it is
the reference the compiled core is checked against.
"""
import math

import numpy as np

from .errors import NumericalError, ValidationError

NAME = "python"

MAX_SWEEPS = 100
JACOBI_TOL = 1e-13
RANK_TOL = 1e-10
NEG_TOL = 1e-10
DEGENERATE_TRACE = 1e-12

TSALLIS, SANDWICHED, OPERATOR = 0, 1, 2
FULL, PURE = 0, 1


def hermitian_eig(h, max_sweeps=MAX_SWEEPS, tol=JACOBI_TOL):
    """Cyclic complex Jacobi eigensolver.

    Returns ascending eigenvalues and a unitary whose columns are the
    matching eigenvectors. Only the Hermitian part of ``h`` is used.
    """
    a = np.array(h, dtype=complex)
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = float(np.sum(np.abs(a[iu]) ** 2))
        total = float(np.sum(a.diagonal().real ** 2)) + 2.0 * off
        if off <= tol * tol * total:
            break
        if sweep == max_sweeps:
            raise NumericalError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps; "
                f"off-diagonal residual {math.sqrt(off):.3e}"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                e = apq / mag
                ec = e.conjugate()
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * ec * colq
                a[:, q] = s * colp + c * ec * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * e * rowq
                a[q, :] = s * rowp + c * e * rowq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * ec * vq
                v[:, q] = s * vp + c * ec * vq
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _spectral_power(w, p, rank_tol):
    f = np.zeros_like(w)
    keep = w > rank_tol
    f[keep] = w[keep] ** p
    return f


def psd_power(h, p, rank_tol=RANK_TOL, neg_tol=NEG_TOL):
    """Support pseudo-power of a PSD Hermitian matrix."""
    w, v = hermitian_eig(h)
    if w[0] < -neg_tol:
        raise ValidationError(
            f"matrix is not positive semidefinite: eigenvalue {w[0]:.3e} < -{neg_tol:g}"
        )
    f = _spectral_power(w, p, rank_tol)
    return (v * f) @ v.conj().T


def _psd_power_trace(h, p, rank_tol=RANK_TOL, neg_tol=NEG_TOL):
    w, _ = hermitian_eig(h)
    if w[0] < -neg_tol:
        raise ValidationError(
            f"matrix is not positive semidefinite: eigenvalue {w[0]:.3e} < -{neg_tol:g}"
        )
    return float(np.sum(_spectral_power(w, p, rank_tol)))


def sigma_from_params(x, dim, mode):
    """Real density matrix from unconstrained coordinates.

    ``mode == FULL``: ``x`` fills a lower-triangular L row by row and the
    state is L L^T / tr(L L^T). ``mode == PURE``: ``x`` is a real vector v and
    the state is v v^T / |v|^2. Returns ``None`` for a degenerate trace.
    """
    x = np.asarray(x, dtype=float)
    if mode == FULL:
        lower = np.zeros((dim, dim))
        lower[np.tril_indices(dim)] = x
        m = lower @ lower.T
    else:
        m = np.outer(x, x)
    tr = float(x @ x)
    if tr <= DEGENERATE_TRACE:
        return None
    return (m / tr).astype(complex)


class KernelObjective:
    """sigma -> trace kernel for a fixed rho and alpha.

    ``kind`` is TSALLIS (tr rho^a sigma^(1-a)), SANDWICHED
    (tr (rho^g sigma rho^g)^a with g = (1-a)/2a) or OPERATOR
    (tr rho^1/2 (rho^-1/2 sigma rho^-1/2)^(1-a) rho^1/2). Every rho-dependent
    power is computed once here.
    """

    def __init__(self, kind, rho, alpha, rank_tol=RANK_TOL):
        rho = np.array(rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValidationError("rho must be a square matrix")
        if kind not in (TSALLIS, SANDWICHED, OPERATOR):
            raise ValidationError(f"unknown kernel kind {kind!r}")
        self.kind = kind
        self.dim = rho.shape[0]
        self.alpha = float(alpha)
        self.rank_tol = rank_tol
        self.rho = rho
        a = self.alpha
        if kind == TSALLIS:
            self._pre = psd_power(rho, a, rank_tol)
        elif kind == SANDWICHED:
            self._pre = psd_power(rho, (1.0 - a) / (2.0 * a), rank_tol)
        else:
            self._pre = psd_power(rho, -0.5, rank_tol)
            half = psd_power(rho, 0.5, rank_tol)
            self._post = half @ half

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=complex)
        if sigma.shape != (self.dim, self.dim):
            raise ValidationError(
                f"sigma has shape {sigma.shape}, expected {(self.dim, self.dim)}"
            )
        return self._evaluate(sigma)

    def _evaluate(self, sigma):
        a = self.alpha
        if self.kind == TSALLIS:
            y = psd_power(sigma, 1.0 - a, self.rank_tol)
            return complex(np.sum(self._pre * y.T))
        inner = self._pre @ sigma @ self._pre
        if self.kind == SANDWICHED:
            return complex(_psd_power_trace(inner, a, self.rank_tol))
        k = psd_power(inner, 1.0 - a, self.rank_tol)
        return complex(np.sum(k * self._post.T))

    def eval_params(self, x, mode):
        sigma = sigma_from_params(x, self.dim, mode)
        if sigma is None:
            return -math.inf
        return self._evaluate(sigma).real


class ParamObjective:
    """Minimisation target -kernel(sigma(x)) + (|x|^2 - 1)^2.

    The penalty pins the scale of x, which the state map ignores, so it is
    zero at every optimum and leaves the optimal kernel value unchanged.
    """

    def __init__(self, kernel, mode):
        self.kernel = kernel
        self.mode = mode

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kernel.eval_params(x, self.mode)
        if k == -math.inf:
            return math.inf
        pen = float(x @ x) - 1.0
        return -k + pen * pen


def nelder_mead(func, x0, step, ftol, xtol, max_evals):
    """Adaptive Nelder-Mead minimisation.

    Stops once the simplex spread is below ``ftol`` in value and ``xtol`` in
    every coordinate, or after ``max_evals`` evaluations. Returns
    ``(x_best, f_best, n_evals)``.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    rho_, chi = 1.0, 1.0 + 2.0 / n
    psi, sigma = 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n

    def call(x):
        fx = func(x)
        if math.isnan(fx):
            raise NumericalError(f"objective returned NaN at parameters {x.tolist()}")
        return fx

    sim = np.empty((n + 1, n))
    fs = np.empty(n + 1)
    sim[0] = x0
    fs[0] = call(x0)
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += step
        fs[i + 1] = call(sim[i + 1])
    nev = n + 1
    order = np.argsort(fs, kind="stable")
    sim, fs = sim[order], fs[order]

    while nev < max_evals:
        if (np.max(np.abs(fs[1:] - fs[0])) <= ftol
                and np.max(np.abs(sim[1:] - sim[0])) <= xtol):
            break
        xbar = sim[:-1].mean(axis=0)
        xr = xbar + rho_ * (xbar - sim[-1])
        fr = call(xr)
        nev += 1
        shrink = False
        if fr < fs[0]:
            xe = xbar + rho_ * chi * (xbar - sim[-1])
            fe = call(xe)
            nev += 1
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        elif fr < fs[-1]:
            xc = xbar + psi * rho_ * (xbar - sim[-1])
            fc = call(xc)
            nev += 1
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
            else:
                shrink = True
        else:
            xcc = xbar - psi * (xbar - sim[-1])
            fcc = call(xcc)
            nev += 1
            if fcc < fs[-1]:
                sim[-1], fs[-1] = xcc, fcc
            else:
                shrink = True
        if shrink:
            for i in range(1, n + 1):
                sim[i] = sim[0] + sigma * (sim[i] - sim[0])
                fs[i] = call(sim[i])
            nev += n
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
    return sim[0].copy(), float(fs[0]), nev
