# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Same public surface as ``_purepy``: complex Jacobi eigensolver, support
pseudo-powers, the three divergence trace kernels, the parameter-to-state map
and a Nelder-Mead loop. When the loop is handed a ``ParamObjective`` it calls
the kernel at C level and never re-enters the interpreter.
"""
from libc.math cimport sqrt, fabs, pow, isnan, INFINITY, NAN
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

import numpy as np

from .errors import NumericalError, ValidationError

NAME = "cython"

ctypedef double complex cplx

cdef int _MAX_SWEEPS = 100
cdef double _JACOBI_TOL = 1e-13

MAX_SWEEPS = _MAX_SWEEPS
JACOBI_TOL = _JACOBI_TOL
RANK_TOL = 1e-10
NEG_TOL = 1e-10
DEGENERATE_TRACE = 1e-12

TSALLIS, SANDWICHED, OPERATOR = 0, 1, 2
FULL, PURE = 0, 1

# error codes shared by the C helpers
cdef int ERR_NONE = 0
cdef int ERR_NOCONV = -1
cdef int ERR_NEGATIVE = -2


cdef inline double _abs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _jacobi(cplx* a, int n, double* w, cplx* v, int max_sweeps,
                 double tol, double* resid) noexcept nogil:
    """Diagonalise the Hermitian part of a (row-major, overwritten)."""
    cdef int i, j, k, p, q, sweep
    cdef double off, total, mag, theta, t, c, s, tmp
    cdef cplx e, ec, x1, x2
    for i in range(n):
        a[i * n + i] = a[i * n + i].real
        for j in range(i + 1, n):
            e = 0.5 * (a[i * n + j] + a[j * n + i].conjugate())
            a[i * n + j] = e
            a[j * n + i] = e.conjugate()
    for i in range(n * n):
        v[i] = 0
    for i in range(n):
        v[i * n + i] = 1
    off = 0.0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        total = 0.0
        for i in range(n):
            total += a[i * n + i].real * a[i * n + i].real
            for j in range(i + 1, n):
                off += _abs2(a[i * n + j])
        total += 2.0 * off
        if off <= tol * tol * total:
            break
        if sweep == max_sweeps:
            resid[0] = sqrt(off)
            return ERR_NOCONV
        for p in range(n - 1):
            for q in range(p + 1, n):
                mag = sqrt(_abs2(a[p * n + q]))
                if mag == 0.0:
                    continue
                theta = (a[q * n + q].real - a[p * n + p].real) / (2.0 * mag)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                e = a[p * n + q] / mag
                ec = e.conjugate()
                for k in range(n):
                    x1 = a[k * n + p]
                    x2 = a[k * n + q]
                    a[k * n + p] = c * x1 - s * ec * x2
                    a[k * n + q] = s * x1 + c * ec * x2
                for k in range(n):
                    x1 = a[p * n + k]
                    x2 = a[q * n + k]
                    a[p * n + k] = c * x1 - s * e * x2
                    a[q * n + k] = s * x1 + c * e * x2
                a[p * n + q] = 0
                a[q * n + p] = 0
                a[p * n + p] = a[p * n + p].real
                a[q * n + q] = a[q * n + q].real
                for k in range(n):
                    x1 = v[k * n + p]
                    x2 = v[k * n + q]
                    v[k * n + p] = c * x1 - s * ec * x2
                    v[k * n + q] = s * x1 + c * ec * x2
    resid[0] = sqrt(off)
    for i in range(n):
        w[i] = a[i * n + i].real
    # stable insertion sort, columns of v follow
    for i in range(1, n):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            tmp = w[j - 1]
            w[j - 1] = w[j]
            w[j] = tmp
            for k in range(n):
                x1 = v[k * n + j - 1]
                v[k * n + j - 1] = v[k * n + j]
                v[k * n + j] = x1
            j -= 1
    return ERR_NONE


cdef struct Workspace:
    int n
    cplx* work
    cplx* vec
    double* w
    double* f
    double resid
    double bad_eig


cdef int _ws_alloc(Workspace* ws, int n) noexcept nogil:
    ws.n = n
    ws.work = <cplx*> malloc(n * n * sizeof(cplx))
    ws.vec = <cplx*> malloc(n * n * sizeof(cplx))
    ws.w = <double*> malloc(n * sizeof(double))
    ws.f = <double*> malloc(n * sizeof(double))
    ws.resid = 0.0
    ws.bad_eig = 0.0
    if ws.work == NULL or ws.vec == NULL or ws.w == NULL or ws.f == NULL:
        return -1
    return 0


cdef void _ws_free(Workspace* ws) noexcept nogil:
    free(ws.work)
    free(ws.vec)
    free(ws.w)
    free(ws.f)
    ws.work = NULL
    ws.vec = NULL
    ws.w = NULL
    ws.f = NULL


cdef int _spectrum_power(const cplx* h, Workspace* ws, double p,
                         double rank_tol, double neg_tol) noexcept nogil:
    """Eigen-decompose h into ws and store f(lambda) in ws.f."""
    cdef int i, n = ws.n, rc
    memcpy(ws.work, h, n * n * sizeof(cplx))
    rc = _jacobi(ws.work, n, ws.w, ws.vec, _MAX_SWEEPS, _JACOBI_TOL, &ws.resid)
    if rc != ERR_NONE:
        return rc
    if ws.w[0] < -neg_tol:
        ws.bad_eig = ws.w[0]
        return ERR_NEGATIVE
    for i in range(n):
        if ws.w[i] > rank_tol:
            ws.f[i] = pow(ws.w[i], p)
        else:
            ws.f[i] = 0.0
    return ERR_NONE


cdef int _psd_power(const cplx* h, Workspace* ws, double p, double rank_tol,
                    double neg_tol, cplx* out) noexcept nogil:
    cdef int i, j, k, n = ws.n, rc
    cdef cplx acc
    rc = _spectrum_power(h, ws, p, rank_tol, neg_tol)
    if rc != ERR_NONE:
        return rc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + ws.vec[i * n + k] * ws.f[k] * ws.vec[j * n + k].conjugate()
            out[i * n + j] = acc
    return ERR_NONE


cdef void _matmul(const cplx* a, const cplx* b, cplx* out, int n) noexcept nogil:
    cdef int i, j, k
    cdef cplx acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + a[i * n + k] * b[k * n + j]
            out[i * n + j] = acc


cdef cplx _trace_product(const cplx* a, const cplx* b, int n) noexcept nogil:
    cdef int i, k
    cdef cplx acc = 0
    for i in range(n):
        for k in range(n):
            acc = acc + a[i * n + k] * b[k * n + i]
    return acc


cdef _raise(int rc, Workspace* ws, double neg_tol):
    if rc == ERR_NOCONV:
        raise NumericalError(
            f"Jacobi eigensolver did not converge in {_MAX_SWEEPS} sweeps; "
            f"off-diagonal residual {ws.resid:.3e}"
        )
    if rc == ERR_NEGATIVE:
        raise ValidationError(
            f"matrix is not positive semidefinite: eigenvalue {ws.bad_eig:.3e} < -{neg_tol:g}"
        )
    raise MemoryError()


def _as_square(h):
    arr = np.ascontiguousarray(h, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError("expected a square matrix")
    return arr


def hermitian_eig(h, int max_sweeps=_MAX_SWEEPS, double tol=_JACOBI_TOL):
    """Cyclic complex Jacobi eigensolver (ascending eigenvalues, unitary V)."""
    arr = _as_square(h).copy()
    cdef int n = arr.shape[0]
    w = np.empty(n)
    v = np.empty((n, n), dtype=complex)
    cdef cplx[:, ::1] av = arr
    cdef double[::1] wv = w
    cdef cplx[:, ::1] vv = v
    cdef double resid = 0.0
    cdef int rc
    if n == 0:
        return w, v
    rc = _jacobi(&av[0, 0], n, &wv[0], &vv[0, 0], max_sweeps, tol, &resid)
    if rc != ERR_NONE:
        raise NumericalError(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps; "
            f"off-diagonal residual {resid:.3e}"
        )
    return w, v


def psd_power(h, double p, double rank_tol=1e-10, double neg_tol=1e-10):
    """Support pseudo-power of a PSD Hermitian matrix."""
    arr = _as_square(h)
    cdef int n = arr.shape[0]
    out = np.empty((n, n), dtype=complex)
    cdef cplx[:, ::1] av = arr
    cdef cplx[:, ::1] ov = out
    cdef Workspace ws
    cdef int rc
    if _ws_alloc(&ws, n) != 0:
        _ws_free(&ws)
        raise MemoryError()
    try:
        rc = _psd_power(&av[0, 0], &ws, p, rank_tol, neg_tol, &ov[0, 0])
        if rc != ERR_NONE:
            _raise(rc, &ws, neg_tol)
    finally:
        _ws_free(&ws)
    return out


def sigma_from_params(x, int dim, int mode):
    """Real density matrix from unconstrained coordinates (see _purepy)."""
    xa = np.ascontiguousarray(x, dtype=float)
    out = np.empty((dim, dim), dtype=complex)
    cdef double[::1] xv = xa
    cdef cplx[:, ::1] ov = out
    if _sigma_from_params(&xv[0], dim, mode, &ov[0, 0]) != 0:
        return None
    return out


cdef int _sigma_from_params(const double* x, int d, int mode, cplx* out) noexcept nogil:
    cdef int i, j, k, idx
    cdef double tr = 0.0, acc
    cdef int npar = d * (d + 1) // 2 if mode == 0 else d
    for i in range(npar):
        tr += x[i] * x[i]
    if tr <= 1e-12:
        return -1
    if mode == 0:
        # lower-triangular L filled row by row; row i starts at i(i+1)/2
        for i in range(d):
            for j in range(i + 1):
                acc = 0.0
                for k in range(j + 1):
                    acc += x[i * (i + 1) // 2 + k] * x[j * (j + 1) // 2 + k]
                out[i * d + j] = acc / tr
                out[j * d + i] = acc / tr
    else:
        for i in range(d):
            for j in range(d):
                out[i * d + j] = x[i] * x[j] / tr
    return 0


cdef class KernelObjective:
    """sigma -> trace kernel for fixed rho and alpha (see _purepy)."""

    cdef readonly int kind
    cdef readonly int dim
    cdef readonly double alpha
    cdef readonly double rank_tol
    cdef readonly object rho
    cdef cplx* pre
    cdef cplx* post
    cdef cplx* sig
    cdef cplx* m1
    cdef cplx* m2
    cdef Workspace ws
    cdef int last_rc

    def __cinit__(self, int kind, rho, double alpha, double rank_tol=1e-10):
        self.pre = NULL
        self.post = NULL
        self.sig = NULL
        self.m1 = NULL
        self.m2 = NULL
        self.ws.work = NULL
        self.ws.vec = NULL
        self.ws.w = NULL
        self.ws.f = NULL

    def __init__(self, int kind, rho, double alpha, double rank_tol=1e-10):
        arr = _as_square(rho)
        if kind not in (0, 1, 2):
            raise ValidationError(f"unknown kernel kind {kind!r}")
        cdef int n = arr.shape[0]
        self.kind = kind
        self.dim = n
        self.alpha = alpha
        self.rank_tol = rank_tol
        self.rho = arr.copy()
        self.pre = <cplx*> malloc(n * n * sizeof(cplx))
        self.post = <cplx*> malloc(n * n * sizeof(cplx))
        self.sig = <cplx*> malloc(n * n * sizeof(cplx))
        self.m1 = <cplx*> malloc(n * n * sizeof(cplx))
        self.m2 = <cplx*> malloc(n * n * sizeof(cplx))
        if (_ws_alloc(&self.ws, n) != 0 or self.pre == NULL or self.post == NULL
                or self.sig == NULL or self.m1 == NULL or self.m2 == NULL):
            raise MemoryError()
        cdef cplx[:, ::1] rv = arr
        cdef int rc
        if kind == 0:
            rc = _psd_power(&rv[0, 0], &self.ws, alpha, rank_tol, 1e-10, self.pre)
        elif kind == 1:
            rc = _psd_power(&rv[0, 0], &self.ws, (1.0 - alpha) / (2.0 * alpha),
                            rank_tol, 1e-10, self.pre)
        else:
            rc = _psd_power(&rv[0, 0], &self.ws, -0.5, rank_tol, 1e-10, self.pre)
            if rc == ERR_NONE:
                rc = _psd_power(&rv[0, 0], &self.ws, 0.5, rank_tol, 1e-10, self.m1)
                _matmul(self.m1, self.m1, self.post, n)
        if rc != ERR_NONE:
            _raise(rc, &self.ws, 1e-10)

    def __dealloc__(self):
        free(self.pre)
        free(self.post)
        free(self.sig)
        free(self.m1)
        free(self.m2)
        _ws_free(&self.ws)

    cdef cplx _evaluate(self) noexcept nogil:
        """Kernel at the state held in self.sig; NaN on failure (see last_rc)."""
        cdef int n = self.dim, i, rc
        cdef double a = self.alpha, acc
        cdef cplx nan_c = NAN
        if self.kind == 0:
            rc = _psd_power(self.sig, &self.ws, 1.0 - a, self.rank_tol, 1e-10, self.m1)
            self.last_rc = rc
            if rc != ERR_NONE:
                return nan_c
            return _trace_product(self.pre, self.m1, n)
        _matmul(self.pre, self.sig, self.m2, n)
        _matmul(self.m2, self.pre, self.m1, n)
        if self.kind == 1:
            rc = _spectrum_power(self.m1, &self.ws, a, self.rank_tol, 1e-10)
            self.last_rc = rc
            if rc != ERR_NONE:
                return nan_c
            acc = 0.0
            for i in range(n):
                acc += self.ws.f[i]
            return acc
        rc = _psd_power(self.m1, &self.ws, 1.0 - a, self.rank_tol, 1e-10, self.m2)
        self.last_rc = rc
        if rc != ERR_NONE:
            return nan_c
        return _trace_product(self.m2, self.post, n)

    cdef double _eval_params(self, const double* x, int mode) noexcept nogil:
        if _sigma_from_params(x, self.dim, mode, self.sig) != 0:
            return -INFINITY
        return self._evaluate().real

    def __call__(self, sigma):
        arr = np.ascontiguousarray(sigma, dtype=complex)
        if arr.shape != (self.dim, self.dim):
            raise ValidationError(
                f"sigma has shape {arr.shape}, expected {(self.dim, self.dim)}"
            )
        cdef cplx[:, ::1] sv = arr
        memcpy(self.sig, &sv[0, 0], self.dim * self.dim * sizeof(cplx))
        cdef cplx val = self._evaluate()
        if self.last_rc != ERR_NONE:
            _raise(self.last_rc, &self.ws, 1e-10)
        return complex(val.real, val.imag)

    def eval_params(self, x, int mode):
        xa = np.ascontiguousarray(x, dtype=float)
        cdef double[::1] xv = xa
        cdef double val = self._eval_params(&xv[0], mode)
        if isnan(val):
            _raise(self.last_rc, &self.ws, 1e-10)
        return val

    cdef raise_last(self):
        _raise(self.last_rc, &self.ws, 1e-10)


cdef class ParamObjective:
    """Minimisation target -kernel(sigma(x)) + (|x|^2 - 1)^2 (see _purepy)."""

    cdef readonly KernelObjective kernel
    cdef readonly int mode

    def __init__(self, KernelObjective kernel, int mode):
        self.kernel = kernel
        self.mode = mode

    cdef double _call(self, const double* x, int n) noexcept nogil:
        cdef double k = self.kernel._eval_params(x, self.mode)
        cdef double pen = 0.0
        cdef int i
        if k == -INFINITY:
            return INFINITY
        for i in range(n):
            pen += x[i] * x[i]
        pen -= 1.0
        return -k + pen * pen

    def __call__(self, x):
        xa = np.ascontiguousarray(x, dtype=float)
        cdef double[::1] xv = xa
        cdef double val = self._call(&xv[0], xa.shape[0])
        if isnan(val):
            self.kernel.raise_last()
        return val


cdef double _feval(object func, ParamObjective fast, double* x, int n) except? -1.0:
    cdef double val
    cdef double[::1] view
    if fast is not None:
        val = fast._call(x, n)
        if isnan(val):
            try:
                fast.kernel.raise_last()
            except Exception as exc:
                raise type(exc)(f"{exc} (parameters {[x[i] for i in range(n)]})") from exc
    else:
        arr = np.empty(n)
        view = arr
        memcpy(&view[0], x, n * sizeof(double))
        val = func(arr)
        if isnan(val):
            raise NumericalError(f"objective returned NaN at parameters {arr.tolist()}")
    return val


cdef void _sort_simplex(double* sim, double* fs, int n, double* tmp) noexcept nogil:
    cdef int i, j, k
    cdef double ft
    for i in range(1, n + 1):
        j = i
        while j > 0 and fs[j - 1] > fs[j]:
            ft = fs[j - 1]
            fs[j - 1] = fs[j]
            fs[j] = ft
            memcpy(tmp, &sim[(j - 1) * n], n * sizeof(double))
            memcpy(&sim[(j - 1) * n], &sim[j * n], n * sizeof(double))
            memcpy(&sim[j * n], tmp, n * sizeof(double))
            j -= 1


def nelder_mead(func, x0, double step, double ftol, double xtol, int max_evals):
    """Adaptive Nelder-Mead minimisation; returns (x_best, f_best, n_evals)."""
    xa = np.ascontiguousarray(x0, dtype=float)
    cdef int n = xa.shape[0]
    cdef ParamObjective fast = func if isinstance(func, ParamObjective) else None
    cdef double rho_ = 1.0, chi = 1.0 + 2.0 / n
    cdef double psi = 0.75 - 1.0 / (2.0 * n), sigma = 1.0 - 1.0 / n
    sim_a = np.empty((n + 1) * n)
    fs_a = np.empty(n + 1)
    work_a = np.empty(5 * n)
    cdef double[::1] simv = sim_a
    cdef double[::1] fsv = fs_a
    cdef double[::1] wv = work_a
    cdef double[::1] x0v = xa
    cdef double* sim = &simv[0]
    cdef double* fs = &fsv[0]
    cdef double* xbar = &wv[0]
    cdef double* xr = &wv[n]
    cdef double* xe = &wv[2 * n]
    cdef double* xc = &wv[3 * n]
    cdef double* tmp = &wv[4 * n]
    cdef int i, j, nev
    cdef double fr, fe, fc, spread_f, spread_x, d
    cdef bint shrink
    for j in range(n):
        sim[j] = x0v[j]
    fs[0] = _feval(func, fast, sim, n)
    for i in range(1, n + 1):
        for j in range(n):
            sim[i * n + j] = x0v[j]
        sim[i * n + i - 1] += step
        fs[i] = _feval(func, fast, &sim[i * n], n)
    nev = n + 1
    _sort_simplex(sim, fs, n, tmp)
    while nev < max_evals:
        spread_f = 0.0
        spread_x = 0.0
        for i in range(1, n + 1):
            d = fabs(fs[i] - fs[0])
            if d > spread_f or isnan(d):
                spread_f = d
            for j in range(n):
                d = fabs(sim[i * n + j] - sim[j])
                if d > spread_x:
                    spread_x = d
        if spread_f <= ftol and spread_x <= xtol:
            break
        for j in range(n):
            xbar[j] = 0.0
            for i in range(n):
                xbar[j] += sim[i * n + j]
            xbar[j] /= n
        for j in range(n):
            xr[j] = xbar[j] + rho_ * (xbar[j] - sim[n * n + j])
        fr = _feval(func, fast, xr, n)
        nev += 1
        shrink = False
        if fr < fs[0]:
            for j in range(n):
                xe[j] = xbar[j] + rho_ * chi * (xbar[j] - sim[n * n + j])
            fe = _feval(func, fast, xe, n)
            nev += 1
            if fe < fr:
                memcpy(&sim[n * n], xe, n * sizeof(double))
                fs[n] = fe
            else:
                memcpy(&sim[n * n], xr, n * sizeof(double))
                fs[n] = fr
        elif fr < fs[n - 1]:
            memcpy(&sim[n * n], xr, n * sizeof(double))
            fs[n] = fr
        elif fr < fs[n]:
            for j in range(n):
                xc[j] = xbar[j] + psi * rho_ * (xbar[j] - sim[n * n + j])
            fc = _feval(func, fast, xc, n)
            nev += 1
            if fc <= fr:
                memcpy(&sim[n * n], xc, n * sizeof(double))
                fs[n] = fc
            else:
                shrink = True
        else:
            for j in range(n):
                xc[j] = xbar[j] - psi * (xbar[j] - sim[n * n + j])
            fc = _feval(func, fast, xc, n)
            nev += 1
            if fc < fs[n]:
                memcpy(&sim[n * n], xc, n * sizeof(double))
                fs[n] = fc
            else:
                shrink = True
        if shrink:
            for i in range(1, n + 1):
                for j in range(n):
                    sim[i * n + j] = sim[j] + sigma * (sim[i * n + j] - sim[j])
                fs[i] = _feval(func, fast, &sim[i * n], n)
            nev += n
        _sort_simplex(sim, fs, n, tmp)
    return sim_a[:n].copy(), float(fs[0]), nev
