"""Hermitian eigendecomposition and matrix functions on small dense matrices."""
import numpy as np

from . import _backend
from .errors import ValidationError

HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10
NEG_TOL = 1e-10
IMAG_TOL = 1e-10


def as_square(m, name="matrix"):
    """Return ``m`` as a complex square ndarray or raise ValidationError."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def hermiticity_error(m):
    a = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(a - a.conj().T)))


def check_hermitian(m, tol=HERMITIAN_TOL, name="matrix"):
    a = as_square(m, name)
    err = hermiticity_error(a)
    # scale the tolerance with the entries so large Hermitian inputs are not rejected on round-off
    if err > tol * max(1.0, float(np.max(np.abs(a)))):
        raise ValidationError(f"{name} is not Hermitian: max |M - M^dagger| = {err:.3e} > {tol:g}")
    return a


def hermitian_eig(m, tol=HERMITIAN_TOL):
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian matrix.

    Uses a cyclic complex Jacobi iteration capped at 100 sweeps; raises
    NumericalError naming the off-diagonal residual if it does not converge.
    """
    a = check_hermitian(m, tol)
    return _backend.impl.hermitian_eig(a)


def matrix_power(m, p, rank_tol=RANK_TOL, neg_tol=NEG_TOL):
    """Support pseudo-power of a PSD Hermitian matrix.

    Eigenvalues at or below ``rank_tol`` map to zero, so negative ``p`` acts
    as a pseudo-inverse power on the support. Eigenvalues in ``[-neg_tol, 0)``
    are treated as round-off; anything more negative is rejected.
    """
    a = check_hermitian(m)
    return _backend.impl.psd_power(a, float(p), rank_tol, neg_tol)


def trace_product(a, b):
    """tr(AB) as a complex number."""
    a = as_square(a, "A")
    b = as_square(b, "B")
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a * b.T))


def real_trace_product(a, b, imag_tol=IMAG_TOL):
    """Real part of tr(AB) after checking the imaginary part is round-off."""
    t = trace_product(a, b)
    if abs(t.imag) > imag_tol:
        raise ValidationError(f"trace product has imaginary part {t.imag:.3e} > {imag_tol:g}")
    return t.real
