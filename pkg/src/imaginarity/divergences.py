"""Tsallis, sandwiched Renyi and Tsallis operator divergences and their trace kernels.

Each measure is a monotone transform of one of three trace kernels:

* Tsallis:    tr(rho^a sigma^(1-a))
* sandwiched: tr[(rho^g sigma rho^g)^a],  g = (1-a)/(2a)
* operator:   tr[rho^1/2 (rho^-1/2 sigma rho^-1/2)^(1-a) rho^1/2]

Fractional and negative powers use the support pseudo-power, so singular
rho is handled by annihilating sigma off its support.
"""
import math
from enum import Enum

from . import _backend
from .errors import ValidationError
from .linalg import as_square

IMAG_TOL = 1e-9
KERNEL_SLACK = 1e-9


class Family(str, Enum):
    T = "T"
    S = "S"
    O = "O"

    @property
    def code(self):
        return {"T": 0, "S": 1, "O": 2}[self.value]

    @property
    def long_name(self):
        return {
            "T": "Tsallis relative alpha-entropy",
            "S": "sandwiched Renyi relative entropy",
            "O": "Tsallis relative operator entropy",
        }[self.value]


def check_alpha(alpha):
    """Return alpha as float if it lies in [1/2, 1), else raise ValidationError."""
    a = float(alpha)
    if not (0.5 <= a < 1.0):
        raise ValidationError(f"alpha must lie in [1/2, 1), got {alpha}")
    return a


def _pair(rho, sigma):
    r = as_square(rho, "rho")
    s = as_square(sigma, "sigma")
    if r.shape != s.shape:
        raise ValidationError(f"dimension mismatch: rho {r.shape} vs sigma {s.shape}")
    return r, s


def kernel_objective(family, rho, alpha):
    """Callable sigma -> complex kernel with every rho power precomputed."""
    family = Family(family)
    return _backend.impl.KernelObjective(family.code, as_square(rho, "rho"), check_alpha(alpha))


def _kernel(family, rho, sigma, alpha):
    r, s = _pair(rho, sigma)
    val = kernel_objective(family, r, alpha)(s)
    if abs(val.imag) > IMAG_TOL:
        raise ValidationError(f"kernel has imaginary part {val.imag:.3e} > {IMAG_TOL:g}")
    return val.real


def tsallis_kernel(rho, sigma, alpha):
    """tr(rho^alpha sigma^(1-alpha))."""
    return _kernel(Family.T, rho, sigma, alpha)


def sandwiched_kernel(rho, sigma, alpha):
    """tr[(rho^g sigma rho^g)^alpha] with g = (1-alpha)/(2 alpha)."""
    return _kernel(Family.S, rho, sigma, alpha)


def operator_kernel(rho, sigma, alpha):
    """tr[rho^1/2 (rho^-1/2 sigma rho^-1/2)^(1-alpha) rho^1/2]."""
    return _kernel(Family.O, rho, sigma, alpha)


def family_kernel(family, rho, sigma, alpha):
    return _kernel(Family(family), rho, sigma, alpha)


def tsallis_relative_entropy(rho, sigma, alpha):
    """D_alpha(rho || sigma) = (1 - tr(rho^a sigma^(1-a))) / (1 - a)."""
    a = check_alpha(alpha)
    return (1.0 - tsallis_kernel(rho, sigma, a)) / (1.0 - a)


def sandwiched_renyi(sigma, rho, alpha):
    """F_alpha(sigma || rho) = ln tr[(rho^g sigma rho^g)^a] / (a - 1); +inf for a zero kernel."""
    a = check_alpha(alpha)
    k = sandwiched_kernel(rho, sigma, a)
    if k <= 0.0:
        return math.inf
    return math.log(k) / (a - 1.0)


def tsallis_operator_entropy_trace(rho, sigma, alpha):
    """(operator kernel - 1) / (alpha - 1); +inf for a zero kernel."""
    a = check_alpha(alpha)
    k = operator_kernel(rho, sigma, a)
    if k <= 0.0:
        return math.inf
    return (k - 1.0) / (a - 1.0)
