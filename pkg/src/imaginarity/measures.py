"""Imaginarity measures: definitional (optimised over real states),
pure-restricted, grid-oracle and closed-form evaluations.

Every measure is a decreasing function of a kernel maximised over real
states sigma:

* T: 1 - k^(1/a)
* S: (k^(1/(1-a)) - 1) / (a - 1)
* O: (k^(1/a) - 1) / (a - 1)
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import optimizer as opt
from .divergences import Family, check_alpha, kernel_objective
from .errors import ValidationError
from .states import canonical_density, validate_density

NEG_TOL = 1e-9


@dataclass(frozen=True)
class MeasureKind:
    family: Family
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "alpha", check_alpha(self.alpha))

    def __str__(self):
        return f"{self.family.value}(alpha={self.alpha:g})"


def as_kind(kind, alpha=None):
    if isinstance(kind, MeasureKind):
        return kind
    return MeasureKind(Family(kind), alpha)


@dataclass
class MeasureResult:
    value: float
    method: str
    kind: MeasureKind
    kernel_value: float
    optimal_sigma: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "family": self.kind.family.value,
            "alpha": self.kind.alpha,
            "method": self.method,
            "value": self.value,
            "kernel_value": self.kernel_value,
        }
        if self.optimal_sigma is not None:
            out["optimal_sigma"] = np.real(self.optimal_sigma).tolist()
        out.update(self.diagnostics)
        return out


def value_from_kernel(kind, k):
    """Apply the family's monotone transform to a maximal kernel value."""
    a = kind.alpha
    k = max(float(k), 0.0)
    fam = kind.family
    if fam is Family.T:
        v = 1.0 - k ** (1.0 / a)
    elif fam is Family.S:
        v = (k ** (1.0 / (1.0 - a)) - 1.0) / (a - 1.0)
    else:
        v = (k ** (1.0 / a) - 1.0) / (a - 1.0)
    return v


def kernel_from_value(kind, v):
    a = kind.alpha
    if kind.family is Family.T:
        return (1.0 - v) ** a
    if kind.family is Family.S:
        return (1.0 + (a - 1.0) * v) ** (1.0 - a)
    return (1.0 + (a - 1.0) * v) ** a


def _clamp(v, what):
    if v < -NEG_TOL:
        raise ValidationError(f"{what} came out negative ({v:.3e}); kernel exceeds 1")
    return max(v, 0.0)


def _result(kind, k, method, sigma=None, **diag):
    v = _clamp(value_from_kernel(kind, k), f"{kind} {method} value")
    return MeasureResult(value=v, method=method, kind=kind, kernel_value=float(k),
                         optimal_sigma=sigma, diagnostics=diag)


def measure_definitional(rho, kind, cfg=None, alpha=None):
    """Minimum over all real states, via maximisation of the kernel."""
    kind = as_kind(kind, alpha)
    rho = validate_density(rho)
    obj = kernel_objective(kind.family, rho, kind.alpha)
    sigma, k = opt.maximize_over_real_states(obj, rho.shape[0], cfg)
    return _result(kind, k, "definitional", sigma)


def measure_pure_restricted(rho, kind, cfg=None, alpha=None):
    """Minimum over pure real states only."""
    kind = as_kind(kind, alpha)
    rho = validate_density(rho)
    obj = kernel_objective(kind.family, rho, kind.alpha)
    sigma, k = opt.maximize_over_pure_real_states(obj, rho.shape[0], cfg)
    return _result(kind, k, "pure-restricted", sigma)


def measure_grid_oracle(rho, kind, resolution=256, alpha=None):
    """Brute-force qubit value, independent of the simplex search."""
    kind = as_kind(kind, alpha)
    rho = validate_density(rho)
    obj = kernel_objective(kind.family, rho, kind.alpha)
    sigma, k = opt.grid_oracle_qubit(obj, resolution)
    return _result(kind, k, "grid-oracle", sigma, resolution=resolution)


def _check_A(A):
    A = float(A)
    if not (0.0 <= A <= 1.0):
        raise ValidationError(f"A must lie in [0, 1], got {A}")
    return A


def _pure_form(b, kind):
    a = kind.alpha
    if kind.family is Family.T:
        return 1.0 - b ** (1.0 / a)
    if kind.family is Family.S:
        return (b ** (a / (1.0 - a)) - 1.0) / (a - 1.0)
    return (b ** ((1.0 - a) / a) - 1.0) / (a - 1.0)


def closed_form_pure(A, kind, alpha=None):
    """Closed form for a qubit pure state with imaginarity parameter A."""
    kind = as_kind(kind, alpha)
    A = _check_A(A)
    return _pure_form((1.0 + A) / 2.0, kind)


def closed_form_canonical_x(x, kind, alpha=None):
    """Closed form in the canonical off-diagonal real part x (pure qubit, x in [0, 1/2])."""
    kind = as_kind(kind, alpha)
    x = float(x)
    if not (0.0 <= x <= 0.5):
        raise ValidationError(f"x must lie in [0, 1/2], got {x}")
    return _pure_form(x + 0.5, kind)


def canonical_x_raw(x, kind):
    """closed_form_canonical_x without the domain check (for finite differences)."""
    return _pure_form(x + 0.5, kind)


def x11(x, y, m):
    """Modulus of the off-diagonal entry after a bit flip with parameter m."""
    return math.sqrt((1 - 2 * m) ** 2 * y * y + x * x)


def after_bitflip_raw(x, y, m, kind, variant="corrected"):
    """Bit-flip closed forms without the pure-state constraint check.

    Exposed so partial derivatives in x at fixed y can be taken numerically.
    ``variant="printed"`` evaluates the published O expression verbatim, sign
    slips included; ``"corrected"`` uses the form consistent with its own
    derivative and with the m = 0, 1 limits.
    """
    a = kind.alpha
    X = x11(x, y, m)
    # X11 = 0 only when x = 0 and m = 1/2: the off-diagonal vanishes, a real state
    r = x / X if X > 0 else 1.0
    fam = kind.family
    if fam is Family.T:
        return 1.0 - 2.0 ** (-1.0 / a) * (r + 1.0) ** (1.0 / a)
    if fam is Family.S:
        return (2.0 ** (a / (a - 1.0)) * (r + 1.0) ** (a / (1.0 - a)) - 1.0) / (a - 1.0)
    if variant == "printed":
        if X + x == 0:
            return 0.0
        p = 2.0 ** (1.0 / a)
        return -(2.0 ** (-1.0 / a)) * (X * (p + 2.0 * (r + 1.0) ** (1.0 / a)) - p * x) / ((a - 1.0) * (X + x))
    if variant != "corrected":
        raise ValidationError(f"unknown variant {variant!r}; use 'corrected' or 'printed'")
    return (((r + 1.0) / 2.0) ** (1.0 / a - 1.0) - 1.0) / (a - 1.0)


def closed_form_after_bitflip(x, y, m, kind, alpha=None, variant="corrected"):
    """Closed form of the measure of a canonical pure qubit after a bit flip."""
    kind = as_kind(kind, alpha)
    x, y, m = float(x), float(y), float(m)
    if x < 0 or y < 0:
        raise ValidationError(f"x and y must be non-negative, got x={x}, y={y}")
    if abs(x * x + y * y - 0.25) > 1e-9:
        raise ValidationError(f"x^2 + y^2 must equal 1/4 for a pure state, got {x * x + y * y:.12g}")
    if not (0.0 <= m <= 1.0):
        raise ValidationError(f"m must lie in [0, 1], got {m}")
    return after_bitflip_raw(x, y, m, kind, variant)


def inequality_gaps(A, alpha):
    """(S - O, O - T) from the pure-state closed forms."""
    a = check_alpha(alpha)
    t = closed_form_pure(A, MeasureKind(Family.T, a))
    s = closed_form_pure(A, MeasureKind(Family.S, a))
    o = closed_form_pure(A, MeasureKind(Family.O, a))
    return s - o, o - t


def measure(rho, kind, method, cfg=None, resolution=256):
    """Dispatch on method name: definitional, pure-restricted or grid-oracle."""
    if method == "definitional":
        return measure_definitional(rho, kind, cfg)
    if method == "pure-restricted":
        return measure_pure_restricted(rho, kind, cfg)
    if method == "grid-oracle":
        return measure_grid_oracle(rho, kind, resolution)
    raise ValidationError(f"unknown method {method!r}")


def discrepancy_report(rho, kind, cfg=None, closed_form=None):
    """Definitional, pure-restricted and closed-form values side by side.

    ``closed_form`` may be supplied when the state is known in closed form;
    otherwise it is computed for pure qubits from their imaginarity parameter.
    """
    kind = as_kind(kind)
    rho = validate_density(rho)
    if closed_form is None and rho.shape[0] == 2:
        w = np.linalg.eigvalsh(rho)
        if w[0] < 1e-9:
            # pure qubit: A = |sum psi_j^2| = |tr(rho rho^T)|^(1/2)
            A = min(1.0, math.sqrt(abs(np.trace(rho @ rho.T))))
            closed_form = closed_form_pure(A, kind)
    d = measure_definitional(rho, kind, cfg).value
    p = measure_pure_restricted(rho, kind, cfg).value
    row = {
        "family": kind.family.value,
        "alpha": kind.alpha,
        "definitional": d,
        "pure_restricted": p,
        "closed_form": closed_form,
        "pure_minus_definitional": p - d,
    }
    if closed_form is not None:
        row["closed_minus_definitional"] = closed_form - d
        row["closed_minus_pure"] = closed_form - p
    return row


def canonical_state(A):
    return canonical_density(A)
