"""Loss of imaginarity of canonical pure qubits under BF, PD and AD channels.

``decay_formula_alpha34`` evaluates the alpha = 3/4 decay expressions term
by term from the s/t coefficients, with no algebraic simplification, so
they can be compared against optimiser-based values.
"""
import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

from .channels import ChannelKind, apply, named_channel
from .errors import NumericalError, ValidationError
from .measures import (MeasureKind, as_kind, closed_form_pure, measure_definitional,
                       measure_pure_restricted)
from .optimizer import OptConfig
from .states import canonical_density

SQRT_NEG_TOL = 1e-9
ROUNDOFF = 64 * 2.0 ** -52
CSV_HEADER = ("channel", "measure", "alpha", "A", "param", "delta_formula",
              "delta_pure_restricted", "delta_definitional")


@dataclass(frozen=True)
class STCoefficients:
    s: float
    t: float


def _check_unit(value, name):
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return value


def _sqrt(arg, what, scale=0.0, **inputs):
    # a difference that is zero up to round-off of its operands is zero
    if abs(arg) <= ROUNDOFF * scale:
        return 0.0
    if arg < -SQRT_NEG_TOL:
        echo = ", ".join(f"{k}={v!r}" for k, v in inputs.items())
        raise NumericalError(f"negative square-root argument {arg:.3e} in {what} ({echo})")
    return math.sqrt(max(arg, 0.0))


def st_coefficients(channel_kind, A, param):
    """The s and t coefficients for the given channel, A and channel parameter."""
    kind = ChannelKind(channel_kind)
    A = _check_unit(A, "A")
    q = _check_unit(param, kind.param_name)
    if kind is ChannelKind.BF:
        m = q
        s = A ** 2 * (1 - 2 * m) ** 2 - 2 * (m - 1) * m
        t = A * (1 - 2 * m) * _sqrt(A ** 2 * (1 - 2 * m) ** 2 - 4 * (m - 1) * m, "t1", A=A, m=m)
    elif kind is ChannelKind.PD:
        n = q
        s = n - A ** 2 * (n - 2)
        t = 2 * _sqrt(A ** 4 * (-n) + A ** 2 * n + A ** 4, "t2", A=A, n=n)
    else:
        p = q
        s = A ** 2 * (p - 2) * (p - 1) - 2 * A * (p - 1) * p + p ** 2 + p
        t = 2 * _sqrt((p - A ** 2 * (p - 1)) * (A * (-p) + A + p) ** 2, "t3", A=A, p=p)
    return STCoefficients(s, t)


def decay_formula_alpha34(channel_kind, A, param, family):
    """Closed-form decay M(rho) - M(channel(rho)) at alpha = 3/4."""
    kind = ChannelKind(channel_kind)
    if isinstance(family, MeasureKind):
        if family.alpha != 0.75:
            raise ValidationError(f"closed-form decay exists only for alpha = 3/4, got {family.alpha}")
        family = family.family
    fam = as_kind(family, 0.75).family.value
    A = _check_unit(A, "A")
    st = st_coefficients(kind, A, param)
    inputs = {"A": A, kind.param_name: param}
    scale = abs(st.s) + abs(st.t)
    r_minus = _sqrt(st.s - st.t, "sqrt(s - t)", scale, **inputs)
    r_plus = _sqrt(st.s + st.t, "sqrt(s + t)", scale, **inputs)
    cbrt2 = 2.0 ** (1.0 / 3.0)
    if kind is ChannelKind.BF:
        if fam == "T":
            return 0.25 * (2.0 ** (2 / 3) * ((r_minus + r_plus) / math.sqrt(2) + 1) ** (4 / 3)
                           - 2.0 ** (2 / 3) * (A + 1) ** (4 / 3))
        if fam == "S":
            return 0.5 * ((r_minus + r_plus) / math.sqrt(2) + 1) ** 3 - 0.5 * (A + 1) ** 3
        return (2.0 ** (4 / 3) * (math.sqrt(2) * r_minus + math.sqrt(2) * r_plus + 2) ** (1 / 3)
                - 2.0 ** (5 / 3) * (A + 1) ** (1 / 3))
    if kind is ChannelKind.PD:
        if fam == "T":
            return 0.125 * (cbrt2 * (r_minus + r_plus + 2) ** (4 / 3) - 2.0 ** (5 / 3) * (A + 1) ** (4 / 3))
        if fam == "S":
            return (r_minus + r_plus + 2) ** 3 / 16 - 0.5 * (A + 1) ** 3
        return 2.0 ** (4 / 3) * (r_minus + r_plus + 2) ** (1 / 3) - 2.0 ** (5 / 3) * (A + 1) ** (1 / 3)
    if fam == "T":
        return ((r_minus + r_plus + 2) ** (4 / 3) - 2 * cbrt2 * (A + 1) ** (4 / 3)) / 2.0 ** (8 / 3)
    if fam == "S":
        return (r_minus + r_plus + 2) ** 3 / 16 - 0.5 * (A + 1) ** 3
    return 2.0 ** (4 / 3) * (r_minus + r_plus + 2) ** (1 / 3) - 2.0 ** (5 / 3) * (A + 1) ** (1 / 3)


def effective_pure_delta(channel_kind, A, param, kind):
    """Decay when the channel output is scored as a pure state with the same |Im rho_01|.

    The output's Bloch component r_y is turned into A_eff = sqrt(1 - r_y^2)
    and fed to the pure-state closed form. This is the convention the
    alpha = 3/4 closed forms turn out to follow.
    """
    ck = ChannelKind(channel_kind)
    kind = as_kind(kind)
    out = apply(named_channel(ck, param), canonical_density(A))
    r_y = -2.0 * out[0, 1].imag
    a_eff = min(1.0, math.sqrt(max(0.0, 1.0 - r_y * r_y)))
    return closed_form_pure(A, kind) - closed_form_pure(a_eff, kind)


@dataclass(frozen=True)
class DecayPoint:
    A: float
    channel_param: float
    channel_kind: ChannelKind
    measure_kind: MeasureKind
    delta_formula: Optional[float]
    delta_definitional: Optional[float]
    delta_pure_restricted: float

    def csv_row(self):
        return (self.channel_kind.value, self.measure_kind.family.value, _fmt(self.measure_kind.alpha),
                _fmt(self.A), _fmt(self.channel_param), _fmt(self.delta_formula),
                _fmt(self.delta_pure_restricted), _fmt(self.delta_definitional))


def _fmt(v):
    return "" if v is None else f"{v:.17g}"


class _InitialCache:
    """Measures of the unchanged canonical state, shared across a sweep."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.store = {}

    def get(self, A, kind, method):
        key = (A, kind, method)
        if key not in self.store:
            f = measure_definitional if method == "definitional" else measure_pure_restricted
            self.store[key] = f(canonical_density(A), kind, self.cfg).value
        return self.store[key]


def decay_definitional(A, channel_kind, param, kind, cfg=None, definitional=True, _cache=None):
    """Decay of the canonical pure state with parameter A under a named channel.

    Fills the pure-restricted delta always, the definitional delta when
    ``definitional`` is set, and the closed-form delta only at alpha = 3/4.
    """
    ck = ChannelKind(channel_kind)
    kind = as_kind(kind)
    A = _check_unit(A, "A")
    param = _check_unit(param, ck.param_name)
    cfg = cfg or OptConfig()
    cache = _cache or _InitialCache(cfg)
    out = apply(named_channel(ck, param), canonical_density(A))
    pure = cache.get(A, kind, "pure-restricted") - measure_pure_restricted(out, kind, cfg).value
    full = None
    if definitional:
        full = cache.get(A, kind, "definitional") - measure_definitional(out, kind, cfg).value
    formula = decay_formula_alpha34(ck, A, param, kind.family) if kind.alpha == 0.75 else None
    return DecayPoint(A, param, ck, kind, formula, full, pure)


def sweep(channel_kind, kind, A_grid, param_grid, cfg=None, definitional=True):
    """All grid points, A-major then channel parameter."""
    A_grid, param_grid = list(A_grid), list(param_grid)
    if not A_grid or not param_grid:
        raise ValidationError("sweep grids must be non-empty")
    cfg = cfg or OptConfig()
    cache = _InitialCache(cfg)
    rows = []
    for A in A_grid:
        for q in param_grid:
            try:
                rows.append(decay_definitional(A, channel_kind, q, kind, cfg, definitional, cache))
            except Exception as exc:
                raise type(exc)(f"sweep failed at A={A!r}, param={q!r}: {exc}") from exc
    return rows


def write_csv(points, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for pt in points:
        writer.writerow(pt.csv_row())


def to_csv(points):
    buf = io.StringIO()
    write_csv(points, buf)
    return buf.getvalue()


def grid(n):
    """n evenly spaced points on [0, 1], endpoints exact."""
    n = int(n)
    if n < 1:
        raise ValidationError(f"grid size must be positive, got {n}")
    if n == 1:
        return [0.0]
    return [i / (n - 1) for i in range(n)]
