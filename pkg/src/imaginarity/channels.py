"""Kraus channels: validation, application, the bit-flip / phase-damping /
amplitude-damping families and random real channels."""
import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .linalg import as_square
from .states import canonical_density, validate_density

CPTP_TOL = 1e-9


class ChannelKind(str, Enum):
    BF = "bf"
    PD = "pd"
    AD = "ad"

    @property
    def param_name(self):
        return {"bf": "m", "pd": "n", "ad": "p"}[self.value]


@dataclass(frozen=True)
class KrausChannel:
    kraus: tuple
    label: str = ""

    def __post_init__(self):
        ops = tuple(as_square(k, "Kraus operator") for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        dims = {k.shape for k in ops}
        if len(dims) != 1:
            raise ValidationError(f"Kraus operators have mismatched shapes {sorted(dims)}")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self):
        return self.kraus[0].shape[0]

    def __call__(self, rho):
        return apply(self, rho)


def completeness_error(ch):
    s = sum(k.conj().T @ k for k in ch.kraus)
    return float(np.max(np.abs(s - np.eye(ch.dim))))


def validate_cptp(ch, tol=CPTP_TOL):
    """True iff sum_j K_j^dagger K_j = I within ``tol``."""
    return completeness_error(ch) <= tol


def is_real_channel(ch, tol=1e-12):
    return all(float(np.max(np.abs(k.imag))) <= tol for k in ch.kraus)


def apply(ch, rho):
    """sum_j K_j rho K_j^dagger."""
    a = as_square(rho, "rho")
    if a.shape[0] != ch.dim:
        raise ValidationError(f"channel acts on dim {ch.dim} but rho has dim {a.shape[0]}")
    out = sum(k @ a @ k.conj().T for k in ch.kraus)
    return 0.5 * (out + out.conj().T)


def _check_param(value, name):
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"channel parameter {name} must lie in [0, 1], got {value}")
    return value


def bit_flip(m):
    m = _check_param(m, "m")
    return KrausChannel(
        (np.sqrt(m) * np.eye(2), np.sqrt(1 - m) * np.array([[0.0, 1.0], [1.0, 0.0]])),
        f"bf:m={m!r}",
    )


def phase_damping(n):
    n = _check_param(n, "n")
    return KrausChannel(
        (np.diag([1.0, np.sqrt(1 - n)]), np.diag([0.0, np.sqrt(n)])),
        f"pd:n={n!r}",
    )


def amplitude_damping(p):
    p = _check_param(p, "p")
    return KrausChannel(
        (np.diag([1.0, np.sqrt(1 - p)]), np.array([[0.0, np.sqrt(p)], [0.0, 0.0]])),
        f"ad:p={p!r}",
    )


_FACTORIES = {ChannelKind.BF: bit_flip, ChannelKind.PD: phase_damping, ChannelKind.AD: amplitude_damping}


def named_channel(kind, param):
    return _FACTORIES[ChannelKind(kind)](param)


def channel_transformed_state(kind, A, param):
    """Image of the canonical pure state with parameter A, written out entrywise."""
    kind = ChannelKind(kind)
    A = float(A)
    if not (0.0 <= A <= 1.0):
        raise ValidationError(f"A must lie in [0, 1], got {A}")
    q = _check_param(param, kind.param_name)
    r = np.sqrt(1 - A * A)
    if kind is ChannelKind.BF:
        m = q
        return np.array([
            [A * (m - 0.5) + 0.5, 0.5j * r * (1 - 2 * m)],
            [0.5j * r * (2 * m - 1), 0.5 * (-2 * A * m + A + 1)],
        ])
    if kind is ChannelKind.PD:
        n = q
        return np.array([
            [(A + 1) / 2, -0.5j * r * np.sqrt(1 - n)],
            [0.5j * r * np.sqrt(1 - n), (1 - A) / 2],
        ])
    p = q
    return np.array([
        [0.5 * (A * (-p) + A + p + 1), -0.5j * r * np.sqrt(1 - p)],
        [0.5j * r * np.sqrt(1 - p), 0.5 * (A - 1) * (p - 1)],
    ])


def apply_to_canonical(kind, A, param):
    return apply(named_channel(kind, param), canonical_density(A))


def random_real_channel(dim, n_kraus, seed=None):
    """Real isometry of shape (n_kraus*dim, dim) sliced into Kraus blocks."""
    dim, n_kraus = int(dim), int(n_kraus)
    if n_kraus < 1 or dim < 1:
        raise ValidationError("dim and n_kraus must be positive")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(n_kraus * dim, dim)))
    q = q * np.sign(np.diag(r))
    blocks = tuple(q[j * dim:(j + 1) * dim].astype(complex) for j in range(n_kraus))
    return KrausChannel(blocks, f"random-real(dim={dim}, n={n_kraus}, seed={seed})")


def unitary_channel(u, label="unitary"):
    return KrausChannel((np.asarray(u, dtype=complex),), label)


# ---- channel spec strings ---------------------------------------------------

_SPEC = re.compile(r"^(bf|pd|ad):([a-z])=(.+)$")


def parse_channel_spec(spec):
    """Decode ``bf:m=0.3``, ``pd:n=0.2``, ``ad:p=0.1`` or ``file:<path>``."""
    spec = spec.strip()
    if spec.startswith("file:"):
        return load_channel(spec[5:])
    match = _SPEC.match(spec)
    if not match:
        raise ParseError(
            f"bad channel spec {spec!r}; expected bf:m=<v>, pd:n=<v>, ad:p=<v> or file:<path>"
        )
    kind = ChannelKind(match.group(1))
    if match.group(2) != kind.param_name:
        raise ParseError(f"channel {kind.value} takes parameter '{kind.param_name}', got '{match.group(2)}'")
    try:
        value = float(match.group(3))
    except ValueError:
        raise ParseError(f"channel parameter {match.group(3)!r} is not a number") from None
    return named_channel(kind, value)


def load_channel(path):
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"{path}: cannot read channel file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "kraus" not in obj:
        raise ParseError(f"{path}: missing field 'kraus'")
    ops = []
    for i, entry in enumerate(obj["kraus"]):
        if not isinstance(entry, dict) or "re" not in entry or "im" not in entry:
            raise ParseError(f"{path}: kraus[{i}] needs fields 're' and 'im'")
        try:
            ops.append(np.array(entry["re"], dtype=float) + 1j * np.array(entry["im"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: kraus[{i}] is not numeric ({exc})") from None
    ch = KrausChannel(tuple(ops), f"file:{path}")
    if not validate_cptp(ch):
        raise ValidationError(
            f"{path}: Kraus operators are not trace preserving "
            f"(max |sum K^dagger K - I| = {completeness_error(ch):.3e})"
        )
    return ch


def save_channel(path, ch):
    obj = {"kraus": [{"re": k.real.tolist(), "im": k.imag.tolist()} for k in ch.kraus]}
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def output_state(ch, rho):
    """apply() followed by density-matrix validation of the result."""
    return validate_density(apply(ch, rho), "channel output")
