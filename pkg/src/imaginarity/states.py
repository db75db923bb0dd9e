"""Density matrices, pure states, realness, canonical qubit forms and sampling."""
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, UnsupportedDimensionError, ValidationError
from .linalg import as_square, check_hermitian, hermitian_eig

TRACE_TOL = 1e-10
NEG_TOL = 1e-10
NORM_TOL = 1e-12
# below this |sum psi_j^2| the global phase is arbitrary and we use 0
PHASE_DEGENERATE = 1e-14


def validate_density(rho, name="rho"):
    """Return rho as a complex array after checking Hermitian, unit trace and PSD."""
    a = check_hermitian(rho, name=name)
    tr = np.trace(a)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} trace is {tr.real:.12g}, expected 1 (tol {TRACE_TOL:g})")
    w, _ = hermitian_eig(a)
    if w[0] < -NEG_TOL:
        raise ValidationError(
            f"{name} is not positive semidefinite: min eigenvalue {w[0]:.3e} < -{NEG_TOL:g}"
        )
    return a


def validate_pure(psi, name="psi"):
    v = np.asarray(psi, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise ValidationError(f"{name} must be a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} has non-finite amplitudes")
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise ValidationError(f"{name} has squared norm {norm2:.15g}, expected 1 (tol {NORM_TOL:g})")
    return v


def density_from_pure(psi):
    v = validate_pure(psi)
    return np.outer(v, v.conj())


def is_real_state(rho, tol=1e-9):
    """True iff every entry of rho has imaginary part at most ``tol``."""
    a = as_square(rho, "rho")
    return bool(np.max(np.abs(a.imag)) <= tol)


def imaginarity_parameter(psi):
    """A = |sum_j psi_j^2|, which is 1 for real states and 0 when maximally imaginary."""
    v = validate_pure(psi)
    return float(min(1.0, abs(np.sum(v * v))))


def canonical_pure_state(A):
    """sqrt((1+A)/2)|0> + i sqrt((1-A)/2)|1>."""
    A = _check_unit_interval(A, "A")
    return np.array([np.sqrt((1 + A) / 2), 1j * np.sqrt((1 - A) / 2)])


def canonical_density(A):
    v = canonical_pure_state(A)
    return np.outer(v, v.conj())


def _check_unit_interval(value, name):
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return value


def _require_qubit(dim, what):
    if dim != 2:
        raise UnsupportedDimensionError(f"{what} is only defined for qubits (dim 2), got dim {dim}")


def canonicalize_pure(psi):
    """Real orthogonal O taking a qubit pure state to its canonical form.

    Returns ``(O, canonical)``, where ``canonical`` holds the amplitudes
    sqrt((1+A)/2), i sqrt((1-A)/2) and O psi equals it up to a global phase.
    """
    v = validate_pure(psi)
    _require_qubit(v.size, "pure-state canonicalization")
    s = np.sum(v * v)
    phase = 0.0 if abs(s) < PHASE_DEGENERATE else np.angle(s) / 2
    v = v * np.exp(-1j * phase)
    u, w = v.real, v.imag
    u_hat = u / np.linalg.norm(u)
    w = w - (w @ u_hat) * u_hat
    nw = np.linalg.norm(w)
    w_hat = w / nw if nw > 1e-12 else np.array([-u_hat[1], u_hat[0]])
    O = np.vstack([u_hat, w_hat])
    A = imaginarity_parameter(psi)
    return O, canonical_pure_state(A)


def bloch_vector(rho):
    a = as_square(rho, "rho")
    _require_qubit(a.shape[0], "Bloch vector")
    return np.array([2 * a[0, 1].real, -2 * a[0, 1].imag, (a[0, 0] - a[1, 1]).real])


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class CanonicalQubitForm:
    """Off-diagonal x - iy of the canonical qubit representative and the map to it.

    ``transform @ rho @ transform.T`` equals ``density()``.
    """

    x: float
    y: float
    transform: np.ndarray

    def density(self):
        return np.array([[0.5, self.x - 1j * self.y], [self.x + 1j * self.y, 0.5]])


def canonicalize_qubit_mixed(rho):
    """Canonical form [[1/2, x - iy], [x + iy, 1/2]] with x, y >= 0."""
    a = validate_density(rho)
    _require_qubit(a.shape[0], "mixed-state canonicalization")
    rx, ry, rz = bloch_vector(a)
    flip = np.eye(2)
    if ry < 0:
        # conjugating by diag(1, -1) negates r_x and r_y
        flip = np.diag([1.0, -1.0])
        rx, ry = -rx, -ry
    R = rotation(np.arctan2(rz, rx) / 2)
    T = R @ flip
    out = T @ a @ T.T
    return CanonicalQubitForm(x=float(max(0.0, out[1, 0].real)),
                              y=float(max(0.0, out[1, 0].imag)), transform=T)


def direct_sum(p, rho1, rho2):
    """Block-diagonal p rho1 (+) (1-p) rho2."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValidationError(f"direct-sum weight p must lie in (0, 1), got {p}")
    a = validate_density(rho1, "rho1")
    b = validate_density(rho2, "rho2")
    d1, d2 = a.shape[0], b.shape[0]
    out = np.zeros((d1 + d2, d1 + d2), dtype=complex)
    out[:d1, :d1] = p * a
    out[d1:, d1:] = (1 - p) * b
    return out


def _rng(seed):
    return np.random.default_rng(seed)


def _check_dim(dim):
    dim = int(dim)
    if dim < 2:
        raise ValidationError(f"dim must be at least 2, got {dim}")
    return dim


def random_pure(dim, seed):
    """Haar-random pure state from normalized complex-normal amplitudes."""
    dim = _check_dim(dim)
    rng = _rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim, rank=None, seed=None):
    """GG^dagger / tr(GG^dagger) with G a dim x rank complex-normal matrix."""
    dim = _check_dim(dim)
    rank = dim if rank is None else int(rank)
    if not (1 <= rank <= dim):
        raise ValidationError(f"rank must lie in [1, {dim}], got {rank}")
    rng = _rng(seed)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


def random_real_density(dim, seed=None, rank=None):
    """Real counterpart of random_density; always a free state."""
    dim = _check_dim(dim)
    rank = dim if rank is None else int(rank)
    if not (1 <= rank <= dim):
        raise ValidationError(f"rank must lie in [1, {dim}], got {rank}")
    rng = _rng(seed)
    g = rng.normal(size=(dim, rank))
    m = g @ g.T
    m = 0.5 * (m + m.T)
    return (m / np.trace(m)).astype(complex)


def random_orthogonal(dim, seed=None):
    """Haar-random real orthogonal matrix (QR with sign correction)."""
    rng = _rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


# ---- JSON state files -------------------------------------------------------

def _field(obj, key, path):
    if key not in obj:
        raise ParseError(f"{path}: missing field '{key}'")
    return obj[key]


def _numeric_array(value, key, path):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: field '{key}' is not numeric ({exc})") from None
    return arr


def parse_state(obj, path="<state>"):
    """Decode a state object; returns ``("density", rho)`` or ``("pure", psi)``."""
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    re = _numeric_array(_field(obj, "re", path), "re", path)
    im = _numeric_array(_field(obj, "im", path), "im", path)
    if re.shape != im.shape:
        raise ParseError(f"{path}: fields 're' and 'im' have shapes {re.shape} and {im.shape}")
    values = re + 1j * im
    if values.ndim == 1 and "dim" not in obj:
        return "pure", validate_pure(values)
    if values.ndim != 2:
        raise ParseError(f"{path}: field 're' must be a matrix for a density matrix")
    dim = _field(obj, "dim", path)
    if not isinstance(dim, int) or values.shape != (dim, dim):
        raise ParseError(f"{path}: field 'dim' = {dim!r} does not match matrix shape {values.shape}")
    return "density", validate_density(values)


def load_state(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read state file ({exc.strerror})") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_state(obj, str(path))


def state_to_json(state):
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1:
        return {"re": a.real.tolist(), "im": a.imag.tolist()}
    return {"dim": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def save_state(path, state):
    Path(path).write_text(json.dumps(state_to_json(state), indent=2) + "\n")
