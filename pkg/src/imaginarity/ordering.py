"""Whether two measures rank qubit states the same way, and whether a bit
flip preserves the ranking of pure states."""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .divergences import Family, check_alpha
from .errors import ValidationError
from .measures import (MeasureKind, after_bitflip_raw, canonical_x_raw,
                       closed_form_after_bitflip, closed_form_canonical_x, x11)

TIE_TOL = 1e-9
FAMILIES = (Family.T, Family.S, Family.O)


@dataclass
class OrderReport:
    proposition: str
    pairs_tested: int
    violations: list = field(default_factory=list)
    seed: object = None
    parameters: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "proposition": self.proposition,
            "pairs": self.pairs_tested,
            "violations": self.violations,
            "seed": self.seed,
            "parameters": self.parameters,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, default=float)


def _violating_pairs(values_a, values_b, tol):
    a = np.asarray(values_a, dtype=float)
    b = np.asarray(values_b, dtype=float)
    da = a[:, None] - a[None, :]
    db = b[:, None] - b[None, :]
    strict = (np.abs(da) > tol) & (np.abs(db) > tol)
    bad = strict & (np.sign(da) != np.sign(db))
    i, j = np.nonzero(np.triu(bad, 1))
    return list(zip(i.tolist(), j.tolist()))


def same_order(values_a, values_b, tol=TIE_TOL):
    """True iff every pair is ranked identically; differences within tol are ties.

    Returns ``(ok, report)``.
    """
    if len(values_a) != len(values_b):
        raise ValidationError(f"length mismatch: {len(values_a)} vs {len(values_b)}")
    n = len(values_a)
    bad = _violating_pairs(values_a, values_b, tol) if n >= 2 else []
    report = OrderReport("same-order", n * (n - 1) // 2)
    for i, j in bad:
        report.violations.append({
            "i": i, "j": j,
            "values_a": [float(values_a[i]), float(values_a[j])],
            "values_b": [float(values_b[i]), float(values_b[j])],
        })
    return not bad, report


def check_proposition3(x_grid, alpha, tol=TIE_TOL):
    """Pairwise same-order test of the T, S and O closed forms on canonical x values."""
    a = check_alpha(alpha)
    xs = [float(x) for x in x_grid]
    values = {f: [closed_form_canonical_x(x, MeasureKind(f, a)) for x in xs] for f in FAMILIES}
    n = len(xs)
    report = OrderReport("proposition3", 0, parameters={"alpha": a, "x_grid": xs, "tol": tol})
    for f1, f2 in ((Family.T, Family.S), (Family.T, Family.O), (Family.S, Family.O)):
        report.pairs_tested += n * (n - 1) // 2
        for i, j in _violating_pairs(values[f1], values[f2], tol):
            report.violations.append({
                "families": [f1.value, f2.value],
                "state1": {"x": xs[i]}, "state2": {"x": xs[j]},
                "values_a": [values[f1][i], values[f1][j]],
                "values_b": [values[f2][i], values[f2][j]],
            })
    return report


def sample_pure_canonical(n_samples, seed):
    """x uniform on [0, 1/2] and y = sqrt(1/4 - x^2)."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 0.5, size=int(n_samples))
    y = np.sqrt(np.maximum(0.25 - x * x, 0.0))
    return x, y


def check_proposition4(n_samples, m, alpha, seed=0, tol=TIE_TOL, variant="corrected"):
    """Does a bit flip with parameter m preserve each measure's ranking of pure qubits?"""
    if int(n_samples) < 2:
        raise ValidationError(f"n_samples must be at least 2, got {n_samples}")
    m = float(m)
    if not (0.0 <= m <= 1.0):
        raise ValidationError(f"m must lie in [0, 1], got {m}")
    a = check_alpha(alpha)
    xs, ys = sample_pure_canonical(n_samples, seed)
    n = len(xs)
    report = OrderReport("proposition4", 0, seed=seed,
                         parameters={"m": m, "alpha": a, "n_samples": n, "tol": tol, "variant": variant})
    for fam in FAMILIES:
        kind = MeasureKind(fam, a)
        before = [closed_form_canonical_x(x, kind) for x in xs]
        after = [closed_form_after_bitflip(x, y, m, kind, variant=variant) for x, y in zip(xs, ys)]
        report.pairs_tested += n * (n - 1) // 2
        for i, j in _violating_pairs(before, after, tol):
            report.violations.append({
                "family": fam.value,
                "state1": {"x": float(xs[i]), "y": float(ys[i])},
                "state2": {"x": float(xs[j]), "y": float(ys[j])},
                "values_before": [before[i], before[j]],
                "values_after": [after[i], after[j]],
            })
    return report


# ---- published closed-form derivatives -------------------------------------

def printed_derivative(kind, x):
    """d/dx of the canonical-x closed forms."""
    a = kind.alpha
    X = x + 0.5
    if kind.family is Family.T:
        return -X ** (1 / a - 1) / a
    if kind.family is Family.S:
        return -2 * a * X ** (a / (1 - a)) / ((a - 1) ** 2 * (2 * x + 1))
    return -4 * X ** (1 / a) / (a * (2 * x + 1) ** 2)


def printed_derivative_after_bitflip(kind, x, y, m):
    """d/dx at fixed y of the bit-flip closed forms."""
    a = kind.alpha
    X = x11(x, y, m)
    r = x / X
    q = (1 - 2 * m) ** 2 * y * y
    if kind.family is Family.T:
        return 2 ** (-1 / a) * (x - X) * (r + 1) ** (1 / a) / (a * (q + x * x))
    if kind.family is Family.S:
        return -(2 ** (a / (a - 1)) * a * (X - x) * (r + 1) ** (a / (1 - a))) / ((a - 1) ** 2 * (q + x * x))
    return 2 ** ((a - 1) / a) * (x - X) * (r + 1) ** (1 / a) / (a * (x * (X + x) + q))


def _difference(f, x, h, lo=0.0, hi=0.5):
    if x - h < lo:
        return (f(x + h) - f(x)) / h
    if x + h > hi:
        return (f(x) - f(x - h)) / h
    return (f(x + h) - f(x - h)) / (2 * h)


def _agrees(fd, an, rel):
    return abs(fd - an) <= rel * abs(an) + 1e-12


def monotonicity_check(kind, alpha=None, grid=None, h=1e-6, m_values=(0.1, 0.3, 0.7),
                       rel_tol=1e-4, sign_tol=1e-9, variant="corrected"):
    """Finite-difference slopes of the closed forms against the analytic derivatives.

    Bit-flip slopes are taken in x with y = sqrt(1/4 - x^2) held fixed,
    which is how the analytic bit-flip derivatives are defined.
    """
    kind = kind if isinstance(kind, MeasureKind) else MeasureKind(kind, alpha)
    if grid is None:
        grid = np.linspace(0.0, 0.5, 22)[1:-1]
    rows = []
    for x in map(float, grid):
        fd = _difference(lambda t: canonical_x_raw(t, kind), x, h)
        an = printed_derivative(kind, x)
        rows.append({"x": x, "m": None, "fd": fd, "printed": an,
                     "nonincreasing": fd <= sign_tol, "matches": _agrees(fd, an, rel_tol)})
        y = math.sqrt(max(0.25 - x * x, 0.0))
        for m in m_values:
            fd = _difference(lambda t: after_bitflip_raw(t, y, m, kind, variant), x, h)
            an = printed_derivative_after_bitflip(kind, x, y, m)
            rows.append({"x": x, "m": float(m), "fd": fd, "printed": an,
                         "nonincreasing": fd <= sign_tol, "matches": _agrees(fd, an, rel_tol)})
    return {
        "family": kind.family.value,
        "alpha": kind.alpha,
        "points": len(rows),
        "all_nonincreasing": all(r["nonincreasing"] for r in rows),
        "all_match": all(r["matches"] for r in rows),
        "max_rel_error": max(abs(r["fd"] - r["printed"]) / max(abs(r["printed"]), 1e-300) for r in rows),
        "rows": rows,
    }


def report_dataclass(report):
    return asdict(report)
