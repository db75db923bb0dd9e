import csv
import io

import numpy as np
import pytest

from imaginarity import NumericalError, ValidationError
from imaginarity.channels import ChannelKind
from imaginarity.decay import (CSV_HEADER, _sqrt, decay_definitional, decay_formula_alpha34,
                               effective_pure_delta, grid, st_coefficients, sweep, to_csv)
from imaginarity.measures import MeasureKind
from imaginarity.optimizer import OptConfig

GRID = [i / 10 for i in range(11)]
FAST = OptConfig(restarts=4)


@pytest.mark.parametrize("ck, q", [("bf", 0.0), ("bf", 1.0), ("pd", 0.0), ("ad", 0.0)])
@pytest.mark.parametrize("family", "TSO")
def test_endpoint_zeros(ck, q, family):
    for A in GRID:
        assert abs(decay_formula_alpha34(ck, A, q, family)) <= 1e-9


@pytest.mark.parametrize("ck", ["bf", "pd", "ad"])
@pytest.mark.parametrize("family", "TSO")
def test_formula_equals_effective_pure_convention(ck, family):
    kind = MeasureKind(family, 0.75)
    for A in GRID:
        for q in GRID:
            assert decay_formula_alpha34(ck, A, q, family) == pytest.approx(
                effective_pure_delta(ck, A, q, kind), abs=1e-10)


def test_bf_maximum_at_half():
    m = [i / 20 for i in range(21)]
    for A in (0.2, 0.6):
        for fam in "TSO":
            vals = [decay_formula_alpha34("bf", A, q, fam) for q in m]
            assert abs(m[int(np.argmax(vals))] - 0.5) <= 0.05 + 1e-12


def test_st_coefficients_bf_at_half():
    st = st_coefficients("bf", 0.4, 0.5)
    assert st.s == pytest.approx(0.5)
    assert st.t == pytest.approx(0.0)


def test_sqrt_guard():
    assert _sqrt(-1e-18, "x", scale=1.0) == 0.0
    assert _sqrt(-5e-10, "x") == 0.0
    with pytest.raises(NumericalError, match="A=0.3"):
        _sqrt(-1e-3, "x", A=0.3)


def test_alpha_must_be_three_quarters():
    with pytest.raises(ValidationError):
        decay_formula_alpha34("bf", 0.5, 0.3, MeasureKind("T", 0.6))
    with pytest.raises(ValidationError):
        decay_formula_alpha34("bf", 1.5, 0.3, "T")


def test_decay_point_fields(backend):
    pt = decay_definitional(0.3, "pd", 0.4, MeasureKind("S", 0.75), FAST)
    assert pt.channel_kind is ChannelKind.PD
    assert pt.delta_formula is not None and pt.delta_definitional is not None
    pt = decay_definitional(0.3, "pd", 0.4, MeasureKind("S", 0.6), FAST, definitional=False)
    assert pt.delta_formula is None and pt.delta_definitional is None


def test_sweep_and_csv():
    pts = sweep("bf", MeasureKind("O", 0.75), grid(3), grid(2), FAST, definitional=False)
    assert [(p.A, p.channel_param) for p in pts] == [(0, 0), (0, 1), (0.5, 0), (0.5, 1), (1, 0), (1, 1)]
    text = to_csv(pts)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 7
    assert rows[1][-1] == ""  # definitional skipped
    assert to_csv(pts) == text
    with pytest.raises(ValidationError):
        sweep("bf", "T", [], [0.1])


def test_grid():
    assert grid(1) == [0.0]
    assert grid(11)[3] == 0.3
    assert grid(5)[-1] == 1.0
    with pytest.raises(ValidationError):
        grid(0)
