import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from imaginarity import ValidationError
from imaginarity.measures import (MeasureKind, after_bitflip_raw, closed_form_after_bitflip,
                                  closed_form_canonical_x, closed_form_pure, discrepancy_report,
                                  inequality_gaps, kernel_from_value, measure, measure_definitional,
                                  measure_grid_oracle, measure_pure_restricted, value_from_kernel)
from imaginarity.optimizer import OptConfig
from imaginarity.states import canonical_density, direct_sum, random_real_density

T75, S75, O75 = (MeasureKind(f, 0.75) for f in "TSO")
FAST = OptConfig(restarts=6)


@pytest.mark.parametrize("kind, expected", [
    (MeasureKind("T", 0.5), 0.75),
    (MeasureKind("S", 0.5), 1.0),
    (MeasureKind("O", 0.5), 1.0),
    (T75, 0.603149737007950),
    (S75, 3.5),
    (O75, 0.825197896063601),
])
def test_closed_form_at_A_zero(kind, expected):
    assert closed_form_pure(0, kind) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("family", "TSO")
def test_closed_form_zero_for_real(family):
    for a in (0.5, 0.6, 0.75, 0.9):
        assert closed_form_pure(1, MeasureKind(family, a)) == pytest.approx(0, abs=1e-15)


def test_kind_validation():
    with pytest.raises(ValidationError):
        MeasureKind("T", 1.0)
    with pytest.raises(ValueError):
        MeasureKind("X", 0.75)


def test_value_kernel_round_trip():
    for fam in "TSO":
        kind = MeasureKind(fam, 0.6)
        for k in (0.3, 0.8, 1.0):
            assert kernel_from_value(kind, value_from_kernel(kind, k)) == pytest.approx(k, abs=1e-13)


def test_canonical_x_agrees_with_A():
    for A in np.linspace(0, 1, 11):
        for kind in (T75, S75, O75):
            assert closed_form_canonical_x(A / 2, kind) == pytest.approx(closed_form_pure(A, kind), abs=1e-14)
    with pytest.raises(ValidationError):
        closed_form_canonical_x(0.6, T75)


def test_bitflip_limits():
    for x in np.linspace(0, 0.5, 11):
        y = math.sqrt(0.25 - x * x)
        for kind in (T75, S75, O75, MeasureKind("O", 0.55)):
            direct = closed_form_canonical_x(x, kind)
            assert closed_form_after_bitflip(x, y, 0, kind) == pytest.approx(direct, abs=1e-12)
            assert closed_form_after_bitflip(x, y, 1, kind) == pytest.approx(direct, abs=1e-12)
            assert closed_form_after_bitflip(x, y, 0.5, kind) == pytest.approx(0, abs=1e-12)


def test_bitflip_printed_variant_differs_for_O():
    x, y = 0.3, 0.4
    assert closed_form_after_bitflip(x, y, 0, O75, variant="printed") != pytest.approx(
        closed_form_canonical_x(x, O75), abs=1e-6)
    with pytest.raises(ValidationError):
        after_bitflip_raw(x, y, 0.2, O75, variant="other")


def test_bitflip_domain():
    with pytest.raises(ValidationError, match="1/4"):
        closed_form_after_bitflip(0.3, 0.3, 0.2, T75)
    with pytest.raises(ValidationError):
        closed_form_after_bitflip(0.3, 0.4, 1.5, T75)


def test_inequality_gaps_example():
    d1, d2 = inequality_gaps(0, 0.75)
    assert d1 == pytest.approx(2.674802103936399, abs=1e-12)
    assert d2 == pytest.approx(0.222048159055651, abs=1e-12)
    d1, _ = inequality_gaps(0.4, 0.5)
    assert d1 == pytest.approx(0, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0.5, 0.999))
def test_inequality_chain(A, alpha):
    d1, d2 = inequality_gaps(A, alpha)
    assert d1 >= -1e-12 and d2 >= -1e-12


@pytest.mark.parametrize("A", [0.0, 0.5, 1.0])
def test_measures_on_canonical_states(backend, A):
    rho = canonical_density(A)
    for kind in (S75, O75):
        assert measure_definitional(rho, kind, FAST).value == pytest.approx(closed_form_pure(A, kind), abs=1e-5)
    for kind in (T75, S75, O75):
        assert measure_pure_restricted(rho, kind, FAST).value == pytest.approx(closed_form_pure(A, kind), abs=1e-6)


def test_tsallis_definitional_below_closed_form(backend):
    r = measure_definitional(canonical_density(0), T75)
    assert r.value == pytest.approx(0.206299474015900, abs=1e-5)
    np.testing.assert_allclose(r.optimal_sigma, np.eye(2) / 2, atol=1e-3)
    g = measure_grid_oracle(canonical_density(0), T75, 256)
    assert g.value == pytest.approx(0.206299474015900, abs=1e-5)


def test_real_states_have_zero_measure(backend):
    for i in range(5):
        rho = random_real_density(2, seed=i)
        for kind in (T75, S75, O75):
            assert measure_definitional(rho, kind, FAST).value <= 1e-7


def test_additivity_on_direct_sum():
    r1, r2 = canonical_density(0.2), canonical_density(0.7)
    big = direct_sum(0.4, r1, r2)
    for kind in (T75, S75, O75):
        lhs = measure_definitional(big, kind).value
        rhs = 0.4 * measure_definitional(r1, kind).value + 0.6 * measure_definitional(r2, kind).value
        assert lhs == pytest.approx(rhs, abs=1e-4)


def test_measure_dispatch_and_result():
    rho = canonical_density(0.3)
    r = measure(rho, S75, "pure-restricted", FAST)
    d = r.to_dict()
    assert d["method"] == "pure-restricted" and d["family"] == "S"
    assert len(d["optimal_sigma"]) == 2
    with pytest.raises(ValidationError):
        measure(rho, S75, "closed-form")


def test_discrepancy_report_detects_tsallis_gap():
    row = discrepancy_report(canonical_density(0), T75, FAST)
    assert row["closed_form"] == pytest.approx(0.603149737007950, abs=1e-12)
    assert row["closed_minus_definitional"] == pytest.approx(0.396850262992050, abs=1e-5)
    assert row["closed_minus_pure"] == pytest.approx(0, abs=1e-6)
