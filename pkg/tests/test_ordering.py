import json

import numpy as np
import pytest

from imaginarity import ValidationError
from imaginarity.measures import MeasureKind
from imaginarity.ordering import (check_proposition3, check_proposition4, monotonicity_check,
                                  printed_derivative, same_order, sample_pure_canonical)

ALPHAS = (0.5, 0.6, 0.75, 0.9)


def test_same_order():
    ok, rep = same_order([1, 2, 3], [10, 20, 30])
    assert ok and rep.pairs_tested == 3
    ok, rep = same_order([1, 2, 3], [10, 30, 20])
    assert not ok
    assert rep.violations[0]["i"] == 1 and rep.violations[0]["j"] == 2
    ok, _ = same_order([1, 1, 2], [5, 4, 6])  # ties never violate
    assert ok
    with pytest.raises(ValidationError):
        same_order([1], [1, 2])


def test_report_json():
    rep = check_proposition4(10, 0.3, 0.75, seed=1)
    d = json.loads(rep.to_json())
    assert set(d) == {"proposition", "pairs", "violations", "seed", "parameters"}
    assert d["pairs"] == 3 * 45


@pytest.mark.parametrize("alpha", ALPHAS)
def test_three_families_same_order(alpha):
    rep = check_proposition3(np.linspace(0, 0.5, 50), alpha)
    assert rep.ok, rep.violations[:3]


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("variant", ["corrected", "printed"])
def test_bitflip_keeps_order(alpha, variant):
    for m in (0.0, 0.3, 0.5, 1.0):
        assert check_proposition4(100, m, alpha, seed=2, variant=variant).ok


def test_broken_order_detected():
    # an increasing function of x is the reverse of every measure's ranking
    xs = np.linspace(0, 0.5, 10)
    ok, rep = same_order(list(xs), [-v for v in xs])
    assert not ok and len(rep.violations) == 45


def test_sampling_is_seeded():
    a = sample_pure_canonical(5, 3)
    b = sample_pure_canonical(5, 3)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_allclose(a[0] ** 2 + a[1] ** 2, 0.25)


def test_tsallis_derivative_value():
    assert printed_derivative(MeasureKind("T", 0.75), 0.2) == pytest.approx(-1.183872002323468, abs=1e-12)


@pytest.mark.parametrize("family", "TSO")
@pytest.mark.parametrize("alpha", ALPHAS)
def test_derivatives_match_finite_differences(family, alpha):
    r = monotonicity_check(family, alpha)
    assert r["all_match"], r["max_rel_error"]
    assert r["all_nonincreasing"]
    assert r["points"] == 80


def test_printed_O_variant_mismatches_derivative():
    r = monotonicity_check("O", 0.75, variant="printed")
    assert not r["all_match"]
