import math

import numpy as np
import pytest
from scipy.linalg import fractional_matrix_power as fmp

from imaginarity import ValidationError
from imaginarity.channels import apply, random_real_channel
from imaginarity.divergences import (Family, check_alpha, family_kernel, operator_kernel,
                                     sandwiched_kernel, sandwiched_renyi, tsallis_kernel,
                                     tsallis_operator_entropy_trace, tsallis_relative_entropy)
from imaginarity.states import canonical_density, canonical_pure_state, random_density, random_orthogonal

MAX_IMAG = np.array([[0.5, -0.5j], [0.5j, 0.5]])
DIAG_RHO = np.diag([0.5, 0.5])
DIAG_SIGMA = np.diag([0.25, 0.75])
ZERO = np.diag([1.0, 0.0])
ALPHAS = (0.5, 0.75, 0.9)


def test_check_alpha():
    assert check_alpha(0.5) == 0.5
    for bad in (0.49, 1.0, 1.2, float("nan")):
        with pytest.raises(ValidationError):
            check_alpha(bad)


@pytest.mark.parametrize("fam", list(Family))
def test_family_codes(fam):
    assert Family(fam.value) is fam
    assert fam.code in (0, 1, 2)
    assert fam.long_name


def test_tsallis_examples(backend):
    assert tsallis_kernel(MAX_IMAG, np.eye(2) / 2, 0.75) == pytest.approx(0.840896415253715, abs=1e-12)
    assert tsallis_kernel(DIAG_RHO, DIAG_SIGMA, 0.5) == pytest.approx(0.965925826289068, abs=1e-12)
    assert tsallis_relative_entropy(ZERO, np.eye(2) / 2, 0.5) == pytest.approx(0.585786437626905, abs=1e-12)
    assert tsallis_relative_entropy(DIAG_RHO, DIAG_SIGMA, 0.5) == pytest.approx(0.0681483474218634, abs=1e-12)


def test_sandwiched_examples(backend):
    for A in np.linspace(0, 1, 6):
        rho = canonical_density(A)
        assert sandwiched_kernel(rho, ZERO, 0.75) == pytest.approx(((1 + A) / 2) ** 0.75, abs=1e-12)
        assert operator_kernel(rho, ZERO, 0.75) == pytest.approx(((1 + A) / 2) ** 0.25, abs=1e-12)


def test_pure_rho_collapse(backend):
    for i in range(20):
        psi = canonical_pure_state(i / 19)
        rho = np.outer(psi, psi.conj())
        sigma = random_density(2, seed=i).real
        sigma = (sigma + sigma.T) / np.trace(sigma)
        expect = float(np.real(psi.conj() @ sigma @ psi))
        for a in ALPHAS:
            assert sandwiched_kernel(rho, sigma, a) == pytest.approx(expect ** a, abs=1e-10)
        v = random_orthogonal(2, seed=i)[:, 0]
        pure_sigma = np.outer(v, v)
        overlap = abs(psi.conj() @ v) ** 2
        for a in ALPHAS:
            assert operator_kernel(rho, pure_sigma, a) == pytest.approx(overlap ** (1 - a), abs=1e-10)


def _scipy_kernels(rho, sigma, a):
    t = np.trace(fmp(rho, a) @ fmp(sigma, 1 - a)).real
    g = fmp(rho, (1 - a) / (2 * a))
    s = np.trace(fmp(g @ sigma @ g, a)).real
    h, ih = fmp(rho, 0.5), fmp(rho, -0.5)
    o = np.trace(h @ fmp(ih @ sigma @ ih, 1 - a) @ h).real
    return t, s, o


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_kernels_match_scipy(backend, dim):
    for i in range(10):
        rho = random_density(dim, seed=(dim, i))
        sigma = random_density(dim, seed=(dim, i, 1))
        for a in ALPHAS:
            t, s, o = _scipy_kernels(rho, sigma, a)
            assert tsallis_kernel(rho, sigma, a) == pytest.approx(t, abs=1e-10)
            assert sandwiched_kernel(rho, sigma, a) == pytest.approx(s, abs=1e-10)
            assert operator_kernel(rho, sigma, a) == pytest.approx(o, abs=1e-10)


def test_identical_states_give_one(backend):
    for i in range(10):
        rho = random_density(3, seed=i)
        for fam in Family:
            for a in ALPHAS:
                assert family_kernel(fam, rho, rho, a) == pytest.approx(1.0, abs=1e-9)
        assert tsallis_relative_entropy(rho, rho, 0.75) == pytest.approx(0.0, abs=1e-9)
        assert sandwiched_renyi(rho, rho, 0.75) == pytest.approx(0.0, abs=1e-9)
        assert tsallis_operator_entropy_trace(rho, rho, 0.75) == pytest.approx(0.0, abs=1e-9)


def test_orthogonal_invariance(backend):
    for i in range(20):
        rho, sigma = random_density(3, seed=i), random_density(3, seed=100 + i)
        o = random_orthogonal(3, seed=200 + i)
        for fam in Family:
            k1 = family_kernel(fam, rho, sigma, 0.75)
            k2 = family_kernel(fam, o @ rho @ o.T, o @ sigma @ o.T, 0.75)
            assert abs(k1 - k2) <= 1e-9


def test_data_processing(backend):
    for i in range(200):
        rho, sigma = random_density(2, seed=(7, i)), random_density(2, seed=(8, i))
        ch = random_real_channel(2, 1 + i % 3, seed=(9, i))
        r2, s2 = apply(ch, rho), apply(ch, sigma)
        for fam in Family:
            for a in ALPHAS:
                assert family_kernel(fam, r2, s2, a) >= family_kernel(fam, rho, sigma, a) - 1e-7


def test_sandwiched_renyi_arithmetic():
    # ln(0.5) / (-1/4): a state pair with sandwiched kernel 0.5 at alpha 3/4
    assert math.log(0.5) / (0.75 - 1) == pytest.approx(2.772588722239781, abs=1e-14)
    rho = np.diag([1.0, 0.0])
    sigma = np.diag([0.5 ** (1 / 0.75), 1 - 0.5 ** (1 / 0.75)])
    assert sandwiched_renyi(sigma, rho, 0.75) == pytest.approx(2.772588722239781, abs=1e-10)


def test_zero_kernel_gives_infinity():
    one, zero = np.diag([0.0, 1.0]), np.diag([1.0, 0.0])
    assert sandwiched_renyi(one, zero, 0.75) == math.inf
    assert tsallis_operator_entropy_trace(zero, one, 0.75) == math.inf


def test_dimension_mismatch():
    with pytest.raises(ValidationError, match="mismatch"):
        tsallis_kernel(np.eye(2) / 2, np.eye(3) / 3, 0.75)
