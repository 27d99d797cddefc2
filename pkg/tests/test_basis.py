import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracembed import ModelParams, assemble_matrices, default_n_min, eval_basis, make_basis


def test_indices_and_defaults():
    b = make_basis(-1, 8)
    assert list(b.indices) == list(range(1, 9))
    assert b.zeta == 1.0
    assert default_n_min(-1) == 1
    assert default_n_min(1) == 2 and default_n_min(3) == 2
    assert default_n_min(-2) == 2


def test_s_channel_first_function():
    b = make_basis(-1, 3)
    for r in (0.1, 1.0, 3.0):
        g, f = eval_basis(b, 1, r)
        assert g == pytest.approx(r * math.exp(-r), rel=1e-15)
        assert f == pytest.approx(-r * math.exp(-r), rel=1e-15)
    g, _ = eval_basis(b, 1, 3.0)
    assert g == pytest.approx(3 * math.exp(-3), rel=1e-15)


def test_small_component_formula():
    # f = ((n + kappa) r^(n-1) - zeta r^n) exp(-zeta r)
    for kappa in (-2, -1, 1, 2):
        b = make_basis(kappa, 5, zeta=1.3)
        for n in b.indices:
            for r in (0.2, 1.1, 4.0):
                _, f = eval_basis(b, n, r)
                expected = ((n + kappa) * r ** (n - 1) - 1.3 * r ** n) * math.exp(-1.3 * r)
                assert f == pytest.approx(expected, rel=1e-13, abs=1e-300)


def kinetic_balance_reference(n, kappa, zeta, r):
    with mpmath.workdps(30):
        r = mpmath.mpf(r)
        g = lambda x: x ** n * mpmath.exp(-zeta * x)
        return float(mpmath.diff(g, r) + kappa * g(r) / r)


@pytest.mark.parametrize("kappa", [-3, -2, -1, 1, 2, 3])
@pytest.mark.parametrize("R", [1.0, 3.0, 5.0])
def test_kinetic_balance_on_log_mesh(kappa, R):
    b = make_basis(kappa, 10)
    for r in np.geomspace(1e-4, R, 40):
        for n in b.indices:
            _, f = eval_basis(b, n, r)
            ref = kinetic_balance_reference(n, kappa, b.zeta, r)
            scale = (abs(n + kappa) * r ** (n - 1) + r ** n) * math.exp(-r)
            assert abs(f - ref) <= 1e-8 * scale


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([-3, -2, -1, 1, 2, 3]), st.integers(0, 9), st.floats(1e-3, 8.0), st.floats(0.5, 2.0))
def test_kinetic_balance_central_difference(kappa, offset, r, zeta):
    b = make_basis(kappa, 10, zeta=zeta)
    n = b.n_min + offset
    h = 1e-5 * r
    g = lambda x: eval_basis(b, n, x)[0]
    fd = (g(r + h) - g(r - h)) / (2 * h) + kappa * g(r) / r
    _, f = eval_basis(b, n, r)
    # size of the terms summed in g' + kappa g / r, which can cancel
    scale = ((n + abs(kappa)) * r ** (n - 1) + zeta * r ** n) * math.exp(-zeta * r)
    assert abs(f - fd) <= 1e-8 * scale


@pytest.mark.parametrize("kappa", [-4, -3, -2, -1, 1, 2, 3, 4])
def test_default_basis_keeps_coulomb_integrals_finite(kappa):
    b = make_basis(kappa, 6)
    # f^2 / r must have no negative power of r
    assert 2 * b.min_small_power() - 1 >= 0


@pytest.mark.parametrize("kappa", [-2, 1, 2])
def test_unsafe_n_min_rejected_by_assembly(kappa):
    b = make_basis(kappa, 4, n_min=1)
    with pytest.raises(ValueError):
        assemble_matrices(ModelParams(), b, -0.5)


def test_bad_arguments():
    b = make_basis(-1, 4)
    with pytest.raises(IndexError):
        eval_basis(b, 5, 1.0)
    with pytest.raises(ValueError):
        eval_basis(b, 1, 0.0)
    with pytest.raises(ValueError):
        make_basis(-1, 0)
    with pytest.raises(ValueError):
        make_basis(-1, 3, zeta=0.0)
    with pytest.raises(ValueError):
        make_basis(0, 3)
