import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import spherical_jn

from diracembed import (ContinuumError, ModelParams, bound_states_selfconsistent, exact_bound_states,
                        integrate_radial_dirac, make_basis, make_channel, matching_function, matching_ratio,
                        sommerfeld_energy)
from diracembed.oracle import _exterior, indicial_exponent

EXACT = (-0.4455532, 0.8908194)


@pytest.fixture(scope="module")
def roots():
    return exact_bound_states(ModelParams(), -1, (-0.6, 2.0))


def test_table_exact_row(roots):
    assert len(roots) == 2
    assert np.abs(np.array(roots) - EXACT).max() < 1e-7


@pytest.mark.parametrize("kappa", [-1, 1, -2, 2])
@pytest.mark.parametrize("E", [0.3, 2.0])
def test_free_particle_ratio(kappa, E):
    # Z=0: g = r j_l(p r) and f/g = -+ c p / (E + 2 m c^2) * j_lbar / j_l
    m = ModelParams(Z=0.0)
    ch = make_channel(kappa)
    sol = integrate_radial_dirac(m, ch, E)
    p = math.sqrt(E * (E + 2 * m.rest_energy)) / m.c
    x = p * sol.mesh
    jl, jb = spherical_jn(ch.ell, x), spherical_jn(ch.ell_bar, x)
    keep = (np.abs(jl) > 1e-3 * np.abs(jl).max()) & (sol.mesh > 1e-3)
    expected = ch.sign * m.c * p / (E + 2 * m.rest_energy) * jb / jl
    got = sol.f / sol.g
    assert np.all(np.abs(got[keep] - expected[keep]) <= 1e-9 * np.abs(expected[keep]))


def test_indicial_exponent():
    m = ModelParams()
    assert indicial_exponent(-1, 1.0, m.c) == pytest.approx(math.sqrt(1 - 1 / m.c ** 2), rel=1e-15)
    assert indicial_exponent(-1, 1.0, m.c) == pytest.approx(0.99997338, abs=1e-8)
    assert indicial_exponent(2, 1.0, m.c) == pytest.approx(math.sqrt(4 - 1 / m.c ** 2), rel=1e-15)


@pytest.mark.parametrize("kappa", [-1, 1, -2])
def test_regular_behaviour_at_origin(kappa):
    m = ModelParams()
    sol = integrate_radial_dirac(m, kappa, -0.4)
    gam = indicial_exponent(kappa, m.Z, m.c)
    first = (sol.mesh >= 1e-6) & (sol.mesh <= 1e-5)
    # the leading r^gamma term of the minor component is O(Z alpha) smaller,
    # so look at the dominant one: g for kappa < 0, f for kappa > 0
    major = sol.g if kappa < 0 else sol.f
    r, y = sol.mesh[first], np.abs(major[first])
    slope = np.polyfit(np.log(r), np.log(y), 1)[0]
    assert abs(slope - gam) <= 0.01 * gam


def test_node_counts(roots):
    m = ModelParams()
    assert integrate_radial_dirac(m, -1, roots[0]).nodes() == 0
    assert integrate_radial_dirac(m, -1, roots[1]).nodes() == 1


@pytest.mark.parametrize("E0", EXACT)
def test_sign_change(E0):
    m = ModelParams()
    assert matching_function(m, -1, E0 - 5e-4) * matching_function(m, -1, E0 + 5e-4) < 0


def test_ratio_and_determinant_forms_agree(roots):
    m = ModelParams()
    ch = make_channel(-1)
    rng = np.random.default_rng(7)
    for E in rng.uniform(-0.9, 5.0, 10):
        D = matching_function(m, ch, E)
        q = matching_ratio(m, ch, E)
        sol = integrate_radial_dirac(m, ch, E, mesh=[1e-6, m.R])
        g_ex, _ = _exterior(m, ch, E)
        assert D == pytest.approx(q * sol.g[-1] * g_ex, rel=1e-10)
    ratio_roots = [brentq(lambda e: matching_ratio(m, ch, e), E0 - 1e-3, E0 + 1e-3, xtol=1e-13)
                   for E0 in EXACT]
    assert np.abs(np.array(ratio_roots) - roots).max() < 1e-11


def test_tolerance_refinement(roots):
    finer = exact_bound_states(ModelParams(), -1, (-0.6, 2.0), rtol=5e-13)
    assert np.abs(np.array(finer) - roots).max() < 1e-11


def test_no_coulomb_levels_are_positive():
    levels = exact_bound_states(ModelParams(Z=0.0), -1, (-1.0, 9.9))
    assert levels and all(E > 0 for E in levels)


@pytest.mark.parametrize("kappa", [-2, 1])
def test_other_channels_match_embedding(kappa):
    m = ModelParams()
    exact = exact_bound_states(m, kappa, (-0.5, 3.0), points=60)
    scf = bound_states_selfconsistent(m, make_basis(kappa, 10), 0, w0=exact[0])
    assert abs(scf.E - exact[0]) < 1e-6


def test_sommerfeld_values():
    assert abs(sommerfeld_energy(1.0, 1, -1) - -0.5000067) < 5e-7
    assert abs(sommerfeld_energy(1.0, 2, -1) - -0.1250021) < 5e-7
    # 2s1/2 and 2p1/2 are degenerate for a point nucleus
    assert sommerfeld_energy(1.0, 2, 1) == pytest.approx(sommerfeld_energy(1.0, 2, -1), rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sommerfeld_non_relativistic_limit(n):
    assert sommerfeld_energy(1.0, n, -1, c=1e7) == pytest.approx(-1 / (2 * n * n), rel=1e-12)
    assert sommerfeld_energy(2.0, n, -1, c=1e7) == pytest.approx(-4 / (2 * n * n), rel=1e-12)


def test_sommerfeld_rejects_bad_input():
    with pytest.raises(ValueError):
        sommerfeld_energy(1.0, 1, 2)
    with pytest.raises(ValueError):
        sommerfeld_energy(200.0, 1, -1)


def test_large_cavity_limit():
    E = exact_bound_states(ModelParams(R=10.0), -1, (-0.6, -0.3), points=20)[0]
    assert abs(E - sommerfeld_energy(1.0, 1, -1)) < 1e-6


def test_confinement_shift_decreases_with_radius():
    free = sommerfeld_energy(1.0, 1, -1)
    shifts = [exact_bound_states(ModelParams(R=R), -1, (-0.6, -0.3), points=20)[0] - free for R in (6.0, 8.0, 10.0, 12.0)]
    assert all(s > 0 for s in shifts)
    assert all(a > b for a, b in zip(shifts, shifts[1:]))


@pytest.mark.xfail(strict=True, reason="at R=8 the cavity still raises the level by ~1.7e-5 hartree")
def test_radius_eight_within_micro_hartree():
    E = exact_bound_states(ModelParams(R=8.0), -1, (-0.6, -0.3), points=20)[0]
    assert abs(E - -0.5000067) < 1e-6


def test_window_errors():
    m = ModelParams()
    with pytest.raises(ContinuumError):
        exact_bound_states(m, -1, (-1.0, 10.0))
    with pytest.raises(ValueError):
        exact_bound_states(m, -1, (1.0, 0.0))
    with pytest.raises(ContinuumError):
        matching_function(m, -1, 10.5)
    with pytest.raises(ValueError):
        integrate_radial_dirac(m, -1, 0.0, mesh=[0.5, 0.2])
