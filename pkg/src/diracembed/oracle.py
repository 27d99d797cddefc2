"""Reference bound states by direct integration of the radial Dirac equations.

Inside the cavity, with ``V = -Z/r`` and shifted energy ``E``,

    dg/dr + kappa g / r =  (E + 2 m c^2 - V) f / c
    df/dr - kappa f / r = -(E - V) g / c

integrated outward from a Frobenius start and matched at ``R`` to the
decaying exterior solution ``(K_{ell+1/2}(kR), -gamma K_{ellbar+1/2}(kR))``.
None of the basis-set or embedding machinery is used, except for the
closed-form exterior Bessel ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .core import C_LIGHT, AngularChannel, ContinuumError, ConvergenceError, ModelParams, make_channel
from .embedding import decay_constant
from .specfun import bessel_k_sequence

__all__ = [
    "RadialSolution",
    "default_mesh",
    "indicial_exponent",
    "integrate_radial_dirac",
    "matching_function",
    "matching_ratio",
    "exact_bound_states",
    "sommerfeld_energy",
]

R0 = 1e-6


@dataclass(frozen=True)
class RadialSolution:
    mesh: np.ndarray
    g: np.ndarray
    f: np.ndarray
    E: float

    def nodes(self) -> int:
        """Sign changes of the large component on the mesh."""
        s = np.sign(self.g[self.g != 0])
        return int(np.count_nonzero(s[1:] != s[:-1]))


def indicial_exponent(kappa: int, Z: float, c: float) -> float:
    """``sqrt(kappa^2 - (Z/c)^2)``, the power of the regular solution at r = 0."""
    za = Z / c
    if za >= abs(kappa):
        raise ValueError("Z alpha >= |kappa|: no regular point-nucleus solution")
    return math.sqrt(kappa * kappa - za * za)


def default_mesh(R: float, r0: float = R0, n_log: int = 120, n_lin: int = 200) -> np.ndarray:
    """Logarithmic from ``r0`` to ``R/10``, then linear to ``R``."""
    split = 0.1 * R
    log_part = np.geomspace(r0, split, n_log, endpoint=False)
    return np.concatenate([log_part, np.linspace(split, R, n_lin)])


def _frobenius(kappa, model, E, r, terms=8):
    """Regular series solution ``r^gamma sum (a_k, b_k) r^k`` at small ``r``."""
    c, Z = model.c, model.Z
    gam = indicial_exponent(kappa, Z, c)
    zc = Z / c
    if Z == 0:
        a0, b0 = (0.0, 1.0) if kappa > 0 else (1.0, 0.0)
    elif kappa < 0:
        a0, b0 = 1.0, -zc / (gam - kappa)
    else:
        a0, b0 = zc / (gam + kappa), 1.0
    a, b = [a0], [b0]
    big = (E + 2 * model.rest_energy) / c
    small = E / c
    for k in range(1, terms):
        rhs1 = big * b[k - 1]
        rhs2 = -small * a[k - 1]
        p, q = gam + k + kappa, gam + k - kappa
        det = p * q + zc * zc
        # [[p, -zc], [zc, q]] (a_k, b_k) = (rhs1, rhs2)
        a.append((q * rhs1 + zc * rhs2) / det)
        b.append((p * rhs2 - zc * rhs1) / det)
    powers = r ** (gam + np.arange(terms))
    return float(np.dot(a, powers)), float(np.dot(b, powers))


def integrate_radial_dirac(model: ModelParams, channel: AngularChannel | int, E: float,
                           mesh=None, rtol: float = 1e-12) -> RadialSolution:
    """Regular interior solution at shifted energy ``E`` on ``mesh`` (ascending, within (0, R]).

    Integrates in ``t = ln r`` (DOP853) and normalises to ``g(R)^2 + f(R)^2 = 1``
    at the last mesh point.
    """
    if isinstance(channel, int):
        channel = make_channel(channel)
    kappa = channel.kappa
    mesh = default_mesh(model.R) if mesh is None else np.asarray(mesh, dtype=float)
    if mesh[0] <= 0 or np.any(np.diff(mesh) <= 0) or mesh[-1] > model.R * (1 + 1e-15):
        raise ValueError("mesh must be ascending inside (0, R]")
    c, Z = model.c, model.Z
    big = E + 2 * model.rest_energy

    def rhs(t, y):
        r = math.exp(t)
        g, f = y
        return [-kappa * g + (r * big + Z) * f / c, kappa * f - (r * E + Z) * g / c]

    y0 = _frobenius(kappa, model, E, mesh[0])
    t = np.log(mesh)
    sol = solve_ivp(rhs, (t[0], t[-1]), y0, method="DOP853", t_eval=t,
                    rtol=rtol, atol=1e-30)
    if not sol.success or not np.all(np.isfinite(sol.y)):
        raise ConvergenceError(f"radial integration failed at E={E}: {sol.message}")
    g, f = sol.y
    norm = math.hypot(g[-1], f[-1])
    return RadialSolution(mesh=mesh, g=g / norm, f=f / norm, E=float(E))


def _exterior(model, channel, E):
    """Normalised exterior amplitudes ``(g, f)`` at ``R``."""
    ck, _ = decay_constant(model, E)
    k = (ck / model.c).real
    gam = ck.real / (E - model.V0 + 2 * model.rest_energy)
    seq = bessel_k_sequence(max(channel.ell, channel.ell_bar), k * model.R)
    g, f = seq[channel.ell + 1].real, -gam * seq[channel.ell_bar + 1].real
    n = math.hypot(g, f)
    return g / n, f / n


def _surface_values(model, channel, E, rtol):
    sol = integrate_radial_dirac(model, channel, E, mesh=[R0, model.R], rtol=rtol)
    return sol.g[-1], sol.f[-1]


def _check_bound(model, E):
    if not E < model.V0:
        raise ContinuumError(f"E={E} is not below the continuum edge V0={model.V0}")


def matching_function(model: ModelParams, channel: AngularChannel | int, E: float,
                      rtol: float = 1e-12) -> float:
    """``D(E) = f_in(R) g_ext(R) - g_in(R) f_ext(R)``; zero exactly at bound states."""
    if isinstance(channel, int):
        channel = make_channel(channel)
    _check_bound(model, E)
    g_in, f_in = _surface_values(model, channel, E, rtol)
    g_ex, f_ex = _exterior(model, channel, E)
    return f_in * g_ex - g_in * f_ex


def matching_ratio(model: ModelParams, channel: AngularChannel | int, E: float,
                   rtol: float = 1e-12) -> float:
    """``f_in(R)/g_in(R) - f_ext(R)/g_ext(R)``, the ratio form of `matching_function`."""
    if isinstance(channel, int):
        channel = make_channel(channel)
    _check_bound(model, E)
    g_in, f_in = _surface_values(model, channel, E, rtol)
    g_ex, f_ex = _exterior(model, channel, E)
    return f_in / g_in - f_ex / g_ex


def exact_bound_states(model: ModelParams, channel: AngularChannel | int, window=(-1.0, 2.0),
                       points: int = 200, rtol: float = 1e-12, xtol: float = 1e-13) -> list[float]:
    """All zeros of `matching_function` in ``window`` (scan, then Brent refinement)."""
    lo, hi = map(float, window)
    if not lo < hi:
        raise ValueError("window must be (low, high) with low < high")
    if hi >= model.V0:
        raise ContinuumError(f"window reaches the continuum edge V0={model.V0}")
    if isinstance(channel, int):
        channel = make_channel(channel)
    grid = np.linspace(lo, hi, points)

    def D(E):
        return matching_function(model, channel, E, rtol)

    values = [D(E) for E in grid]
    roots = []
    for a, b, da, db in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if da == 0:
            roots.append(float(a))
        elif da * db < 0:
            roots.append(brentq(D, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps))
    if values[-1] == 0:
        roots.append(float(grid[-1]))
    return roots


def sommerfeld_energy(Z: float, n: int, kappa: int, c: float = C_LIGHT) -> float:
    """Point-nucleus Dirac-Coulomb level ``W - m c^2``."""
    if n < abs(kappa):
        raise ValueError(f"principal quantum number n={n} must be >= |kappa|={abs(kappa)}")
    za = Z / c
    if za >= abs(kappa):
        raise ValueError("Z alpha >= |kappa|")
    gam = math.sqrt(kappa * kappa - za * za)
    x = (za / (n - abs(kappa) + gam)) ** 2
    s = math.sqrt(1 + x)
    # m c^2 (1/sqrt(1+x) - 1) without cancellation
    return -c * c * x / (s * (1 + s))
