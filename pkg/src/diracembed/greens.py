"""Embedded resolvent and local density of states of the cavity region.

The resolvent is ``G(W) = [W O - H(W)]^{-1}`` with Gamma evaluated at the
(complex) energy itself and no Gamma_dot terms.  Its trace against the
overlap, ``-(1/pi) Im Tr G(W + i eta) O``, is the density of states
integrated over the cavity.  Both are evaluated in the interior-orthonormal
representation, where ``O = 1`` in resolvent mode and the trace is
basis-independent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .assembly import RESOLVENT, FIXED_W, assemble_matrices
from .basis import ChannelBasis
from .core import AngularChannel, ConditioningError, ConvergenceError, ModelParams
from .embedding import embedding_gamma
from .solver import ScfResult, solve_generalized, surface_amplitudes

__all__ = [
    "LdosCurve",
    "resolvent_matrix",
    "resolvent_trace",
    "ldos",
    "ldos_scan",
    "bound_weight",
    "bound_weight_routes",
    "BoundWeight",
]


@dataclass(frozen=True)
class LdosCurve:
    energies: np.ndarray
    eta: float
    values: np.ndarray
    N: int
    channel: AngularChannel


def _orth_resolvent(model, basis, E):
    mats = assemble_matrices(model, basis, E, RESOLVENT)
    n = mats.h_shifted.shape[0]
    # W O - H  ==  E O - (H - m c^2 O), with O = 1 in this representation
    try:
        g = np.linalg.solve(E * np.eye(n) - mats.h_shifted, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(
            f"resolvent is singular at E={E}: use a nonzero broadening eta"
        ) from exc
    return g, mats


def resolvent_matrix(model: ModelParams, basis: ChannelBasis, E: complex) -> np.ndarray:
    """``[W O - H]^{-1}`` in the raw kinetically balanced basis.

    ``E`` is the shifted complex energy ``W - m c^2`` with ``Im E > 0``.
    """
    E = complex(E)
    if not E.imag > 0:
        raise ValueError("the retarded resolvent needs Im E > 0")
    g, mats = _orth_resolvent(model, basis, E)
    T = mats.transform
    return T @ g @ T.T


def resolvent_trace(model: ModelParams, basis: ChannelBasis, E: complex) -> complex:
    """``Tr G(W) O`` at shifted complex energy ``E`` (any E off the real spectrum)."""
    g, _ = _orth_resolvent(model, basis, complex(E))
    return complex(np.trace(g))


def ldos(model: ModelParams, basis: ChannelBasis, E: float, eta: float = 1e-3) -> float:
    """Cavity-integrated density of states ``-(1/pi) Im Tr G(E + i eta) O``."""
    if not eta > 0:
        raise ValueError(f"broadening must be positive, got eta={eta}")
    return -resolvent_trace(model, basis, complex(E, eta)).imag / math.pi


def ldos_scan(model: ModelParams, basis: ChannelBasis, grid, eta: float = 1e-3,
              workers: int = 1) -> LdosCurve:
    """Evaluate `ldos` on an ascending energy grid, optionally in parallel.

    Results are returned in grid order and do not depend on ``workers``.
    """
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("energy grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("energy grid must be strictly ascending")
    # warm the interior-integral cache before fanning out
    assemble_matrices(model, basis, complex(grid[0], eta), RESOLVENT)

    def point(E):
        return ldos(model, basis, E, eta)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(point, grid))
    else:
        values = [point(E) for E in grid]
    return LdosCurve(energies=grid, eta=eta, values=np.array(values), N=basis.N, channel=basis.channel)


@dataclass(frozen=True)
class BoundWeight:
    """Cavity fraction of a bound state's norm, obtained two ways."""

    contour: float
    surface: float

    @property
    def value(self) -> float:
        return self.contour


def _contour_radius(model, scf: ScfResult):
    spec = scf.spectrum
    E = scf.E
    others = [abs(x - E) for x in spec.electron_values if x != E]
    gap = min(others) if others else 1.0
    return min(0.05, 0.25 * gap, 0.25 * (model.V0 - E))


def bound_weight(model: ModelParams, basis: ChannelBasis, scf: ScfResult,
                 rtol: float = 1e-4) -> float:
    """Fraction of a bound state's full-system norm that lies inside the cavity.

    Checked by `bound_weight_routes`; raises if its two routes disagree.
    """
    return bound_weight_routes(model, basis, scf, rtol=rtol).value


def bound_weight_routes(model: ModelParams, basis: ChannelBasis, scf: ScfResult,
                        points: int = 64, rtol: float = 1e-4) -> BoundWeight:
    """Pole weight of a converged bound state, computed two ways.

    Route (a) integrates ``Tr G O`` on a small circle around the pole
    (trapezoidal rule, exponentially convergent for an analytic integrand).
    Route (b) uses the converged eigenvector: with the state normalised over
    the cavity, the weight is ``1 / (1 - c^2 R^2 g(R)^2 Gamma_dot(W))``.
    The two must agree to ``rtol``.
    """
    if not scf.converged:
        raise ConvergenceError("bound_weight needs a converged self-consistent state")
    E0 = scf.E
    rho = _contour_radius(model, scf)
    theta = 2 * np.pi * (np.arange(points) + 0.5) / points
    z = E0 + rho * np.exp(1j * theta)
    # (1/2 pi i) \oint f dz with dz = i rho e^{i theta} d theta
    acc = 0j
    for zj, th in zip(z, theta):
        acc += resolvent_trace(model, basis, zj) * rho * np.exp(1j * th)
    contour = (acc / points).real

    mats = assemble_matrices(model, basis, E0, FIXED_W)
    spec = solve_generalized(mats)
    vec = spec.electron_vector(scf.state_rank, orth=True)
    vec = vec / math.sqrt(float(vec @ vec))  # interior norm is the identity here
    g_R, _ = surface_amplitudes(mats, vec)
    gamma_dot = embedding_gamma(basis.channel, model, E0).gamma_dot.real
    surface = 1.0 / (1.0 - model.c ** 2 * model.R ** 2 * g_R ** 2 * gamma_dot)

    if abs(contour - surface) > rtol * abs(surface):
        raise ConvergenceError(
            f"residue routes disagree: contour {contour:.10g} vs surface {surface:.10g}"
        )
    return BoundWeight(contour=float(contour), surface=float(surface))
