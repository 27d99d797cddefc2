"""Generalised eigensolver, electron-state selection and w = W self-consistency."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .assembly import FIXED_W, MatrixPair, assemble_matrices
from .basis import ChannelBasis
from .core import ConditioningError, ContinuumError, ConvergenceError, ModelParams
from .embedding import embedding_gamma

__all__ = [
    "SpectrumResult",
    "ScfResult",
    "solve_generalized",
    "solve_fixed_w",
    "electron_states_folded",
    "bound_states_selfconsistent",
    "surface_continuity_residual",
    "surface_amplitudes",
]

logger = logging.getLogger(__name__)

#: smallest acceptable eigenvalue ratio of the overlap matrix
OVERLAP_RCOND = 1e-12


@dataclass(frozen=True)
class SpectrumResult:
    """Full spectrum of one channel pencil.

    Attributes
    ----------
    eigenvalues : ndarray, shape (2N,)
        Total energies W, ascending.
    shifted : ndarray, shape (2N,)
        The same as ``W - m c^2`` (computed directly, not by subtraction).
    electron_values : ndarray, shape (N,)
        Upper half of ``shifted``.
    coefficients : ndarray, shape (2N, 2N)
        Columns are eigenvectors in the raw [large | small] basis,
        normalised to ``a^T O a = 1``.
    coefficients_orth : ndarray, shape (2N, 2N)
        The same eigenvectors in the interior-orthonormal basis.
    w_used : float
        Shifted embedding energy.
    """

    eigenvalues: np.ndarray
    shifted: np.ndarray
    electron_values: np.ndarray
    coefficients: np.ndarray
    coefficients_orth: np.ndarray
    w_used: float

    @property
    def N(self) -> int:
        return self.electron_values.shape[0]

    def electron_vector(self, rank: int, orth: bool = False) -> np.ndarray:
        coeffs = self.coefficients_orth if orth else self.coefficients
        return coeffs[:, self.N + rank]


@dataclass(frozen=True)
class ScfResult:
    """Outcome of the ``w = W`` iteration for one electron state.

    ``history`` holds ``(w, W)`` pairs as shifted energies, one per iteration.
    """

    E: float
    iterations: int
    history: list
    converged: bool
    state_rank: int
    spectrum: SpectrumResult | None = field(default=None, repr=False)
    matrices: MatrixPair | None = field(default=None, repr=False)


def solve_generalized(mats: MatrixPair) -> SpectrumResult:
    """Solve ``H a = W O a`` for a fixed-w pencil.

    The overlap is Cholesky-factorised and the problem reduced to a standard
    symmetric one (LAPACK ``sygvd``), working on the rest-energy shifted
    pencil in the interior-orthonormal basis.
    """
    if mats.mode != FIXED_W:
        raise ValueError("solve_generalized needs a fixed_w pencil (Hermitian H, positive O)")
    o = mats.o_orth
    evals_o = np.linalg.eigvalsh(o)
    if evals_o[0] <= OVERLAP_RCOND * evals_o[-1]:
        raise ConditioningError(
            f"overlap matrix is not positive definite: smallest eigenvalue {evals_o[0]:.3e} "
            f"(largest {evals_o[-1]:.3e}); the basis is overcomplete"
        )
    try:
        E, y = scipy.linalg.eigh(mats.h_shifted, o)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"Cholesky reduction failed: {exc}") from exc
    N = mats.N
    return SpectrumResult(
        eigenvalues=E + mats.rest_energy,
        shifted=E,
        electron_values=E[N:].copy(),
        coefficients=mats.transform @ y,
        coefficients_orth=y,
        w_used=float(mats.energy),
    )


def solve_fixed_w(model: ModelParams, basis: ChannelBasis, energy: float) -> SpectrumResult:
    """Assemble at shifted embedding energy ``energy`` and solve."""
    return solve_generalized(assemble_matrices(model, basis, energy, FIXED_W))


def electron_states_folded(mats: MatrixPair, tol: float = 1e-14, max_iter: int = 50) -> np.ndarray:
    """Electron eigenvalues with the small-component block folded in.

    Eliminating the small components gives, for each electron state,

        [A - B (D - E)^{-1} B^T] a_l = E O_ll a_l,

    whose energy dependence is weak (~1/c^2), so a short fixed-point
    iteration per state converges.  Every matrix here is O(1) whatever the
    size of c, so this route survives the c -> infinity limit where the full
    2N x 2N spectrum spans ~2 c^2 and loses the electron digits.
    """
    if mats.mode != FIXED_W:
        raise ValueError("needs a fixed_w pencil")
    N = mats.N
    h = mats.h_shifted
    A, B, D = h[:N, :N], h[:N, N:], h[N:, N:]
    O_ll = mats.o_orth[:N, :N]
    out = np.empty(N)
    for j in range(N):
        E = 0.0
        for _ in range(max_iter):
            folded = A - B @ np.linalg.solve(D - E * np.eye(N), B.T)
            folded = 0.5 * (folded + folded.T)
            E_new = scipy.linalg.eigh(folded, O_ll, eigvals_only=True)[j]
            if abs(E_new - E) <= tol * max(1.0, abs(E_new)):
                E = E_new
                break
            E = E_new
        out[j] = E
    return out


def bound_states_selfconsistent(model: ModelParams, basis: ChannelBasis, state_rank: int = 0,
                                w0: float = -0.5, tol: float = 1e-10, max_iter: int = 50) -> ScfResult:
    """Iterate ``w <- W_{state_rank}(w)`` until the embedding energy matches.

    ``w0`` and the returned energies are shifted.  Damping by one half is
    switched on after the update has changed sign twice.
    """
    if not 0 <= state_rank < basis.N:
        raise ValueError(f"state_rank must be in [0, {basis.N}), got {state_rank}")
    if not w0 < model.V0:
        raise ContinuumError(f"initial energy {w0} is not below the continuum edge {model.V0}")
    w = float(w0)
    history = []
    damping = 1.0
    sign_flips = 0
    last_step = 0.0
    spec = mats = None
    for it in range(1, max_iter + 1):
        mats = assemble_matrices(model, basis, w, FIXED_W)
        spec = solve_generalized(mats)
        W = float(spec.electron_values[state_rank])
        history.append((w, W))
        if W >= model.V0:
            raise ContinuumError(
                f"electron state {state_rank} at E={W:.6g} crossed the continuum edge V0={model.V0}"
            )
        step = W - w
        logger.debug("scf iteration %d: w=%.12g W=%.12g", it, w, W)
        if abs(step) < tol:
            return ScfResult(E=W, iterations=it, history=history, converged=True,
                             state_rank=state_rank, spectrum=spec, matrices=mats)
        if last_step and np.sign(step) != np.sign(last_step):
            sign_flips += 1
            if sign_flips >= 2:
                damping = 0.5
        last_step = step
        w = w + damping * step
    logger.warning("scf did not converge in %d iterations", max_iter)
    return ScfResult(E=history[-1][1], iterations=max_iter, history=history, converged=False,
                     state_rank=state_rank, spectrum=spec, matrices=mats)


def surface_amplitudes(mats: MatrixPair, vector_orth: np.ndarray) -> tuple[float, float]:
    """Large and small radial amplitudes ``(g(R), f(R))`` of a state."""
    N = mats.N
    return float(vector_orth[:N] @ mats.g_R_orth), float(vector_orth[N:] @ mats.f_R_orth)


def surface_continuity_residual(model: ModelParams, basis: ChannelBasis, scf: ScfResult) -> float:
    """Relative mismatch of the surface ratio ``f(R)/g(R)`` against ``-c R^2 Gamma(W)``.

    The exterior solution has exactly ``f/g = -c R^2 Gamma`` at ``R``, so the
    residual measures how far the small component is from continuous.
    """
    if not scf.converged:
        raise ConvergenceError("surface continuity needs a converged self-consistent state")
    g, f = surface_amplitudes(scf.matrices, scf.spectrum.electron_vector(scf.state_rank, orth=True))
    if g == 0:
        raise ConvergenceError("large component vanishes at the surface (node on S)")
    target = model.c * model.R ** 2 * embedding_gamma(basis.channel, model, scf.E).gamma.real
    return abs(f / g + target) / abs(target)
