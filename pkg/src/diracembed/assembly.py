"""Hamiltonian and overlap matrices of the embedded channel problem.

Blocks are ordered ``[large | small]``.  With ``hbar = m = 1`` the channel
matrix elements are

    H_ll = int g (-Z/r + c^2) g'  + c^2 R^2 g(R) g'(R) [Gamma - w Gamma_dot]
    H_ss = int f (-Z/r - c^2) f'
    H_ls = -c int g (df'/dr - kappa f'/r) + c g(R) f'(R)
    H_sl =  c int f (dg'/dr + kappa g'/r)
    O_ll = int g g' - c^2 R^2 g(R) g'(R) Gamma_dot
    O_ss = int f f'

and in resolvent mode the ``Gamma_dot`` terms are dropped.

The monomial basis is badly conditioned (the Gram matrix of ``r^n e^{-r}``
reaches 1e20 and beyond by N ~ 15), so the energy-independent radial
integrals are evaluated in extended precision and the interior overlaps are
Cholesky-orthonormalised there.  The solvers then work in that orthonormal
representation, shifted by the rest energy, in ordinary double precision;
the raw double-precision ``H`` and ``O`` are kept for inspection and checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .basis import ChannelBasis, kinetic_balance, derivative, shift, add
from .core import ModelParams
from .embedding import EmbeddingValue, embedding_gamma
from .specfun import radial_power_integrals

__all__ = ["MatrixPair", "InteriorIntegrals", "interior_integrals", "assemble_matrices"]

FIXED_W = "fixed_w"
RESOLVENT = "resolvent"


@dataclass(frozen=True)
class InteriorIntegrals:
    """Energy-independent radial integrals of one basis.

    Raw arrays are in the monomial basis; ``*_o`` arrays are in the basis
    orthonormalised over the interior (``T_l^T s_ll T_l = 1`` and likewise
    for the small block).
    """

    s_ll: np.ndarray
    c_ll: np.ndarray
    s_ss: np.ndarray
    c_ss: np.ndarray
    k_sl: np.ndarray
    k_ls: np.ndarray
    g_R: np.ndarray
    f_R: np.ndarray
    t_l: np.ndarray
    t_s: np.ndarray
    c_ll_o: np.ndarray
    c_ss_o: np.ndarray
    k_sl_o: np.ndarray
    k_ls_o: np.ndarray
    g_R_o: np.ndarray
    f_R_o: np.ndarray


def _poly_integral(p, q, extra_power, table):
    total = 0
    for i, a in p.items():
        for j, b in q.items():
            power = i + j + extra_power
            if power < 0:
                raise ValueError("divergent radial integral: basis is not regular enough at r = 0")
            total += a * b * table[power]
    return total


def _poly_value(p, R, zeta):
    return sum(a * R ** k for k, a in p.items()) * mpmath.exp(-zeta * R)


def _dps_for(N: int) -> int:
    return max(50, 20 + 3 * N)


@lru_cache(maxsize=64)
def _interior_cached(kappa: int, N: int, n_min: int, zeta: float, R: float) -> InteriorIntegrals:
    dps = _dps_for(N)
    with mpmath.workdps(dps):
        zeta_mp = mpmath.mpf(zeta)
        R_mp = mpmath.mpf(R)
        idx = range(n_min, n_min + N)
        one = mpmath.mpf(1)
        large = [{n: one} for n in idx]
        small = [kinetic_balance(g, kappa, zeta_mp) for g in large]
        # the kinetic-balance operator applied to a large function, and its
        # adjoint partner acting on a small function
        d_large = [add(derivative(g, zeta_mp), shift(g, -1), kappa) for g in large]
        d_small = [add(derivative(f, zeta_mp), shift(f, -1), -kappa) for f in small]
        amax = 2 * (n_min + N) + 2
        table = radial_power_integrals(amax, 2 * zeta_mp, R_mp, dps=dps)

        def mat(left, right, extra=0):
            return mpmath.matrix([[_poly_integral(p, q, extra, table) for q in right] for p in left])

        s_ll = mat(large, large)
        c_ll = mat(large, large, -1)
        s_ss = mat(small, small)
        c_ss = mat(small, small, -1)
        k_sl = mat(small, d_large)
        g_R = mpmath.matrix([_poly_value(g, R_mp, zeta_mp) for g in large])
        f_R = mpmath.matrix([_poly_value(f, R_mp, zeta_mp) for f in small])
        k_ls = -mat(large, d_small) + g_R * f_R.T

        t_l = _inverse_cholesky_t(s_ll)
        t_s = _inverse_cholesky_t(s_ss)

        def congr(tl, x, tr):
            return tl.T * x * tr

        out = dict(
            s_ll=s_ll, c_ll=c_ll, s_ss=s_ss, c_ss=c_ss, k_sl=k_sl, k_ls=k_ls,
            g_R=g_R, f_R=f_R, t_l=t_l, t_s=t_s,
            c_ll_o=congr(t_l, c_ll, t_l), c_ss_o=congr(t_s, c_ss, t_s),
            k_sl_o=congr(t_s, k_sl, t_l), k_ls_o=congr(t_l, k_ls, t_s),
            g_R_o=t_l.T * g_R, f_R_o=t_s.T * f_R,
        )
        arrays = {}
        for name, m in out.items():
            a = np.array(m.tolist(), dtype=float)
            if name in ("g_R", "f_R", "g_R_o", "f_R_o"):
                a = a.reshape(-1)
            a.setflags(write=False)
            arrays[name] = a
    return InteriorIntegrals(**arrays)


def _inverse_cholesky_t(s):
    """``T = L^{-T}`` with ``s = L L^T``, so that ``T^T s T = 1``."""
    try:
        L = mpmath.cholesky(s)
    except ZeroDivisionError as exc:  # pragma: no cover - only for absurd N
        raise ValueError("interior overlap is singular even in extended precision") from exc
    return mpmath.inverse(L).T


def interior_integrals(basis: ChannelBasis, R: float) -> InteriorIntegrals:
    return _interior_cached(basis.kappa, basis.N, basis.n_min, float(basis.zeta), float(R))


@dataclass(frozen=True)
class MatrixPair:
    """Assembled channel matrices at one embedding energy.

    ``H`` and ``O`` are the raw double-precision matrices in the kinetically
    balanced basis (total energies).  ``h_shifted`` and ``o_orth`` are the
    same pencil in the interior-orthonormal basis, shifted by ``m c^2``:
    ``h_shifted = T^T (H - m c^2 O) T`` and ``o_orth = T^T O T``, where
    ``transform`` is the block-diagonal ``T``.  Solvers use the latter.
    """

    H: np.ndarray
    O: np.ndarray
    mode: str
    energy: complex
    rest_energy: float
    h_shifted: np.ndarray
    o_orth: np.ndarray
    transform: np.ndarray
    interior_overlap: np.ndarray
    embedding: EmbeddingValue
    g_R: np.ndarray = field(repr=False)
    f_R: np.ndarray = field(repr=False)
    g_R_orth: np.ndarray = field(repr=False)
    f_R_orth: np.ndarray = field(repr=False)

    @property
    def w(self):
        """Total energy at which the embedding potential was evaluated."""
        return self.energy + self.rest_energy

    @property
    def N(self) -> int:
        return self.H.shape[0] // 2


def _block_diag(a, b, dtype):
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m, n + m), dtype=dtype)
    out[:n, :n] = a
    out[n:, n:] = b
    return out


def assemble_matrices(model: ModelParams, basis: ChannelBasis, energy, mode: str = FIXED_W,
                      embedding: EmbeddingValue | None = None) -> MatrixPair:
    """Build the channel pencil with the embedding potential at shifted ``energy``.

    Parameters
    ----------
    model, basis
        Physical model and channel basis.
    energy : float or complex
        Shifted energy ``w - m c^2`` at which Gamma is evaluated.  Must be
        real in ``fixed_w`` mode.
    mode : {"fixed_w", "resolvent"}
        ``fixed_w`` keeps the ``Gamma_dot`` corrections; ``resolvent``
        drops them.
    embedding : EmbeddingValue, optional
        Precomputed embedding potential at ``energy``.
    """
    if mode not in (FIXED_W, RESOLVENT):
        raise ValueError(f"unknown assembly mode {mode!r}")
    if mode == FIXED_W:
        if np.iscomplexobj(energy) and np.imag(energy) != 0:
            raise ValueError("fixed_w assembly needs a real embedding energy")
        energy = float(np.real(energy))
    if model.Z > 0 and basis.min_small_power() < 0:
        raise ValueError(
            f"basis starting at n={basis.n_min} makes the small-component Coulomb integral diverge"
        )
    ints = interior_integrals(basis, model.R)
    emb = embedding if embedding is not None else embedding_gamma(basis.channel, model, energy)
    c, R, Z = model.c, model.R, model.Z
    mc2 = model.rest_energy
    surf = c * c * R * R
    N = basis.N

    if mode == FIXED_W:
        if abs(emb.gamma.imag) > 1e-14 * abs(emb.gamma) or abs(emb.gamma_dot.imag) > 1e-14 * abs(emb.gamma_dot):
            raise ValueError("fixed_w assembly needs an energy below the continuum edge")
        gamma, gamma_dot = emb.gamma.real, emb.gamma_dot.real
        dtype = float
    else:
        gamma, gamma_dot = complex(emb.gamma), 0.0
        dtype = complex
    w_total = energy + mc2

    gg = np.outer(ints.g_R, ints.g_R)
    H = np.zeros((2 * N, 2 * N), dtype=dtype)
    H[:N, :N] = -Z * ints.c_ll + mc2 * ints.s_ll + surf * gg * (gamma - w_total * gamma_dot)
    H[:N, N:] = c * ints.k_ls
    H[N:, :N] = c * ints.k_sl
    H[N:, N:] = -Z * ints.c_ss - mc2 * ints.s_ss
    O = _block_diag(ints.s_ll - surf * gamma_dot * gg, ints.s_ss, dtype)

    go = np.outer(ints.g_R_o, ints.g_R_o)
    eye = np.eye(N)
    hs = np.zeros((2 * N, 2 * N), dtype=dtype)
    hs[:N, :N] = -Z * ints.c_ll_o + surf * go * (gamma - energy * gamma_dot)
    hs[:N, N:] = c * ints.k_ls_o
    hs[N:, :N] = c * ints.k_sl_o
    hs[N:, N:] = -Z * ints.c_ss_o - 2 * mc2 * eye
    oo = _block_diag(eye - surf * gamma_dot * go, eye, dtype)

    return MatrixPair(
        H=H, O=O, mode=mode, energy=energy, rest_energy=mc2,
        h_shifted=hs, o_orth=oo,
        transform=_block_diag(ints.t_l, ints.t_s, float),
        interior_overlap=_block_diag(ints.s_ll, ints.s_ss, float),
        embedding=emb,
        g_R=ints.g_R, f_R=ints.f_R, g_R_orth=ints.g_R_o, f_R_orth=ints.f_R_o,
    )
