"""Embedding potential of the constant-potential exterior of a sphere.

Outside the cavity the decaying channel solution has radial amplitudes

    g(r) = r k_ell(kr),   f(r) = -gamma r k_ellbar(kr)

(``k_n`` the modified spherical Bessel function of the third kind), so the
surface relation ``f(R)/g(R) = -c R^2 Gamma`` fixes

    Gamma(w) = gamma / (c R^2) * K_{ellbar+1/2}(kR) / K_{ell+1/2}(kR),
    c k = sqrt(m^2 c^4 - (w - V0)^2),   gamma = c k / (w - V0 + m c^2).

Energies here are shifted (``e = w - m c^2``).  With ``d = e - V0`` the
radicand is written ``-d (2 m c^2 + d)`` which has no cancellation even when
``c`` is made very large.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .core import C_LIGHT, AngularChannel, BranchPointError, ContinuumError, ModelParams
from .specfun import bessel_k_sequence, mod_sph_bessel_i

__all__ = ["EmbeddingValue", "embedding_gamma", "embedding_gamma_dyson", "decay_constant"]

#: relative branch-point window, measured against (m c^2)^2 at the default c
BRANCH_TOL = 1e-12
# The same window expressed as a distance in energy (~9.4e-9 hartree), so it
# does not grow with c when the non-relativistic limit is probed.
_BRANCH_DIST = 0.5 * BRANCH_TOL * (C_LIGHT * C_LIGHT)


@dataclass(frozen=True)
class EmbeddingValue:
    """Channel embedding potential at one energy.

    Attributes
    ----------
    gamma : complex
        Gamma_kappa(w).
    gamma_dot : complex
        dGamma_kappa/dw.
    k : complex
        Exterior decay constant, ``Re k >= 0``.
    gamma_small_ratio : complex
        ``c k / (w - V0 + m c^2)``.
    """

    gamma: complex
    gamma_dot: complex
    k: complex
    gamma_small_ratio: complex


def decay_constant(model: ModelParams, e) -> tuple[complex, complex]:
    """``(c k, d(ck)/dw)`` on the principal branch.

    Above the continuum edge with ``Im e > 0`` this gives ``Im k < 0``:
    outgoing exterior waves, i.e. the retarded resolvent.
    """
    mc2 = model.rest_energy
    d = complex(e) - model.V0
    radicand = -d * (2 * mc2 + d)
    if min(abs(d), abs(2 * mc2 + d)) < _BRANCH_DIST:
        raise BranchPointError(f"energy {e} is at a branch point of the exterior decay constant")
    ck = cmath.sqrt(radicand)
    if ck.real == 0 and ck.imag > 0:
        ck = -ck
    dck = -(mc2 + d) / ck
    return ck, dck


def _k_ratio(channel: AngularChannel, z: complex) -> tuple[complex, complex]:
    """``K_{ellbar+1/2}(z)/K_{ell+1/2}(z)`` and its z-derivative."""
    lmax = max(channel.ell, channel.ell_bar)
    seq = bessel_k_sequence(lmax + 1, z)  # seq[j] = K_{j-1/2}

    def k_and_dk(n):
        return seq[n + 1], -0.5 * (seq[n] + seq[n + 2])

    kl, dkl = k_and_dk(channel.ell)
    kb, dkb = k_and_dk(channel.ell_bar)
    ratio = kb / kl
    return ratio, (dkb * kl - kb * dkl) / (kl * kl)


def embedding_gamma(channel: AngularChannel, model: ModelParams, e) -> EmbeddingValue:
    """Gamma_kappa and its analytic energy derivative at shifted energy ``e``.

    ``e`` may be complex; for real ``e`` above the continuum edge the
    decay constant is purely imaginary and the caller must supply ``Im e > 0``.
    """
    c, R = model.c, model.R
    ck, dck = decay_constant(model, e)
    k = ck / c
    if not k.real > 0:
        raise ContinuumError(
            f"energy {e} lies on the continuum (Re k = 0); give it a positive imaginary part"
        )
    den = 2 * model.rest_energy + (complex(e) - model.V0)  # w - V0 + m c^2
    gam = ck / den
    dgam = (dck * den - ck) / (den * den)
    ratio, dratio = _k_ratio(channel, k * R)
    dk = dck / c
    pref = 1.0 / (c * R * R)
    gamma = pref * gam * ratio
    gamma_dot = pref * (dgam * ratio + gam * dratio * R * dk)
    return EmbeddingValue(gamma=gamma, gamma_dot=gamma_dot, k=k, gamma_small_ratio=gam)


def embedding_gamma_dyson(channel: AngularChannel, model: ModelParams, e: float) -> complex:
    """Gamma_kappa from the surface Dyson equation of the exterior Green function.

    The radial Green function of the constant-potential exterior,
    ``G(r, r') = A u(r) v(r')^T`` for ``r > r'`` with ``u`` the decaying
    (K) and ``v`` the regular (I) solution, reduces the surface integral
    equation on the sphere to the scalar equation

        R^2 Gamma = G_ss + c G_sl R^2 Gamma,

    with both Green function entries the ``r -> R+`` limits at ``r' = R``.
    ``A = 1/(c Wr)`` uses the closed-form Wronskian
    ``Wr = u_f v_g - u_g v_f = -gamma pi / (2 k^2)``.
    """
    e = float(e)
    if not model.V0 - 2 * model.rest_energy < e < model.V0:
        raise ContinuumError("Dyson route needs an energy below the continuum edge")
    c, R = model.c, model.R
    ck, _ = decay_constant(model, e)
    k = ck / c
    gam = ck / (2 * model.rest_energy + (e - model.V0))
    z = k * R
    sph = cmath.sqrt(math.pi / (2 * z))
    kseq = bessel_k_sequence(max(channel.ell, channel.ell_bar), z)
    k_l, k_b = sph * kseq[channel.ell + 1], sph * kseq[channel.ell_bar + 1]
    i_l = sph * mod_sph_bessel_i(channel.ell, z).value
    i_b = sph * mod_sph_bessel_i(channel.ell_bar, z).value
    u_g, u_f = R * k_l, -gam * R * k_b
    v_g, v_f = R * i_l, gam * R * i_b
    wronskian = -gam * math.pi / (2 * k * k)
    amp = 1.0 / (c * wronskian)
    g_ss = amp * u_f * v_f
    g_sl = amp * u_f * v_g
    return g_ss / (1 - c * g_sl) / (R * R)
