"""Half-integer-order modified Bessel functions and radial power integrals.

Only orders ``n + 1/2`` are needed, and for those the functions are
elementary: closed forms at order 1/2 plus three-term recurrences.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

__all__ = [
    "BesselEval",
    "mod_sph_bessel_k",
    "mod_sph_bessel_i",
    "bessel_k_sequence",
    "radial_power_integral",
    "radial_power_integrals",
]


@dataclass(frozen=True)
class BesselEval:
    """Value of a Bessel function and its derivative with respect to the argument."""

    value: complex
    d_dz: complex


def _check_arg(z) -> complex:
    z = complex(z)
    if not z.real > 0:
        raise ValueError(f"argument must have positive real part, got z={z}")
    return z


def _check_order(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"order index must be a nonnegative integer, got {n!r}")
    return int(n)


def bessel_k_sequence(nmax: int, z) -> list[complex]:
    """``[K_{-1/2}(z), K_{1/2}(z), ..., K_{nmax+1/2}(z)]`` by upward recurrence.

    Upward recurrence is stable for K (the dominant solution going up in order).
    """
    z = _check_arg(z)
    k_half = cmath.sqrt(math.pi / (2 * z)) * cmath.exp(-z)
    seq = [k_half, k_half]
    for n in range(nmax):
        nu = n + 0.5
        seq.append(seq[-2] + (2 * nu / z) * seq[-1])
    return seq


def mod_sph_bessel_k(n: int, z) -> BesselEval:
    """K_{n+1/2}(z) and its z-derivative for ``Re z > 0``."""
    n = _check_order(n)
    seq = bessel_k_sequence(n + 1, z)
    # seq[j] is K_{j-1/2}
    k_lo, k_n, k_hi = seq[n], seq[n + 1], seq[n + 2]
    return BesselEval(value=k_n, d_dz=-0.5 * (k_lo + k_hi))


def _i_ratios(n: int, z: complex) -> list[complex]:
    """``rho[j] = I_{j+1/2}/I_{j-1/2}`` for j = 1..n, from backward recurrence.

    I is the minimal solution of the order recurrence, so the ratios are
    obtained stably from a start order well above both n and |z|.
    """
    start = n + int(abs(z)) + 40
    rho = 0j
    out = [0j] * (n + 1)
    for j in range(start, 0, -1):
        nu = j + 0.5
        # I_{nu-1} = (2 nu / z) I_nu + I_{nu+1}
        rho = 1.0 / ((2 * nu / z) + rho)
        if j <= n:
            out[j] = rho
    return out


def mod_sph_bessel_i(n: int, z) -> BesselEval:
    """I_{n+1/2}(z) and its z-derivative for ``Re z > 0``."""
    n = _check_order(n)
    z = _check_arg(z)
    pref = cmath.sqrt(2 / (math.pi * z))
    i_minus = pref * cmath.cosh(z)  # I_{-1/2}
    i_half = pref * cmath.sinh(z)   # I_{1/2}
    if n == 0:
        return BesselEval(value=i_half, d_dz=i_minus - (0.5 / z) * i_half)
    rho = _i_ratios(n, z)
    i_prev, i_n = i_minus, i_half
    for j in range(1, n + 1):
        i_prev, i_n = i_n, i_n * rho[j]
    nu = n + 0.5
    # I'_nu = I_{nu-1} - (nu/z) I_nu
    return BesselEval(value=i_n, d_dz=i_prev - (nu / z) * i_n)


def _check_integral_args(a, b, R):
    if int(a) != a or a < 0:
        raise ValueError(f"power must be a nonnegative integer, got a={a!r}")
    if not b > 0:
        raise ValueError(f"decay constant must be positive, got b={b!r}")
    if not R > 0:
        raise ValueError(f"upper limit must be positive, got R={R!r}")


def _series_integral(a, b, R, exp, one, eps):
    # int_0^R r^a e^{-br} dr = R^{a+1} e^{-bR} sum_k (bR)^k / ((a+1)...(a+k+1)),
    # every term positive, so no cancellation for a > bR.
    x = b * R
    term = one / (a + 1)
    total = term
    k = 0
    while term > eps * total:
        k += 1
        term = term * x / (a + 1 + k)
        total += term
    return R ** (a + 1) * exp(-x) * total


def radial_power_integrals(amax: int, b, R, *, dps: int | None = None) -> list:
    """``[I_0, ..., I_amax]`` with ``I_a = int_0^R r^a exp(-b r) dr``.

    Upward recurrence ``I_a = (a I_{a-1} - R^a e^{-bR}) / b`` is used while
    ``a <= bR``.  Beyond that the recurrence loses digits geometrically, so the
    top value comes from the positive series and the rest by downward recurrence.

    With ``dps`` the values are ``mpmath.mpf`` at that many decimal digits.
    """
    _check_integral_args(amax, b, R)
    if dps is None:
        return _integrals(amax, float(b), float(R), math.exp, 1.0, 1e-18)
    with mpmath.workdps(dps):
        one = mpmath.mpf(1)
        eps = mpmath.mpf(10) ** (-dps - 2)
        return _integrals(amax, one * b, one * R, mpmath.exp, one, eps)


def _integrals(amax, b, R, exp, one, eps):
    x = b * R
    ebr = exp(-x)
    out = [None] * (amax + 1)
    split = min(amax, int(math.floor(float(x))))
    out[0] = (one - ebr) / b
    for a in range(1, split + 1):
        out[a] = (a * out[a - 1] - R ** a * ebr) / b
    if split < amax:
        out[amax] = _series_integral(amax, b, R, exp, one, eps)
        for a in range(amax, split + 1, -1):
            # downward: I_{a-1} = (b I_a + R^a e^{-bR}) / a
            out[a - 1] = (b * out[a] + R ** a * ebr) / a
    return out


def radial_power_integral(a: int, b: float, R: float, *, dps: int | None = None):
    """``int_0^R r^a exp(-b r) dr`` in closed form (see `radial_power_integrals`)."""
    return radial_power_integrals(a, b, R, dps=dps)[a]
