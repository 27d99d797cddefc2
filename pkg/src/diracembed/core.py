"""Shared constants, model parameters and angular-channel bookkeeping.

Hartree atomic units throughout (hbar = m = e = 1).  Energies passed between
modules are *shifted* energies ``E = W - m c^2``; the total energy ``W`` is only
formed when it is reported, because ``W`` carries the rest energy (~1.9e4
hartree) and would otherwise swamp the digits that matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "C_LIGHT",
    "EmbeddingError",
    "BranchPointError",
    "ConditioningError",
    "ConvergenceError",
    "ContinuumError",
    "ModelParams",
    "AngularChannel",
    "EnergyValue",
    "make_channel",
]

#: Speed of light in atomic units (value used for the cavity benchmarks).
C_LIGHT = 137.03599976


class EmbeddingError(Exception):
    """Base class for numerical failures raised by this package."""


class BranchPointError(EmbeddingError):
    """Energy too close to a branch point of the exterior decay constant."""


class ConditioningError(EmbeddingError):
    """Overlap matrix not (numerically) positive definite, or a singular pencil."""


class ConvergenceError(EmbeddingError):
    """An iteration failed to converge."""


class ContinuumError(EmbeddingError):
    """A bound-state quantity was requested at or above the continuum edge."""


@dataclass(frozen=True)
class ModelParams:
    """Hydrogen-like atom in a spherical cavity.

    Parameters
    ----------
    R : float
        Cavity radius (bohr).
    V0 : float
        Constant potential outside the cavity (hartree).
    Z : float
        Nuclear charge; the interior potential is ``-Z/r``.
    c : float
        Speed of light.  Raise it to approach the non-relativistic limit.
    """

    R: float = 3.0
    V0: float = 10.0
    Z: float = 1.0
    c: float = C_LIGHT

    def __post_init__(self):
        for name in ("R", "V0", "Z", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.R <= 0:
            raise ValueError(f"cavity radius must be positive, got R={self.R}")
        if self.c <= 0:
            raise ValueError(f"speed of light must be positive, got c={self.c}")
        if self.Z < 0:
            raise ValueError(f"nuclear charge must be nonnegative, got Z={self.Z}")
        if self.Z / self.c >= 1:
            raise ValueError("Z*alpha >= 1: the Coulomb indicial exponent is complex")

    @property
    def alpha(self) -> float:
        return 1.0 / self.c

    @property
    def rest_energy(self) -> float:
        """m c^2 with m = 1."""
        return self.c * self.c

    def total(self, E):
        """Total energy W for a shifted energy E."""
        return E + self.rest_energy

    def shifted(self, W):
        """Shifted energy E for a total energy W."""
        return W - self.rest_energy


@dataclass(frozen=True)
class AngularChannel:
    """Relativistic angular channel; ``ell`` and ``ell_bar`` label the large
    and small components."""

    kappa: int
    ell: int
    ell_bar: int

    @property
    def sign(self) -> int:
        return 1 if self.kappa > 0 else -1


def make_channel(kappa: int) -> AngularChannel:
    """Build the channel for quantum number ``kappa`` (nonzero integer)."""
    if int(kappa) != kappa:
        raise ValueError(f"kappa must be an integer, got {kappa!r}")
    kappa = int(kappa)
    if kappa == 0:
        raise ValueError("kappa = 0 is not a Dirac channel")
    ell = kappa if kappa > 0 else -(kappa + 1)
    ell_bar = ell - (1 if kappa > 0 else -1)
    return AngularChannel(kappa=kappa, ell=ell, ell_bar=ell_bar)


@dataclass(frozen=True)
class EnergyValue:
    """A shifted energy together with its total energy ``W = E + m c^2``."""

    E: float
    W: float

    @classmethod
    def from_shifted(cls, E, model: ModelParams) -> "EnergyValue":
        return cls(E=E, W=model.total(E))

    @classmethod
    def from_total(cls, W, model: ModelParams) -> "EnergyValue":
        return cls(E=model.shifted(W), W=W)
