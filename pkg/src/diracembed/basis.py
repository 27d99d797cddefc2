"""Kinetically balanced radial basis for one angular channel.

Large components ``g_n(r) = r^n exp(-zeta r)``; small components are their
kinetic-balance images ``f_n = dg_n/dr + kappa g_n / r``.  Every function is a
short polynomial in ``r`` times ``exp(-zeta r)`` and is stored that way
(``{power: coefficient}``) so that all matrix elements reduce to
`radial_power_integral` sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import AngularChannel, make_channel

__all__ = ["ChannelBasis", "make_basis", "default_n_min", "eval_basis"]

Poly = dict  # {integer power: coefficient}


def default_n_min(kappa: int) -> int:
    """Smallest power index whose small component stays integrable against -Z/r.

    ``f_1`` has a constant term ``(1 + kappa)`` that vanishes only for
    kappa = -1; any other channel starts at n = 2.
    """
    return 1 if kappa == -1 else 2


@dataclass(frozen=True)
class ChannelBasis:
    channel: AngularChannel
    N: int
    n_min: int
    zeta: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"basis size must be >= 1, got N={self.N}")
        if self.n_min < 1:
            raise ValueError(f"n_min must be >= 1, got {self.n_min}")
        if not self.zeta > 0:
            raise ValueError(f"zeta must be positive, got {self.zeta}")

    @property
    def kappa(self) -> int:
        return self.channel.kappa

    @property
    def indices(self) -> range:
        return range(self.n_min, self.n_min + self.N)

    def large(self, n: int) -> Poly:
        self._check_index(n)
        return {n: 1.0}

    def small(self, n: int) -> Poly:
        self._check_index(n)
        return kinetic_balance(self.large(n), self.kappa, self.zeta)

    def min_small_power(self) -> int:
        return min(min(self.small(n)) for n in self.indices)

    def _check_index(self, n):
        if n not in self.indices:
            raise IndexError(f"n={n} outside basis range {self.n_min}..{self.n_min + self.N - 1}")


def make_basis(kappa: int, N: int, n_min: int | None = None, zeta: float = 1.0) -> ChannelBasis:
    channel = make_channel(kappa)
    if n_min is None:
        n_min = default_n_min(channel.kappa)
    return ChannelBasis(channel=channel, N=N, n_min=n_min, zeta=zeta)


def derivative(p: Poly, zeta: float) -> Poly:
    """d/dr of ``p(r) exp(-zeta r)``, as a polynomial times ``exp(-zeta r)``."""
    out: Poly = {}
    for k, a in p.items():
        if k != 0:
            out[k - 1] = out.get(k - 1, 0.0) + k * a
        out[k] = out.get(k, 0.0) - zeta * a
    return _prune(out)


def shift(p: Poly, by: int) -> Poly:
    """Multiply by ``r**by``."""
    return {k + by: a for k, a in p.items()}


def add(p: Poly, q: Poly, scale: float = 1.0) -> Poly:
    out = dict(p)
    for k, a in q.items():
        out[k] = out.get(k, 0.0) + scale * a
    return _prune(out)


def kinetic_balance(g: Poly, kappa: int, zeta: float) -> Poly:
    """``dg/dr + kappa g / r`` (hbar = 1)."""
    return add(derivative(g, zeta), shift(g, -1), kappa)


def _prune(p: Poly) -> Poly:
    return {k: a for k, a in p.items() if a != 0}


def evaluate(p: Poly, zeta: float, r: float) -> float:
    return sum(a * r ** k for k, a in p.items()) * math.exp(-zeta * r)


def eval_basis(basis: ChannelBasis, n: int, r: float) -> tuple[float, float]:
    """Large and small radial functions ``(g_n(r), f_n(r))`` at ``r > 0``."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got r={r}")
    return evaluate(basis.large(n), basis.zeta, r), evaluate(basis.small(n), basis.zeta, r)
