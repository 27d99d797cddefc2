"""Relativistic embedding for a one-electron atom in a spherical cavity.

Bound states and the local density of states of the radial Dirac equation
inside a sphere of radius R, with the constant exterior potential V0 replaced
by an exact, energy-dependent embedding potential on the sphere.  Energies
passed to and returned from the public functions are shifted by the rest
energy: ``E = W - m c^2``.
"""

from .core import (C_LIGHT, AngularChannel, BranchPointError, ConditioningError, ContinuumError,
                   ConvergenceError, EmbeddingError, EnergyValue, ModelParams, make_channel)
from .specfun import (BesselEval, bessel_k_sequence, mod_sph_bessel_i, mod_sph_bessel_k,
                      radial_power_integral, radial_power_integrals)
from .embedding import EmbeddingValue, decay_constant, embedding_gamma, embedding_gamma_dyson
from .basis import ChannelBasis, default_n_min, eval_basis, make_basis
from .assembly import FIXED_W, RESOLVENT, InteriorIntegrals, MatrixPair, assemble_matrices, interior_integrals
from .solver import (ScfResult, SpectrumResult, bound_states_selfconsistent, electron_states_folded,
                     solve_fixed_w, solve_generalized, surface_amplitudes, surface_continuity_residual)
from .greens import (BoundWeight, LdosCurve, bound_weight, bound_weight_routes, ldos, ldos_scan,
                     resolvent_matrix, resolvent_trace)
from .oracle import (RadialSolution, exact_bound_states, integrate_radial_dirac, matching_function,
                     matching_ratio, sommerfeld_energy)

__version__ = "0.1.0"
