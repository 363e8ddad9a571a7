"""Geometric modular flows for unions of disjoint intervals.

Submodules: geometry (Moebius maps, Cayley transform, intervals,
Schwarzian), uniformization (zeta and its preimages), flow (flows,
velocities, double cones, orbits), mixing (mixing matrices), thermo
(temperature, acceleration, energy density, charge splitting),
fermi_kms (free Fermi correlators, KMS, identities) and the CLI layer.
"""

from __future__ import annotations

from .errors import (BoundaryPoint, BranchError, ConvergenceFailure, DegenerateCone,
                     DivergentAcceleration, ModflowError, NearSingular, OutsideDomain,
                     RegulatedPole, SingularDerivative)
from .fermi_kms import (correlator_closed, correlator_mixed, kms_residual, lemma_identities,
                        sl2_recursion)
from .flow import (FlowParams, TwoIntervalCone, flow_circle_symmetric, flow_zeta, trace_orbit,
                   velocity_n2)
from .geometry import (INF, CircleArc, MoebiusMap, NInterval, RealInterval, cayley, cayley_inv,
                       lambda_I, schwarzian, symmetric_ninterval)
from .mixing import MixingMatrix, mixing_closed_symmetric, mixing_ode, omega_matrix
from .thermo import ThermoField, beta_field, charge_split_points, h_nu_map, kappa_field
from .uniformization import g_map, preimage, preimages, zeta, zeta_prime

__version__ = "0.1.0"

__all__ = [
    "BoundaryPoint", "BranchError", "ConvergenceFailure", "DegenerateCone",
    "DivergentAcceleration", "ModflowError", "NearSingular", "OutsideDomain", "RegulatedPole",
    "SingularDerivative",
    "INF", "CircleArc", "MoebiusMap", "NInterval", "RealInterval", "cayley", "cayley_inv",
    "lambda_I", "schwarzian", "symmetric_ninterval",
    "zeta", "zeta_prime", "preimage", "preimages", "g_map",
    "FlowParams", "TwoIntervalCone", "flow_circle_symmetric", "flow_zeta", "trace_orbit",
    "velocity_n2",
    "MixingMatrix", "mixing_closed_symmetric", "mixing_ode", "omega_matrix",
    "ThermoField", "beta_field", "kappa_field", "charge_split_points", "h_nu_map",
    "correlator_closed", "correlator_mixed", "kms_residual", "lemma_identities", "sl2_recursion",
]
