"""STIRAP population transfer through a dephasing intermediate spin.

Engines, from exact to closed form:

* :func:`evolve_full8` -- three-spin master equation (oracle)
* :func:`evolve_bare` -- single-excitation 3-level master equation
* :func:`evolve_adiabatic` -- the same dynamics in the dressed basis
* :func:`evolve_reduced` -- closed (rho_dd, a, b) system
* :func:`analytic_rho_dd` / :func:`transfer_efficiency` -- quasi-static law
"""

from .adiabatic import evolve_adiabatic, in_frame, mixing_matrix
from .errors import ConfigError, ContractViolation, DomainError, NumericFailure, UsageError
from .lindblad import SimConfig, Trajectory, evolve_bare, evolve_full8
from .protocols import DriveSample, Protocol, sample
from .reduced import (
    adiabatic_margins,
    analytic_rho_dd,
    classical_reference,
    evolve_reduced,
    transfer_efficiency,
)

__version__ = "0.1.0"
