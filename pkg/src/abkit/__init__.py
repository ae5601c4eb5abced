"""abkit: numerics for the 4D Aharonov-Bohm two-particle operator.

Closed-form Schrodinger/heat kernels with their diffractive factors, the
spectral measure of the square root of the operator, a partial-wave
Hankel/Fourier evolution engine with a split-step NLS solver, and scan
harnesses for dispersive, Strichartz, Sobolev-equivalence, virial/Morawetz
and scattering diagnostics.
"""

__version__ = "0.1.0"

from .errors import AbkitError, AccuracyError, ConfigError, DomainError, StabilityError
from .geometry import CylPoint4, FluxParam, PairConfig

__all__ = [
    "AbkitError",
    "AccuracyError",
    "ConfigError",
    "DomainError",
    "StabilityError",
    "FluxParam",
    "CylPoint4",
    "PairConfig",
    "__version__",
]
