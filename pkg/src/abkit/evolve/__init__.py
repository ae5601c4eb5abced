from .data import datum_family, mode_gaussian, normalized
from .field import ModeField
from .grid import GridSpec
from .nls import (
    NLSConfig,
    Trajectory,
    mass_energy_drift,
    nls_evolve,
    read_checkpoint,
    spatial_norm,
    virial_residuals,
    write_checkpoint,
)
from .observables import (
    Observables,
    boundary_fraction,
    magnetic_gradient,
    morawetz_density,
    observables,
    phi_weight,
    virial_rhs,
    weight_derivatives,
)
from .transforms import (
    StepOperator,
    apply_multiplier,
    decompose,
    evaluate_at_point,
    linear_evolve,
    synthesize,
)

__all__ = [
    "GridSpec",
    "ModeField",
    "decompose",
    "synthesize",
    "apply_multiplier",
    "linear_evolve",
    "evaluate_at_point",
    "StepOperator",
    "mode_gaussian",
    "normalized",
    "datum_family",
    "NLSConfig",
    "Trajectory",
    "nls_evolve",
    "mass_energy_drift",
    "virial_residuals",
    "spatial_norm",
    "write_checkpoint",
    "read_checkpoint",
    "Observables",
    "observables",
    "magnetic_gradient",
    "virial_rhs",
    "phi_weight",
    "morawetz_density",
    "boundary_fraction",
    "weight_derivatives",
]
