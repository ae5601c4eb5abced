from .factors import (
    AngleDiff,
    angular_factor_A,
    b_l1_norm,
    b_l1_sup,
    diffractive_factor_B,
)
from .modesum import ModeSumResult, mode_sum_oracle, modesum_kernel
from .propagator import KernelValue, heat_kernel, kernel_z, propagator_kernel
from .scans import dispersive_ratio_scan, heat_ratio_scan

__all__ = [
    "AngleDiff",
    "angular_factor_A",
    "diffractive_factor_B",
    "b_l1_norm",
    "b_l1_sup",
    "mode_sum_oracle",
    "ModeSumResult",
    "modesum_kernel",
    "KernelValue",
    "kernel_z",
    "propagator_kernel",
    "heat_kernel",
    "dispersive_ratio_scan",
    "heat_ratio_scan",
]
