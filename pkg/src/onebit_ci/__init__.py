"""One-bit constructive-interference precoding for downlink massive MIMO with PSK.

Negative l1 penalty homotopy (NL1P) and its fixing-set acceleration (ANL1P),
an exhaustive oracle, zero-forcing baselines and a Monte Carlo BER harness.
"""

__version__ = "0.1.0"

from .baselines import brute_force, partition_instance, zf_quantized, zf_unquantized
from .estimators import BruteForcePrecoder, NL1PPrecoder, ZFPrecoder, make_precoder
from .model import (
    CiModel,
    boundary_vectors,
    build_model,
    build_vk,
    ci_margin,
    ci_objective,
    psk_point,
    quantize_onebit,
    restore_transmit_signal,
)
from .numerics import RngStream, mean_abs, project_simplex, spectral_norm
from .solvers import (
    AoParams,
    HomotopyParams,
    SolveReport,
    ao_solve,
    ao_solve_fixed,
    default_ao_params,
    default_homotopy_params,
    generic_ao,
    nl1p,
    theoretical_schedule,
    x_update,
    y_update,
)

__all__ = [
    "AoParams",
    "BruteForcePrecoder",
    "CiModel",
    "HomotopyParams",
    "NL1PPrecoder",
    "RngStream",
    "SolveReport",
    "ZFPrecoder",
    "ao_solve",
    "ao_solve_fixed",
    "boundary_vectors",
    "brute_force",
    "build_model",
    "build_vk",
    "ci_margin",
    "ci_objective",
    "default_ao_params",
    "default_homotopy_params",
    "generic_ao",
    "make_precoder",
    "mean_abs",
    "nl1p",
    "partition_instance",
    "project_simplex",
    "psk_point",
    "quantize_onebit",
    "restore_transmit_signal",
    "spectral_norm",
    "theoretical_schedule",
    "x_update",
    "y_update",
    "zf_quantized",
    "zf_unquantized",
]
