"""Leakage-subspace precoding simulator for secure multi-user XL-MIMO downlink."""

from lspsim.arraychannel import (
    ArrayGeometry,
    PolarPosition,
    PropagationModel,
    SteeringVector,
    critical_distance,
    element_distance,
    element_index_grid,
    half_wavelength_ula,
    normalized_correlation,
    rayleigh_distance,
    steering_pw,
    steering_sw,
)

__all__ = [
    "ArrayGeometry",
    "PolarPosition",
    "PropagationModel",
    "SteeringVector",
    "critical_distance",
    "element_distance",
    "element_index_grid",
    "half_wavelength_ula",
    "normalized_correlation",
    "rayleigh_distance",
    "steering_pw",
    "steering_sw",
]
