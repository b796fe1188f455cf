"""ULA geometry and steering vectors under spherical and planar wavefronts.

The array sits on the y-axis, centered at the origin; element i occupies
(0, m_i * d) with m_i = i - (M-1)/2.  A user at polar position (r, theta)
(theta measured from broadside) is at Cartesian (r cos(theta), r sin(theta)).
The spherical-wavefront (SW) model keeps exact per-element distances in both
amplitude and phase; the planar-wavefront (PW) model is its first-order
far-field limit: common amplitude and a phase linear in m.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# 2.4 GHz carrier
DEFAULT_WAVELENGTH = 0.1249


class PropagationModel(enum.Enum):
    SW = "SW"
    PW = "PW"


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array: M elements, spacing d, wavelength, per-meter
    reference channel power beta0 (power at 1 m range)."""

    num_elements: int
    spacing: float
    wavelength: float
    ref_power: float = 1.0

    def __post_init__(self):
        if self.num_elements < 1:
            raise ValueError("need at least one element")
        for name in ("spacing", "wavelength", "ref_power"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive")

    def aperture(self) -> float:
        return self.num_elements * self.spacing


def half_wavelength_ula(num_elements: int,
                        wavelength: float = DEFAULT_WAVELENGTH,
                        ref_power: float = 1.0) -> ArrayGeometry:
    """ULA with the customary d = wavelength/2 spacing."""
    return ArrayGeometry(num_elements, wavelength / 2.0, wavelength, ref_power)


@dataclass(frozen=True)
class PolarPosition:
    range_m: float
    azimuth_rad: float

    def __post_init__(self):
        if not (np.isfinite(self.range_m) and self.range_m > 0):
            raise ValueError("range must be finite and positive")
        if not np.isfinite(self.azimuth_rad):
            raise ValueError("azimuth must be finite")

    def cartesian(self) -> tuple[float, float]:
        return (self.range_m * np.cos(self.azimuth_rad),
                self.range_m * np.sin(self.azimuth_rad))


@dataclass(frozen=True)
class SteeringVector:
    """Length-M complex channel vector tagged with its propagation model."""

    entries: np.ndarray
    model: PropagationModel

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=complex))

    def __len__(self) -> int:
        return len(self.entries)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def element_index_grid(geometry: ArrayGeometry) -> np.ndarray:
    """Symmetric element offsets m_i = i - (M-1)/2, strictly increasing, mean 0."""
    M = geometry.num_elements
    return np.arange(M) - (M - 1) / 2.0


def element_distance(pos: PolarPosition, m, geometry: ArrayGeometry):
    """Distance from the user to element offset m (scalar or array).

    r_{k,m} = r * sqrt(1 - 2 m d_k sin(theta) + d_k^2 m^2), d_k = d/r.
    Identical to the Euclidean distance between (r cos t, r sin t) and (0, m d).
    """
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise ValueError("element offset must be finite")
    d_k = geometry.spacing / pos.range_m
    arg = 1.0 - 2.0 * m * d_k * np.sin(pos.azimuth_rad) + (d_k * m) ** 2
    return pos.range_m * np.sqrt(arg)


def steering_sw(pos: PolarPosition, geometry: ArrayGeometry) -> SteeringVector:
    """Spherical-wavefront response: entry m is sqrt(beta0)/r_{k,m} * exp(-j 2 pi r_{k,m}/lambda)."""
    r_m = element_distance(pos, element_index_grid(geometry), geometry)
    amp = np.sqrt(geometry.ref_power) / r_m
    return SteeringVector(amp * np.exp(-2j * np.pi * r_m / geometry.wavelength),
                          PropagationModel.SW)


def steering_pw(pos: PolarPosition, geometry: ArrayGeometry) -> SteeringVector:
    """Planar-wavefront response: far-field limit of the SW model.

    Entry m is sqrt(beta0)/r * exp(-j 2 pi r/lambda) * exp(+j (2 pi/lambda) m d sin(theta)),
    the first-order Taylor expansion of the SW phase in d/r (amplitude taken at
    the reference range).
    """
    m = element_index_grid(geometry)
    lam = geometry.wavelength
    amp = np.sqrt(geometry.ref_power) / pos.range_m
    common = np.exp(-2j * np.pi * pos.range_m / lam)
    progressive = np.exp(2j * np.pi / lam * m * geometry.spacing
                         * np.sin(pos.azimuth_rad))
    return SteeringVector(amp * common * progressive, PropagationModel.PW)


def _entries(v) -> np.ndarray:
    return v.entries if isinstance(v, SteeringVector) else np.asarray(v, dtype=complex)


def normalized_correlation(a, b) -> float:
    """|a^H b| / (||a|| ||b||), in [0, 1].  Accepts SteeringVector or array."""
    x, y = _entries(a), _entries(b)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ValueError("zero-norm input")
    return float(np.abs(np.vdot(x, y)) / (nx * ny))


def rayleigh_distance(geometry: ArrayGeometry) -> float:
    """Far-field boundary 2 D^2 / lambda."""
    D = geometry.aperture()
    return 2.0 * D * D / geometry.wavelength


def critical_distance(geometry: ArrayGeometry) -> float:
    """Boundary 9 D below which amplitude variation across the aperture matters."""
    return 9.0 * geometry.aperture()
