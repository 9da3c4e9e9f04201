"""Frequency/time grids, line shapes, quadrature and spectral-feature extraction.

Units: c = 1 and hbar = 1 throughout the package, so every frequency and
wavenumber is dimensionless.
"""

import logging
from dataclasses import dataclass
from typing import Final, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from ..errors import (
    BoundaryPeakError,
    DegenerateSpectrumError,
    InvalidParameterError,
)

logger: Final = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrequencyGrid:
    omega_min: float
    omega_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise InvalidParameterError(
                f"frequency grid needs at least 3 points, got {self.n_points}"
            )
        if not self.omega_max > self.omega_min:
            raise InvalidParameterError(
                f"omega_max ({self.omega_max}) must exceed omega_min ({self.omega_min})"
            )

    @property
    def step(self) -> float:
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    def samples(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)


@dataclass(frozen=True)
class TimeGrid:
    t_min: float
    t_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 16:
            raise InvalidParameterError(
                f"time grid needs at least 16 points, got {self.n_points}"
            )
        if not self.t_max > self.t_min:
            raise InvalidParameterError(
                f"t_max ({self.t_max}) must exceed t_min ({self.t_min})"
            )

    @property
    def step(self) -> float:
        return (self.t_max - self.t_min) / (self.n_points - 1)

    def samples(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_points)

    def widened(self, factor: int) -> "TimeGrid":
        """Concentric grid with the same spacing spanning `factor` times the span."""
        if factor < 1:
            raise InvalidParameterError(f"widening factor must be >= 1, got {factor}")
        if factor == 1:
            return self
        center = 0.5 * (self.t_min + self.t_max)
        intervals = factor * (self.n_points - 1)
        half = 0.5 * intervals * self.step
        return TimeGrid(center - half, center + half, intervals + 1)


Grid = Union[FrequencyGrid, TimeGrid]


@dataclass(frozen=True)
class Spectrum:
    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise InvalidParameterError(
                f"spectrum has {values.shape} values for a {self.grid.n_points}-point grid"
            )
        scale = float(np.max(np.abs(values))) if values.size else 0.0
        if np.any(values < -1e-12 * max(scale, 1e-300)):
            raise InvalidParameterError("spectrum values must be non-negative")
        object.__setattr__(self, "values", np.clip(values, 0.0, None))

    def scaled(self, factor: float) -> "Spectrum":
        return Spectrum(self.grid, self.values * factor)


@dataclass(frozen=True)
class ComplexSamples:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise InvalidParameterError(
                f"{values.shape} samples for a {self.grid.n_points}-point grid"
            )
        object.__setattr__(self, "values", values)


def trapezoid_weights(n_points: int, step: float) -> np.ndarray:
    weights = np.full(n_points, step)
    weights[0] = weights[-1] = 0.5 * step
    return weights


def lorentzian_spectrum(omega0: float, gamma: float, grid: FrequencyGrid) -> Spectrum:
    """Normalized Lorentzian (gamma/pi) / ((omega - omega0)^2 + gamma^2)."""
    if gamma <= 0:
        raise InvalidParameterError(f"gamma must be positive, got {gamma}")
    omega = grid.samples()
    return Spectrum(grid, (gamma / np.pi) / ((omega - omega0) ** 2 + gamma**2))


def gaussian_profile(center: float, sigma: float, grid: FrequencyGrid) -> ComplexSamples:
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    omega = grid.samples()
    return ComplexSamples(grid, np.exp(-((omega - center) ** 2) / (2.0 * sigma**2)))


def peak_frequency(s: Spectrum) -> float:
    """Argmax refined by a parabola through the three bracketing samples."""
    values = s.values
    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1:
        raise BoundaryPeakError(
            "spectral maximum lies on the grid boundary; shift not measurable on this grid"
        )
    left, mid, right = values[i - 1], values[i], values[i + 1]
    # argmax keeps the first of tied samples, so left < mid >= right and the
    # parabola opens downward; a tie with right lands on the midpoint
    denom = left - 2.0 * mid + right
    offset = 0.5 * (left - right) / denom
    return float(s.grid.samples()[i] + offset * s.grid.step)


def centroid_frequency(s: Spectrum) -> float:
    omega = s.grid.samples()
    power = trapezoid(s.values, omega)
    if not power > 0:
        raise DegenerateSpectrumError("spectrum has zero total power")
    return float(trapezoid(omega * s.values, omega) / power)


def find_lines(s: Spectrum, rel_prominence: float = 1e-3) -> list[float]:
    """Interior local maxima more prominent than rel_prominence * max, ascending."""
    peak_value = float(np.max(s.values))
    if not peak_value > 0:
        return []
    indices, _ = find_peaks(s.values, prominence=rel_prominence * peak_value)
    omega = s.grid.samples()
    lines: list[float] = []
    for i in indices:
        left, mid, right = s.values[i - 1], s.values[i], s.values[i + 1]
        denom = left - 2.0 * mid + right
        offset = 0.5 * (left - right) / denom if denom != 0 else 0.0
        lines.append(float(omega[i] + offset * s.grid.step))
    logger.debug("found %d line(s) at %s", len(lines), lines)
    return lines
