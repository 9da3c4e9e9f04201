"""Coherent and fluctuating pulses in a group-velocity-dispersive medium.

The envelope obeys i dE/dz = (k2/2) d^2E/dt^2, whose Green function is

    G(z, t; 0, t') = sqrt(1 / (2 pi i k2 z)) exp(-i (t - t')^2 / (2 z k2)).

The square-root prefactor makes the kernel unitary, so pulse energy is
conserved. Both propagation integrals are evaluated by direct trapezoid
quadrature on the input grid; the output grid keeps the input spacing and is
widened threefold when k2 z exceeds the squared rms width of the input intensity.
"""

import logging
from dataclasses import dataclass
from typing import Final

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from ..errors import (
    DegenerateKernelError,
    GridTooNarrowError,
    InvalidCorrelationError,
    InvalidParameterError,
)
from .spectral_core import TimeGrid, trapezoid_weights

logger: Final = logging.getLogger(__name__)

EDGE_FRACTION: Final = 0.02
EDGE_LEVEL: Final = 1e-6
WIDENING_FACTOR: Final = 3
MAX_CORRELATION_POINTS: Final = 2048
PSD_TOLERANCE: Final = 1e-9
IMAG_TOLERANCE: Final = 1e-9


@dataclass(frozen=True)
class PulseEnvelope:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise InvalidParameterError(
                f"envelope has {values.shape} values for a {self.grid.n_points}-point grid"
            )
        object.__setattr__(self, "values", values)
        if not edge_support_ok(np.abs(values)):
            raise GridTooNarrowError(
                "pulse envelope is not negligible on the outer 2% of its time grid"
            )

    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def energy(self) -> float:
        return float(trapezoid(self.intensity(), self.grid.samples()))


@dataclass(frozen=True)
class InputCorrelation:
    grid: TimeGrid
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        n = self.grid.n_points
        if matrix.shape != (n, n):
            raise InvalidCorrelationError(
                f"correlation matrix is {matrix.shape} for a {n}-point grid"
            )
        if n > MAX_CORRELATION_POINTS:
            raise InvalidCorrelationError(
                f"dense correlation matrices are limited to {MAX_CORRELATION_POINTS} points, got {n}"
            )
        diagonal = np.diag(matrix)
        scale = max(float(np.max(np.abs(diagonal.real))), 1e-300)
        if np.max(np.abs(matrix - matrix.conj().T)) > 1e-12 * scale:
            raise InvalidCorrelationError("correlation matrix is not Hermitian")
        if np.any(diagonal.real < 0):
            raise InvalidCorrelationError("correlation diagonal must be non-negative")
        smallest = float(scipy.linalg.eigvalsh(matrix, subset_by_index=[0, 0])[0])
        if smallest < -PSD_TOLERANCE * scale:
            raise InvalidCorrelationError(
                f"correlation matrix is not positive semidefinite (eigenvalue {smallest:.3g})"
            )
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_envelope(cls, envelope: PulseEnvelope) -> "InputCorrelation":
        return cls(envelope.grid, np.outer(envelope.values, envelope.values.conj()))

    def intensity(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()


@dataclass(frozen=True)
class DispersionConfig:
    k2: float
    z: float

    def __post_init__(self):
        if not (np.isfinite(self.k2) and np.isfinite(self.z)):
            raise InvalidParameterError(f"dispersion parameters must be finite: {self}")
        if self.z < 0:
            raise InvalidParameterError(f"propagation distance must be >= 0, got {self.z}")

    @property
    def strength(self) -> float:
        """k2 z; zero means the identity propagator."""
        return self.k2 * self.z


@dataclass
class IntensityProfile:
    grid: TimeGrid
    values: np.ndarray

    def samples(self) -> np.ndarray:
        return self.grid.samples()

    def energy(self) -> float:
        return float(trapezoid(self.values, self.grid.samples()))


def edge_support_ok(magnitude: np.ndarray) -> bool:
    peak = float(np.max(magnitude)) if magnitude.size else 0.0
    if peak == 0.0:
        return True
    edge = max(1, int(np.ceil(EDGE_FRACTION * magnitude.size)))
    outer = np.concatenate([magnitude[:edge], magnitude[-edge:]])
    return bool(np.all(outer < EDGE_LEVEL * peak))


def rms_width(t: np.ndarray, intensity: np.ndarray) -> float:
    power = float(trapezoid(intensity, t))
    if not power > 0:
        raise InvalidParameterError("intensity profile has no power")
    center = float(trapezoid(t * intensity, t)) / power
    return float(np.sqrt(trapezoid((t - center) ** 2 * intensity, t) / power))


def greens_function(cfg: DispersionConfig, t: float | np.ndarray, tp: float | np.ndarray) -> complex | np.ndarray:
    strength = cfg.strength
    if cfg.z == 0 or strength == 0:
        raise DegenerateKernelError(
            "the propagator at k2 z = 0 is a delta function; propagate operations handle it"
        )
    prefactor = np.sqrt(1.0 / (2.0 * np.pi * 1j * strength))
    return prefactor * np.exp(-1j * (np.asarray(t) - np.asarray(tp)) ** 2 / (2.0 * strength))


def _output_grid(grid: TimeGrid, cfg: DispersionConfig, intensity: np.ndarray) -> TimeGrid:
    width = rms_width(grid.samples(), intensity)
    if abs(cfg.strength) / width**2 > 1.0:
        logger.debug(
            "widening output grid x%d (k2 z = %g, input rms width %g)", WIDENING_FACTOR, cfg.strength, width
        )
        return grid.widened(WIDENING_FACTOR)
    return grid


def _kernel_matrix(grid: TimeGrid, out_grid: TimeGrid, cfg: DispersionConfig) -> np.ndarray:
    """Quadrature matrix K[i, j] = w_j G(t_i, t_j)."""
    half_span = 0.5 * (out_grid.t_max - out_grid.t_min)
    # beyond this the sampled kernel phase aliases ghost copies into the output
    alias_offset = 2.0 * np.pi * abs(cfg.strength) / grid.step
    if alias_offset <= 2.0 * half_span:
        raise GridTooNarrowError(
            f"time step {grid.step:.3g} is too coarse for k2 z = {cfg.strength:.3g}; "
            f"refine the grid below {np.pi * abs(cfg.strength) / half_span:.3g}"
        )
    t_out = out_grid.samples()[:, None]
    t_in = grid.samples()[None, :]
    weights = trapezoid_weights(grid.n_points, grid.step)
    return greens_function(cfg, t_out, t_in) * weights[None, :]


def propagate_coherent(e0: PulseEnvelope, cfg: DispersionConfig) -> PulseEnvelope:
    if cfg.strength == 0:
        return e0
    out_grid = _output_grid(e0.grid, cfg, e0.intensity())
    kernel = _kernel_matrix(e0.grid, out_grid, cfg)
    values = kernel @ e0.values
    if not edge_support_ok(np.abs(values)):
        raise GridTooNarrowError(
            f"propagated pulse reaches the edge of the [{out_grid.t_min:.3g}, {out_grid.t_max:.3g}] grid"
        )
    return PulseEnvelope(out_grid, values)


def propagate_intensity(corr: InputCorrelation, cfg: DispersionConfig) -> IntensityProfile:
    """I(L, t) = sum_jk w_j w_k G*(t, t_j) G(t, t_k) corr[k, j]."""
    if cfg.strength == 0:
        return IntensityProfile(corr.grid, corr.intensity())
    out_grid = _output_grid(corr.grid, cfg, corr.intensity())
    kernel = _kernel_matrix(corr.grid, out_grid, cfg)
    intensity = np.sum((kernel @ corr.matrix) * kernel.conj(), axis=1)
    peak = float(np.max(np.abs(intensity.real)))
    residue = float(np.max(np.abs(intensity.imag)))
    if residue > IMAG_TOLERANCE * max(peak, 1e-300):
        raise InvalidCorrelationError(
            f"propagated intensity has an imaginary residue of {residue:.3g}"
        )
    values = intensity.real
    if not edge_support_ok(np.abs(values)):
        logger.warning(
            "propagated intensity is not negligible at the edge of [%g, %g]",
            out_grid.t_min,
            out_grid.t_max,
        )
    return IntensityProfile(out_grid, values)


def gaussian_envelope(T0: float, grid: TimeGrid) -> PulseEnvelope:
    if T0 <= 0:
        raise InvalidParameterError(f"T0 must be positive, got {T0}")
    t = grid.samples()
    return PulseEnvelope(grid, np.exp(-(t**2) / (2.0 * T0**2)).astype(complex))


def gaussian_schell_correlation(T0: float, tc: float, grid: TimeGrid) -> InputCorrelation:
    if T0 <= 0 or tc <= 0:
        raise InvalidParameterError(f"T0 and tc must be positive, got T0={T0}, tc={tc}")
    t = grid.samples()
    ti, tj = t[:, None], t[None, :]
    matrix = np.exp(-(ti**2 + tj**2) / (4.0 * T0**2)) * np.exp(-((ti - tj) ** 2) / (2.0 * tc**2))
    return InputCorrelation(grid, matrix.astype(complex))


def output_width(corr: InputCorrelation, cfg: DispersionConfig) -> float:
    profile = propagate_intensity(corr, cfg)
    return rms_width(profile.samples(), profile.values)


def width_vs_distance(corr: InputCorrelation, k2: float, z_values: np.ndarray) -> list[tuple[float, float]]:
    return [(float(z), output_width(corr, DispersionConfig(k2, float(z)))) for z in z_values]


def load_correlation_csv(path: str, grid: TimeGrid) -> InputCorrelation:
    """Read an n x 2n CSV of interleaved (real, imag) columns."""
    try:
        table = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except OSError as e:
        raise InvalidCorrelationError(f"cannot read correlation file {path}: {e}")
    except ValueError as e:
        raise InvalidCorrelationError(f"malformed correlation file {path}: {e}")
    n = grid.n_points
    if table.shape != (n, 2 * n):
        raise InvalidCorrelationError(
            f"correlation file {path} is {table.shape[0]}x{table.shape[1]}, expected {n}x{2 * n}"
        )
    return InputCorrelation(grid, table[:, 0::2] + 1j * table[:, 1::2])
