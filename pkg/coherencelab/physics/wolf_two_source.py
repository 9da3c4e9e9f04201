"""Far-zone spectrum of two correlated point sources and the Wolf shift.

The field at P is U = Q1 e^{ikR1}/R1 + Q2 e^{ikR2}/R2 (prefactors dropped,
k = omega since c = 1), so its spectrum is

    S_U = S_Q [1/R1^2 + 1/R2^2 + 2 Re(mu e^{ik(R2 - R1)}) / (R1 R2)].

mu is mu(P1, P2) and the formula is used as written, without assuming any
Hermitian symmetry of mu in its arguments.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Final, Type

import numpy as np

from ..errors import (
    CoherenceBoundError,
    InvalidParameterError,
    UndefinedCoherenceError,
)
from .spectral_core import (
    ComplexSamples,
    FrequencyGrid,
    Spectrum,
    centroid_frequency,
    gaussian_profile,
    peak_frequency,
)

logger: Final = logging.getLogger(__name__)

COHERENCE_TOLERANCE: Final = 1e-12


@dataclass(frozen=True)
class SourcePairConfig:
    R1: float
    R2: float
    source_spectrum: Spectrum
    mu: ComplexSamples

    def __post_init__(self):
        if self.R1 <= 0 or self.R2 <= 0:
            raise InvalidParameterError(
                f"source distances must be positive, got R1={self.R1}, R2={self.R2}"
            )
        if self.mu.grid != self.source_spectrum.grid:
            raise InvalidParameterError(
                "mu and the source spectrum must share one frequency grid"
            )
        check_coherence_bound(self.mu.values)


@dataclass(frozen=True)
class ShiftRecord:
    peak_shift: float
    centroid_shift: float
    source_peak: float
    field_peak: float
    source_centroid: float
    field_centroid: float

    def to_dict(self) -> dict[str, float]:
        return {
            "source_peak": self.source_peak,
            "field_peak": self.field_peak,
            "peak_shift": self.peak_shift,
            "source_centroid": self.source_centroid,
            "field_centroid": self.field_centroid,
            "centroid_shift": self.centroid_shift,
        }


def check_coherence_bound(values: np.ndarray, tolerance: float = COHERENCE_TOLERANCE):
    worst = float(np.max(np.abs(values))) if values.size else 0.0
    if worst > 1.0 + tolerance:
        raise CoherenceBoundError(
            f"|mu| reaches {worst:.6g}; the spectral degree of coherence is bounded by 1"
        )


def field_spectrum(cfg: SourcePairConfig) -> Spectrum:
    omega = cfg.source_spectrum.grid.samples()
    phase = np.exp(1j * omega * (cfg.R2 - cfg.R1))
    interference = 2.0 * np.real(cfg.mu.values * phase) / (cfg.R1 * cfg.R2)
    modulation = 1.0 / cfg.R1**2 + 1.0 / cfg.R2**2 + interference
    # |mu| <= 1 bounds the modulation below by (1/R1 - 1/R2)^2, so only
    # rounding can push it negative
    values = cfg.source_spectrum.values * np.clip(modulation, 0.0, None)
    return Spectrum(cfg.source_spectrum.grid, values)


def wolf_shift(cfg: SourcePairConfig) -> ShiftRecord:
    source = cfg.source_spectrum
    field = field_spectrum(cfg)
    source_peak = peak_frequency(source)
    field_peak = peak_frequency(field)
    source_centroid = centroid_frequency(source)
    field_centroid = centroid_frequency(field)
    record = ShiftRecord(
        peak_shift=field_peak - source_peak,
        centroid_shift=field_centroid - source_centroid,
        source_peak=source_peak,
        field_peak=field_peak,
        source_centroid=source_centroid,
        field_centroid=field_centroid,
    )
    logger.debug("wolf shift: %s", record)
    return record


def coherence_from_sources(sq: Spectrum, cross: ComplexSamples) -> ComplexSamples:
    """mu_Q = <Q*(P1) Q(P2)> / S_Q, pointwise."""
    if cross.grid != sq.grid:
        raise InvalidParameterError("cross-spectral density and S_Q must share a grid")
    undefined = (sq.values <= 0) & (cross.values != 0)
    if np.any(undefined):
        where = sq.grid.samples()[np.argmax(undefined)]
        raise UndefinedCoherenceError(
            f"S_Q vanishes at omega={where:.6g} where the cross-spectral density does not"
        )
    mu = np.zeros_like(cross.values)
    defined = sq.values > 0
    mu[defined] = cross.values[defined] / sq.values[defined]
    check_coherence_bound(mu)
    return ComplexSamples(sq.grid, mu)


# --- coherence models ------------------------------------------------------


class CoherenceModel(ABC):
    """Phenomenological mu_Q(omega) built from scenario parameters."""

    MODEL_NAME: ClassVar[str]
    REQUIRED_KEYS: ClassVar[tuple[str, ...]] = ()
    OPTIONAL_KEYS: ClassVar[Dict[str, Any]] = {}

    @classmethod
    @abstractmethod
    def from_params(cls, params: Dict[str, Any]) -> "CoherenceModel":
        pass

    @abstractmethod
    def evaluate(self, grid: FrequencyGrid) -> ComplexSamples:
        pass


COHERENCE_MODEL_REGISTRY: Dict[str, Type[CoherenceModel]] = {}


def register_coherence_model(name: str):
    def decorator(cls: Type[CoherenceModel]):
        COHERENCE_MODEL_REGISTRY[name] = cls
        cls.MODEL_NAME = name
        return cls

    return decorator


@register_coherence_model("constant")
@dataclass
class ConstantCoherence(CoherenceModel):
    value: float

    REQUIRED_KEYS: ClassVar[tuple[str, ...]] = ("mu_value",)

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "ConstantCoherence":
        return cls(value=float(params["mu_value"]))

    def evaluate(self, grid: FrequencyGrid) -> ComplexSamples:
        return ComplexSamples(grid, np.full(grid.n_points, self.value, dtype=complex))


@register_coherence_model("complex_constant")
@dataclass
class ComplexConstantCoherence(CoherenceModel):
    magnitude: float
    phase: float

    REQUIRED_KEYS: ClassVar[tuple[str, ...]] = ("mu_value", "mu_phase")

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "ComplexConstantCoherence":
        return cls(magnitude=float(params["mu_value"]), phase=float(params["mu_phase"]))

    def evaluate(self, grid: FrequencyGrid) -> ComplexSamples:
        value = self.magnitude * np.exp(1j * self.phase)
        return ComplexSamples(grid, np.full(grid.n_points, value, dtype=complex))


@register_coherence_model("gaussian")
@dataclass
class GaussianCoherence(CoherenceModel):
    center: float
    sigma: float
    amplitude: float = 1.0
    phase: float = 0.0

    REQUIRED_KEYS: ClassVar[tuple[str, ...]] = ("mu_center", "mu_sigma")
    OPTIONAL_KEYS: ClassVar[Dict[str, Any]] = {"mu_amplitude": 1.0, "mu_phase": 0.0}

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "GaussianCoherence":
        return cls(
            center=float(params["mu_center"]),
            sigma=float(params["mu_sigma"]),
            amplitude=float(params.get("mu_amplitude", 1.0)),
            phase=float(params.get("mu_phase", 0.0)),
        )

    def evaluate(self, grid: FrequencyGrid) -> ComplexSamples:
        profile = gaussian_profile(self.center, self.sigma, grid)
        factor = self.amplitude * np.exp(1j * self.phase)
        return ComplexSamples(grid, profile.values * factor)


@register_coherence_model("tabulated")
@dataclass
class TabulatedCoherence(CoherenceModel):
    path: str

    REQUIRED_KEYS: ClassVar[tuple[str, ...]] = ("mu_file",)

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "TabulatedCoherence":
        return cls(path=str(params["mu_file"]))

    def evaluate(self, grid: FrequencyGrid) -> ComplexSamples:
        return load_tabulated_coherence(self.path, grid)


def load_tabulated_coherence(path: str, grid: FrequencyGrid) -> ComplexSamples:
    """Read mu_Q from a two-column (real, imag) CSV aligned to the grid."""
    try:
        table = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except OSError as e:
        raise InvalidParameterError(f"cannot read coherence table {path}: {e}")
    except ValueError as e:
        raise InvalidParameterError(f"malformed coherence table {path}: {e}")
    if table.shape[1] != 2:
        raise InvalidParameterError(
            f"coherence table {path} must have 2 columns (real, imag), found {table.shape[1]}"
        )
    if table.shape[0] != grid.n_points:
        raise InvalidParameterError(
            f"coherence table {path} has {table.shape[0]} rows for a {grid.n_points}-point grid"
        )
    mu = table[:, 0] + 1j * table[:, 1]
    check_coherence_bound(mu)
    return ComplexSamples(grid, mu)


def coherence_model_from_params(name: str, params: Dict[str, Any]) -> CoherenceModel:
    if name not in COHERENCE_MODEL_REGISTRY:
        raise InvalidParameterError(f"Unknown coherence model: {name}")
    return COHERENCE_MODEL_REGISTRY[name].from_params(params)
