"""Second-harmonic phase matching under coherent, incoherent and Gaussian-Schell pumps.

The intensity-level object is

    |f(Q)|^2 = int int_V d3r' d3r'' W(r' - r'') e^{iQ.(r' - r'')},

with Q = 2k - q. Because W depends only on the difference s = r' - r'', the
double volume integral collapses onto s weighted by the box autocorrelation
prod_d (L_d - |s_d|)_+. The phase is read as e^{iQ.s}; the Q = 0 coherent
limit then gives V^2.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool
from typing import Final, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from ..errors import ConvergenceError, InvalidParameterError, UnsupportedQueryError

logger: Final = logging.getLogger(__name__)

DEFAULT_RTOL: Final = 1e-3
START_INTERVALS: Final = 64
MAX_LEVELS: Final = 16


@dataclass(frozen=True)
class CrystalVolume:
    Lx: float
    Ly: float
    Lz: float

    def __post_init__(self):
        if min(self.Lx, self.Ly, self.Lz) <= 0:
            raise InvalidParameterError(f"crystal sides must be positive: {self}")

    @property
    def sides(self) -> tuple[float, float, float]:
        return (self.Lx, self.Ly, self.Lz)

    @property
    def volume(self) -> float:
        return self.Lx * self.Ly * self.Lz

    def scaled(self, factor: float) -> "CrystalVolume":
        return CrystalVolume(self.Lx * factor, self.Ly * factor, self.Lz * factor)


class PumpKind(Enum):
    COHERENT = "coherent"
    INCOHERENT = "incoherent"
    GAUSSIAN_SCHELL = "gaussian_schell"


@dataclass(frozen=True)
class PumpCoherence:
    kind: PumpKind
    intensity: float = 1.0
    coherence_length: Optional[float] = None
    incoherent_strength: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PumpKind(self.kind))
        if self.intensity <= 0:
            raise InvalidParameterError(f"pump intensity must be positive, got {self.intensity}")
        if self.kind == PumpKind.GAUSSIAN_SCHELL:
            if self.coherence_length is None or self.coherence_length <= 0:
                raise InvalidParameterError(
                    "a gaussian_schell pump needs a positive coherence_length"
                )
        elif self.coherence_length is not None:
            raise InvalidParameterError(
                f"coherence_length applies to gaussian_schell pumps only, not {self.kind.value}"
            )
        if self.kind == PumpKind.INCOHERENT:
            if self.incoherent_strength is None or self.incoherent_strength < 0:
                raise InvalidParameterError(
                    "an incoherent pump needs a non-negative incoherent_strength"
                )
        elif self.incoherent_strength is not None:
            raise InvalidParameterError(
                f"incoherent_strength applies to incoherent pumps only, not {self.kind.value}"
            )


@dataclass(frozen=True)
class MismatchVector:
    Q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.Q, dtype=float)
        if q.shape != (3,) or not np.all(np.isfinite(q)):
            raise InvalidParameterError(f"Q must be a finite real 3-vector, got {self.Q}")
        object.__setattr__(self, "Q", q)

    @classmethod
    def from_wavevectors(cls, k: np.ndarray, q: np.ndarray) -> "MismatchVector":
        return cls(2.0 * np.asarray(k, dtype=float) - np.asarray(q, dtype=float))

    def __neg__(self) -> "MismatchVector":
        return MismatchVector(-self.Q)


@dataclass
class PatternRow:
    Q: MismatchVector
    intensity: float


@dataclass
class EmissionPattern:
    rows: list[PatternRow] = field(default_factory=list)

    def intensities(self) -> np.ndarray:
        return np.array([row.intensity for row in self.rows])


def _sinc(x: np.ndarray | float) -> np.ndarray:
    return np.sinc(np.asarray(x) / np.pi)


def phase_matching_coherent(vol: CrystalVolume, Q: MismatchVector) -> complex:
    """(1/V) int_V e^{iQ.r} d3r over a box centred on the origin."""
    value = 1.0
    for q, side in zip(Q.Q, vol.sides):
        value *= float(_sinc(0.5 * q * side))
    return complex(value)


def pump_correlation(pc: PumpCoherence, dr: np.ndarray) -> float:
    if pc.kind == PumpKind.COHERENT:
        return 1.0
    if pc.kind == PumpKind.INCOHERENT:
        raise UnsupportedQueryError(
            "the incoherent correlation is a delta distribution and is only integrated analytically"
        )
    distance2 = float(np.sum(np.asarray(dr, dtype=float) ** 2))
    return 2.0 * pc.intensity**2 * float(np.exp(-distance2 / pc.coherence_length**2))


def _axis_envelope(side: float, ell: float) -> float:
    s = np.linspace(0.0, side, 4 * START_INTERVALS + 1)
    return 2.0 * float(trapezoid((side - s) * np.exp(-(s**2) / ell**2), s))


def _axis_integral(side: float, q: float, ell: float, rtol: float) -> float:
    """2 int_0^L (L - s) e^{-s^2/ell^2} cos(q s) ds by trapezoid grid doubling."""

    def estimate(intervals: int) -> float:
        s = np.linspace(0.0, side, intervals + 1)
        integrand = (side - s) * np.exp(-(s**2) / ell**2) * np.cos(q * s)
        return 2.0 * float(trapezoid(integrand, s))

    # |integral| <= its q = 0 value; values far below it are compared absolutely
    floor = 1e-8 * abs(_axis_envelope(side, ell))
    intervals = START_INTERVALS
    previous = estimate(intervals)
    for _ in range(MAX_LEVELS):
        intervals *= 2
        current = estimate(intervals)
        scale = max(abs(current), floor)
        if abs(current - previous) <= rtol * scale:
            logger.debug(
                "axis integral L=%g q=%g ell=%g converged with %d intervals",
                side,
                q,
                ell,
                intervals,
            )
            return current
        previous = current
    raise ConvergenceError(
        f"phase-matching quadrature did not converge to {rtol:g} (L={side}, Q={q}, ell={ell})"
    )


def shg_intensity(
    vol: CrystalVolume,
    pc: PumpCoherence,
    Q: MismatchVector,
    rtol: float = DEFAULT_RTOL,
) -> float:
    if pc.kind == PumpKind.COHERENT:
        return vol.volume**2 * abs(phase_matching_coherent(vol, Q)) ** 2
    if pc.kind == PumpKind.INCOHERENT:
        return float(pc.incoherent_strength) * vol.volume
    value = 2.0 * pc.intensity**2
    for q, side in zip(Q.Q, vol.sides):
        value *= _axis_integral(side, float(q), float(pc.coherence_length), rtol)
    return float(value)


def scaling_exponent(pc: PumpCoherence, base_vol: CrystalVolume, rtol: float = DEFAULT_RTOL) -> float:
    """Slope of log I versus log V at Q = 0 between V and 8V."""
    origin = MismatchVector(np.zeros(3))
    small = shg_intensity(base_vol, pc, origin, rtol)
    large = shg_intensity(base_vol.scaled(2.0), pc, origin, rtol)
    if not (small > 0 and large > 0):
        raise InvalidParameterError("scaling exponent needs a non-zero intensity")
    return float(np.log(large / small) / np.log(8.0))


def _pattern_point(args: tuple[CrystalVolume, PumpCoherence, MismatchVector, float]) -> float:
    vol, pc, Q, rtol = args
    return shg_intensity(vol, pc, Q, rtol)


def emission_pattern(
    vol: CrystalVolume,
    pc: PumpCoherence,
    Q_grid: Sequence[MismatchVector],
    threads: int = 1,
    rtol: float = DEFAULT_RTOL,
) -> EmissionPattern:
    """shg_intensity over Q_grid normalized to its Q = 0 value."""
    if len(Q_grid) == 0:
        raise InvalidParameterError("emission pattern needs at least one Q")
    reference = shg_intensity(vol, pc, MismatchVector(np.zeros(3)), rtol)
    if not reference > 0:
        raise InvalidParameterError("pattern normalization needs a non-zero Q = 0 intensity")
    args_list = [(vol, pc, Q, rtol) for Q in Q_grid]
    if threads > 1:
        with Pool(threads) as pool:
            values = pool.map(_pattern_point, args_list)
    else:
        values = [_pattern_point(args) for args in args_list]
    return EmissionPattern(
        [PatternRow(Q, value / reference) for Q, value in zip(Q_grid, values)]
    )


def emission_half_width(q_values: np.ndarray, normalized: np.ndarray) -> float:
    """First abscissa where a normalized pattern falls to 1/2, linearly interpolated."""
    below = np.nonzero(normalized <= 0.5)[0]
    if below.size == 0 or below[0] == 0:
        raise InvalidParameterError("pattern does not cross 1/2 inside the Q range")
    i = int(below[0])
    q0, q1 = q_values[i - 1], q_values[i]
    v0, v1 = normalized[i - 1], normalized[i]
    return float(q0 + (0.5 - v0) * (q1 - q0) / (v1 - v0))
