"""Free-space dyadic Green tensor and the vacuum cross-spectral density.

chi_ij(rA, rB, w) = (w^2 delta_ij + d_i d_j) e^{iwr}/r, with the derivatives
taken with respect to the separation u = rA - rB. In closed form

    chi = e^{iwr}/r [w^2 (I - rr) + (I - 3 rr)(iw/r - 1/r^2)],

which is transverse in the far zone and whose imaginary part tends to
(2/3) w^3 I at coincidence while the real part diverges like 1/r^3.
"""

from dataclasses import dataclass
from typing import Final

import numpy as np

from ..errors import CoincidenceError, InvalidParameterError

COINCIDENCE_FACTOR: Final = 2.0 / 3.0


@dataclass(frozen=True)
class Position3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.x, self.y, self.z])):
            raise InvalidParameterError(f"position components must be finite: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "Position3":
        return cls(float(values[0]), float(values[1]), float(values[2]))


@dataclass(frozen=True)
class GreenTensor:
    entries: np.ndarray
    separation: float
    omega: float

    @property
    def real(self) -> np.ndarray:
        return self.entries.real

    @property
    def imag(self) -> np.ndarray:
        return self.entries.imag


def _check_omega(omega: float):
    if omega <= 0:
        raise InvalidParameterError(f"omega must be positive, got {omega}")


def chi_from_separation(u: np.ndarray, omega: float) -> np.ndarray:
    """Closed-form chi for a separation vector u = rA - rB (u != 0)."""
    r = float(np.linalg.norm(u))
    rhat = u / r
    rr = np.outer(rhat, rhat)
    identity = np.eye(3)
    kernel = np.exp(1j * omega * r) / r
    near = 1j * omega / r - 1.0 / r**2
    return kernel * (omega**2 * (identity - rr) + (identity - 3.0 * rr) * near)


def chi_tensor(rA: Position3, rB: Position3, omega: float) -> GreenTensor:
    _check_omega(omega)
    u = rA.as_array() - rB.as_array()
    r = float(np.linalg.norm(u))
    if r == 0.0:
        raise CoincidenceError(
            "chi is singular at coincident points; use coincidence_imag for the r -> 0 limit"
        )
    return GreenTensor(chi_from_separation(u, omega), r, omega)


def coincidence_imag(omega: float) -> np.ndarray:
    """lim_{r -> 0} Im chi = (2/3) omega^3 I."""
    _check_omega(omega)
    return COINCIDENCE_FACTOR * omega**3 * np.eye(3)


def vacuum_csd(r1: Position3, r2: Position3, omega: float) -> np.ndarray:
    """Spectral density of the vacuum field correlation: 2 Im chi for omega > 0, else 0."""
    if omega <= 0:
        return np.zeros((3, 3))
    if r1 == r2:
        return 2.0 * coincidence_imag(omega)
    return 2.0 * chi_tensor(r1, r2, omega).imag


def normalized_vacuum_coherence(r1: Position3, r2: Position3, omega: float) -> np.ndarray:
    _check_omega(omega)
    if r1 == r2:
        return np.eye(3)
    scale = COINCIDENCE_FACTOR * omega**3
    return chi_tensor(r1, r2, omega).imag / scale


def coherence_profile(omega: float, kr_values: np.ndarray) -> dict[str, np.ndarray]:
    """Normalized transverse and longitudinal vacuum coherence versus omega * r.

    The separation is taken along z, so entry (0, 0) is transverse and (2, 2)
    longitudinal.
    """
    _check_omega(omega)
    transverse = np.empty(len(kr_values))
    longitudinal = np.empty(len(kr_values))
    trace = np.empty(len(kr_values))
    origin = Position3(0.0, 0.0, 0.0)
    for i, kr in enumerate(kr_values):
        m = normalized_vacuum_coherence(Position3(0.0, 0.0, kr / omega), origin, omega)
        transverse[i] = m[0, 0]
        longitudinal[i] = m[2, 2]
        trace[i] = np.trace(m)
    return {
        "omega_r": np.asarray(kr_values, dtype=float),
        "transverse": transverse,
        "longitudinal": longitudinal,
        "trace": trace,
    }
