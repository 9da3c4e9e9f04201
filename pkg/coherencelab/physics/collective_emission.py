"""Two two-level atoms coupled through the shared vacuum.

Basis ordering of every 4x4 operator: |gA gB>, |eA gB>, |gA eB>, |eA eB>,
i.e. atom A is the fast index. The tensor product rho_A (x) rho_B in this
ordering is np.kron(rho_B, rho_A).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool
from typing import Final, Optional

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from ..errors import (
    CoincidenceError,
    DegenerateLinewidthError,
    InvalidParameterError,
    NotApplicableError,
    NumericalDegeneracyError,
)
from .spectral_core import FrequencyGrid, Spectrum, lorentzian_spectrum
from .vacuum_green import COINCIDENCE_FACTOR, Position3, chi_from_separation

logger: Final = logging.getLogger(__name__)

UNIT_TOLERANCE: Final = 1e-12
SHIFT_FACTOR: Final = 4.0 / 3.0
MAX_CONDITION: Final = 1e13

_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e|, g = 0, e = 1
SIGMA_A: Final = np.kron(np.eye(2), _LOWER)
SIGMA_B: Final = np.kron(_LOWER, np.eye(2))
INDEX_EE: Final = 3


def _unit(vector: np.ndarray, name: str) -> np.ndarray:
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (3,) or abs(np.linalg.norm(vector) - 1.0) > UNIT_TOLERANCE:
        raise InvalidParameterError(f"{name} must be a real unit 3-vector, got {vector}")
    return vector


@dataclass(frozen=True)
class AtomPairConfig:
    pos_A: Position3
    pos_B: Position3
    dipole_A: np.ndarray
    dipole_B: np.ndarray
    omega_A: float
    omega_B: float
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "dipole_A", _unit(self.dipole_A, "dipole_A"))
        object.__setattr__(self, "dipole_B", _unit(self.dipole_B, "dipole_B"))
        for name in ("omega_A", "omega_B", "gamma"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(
                    f"{name} must be positive, got {getattr(self, name)}"
                )

    @property
    def mean_omega(self) -> float:
        return 0.5 * (self.omega_A + self.omega_B)

    @property
    def identical(self) -> bool:
        return self.omega_A == self.omega_B


@dataclass(frozen=True)
class CollectiveParams:
    gamma_cross: float
    omega_dd: float

    def to_dict(self) -> dict[str, float]:
        return {"gamma_cross": self.gamma_cross, "omega_dd": self.omega_dd}


@dataclass(frozen=True)
class CollectiveRates:
    gamma_plus: float
    gamma_minus: float


@dataclass(frozen=True)
class DrivenConfig:
    pair: AtomPairConfig
    rabi: float
    laser_grid: FrequencyGrid
    collective: Optional[CollectiveParams] = None  # overrides the geometry

    def __post_init__(self):
        if self.rabi <= 0:
            raise InvalidParameterError(f"rabi must be positive, got {self.rabi}")

    def coupling(self) -> CollectiveParams:
        if self.collective is not None:
            return self.collective
        return collective_params(self.pair)


@dataclass(frozen=True)
class DensityMatrix4:
    entries: np.ndarray

    def expect(self, operator: np.ndarray) -> complex:
        return complex(np.trace(self.entries @ operator))

    @property
    def population_ee(self) -> float:
        return float(self.entries[INDEX_EE, INDEX_EE].real)

    def check_physical(self, tolerance: float = 1e-10, eig_floor: float = -1e-9):
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T)) > tolerance:
            raise NumericalDegeneracyError("steady state is not Hermitian")
        if abs(np.trace(rho) - 1.0) > tolerance:
            raise NumericalDegeneracyError("steady state trace differs from 1")
        if np.min(scipy.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < eig_floor:
            raise NumericalDegeneracyError("steady state has a negative eigenvalue")


@dataclass
class ScanRow:
    omega_l: float
    P_ee: float
    total_intensity: float

    def to_dict(self) -> dict[str, float]:
        return {
            "omega_l": self.omega_l,
            "P_ee": self.P_ee,
            "total_intensity": self.total_intensity,
        }


@dataclass
class ExcitationScan:
    include_coupling: bool
    rows: list[ScanRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows])


# --- collective parameters -------------------------------------------------


def collective_params(pair: AtomPairConfig) -> CollectiveParams:
    """Cross damping and dipole-dipole shift from chi at the mean frequency."""
    u = pair.pos_A.as_array() - pair.pos_B.as_array()
    if float(np.linalg.norm(u)) == 0.0:
        raise CoincidenceError("atoms at coincident positions have no finite coupling")
    omega = pair.mean_omega
    chi = chi_from_separation(u, omega)
    projection = pair.dipole_A @ chi @ pair.dipole_B
    return CollectiveParams(
        gamma_cross=float(pair.gamma * projection.imag / (COINCIDENCE_FACTOR * omega**3)),
        omega_dd=float(pair.gamma * projection.real / (SHIFT_FACTOR * omega**3)),
    )


def collective_rates(pair: AtomPairConfig) -> CollectiveRates:
    if not pair.identical:
        raise NotApplicableError(
            "symmetric/antisymmetric decay channels are defined for identical atoms only"
        )
    gamma_cross = collective_params(pair).gamma_cross
    return CollectiveRates(pair.gamma + gamma_cross, pair.gamma - gamma_cross)


def emission_spectrum_pair(pair: AtomPairConfig, grid: FrequencyGrid) -> Spectrum:
    """Marginal spectrum of two initially excited identical atoms.

    Half the power is emitted through the symmetric channel (omega0 + Omega_AB,
    width gamma + Gamma_AB) and half through the antisymmetric one.
    """
    if not pair.identical:
        raise NotApplicableError("the pair emission spectrum needs identical atoms")
    omega0, gamma = pair.omega_A, pair.gamma
    if grid.omega_min > omega0 - 10.0 * gamma or grid.omega_max < omega0 + 10.0 * gamma:
        raise InvalidParameterError("grid must span at least omega0 +/- 10 gamma")
    params = collective_params(pair)
    width_plus = gamma + params.gamma_cross
    width_minus = gamma - params.gamma_cross
    if width_plus <= 0 or width_minus <= 0:
        raise DegenerateLinewidthError(
            f"collective linewidths ({width_plus:.3g}, {width_minus:.3g}) must stay positive"
        )
    plus = lorentzian_spectrum(omega0 + params.omega_dd, width_plus, grid)
    minus = lorentzian_spectrum(omega0 - params.omega_dd, width_minus, grid)
    return Spectrum(grid, 0.5 * (plus.values + minus.values))


# --- driven steady state ---------------------------------------------------


def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def _unvec(vector: np.ndarray, n: int) -> np.ndarray:
    return vector.reshape((n, n), order="F")


def liouvillian(hamiltonian: np.ndarray, rates: np.ndarray, lowering: list[np.ndarray]) -> np.ndarray:
    """Column-stacked superoperator of -i[H, rho] + sum_ij rates_ij D_ij(rho).

    D_ij(rho) = s_j rho s_i^+ - {s_i^+ s_j, rho} / 2.
    """
    n = hamiltonian.shape[0]
    identity = np.eye(n)
    generator = -1j * (np.kron(identity, hamiltonian) - np.kron(hamiltonian.T, identity))
    for i, s_i in enumerate(lowering):
        for j, s_j in enumerate(lowering):
            rate = rates[i, j]
            if rate == 0:
                continue
            jump = s_i.conj().T @ s_j
            generator += rate * (
                np.kron(s_i.conj(), s_j)
                - 0.5 * np.kron(identity, jump)
                - 0.5 * np.kron(jump.T, identity)
            )
    return generator


def solve_steady_state(generator: np.ndarray, n: int) -> np.ndarray:
    """Null vector of the Liouvillian with one row replaced by the trace constraint."""
    system = generator.copy()
    system[0, :] = _vec(np.eye(n))
    rhs = np.zeros(n * n, dtype=complex)
    rhs[0] = 1.0
    condition = np.linalg.cond(system)
    logger.debug("steady-state system condition number %.3g", condition)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise NumericalDegeneracyError(
            f"Liouvillian is singular beyond the trace degeneracy (condition {condition:.3g})"
        )
    try:
        solution = scipy.linalg.solve(system, rhs)
    except scipy.linalg.LinAlgError as e:
        raise NumericalDegeneracyError(f"steady-state solve failed: {e}")
    return _unvec(solution, n)


def single_atom_steady_state(detuning: float, rabi: float, gamma: float) -> np.ndarray:
    """Steady state of one driven atom, basis |g>, |e>, decay rate 2 gamma."""
    hamiltonian = -detuning * (_LOWER.T @ _LOWER) + 0.5 * rabi * (_LOWER + _LOWER.T)
    generator = liouvillian(hamiltonian, np.array([[2.0 * gamma]]), [_LOWER])
    rho = solve_steady_state(generator, 2)
    return 0.5 * (rho + rho.conj().T)


def driven_hamiltonian(
    d: DrivenConfig, omega_l: float, coupling: Optional[CollectiveParams]
) -> np.ndarray:
    detuning_A = omega_l - d.pair.omega_A
    detuning_B = omega_l - d.pair.omega_B
    raise_A, raise_B = SIGMA_A.T, SIGMA_B.T
    hamiltonian = -detuning_A * (raise_A @ SIGMA_A) - detuning_B * (raise_B @ SIGMA_B)
    if coupling is not None:
        exchange = raise_A @ SIGMA_B
        hamiltonian = hamiltonian + coupling.omega_dd * (exchange + exchange.T)
    drive = raise_A + raise_B
    return hamiltonian + 0.5 * d.rabi * (drive + drive.T)


def steady_state(d: DrivenConfig, omega_l: float, include_coupling: bool) -> DensityMatrix4:
    coupling = d.coupling() if include_coupling else None
    gamma = d.pair.gamma
    cross = 2.0 * coupling.gamma_cross if coupling is not None else 0.0
    rates = np.array([[2.0 * gamma, cross], [cross, 2.0 * gamma]])
    generator = liouvillian(driven_hamiltonian(d, omega_l, coupling), rates, [SIGMA_A, SIGMA_B])
    raw = DensityMatrix4(solve_steady_state(generator, 4))
    raw.check_physical()
    return DensityMatrix4(0.5 * (raw.entries + raw.entries.conj().T))


def _scan_point(args: tuple[DrivenConfig, float, bool]) -> ScanRow:
    d, omega_l, include_coupling = args
    rho = steady_state(d, omega_l, include_coupling)
    gamma = d.pair.gamma
    populations = rho.expect(SIGMA_A.T @ SIGMA_A).real + rho.expect(SIGMA_B.T @ SIGMA_B).real
    intensity = 2.0 * gamma * populations
    if include_coupling:
        gamma_cross = d.coupling().gamma_cross
        intensity += 2.0 * gamma_cross * 2.0 * rho.expect(SIGMA_A.T @ SIGMA_B).real
    return ScanRow(float(omega_l), rho.population_ee, float(intensity))


def excitation_scan(d: DrivenConfig, include_coupling: bool, threads: int = 1) -> ExcitationScan:
    pair = d.pair
    low = min(pair.omega_A, pair.omega_B) - 10.0 * pair.gamma
    high = max(pair.omega_A, pair.omega_B) + 10.0 * pair.gamma
    grid = d.laser_grid
    if grid.omega_min > low or grid.omega_max < high:
        raise InvalidParameterError(
            f"laser grid [{grid.omega_min}, {grid.omega_max}] must span [{low}, {high}]"
        )
    if include_coupling and d.collective is None:
        # resolve the geometry once so workers get an explicit override
        d = DrivenConfig(d.pair, d.rabi, d.laser_grid, collective_params(d.pair))
    args_list = [(d, float(omega_l), include_coupling) for omega_l in grid.samples()]
    if threads > 1:
        with Pool(threads) as pool:
            rows = pool.map(_scan_point, args_list)
    else:
        rows = [_scan_point(args) for args in args_list]
    logger.info(
        "excitation scan (%s coupling): %d laser frequencies",
        "with" if include_coupling else "without",
        len(rows),
    )
    return ExcitationScan(include_coupling, rows)


# --- mirror ------------------------------------------------------------------


class Orientation(Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


@dataclass(frozen=True)
class MirrorRates:
    rate: float
    shift: float


def _mirror_dipoles(orientation: Orientation) -> tuple[np.ndarray, np.ndarray]:
    """Dipole and its image in a perfect conductor at z = 0.

    Components parallel to the mirror flip, the normal component is kept.
    """
    if orientation == Orientation.PARALLEL:
        dipole = np.array([1.0, 0.0, 0.0])
    else:
        dipole = np.array([0.0, 0.0, 1.0])
    image = dipole * np.array([-1.0, -1.0, 1.0])
    return dipole, image


def mirror_modified_rates(
    b: float, orientation: Orientation | str, omega: float, gamma: float
) -> MirrorRates:
    """Rate and shift of an atom a distance b in front of a perfect mirror.

    Set by chi(b, -b, omega) between the dipole and its image.
    """
    if b <= 0:
        raise InvalidParameterError(f"mirror distance must be positive, got {b}")
    if omega <= 0 or gamma <= 0:
        raise InvalidParameterError("omega and gamma must be positive")
    orientation = Orientation(orientation)
    dipole, image = _mirror_dipoles(orientation)
    chi = chi_from_separation(np.array([0.0, 0.0, 2.0 * b]), omega)
    projection = dipole @ chi @ image
    rate = gamma * (1.0 + projection.imag / (COINCIDENCE_FACTOR * omega**3))
    shift = -0.5 * gamma * projection.real / (SHIFT_FACTOR * omega**3)
    return MirrorRates(float(rate), float(shift))


def image_dipole_rate(
    b: float,
    orientation: Orientation | str,
    omega: float,
    gamma: float,
    n_theta: int = 181,
    n_phi: int = 360,
) -> float:
    """Classical check: far-zone power of dipole plus image over the single-dipole power.

    The pair radiates symmetrically into both half spaces, and only the upper
    half exists in front of the mirror, so the ratio carries a factor 1/2.
    """
    if b <= 0:
        raise InvalidParameterError(f"mirror distance must be positive, got {b}")
    dipole, image = _mirror_dipoles(Orientation(orientation))
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    n = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1)
    phase = np.exp(-1j * omega * b * n[..., 2])
    moment = dipole[None, None, :] * phase[..., None] + image[None, None, :] * np.conj(phase)[..., None]
    along = np.sum(n * moment, axis=-1)
    transverse = np.sum(np.abs(moment) ** 2, axis=-1) - np.abs(along) ** 2
    single = 1.0 - np.sum(n * dipole, axis=-1) ** 2

    weights = np.sin(theta)
    pair_power = trapezoid(np.mean(transverse, axis=1) * weights, theta)
    single_power = trapezoid(np.mean(single, axis=1) * weights, theta)
    return float(gamma * 0.5 * pair_power / single_power)
