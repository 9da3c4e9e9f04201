import numpy as np
import pytest
from scipy.integrate import trapezoid

from coherencelab.errors import (
    CoincidenceError,
    InvalidParameterError,
    NotApplicableError,
)
from coherencelab.physics.collective_emission import (
    INDEX_EE,
    AtomPairConfig,
    CollectiveParams,
    DrivenConfig,
    Orientation,
    collective_params,
    collective_rates,
    emission_spectrum_pair,
    excitation_scan,
    image_dipole_rate,
    mirror_modified_rates,
    single_atom_steady_state,
    steady_state,
)
from coherencelab.physics.spectral_core import FrequencyGrid, lorentzian_spectrum
from coherencelab.physics.vacuum_green import Position3

X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])
ORIGIN = Position3(0.0, 0.0, 0.0)


def identical_pair(kr: float, omega: float = 1.0, gamma: float = 0.01, dipole=X) -> AtomPairConfig:
    return AtomPairConfig(
        ORIGIN, Position3(0.0, 0.0, kr / omega), dipole, dipole, omega, omega, gamma
    )


def two_photon_config(omega_dd: float, n_points: int = 401) -> DrivenConfig:
    pair = AtomPairConfig(ORIGIN, Position3(0.0, 0.0, 0.01), X, X, 1010.0, 990.0, 1.0)
    return DrivenConfig(
        pair,
        rabi=0.5,
        laser_grid=FrequencyGrid(970.0, 1030.0, n_points),
        collective=CollectiveParams(gamma_cross=0.0, omega_dd=omega_dd),
    )


def local_maxima(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    return x[1:-1][interior]


def test_pair_config_validation():
    with pytest.raises(InvalidParameterError):
        AtomPairConfig(ORIGIN, Position3(0, 0, 1), 2.0 * X, X, 1.0, 1.0, 0.1)
    with pytest.raises(InvalidParameterError):
        AtomPairConfig(ORIGIN, Position3(0, 0, 1), X, X, 1.0, 1.0, 0.0)
    with pytest.raises(CoincidenceError):
        collective_params(AtomPairConfig(ORIGIN, ORIGIN, X, X, 1.0, 1.0, 0.1))


def test_dicke_limit():
    rates = collective_rates(identical_pair(1e-3))
    assert rates.gamma_plus == pytest.approx(0.02, abs=1e-3 * 0.01)
    assert rates.gamma_minus == pytest.approx(0.0, abs=1e-3 * 0.01)
    assert collective_params(identical_pair(1e-3)).gamma_cross == pytest.approx(0.01, abs=1e-5)


def test_independent_limit():
    pair = identical_pair(200.0)
    assert abs(collective_params(pair).gamma_cross) < 0.01 * pair.gamma
    rates = collective_rates(pair)
    assert rates.gamma_plus == pytest.approx(pair.gamma, abs=0.01 * pair.gamma)
    assert rates.gamma_minus == pytest.approx(pair.gamma, abs=0.01 * pair.gamma)


def test_orthogonal_dipoles_do_not_couple():
    pair = AtomPairConfig(ORIGIN, Position3(0.0, 0.0, 1.3), X, Y, 1.0, 1.0, 0.1)
    params = collective_params(pair)
    assert params.gamma_cross == pytest.approx(0.0, abs=1e-15)
    assert params.omega_dd == pytest.approx(0.0, abs=1e-15)


def test_rate_sum_rule_and_bound():
    rng = np.random.default_rng(7)
    for _ in range(200):
        d_a = rng.normal(size=3)
        d_b = rng.normal(size=3)
        u = rng.normal(size=3) * rng.uniform(0.01, 10.0)
        pair = AtomPairConfig(
            ORIGIN, Position3.from_array(u), d_a / np.linalg.norm(d_a), d_b / np.linalg.norm(d_b), 1.0, 1.0, 0.3
        )
        assert abs(collective_params(pair).gamma_cross) <= pair.gamma * (1 + 1e-12)
        rates = collective_rates(pair)
        assert rates.gamma_plus + rates.gamma_minus == pytest.approx(2.0 * pair.gamma, abs=1e-15)


def test_collective_parameters_at_unit_separation():
    params = collective_params(identical_pair(1.0, gamma=1.0))
    transverse = 1.5 * (np.sin(1.0) + np.cos(1.0) - np.sin(1.0))
    assert params.gamma_cross == pytest.approx(transverse, rel=1e-10)
    assert params.omega_dd == pytest.approx(-0.63, abs=0.01)


def test_rates_need_identical_atoms():
    pair = AtomPairConfig(ORIGIN, Position3(0, 0, 1), X, X, 1.0, 1.1, 0.01)
    with pytest.raises(NotApplicableError):
        collective_rates(pair)
    with pytest.raises(NotApplicableError):
        emission_spectrum_pair(pair, FrequencyGrid(0.5, 1.5, 101))


def test_decoupled_pair_emits_a_single_lorentzian():
    grid = FrequencyGrid(0.8, 1.2, 4001)
    spectrum = emission_spectrum_pair(identical_pair(1e8), grid)
    single = lorentzian_spectrum(1.0, 0.01, grid)
    assert np.max(np.abs(spectrum.values - single.values)) / np.max(single.values) < 1e-6


def test_coupled_pair_spectrum_does_not_factorize():
    gamma = 0.1
    grid = FrequencyGrid(80.0, 120.0, 40001)
    pair = identical_pair(1.0, omega=100.0, gamma=gamma)
    coupled = emission_spectrum_pair(pair, grid)
    single = lorentzian_spectrum(100.0, gamma, grid)
    assert np.max(np.abs(coupled.values - single.values)) > 0.1 * np.max(single.values)
    omega = grid.samples()
    assert trapezoid(coupled.values, omega) == pytest.approx(trapezoid(single.values, omega), abs=1e-3)


def test_emission_spectrum_guards():
    with pytest.raises(InvalidParameterError):
        emission_spectrum_pair(identical_pair(1.0), FrequencyGrid(0.99, 1.01, 101))


def test_undriven_pair_stays_in_ground_state():
    d = two_photon_config(5.0)
    d = DrivenConfig(d.pair, 1e-9, d.laser_grid, d.collective)
    rho = steady_state(d, 1000.0, include_coupling=True).entries
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert np.max(np.abs(rho - expected)) < 1e-8


@pytest.mark.parametrize("omega_l", [985.0, 990.0, 1000.0, 1010.3])
def test_uncoupled_steady_state_factorizes(omega_l):
    d = two_photon_config(5.0)
    rho = steady_state(d, omega_l, include_coupling=False).entries
    rho_a = single_atom_steady_state(omega_l - d.pair.omega_A, d.rabi, d.pair.gamma)
    rho_b = single_atom_steady_state(omega_l - d.pair.omega_B, d.rabi, d.pair.gamma)
    assert np.max(np.abs(rho - np.kron(rho_b, rho_a))) < 1e-8


def test_single_atom_steady_state_on_resonance():
    rho = single_atom_steady_state(0.0, 1.0, 1.0)
    # (rabi^2 / 4) / (gamma^2 + rabi^2 / 2) with full decay rate 2 gamma
    assert rho[1, 1].real == pytest.approx(0.5 * 0.5 / 1.5, rel=1e-12)
    assert np.trace(rho).real == pytest.approx(1.0)


def test_steady_states_are_physical():
    d = two_photon_config(5.0)
    for omega_l in np.linspace(970.0, 1030.0, 13):
        rho = steady_state(d, float(omega_l), include_coupling=True)
        entries = rho.entries
        assert np.max(np.abs(entries - entries.conj().T)) < 1e-10
        assert np.trace(entries).real == pytest.approx(1.0, abs=1e-10)
        assert np.min(np.linalg.eigvalsh(entries)) >= -1e-9
        assert rho.population_ee == pytest.approx(entries[INDEX_EE, INDEX_EE].real)


def test_two_photon_resonance_needs_the_coupling():
    d = two_photon_config(5.0)
    uncoupled = excitation_scan(d, include_coupling=False)
    coupled = excitation_scan(d, include_coupling=True)
    omega = uncoupled.column("omega_l")
    center = int(np.argmin(np.abs(omega - 1000.0)))
    assert omega[center] == pytest.approx(1000.0)

    p_off = uncoupled.column("P_ee")
    assert p_off[center - 1] - 2.0 * p_off[center] + p_off[center + 1] >= 0

    p_on = coupled.column("P_ee")
    assert np.any(np.abs(local_maxima(omega, p_on) - 1000.0) <= 1.0)
    assert p_on[center] / p_off[center] > 5.0


@pytest.mark.parametrize("include_coupling", [False, True])
def test_single_photon_resonances(include_coupling):
    d = two_photon_config(2.0)
    scan = excitation_scan(d, include_coupling)
    peaks = local_maxima(scan.column("omega_l"), scan.column("total_intensity"))
    for omega_atom in (990.0, 1010.0):
        assert np.any(np.abs(peaks - omega_atom) <= 1.0)


def test_scan_grid_must_cover_both_atoms():
    d = two_photon_config(5.0)
    narrow = DrivenConfig(d.pair, d.rabi, FrequencyGrid(985.0, 1015.0, 61), d.collective)
    with pytest.raises(InvalidParameterError):
        excitation_scan(narrow, include_coupling=True)


def test_parallel_scan_matches_serial():
    pair = AtomPairConfig(ORIGIN, Position3(0.0, 0.0, 0.5), X, X, 1.0, 1.0, 0.001)
    d = DrivenConfig(pair, 0.0005, FrequencyGrid(0.98, 1.02, 31))
    serial = excitation_scan(d, include_coupling=True, threads=1)
    parallel = excitation_scan(d, include_coupling=True, threads=2)
    assert [row.to_dict() for row in serial.rows] == [row.to_dict() for row in parallel.rows]


@pytest.mark.parametrize("orientation", list(Orientation))
def test_distant_mirror_leaves_rates_unchanged(orientation):
    rates = mirror_modified_rates(100.0, orientation, 1.0, 1.0)
    assert rates.rate == pytest.approx(1.0, abs=0.02)
    assert abs(rates.shift) < 0.02


def test_mirror_close_limits():
    parallel = mirror_modified_rates(1e-3, Orientation.PARALLEL, 1.0, 1.0)
    perpendicular = mirror_modified_rates(1e-3, "perpendicular", 1.0, 1.0)
    assert parallel.rate == pytest.approx(0.0, abs=1e-2)
    assert perpendicular.rate == pytest.approx(2.0, abs=1e-2)
    assert image_dipole_rate(1e-3, Orientation.PARALLEL, 1.0, 1.0) == pytest.approx(0.0, abs=1e-2)
    assert image_dipole_rate(1e-3, Orientation.PERPENDICULAR, 1.0, 1.0) == pytest.approx(2.0, abs=1e-2)


@pytest.mark.parametrize("orientation", list(Orientation))
@pytest.mark.parametrize("kb", [0.3, 1.0, 2.5])
def test_mirror_rate_matches_image_dipole_power(orientation, kb):
    expected = image_dipole_rate(kb, orientation, 1.0, 1.0)
    assert mirror_modified_rates(kb, orientation, 1.0, 1.0).rate == pytest.approx(expected, abs=1e-3)


def test_mirror_rate_oscillation_spacing():
    kb = np.linspace(20.0, 50.0, 3001)
    excess = np.array([mirror_modified_rates(b, Orientation.PARALLEL, 1.0, 1.0).rate - 1.0 for b in kb])
    crossings = kb[:-1][np.sign(excess[:-1]) != np.sign(excess[1:])]
    spacing = np.diff(crossings)
    assert len(spacing) > 10
    assert np.all(np.abs(spacing - np.pi / 2.0) < 0.05 * np.pi / 2.0)


def test_mirror_distance_must_be_positive():
    with pytest.raises(InvalidParameterError):
        mirror_modified_rates(0.0, Orientation.PARALLEL, 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        image_dipole_rate(-1.0, Orientation.PARALLEL, 1.0, 1.0)
