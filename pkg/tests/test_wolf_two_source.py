import numpy as np
import pytest

from coherencelab.errors import (
    CoherenceBoundError,
    InvalidParameterError,
    UndefinedCoherenceError,
)
from coherencelab.physics.spectral_core import (
    ComplexSamples,
    FrequencyGrid,
    Spectrum,
    find_lines,
    gaussian_profile,
    lorentzian_spectrum,
)
from coherencelab.physics.wolf_two_source import (
    COHERENCE_MODEL_REGISTRY,
    SourcePairConfig,
    coherence_from_sources,
    coherence_model_from_params,
    field_spectrum,
    load_tabulated_coherence,
    wolf_shift,
)

GRID = FrequencyGrid(80.0, 120.0, 4001)


def gaussian_pair(center: float, grid: FrequencyGrid = GRID) -> SourcePairConfig:
    return SourcePairConfig(
        1.0,
        1.0,
        lorentzian_spectrum(100.0, 1.0, grid),
        gaussian_profile(center, 3.0, grid),
    )


def constant_mu(value: complex, grid: FrequencyGrid = GRID) -> ComplexSamples:
    return ComplexSamples(grid, np.full(grid.n_points, value, dtype=complex))


def test_incoherent_limit_is_exact():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    su = field_spectrum(SourcePairConfig(2.0, 3.0, sq, constant_mu(0.0)))
    expected = sq.values * (1.0 / 4.0 + 1.0 / 9.0)
    assert np.max(np.abs(su.values - expected) / expected) <= 1e-12


def test_fully_coherent_equal_paths_quadruples():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    su = field_spectrum(SourcePairConfig(2.0, 2.0, sq, constant_mu(1.0)))
    assert np.allclose(su.values, 4.0 * sq.values / 4.0, rtol=1e-13)


def test_coherence_bound_is_enforced():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    with pytest.raises(CoherenceBoundError):
        SourcePairConfig(1.0, 1.0, sq, constant_mu(1.5))


def test_config_rejects_bad_distances_and_grids():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    with pytest.raises(InvalidParameterError):
        SourcePairConfig(0.0, 1.0, sq, constant_mu(0.0))
    other = FrequencyGrid(80.0, 120.0, 401)
    with pytest.raises(InvalidParameterError):
        SourcePairConfig(1.0, 1.0, sq, constant_mu(0.0, other))


def test_gaussian_coherence_above_the_line_blue_shifts():
    record = wolf_shift(gaussian_pair(102.0))
    assert record.peak_shift > 0
    assert record.centroid_shift > 0


def test_mirrored_coherence_gives_opposite_shift():
    blue = wolf_shift(gaussian_pair(102.0))
    red = wolf_shift(gaussian_pair(98.0))
    assert red.peak_shift < 0
    assert red.peak_shift == pytest.approx(-blue.peak_shift, abs=1e-9)


def test_shift_matches_dense_grid_argmax():
    dense = FrequencyGrid(80.0, 120.0, 1_000_001)
    su = field_spectrum(gaussian_pair(102.0, dense))
    reference = dense.samples()[np.argmax(su.values)] - 100.0
    assert wolf_shift(gaussian_pair(102.0)).peak_shift == pytest.approx(reference, abs=dense.step)


def test_shift_spans_more_than_ten_grid_steps():
    fine = FrequencyGrid(80.0, 120.0, 40001)
    assert abs(wolf_shift(gaussian_pair(102.0, fine)).peak_shift) > 10 * fine.step


def test_shift_converges_under_grid_doubling():
    coarse = FrequencyGrid(80.0, 120.0, 2001)
    fine = FrequencyGrid(80.0, 120.0, 4001)
    a = wolf_shift(gaussian_pair(102.0, coarse)).peak_shift
    b = wolf_shift(gaussian_pair(102.0, fine)).peak_shift
    assert abs(a - b) < fine.step


def test_constant_mu_equal_paths_has_no_shift():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    record = wolf_shift(SourcePairConfig(1.5, 1.5, sq, constant_mu(0.7)))
    assert record.peak_shift == pytest.approx(0.0, abs=1e-12)


def test_swap_symmetry():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    omega = GRID.samples()
    mu = ComplexSamples(GRID, 0.8 * np.exp(1j * 0.3 * omega))
    forward = field_spectrum(SourcePairConfig(1.0, 2.5, sq, mu))
    swapped = field_spectrum(
        SourcePairConfig(2.5, 1.0, sq, ComplexSamples(GRID, np.conj(mu.values)))
    )
    assert np.allclose(forward.values, swapped.values, rtol=1e-13, atol=0)


def test_positivity_lower_bound():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    omega = GRID.samples()
    mu = ComplexSamples(GRID, np.exp(1j * 1.7 * omega))
    su = field_spectrum(SourcePairConfig(1.0, 3.0, sq, mu))
    bound = sq.values * (1.0 - 1.0 / 3.0) ** 2
    assert np.all(su.values >= bound - 1e-12 * np.max(su.values))


def test_linearity_in_source_spectrum():
    cfg = gaussian_pair(102.0)
    scaled = SourcePairConfig(1.0, 1.0, cfg.source_spectrum.scaled(3.0), cfg.mu)
    assert np.allclose(field_spectrum(scaled).values, 3.0 * field_spectrum(cfg).values, rtol=1e-14, atol=0)


def test_coherence_from_sources():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    mu = coherence_from_sources(sq, ComplexSamples(GRID, sq.values))
    assert np.allclose(mu.values, 1.0)
    zero = coherence_from_sources(sq, constant_mu(0.0))
    assert np.all(zero.values == 0)
    phased = coherence_from_sources(sq, ComplexSamples(GRID, 0.5 * sq.values * np.exp(0.4j)))
    assert np.allclose(np.abs(phased.values), 0.5)
    assert np.allclose(np.angle(phased.values), 0.4)


def test_coherence_from_sources_errors():
    values = np.ones(GRID.n_points)
    values[10] = 0.0
    sq = Spectrum(GRID, values)
    with pytest.raises(UndefinedCoherenceError):
        coherence_from_sources(sq, constant_mu(0.1))
    with pytest.raises(CoherenceBoundError):
        coherence_from_sources(Spectrum(GRID, np.ones(GRID.n_points)), constant_mu(2.0))


def test_anti_correlated_sources_split_the_line():
    sq = lorentzian_spectrum(100.0, 1.0, GRID)
    mu = coherence_model_from_params(
        "gaussian", {"mu_center": 100.0, "mu_sigma": 0.5, "mu_amplitude": -1.0}
    ).evaluate(GRID)
    su = field_spectrum(SourcePairConfig(1.0, 1.0, sq, mu))
    assert len(find_lines(sq)) == 1
    lines = find_lines(su)
    assert len(lines) == 2
    assert lines[0] < 100.0 < lines[1]
    assert lines[0] + lines[1] == pytest.approx(200.0, abs=1e-6)


def test_coherence_models_are_registered():
    assert set(COHERENCE_MODEL_REGISTRY) == {"constant", "complex_constant", "gaussian", "tabulated"}
    model = coherence_model_from_params("complex_constant", {"mu_value": 0.5, "mu_phase": np.pi})
    assert np.allclose(model.evaluate(GRID).values, -0.5)
    with pytest.raises(InvalidParameterError):
        coherence_model_from_params("lorentzian", {})


def test_tabulated_coherence(tmp_path):
    grid = FrequencyGrid(0.0, 1.0, 5)
    path = tmp_path / "mu.csv"
    path.write_text("0.1,0.0\n0.2,0.1\n0.3,-0.2\n0.0,0.0\n-0.5,0.5\n")
    mu = load_tabulated_coherence(str(path), grid)
    assert mu.values[2] == pytest.approx(0.3 - 0.2j)
    model = coherence_model_from_params("tabulated", {"mu_file": str(path)})
    assert np.array_equal(model.evaluate(grid).values, mu.values)


def test_tabulated_coherence_validation(tmp_path):
    grid = FrequencyGrid(0.0, 1.0, 5)
    short = tmp_path / "short.csv"
    short.write_text("0.1,0.0\n0.2,0.1\n")
    with pytest.raises(InvalidParameterError):
        load_tabulated_coherence(str(short), grid)
    wide = tmp_path / "wide.csv"
    wide.write_text("0.1,0.0,1\n" * 5)
    with pytest.raises(InvalidParameterError):
        load_tabulated_coherence(str(wide), grid)
    too_large = tmp_path / "large.csv"
    too_large.write_text("1.0,1.0\n" * 5)
    with pytest.raises(CoherenceBoundError):
        load_tabulated_coherence(str(too_large), grid)
    with pytest.raises(InvalidParameterError):
        load_tabulated_coherence(str(tmp_path / "missing.csv"), grid)


def test_shift_on_even_grid_centred_on_the_line():
    even = FrequencyGrid(80.0, 120.0, 4000)
    record = wolf_shift(gaussian_pair(102.0, even))
    assert record.source_peak == pytest.approx(100.0, abs=1e-9)
    assert record.peak_shift == pytest.approx(wolf_shift(gaussian_pair(102.0)).peak_shift, abs=GRID.step)
