import numpy as np
import pytest
from scipy.integrate import trapezoid

from coherencelab.errors import (
    BoundaryPeakError,
    DegenerateSpectrumError,
    InvalidParameterError,
)
from coherencelab.physics.spectral_core import (
    FrequencyGrid,
    Spectrum,
    TimeGrid,
    centroid_frequency,
    find_lines,
    gaussian_profile,
    lorentzian_spectrum,
    peak_frequency,
    trapezoid_weights,
)


def test_grid_invariants():
    with pytest.raises(InvalidParameterError):
        FrequencyGrid(0.0, 1.0, 2)
    with pytest.raises(InvalidParameterError):
        FrequencyGrid(1.0, 1.0, 10)
    with pytest.raises(InvalidParameterError):
        TimeGrid(-1.0, 1.0, 15)
    grid = FrequencyGrid(0.0, 10.0, 11)
    assert grid.step == pytest.approx(1.0)
    assert np.allclose(np.diff(grid.samples()), 1.0)


def test_widened_time_grid_keeps_spacing():
    grid = TimeGrid(-20.0, 20.0, 1024)
    wide = grid.widened(3)
    assert wide.n_points == 3 * 1023 + 1
    assert wide.step == pytest.approx(grid.step, rel=1e-12)
    assert wide.t_min == pytest.approx(-60.0)
    assert wide.t_max == pytest.approx(60.0)
    assert grid.widened(1) is grid


def test_trapezoid_weights_match_scipy():
    x = np.linspace(0.0, 2.0, 41)
    y = np.cos(x) ** 2
    weights = trapezoid_weights(41, x[1] - x[0])
    assert weights @ y == pytest.approx(trapezoid(y, x), rel=1e-14)


def test_lorentzian_peak_and_half_width():
    grid = FrequencyGrid(90.0, 110.0, 2001)
    s = lorentzian_spectrum(100.0, 1.0, grid)
    omega = grid.samples()
    peak = s.values[np.argmin(np.abs(omega - 100.0))]
    assert peak == pytest.approx(1.0 / np.pi)
    half = s.values[np.argmin(np.abs(omega - 101.0))]
    assert half == pytest.approx(0.5 * peak)
    assert np.all(s.values > 0)


def test_lorentzian_normalization():
    grid = FrequencyGrid(-200.0, 200.0, 100_000)
    s = lorentzian_spectrum(0.0, 1.0, grid)
    assert trapezoid(s.values, grid.samples()) == pytest.approx(1.0, abs=1e-2)


def test_lorentzian_rejects_non_positive_gamma():
    with pytest.raises(InvalidParameterError):
        lorentzian_spectrum(1.0, 0.0, FrequencyGrid(0.0, 2.0, 11))


def test_gaussian_profile():
    grid = FrequencyGrid(-5.0, 5.0, 1001)
    g = gaussian_profile(0.0, 1.0, grid)
    omega = grid.samples()
    assert g.values[500] == pytest.approx(1.0)
    assert g.values[np.argmin(np.abs(omega - 1.0))].real == pytest.approx(np.exp(-0.5))
    assert np.allclose(g.values, g.values[::-1])
    with pytest.raises(InvalidParameterError):
        gaussian_profile(0.0, -1.0, grid)


def test_peak_of_lorentzian():
    grid = FrequencyGrid(0.0, 10.0, 2001)
    s = lorentzian_spectrum(5.0, 0.5, grid)
    assert abs(peak_frequency(s) - 5.0) <= 0.5 * grid.step


@pytest.mark.parametrize("n_points", [20, 400, 1000, 4000])
def test_peak_on_even_grid_centred_on_the_line(n_points):
    s = lorentzian_spectrum(100.0, 1.0, FrequencyGrid(90.0, 110.0, n_points))
    assert peak_frequency(s) == pytest.approx(100.0, abs=1e-9)


def test_peak_shared_by_two_samples_is_their_midpoint():
    values = np.zeros(11)
    values[4] = values[5] = 1.0
    assert peak_frequency(Spectrum(FrequencyGrid(0.0, 10.0, 11), values)) == pytest.approx(4.5)


def test_peak_errors():
    grid = FrequencyGrid(0.0, 10.0, 101)
    with pytest.raises(BoundaryPeakError):
        peak_frequency(Spectrum(grid, np.ones(101)))
    with pytest.raises(BoundaryPeakError):
        peak_frequency(lorentzian_spectrum(-1.0, 0.5, grid))


def test_peak_of_ramped_lorentzian_matches_dense_argmax():
    def ramped(grid: FrequencyGrid) -> Spectrum:
        omega = grid.samples()
        return Spectrum(grid, lorentzian_spectrum(5.0, 0.5, grid).values * (1.0 + 0.01 * omega))

    coarse = FrequencyGrid(0.0, 10.0, 2001)
    dense = FrequencyGrid(0.0, 10.0, 1_000_001)
    reference = dense.samples()[np.argmax(ramped(dense).values)]
    estimate = peak_frequency(ramped(coarse))
    assert estimate > 5.0
    assert abs(estimate - reference) < coarse.step


def test_peak_is_scale_invariant():
    grid = FrequencyGrid(0.0, 10.0, 501)
    s = lorentzian_spectrum(4.3, 0.7, grid)
    assert peak_frequency(s.scaled(17.0)) == pytest.approx(peak_frequency(s), abs=1e-12)


def test_centroid_symmetric_and_delta():
    grid = FrequencyGrid(90.0, 110.0, 2001)
    assert centroid_frequency(lorentzian_spectrum(100.0, 1.0, grid)) == pytest.approx(
        100.0, rel=1e-10
    )
    values = np.zeros(2001)
    values[700] = 1.0
    assert centroid_frequency(Spectrum(grid, values)) == pytest.approx(grid.samples()[700])


def test_centroid_of_truncated_lorentzian_matches_refined_quadrature():
    coarse = FrequencyGrid(97.0, 110.0, 20001)
    dense = FrequencyGrid(97.0, 110.0, 1_000_001)
    estimate = centroid_frequency(lorentzian_spectrum(100.0, 1.0, coarse))
    reference = centroid_frequency(lorentzian_spectrum(100.0, 1.0, dense))
    assert estimate != pytest.approx(100.0, abs=1e-3)
    assert estimate == pytest.approx(reference, abs=1e-6)


def test_centroid_shift_covariance():
    grid = FrequencyGrid(90.0, 110.0, 1001)
    moved = FrequencyGrid(93.5, 113.5, 1001)
    base = centroid_frequency(lorentzian_spectrum(98.0, 1.0, grid))
    shifted = centroid_frequency(lorentzian_spectrum(101.5, 1.0, moved))
    assert shifted - base == pytest.approx(3.5, abs=1e-9)


def test_centroid_of_zero_spectrum():
    grid = FrequencyGrid(0.0, 1.0, 11)
    with pytest.raises(DegenerateSpectrumError):
        centroid_frequency(Spectrum(grid, np.zeros(11)))


def test_find_lines_two_lorentzians():
    grid = FrequencyGrid(80.0, 120.0, 4001)
    values = lorentzian_spectrum(95.0, 1.0, grid).values + lorentzian_spectrum(104.0, 1.0, grid).values
    lines = find_lines(Spectrum(grid, values))
    assert len(lines) == 2
    assert lines[0] == pytest.approx(95.0, abs=0.05)
    assert lines[1] == pytest.approx(104.0, abs=0.05)


def test_find_lines_on_empty_spectrum():
    grid = FrequencyGrid(0.0, 1.0, 11)
    assert find_lines(Spectrum(grid, np.zeros(11))) == []
