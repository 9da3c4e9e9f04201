import logging
from typing import Any, Callable, Dict, Final, Optional

import numpy as np

from ..config import Config
from ..data.result import ResultTable
from ..data.scenario import ScenarioConfig
from ..errors import InvalidParameterError
from ..physics import (
    collective_emission,
    dispersive_pulse,
    shg_phase_matching,
    spectral_core,
    vacuum_green,
    wolf_two_source,
)
from ..physics.collective_emission import Orientation
from ..physics.vacuum_green import Position3
from .base import BaseRunner

logger: Final = logging.getLogger(__name__)

ORIGIN: Final = Position3(0.0, 0.0, 0.0)


class ScenarioRunner(BaseRunner):
    """Dispatches a validated scenario to the physics modules."""

    def __init__(self):
        super().__init__()
        self.handlers: Dict[str, Callable[[Dict[str, Any], Config], list[ResultTable]]] = {
            "wolf": self.run_wolf,
            "vacuum": self.run_vacuum,
            "atoms": self.run_atoms,
            "mirror": self.run_mirror,
            "shg": self.run_shg,
            "pulse": self.run_pulse,
        }

    def run(self, scenario: ScenarioConfig, config: Config) -> list[ResultTable]:
        if scenario.scenario not in self.handlers:
            raise InvalidParameterError(f"no runner for scenario {scenario.scenario!r}")
        logger.info("running %s scenario", scenario.scenario)
        return self.handlers[scenario.scenario](scenario.params, config)

    def run_wolf(self, p: Dict[str, Any], config: Config) -> list[ResultTable]:
        grid = spectral_core.FrequencyGrid(p["grid_min"], p["grid_max"], p["grid_n"])
        source = spectral_core.lorentzian_spectrum(p["omega0"], p["gamma"], grid)
        mu = wolf_two_source.coherence_model_from_params(p["mu_model"], p).evaluate(grid)
        pair = wolf_two_source.SourcePairConfig(p["R1"], p["R2"], source, mu)
        field = wolf_two_source.field_spectrum(pair)
        record = wolf_two_source.wolf_shift(pair)

        source_lines = spectral_core.find_lines(source)
        field_lines = spectral_core.find_lines(field)
        n_lines = max(len(source_lines), len(field_lines))

        def padded(lines: list[float]) -> list[float]:
            return lines + [float("nan")] * (n_lines - len(lines))

        shifts = record.to_dict()
        return [
            ResultTable.from_columns(
                "spectra",
                {"omega": grid.samples(), "S_Q": source.values, "S_U": field.values},
            ),
            ResultTable("shifts", list(shifts), [tuple(shifts.values())]),
            ResultTable.from_columns(
                "lines",
                {
                    "index": np.arange(n_lines),
                    "source_line": padded(source_lines),
                    "field_line": padded(field_lines),
                },
            ),
        ]

    def run_vacuum(self, p: Dict[str, Any], config: Config) -> list[ResultTable]:
        omega = p["omega"]
        kr_values = np.linspace(p["kr_min"], p["kr_max"], p["n_points"])
        profile = vacuum_green.coherence_profile(omega, kr_values)
        csd = np.array(
            [
                np.diag(vacuum_green.vacuum_csd(Position3(0.0, 0.0, kr / omega), ORIGIN, omega))
                for kr in kr_values
            ]
        )
        return [
            ResultTable.from_columns("coherence", profile),
            ResultTable.from_columns(
                "csd",
                {
                    "omega_r": kr_values,
                    "csd_xx": csd[:, 0],
                    "csd_yy": csd[:, 1],
                    "csd_zz": csd[:, 2],
                },
            ),
        ]

    def run_atoms(self, p: Dict[str, Any], config: Config) -> list[ResultTable]:
        # dipoles share one orientation relative to the interatomic (z) axis
        if Orientation(p["dipole"]) == Orientation.PARALLEL:
            dipole = np.array([0.0, 0.0, 1.0])
        else:
            dipole = np.array([1.0, 0.0, 0.0])
        pair = collective_emission.AtomPairConfig(
            pos_A=ORIGIN,
            pos_B=Position3(0.0, 0.0, p["separation"]),
            dipole_A=dipole,
            dipole_B=dipole,
            omega_A=p["omega_A"],
            omega_B=p["omega_B"],
            gamma=p["gamma"],
        )
        override: Optional[collective_emission.CollectiveParams] = None
        if p["omega_dd"] is not None or p["gamma_cross"] is not None:
            # a coupling key left out keeps its value from the geometry
            geometry = collective_emission.collective_params(pair)
            override = collective_emission.CollectiveParams(
                gamma_cross=geometry.gamma_cross if p["gamma_cross"] is None else p["gamma_cross"],
                omega_dd=geometry.omega_dd if p["omega_dd"] is None else p["omega_dd"],
            )
        driven = collective_emission.DrivenConfig(
            pair,
            p["rabi"],
            spectral_core.FrequencyGrid(p["scan_min"], p["scan_max"], p["scan_n"]),
            override,
        )
        tables: list[ResultTable] = []
        for include_coupling, name in ((False, "scan_uncoupled"), (True, "scan_coupled")):
            scan = collective_emission.excitation_scan(driven, include_coupling, config.threads)
            tables.append(
                ResultTable.from_columns(
                    name,
                    {column: scan.column(column) for column in ("omega_l", "P_ee", "total_intensity")},
                )
            )

        coupling = driven.coupling()
        if not pair.identical:
            rates = (float("nan"), float("nan"))
        elif override is None:
            collective = collective_emission.collective_rates(pair)
            rates = (collective.gamma_plus, collective.gamma_minus)
        else:
            rates = (pair.gamma + coupling.gamma_cross, pair.gamma - coupling.gamma_cross)
        columns = {key: [value] for key, value in coupling.to_dict().items()}
        columns["gamma_plus"], columns["gamma_minus"] = [rates[0]], [rates[1]]
        tables.append(ResultTable.from_columns("collective", columns))
        return tables

    def run_mirror(self, p: Dict[str, Any], config: Config) -> list[ResultTable]:
        omega, gamma = p["omega"], p["gamma"]
        kb_values = np.linspace(p["kb_min"], p["kb_max"], p["n_points"])
        columns: Dict[str, Any] = {"omega_b": kb_values}
        for orientation in Orientation:
            rates = [
                collective_emission.mirror_modified_rates(kb / omega, orientation, omega, gamma)
                for kb in kb_values
            ]
            columns[f"rate_{orientation.value}"] = [r.rate / gamma for r in rates]
            columns[f"shift_{orientation.value}"] = [r.shift / gamma for r in rates]
        return [ResultTable.from_columns("rates", columns)]

    def run_shg(self, p: Dict[str, Any], config: Config) -> list[ResultTable]:
        volume = shg_phase_matching.CrystalVolume(p["Lx"], p["Ly"], p["Lz"])
        pump = shg_phase_matching.PumpCoherence(
            kind=shg_phase_matching.PumpKind(p["kind"]),
            intensity=p["intensity"],
            coherence_length=p.get("coherence_length"),
            incoherent_strength=p.get("incoherent_strength"),
        )
        q_values = np.linspace(-p["q_max"], p["q_max"], p["q_n"])
        grid = [shg_phase_matching.MismatchVector(np.array([q, 0.0, 0.0])) for q in q_values]
        pattern = shg_phase_matching.emission_pattern(volume, pump, grid, threads=config.threads)
        intensities = pattern.intensities()

        forward = q_values >= 0
        try:
            half_width = shg_phase_matching.emission_half_width(
                q_values[forward], intensities[forward]
            )
        except InvalidParameterError:
            logger.info("pattern stays above 1/2 for |Q_x| <= %g", p["q_max"])
            half_width = float("nan")
        exponent = shg_phase_matching.scaling_exponent(pump, volume)
        return [
            ResultTable.from_columns("pattern", {"Q_x": q_values, "intensity": intensities}),
            ResultTable("scaling", ["scaling_exponent", "half_width"], [(exponent, half_width)]),
        ]

    def run_pulse(self, p: Dict[str, Any], config: Config) -> list[ResultTable]:
        grid = spectral_core.TimeGrid(p["t_min"], p["t_max"], p["n_points"])
        dispersion = dispersive_pulse.DispersionConfig(p["k2"], p["z"])
        if p["correlation_file"] is not None:
            correlation = dispersive_pulse.load_correlation_csv(p["correlation_file"], grid)
            tc = float("nan")
        else:
            correlation = dispersive_pulse.gaussian_schell_correlation(p["T0"], p["tc"], grid)
            tc = p["tc"]
        output = dispersive_pulse.propagate_intensity(correlation, dispersion)
        input_width = dispersive_pulse.rms_width(grid.samples(), correlation.intensity())
        output_width = dispersive_pulse.rms_width(output.samples(), output.values)

        tables = [
            ResultTable.from_columns(
                "intensity_input", {"t": grid.samples(), "intensity": correlation.intensity()}
            ),
            ResultTable.from_columns(
                "intensity_output", {"t": output.samples(), "intensity": output.values}
            ),
            ResultTable(
                "widths",
                ["T0", "tc", "input_width", "output_width"],
                [(p["T0"], tc, input_width, output_width)],
            ),
        ]
        if p["check_factorization"]:
            tables.append(
                ResultTable(
                    "consistency",
                    ["max_relative_deviation"],
                    [(factorization_deviation(p["T0"], grid, dispersion),)],
                )
            )
        return tables


def factorization_deviation(
    T0: float, grid: spectral_core.TimeGrid, dispersion: dispersive_pulse.DispersionConfig
) -> float:
    """Largest gap between the two-time propagation of E E* and |propagated E|^2, relative to the peak."""
    envelope = dispersive_pulse.gaussian_envelope(T0, grid)
    coherent = dispersive_pulse.propagate_coherent(envelope, dispersion).intensity()
    factorized = dispersive_pulse.propagate_intensity(
        dispersive_pulse.InputCorrelation.from_envelope(envelope), dispersion
    ).values
    return float(np.max(np.abs(factorized - coherent)) / np.max(coherent))


def run_scenario(cfg: ScenarioConfig, config: Optional[Config] = None) -> list[ResultTable]:
    return ScenarioRunner().run(cfg, config or Config())
