import dataclasses

import numpy as np
import pytest

from suscav.constants import G_STD
from suscav.errors import ConfigError, GridError, NumericalError
from suscav.spectra import (
    UNIT_DISPLACEMENT,
    FrequencyGrid,
    Spectrum,
    cumulative_rms,
    make_log_grid,
    zero_spectrum,
)
from suscav.suspension import (
    Stage,
    SuspensionChain,
    build_model,
    eigenmodes,
    mirror_force_susceptibility,
    seismic_to_cavity,
    simple_chain_model,
    single_oscillator,
    tf_suspoint_to_differential,
    tf_suspoint_to_mirror,
    write_mode_table,
)

# analytic pendulum frequencies, (1/2pi)*sqrt(g/l)
F_SINGLE_19CM = 1.1434144305348943
F_FINAL_2CM = 3.5242399633930503
# equal double pendulum, sqrt((2 +/- sqrt(2)) g/l)/2pi for l = 0.19
F_DOUBLE = (0.8751315177857356, 2.112754379098474)


def main_stage(mass=0.8, damping=0.0, phi=1e-4, kv=500.0):
    return Stage(mass=mass, wire_length=0.19, n_wires=4, vertical_stiffness=kv,
                 viscous_damping_to_parent=damping, loss_angle=phi)


def mirror_stage(phi=1e-4):
    return Stage(mass=0.01, wire_length=0.02, n_wires=2, loss_angle=phi)


def default_chain(eps=0.01, damping=2.0, phi=1e-4):
    stages = (
        main_stage(phi=phi, kv=450.0),
        main_stage(phi=phi, kv=600.0),
        main_stage(damping=damping, phi=phi, kv=800.0),
    )
    m = mirror_stage(phi=phi)
    return SuspensionChain(stages=stages, final_stages=(m, m), stiffness_mismatch=eps)


class TestValidation:
    def test_stage_rejects_nonpositive(self):
        with pytest.raises(ConfigError):
            Stage(mass=0.0, wire_length=0.19)
        with pytest.raises(ConfigError):
            Stage(mass=1.0, wire_length=-0.1)

    def test_chain_needs_two_finals(self):
        with pytest.raises(ConfigError):
            SuspensionChain(stages=(main_stage(),), final_stages=(mirror_stage(),))

    def test_vertical_needs_three_stages(self):
        chain = SuspensionChain(
            stages=(main_stage(), main_stage()),
            final_stages=(mirror_stage(), mirror_stage()),
        )
        with pytest.raises(ConfigError):
            build_model(chain, "vertical")

    def test_vertical_needs_blade_stiffness(self):
        chain = SuspensionChain(
            stages=(main_stage(kv=0.0), main_stage(), main_stage()),
            final_stages=(mirror_stage(), mirror_stage()),
        )
        with pytest.raises(ConfigError):
            build_model(chain, "vertical")

    def test_unknown_axis(self):
        with pytest.raises(ConfigError):
            build_model(default_chain(), "diagonal")


class TestEigenmodes:
    def test_single_stage_pendulum(self):
        model = simple_chain_model([Stage(mass=1.0, wire_length=0.19)])
        modes = eigenmodes(model)
        assert modes[0].frequency_hz == pytest.approx(F_SINGLE_19CM, rel=1e-9)

    def test_double_pendulum_closed_form(self):
        model = simple_chain_model([
            Stage(mass=1.0, wire_length=0.19), Stage(mass=1.0, wire_length=0.19)
        ])
        freqs = [m.frequency_hz for m in eigenmodes(model)]
        assert freqs == pytest.approx(list(F_DOUBLE), rel=1e-9)

    def test_final_stage_alone(self):
        model = simple_chain_model([Stage(mass=0.01, wire_length=0.02)])
        assert eigenmodes(model)[0].frequency_hz == pytest.approx(F_FINAL_2CM, rel=1e-9)

    def test_mass_scaling_leaves_horizontal_modes(self):
        chain = default_chain()
        scaled = SuspensionChain(
            stages=tuple(dataclasses.replace(s, mass=3.0 * s.mass) for s in chain.stages),
            final_stages=tuple(
                dataclasses.replace(s, mass=3.0 * s.mass) for s in chain.final_stages
            ),
            stiffness_mismatch=chain.stiffness_mismatch,
        )
        f1 = [m.frequency_hz for m in eigenmodes(build_model(chain, "horizontal"))]
        f2 = [m.frequency_hz for m in eigenmodes(build_model(scaled, "horizontal"))]
        assert f1 == pytest.approx(f2, rel=1e-12)

    def test_default_chain_below_10_hz(self):
        for axis in ("horizontal", "vertical"):
            modes = eigenmodes(build_model(default_chain(), axis))
            assert all(m.frequency_hz < 10.0 for m in modes)

    def test_lossless_q_absent(self):
        model = simple_chain_model([Stage(mass=1.0, wire_length=0.19)])
        assert eigenmodes(model)[0].q is None

    def test_matrices_symmetric_and_stable(self):
        model = build_model(default_chain(), "horizontal")
        assert np.array_equal(model.k_matrix, model.k_matrix.T)
        assert np.array_equal(model.c_matrix, model.c_matrix.T)
        assert np.array_equal(model.m_matrix, model.m_matrix.T)
        w = 1.0 / np.sqrt(model.masses)
        lam = np.linalg.eigvalsh(w[:, None] * model.k_matrix * w[None, :])
        assert np.all(lam > -1e-12 * lam.max())

    def test_eddy_damping_placement(self):
        # dashpot couples only upper-intermediate (1) and penultimate (2)
        c = build_model(default_chain(), "horizontal").c_matrix
        mask = np.zeros_like(c, dtype=bool)
        mask[1:3, 1:3] = True
        assert np.all(c[~mask] == 0.0)
        assert c[1, 2] != 0.0

    def test_q_decreases_with_damping(self):
        previous = None
        for damping in (1.0, 2.0, 4.0):
            modes = eigenmodes(build_model(default_chain(damping=damping), "horizontal"))
            qs = np.array([m.q for m in modes])
            assert np.all(np.isfinite(qs))
            if previous is not None:
                assert np.all(qs < previous)
            previous = qs

    def test_mode_table_export(self, tmp_path):
        modes = eigenmodes(build_model(default_chain(), "horizontal"))
        path = tmp_path / "modes.csv"
        write_mode_table(path, modes)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "frequency_hz,q,dominant_stage"
        assert len(lines) == len(modes) + 1


class TestMirrorTransferFunction:
    def test_dc_limit_unity(self):
        grid = FrequencyGrid(np.array([1e-3]))
        h = tf_suspoint_to_mirror(build_model(default_chain(), "horizontal"), grid)
        assert abs(h[0]) == pytest.approx(1.0, abs=1e-4)

    def test_high_frequency_rolloff_minus8(self):
        # four cascaded stages, damping off: f**-8 envelope
        chain = default_chain(damping=0.0, phi=0.0)
        grid = make_log_grid(30.0, 100.0, 200)
        h = tf_suspoint_to_mirror(build_model(chain, "horizontal"), grid)
        slope = np.polyfit(np.log10(grid.values), np.log10(np.abs(h)), 1)[0]
        assert slope == pytest.approx(-8.0, abs=0.2)

    def test_resonance_local_maximum(self):
        chain = default_chain(damping=0.0, phi=1e-6)
        model = build_model(chain, "horizontal")
        f0 = eigenmodes(model)[0].frequency_hz
        grid = FrequencyGrid(f0 * np.linspace(0.97, 1.03, 101))
        mag = np.abs(tf_suspoint_to_mirror(model, grid))
        peak = int(np.argmax(mag))
        assert 0 < peak < len(grid) - 1

    def test_singularity_names_frequency(self):
        # lossless oscillator evaluated exactly on its resonance
        f0 = 2.0
        stiffness = 1.0 * (2.0 * np.pi * f0) ** 2
        model = single_oscillator(1.0, stiffness)
        grid = FrequencyGrid(np.array([1.0, f0, 3.0]))
        with pytest.raises(NumericalError) as err:
            tf_suspoint_to_mirror(model, grid)
        assert err.value.frequency_hz == f0

    def test_force_susceptibility_free_mass_limit(self):
        model = build_model(default_chain(), "horizontal")
        grid = FrequencyGrid(np.array([1000.0]))
        chi = mirror_force_susceptibility(model, grid)
        free = 1.0 / (0.01 * (2.0 * np.pi * 1000.0) ** 2)
        assert abs(chi[0]) == pytest.approx(free, rel=1e-2)


class TestDifferentialTransferFunction:
    def test_zero_mismatch_identically_zero(self, grid_band):
        h = tf_suspoint_to_differential(default_chain(eps=0.0), grid_band)
        assert np.all(h == 0.0)

    def test_linear_in_mismatch_below_resonance(self):
        grid = make_log_grid(0.1, 0.5, 40)
        h1 = tf_suspoint_to_differential(default_chain(eps=1e-3), grid)
        h2 = tf_suspoint_to_differential(default_chain(eps=2e-3), grid)
        assert np.allclose(np.abs(h2) / np.abs(h1), 2.0, rtol=1e-2)

    def test_f_squared_slope_below_first_resonance(self):
        # first resonance sits at 0.74 Hz; measure well below it
        grid = make_log_grid(0.1, 0.25, 30)
        h = tf_suspoint_to_differential(default_chain(), grid)
        slope = np.polyfit(np.log10(grid.values), np.log10(np.abs(h)), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.2)


class TestSeismicToCavity:
    def test_zero_ground_zero_output(self, grid_band):
        out = seismic_to_cavity(
            default_chain(), zero_spectrum(grid_band, UNIT_DISPLACEMENT),
            np.ones(len(grid_band)), grid_band,
        )
        assert np.all(out.asd == 0.0)

    def test_symmetric_chain_zero_output(self, grid_band):
        ground = Spectrum(grid_band, np.full(len(grid_band), 1e-7), UNIT_DISPLACEMENT)
        out = seismic_to_cavity(default_chain(eps=0.0), ground,
                                np.ones(len(grid_band)), grid_band)
        assert np.all(out.asd == 0.0)

    def test_grid_mismatch_rejected(self, grid_band):
        other = make_log_grid(0.1, 1e4, 999)
        ground = zero_spectrum(other, UNIT_DISPLACEMENT)
        with pytest.raises(GridError):
            seismic_to_cavity(default_chain(), ground, np.ones(999), grid_band)

    def test_rms_dominated_by_low_frequency_resonances(self, grid_band):
        ground = Spectrum(grid_band, np.full(len(grid_band), 1e-7), UNIT_DISPLACEMENT)
        out = seismic_to_cavity(default_chain(), ground,
                                np.ones(len(grid_band)), grid_band)
        rms = cumulative_rms(out)
        i10 = np.searchsorted(grid_band.values, 10.0)
        assert rms.asd[i10] < 0.01 * rms.asd[0]


class TestStiffnessConvention:
    def test_top_wire_carries_total_weight(self):
        chain = default_chain()
        model = build_model(chain, "horizontal")
        total = 3 * 0.8 + 2 * 0.01
        assert model.springs[0].stiffness == pytest.approx(
            G_STD * total / 0.19, rel=1e-12
        )

    def test_mismatch_splits_final_stiffness(self):
        model = build_model(default_chain(eps=0.01), "horizontal")
        ka = model.springs[3].stiffness
        kb = model.springs[4].stiffness
        kbar = G_STD * 0.01 / 0.02
        assert ka == pytest.approx(kbar * 1.005, rel=1e-12)
        assert kb == pytest.approx(kbar * 0.995, rel=1e-12)
        assert (ka - kb) / kbar == pytest.approx(0.01, rel=1e-12)
