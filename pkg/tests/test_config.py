"""Configuration loading, overrides, validation, and the named profiles."""

import math

import pytest

from vmblimits.config import (
    AMPLITUDE_BOUND,
    ConfigError,
    RunConfig,
    SweepPlan,
    default_run_mapping,
    default_sweep_mapping,
    load_run_config,
    load_sweep_plan,
    parse_override,
    profile_data,
)


class TestLoading:
    def test_defaults(self):
        cfg = load_run_config()
        assert cfg.d_x == 1
        assert cfg.N_x == 32
        assert cfg.N_v == 12
        assert cfg.L_x == pytest.approx(2 * math.pi)
        assert cfg.regime_tag == "nsw"
        assert cfg.epsilon == 0.1
        assert cfg.backend_kind == "bgk"
        assert cfg.profile == "mixed"
        assert cfg.scheme == "IMEX2"
        assert cfg.s == 3
        assert cfg.dt is None and cfg.record_dt is None

    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("grid:\n  N_x: 16\ntime:\n  t_end: 0.25\n")
        cfg = load_run_config(str(path))
        assert cfg.N_x == 16
        assert cfg.t_end == 0.25
        assert cfg.N_v == 12  # untouched default

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("time:\n  t_end: 0.25\n")
        cfg = load_run_config(str(path), overrides=["time.t_end=0.75"])
        assert cfg.t_end == 0.75

    def test_override_value_types(self):
        cfg = load_run_config(
            overrides=[
                "grid.N_x=16",
                "time.dt=0.002",
                "backend.kind=spectral-diagonal",
                "time.record_dt=null",
            ]
        )
        assert cfg.N_x == 16 and isinstance(cfg.N_x, int)
        assert cfg.dt == 0.002
        assert cfg.backend_kind == "spectral-diagonal"
        assert cfg.record_dt is None

    def test_parse_override_shapes(self):
        assert parse_override("grid.N_x=8") == (("grid", "N_x"), 8)
        assert parse_override("sweep.eps_values=[0.2,0.1]") == (
            ("sweep", "eps_values"),
            [0.2, 0.1],
        )
        with pytest.raises(ConfigError, match="key.path=value"):
            parse_override("no-equals-sign")

    def test_unknown_keys_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown configuration key"):
            load_run_config(overrides=["grid.N_q=7"])
        path = tmp_path / "run.yaml"
        path.write_text("grille:\n  N_x: 16\n")
        with pytest.raises(ConfigError, match="unknown configuration key"):
            load_run_config(str(path))

    def test_section_cannot_become_scalar(self):
        with pytest.raises(ConfigError, match="not a scalar"):
            load_run_config(overrides=["grid=7"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_run_config(str(tmp_path / "absent.yaml"))

    def test_malformed_yaml(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("grid: [unclosed\n")
        with pytest.raises(ConfigError, match="not valid YAML"):
            load_run_config(str(path))

    def test_mapping_round_trip(self):
        cfg = load_run_config(overrides=["grid.N_x=16", "regime.epsilon=0.05"])
        again = RunConfig.from_mapping(cfg.to_mapping())
        assert again == cfg

    def test_default_mappings_are_fresh_copies(self):
        a = default_run_mapping()
        a["grid"]["N_x"] = 5
        assert default_run_mapping()["grid"]["N_x"] == 32
        b = default_sweep_mapping()
        assert b["time"]["t_end"] == 0.5
        assert b["sweep"]["workers"] == 1


class TestValidation:
    @pytest.mark.parametrize(
        "override, message",
        [
            ("initial.amplitude=0.5", "amplitude"),
            ("initial.amplitude=-0.1", "amplitude"),
            ("initial.profile=vortex", "unknown profile"),
            ("time.scheme=IMEX9", "unknown scheme"),
            ("time.t_end=-1.0", "t_end"),
            ("time.dt=0", "dt"),
            ("time.record_dt=-0.5", "record_dt"),
            ("diagnostics.s=0", "at least 1"),
            ("diagnostics.gauss_mode=repair", "gauss_mode"),
            ("regime.tag=xxx", "unknown regime tag"),
            ("regime.epsilon=1.5", "epsilon"),
            ("backend.kind=fancy", "backend"),
            ("grid.d_x=4", "d_x"),
            ("grid.N_x=8.5", "integer"),
            ("output.dir=''", "empty"),
        ],
    )
    def test_rejects(self, override, message):
        with pytest.raises(ConfigError, match=message):
            load_run_config(overrides=[override])

    def test_amplitude_zero_is_equilibrium(self):
        cfg = load_run_config(overrides=["initial.amplitude=0.0"])
        assert cfg.amplitude == 0.0

    def test_amplitude_bound_is_inclusive(self):
        cfg = load_run_config(overrides=[f"initial.amplitude={AMPLITUDE_BOUND}"])
        assert cfg.amplitude == AMPLITUDE_BOUND

    def test_custom_regime_needs_alpha_and_gamma(self):
        with pytest.raises(ConfigError, match="custom regime requires"):
            load_run_config(overrides=["regime.tag=custom"])
        cfg = load_run_config(
            overrides=[
                "regime.tag=custom",
                "regime.epsilon=0.2",
                "regime.alpha=0.01",
                "regime.gamma=0.05",
            ]
        )
        regime = cfg.scaling_regime()
        assert regime.tag is None
        assert regime.beta == pytest.approx(0.01 * 0.05 / 0.2)

    def test_preset_regime_rejects_alpha(self):
        with pytest.raises(ConfigError, match="only to the custom regime"):
            load_run_config(overrides=["regime.alpha=0.01"])

    def test_bgk_rejects_custom_rates(self):
        with pytest.raises(ConfigError, match="rates"):
            load_run_config(overrides=["backend.rates=[1,2,3]"])

    def test_spectral_rates_length_checked(self):
        with pytest.raises(ConfigError, match="rates"):
            load_run_config(
                overrides=["backend.kind=spectral-diagonal", "backend.rates=[1,2,3]"]
            )


class TestBuilders:
    def test_grid_and_backend(self):
        cfg = load_run_config(
            overrides=["grid.N_x=16", "grid.N_v=4", "backend.kind=spectral-diagonal"]
        )
        grid = cfg.grid()
        assert grid.N_x == 16 and grid.N_v == 4
        backend = cfg.collision_backend()
        assert backend.kind == "spectral-diagonal"
        assert backend.rates.shape == (3 * (4 - 1) + 1,)

    def test_custom_rates_forwarded(self):
        n_v = 4
        rates = [1.0] + [2.0 * d for d in range(1, 3 * (n_v - 1) + 1)]
        cfg = load_run_config(
            overrides=[
                "grid.N_v=4",
                "backend.kind=spectral-diagonal",
                f"backend.rates={rates}",
            ]
        )
        backend = cfg.collision_backend()
        assert backend.rate_at(2) == 4.0

    def test_initial_data_matches_profile(self):
        cfg = load_run_config(overrides=["initial.profile=shear-mode"])
        data = cfg.initial_data()
        reference = profile_data("shear-mode", cfg.amplitude, cfg.d_x)
        assert data.u == reference.u
        assert data.theta == reference.theta


class TestProfiles:
    def test_shear_mode_is_neutral(self):
        data = profile_data("shear-mode", 0.1)
        assert data.u and data.theta
        assert not data.n and not data.E and not data.B and not data.j

    def test_charge_mode_is_charge_dominated(self):
        data = profile_data("charge-mode", 0.1)
        assert data.n[(1,)] == pytest.approx(0.1)
        assert abs(data.u[(1,)][1]) < 0.1

    def test_mixed_populates_everything(self):
        data = profile_data("mixed", 0.1)
        for block in (data.u, data.theta, data.n, data.E, data.B):
            assert block

    def test_amplitude_scales_linearly(self):
        small = profile_data("mixed", 0.01)
        large = profile_data("mixed", 0.02)
        assert large.theta[(1,)] == pytest.approx(2 * small.theta[(1,)])

    def test_two_dimensional_keys(self):
        data = profile_data("mixed", 0.05, d_x=2)
        assert all(len(k) == 2 for k in data.u)

    def test_unknown_profile(self):
        with pytest.raises(ConfigError, match="unknown profile"):
            profile_data("spiral", 0.1)


class TestSweepPlan:
    def test_member_configs(self):
        plan = load_sweep_plan(
            overrides=["sweep.eps_values=[0.2,0.1,0.05]", "output.dir=sw"]
        )
        member = plan.member(2)
        assert member.epsilon == 0.05
        assert member.out_dir.endswith("member-02")
        assert member.profile == plan.base.profile

    def test_sweep_defaults_shorter_horizon(self):
        plan = load_sweep_plan()
        assert plan.base.t_end == 0.5
        assert plan.base.record_dt == 0.0625
        assert plan.eps_values == (0.1, 0.05, 0.025, 0.0125)

    @pytest.mark.parametrize(
        "values, message",
        [
            ("[0.1,0.05]", "three"),
            ("[0.1,0.2,0.05]", "decreasing"),
            ("[0.1,0.1,0.05]", "decreasing"),
            ("[1.5,0.1,0.05]", "between"),
        ],
    )
    def test_ladder_validation(self, values, message):
        with pytest.raises(ConfigError, match=message):
            load_sweep_plan(overrides=[f"sweep.eps_values={values}"])

    def test_workers_positive(self):
        with pytest.raises(ConfigError, match="workers"):
            load_sweep_plan(overrides=["sweep.workers=0"])

    def test_custom_regime_rejected(self):
        with pytest.raises(ConfigError, match="preset regime"):
            load_sweep_plan(
                overrides=[
                    "regime.tag=custom",
                    "regime.alpha=0.01",
                    "regime.gamma=0.05",
                ]
            )

    def test_plan_mapping_round_trip(self):
        plan = load_sweep_plan(overrides=["sweep.eps_values=[0.2,0.1,0.05]"])
        again = SweepPlan.from_mapping(plan.to_mapping())
        assert again == plan
