"""
Unit tests for run configuration parsing
"""

import math

import pytest

from ctrwexit.config import (
    CONFIG_ENV_VAR,
    RunConfig,
    default_config_path,
    load_config,
    parse_config_text,
    parse_grid,
    parse_times,
    parse_value,
)
from ctrwexit.continuum import ContinuumSpec
from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    MixtureJumps,
    OneSidedStableJumps,
    TabulatedWaiting,
)
from ctrwexit.exceptions import ConfigError
from ctrwexit.sentinels import STEADY_STATE


class TestParsing:
    """Test parsing of individual values"""

    def test_grid_range(self):
        """Should expand start:stop:count inclusively"""
        assert parse_grid("0:1:5") == (0.0, 0.25, 0.5, 0.75, 1.0)

    def test_grid_list(self):
        """Should accept a comma list"""
        assert parse_grid("0.1, 0.5,0.9") == (0.1, 0.5, 0.9)

    def test_grid_rejects_bad_range(self):
        """Should require three range fields"""
        with pytest.raises(ValueError):
            parse_grid("0:1")

    def test_times_with_steady_state(self):
        """Should map inf to the steady-state sentinel"""
        assert parse_times("0, 0.4, 10, inf") == (0.0, 0.4, 10.0, STEADY_STATE)

    def test_times_reject_negative(self):
        """Should reject negative observation times"""
        with pytest.raises(ValueError):
            parse_times("-1")

    def test_value_booleans(self):
        """Should parse common boolean spellings"""
        assert parse_value("ruin_jumps", "yes") is True
        assert parse_value("ruin_jumps", "off") is False

    def test_unknown_key(self):
        """Should name the unknown key"""
        with pytest.raises(ConfigError) as exc_info:
            parse_value("speed", "1", line_number=3)

        assert exc_info.value.key == "speed"
        assert exc_info.value.line_number == 3

    def test_bad_value(self):
        """Should raise ConfigError for unparseable values"""
        with pytest.raises(ConfigError) as exc_info:
            parse_value("paths", "many")
        assert exc_info.value.key == "paths"


class TestConfigText:
    """Test key=value configuration texts"""

    def test_defaults(self):
        """Should default to the favorable curves of the published figures"""
        config = RunConfig()

        assert config.regime == "favorable"
        assert config.drift == 0.1
        assert config.boundary == 1.0
        assert len(config.x_grid) == 11
        assert config.r_list == (0.0,)

    def test_overrides_and_comments(self):
        """Should skip comments and blank lines"""
        text = "# adverse curve\n\nregime = adverse\njump_rate=4\nr_list=0,inf\n"
        config = parse_config_text(text)

        assert config.regime == "adverse"
        assert config.jump_rate == 4.0
        assert config.r_list == (0.0, STEADY_STATE)

    def test_round_trip(self):
        """Should read back what to_text writes"""
        config = RunConfig(
            regime="twosided",
            negative_probability=0.3,
            ruin_jumps=True,
            r_list=(0.4, STEADY_STATE),
            truncation=50.0,
        )

        assert parse_config_text(config.to_text()) == config

    def test_missing_equals_reports_line(self):
        """Should report the offending line number"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config_text("regime=adverse\ndrift 0.1\n")
        assert exc_info.value.line_number == 2

    def test_invalid_choice(self):
        """Should reject unknown regimes"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config_text("regime=sideways")
        assert exc_info.value.key == "regime"

    def test_tabulated_needs_table(self):
        """Should require a table path for tabulated laws"""
        with pytest.raises(ConfigError):
            RunConfig(waiting="tabulated")

    def test_replace_ignores_none(self):
        """Should keep fields whose override is None"""
        config = RunConfig().replace(drift=None, boundary=2.0)

        assert config.drift == 0.1
        assert config.boundary == 2.0


class TestLoadConfig:
    """Test loading configuration files"""

    def test_load_file(self, tmp_path):
        """Should parse a file on disk"""
        path = tmp_path / "run.cfg"
        path.write_text("regime=continuum\ncontinuum_k=2\n")

        config = load_config(path)
        assert config.regime == "continuum"
        assert config.continuum_k == 2.0

    def test_missing_file(self, tmp_path):
        """Should raise ConfigError for a missing file"""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.cfg")

    def test_environment_path(self, monkeypatch):
        """Should read the config path from the environment"""
        monkeypatch.setenv(CONFIG_ENV_VAR, "/tmp/run.cfg")
        assert default_config_path() == "/tmp/run.cfg"

        monkeypatch.delenv(CONFIG_ENV_VAR)
        assert default_config_path() is None


class TestBuildSpec:
    """Test construction of the process models"""

    def test_favorable(self):
        """Should build Erlang waiting and upward exponential jumps"""
        spec = RunConfig().build_spec()

        assert isinstance(spec.waiting, ErlangWaiting)
        assert isinstance(spec.jumps, ExponentialJumps)
        assert spec.jumps.sign == 1

    def test_adverse(self):
        """Should flip the jump sign"""
        spec = RunConfig(regime="adverse", jump_rate=4.0).build_spec()

        assert spec.jumps.sign == -1
        assert spec.jumps.rate == 4.0

    def test_twosided_ruin_jumps(self):
        """Should offset the negative component by b"""
        spec = RunConfig(
            regime="twosided", negative_probability=0.5, ruin_jumps=True, boundary=2.0
        ).build_spec()

        assert isinstance(spec.jumps, MixtureJumps)
        assert spec.jumps.negative.offset == 2.0

    def test_stable_jumps(self):
        """Should build one-sided stable jumps of the given scale"""
        spec = RunConfig(jumps="stable", jump_scale=0.5).build_spec()

        assert isinstance(spec.jumps, OneSidedStableJumps)

    def test_continuum(self):
        """Should build the continuum parameters"""
        spec = RunConfig(regime="continuum", drift=1.0).build_spec()

        assert isinstance(spec, ContinuumSpec)
        assert spec.k_limit == 1.0

    def test_tabulated_waiting(self, waiting_table_path):
        """Should load a tabulated density"""
        spec = RunConfig(waiting="tabulated", waiting_table=str(waiting_table_path)).build_spec()

        assert isinstance(spec.waiting, TabulatedWaiting)
        assert spec.waiting.mean == pytest.approx(1.0)

    def test_rejected_model(self):
        """Should wrap model errors as ConfigError"""
        with pytest.raises(ConfigError):
            RunConfig(drift=-1.0, regime="continuum").build_spec()

    def test_infinite_boundary(self):
        """Should accept b = inf for ruin runs"""
        config = parse_config_text("regime=adverse\nboundary=inf\n")

        assert math.isinf(config.build_spec().boundary)
