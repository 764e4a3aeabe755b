# ruff: noqa: PLR2004
"""Unit tests for configuration settings and run options."""

from pathlib import Path

import pytest

from p2hsched.config.settings import Settings, get_settings
from p2hsched.exceptions.errors import ContractViolationError
from p2hsched.models.run_config import RunConfig, SolverConfig


class TestSettingsDefaults:
    """Tests for default settings values."""

    def test_default_solver(self):
        """Test that HiGHS through the appsi plugin is the default backend."""
        settings = Settings()
        assert settings.SOLVER == "appsi_highs"

    def test_default_limits(self):
        """Test default time limit, gap and thread count."""
        settings = Settings()
        assert settings.TIME_LIMIT == 1800.0
        assert settings.MIP_GAP == 0.01
        assert settings.THREADS == 1

    def test_default_strict_drcc(self):
        """Test that the chance-constraint regime check warns by default."""
        assert Settings().STRICT_DRCC is False

    def test_cache_path_from_fixture(self, tmp_path):
        """Test that the test environment redirects the cache."""
        assert Settings().CACHE_PATH == str(tmp_path / "cache")


class TestSettingsFromEnvironment:
    """Tests for loading settings from environment variables."""

    def test_solver_from_env(self, monkeypatch):
        """Test loading the backend from environment."""
        monkeypatch.setenv("P2HSCHED_SOLVER", "cbc")
        assert Settings().SOLVER == "cbc"

    def test_time_limit_from_env(self, monkeypatch):
        """Test loading the time limit from environment."""
        monkeypatch.setenv("P2HSCHED_TIME_LIMIT", "60")
        assert Settings().TIME_LIMIT == 60.0

    def test_threads_from_env(self, monkeypatch):
        """Test loading the thread count from environment."""
        monkeypatch.setenv("P2HSCHED_THREADS", "4")
        assert Settings().THREADS == 4

    @pytest.mark.parametrize(
        ("env_value", "expected"),
        [
            ("true", True),
            ("True", True),
            ("1", True),
            ("yes", True),
            ("false", False),
            ("0", False),
            ("no", False),
            ("", False),
        ],
    )
    def test_boolean_parsing(self, monkeypatch, env_value, expected):
        """Test that boolean environment variables are parsed correctly."""
        monkeypatch.setenv("P2HSCHED_STRICT_DRCC", env_value)
        assert Settings().STRICT_DRCC is expected


class TestSettingsFromConfigFile:
    """Tests for the TOML config file."""

    @pytest.fixture
    def config_file(self, tmp_path):
        """Config file with a ``[solver]`` section.

        Returns
        -------
        Path
            Path of the written file
        """
        path = tmp_path / "p2hsched.toml"
        path.write_text('[solver]\nsolver = "glpk"\ntime_limit = 120\nmip_gap = 0.05\n')
        return path

    def test_values_from_file(self, config_file):
        """Test that file values override the defaults."""
        settings = Settings(config_file)
        assert settings.SOLVER == "glpk"
        assert settings.TIME_LIMIT == 120.0
        assert settings.MIP_GAP == 0.05
        assert settings.THREADS == 1

    def test_environment_beats_file(self, config_file, monkeypatch):
        """Test that environment variables take priority over the file."""
        monkeypatch.setenv("P2HSCHED_TIME_LIMIT", "30")
        assert Settings(config_file).TIME_LIMIT == 30.0

    def test_file_from_environment(self, config_file, monkeypatch):
        """Test that P2HSCHED_CONFIG names the file."""
        monkeypatch.setenv("P2HSCHED_CONFIG", str(config_file))
        assert Settings().SOLVER == "glpk"

    def test_file_without_section(self, tmp_path):
        """Test that a file without a solver section keeps the defaults."""
        path = tmp_path / "other.toml"
        path.write_text("[other]\nsolver = 'cbc'\n")
        assert Settings(path).SOLVER == "appsi_highs"


class TestSettingsSingleton:
    """Tests for the cached settings accessor."""

    def test_get_settings_returns_same_instance(self):
        """Test that get_settings returns the same instance."""
        assert get_settings() is get_settings()

    def test_settings_cached(self, monkeypatch):
        """Test that settings are cached until the cache is cleared."""
        initial = get_settings().SOLVER
        monkeypatch.setenv("P2HSCHED_SOLVER", "cbc")
        assert get_settings().SOLVER == initial

        get_settings.cache_clear()
        assert get_settings().SOLVER == "cbc"


class TestRunConfig:
    """Tests for the options of one run."""

    def test_preset_source(self, tmp_path):
        """Test a run from a preset."""
        config = RunConfig(output_dir=tmp_path, preset="toy")
        assert config.solver == SolverConfig()
        assert config.use_cache

    def test_scenario_source(self, tmp_path):
        """Test a run from a scenario file."""
        config = RunConfig(output_dir=tmp_path / "out", scenario_path=Path("case.json"))
        assert config.preset is None

    @pytest.mark.parametrize(
        ("scenario_path", "preset"), [(None, None), (Path("case.json"), "toy")]
    )
    def test_exactly_one_source(self, tmp_path, scenario_path, preset):
        """Test that a run needs exactly one scenario source."""
        with pytest.raises(ContractViolationError, match="Exactly one"):
            RunConfig(output_dir=tmp_path, scenario_path=scenario_path, preset=preset)

    def test_output_is_a_file(self, tmp_path):
        """Test that an existing file is not accepted as output directory."""
        path = tmp_path / "taken"
        path.write_text("")
        with pytest.raises(ContractViolationError, match="not a directory"):
            RunConfig(output_dir=path, preset="toy")
