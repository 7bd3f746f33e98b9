"""Tests for run configuration, presets and output files."""

import pandas as pd
import pytest

from odp.cli.output import build_meta, read_report, read_table, write_report, write_table
from odp.cli.run_config import RunConfig
from odp.core.config import solver_section
from odp.core.errors import ConfigurationError
from odp.core.store import LambdaStore
from odp.core.validation import parse_float_list


def test_defaults_validate():
    config = RunConfig.build()
    assert config.params.d == 2
    assert config.symmetry.first_degree == 2
    assert config.window is None


def test_lambda_alias():
    config = RunConfig.build(**{"lambda": 0.7})
    assert config.lam == 0.7
    assert "lambda" in config.model_dump(by_alias=True)


def test_invalid_values_raise_configuration_error():
    with pytest.raises(ConfigurationError, match=r"\(d\+2\)/\(d-2\)"):
        RunConfig.build(d=3, p=5.0)
    with pytest.raises(ConfigurationError, match="multiple of 4n"):
        RunConfig.build(n_theta=12)
    with pytest.raises(ConfigurationError, match="together"):
        RunConfig.build(lambda0=0.5)
    with pytest.raises(ConfigurationError, match="empty"):
        RunConfig.build(lambda0=0.9, lambda1=0.5)
    with pytest.raises(ConfigurationError):
        RunConfig.build(unknown_option=1)


def test_presets():
    quick = RunConfig.from_preset("quick")
    assert quick.preset == "quick"
    assert quick.k == solver_section("quick")["k"]
    assert RunConfig.from_preset("reference").n_r == solver_section("reference")["n_r"]
    with pytest.raises(ConfigurationError):
        RunConfig.from_preset("huge")


def test_merged_skips_none():
    base = RunConfig.build(k=0.1)
    merged = base.merged({"k": None, "n_r": 500, "lambda": 1.5})
    assert merged.k == 0.1
    assert merged.n_r == 500
    assert merged.lam == 1.5


def test_yaml_round_trip(tmp_path):
    """A saved configuration reloads to the same object and the same bytes."""
    config = RunConfig.build(k=0.1, **{"lambda": 0.8}, amplitudes=[1e-3, 3e-3], group="modes:2/1,4/1")
    path = config.save(str(tmp_path / "run.yaml"))
    loaded = RunConfig.load(path)
    assert loaded == config
    assert loaded.to_yaml() == open(path).read()


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        RunConfig.load(str(tmp_path / "missing.yaml"))


def test_table_header_round_trip(tmp_path):
    config = RunConfig.build(**{"lambda": 1.0})
    meta = build_meta(config, "radial", {"window": (0.5, 0.9), "note": None})
    df = pd.DataFrame({"r": [1.0, 2.0], "u": [0.0, 0.5]})
    path = write_table(df, str(tmp_path / "out" / "table.csv"), meta)
    table, header = read_table(path)
    pd.testing.assert_frame_equal(table, df)
    assert header["command"] == "radial"
    assert header["lambda"] == 1.0
    assert header["window"] == [0.5, 0.9]
    assert header["note"] is None
    assert header["group"] == "dihedral:2"


def test_report_round_trip(tmp_path):
    import numpy as np

    path = write_report({"value": np.float64(2.5), "items": np.arange(3)}, str(tmp_path / "r.json"), {"k": 0.1})
    data = read_report(path)
    assert data["meta"] == {"k": 0.1}
    assert data["value"] == 2.5
    assert data["items"] == [0, 1, 2]


def test_parse_float_list():
    assert parse_float_list("1e-3, 2e-3,4e-3") == [1e-3, 2e-3, 4e-3]
    with pytest.raises(ConfigurationError):
        parse_float_list("1e-3,abc")


def test_env_overrides(monkeypatch):
    from odp.core.config import load_config

    monkeypatch.setenv("ODP_THREADS", "3")
    monkeypatch.setenv("ODP_RUNS_DIR", "/tmp/odp-runs")
    monkeypatch.setenv("LOG_LEVEL", "debug")
    app = load_config()["app"]
    assert app["n_jobs"] == 3
    assert app["runs_dir"] == "/tmp/odp-runs"
    assert app["log_level"] == "DEBUG"


def test_bad_thread_count(monkeypatch):
    from odp.core.config import load_config

    monkeypatch.setenv("ODP_THREADS", "0")
    with pytest.raises(ConfigurationError, match="ODP_THREADS"):
        load_config()


def test_missing_config_dir(tmp_path):
    from odp.core.config import load_config

    with pytest.raises(ConfigurationError, match="not found"):
        load_config(tmp_path / "nowhere")


def test_setup_logging_writes_under_log_dir(tmp_path):
    import logging

    from odp.core.logging import setup_logging

    setup_logging(log_dir=tmp_path, level="warning")
    assert (tmp_path / "odp.log").exists()
    assert logging.getLogger("odp").level == logging.WARNING


def test_lambda_store_evicts_least_recently_used():
    store = LambdaStore(maxsize=2)
    store.put(1.0, "a")
    store.put(2.0, "b")
    assert store.get(1.0) == "a"
    store.put(4.0, "c")

    assert len(store) == 2
    assert 2.0 not in store
    assert list(store) == [1.0, 4.0]
    assert store.get(2.0) is None


def test_lambda_store_nearest_in_log_scale():
    store = LambdaStore()
    assert store.nearest(1.0) is None
    store.put(1.0, "a")
    store.put(10.0, "b")
    assert store.nearest(2.9) == 1.0
    assert store.nearest(3.5) == 10.0


def test_lambda_store_rejects_empty_size():
    with pytest.raises(ConfigurationError, match=">= 1"):
        LambdaStore(maxsize=0)
