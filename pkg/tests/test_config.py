import numpy as np
import pytest

from swarmsvm import ConfigError, DataError, RunReport, format_float, format_record
from swarmsvm.config import ConfigView, parse_config_text, read_config


def test_parse_basic_lines():
    text = "a = 1\n# comment\n\nb = two words\nc=3.5\n"
    assert parse_config_text(text) == {"a": "1", "b": "two words", "c": "3.5"}


def test_parse_rejects_duplicate_keys():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("a = 1\na = 2\n")


def test_parse_rejects_garbage_line():
    with pytest.raises(ConfigError):
        parse_config_text("just some words\n")


def test_parse_rejects_empty_key():
    with pytest.raises(ConfigError):
        parse_config_text("= 5\n")


def test_read_config_missing_file(tmp_path):
    with pytest.raises(DataError):
        read_config(tmp_path / "nope.cfg")


def test_read_config_roundtrip(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("seed = 4\nvariant = apso_single_step\n")
    view = ConfigView(read_config(p), source=str(p))
    assert view.get_int("seed") == 4
    assert view.get_str("variant") == "apso_single_step"


def test_view_typed_getters():
    view = ConfigView(
        {"i": "7", "f": "2.5", "b1": "true", "b0": "no", "lst": "1.0, 2.5,3"},
        source="inline",
    )
    assert view.get_int("i") == 7
    assert view.get_float("f") == 2.5
    assert view.get_bool("b1") is True
    assert view.get_bool("b0") is False
    assert view.get_floats("lst") == [1.0, 2.5, 3.0]


def test_view_required_key_missing():
    view = ConfigView({}, source="inline")
    with pytest.raises(ConfigError, match="missing"):
        view.get_int("n")


def test_view_default_used_when_absent():
    view = ConfigView({}, source="inline")
    assert view.get_int("n", 12) == 12


def test_view_bad_int():
    view = ConfigView({"n": "abc"}, source="inline")
    with pytest.raises(ConfigError, match="n"):
        view.get_int("n")


def test_view_bad_choice_names_options():
    view = ConfigView({"k": "bogus"}, source="inline")
    with pytest.raises(ConfigError, match="one of"):
        view.get_choice("k", ("a", "b"), "a")


def test_view_unused_keys():
    view = ConfigView({"a": "1", "b": "2"}, source="inline")
    view.get_int("a")
    assert view.unused_keys() == ["b"]


def test_format_float_roundtrips_exactly():
    values = [0.1, 1 / 3, 1e-300, 12345.6789, float(np.float64(np.pi))]
    for v in values:
        assert float(format_float(v)) == v


def test_format_record_order_and_shape():
    line = format_record({"x": 1, "label": "ab", "z": 0.5})
    assert line == "x=1 label=ab z=0.5"


def test_run_report_record_keys():
    rep = RunReport(
        best_position=np.array([1.0, 2.0]),
        best_fitness=0.25,
        evaluations=100,
        elapsed_ms=12.5,
        seed=7,
    )
    rec = rep.to_record()
    assert list(rec) == [
        "best_fitness",
        "best_position",
        "evaluations",
        "elapsed_ms",
        "seed",
    ]
    line = rep.record_line()
    assert "best_fitness=0.25" in line
    assert "seed=7" in line


def test_run_report_optional_deviation():
    rep = RunReport(
        best_position=np.array([0.0]),
        best_fitness=1.0,
        evaluations=1,
        elapsed_ms=0.0,
        seed=0,
        deviation=0.125,
    )
    assert rep.to_record()["deviation"] == "0.125"
