"""
配置加载测试
Configuration tests
"""

import pytest

from src.config import DEFAULT_CONFIG, Settings, coerce_env
from src.exceptions import InputError


def test_default_file_matches_defaults():
    assert DEFAULT_CONFIG.exists()
    s = Settings.load(use_env=False)
    assert s.solver.feas_tol == 1e-8
    assert s.oracle.box == (-10.0, 10.0)
    assert s.gap.abs_tol == 1e-4
    assert s.report.format == "json"


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "c.yml"
    p.write_text("oracle:\n  grid: 3\n", encoding="utf-8")
    with pytest.raises(InputError) as ei:
        Settings.load(p, use_env=False)
    assert ei.value.location == "oracle"


def test_invalid_value_rejected(tmp_path):
    p = tmp_path / "c.yml"
    p.write_text("oracle:\n  box: [1.0, -1.0]\n", encoding="utf-8")
    with pytest.raises(InputError):
        Settings.load(p, use_env=False)


def test_missing_config_file(tmp_path):
    with pytest.raises(InputError):
        Settings.load(tmp_path / "absent.yml")


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("SOSDUAL_MAX_ITERS", "17")
    monkeypatch.setenv("SOSDUAL_SEED", "5")
    monkeypatch.setenv("SOSDUAL_FORMAT", "text")
    monkeypatch.setenv("SOSDUAL_PRESOLVE", "no")
    s = Settings.load()
    assert s.solver.presolve is False
    assert s.solver.max_iter == 17
    assert s.oracle.seed == 5
    assert s.report.format == "text"


def test_cli_overrides():
    s = Settings.load(use_env=False).with_overrides(tol=1e-6, max_iters=50, box=(-2.0, 2.0), seed=9)
    assert (s.solver.feas_tol, s.solver.gap_tol, s.oracle.cp_tol) == (1e-6, 1e-6, 1e-6)
    assert s.solver.max_iter == 50
    assert s.oracle.box == (-2.0, 2.0)
    assert s.oracle.seed == 9


@pytest.mark.parametrize(
    "raw, current, expected",
    [
        ("YES", False, True),
        ("off", True, False),
        (" 42 ", 7, 42),
        ("1e-6", 1e-8, 1e-6),
        ("text", "json", "text"),
    ],
)
def test_coerce_env_follows_field_type(raw, current, expected):
    got = coerce_env("SOSDUAL_X", raw, current)
    assert got == expected
    assert type(got) is type(expected)


@pytest.mark.parametrize("key, raw", [("SOSDUAL_MAX_ITERS", "many"), ("SOSDUAL_PRESOLVE", "maybe"), ("SOSDUAL_CP_TOL", "tiny")])
def test_bad_env_value_rejected(monkeypatch, key, raw):
    monkeypatch.setenv(key, raw)
    with pytest.raises(InputError) as ei:
        Settings.load()
    assert ei.value.location == key


def test_empty_env_value_ignored(monkeypatch):
    monkeypatch.setenv("SOSDUAL_FEAS_TOL", "")
    assert Settings.load().solver.feas_tol == 1e-8
