"""
Tests for settings and shared helpers.
"""

import threading

import pytest

from prunedjulia.config import Settings, override_settings, settings, tolerance_names
from prunedjulia.exceptions import IntervalConstraint, ValidationFailure
from prunedjulia.utils import complex_pairs, parallel_map, parse_intervals, parse_points


def test_environment_prefix(monkeypatch):
    """Test that PRUNE_ variables configure new settings."""
    monkeypatch.setenv("PRUNE_MAX_DEPTH", "5")
    monkeypatch.setenv("PRUNE_TOL_SNAP", "1e-9")
    fresh = Settings()
    assert fresh.max_depth == 5
    assert fresh.tol_snap == pytest.approx(1e-9)


def test_override_restores():
    """Test that overrides are undone on exit."""
    before = settings.max_depth
    with override_settings(max_depth=3) as current:
        assert current.max_depth == 3
    assert settings.max_depth == before


def test_override_restores_on_error():
    """Test that overrides are undone when the body raises."""
    before = settings.tol_arc
    with pytest.raises(RuntimeError):
        with override_settings(tol_arc=1.0):
            raise RuntimeError("boom")
    assert settings.tol_arc == before


def test_override_unknown():
    """Test that unknown names are refused."""
    with pytest.raises(KeyError) as exc_info:
        with override_settings(not_a_setting=1):
            pass
    assert "not_a_setting" in str(exc_info.value)


def test_tolerance_names():
    """Test the names accepted by --tol.<name>."""
    names = tolerance_names()
    assert "snap" in names
    assert "barycentric" in names
    assert names == sorted(names)
    assert not any(name.startswith("tol_") for name in names)


def test_parse_intervals():
    """Test interval parsing."""
    assert parse_intervals("-0.21,-0.19; 0.3,0.4") == [(-0.21, -0.19), (0.3, 0.4)]
    assert parse_intervals("") == []


@pytest.mark.parametrize("text", ["0.1", "a,b", "0.2,0.1"])
def test_parse_intervals_invalid(text):
    """Test malformed intervals."""
    with pytest.raises(IntervalConstraint):
        parse_intervals(text)


def test_parse_points():
    """Test point parsing."""
    assert parse_points("0.1,0.2;-0.5,0") == [0.1 + 0.2j, -0.5 + 0j]
    with pytest.raises(ValidationFailure):
        parse_points("0.1")


def test_complex_pairs():
    """Test conversion to [re, im] pairs."""
    assert complex_pairs([1 + 2j, -0.5]) == [[1.0, 2.0], [-0.5, 0.0]]


def test_parallel_map_order():
    """Test that threaded results keep input order."""
    seen = set()

    def work(x):
        seen.add(threading.get_ident())
        return x * x

    assert parallel_map(work, range(20), threads=4) == [x * x for x in range(20)]
    assert parallel_map(work, [3], threads=4) == [9]
