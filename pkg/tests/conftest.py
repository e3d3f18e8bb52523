"""
Pytest configuration and fixtures.

Provides the reference maps shared by the test modules.
"""

import json
from pathlib import Path

import pytest

from prunedjulia.orbits import classify_critical_orbits, find_periodic_orbits
from prunedjulia.polymap import critical_structure

MAPS_DIR = Path(__file__).resolve().parent.parent / "maps"


@pytest.fixture(scope="session")
def maps_dir() -> Path:
    """
    Directory holding the shipped map specs.

    Returns:
        Path to maps/
    """
    return MAPS_DIR


@pytest.fixture(scope="session")
def cheb2():
    """Chebyshev map 2x^2 - 1, critical value on the boundary."""
    return critical_structure([-1.0, 0.0, 2.0])


@pytest.fixture(scope="session")
def cheb3():
    """Chebyshev map 4x^3 - 3x with two critical points."""
    return critical_structure([0.0, -3.0, 0.0, 4.0])


@pytest.fixture(scope="session")
def cube():
    """The map x^3, with a periodic critical point of order three."""
    return critical_structure([0.0, 0.0, 0.0, 1.0])


@pytest.fixture(scope="session")
def quad_map():
    """
    F(x) = 1.2x^2 - 0.2, attracting fixed point -1/6 with multiplier -0.4.

    Returns:
        The interval map
    """
    return critical_structure([-0.2, 0.0, 1.2])


@pytest.fixture(scope="session")
def quad_classification(quad_map):
    """
    Periodic orbits and critical classification of ``quad_map``.

    Returns:
        Tuple (orbits, classification)
    """
    orbits = find_periodic_orbits(quad_map, 4)
    return orbits, classify_critical_orbits(quad_map, orbits)


@pytest.fixture(scope="session")
def cheb2_classification(cheb2):
    """Periodic orbits and critical classification of ``cheb2``."""
    orbits = find_periodic_orbits(cheb2, 3)
    return orbits, classify_critical_orbits(cheb2, orbits)


@pytest.fixture
def doubling():
    """Spec of angle doubling with Q_g = {0}."""
    return {"d": 2, "eps": 1, "Q": [0.0]}


@pytest.fixture
def minus_doubling():
    """Spec of x -> -x^2 on the circle: lift 2x + 1/2 with Q_g = {0, 1/2}."""
    return {"d": 2, "eps": -1, "Q": [0.5, 0.0]}


@pytest.fixture
def sine2():
    """Spec of 2x + 0.1 sin(2 pi x) with its period-two orbit marked."""
    return {"d": 2, "eps": 1, "s": {"sin": [0.1]}, "Q_period": 2}


@pytest.fixture
def jumps2():
    """Spec of degree two with jumps of size 0.3 at 1/4 and 3/4."""
    return {"d": 2, "eps": 1, "jumps": [[0.25, 0.3], [0.75, 0.3]], "Q": [0.0]}


@pytest.fixture
def map_file(tmp_path):
    """
    Write a spec to a temporary JSON file.

    Returns:
        Function taking a dict and returning the file path as a string
    """

    def write(spec: dict, name: str = "spec.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(spec))
        return str(path)

    return write
