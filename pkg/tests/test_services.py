"""
Tests for service layer.
"""

import json
from pathlib import Path
from unittest.mock import patch

import pytest

from prunedjulia.exceptions import ValidationFailure
from prunedjulia.models import BoundaryMapSpec, MapSpec
from prunedjulia.services import AnalysisService, default_intervals, load_spec, spec_kind

MAPS_DIR = Path(__file__).resolve().parent.parent / "maps"


@pytest.fixture
def service():
    """Create an AnalysisService instance."""
    return AnalysisService()


def test_load_spec_from_file(map_file):
    """Test loading a spec from a JSON file."""
    spec = load_spec(map_file({"coeffs": [-0.2, 0.0, 1.2]}), MapSpec)
    assert spec.coeffs == [-0.2, 0.0, 1.2]
    assert spec.a == 0.5


def test_load_spec_inline():
    """Test loading an inline JSON spec."""
    spec = load_spec('{"coeffs": [0, 0, 0, 1], "a": 0.3}', MapSpec)
    assert spec.a == pytest.approx(0.3)


@pytest.mark.parametrize(
    "source",
    ["does/not/exist.json", "{not json", '{"coeffs": [1.0]}', '{"coeffs": [0, 1], "a": -1}'],
)
def test_load_spec_invalid(source):
    """Test that unreadable or invalid specs are validation failures."""
    with pytest.raises(ValidationFailure) as exc_info:
        load_spec(source, MapSpec)
    assert exc_info.value.exit_code == 2


def test_spec_kind(maps_dir):
    """Test dispatch on the presence of coefficients."""
    assert spec_kind(str(maps_dir / "cheb2.json")) == "interval"
    assert spec_kind(str(maps_dir / "jumps2.json")) == "circle"
    assert spec_kind(str(maps_dir / "wobble.json")) == "boundary"
    assert spec_kind("{}") == "boundary"
    with pytest.raises(ValidationFailure):
        spec_kind("[1, 2]")


def test_default_intervals(quad_map, cheb3):
    """Test small intervals around the distinct critical values."""
    assert default_intervals(quad_map) == [pytest.approx((-0.21, -0.19))]
    assert len(default_intervals(cheb3)) == 2


def test_classify(service, quad_map):
    """Test the classification report and its Koenigs chart."""
    report = service.classify(quad_map, max_period=4)
    assert report.map.nu == 1
    assert len(report.charts) == 1
    assert report.charts[0].multiplier == pytest.approx(-0.4)


def test_classify_skips_superattracting(service, cube):
    """Test that super-attracting cycles get no chart."""
    report = service.classify(cube, max_period=2)
    assert report.charts == []


def test_psi(service, quad_map):
    """Test the psi report."""
    report = service.psi(quad_map, max_period=4)
    assert report.psi_H.values == pytest.approx([-0.4])
    assert report.psi_T.dimension == 0


def test_dpsi(service, quad_map):
    """Test analytic and numeric derivatives agree."""
    report = service.dpsi(quad_map, [1.0, 0.0, -1.0], max_period=4)
    assert report.analytic.values == pytest.approx([2.0])
    assert report.max_rel_err < 1e-6


def test_prune_with_basins(service, quad_map, quad_classification):
    """Test that basin covers reuse the classification."""
    with patch.object(service, "classification", return_value=quad_classification) as mocked:
        tree = service.prune(quad_map, [(-0.21, -0.19)], depth=1, basins=True)
    mocked.assert_called_once()
    assert tree.small_basins is True
    assert tree.summary().basins[0].radius == pytest.approx(0.1)


def test_render(service, cube):
    """Test that the service renders SVG."""
    svg = service.render(service.prune(cube, [(-0.001, 0.001)], depth=1))
    assert svg.startswith("<svg")


def test_semiconj_with_jumps(service, jumps2):
    """Test the pruning set of a map with jumps."""
    g = service.load_circle(json.dumps(jumps2))[0]
    report = service.semiconj(g)
    assert [angle.exact for angle in report.Q] == ["0/1"]
    assert report.depth >= 1


def test_markov(service, doubling):
    """Test the Markov report."""
    g, _ = service.load_circle(json.dumps(doubling))
    report = service.markov(g, [[0.4, 0.6]])
    assert report.transitions == [0, 1, 0, 1, 2]
    assert report.expansion_constant == pytest.approx(2.0)


def test_barycentric(service):
    """Test evaluation on several points."""
    reports = service.barycentric(BoundaryMapSpec(rotation=0.25), [0.3 + 0.2j, 0.0])
    assert reports[0].w == pytest.approx([-0.2, 0.3], abs=1e-10)
    assert reports[1].w == pytest.approx([0.0, 0.0], abs=1e-10)


def test_check_not_applicable(service, maps_dir):
    """Test that a critical value on the boundary skips the tree suite."""
    report = service.check(str(maps_dir / "cheb2.json"))
    assert report.passed
    tree = next(check for check in report.checks if check.name == "tree")
    assert tree.detail.startswith("not applicable")


def test_check_cube(service, maps_dir):
    """Test the full suite on x^3."""
    report = service.check(str(maps_dir / "cube.json"), depth=2)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert "tree.endpoints" in {check.name for check in report.checks}


@pytest.mark.parametrize("name", ["doubling.json", "jumps2.json"])
def test_check_circle(service, maps_dir, name):
    """Test the circle suite on the shipped circle maps."""
    report = service.check(str(maps_dir / name))
    assert report.passed, [c for c in report.checks if not c.passed]
    assert [check.name for check in report.checks] == [
        "circle.periodicity",
        "circle.monotone",
        "circle.invariant",
        "lambda.nesting",
    ]


@pytest.mark.parametrize("name", sorted(path.name for path in MAPS_DIR.glob("*.json")))
def test_check_every_shipped_map(service, maps_dir, name):
    """Test that the invariant suite passes on every map in maps/."""
    report = service.check(str(maps_dir / name))
    assert report.passed, [c for c in report.checks if not c.passed]


def test_check_boundary_map(service, maps_dir):
    """Test the boundary suite on the shipped wobble."""
    report = service.check(str(maps_dir / "wobble.json"))
    assert report.target == "boundary map"
    assert [check.name for check in report.checks] == ["boundary.monotone", "boundary.extension"]


def test_check_folding_boundary_map(service):
    """Test that a folding boundary map fails the suite without raising."""
    report = service.check('{"sin": [0.5]}')
    assert not report.passed
    assert [check.name for check in report.checks] == ["boundary.monotone"]
