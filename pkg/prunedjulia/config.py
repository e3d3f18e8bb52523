"""
Configuration management for the toolkit.

Tolerances, guards and defaults are loaded from environment variables
prefixed with ``PRUNE_`` (or a ``.env`` file) and may be overridden per run.
"""

from contextlib import contextmanager
from typing import Iterator

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Toolkit settings loaded from environment variables.

    Uses pydantic-settings for validation and type conversion.
    """

    # Report Configuration
    schema_version: str = "1.0"
    log_level: str = "WARNING"

    # Sampling Configuration
    seed: int = 0
    threads: int = 1

    # Interval Map Configuration
    tol_boundary: float = 1e-12
    tol_order: float = 1e-9
    tol_newton: float = 1e-14
    critical_cells: int = 10_000
    escape_radius: float = 1e8

    # Periodic Orbit Configuration
    orbit_cells: int = 100_000
    tol_orbit_residual: float = 1e-10
    tol_parabolic: float = 1e-8
    tol_superattracting: float = 1e-10
    degree_guard: int = 1_000_000
    default_max_period: int = 6
    max_period_guard: int = 12

    # Critical Orbit Configuration
    default_horizon: int = 2000
    tol_hit: float = 1e-9
    tol_attract: float = 1e-6
    tol_landing: float = 1e-12
    tol_multiplier_one: float = 1e-8
    basin_grid: int = 4096
    basin_bisections: int = 30

    # Koenigs Configuration
    koenigs_depth: int = 200
    koenigs_order: int = 12
    koenigs_local_radius: float = 1e-3
    tol_koenigs: float = 1e-12

    # Invariant Configuration
    continuation_radius: float = 0.1
    default_fd_step: float = 1e-5
    tol_vanishing: float = 1e-12
    tol_jacobian: float = 1e-10
    tol_telescoping: float = 1e-9

    # Pruned Tree Configuration
    arc_samples: int = 64
    max_depth: int = 12
    max_arcs: int = 200_000
    min_branch_step: float = 1e-6
    backward_depth: int = 8
    default_pruning_halfwidth: float = 0.01
    disc_samples: int = 256
    tol_branch: float = 1e-12
    tol_attach: float = 1e-7
    tol_endpoint: float = 1e-9
    default_depth: int = 6

    # Circle Map Configuration
    circle_grid: int = 4096
    semiconj_grid: int = 16_384
    semiconj_max_depth: int = 200
    tol_semiconj: float = 1e-10
    tol_conjugacy: float = 1e-6
    tol_snap: float = 1e-7
    snap_denominator: int = 65_536
    tol_arc: float = 1e-10
    tol_markov: float = 1e-8
    max_preperiod: int = 64
    expansion_samples: int = 4096
    expansion_threshold: float = 1.05
    max_expansion_iterate: int = 32
    default_extension_radius: float = 0.01

    # Barycentric Extension Configuration
    quadrature_points: int = 512
    tol_barycentric: float = 1e-10
    tol_quadrature: float = 1e-6

    class Config:
        """Pydantic configuration class."""
        env_file = ".env"
        env_prefix = "PRUNE_"
        case_sensitive = False


# Global settings instance
settings = Settings()


def tolerance_names() -> list[str]:
    """
    List the tolerance names accepted by ``--tol.<name>``.

    Returns:
        Field names with the ``tol_`` prefix stripped
    """
    return sorted(
        name[len("tol_"):] for name in Settings.model_fields if name.startswith("tol_")
    )


@contextmanager
def override_settings(**values) -> Iterator[Settings]:
    """
    Temporarily override fields of the global settings instance.

    Args:
        **values: Field names and their temporary values

    Yields:
        The global settings instance with the overrides applied

    Raises:
        KeyError: If a name is not a settings field
    """
    unknown = [name for name in values if name not in Settings.model_fields]
    if unknown:
        raise KeyError(f"Unknown settings: {', '.join(sorted(unknown))}")

    previous = {name: getattr(settings, name) for name in values}
    for name, value in values.items():
        setattr(settings, name, value)
    try:
        yield settings
    finally:
        for name, value in previous.items():
            setattr(settings, name, value)
