from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def corpus():
    """Loader for bundled complexes by name."""
    from coincide.formats import parse_complex, resolve_path

    cache = {}

    def load(name: str):
        if name not in cache:
            cache[name] = parse_complex(resolve_path(f"corpus/{name}", "complex"))
        return cache[name]

    return load
