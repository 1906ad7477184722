"""Pytest configuration and fixtures."""
from pathlib import Path
from typing import Callable

import pytest

from services.space_service import SpaceBundle, SpaceService
from softspace.sampling import SamplePlan
from softspace.soft_reals import ParamSet

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixture_path() -> Callable[[str], Path]:
    """Path of a bundled descriptor fixture."""
    def _path(name: str) -> Path:
        return FIXTURES_DIR / name
    return _path


@pytest.fixture
def load_fixture() -> Callable[[str], SpaceBundle]:
    """Load a bundled descriptor fixture by file name."""
    def _load(name: str) -> SpaceBundle:
        return SpaceService.load(FIXTURES_DIR / name)
    return _load


@pytest.fixture
def plan() -> SamplePlan:
    """Small seeded sampling plan."""
    return SamplePlan.default(samples=300, seed=42)


@pytest.fixture
def two_labels() -> ParamSet:
    return ParamSet.of(["e1", "e2"])


@pytest.fixture
def triangle(load_fixture) -> SpaceBundle:
    """a, b, c with d(a, b) = d(b, c) = 1 and d(a, c) = 3 under one label."""
    return load_fixture("tabulated_triangle.json")


@pytest.fixture
def square(load_fixture) -> SpaceBundle:
    """Two elements under two labels, every distinct pair at (1, 2)."""
    return load_fixture("tabulated_square.json")
