"""Shared fixtures."""

from __future__ import annotations

import pytest

from titlematch.ingest import Dataset
from titlematch.synth import planted_dataset
from titlematch.textprep import UnitLexicon

from helpers import make_ablation_dataset


@pytest.fixture(scope="session")
def units() -> UnitLexicon:
    return UnitLexicon.default()


@pytest.fixture(scope="session")
def fixture_200() -> Dataset:
    """~200-listing planted corpus used across acceptance checks."""
    return planted_dataset(n_clusters=36, n_vendors=10, seed=42)


@pytest.fixture()
def ablation_dataset() -> Dataset:
    return make_ablation_dataset()
