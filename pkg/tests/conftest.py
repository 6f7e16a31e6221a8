from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def coffee_dataset_bytes() -> bytes:
    return (FIXTURES / "coffee_dataset.csv").read_bytes()


@pytest.fixture
def coffee_metadata_bytes() -> bytes:
    return (FIXTURES / "coffee_metadata.csv").read_bytes()
