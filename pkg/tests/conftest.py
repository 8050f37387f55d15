import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from whysched.catalog import load_catalog
from whysched.encoder import encode
from whysched.resources import sample_catalog_path
from whysched.scheduler import generate_schedule


@pytest.fixture(scope="session")
def sample_catalog():
    return load_catalog(sample_catalog_path())


@pytest.fixture(scope="session")
def sample_kb(sample_catalog):
    """Shared KB; safe for assumption-based solving, not for blocking clauses."""
    return encode(sample_catalog)


@pytest.fixture(scope="session")
def sample_schedule(sample_kb):
    return generate_schedule(sample_kb)


@pytest.fixture()
def fresh_kb(sample_catalog):
    return encode(sample_catalog)
