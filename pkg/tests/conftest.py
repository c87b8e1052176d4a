import pytest

from qsspsim.harness import bundled_data_path


@pytest.fixture
def bundled():
    """Resolve a file shipped in the package data directory."""
    return bundled_data_path
