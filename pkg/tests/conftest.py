import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mpiga.fixtures import builtin_geometry


@pytest.fixture(scope="session")
def topo1():
    return builtin_geometry("square-1")


@pytest.fixture(scope="session")
def topo6():
    return builtin_geometry("square-6-bilinear")


@pytest.fixture(scope="session")
def topo2c():
    return builtin_geometry("square-2-bicubic")


@pytest.fixture(scope="session")
def topo6c():
    return builtin_geometry("square-6-bicubic")
