import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gasketlab import examples
from gasketlab.geometry import topology_automaton

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sier():
    return examples.sierpinski()


@pytest.fixture(scope="session")
def h6():
    return examples.h6()


@pytest.fixture(scope="session")
def h6_prime():
    return examples.h6_prime()


@pytest.fixture(scope="session")
def g5():
    return examples.g5()


@pytest.fixture(scope="session")
def g5_prime():
    return examples.g5_prime()


@pytest.fixture(scope="session")
def pair_1235():
    return examples.block_pair_1235()


@pytest.fixture(scope="session")
def m_sier(sier):
    return topology_automaton(sier)


@pytest.fixture(scope="session")
def m_h6(h6):
    return topology_automaton(h6)


@pytest.fixture(scope="session")
def data_dir():
    return DATA
