import numpy as np
import pytest

from grover_ite_lab.search_core import SearchInstance


def family(max_n=8):
    """Instances spanning n and the M classes {1, N/4, N/2, N-1}."""
    out = []
    for n in range(2, max_n + 1):
        big_n = 1 << n
        for m in sorted({1, big_n // 4, big_n // 2, big_n - 1}):
            if 1 <= m <= big_n - 1:
                out.append(SearchInstance(n, tuple(range(m))))
    return out


@pytest.fixture(scope="session")
def instance_family():
    return family()


@pytest.fixture(scope="session")
def small_family():
    return family(max_n=5)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
