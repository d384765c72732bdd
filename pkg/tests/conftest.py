import numpy as np
import pytest

from ginnacer.network import Network, random_network

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_net():
    # relu(2x - 1) followed by the identity
    return Network.from_arrays([[[2.0]], [[1.0]]], [[-1.0], [0.0]])


def random_nets(count, seed=0, max_layers=4, max_width=64, max_in=6, max_out=4):
    """Random networks of varied depth and width, deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    nets = []
    for _ in range(count):
        depth = int(rng.integers(1, max_layers + 1))
        sizes = [int(rng.integers(1, max_in + 1))]
        sizes += [int(rng.integers(2, max_width + 1)) for _ in range(depth)]
        sizes.append(int(rng.integers(1, max_out + 1)))
        nets.append(random_network(sizes, seed=int(rng.integers(2**31))))
    return nets
