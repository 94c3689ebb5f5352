import numpy as np
import pytest

from netshrink.scenario import assign_scenario
from netshrink.synth import power_law_graph
from netshrink.topology import Link, Topology


@pytest.fixture
def triangle():
    links = [Link(0, 1, 10.0, 5.0), Link(1, 2, 10.0, 5.0), Link(0, 2, 10.0, 5.0)]
    return Topology(3, links)


@pytest.fixture
def star4():
    # K_{1,3}: node 0 is the center
    links = [Link(0, 1, 1.0, 1.0), Link(0, 2, 1.0, 1.0), Link(0, 3, 1.0, 1.0)]
    return Topology(4, links)


@pytest.fixture
def path3():
    return Topology(3, [Link(0, 1, 8.0, 1.0), Link(1, 2, 8.0, 1.0)])


@pytest.fixture(scope="session")
def medium_original():
    """Weighted scale-free original used by several structure tests."""
    t = power_law_graph(3000, 2.1, seed=42)
    return assign_scenario(t, 1, seed=1)


def random_simple_graph(rng: np.random.Generator, n_max: int = 50) -> Topology:
    """Small connected random graph for oracle comparisons."""
    while True:
        n = int(rng.integers(3, n_max + 1))
        p = min(1.0, float(rng.uniform(1.2, 3.0)) * 2.0 / n)
        links = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    links.append(Link(u, v))
        t = Topology(n, links)
        from netshrink.topology import is_connected
        if is_connected(t) and t.n_links >= n - 1:
            return t
