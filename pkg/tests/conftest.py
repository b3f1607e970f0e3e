"""Shared fixtures: hand-placed layouts and lossless scenario configs."""

import pytest

from src.config import ScenarioConfig, merge
from src.simulator.topology import Topology

# Root, one child, then a full binary tree of depth three below it.
# Same-level siblings (4-5, 6-7) hear each other but never become parents.
BINARY_TREE = {
    0: (200.0, 0.0),
    1: (200.0, 30.0),
    2: (170.0, 50.0),
    3: (230.0, 50.0),
    4: (140.0, 70.0),
    5: (170.0, 85.0),
    6: (230.0, 85.0),
    7: (260.0, 70.0),
}

# Node 3 hears both root children; it prefers 1 and keeps 2 as a spare DAO parent.
WITNESS = {
    0: (100.0, 0.0),
    1: (75.0, 25.0),
    2: (125.0, 25.0),
    3: (100.0, 50.0),
    4: (75.0, 60.0),
}

# Node 5 prefers 3 (under root child 2) and keeps 4 (under root child 1) as a spare DAO parent.
CROSS_SUBTREE = {
    0: (100.0, 0.0),
    1: (70.0, 20.0),
    2: (130.0, 20.0),
    3: (130.0, 55.0),
    4: (70.0, 55.0),
    5: (100.0, 75.0),
}

CHAIN = {i: (0.0, 30.0 * i) for i in range(5)}

STAR = {
    0: (50.0, 50.0),
    1: (80.0, 50.0),
    2: (20.0, 50.0),
    3: (50.0, 80.0),
    4: (50.0, 20.0),
}


def make_topology(positions, tx_range=40.0, interference_range=80.0, area_side=600.0) -> Topology:
    return Topology(
        positions=dict(positions), area_side=area_side, tx_range=tx_range, interference_range=interference_range
    )


def make_config(n_nodes: int, **sections) -> ScenarioConfig:
    """Lossless, traffic-free scenario with one attack increment at t=100s."""
    data = {
        "simulation": {"duration_s": 200.0, "seed": 1},
        "topology": {"n_nodes": n_nodes},
        "traffic": {"enabled": False},
        "mac": {"collisions": False, "link_success_probability": 1.0},
        "attacker": {"start_time_s": 100.0, "increment_period_s": 1000.0},
    }
    merge(data, sections)
    return ScenarioConfig(**data)


@pytest.fixture
def binary_tree() -> Topology:
    return make_topology(BINARY_TREE)


@pytest.fixture
def witness() -> Topology:
    return make_topology(WITNESS)


@pytest.fixture
def chain() -> Topology:
    return make_topology(CHAIN)


@pytest.fixture
def star() -> Topology:
    return make_topology(STAR)


@pytest.fixture
def cross_subtree() -> Topology:
    return make_topology(CROSS_SUBTREE)


@pytest.fixture
def config_factory():
    return make_config


@pytest.fixture
def topology_factory():
    return make_topology


@pytest.fixture
def layouts() -> dict:
    return {"binary_tree": BINARY_TREE, "witness": WITNESS, "chain": CHAIN, "star": STAR, "cross_subtree": CROSS_SUBTREE}
