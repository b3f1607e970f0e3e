"""Tests for unit-disk layouts, generation and attacker choice."""

import pytest

from src.config import TopologyConfig
from src.models import AttackerSelection
from src.simulator.dodag import build_dodag
from src.simulator.topology import ROOT, Topology, TopologyError, from_text, generate, load, pick_attacker


class TestLinks:
    """Link and interference derivation"""

    def test_binary_tree_links(self, binary_tree):
        assert binary_tree.neighbors(0) == [1]
        assert binary_tree.neighbors(1) == [0, 2, 3]
        assert binary_tree.neighbors(2) == [1, 4, 5]
        assert binary_tree.neighbors(4) == [2, 5]

    def test_linked_is_symmetric_and_irreflexive(self, binary_tree):
        for a in binary_tree.nodes:
            assert not binary_tree.linked(a, a)
            for b in binary_tree.nodes:
                assert binary_tree.linked(a, b) == binary_tree.linked(b, a)

    def test_interferers_cover_neighbors(self, binary_tree):
        for node in binary_tree.nodes:
            assert set(binary_tree.neighbors(node)) <= binary_tree.interferers(node)
            assert node not in binary_tree.interferers(node)

    def test_interference_beyond_transmission_range(self, chain):
        # 60 m apart: no link, but close enough to interfere.
        assert not chain.linked(0, 2)
        assert 2 in chain.interferers(0)

    def test_unknown_node(self, chain):
        with pytest.raises(KeyError):
            chain.neighbors(42)

    def test_root_required(self):
        with pytest.raises(ValueError):
            Topology(positions={1: (0.0, 0.0), 2: (1.0, 0.0)})

    def test_tx_range_above_interference_range(self):
        with pytest.raises(ValueError):
            Topology(positions={0: (0.0, 0.0)}, tx_range=100.0, interference_range=50.0)

    @pytest.mark.parametrize("position", [(-1.0, 0.0), (0.0, -0.5), (151.0, 10.0), (10.0, 150.1)])
    def test_position_outside_area(self, position):
        with pytest.raises(ValueError, match="outside"):
            Topology(positions={0: (0.0, 0.0), 1: position}, area_side=150.0)

    def test_position_on_area_edge(self):
        topology = Topology(positions={0: (0.0, 0.0), 1: (150.0, 150.0)}, area_side=150.0)
        assert len(topology) == 2

    def test_connectivity_and_eccentricity(self, binary_tree, chain):
        assert binary_tree.is_connected()
        assert binary_tree.root_eccentricity() == 3
        assert chain.root_eccentricity() == 4

    def test_disconnected_layout(self):
        topology = Topology(positions={0: (0.0, 0.0), 1: (30.0, 0.0), 2: (500.0, 500.0)}, area_side=600.0)
        assert not topology.is_connected()


class TestGenerate:
    """Seeded random placement"""

    def test_deterministic(self):
        a = generate(20, 7)
        b = generate(20, 7)
        assert a.positions == b.positions

    def test_different_seeds_differ(self):
        assert generate(20, 1).positions != generate(20, 2).positions

    def test_connected_and_inside_area(self):
        params = TopologyConfig()
        topology = generate(30, 3, params)
        assert len(topology) == 30
        assert topology.is_connected()
        for x, y in topology.positions.values():
            assert 0.0 <= x <= params.area_side_m
            assert 0.0 <= y <= params.area_side_m

    def test_too_sparse(self):
        params = TopologyConfig(area_side_m=10_000.0, tx_range_m=1.0, interference_range_m=2.0, max_attempts=5)
        with pytest.raises(TopologyError):
            generate(10, 1, params)

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            generate(1, 1)


class TestTextFormat:
    """Plain-text layout tables"""

    def test_save_and_load(self, tmp_path, binary_tree):
        path = tmp_path / "tree.txt"
        binary_tree.save(path)
        loaded = load(path, TopologyConfig(area_side_m=600.0, tx_range_m=40.0, interference_range_m=80.0))
        assert loaded.nodes == binary_tree.nodes
        for node in loaded.nodes:
            assert loaded.neighbors(node) == binary_tree.neighbors(node)

    def test_comments_and_separators(self):
        topology = from_text("# layout\n\n0 0 0\n1,30,0\n2\t60\t0\n")
        assert topology.nodes == [0, 1, 2]
        assert topology.neighbors(1) == [0, 2]

    def test_malformed_line(self):
        with pytest.raises(ValueError, match="expected"):
            from_text("0 0 0\n1 30\n")

    def test_layout_larger_than_configured_area(self, tmp_path, binary_tree):
        path = tmp_path / "tree.txt"
        binary_tree.save(path)
        with pytest.raises(ValueError, match="outside"):
            load(path, TopologyConfig(area_side_m=150.0))

    def test_duplicate_node(self):
        with pytest.raises(ValueError, match="duplicate"):
            from_text("0 0 0\n1 30 0\n1 10 0\n")


class TestPickAttacker:
    """Root child as attacker"""

    def test_is_root_child(self):
        topology = generate(25, 4)
        dodag = build_dodag(topology)
        attacker = pick_attacker(topology, dodag, 4)
        assert attacker != ROOT
        assert dodag.preferred[attacker] == ROOT

    def test_deterministic(self):
        topology = generate(25, 4)
        dodag = build_dodag(topology)
        assert pick_attacker(topology, dodag, 9) == pick_attacker(topology, dodag, 9)

    def test_single_candidate(self, binary_tree):
        assert pick_attacker(binary_tree, build_dodag(binary_tree), 123) == 1

    def test_max_descendants(self, cross_subtree):
        assert pick_attacker(cross_subtree, build_dodag(cross_subtree), 1, AttackerSelection.MAX_DESCENDANTS) == 2

    @pytest.mark.parametrize("seed", [1, 2, 3, 4])
    def test_max_descendants_random_layout(self, seed):
        topology = generate(30, seed)
        dodag = build_dodag(topology)
        attacker = pick_attacker(topology, dodag, seed, AttackerSelection.MAX_DESCENDANTS)
        assert dodag.preferred[attacker] == ROOT
        children = [n for n, p in dodag.preferred.items() if p == ROOT]
        assert dodag.descendant_count(attacker) == max(dodag.descendant_count(n) for n in children)

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5, 6])
    def test_with_descendants(self, seed):
        topology = generate(20, seed)
        dodag = build_dodag(topology)
        attacker = pick_attacker(topology, dodag, seed, AttackerSelection.WITH_DESCENDANTS)
        assert dodag.preferred[attacker] == ROOT
        assert dodag.descendant_count(attacker) > 0

    def test_with_descendants_falls_back_to_any_child(self, star):
        attacker = pick_attacker(star, build_dodag(star), 5, AttackerSelection.WITH_DESCENDANTS)
        assert attacker in (1, 2, 3, 4)

    def test_random_is_the_default(self):
        topology = generate(25, 4)
        dodag = build_dodag(topology)
        assert pick_attacker(topology, dodag, 9) == pick_attacker(topology, dodag, 9, AttackerSelection.RANDOM)
