"""DODAG snapshots: preferred-parent tree plus DAO-parent sets."""

from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from .protocol import ROOT_RANK, select_dao_parents, select_preferred_parent
from .topology import ROOT, Topology


@dataclass(frozen=True)
class Dodag:
    """Immutable view of who routes through whom.

    ``preferred`` maps every joined non-root node to its preferred parent and
    ``dao_parents`` to its ordered DAO-parent list (preferred first).
    """

    rank: dict[int, int]
    preferred: dict[int, int]
    dao_parents: dict[int, list[int]] = field(default_factory=dict)

    @cached_property
    def tree(self) -> nx.DiGraph:
        """Preferred-parent tree with edges parent -> child."""
        tree = nx.DiGraph()
        tree.add_nodes_from(self.rank)
        tree.add_edges_from((parent, child) for child, parent in self.preferred.items())
        return tree

    def sub_dodag(self, node: int) -> set[int]:
        """``node`` and all of its descendants in the preferred-parent tree."""
        return {node} | nx.descendants(self.tree, node)

    def descendant_count(self, node: int) -> int:
        """Number of strict descendants of ``node``."""
        return len(nx.descendants(self.tree, node))

    def depth(self, node: int) -> int:
        """Hop distance from the root along preferred parents."""
        hops = 0
        while node != ROOT:
            node = self.preferred[node]
            hops += 1
        return hops

    def is_tree(self) -> bool:
        """Whether the preferred-parent graph is a tree rooted at node 0."""
        return nx.is_arborescence(self.tree) if len(self.tree) > 1 else True


def build_dodag(topology: Topology, k: int = 0, rank_step: int = 256) -> Dodag:
    """Build the DODAG a lossless network converges to.

    Ranks follow hop counts from the root; each node picks parents among its
    neighbours one hop closer, with the same selection rules the node state
    machine applies.
    """
    hops = nx.single_source_shortest_path_length(topology.graph, ROOT)
    rank = {ROOT: ROOT_RANK}
    for node in sorted(hops, key=lambda n: (hops[n], n)):
        if node != ROOT:
            rank[node] = ROOT_RANK + hops[node] * rank_step

    preferred: dict[int, int] = {}
    dao_parents: dict[int, list[int]] = {}
    for node in rank:
        if node == ROOT:
            continue
        candidates = {
            n: rank[n] for n in topology.neighbors(node) if n in rank and rank[n] < rank[node]
        }
        parent = select_preferred_parent(candidates)
        preferred[node] = parent
        dao_parents[node] = select_dao_parents(candidates, parent, k)

    return Dodag(rank=rank, preferred=preferred, dao_parents=dao_parents)
