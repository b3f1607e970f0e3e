"""Random node placement and unit-disk link/interference derivation."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Union

import networkx as nx
import numpy as np

from ..config import TopologyConfig
from ..models import AttackerSelection

if TYPE_CHECKING:
    from .dodag import Dodag

ROOT = 0


class TopologyError(RuntimeError):
    """No connected layout could be produced."""


@dataclass(frozen=True)
class Topology:
    """Static node layout under the unit-disk model."""

    positions: dict[int, tuple[float, float]]
    area_side: float = 150.0
    tx_range: float = 40.0
    interference_range: float = 80.0
    seed: Optional[int] = None
    graph: nx.Graph = field(init=False, repr=False, compare=False)
    _interferers: dict[int, frozenset[int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if ROOT not in self.positions:
            raise ValueError("Topology must contain the root (node 0)")
        if self.tx_range > self.interference_range:
            raise ValueError("tx_range must not exceed interference_range")
        for node, (x, y) in self.positions.items():
            if not (0.0 <= x <= self.area_side and 0.0 <= y <= self.area_side):
                raise ValueError(f"Node {node} at ({x}, {y}) is outside the {self.area_side}m deployment area")

        ids = sorted(self.positions)
        graph = nx.Graph()
        graph.add_nodes_from(ids)
        interferers: dict[int, set[int]] = {i: set() for i in ids}
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                d = self.distance(a, b)
                if d <= self.tx_range:
                    graph.add_edge(a, b)
                if d <= self.interference_range:
                    interferers[a].add(b)
                    interferers[b].add(a)

        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "_interferers", {k: frozenset(v) for k, v in interferers.items()})

    @property
    def nodes(self) -> list[int]:
        """Node ids in ascending order."""
        return sorted(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def _require(self, node: int) -> None:
        if node not in self.positions:
            raise KeyError(f"Unknown node {node}")

    def distance(self, a: int, b: int) -> float:
        """Euclidean distance between two nodes (m)."""
        self._require(a)
        self._require(b)
        (xa, ya), (xb, yb) = self.positions[a], self.positions[b]
        return math.hypot(xa - xb, ya - yb)

    def linked(self, a: int, b: int) -> bool:
        """Whether two distinct nodes are within transmission range."""
        self._require(a)
        self._require(b)
        if a == b:
            return False
        return self.graph.has_edge(a, b)

    def neighbors(self, a: int) -> list[int]:
        """Linked neighbours of a node, ascending."""
        self._require(a)
        return sorted(self.graph.neighbors(a))

    def interferers(self, a: int) -> frozenset[int]:
        """Nodes within interference range of ``a``, excluding ``a``."""
        self._require(a)
        return self._interferers[a]

    def is_connected(self) -> bool:
        """Whether every node can reach the root over transmission links."""
        return nx.is_connected(self.graph)

    def root_eccentricity(self) -> int:
        """Largest hop distance from the root."""
        return max(nx.single_source_shortest_path_length(self.graph, ROOT).values())

    def to_text(self) -> str:
        """Export as a plain-text table, one ``id x y`` line per node."""
        lines = [
            "# id\tx_m\ty_m",
            f"# area_side={self.area_side} tx_range={self.tx_range} "
            f"interference_range={self.interference_range} seed={self.seed}",
        ]
        for node in self.nodes:
            x, y = self.positions[node]
            lines.append(f"{node}\t{x:.6f}\t{y:.6f}")
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, Path]) -> None:
        """Write the plain-text table to ``path``."""
        Path(path).write_text(self.to_text(), encoding="utf-8")


def from_text(
    text: str,
    area_side: float = 150.0,
    tx_range: float = 40.0,
    interference_range: float = 80.0,
) -> Topology:
    """Parse a plain-text table produced by :meth:`Topology.to_text`.

    Blank lines and ``#`` comments are ignored; fields may be separated by
    tabs, spaces or commas.
    """
    positions: dict[int, tuple[float, float]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise ValueError(f"Line {lineno}: expected 'id x y', got {line!r}")
        node = int(parts[0])
        if node in positions:
            raise ValueError(f"Line {lineno}: duplicate node {node}")
        positions[node] = (float(parts[1]), float(parts[2]))

    return Topology(
        positions=positions,
        area_side=area_side,
        tx_range=tx_range,
        interference_range=interference_range,
    )


def load(path: Union[str, Path], params: Optional[TopologyConfig] = None) -> Topology:
    """Load a topology table from disk with the radio ranges of ``params``."""
    params = params or TopologyConfig()
    return from_text(
        Path(path).read_text(encoding="utf-8"),
        area_side=params.area_side_m,
        tx_range=params.tx_range_m,
        interference_range=params.interference_range_m,
    )


def generate(n: int, seed: int, params: Optional[TopologyConfig] = None) -> Topology:
    """Place ``n`` nodes uniformly at random until the layout is connected.

    Args:
        n: Number of nodes, root (node 0) included.
        seed: Seed of the layout generator.
        params: Area side, ranges and retry budget.

    Returns:
        A connected Topology.

    Raises:
        TopologyError: If no connected layout is found within the budget.
    """
    params = params or TopologyConfig()
    if n < 2:
        raise ValueError(f"Need at least 2 nodes, got {n}")

    rng = np.random.default_rng(seed)
    for _ in range(params.max_attempts):
        coords = rng.uniform(0.0, params.area_side_m, size=(n, 2))
        topology = Topology(
            positions={i: (float(coords[i, 0]), float(coords[i, 1])) for i in range(n)},
            area_side=params.area_side_m,
            tx_range=params.tx_range_m,
            interference_range=params.interference_range_m,
            seed=seed,
        )
        if topology.is_connected():
            return topology

    raise TopologyError(
        f"No connected {n}-node layout after {params.max_attempts} attempts "
        f"(area {params.area_side_m}m, range {params.tx_range_m}m); parameters too sparse"
    )


def pick_attacker(
    topology: Topology,
    dodag: "Dodag",
    seed: int,
    selection: AttackerSelection = AttackerSelection.RANDOM,
) -> int:
    """Pick a direct child of the root as the attacker.

    ``RANDOM`` draws uniformly among the root's children, ``WITH_DESCENDANTS``
    among those with at least one descendant, and ``MAX_DESCENDANTS`` takes
    the child with the largest sub-DODAG (lowest id on ties).
    """
    candidates = sorted(node for node, parent in dodag.preferred.items() if parent == ROOT)
    if not candidates:
        candidates = [n for n in topology.neighbors(ROOT)]
    if not candidates:
        raise ValueError("The root has no neighbours to pick an attacker from")

    if selection == AttackerSelection.MAX_DESCENDANTS:
        return max(candidates, key=lambda n: (_descendants(dodag, n), -n))
    if selection == AttackerSelection.WITH_DESCENDANTS:
        candidates = [n for n in candidates if _descendants(dodag, n) > 0] or candidates

    rng = np.random.default_rng(seed)
    return int(candidates[int(rng.integers(len(candidates)))])


def _descendants(dodag: "Dodag", node: int) -> int:
    return dodag.descendant_count(node) if node in dodag.rank else 0

