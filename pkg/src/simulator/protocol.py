"""Per-node RPL state machine.

Handlers mutate the node's :class:`NodeState` in place and return the side
effects (transmissions, timers, trace records) for the event loop to carry out.
"""

from dataclasses import dataclass, field
from typing import Optional

from ..models import Mode, TraceKind
from . import detection
from .actions import (
    Action,
    DeliverData,
    DropDao,
    DropData,
    ForwardDao,
    ForwardData,
    RecordRoute,
    ResetTrickle,
    ScheduleDao,
    SendDio,
    StateChange,
)
from .messages import Dao, DataPacket, Dio
from .seq_counter import INITIAL_VALUE, increment, is_newer
from .topology import ROOT
from .trickle import TrickleState

ROOT_RANK = 256
DEFAULT_RANK_STEP = 256


class NoRouteError(LookupError):
    """The root holds no downward route to the destination."""


@dataclass(frozen=True)
class RplParams:
    """Protocol knobs shared by every node of a run."""

    mode: Mode = Mode.NON_STORING
    rank_step: int = DEFAULT_RANK_STEP
    k: int = 0
    detection: bool = False


@dataclass
class NeighborInfo:
    """Rank and DTSN last heard from a neighbour."""

    rank: int
    dtsn: int


@dataclass
class NodeState:
    """One node's RPL state."""

    id: int
    trickle: TrickleState
    rank: Optional[int] = None
    candidate_parents: dict[int, NeighborInfo] = field(default_factory=dict)
    heard: dict[int, NeighborInfo] = field(default_factory=dict)
    preferred_parent: Optional[int] = None
    dao_parents: list[int] = field(default_factory=list)
    dtsn: int = INITIAL_VALUE
    routing_table: dict[int, int] = field(default_factory=dict)
    source_routes: dict[int, Optional[int]] = field(default_factory=dict)
    dao_pending: bool = False
    dao_due_us: Optional[int] = None
    dao_trigger: bool = False

    @property
    def is_root(self) -> bool:
        return self.id == ROOT

    @property
    def joined(self) -> bool:
        return self.rank is not None

    @classmethod
    def root(cls, trickle: TrickleState) -> "NodeState":
        return cls(id=ROOT, trickle=trickle, rank=ROOT_RANK)

    def current_dio(self) -> Dio:
        return Dio(sender=self.id, rank=self.rank, dtsn=self.dtsn)


def compute_rank(parent_rank: int, rank_step: int = DEFAULT_RANK_STEP) -> int:
    """Hop-count objective: one rank step below the parent."""
    return parent_rank + rank_step


def select_preferred_parent(candidates: dict[int, int]) -> int:
    """Candidate with the lowest rank; ties go to the lowest node id.

    Args:
        candidates: Candidate id -> advertised rank. Must not be empty.
    """
    if not candidates:
        raise ValueError("No candidate parents")
    return min(candidates, key=lambda n: (candidates[n], n))


def select_dao_parents(candidates: dict[int, int], preferred: int, k: int) -> list[int]:
    """Preferred parent first, then up to ``k`` other lowest-rank candidates."""
    if preferred not in candidates:
        raise ValueError(f"Preferred parent {preferred} is not a candidate")
    others = sorted((n for n in candidates if n != preferred), key=lambda n: (candidates[n], n))
    return [preferred] + others[:max(k, 0)]


def _reselect_parents(s: NodeState, params: RplParams) -> list[Action]:
    old_rank, old_parent = s.rank, s.preferred_parent

    if not s.candidate_parents:
        if old_rank is None:
            return []
        s.rank = None
        s.preferred_parent = None
        s.dao_parents = []
        return [StateChange(TraceKind.DETACH, {"parent": str(old_parent)})]

    ranks = {n: info.rank for n, info in s.candidate_parents.items()}
    parent = select_preferred_parent(ranks)
    rank = compute_rank(ranks[parent], params.rank_step)

    # Parents must stay strictly below our own rank.
    for n in [n for n, r in ranks.items() if r >= rank]:
        del s.candidate_parents[n]
        del ranks[n]

    s.rank = rank
    s.preferred_parent = parent
    s.dao_parents = select_dao_parents(ranks, parent, params.k)

    actions: list[Action] = []
    if old_rank is None:
        actions.append(StateChange(TraceKind.JOIN, {"rank": str(rank), "parent": str(parent)}))
        actions.append(ResetTrickle())
        actions.append(ScheduleDao(trigger_bit=False))
    elif parent != old_parent:
        actions.append(StateChange(TraceKind.PARENT, {"rank": str(rank), "parent": str(parent)}))
        actions.append(ScheduleDao(trigger_bit=False))
        if rank != old_rank:
            actions.append(ResetTrickle())
    elif rank != old_rank:
        actions.append(ResetTrickle())
    return actions


def handle_dio(s: NodeState, d: Dio, params: RplParams) -> list[Action]:
    """Process a DIO heard from a link neighbour."""
    previous = s.heard.get(d.sender)
    s.heard[d.sender] = NeighborInfo(rank=d.rank, dtsn=d.dtsn)

    if s.is_root:
        s.trickle.heard_consistent()
        return []

    if s.rank is None or d.rank < s.rank:
        s.candidate_parents[d.sender] = NeighborInfo(rank=d.rank, dtsn=d.dtsn)
    else:
        s.candidate_parents.pop(d.sender, None)

    actions = _reselect_parents(s, params)

    dtsn_increment = (
        previous is not None
        and s.joined
        and d.sender in s.dao_parents
        and is_newer(d.dtsn, previous.dtsn)
    )
    if dtsn_increment:
        if d.sender == s.preferred_parent:
            actions.append(ScheduleDao(trigger_bit=True))
            if params.mode == Mode.NON_STORING:
                s.dtsn = increment(s.dtsn)
                actions.append(StateChange(TraceKind.DTSN, {"dtsn": str(s.dtsn), "cause": "parent"}))
                actions.append(ResetTrickle())
        elif params.detection:
            actions.extend(detection.on_nonpreferred_dtsn_increment(s))

    if not actions:
        s.trickle.heard_consistent()
    return actions


def handle_dis(s: NodeState) -> list[Action]:
    """Answer a DIS with an immediate DIO when joined."""
    return [SendDio()] if s.joined else []


def emit_dao(s: NodeState, via: int, trigger_bit: bool) -> Dao:
    """Build this node's own DAO and clear the pending flag."""
    if not s.joined:
        raise ValueError(f"Node {s.id} is not joined")
    if via not in s.dao_parents:
        raise ValueError(f"Node {via} is not a DAO parent of node {s.id}")
    s.dao_pending = False
    s.dao_due_us = None
    s.dao_trigger = False
    return Dao(
        origin=s.id,
        forwarder=s.id,
        parent_of_origin=s.preferred_parent,
        dtsn_trigger_bit=trigger_bit,
    )


def handle_dao(s: NodeState, d: Dao, params: RplParams) -> list[Action]:
    """Record and forward a DAO received as the unicast next hop."""
    if s.is_root:
        if params.mode == Mode.STORING:
            s.routing_table[d.origin] = d.forwarder
        else:
            s.source_routes[d.origin] = d.parent_of_origin
        return [RecordRoute(d)]

    if not s.joined or s.preferred_parent is None:
        return [DropDao(d, "unjoined")]

    if params.mode == Mode.STORING:
        s.routing_table[d.origin] = d.forwarder

    return [ForwardDao(d.forwarded_by(s.id), s.preferred_parent)]


def handle_data(s: NodeState, packet: DataPacket) -> list[Action]:
    """Deliver at the root, otherwise pass the packet to the preferred parent."""
    if s.is_root:
        return [DeliverData(packet)]
    if not s.joined or s.preferred_parent is None:
        return [DropData(packet, "unjoined")]
    return [ForwardData(packet.forwarded_by(s.id), s.preferred_parent)]


def trickle_tick(s: NodeState) -> Optional[Dio]:
    """DIO to send when the trickle timer fires, unless suppressed."""
    if not s.joined or not s.trickle.should_transmit():
        return None
    return s.current_dio()


def route_downward(root_state: NodeState, dest: int, mode: Mode) -> list[int]:
    """Downward route from the root to ``dest``.

    Returns:
        The full source route ``[root, ..., dest]`` in non-storing mode, or
        ``[root, next_hop]`` in storing mode.

    Raises:
        NoRouteError: If ``dest`` never announced itself.
    """
    if dest == ROOT:
        return [ROOT]

    if mode == Mode.STORING:
        if dest not in root_state.routing_table:
            raise NoRouteError(f"No route to node {dest}")
        return [ROOT, root_state.routing_table[dest]]

    path = [dest]
    seen = {dest}
    node = dest
    while node != ROOT:
        if node not in root_state.source_routes or root_state.source_routes[node] is None:
            raise NoRouteError(f"No route to node {dest}")
        node = root_state.source_routes[node]
        if node in seen:
            raise NoRouteError(f"Source route to node {dest} loops at node {node}")
        seen.add(node)
        path.append(node)
    return list(reversed(path))
