"""Discrete-event simulation of an RPL network under the DAO induction attack."""

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Optional, Union

import numpy as np

from ..config import ScenarioConfig
from ..models import Alarm, LogMessage, MetricsReport, RunProgress, RunResult, TraceKind
from . import metrics
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
from .adversary import ForwardDecision, attack_tick, attack_times_us, filter_forward
from .detection import RootMonitor, grace_window_us, root_check
from .dodag import Dodag, build_dodag
from .messages import (
    BROADCAST,
    US_PER_S,
    Dao,
    DataPacket,
    Dio,
    Dis,
    Message,
    TraceEvent,
    format_time,
    message_attrs,
    read_trace,
    tx_event,
    write_trace,
)
from .protocol import (
    NodeState,
    RplParams,
    emit_dao,
    handle_dao,
    handle_data,
    handle_dio,
    handle_dis,
    trickle_tick,
)
from .seq_counter import increment
from .topology import ROOT, Topology, generate, load, pick_attacker
from .trickle import TrickleState


def to_us(seconds: float) -> int:
    return int(round(seconds * US_PER_S))


class EventKind(str, Enum):
    """Scheduled event types."""

    BOOT = "boot"
    TX_START = "tx_start"
    TX_END = "tx_end"
    TRICKLE_FIRE = "trickle_fire"
    TRICKLE_END = "trickle_end"
    DAO_TIMER = "dao_timer"
    DAO_REFRESH = "dao_refresh"
    TRAFFIC = "traffic"
    ATTACK = "attack"
    ROOT_REFRESH = "root_refresh"


@dataclass(order=True)
class Event:
    """Queue entry; ties on time are broken by insertion order."""

    time_us: int
    seq: int
    kind: EventKind = field(compare=False)
    node: int = field(compare=False)
    data: Any = field(default=None, compare=False)


@dataclass
class Frame:
    """A message waiting in or leaving a MAC queue."""

    message: Message
    size: int
    receiver: Optional[int] = BROADCAST
    attempt: int = 0


@dataclass
class Transmission:
    """A frame on the air."""

    sender: int
    frame: Frame
    end_us: int
    receivers: list[int]
    corrupted: set[int] = field(default_factory=set)


@dataclass
class SimulationCallbacks:
    """Callbacks for simulation events."""

    on_log: Optional[Callable[[LogMessage], None]] = None
    on_progress: Optional[Callable[[RunProgress], None]] = None
    on_alarm: Optional[Callable[[Alarm], None]] = None
    on_event: Optional[Callable[["Simulator", Event], None]] = None
    on_complete: Optional[Callable[[RunResult], None]] = None


def build_topology(config: ScenarioConfig) -> Topology:
    """Topology of a scenario: a layout file if given, else a seeded random layout."""
    t = config.topology
    if t.layout_file:
        return load(t.layout_file, t)
    return generate(t.n_nodes, t.seed, t)


def trace_header(config: ScenarioConfig, topology: Topology, attacker: Optional[int], grace_us: int) -> dict[str, str]:
    return {
        "trace": "rpl-dao-sim",
        "fields": "time_s kind node peer key=value...",
        "warmup": (
            f"nodes power on uniformly in [0, {config.simulation.join_window_s}] s; "
            f"data traffic starts at {config.traffic.start_s} s"
        ),
        "nodes": ",".join(str(n) for n in topology.nodes),
        "attacker": "none" if attacker is None else str(attacker),
        "grace_window_s": format_time(grace_us),
        "scenario": json.dumps(config.model_dump(mode="json"), sort_keys=True),
    }


@dataclass
class Simulator:
    """Single-threaded event loop driving every node of one scenario.

    All randomness comes from the scenario seed, so identical configuration
    and topology always produce an identical trace.
    """

    config: ScenarioConfig
    topology: Topology
    callbacks: SimulationCallbacks = field(default_factory=SimulationCallbacks)

    _rng: Optional[np.random.Generator] = field(default=None, init=False, repr=False)
    _heap: list[Event] = field(default_factory=list, init=False, repr=False)
    _seq: int = field(default=0, init=False)
    _now_us: int = field(default=0, init=False)
    _end_us: int = field(default=0, init=False)
    _nodes: dict[int, NodeState] = field(default_factory=dict, init=False, repr=False)
    _booted: set[int] = field(default_factory=set, init=False, repr=False)
    _mac_queues: dict[int, deque] = field(default_factory=dict, init=False, repr=False)
    _busy: set[int] = field(default_factory=set, init=False, repr=False)
    _on_air: list[Transmission] = field(default_factory=list, init=False, repr=False)
    _trace: list[TraceEvent] = field(default_factory=list, init=False, repr=False)
    _events_processed: int = field(default=0, init=False)
    _dao_transmissions: int = field(default=0, init=False)
    _attacker: Optional[int] = field(default=None, init=False)
    _started: bool = field(default=False, init=False)
    _report_step: int = field(default=1, init=False)
    _next_report: int = field(default=0, init=False)
    _finished: bool = field(default=False, init=False)

    def __post_init__(self):
        cfg = self.config
        cfg.validate_scenario()
        self._rng = np.random.default_rng(cfg.simulation.seed)
        self._end_us = to_us(cfg.simulation.duration_s)
        self._params = RplParams(
            mode=cfg.simulation.mode,
            rank_step=cfg.rpl.rank_step,
            k=cfg.effective_k,
            detection=cfg.detection.enabled,
        )

        for node in self.topology.nodes:
            trickle = TrickleState.from_config(cfg.trickle)
            self._nodes[node] = NodeState.root(trickle) if node == ROOT else NodeState(id=node, trickle=trickle)
            self._mac_queues[node] = deque()

        if cfg.attacker.enabled:
            self._attacker = self._choose_attacker()

        if cfg.detection.grace_window_s is not None:
            grace = to_us(cfg.detection.grace_window_s)
        else:
            grace = grace_window_us(
                cfg.rpl.dao_delay_s,
                cfg.trickle.imin_s,
                cfg.detection.hop_latency_bound_s,
                self.topology.root_eccentricity(),
            )
        self._monitor = RootMonitor(grace)

    def _choose_attacker(self) -> int:
        node = self.config.attacker.node
        if node is None:
            static = build_dodag(self.topology, self.config.effective_k, self.config.rpl.rank_step)
            return pick_attacker(
                self.topology, static, self.config.simulation.seed, self.config.attacker.selection
            )
        if node == ROOT or node not in self._nodes:
            raise ValueError(f"Attacker node {node} is not a non-root node of the topology")
        return node

    @property
    def now_us(self) -> int:
        return self._now_us

    @property
    def attacker(self) -> Optional[int]:
        return self._attacker

    @property
    def nodes(self) -> dict[int, NodeState]:
        """Live node states, keyed by id."""
        return self._nodes

    @property
    def trace(self) -> list[TraceEvent]:
        return list(self._trace)

    @property
    def events_processed(self) -> int:
        return self._events_processed

    @property
    def grace_us(self) -> int:
        return self._monitor.grace_window_us

    def dodag_snapshot(self) -> Dodag:
        """Current preferred parents and DAO parents of every joined node."""
        joined = {n: s for n, s in self._nodes.items() if s.joined}
        return Dodag(
            rank={n: s.rank for n, s in joined.items()},
            preferred={n: s.preferred_parent for n, s in joined.items() if n != ROOT},
            dao_parents={n: list(s.dao_parents) for n, s in joined.items() if n != ROOT},
        )

    def _log(self, level: str, message: str) -> None:
        """Send log message via callback."""
        if self.callbacks.on_log:
            self.callbacks.on_log(LogMessage(level=level, message=message))

    def _schedule(self, time_us: int, kind: EventKind, node: int, data: Any = None) -> None:
        if time_us < self._now_us:
            raise RuntimeError(f"Cannot schedule {kind.value} in the past ({time_us} < {self._now_us})")
        self._seq += 1
        heapq.heappush(self._heap, Event(time_us, self._seq, kind, node, data))

    def _record(self, kind: TraceKind, node: int, peer: Optional[int] = None, attrs: Optional[dict] = None) -> TraceEvent:
        event = TraceEvent(time_us=self._now_us, kind=kind, node=node, peer=peer, attrs=attrs or {})
        self._trace.append(event)
        return event

    # --- setup -------------------------------------------------------------

    def _schedule_initial_events(self) -> None:
        cfg = self.config
        others = [n for n in self.topology.nodes if n != ROOT]

        self._schedule(0, EventKind.BOOT, ROOT)
        join_us = to_us(cfg.simulation.join_window_s)
        for node in others:
            self._schedule(int(self._rng.integers(0, join_us + 1)), EventKind.BOOT, node)

        if cfg.traffic.enabled:
            start = to_us(cfg.traffic.start_s)
            period = to_us(cfg.traffic.period_s)
            for node in others:
                first = start + int(self._rng.integers(0, period))
                if first < self._end_us:
                    self._schedule(first, EventKind.TRAFFIC, node, 0)

        if self._attacker is not None:
            for t in attack_times_us(cfg.attacker, cfg.simulation.duration_s):
                self._schedule(t, EventKind.ATTACK, self._attacker)

        if cfg.rpl.root_dtsn_refresh_period_s:
            first = to_us(cfg.rpl.root_dtsn_refresh_period_s)
            if first < self._end_us:
                self._schedule(first, EventKind.ROOT_REFRESH, ROOT)

        if cfg.rpl.dao_refresh_period_s:
            first = to_us(cfg.rpl.dao_refresh_period_s)
            for node in others:
                if first < self._end_us:
                    self._schedule(first, EventKind.DAO_REFRESH, node)

    # --- MAC ---------------------------------------------------------------

    def _size_of(self, message: Message) -> int:
        sizes = self.config.sizes
        if isinstance(message, Dio):
            return sizes.dio_bytes
        if isinstance(message, Dis):
            return sizes.dis_bytes
        if isinstance(message, Dao):
            return sizes.dao_bytes
        return message.size_bytes

    def _airtime_us(self, size: int) -> int:
        bitrate = self.config.mac.bitrate_bps
        return max(1, (size * 8 * US_PER_S + bitrate - 1) // bitrate)

    def _send(self, node: int, message: Message, receiver: Optional[int] = BROADCAST) -> None:
        frame = Frame(message=message, size=self._size_of(message), receiver=receiver)
        queue = self._mac_queues[node]
        if len(queue) >= self.config.mac.queue_limit:
            self._record(TraceKind.LOSS, node, receiver, {"reason": "queue", **message_attrs(message)})
            return
        queue.append(frame)
        if node not in self._busy:
            self._access(node)

    def broadcast(self, sender: int, message: Message) -> None:
        """Queue ``message`` for every booted neighbour of ``sender``."""
        self._send(sender, message)

    def unicast(self, sender: int, message: Message, receiver: int) -> None:
        """Queue ``message`` for one neighbour, with retries."""
        if not self.topology.linked(sender, receiver):
            raise ValueError(f"Nodes {sender} and {receiver} are not linked")
        self._send(sender, message, receiver)

    def _access(self, node: int) -> None:
        """Back off before sending the head of the queue."""
        mac = self.config.mac
        frame = self._mac_queues[node][0]
        window = mac.max_backoff_us * (2 ** frame.attempt)
        backoff = int(self._rng.integers(mac.min_backoff_us, window + 1))
        self._busy.add(node)
        self._schedule(self._now_us + backoff, EventKind.TX_START, node)

    def _on_tx_start(self, node: int) -> None:
        frame = self._mac_queues[node][0]
        if frame.receiver is BROADCAST:
            receivers = [n for n in self.topology.neighbors(node) if n in self._booted]
        else:
            receivers = [frame.receiver]

        tx = Transmission(
            sender=node,
            frame=frame,
            end_us=self._now_us + self._airtime_us(frame.size),
            receivers=receivers,
        )

        self._on_air = [t for t in self._on_air if t.end_us > self._now_us]
        if self.config.mac.collisions:
            for other in self._on_air:
                heard_by = self.topology.interferers(node)
                for r in other.receivers:
                    if r == node or r in heard_by:
                        other.corrupted.add(r)
                other_reach = self.topology.interferers(other.sender)
                for r in tx.receivers:
                    if r == other.sender or r in other_reach:
                        tx.corrupted.add(r)
        self._on_air.append(tx)

        self._trace.append(tx_event(frame.message, self._now_us, frame.size, frame.receiver, frame.attempt))
        if isinstance(frame.message, Dao):
            self._dao_transmissions += 1
        self._schedule(tx.end_us, EventKind.TX_END, node, tx)

    def _on_tx_end(self, node: int, tx: Transmission) -> None:
        if tx in self._on_air:
            self._on_air.remove(tx)

        frame = tx.frame
        p = self.config.mac.link_success_probability
        delivered = []
        for r in tx.receivers:
            if r in tx.corrupted:
                status = "collision"
            elif p < 1.0 and self._rng.random() >= p:
                status = "fading"
            else:
                status = "ok"
                delivered.append(r)
            attrs = {
                "cast": "bcast" if frame.receiver is BROADCAST else "ucast",
                "bytes": str(frame.size),
                "status": status,
                **message_attrs(frame.message),
            }
            self._record(TraceKind.RX, r, node, attrs)

        queue = self._mac_queues[node]
        queue.popleft()
        self._busy.discard(node)

        if frame.receiver is not BROADCAST and frame.receiver not in delivered:
            if frame.attempt < self.config.mac.max_retries:
                queue.appendleft(Frame(frame.message, frame.size, frame.receiver, frame.attempt + 1))
            else:
                self._record(TraceKind.LOSS, node, frame.receiver, {"reason": "retries", **message_attrs(frame.message)})

        if queue:
            self._access(node)

        for r in delivered:
            self._receive(r, node, frame.message)

    # --- node logic ----------------------------------------------------------

    def _receive(self, node: int, sender: int, message: Message) -> None:
        s = self._nodes[node]
        if isinstance(message, Dio):
            actions = handle_dio(s, message, self._params)
        elif isinstance(message, Dis):
            actions = handle_dis(s)
        elif isinstance(message, Dao):
            if node == self._attacker and filter_forward(s, message, self.config.attacker) == ForwardDecision.DROP:
                self._record(TraceKind.DROP, node, sender, {"reason": "attack", **message_attrs(message)})
                return
            actions = handle_dao(s, message, self._params)
        else:
            actions = handle_data(s, message)
        self._apply(node, actions)

    def _apply(self, node: int, actions: list[Action]) -> None:
        """Carry out the side effects a handler asked for."""
        s = self._nodes[node]
        for action in actions:
            if isinstance(action, SendDio):
                if s.joined:
                    self._send(node, s.current_dio())
            elif isinstance(action, ResetTrickle):
                if s.trickle.reset(self._now_us, self._rng):
                    self._schedule_trickle(node)
            elif isinstance(action, ScheduleDao):
                self._schedule_dao(node, action.trigger_bit)
            elif isinstance(action, (ForwardDao, ForwardData)):
                message = action.dao if isinstance(action, ForwardDao) else action.packet
                self._send(node, message, action.via)
            elif isinstance(action, DropDao):
                self._record(TraceKind.LOSS, node, None, {"reason": action.reason, **message_attrs(action.dao)})
            elif isinstance(action, DropData):
                self._record(TraceKind.LOSS, node, None, {"reason": action.reason, **message_attrs(action.packet)})
            elif isinstance(action, DeliverData):
                self._record(TraceKind.DELIVER, node, action.packet.origin, message_attrs(action.packet))
            elif isinstance(action, RecordRoute):
                if self._params.detection:
                    self._check_alarm(action.dao)
            elif isinstance(action, StateChange):
                self._record(action.kind, node, None, dict(action.attrs))

    def _schedule_trickle(self, node: int) -> None:
        trickle = self._nodes[node].trickle
        self._schedule(trickle.fire_at_us, EventKind.TRICKLE_FIRE, node, trickle.epoch)
        self._schedule(trickle.interval_end_us, EventKind.TRICKLE_END, node, trickle.epoch)

    def _schedule_dao(self, node: int, trigger_bit: bool) -> None:
        """At most one pending DAO per node; later requests fold into it."""
        s = self._nodes[node]
        if s.dao_pending:
            s.dao_trigger = s.dao_trigger or trigger_bit
            return
        s.dao_pending = True
        s.dao_trigger = trigger_bit
        s.dao_due_us = self._now_us + int(self._rng.integers(0, to_us(self.config.rpl.dao_delay_s) + 1))
        self._schedule(s.dao_due_us, EventKind.DAO_TIMER, node)

    def _check_alarm(self, dao: Dao) -> None:
        trail = ",".join(str(n) for n in dao.hop_trail)
        evidence = f"DAO origin={dao.origin} via={dao.forwarder} trail={trail} trigger=1 at {format_time(self._now_us)}"
        alarm = root_check(self._monitor, dao, self._now_us, evidence)
        if alarm is None:
            return
        self._record(
            TraceKind.ALARM,
            ROOT,
            dao.forwarder,
            {"origin": str(dao.origin), "trail": trail, "evidence": evidence},
        )
        self._log("warning", f"Alarm at {alarm.time_s:.3f}s: unexplained trigger-bit DAO from node {dao.origin}")
        if self.callbacks.on_alarm:
            self.callbacks.on_alarm(alarm)

    # --- event handlers ------------------------------------------------------

    def _on_boot(self, node: int) -> None:
        self._booted.add(node)
        self._record(TraceKind.BOOT, node)
        if node == ROOT:
            self._apply(ROOT, [ResetTrickle()])
        else:
            self._send(node, Dis(sender=node))

    def _on_trickle_fire(self, node: int, epoch: int) -> None:
        s = self._nodes[node]
        if epoch != s.trickle.epoch:
            return
        dio = trickle_tick(s)
        if dio is not None:
            self._send(node, dio)

    def _on_trickle_end(self, node: int, epoch: int) -> None:
        trickle = self._nodes[node].trickle
        if epoch != trickle.epoch:
            return
        trickle.expire(self._now_us, self._rng)
        self._schedule_trickle(node)

    def _on_dao_timer(self, node: int) -> None:
        s = self._nodes[node]
        if not s.dao_pending or s.dao_due_us != self._now_us:
            return
        if not s.joined:
            s.dao_pending = False
            s.dao_trigger = False
            s.dao_due_us = None
            return
        via = s.preferred_parent
        self._send(node, emit_dao(s, via, s.dao_trigger), via)

    def _on_traffic(self, node: int, seq: int) -> None:
        next_at = self._now_us + to_us(self.config.traffic.period_s)
        if next_at < self._end_us:
            self._schedule(next_at, EventKind.TRAFFIC, node, seq + 1)

        packet = DataPacket(
            origin=node,
            destination=ROOT,
            created_at=self._now_us,
            size_bytes=self.config.traffic.packet_bytes,
            seq=seq,
        )
        self._record(TraceKind.GEN, node, None, message_attrs(packet))
        self._apply(node, handle_data(self._nodes[node], packet))

    def _on_attack(self, node: int) -> None:
        self._apply(node, attack_tick(self._nodes[node], self.config.attacker, self._now_us))

    def _on_root_refresh(self) -> None:
        root = self._nodes[ROOT]
        root.dtsn = increment(root.dtsn)
        self._monitor.record_root_increment(self._now_us)
        self._record(TraceKind.DTSN, ROOT, None, {"dtsn": str(root.dtsn), "cause": "root"})
        self._apply(ROOT, [ResetTrickle(), SendDio()])

        next_at = self._now_us + to_us(self.config.rpl.root_dtsn_refresh_period_s)
        if next_at < self._end_us:
            self._schedule(next_at, EventKind.ROOT_REFRESH, ROOT)

    def _on_dao_refresh(self, node: int) -> None:
        if self._nodes[node].joined:
            self._schedule_dao(node, False)
        next_at = self._now_us + to_us(self.config.rpl.dao_refresh_period_s)
        if next_at < self._end_us:
            self._schedule(next_at, EventKind.DAO_REFRESH, node)

    def _dispatch(self, event: Event) -> None:
        kind, node = event.kind, event.node
        if kind == EventKind.TX_START:
            self._on_tx_start(node)
        elif kind == EventKind.TX_END:
            self._on_tx_end(node, event.data)
        elif kind == EventKind.TRICKLE_FIRE:
            self._on_trickle_fire(node, event.data)
        elif kind == EventKind.TRICKLE_END:
            self._on_trickle_end(node, event.data)
        elif kind == EventKind.DAO_TIMER:
            self._on_dao_timer(node)
        elif kind == EventKind.BOOT:
            self._on_boot(node)
        elif kind == EventKind.TRAFFIC:
            self._on_traffic(node, event.data)
        elif kind == EventKind.ATTACK:
            self._on_attack(node)
        elif kind == EventKind.ROOT_REFRESH:
            self._on_root_refresh()
        elif kind == EventKind.DAO_REFRESH:
            self._on_dao_refresh(node)

    def _progress(self) -> RunProgress:
        return RunProgress(
            sim_time_s=self._now_us / US_PER_S,
            duration_s=self.config.simulation.duration_s,
            progress_percent=min(100.0, 100.0 * self._now_us / self._end_us),
            events_processed=self._events_processed,
            joined_nodes=sum(1 for s in self._nodes.values() if s.joined),
            dao_transmissions=self._dao_transmissions,
        )

    # --- public API ----------------------------------------------------------

    def start(self) -> None:
        """Schedule the boot, traffic and attack events. A Simulator starts once."""
        if self._started:
            raise RuntimeError("A Simulator runs once; create a new one for another run")
        self._started = True

        cfg = self.config
        self._log(
            "info",
            f"Simulating {len(self.topology)} nodes for {cfg.simulation.duration_s:g}s "
            f"({cfg.simulation.mode.value}, attacker {self._attacker if self._attacker is not None else 'none'}, "
            f"k={cfg.effective_k})",
        )
        self._schedule_initial_events()
        self._report_step = max(1, self._end_us // 10)
        self._next_report = self._report_step

    def advance(self, until_s: Optional[float] = None) -> None:
        """Process every event earlier than ``until_s``, or than the end of the run.

        The clock is left at ``until_s`` so that frames sent afterwards start there.
        """
        if not self._started:
            raise RuntimeError("Simulator.start() must be called before advance()")
        limit = self._end_us if until_s is None else min(self._end_us, to_us(until_s))

        while self._heap and self._heap[0].time_us < limit:
            event = heapq.heappop(self._heap)
            self._now_us = event.time_us
            self._dispatch(event)
            self._events_processed += 1

            if self.callbacks.on_event:
                self.callbacks.on_event(self, event)

            if self._now_us >= self._next_report:
                while self._next_report <= self._now_us:
                    self._next_report += self._report_step
                if self.callbacks.on_progress:
                    self.callbacks.on_progress(self._progress())

        self._now_us = max(self._now_us, limit)

    def run(self, trace_path: Optional[Union[str, Path]] = None) -> RunResult:
        """Run the scenario to its end time.

        Args:
            trace_path: Where to write the event trace, if anywhere.

        Returns:
            RunResult with the metrics computed from the trace.
        """
        if self._finished:
            raise RuntimeError("A Simulator runs once; create a new one for another run")
        if not self._started:
            self.start()
        self.advance()
        self._finished = True

        cfg = self.config
        if self.callbacks.on_progress:
            self.callbacks.on_progress(self._progress())

        report = metrics.build_report(self._trace, cfg.energy, cfg.simulation.duration_s, self.topology.nodes)

        if trace_path is not None:
            header = trace_header(cfg, self.topology, self._attacker, self._monitor.grace_window_us)
            write_trace(trace_path, header, self._trace)
            self._log("info", f"Trace written to {trace_path}")

        result = RunResult(
            mode=cfg.simulation.mode,
            n_nodes=len(self.topology),
            topology_seed=cfg.topology.seed,
            scenario_seed=cfg.simulation.seed,
            attack=self._attacker is not None,
            attacker=self._attacker,
            k=cfg.effective_k,
            report=report,
            events_processed=self._events_processed,
            trace_path=str(trace_path) if trace_path is not None else None,
        )

        if self.callbacks.on_complete:
            self.callbacks.on_complete(result)
        return result


def run_scenario(
    config: ScenarioConfig,
    callbacks: Optional[SimulationCallbacks] = None,
    trace_path: Optional[Union[str, Path]] = None,
) -> RunResult:
    """Build the topology of ``config`` and simulate it."""
    topology = build_topology(config)
    return Simulator(config, topology, callbacks or SimulationCallbacks()).run(trace_path)


def report_from_trace(header: dict[str, str], events: list[TraceEvent]) -> tuple[ScenarioConfig, MetricsReport]:
    """Recompute the metrics of a parsed trace.

    Raises:
        ValueError: If the trace lacks its scenario or node header.
    """
    if "scenario" not in header or "nodes" not in header:
        raise ValueError("Not a simulator trace (missing scenario/nodes header)")
    config = ScenarioConfig(**json.loads(header["scenario"]))
    nodes = [int(n) for n in header["nodes"].split(",") if n]
    report = metrics.build_report(events, config.energy, config.simulation.duration_s, nodes)
    return config, report


def replay(path: Union[str, Path]) -> tuple[ScenarioConfig, MetricsReport]:
    """Recompute the metrics of a saved trace file."""
    header, events = read_trace(path)
    return report_from_trace(header, events)
