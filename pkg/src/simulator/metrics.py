"""Trace accounting: DAO overhead, power, packet loss, latency."""

from collections import Counter
from typing import Iterable, Optional

from ..config import EnergyConfig
from ..models import Alarm, MessageType, MetricsReport, NodeMetrics, TraceKind
from .messages import TraceEvent, US_PER_S, parse_time


def _of_kind(events: Iterable[TraceEvent], kind: TraceKind) -> Iterable[TraceEvent]:
    return (e for e in events if e.kind == kind)


def _dao_tx(events: Iterable[TraceEvent]) -> Iterable[TraceEvent]:
    return (e for e in _of_kind(events, TraceKind.TX) if e.attrs.get("type") == MessageType.DAO.value)


def dao_overhead(events: list[TraceEvent]) -> int:
    """Every DAO transmission: originations plus each forwarding hop."""
    return sum(1 for _ in _dao_tx(events))


def dao_originations(events: list[TraceEvent]) -> int:
    """First transmissions of DAOs by their origin."""
    return sum(
        1 for e in _dao_tx(events)
        if e.get_int("attempt") == 0 and e.get_int("origin", -1) == e.node
    )


def byte_counts(events: list[TraceEvent]) -> tuple[Counter, Counter]:
    """Bytes transmitted and received per node."""
    tx: Counter = Counter()
    rx: Counter = Counter()
    for e in events:
        if e.kind == TraceKind.TX:
            tx[e.node] += e.get_int("bytes")
        elif e.kind == TraceKind.RX:
            rx[e.node] += e.get_int("bytes")
    return tx, rx


def node_power(bytes_tx: int, bytes_rx: int, model: EnergyConfig, duration_s: float) -> float:
    """Average power of one node over the run (mW)."""
    energy_mj = model.e_tx_mj_per_byte * bytes_tx + model.e_rx_mj_per_byte * bytes_rx
    return (energy_mj + model.p_idle_mw * duration_s) / duration_s


def avg_power(events: list[TraceEvent], model: EnergyConfig, duration_s: float, nodes: list[int]) -> float:
    """Mean per-node average power (mW)."""
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    if not nodes:
        return 0.0
    tx, rx = byte_counts(events)
    return sum(node_power(tx[n], rx[n], model, duration_s) for n in nodes) / len(nodes)


def _data_counts(events: list[TraceEvent]) -> tuple[Counter, Counter]:
    sent: Counter = Counter()
    delivered: Counter = Counter()
    for e in events:
        if e.kind == TraceKind.GEN:
            sent[e.node] += 1
        elif e.kind == TraceKind.DELIVER:
            delivered[e.peer] += 1
    return sent, delivered


def packet_loss_ratio(events: list[TraceEvent]) -> float:
    """Mean over sending nodes of one minus delivered/sent."""
    sent, delivered = _data_counts(events)
    senders = [n for n in sorted(sent) if sent[n] > 0]
    if not senders:
        return 0.0
    ratios = [1.0 - min(delivered[n], sent[n]) / sent[n] for n in senders]
    return sum(ratios) / len(ratios)


def avg_latency(events: list[TraceEvent]) -> Optional[float]:
    """Mean end-to-end latency of delivered packets (s); None if none arrived."""
    latencies = [
        e.time_us - parse_time(e.attrs["created"])
        for e in _of_kind(events, TraceKind.DELIVER)
    ]
    if not latencies:
        return None
    return sum(latencies) / len(latencies) / US_PER_S


def alarms(events: list[TraceEvent]) -> list[Alarm]:
    """Alarms recorded in the trace, in order."""
    return [
        Alarm(
            time_s=e.time_s,
            reporting_origin=e.get_int("origin"),
            hop_trail=[int(n) for n in e.attrs.get("trail", "").split(",") if n],
            evidence=e.attrs.get("evidence", ""),
        )
        for e in _of_kind(events, TraceKind.ALARM)
    ]


def first_attack_s(events: list[TraceEvent]) -> Optional[float]:
    for e in _of_kind(events, TraceKind.DTSN):
        if e.attrs.get("cause") == "attack":
            return e.time_s
    return None


def build_report(
    events: list[TraceEvent],
    model: EnergyConfig,
    duration_s: float,
    nodes: list[int],
) -> MetricsReport:
    """Assemble every metric of a run from its trace."""
    tx, rx = byte_counts(events)
    sent, delivered = _data_counts(events)
    dao_per_node = Counter(e.node for e in _dao_tx(events))

    per_node = [
        NodeMetrics(
            node=n,
            bytes_tx=tx[n],
            bytes_rx=rx[n],
            dao_transmissions=dao_per_node[n],
            data_sent=sent[n],
            data_delivered=delivered[n],
            power_mw=node_power(tx[n], rx[n], model, duration_s),
        )
        for n in nodes
    ]

    return MetricsReport(
        dao_overhead=dao_overhead(events),
        dao_originations=dao_originations(events),
        avg_power_mw=avg_power(events, model, duration_s, nodes),
        packet_loss_ratio=packet_loss_ratio(events),
        avg_latency_s=avg_latency(events),
        alarms=alarms(events),
        first_attack_s=first_attack_s(events),
        per_node=per_node,
    )
