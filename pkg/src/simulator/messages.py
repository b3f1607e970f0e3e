"""Message types exchanged between nodes and their trace encoding.

Trace files are UTF-8 text. Lines starting with ``#`` form the header; every
other line is one event with tab-separated fields::

    time_s  KIND  node  peer  [key=value ...]

``time_s`` is printed with microsecond precision, ``peer`` is ``*`` for
broadcasts and ``-`` when the event has no peer.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

from ..models import MessageType, TraceKind

US_PER_S = 1_000_000
BROADCAST = None


@dataclass(frozen=True)
class Dio:
    """DODAG Information Object."""

    sender: int
    rank: int
    dtsn: int
    dodag_version: int = 0

    type = MessageType.DIO


@dataclass(frozen=True)
class Dis:
    """DODAG Information Solicitation."""

    sender: int

    type = MessageType.DIS


@dataclass(frozen=True)
class Dao:
    """Destination Advertisement Object travelling toward the root."""

    origin: int
    forwarder: int
    parent_of_origin: Optional[int]
    dtsn_trigger_bit: bool = False
    hop_trail: tuple[int, ...] = ()

    type = MessageType.DAO

    def __post_init__(self):
        if not self.hop_trail:
            object.__setattr__(self, "hop_trail", (self.origin,))
        elif self.hop_trail[0] != self.origin:
            raise ValueError("hop_trail must begin with the DAO origin")

    @property
    def sender(self) -> int:
        return self.forwarder

    def forwarded_by(self, node: int) -> "Dao":
        """Copy of this DAO as re-sent by ``node``."""
        return Dao(
            origin=self.origin,
            forwarder=node,
            parent_of_origin=self.parent_of_origin,
            dtsn_trigger_bit=self.dtsn_trigger_bit,
            hop_trail=self.hop_trail + (node,),
        )


@dataclass(frozen=True)
class DataPacket:
    """Application packet sent toward the root."""

    origin: int
    destination: int
    created_at: int
    size_bytes: int = 50
    seq: int = 0
    forwarder: Optional[int] = None

    type = MessageType.DATA

    @property
    def sender(self) -> int:
        return self.origin if self.forwarder is None else self.forwarder

    def forwarded_by(self, node: int) -> "DataPacket":
        return DataPacket(
            origin=self.origin,
            destination=self.destination,
            created_at=self.created_at,
            size_bytes=self.size_bytes,
            seq=self.seq,
            forwarder=node,
        )


Message = Union[Dio, Dis, Dao, DataPacket]


@dataclass(frozen=True)
class TraceEvent:
    """One trace line."""

    time_us: int
    kind: TraceKind
    node: int
    peer: Optional[int] = None
    attrs: dict[str, str] = field(default_factory=dict)

    def get_int(self, key: str, default: int = 0) -> int:
        value = self.attrs.get(key)
        return default if value is None or value == "" else int(value)

    @property
    def msg_type(self) -> Optional[MessageType]:
        value = self.attrs.get("type")
        return MessageType(value) if value else None

    @property
    def time_s(self) -> float:
        return self.time_us / US_PER_S


def format_time(time_us: int) -> str:
    """Exact decimal rendering of a microsecond timestamp in seconds."""
    return f"{time_us // US_PER_S}.{time_us % US_PER_S:06d}"


def parse_time(text: str) -> int:
    seconds, _, fraction = text.partition(".")
    return int(seconds) * US_PER_S + int((fraction + "000000")[:6])


def message_attrs(message: Message) -> dict[str, str]:
    """Salient fields of a message, in a fixed order."""
    attrs = {"type": message.type.value}
    if isinstance(message, Dio):
        attrs["rank"] = str(message.rank)
        attrs["dtsn"] = str(message.dtsn)
    elif isinstance(message, Dao):
        attrs["origin"] = str(message.origin)
        attrs["parent"] = "-" if message.parent_of_origin is None else str(message.parent_of_origin)
        attrs["trigger"] = "1" if message.dtsn_trigger_bit else "0"
        attrs["trail"] = ",".join(str(n) for n in message.hop_trail)
    elif isinstance(message, DataPacket):
        attrs["origin"] = str(message.origin)
        attrs["seq"] = str(message.seq)
        attrs["created"] = format_time(message.created_at)
    return attrs


def format_event(event: TraceEvent) -> str:
    """Render a trace event as one tab-separated line."""
    if event.peer is None:
        peer = "*" if event.kind in (TraceKind.TX, TraceKind.RX) and event.attrs.get("cast") == "bcast" else "-"
    else:
        peer = str(event.peer)
    fields = [format_time(event.time_us), event.kind.value, str(event.node), peer]
    fields.extend(f"{key}={value}" for key, value in event.attrs.items())
    return "\t".join(fields)


def parse_event(line: str) -> TraceEvent:
    """Parse a line produced by :func:`format_event`."""
    fields = line.rstrip("\n").split("\t")
    if len(fields) < 4:
        raise ValueError(f"Malformed trace line: {line!r}")
    time_text, kind, node, peer = fields[:4]
    attrs = {}
    for item in fields[4:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"Malformed trace field {item!r} in line {line!r}")
        attrs[key] = value
    return TraceEvent(
        time_us=parse_time(time_text),
        kind=TraceKind(kind),
        node=int(node),
        peer=None if peer in ("*", "-") else int(peer),
        attrs=attrs,
    )


def tx_event(
    message: Message,
    time_us: int,
    size: int,
    receiver: Optional[int] = BROADCAST,
    attempt: int = 0,
) -> TraceEvent:
    """Trace record of one physical transmission of ``message``."""
    attrs = {"cast": "bcast" if receiver is None else "ucast", "bytes": str(size), "attempt": str(attempt)}
    attrs.update(message_attrs(message))
    return TraceEvent(time_us=time_us, kind=TraceKind.TX, node=message.sender, peer=receiver, attrs=attrs)


def encode_trace(
    message: Message,
    time_us: int,
    size: int = 0,
    receiver: Optional[int] = BROADCAST,
    attempt: int = 0,
) -> str:
    """Trace line for one physical transmission of ``message``."""
    return format_event(tx_event(message, time_us, size, receiver, attempt))


def write_trace(path, header: dict[str, str], events: list[TraceEvent]) -> None:
    """Write header comments and one line per event."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(render_trace(header, events))


def render_trace(header: dict[str, str], events: list[TraceEvent]) -> str:
    lines = [f"# {key}: {value}" for key, value in header.items()]
    lines.extend(format_event(e) for e in events)
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> tuple[dict[str, str], list[TraceEvent]]:
    """Split a trace into its header mapping and its events."""
    header: dict[str, str] = {}
    events: list[TraceEvent] = []
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition(": ")
            if sep:
                header[key] = value
            continue
        events.append(parse_event(line))
    return header, events


def read_trace(path) -> tuple[dict[str, str], list[TraceEvent]]:
    with open(path, encoding="utf-8") as f:
        return parse_trace(f.read())
