"""Side effects requested by node handlers, executed by the event loop."""

from dataclasses import dataclass, field

from ..models import TraceKind
from .messages import Dao, DataPacket


@dataclass(frozen=True)
class SendDio:
    """Broadcast a DIO now, bypassing trickle suppression."""


@dataclass(frozen=True)
class ResetTrickle:
    """Inconsistency detected: restart the trickle timer at Imin."""


@dataclass(frozen=True)
class ScheduleDao:
    """Originate a DAO toward the preferred parent after the DAO delay."""

    trigger_bit: bool = False


@dataclass(frozen=True)
class ForwardDao:
    dao: Dao
    via: int


@dataclass(frozen=True)
class DropDao:
    dao: Dao
    reason: str


@dataclass(frozen=True)
class RecordRoute:
    """The root accepted a DAO."""

    dao: Dao


@dataclass(frozen=True)
class ForwardData:
    packet: DataPacket
    via: int


@dataclass(frozen=True)
class DropData:
    packet: DataPacket
    reason: str


@dataclass(frozen=True)
class DeliverData:
    packet: DataPacket


@dataclass(frozen=True)
class StateChange:
    """Join, parent switch, detach or DTSN increment, traced by the loop."""

    kind: TraceKind
    attrs: dict[str, str] = field(default_factory=dict)


Action = (
    SendDio
    | ResetTrickle
    | ScheduleDao
    | ForwardDao
    | DropDao
    | RecordRoute
    | ForwardData
    | DropData
    | DeliverData
    | StateChange
)
