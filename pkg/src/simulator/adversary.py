"""The malicious insider: DAO induction attack and selective DAO dropping."""

from enum import Enum
from typing import TYPE_CHECKING, Iterator

from ..config import AttackerConfig
from ..models import TraceKind
from .actions import Action, ResetTrickle, SendDio, StateChange
from .messages import US_PER_S, Dao
from .seq_counter import increment

if TYPE_CHECKING:
    from .protocol import NodeState


class ForwardDecision(str, Enum):
    FORWARD = "forward"
    DROP = "drop"


def attack_times_us(cfg: AttackerConfig, duration_s: float) -> Iterator[int]:
    """Increment instants in [start, duration), one every period."""
    start = int(round(cfg.start_time_s * US_PER_S))
    period = int(round(cfg.increment_period_s * US_PER_S))
    end = int(round(duration_s * US_PER_S))
    t = start
    while t < end:
        yield t
        t += period


def attack_tick(s: "NodeState", cfg: AttackerConfig, now_us: int) -> list[Action]:
    """Bump the attacker's DTSN and advertise it at once.

    An attacker that has not joined yet skips the tick.
    """
    if not s.joined or now_us < int(round(cfg.start_time_s * US_PER_S)):
        return []
    s.dtsn = increment(s.dtsn)
    return [
        StateChange(TraceKind.DTSN, {"dtsn": str(s.dtsn), "cause": "attack"}),
        ResetTrickle(),
        SendDio(),
    ]


def filter_forward(s: "NodeState", d: Dao, cfg: AttackerConfig) -> ForwardDecision:
    """Drop descendants' DAOs when configured; the attacker's own always pass."""
    if cfg.drop_descendant_daos and d.origin != s.id:
        return ForwardDecision.DROP
    return ForwardDecision.FORWARD
