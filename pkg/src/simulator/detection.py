"""Root-side detection of the DAO induction attack.

Nodes keep up to ``k`` non-preferred DAO parents. A DTSN increment heard from
one of those makes the node send a trigger-bit DAO through its preferred
parent, and the root raises an alarm for trigger-bit DAOs it did not cause.
"""

from typing import TYPE_CHECKING, Callable, Optional

from ..models import Alarm, LogMessage, Mode
from .actions import Action, ScheduleDao
from .messages import US_PER_S, Dao
from .topology import ROOT

if TYPE_CHECKING:
    from .dodag import Dodag
    from .protocol import NodeState


def on_nonpreferred_dtsn_increment(s: "NodeState") -> list[Action]:
    """Trigger-bit DAO via the preferred parent; the own DTSN stays put."""
    return [ScheduleDao(trigger_bit=True)]


class RootMonitor:
    """Root bookkeeping of its own DTSN increments."""

    def __init__(self, grace_window_us: int):
        self.grace_window_us = grace_window_us
        self.root_increments_us: list[int] = []

    def record_root_increment(self, now_us: int) -> None:
        self.root_increments_us.append(now_us)

    def in_root_epoch(self, now_us: int) -> bool:
        """Whether ``now_us`` falls inside the window after a root increment."""
        return any(0 <= now_us - t <= self.grace_window_us for t in self.root_increments_us)


def root_check(root: RootMonitor, d: Dao, now_us: int, evidence: str = "") -> Optional[Alarm]:
    """Alarm for a trigger-bit DAO outside every root-initiated epoch."""
    if not d.dtsn_trigger_bit or root.in_root_epoch(now_us):
        return None
    return Alarm(
        time_s=now_us / US_PER_S,
        reporting_origin=d.origin,
        hop_trail=list(d.hop_trail),
        evidence=evidence,
    )


def grace_window_us(dao_delay_s: float, imin_s: float, hop_latency_bound_s: float, eccentricity: int) -> int:
    """Default legitimate window after a root DTSN increment."""
    seconds = 2 * dao_delay_s + eccentricity * (imin_s + hop_latency_bound_s)
    return int(round(seconds * US_PER_S))


def detectability(dodag: "Dodag", attacker: int, mode: Mode = Mode.NON_STORING) -> int:
    """1 if some node outside the attacker's sub-DODAG can witness its increments.

    The witness keeps, as a non-preferred DAO parent, a node whose DTSN
    changes under the attack and reports through a preferred parent the
    attacker cannot intercept. In non-storing mode the whole sub-DODAG
    increments; in storing mode only the attacker does.
    """
    inside = dodag.sub_dodag(attacker)
    incrementing = inside if mode == Mode.NON_STORING else {attacker}
    for node, parents in dodag.dao_parents.items():
        if node in inside or node == ROOT:
            continue
        if any(p in incrementing for p in parents):
            return 1
    return 0


def detection_rate(
    dodag: "Dodag",
    on_log: Optional[Callable[[LogMessage], None]] = None,
    mode: Mode = Mode.NON_STORING,
) -> float:
    """Descendant-weighted mean of per-attacker detectability over non-root nodes."""
    weighted = 0
    total = 0
    for node in sorted(dodag.preferred):
        weight = dodag.descendant_count(node)
        if weight == 0:
            continue
        total += weight
        weighted += weight * detectability(dodag, node, mode)

    if total == 0:
        if on_log:
            on_log(LogMessage(level="warning", message="No node has descendants; detection rate is 1 by convention"))
        return 1.0
    return weighted / total
