"""Trickle timer for DIO transmissions."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config import TrickleConfig
from .messages import US_PER_S


@dataclass
class TrickleState:
    """Trickle interval bookkeeping for one node.

    ``epoch`` changes whenever a new interval starts, so timer events that
    belong to an abandoned interval can be recognised and ignored.
    """

    imin_us: int
    imax_us: int
    redundancy: int
    interval_us: int = 0
    interval_start_us: int = 0
    fire_at_us: Optional[int] = None
    counter: int = 0
    epoch: int = 0
    running: bool = False

    @classmethod
    def from_config(cls, cfg: TrickleConfig) -> "TrickleState":
        imin = max(1, int(round(cfg.imin_s * US_PER_S)))
        return cls(imin_us=imin, imax_us=imin * (2 ** cfg.doublings), redundancy=cfg.redundancy)

    @property
    def interval_end_us(self) -> int:
        return self.interval_start_us + self.interval_us

    def start_interval(self, now_us: int, rng: np.random.Generator) -> None:
        """Begin a new interval at ``now_us`` with a fire time in [I/2, I)."""
        half = self.interval_us // 2
        self.interval_start_us = now_us
        self.fire_at_us = now_us + int(rng.integers(half, max(half + 1, self.interval_us)))
        self.counter = 0
        self.epoch += 1
        self.running = True

    def reset(self, now_us: int, rng: np.random.Generator) -> bool:
        """Restart at Imin; a running timer already at Imin is left alone.

        Returns:
            True if a new interval was started.
        """
        if self.running and self.interval_us == self.imin_us:
            return False
        self.interval_us = self.imin_us
        self.start_interval(now_us, rng)
        return True

    def heard_consistent(self) -> None:
        self.counter += 1

    def should_transmit(self) -> bool:
        return self.counter < self.redundancy

    def expire(self, now_us: int, rng: np.random.Generator) -> None:
        """Interval over: double it up to Imax and start the next one."""
        self.interval_us = min(self.interval_us * 2, self.imax_us)
        self.start_interval(now_us, rng)
