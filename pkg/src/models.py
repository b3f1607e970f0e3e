"""Result, report and progress message models."""

from datetime import datetime
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class Mode(str, Enum):
    """RPL modes of operation."""

    STORING = "storing"
    NON_STORING = "non_storing"


class AttackerSelection(str, Enum):
    """How the attacker is chosen among the root's children when no node is given."""

    RANDOM = "random"
    WITH_DESCENDANTS = "with_descendants"
    MAX_DESCENDANTS = "max_descendants"


class MessageType(str, Enum):
    """Frame types carried over the simulated radio."""

    DIO = "DIO"
    DIS = "DIS"
    DAO = "DAO"
    DATA = "DATA"


class TraceKind(str, Enum):
    """Trace event kinds, one per trace line."""

    BOOT = "BOOT"
    JOIN = "JOIN"
    PARENT = "PARENT"
    DETACH = "DETACH"
    TX = "TX"
    RX = "RX"
    LOSS = "LOSS"
    DROP = "DROP"
    GEN = "GEN"
    DELIVER = "DELIVER"
    DTSN = "DTSN"
    ALARM = "ALARM"


class RunState(str, Enum):
    """Lifecycle of a run driven through the results service."""

    IDLE = "idle"
    RUNNING = "running"
    COMPLETED = "completed"
    ERROR = "error"


class ProgressType(str, Enum):
    """Websocket message types."""

    RUN_PROGRESS = "run_progress"
    RUN_STATUS = "run_status"
    RUN_COMPLETE = "run_complete"
    ALARM = "alarm"
    ERROR = "error"
    LOG = "log"


class LogMessage(BaseModel):
    """Log message for real-time output."""

    type: ProgressType = ProgressType.LOG
    level: str = Field(description="Log level: info, warning, error")
    message: str = Field(description="Log message text")
    timestamp: datetime = Field(default_factory=datetime.now)


class ErrorMessage(BaseModel):
    """Error message."""

    type: ProgressType = ProgressType.ERROR
    error: str = Field(description="Error description")
    details: Optional[str] = Field(default=None, description="Additional error details")
    timestamp: datetime = Field(default_factory=datetime.now)


class RunProgress(BaseModel):
    """Periodic progress update while the event loop advances."""

    type: ProgressType = ProgressType.RUN_PROGRESS
    sim_time_s: float = Field(description="Current simulated time (s)")
    duration_s: float = Field(description="Total simulated duration (s)")
    progress_percent: float = Field(description="Progress percentage (0-100)")
    events_processed: int = Field(description="Events dequeued so far")
    joined_nodes: int = Field(description="Nodes currently attached to the DODAG")
    dao_transmissions: int = Field(description="DAO transmissions so far")


class RunStatus(BaseModel):
    """Current run status update."""

    type: ProgressType = ProgressType.RUN_STATUS
    state: RunState = Field(description="Current run state")
    message: Optional[str] = Field(default=None, description="Status message")
    timestamp: datetime = Field(default_factory=datetime.now)


class Alarm(BaseModel):
    """Root-side alarm raised by a trigger-bit DAO the root did not cause."""

    type: ProgressType = ProgressType.ALARM
    time_s: float = Field(description="Simulated time the DAO reached the root (s)")
    reporting_origin: int = Field(description="Origin of the trigger-bit DAO")
    hop_trail: list[int] = Field(default_factory=list, description="Hops the DAO travelled")
    evidence: str = Field(description="Trace line of the offending DAO reception")


class NodeMetrics(BaseModel):
    """Per-node breakdown of a run."""

    node: int
    bytes_tx: int = 0
    bytes_rx: int = 0
    dao_transmissions: int = 0
    data_sent: int = 0
    data_delivered: int = 0
    power_mw: float = 0.0


class MetricsReport(BaseModel):
    """Aggregated metrics of one run."""

    dao_overhead: int = Field(description="DAO transmissions, originations plus forwards")
    dao_originations: int = Field(description="DAO messages created by their origin")
    avg_power_mw: float = Field(description="Average power per node (mW)")
    packet_loss_ratio: float = Field(ge=0.0, le=1.0, description="Mean per-node data loss ratio")
    avg_latency_s: Optional[float] = Field(default=None, description="Mean end-to-end latency (s)")
    alarms: list[Alarm] = Field(default_factory=list, description="Alarms raised at the root")
    first_attack_s: Optional[float] = Field(default=None, description="Time of the first attack increment (s)")
    per_node: list[NodeMetrics] = Field(default_factory=list, description="Per-node breakdown")

    @property
    def detected(self) -> bool:
        """Whether the root raised at least one alarm."""
        return bool(self.alarms)

    @property
    def time_to_detect_s(self) -> Optional[float]:
        """Delay between the first attack increment and the first alarm."""
        if not self.alarms or self.first_attack_s is None:
            return None
        return self.alarms[0].time_s - self.first_attack_s


class RunResult(BaseModel):
    """Message sent when a run completes."""

    type: ProgressType = ProgressType.RUN_COMPLETE
    mode: Mode
    n_nodes: int
    topology_seed: int
    scenario_seed: int
    attack: bool
    attacker: Optional[int] = None
    k: int
    report: MetricsReport
    events_processed: int = 0
    trace_path: Optional[str] = None
    timestamp: datetime = Field(default_factory=datetime.now)


class SweepRow(BaseModel):
    """One row of the sweep CSV."""

    mode: Mode
    n: int
    seed: int
    attack: bool
    k: int
    dao_overhead: Optional[int] = None
    avg_power_mw: Optional[float] = None
    packet_loss_ratio: Optional[float] = None
    avg_latency_s: Optional[float] = None
    detected: Optional[bool] = None
    time_to_detect_s: Optional[float] = None
    error_reason: Optional[str] = Field(default=None, description="Error if the run failed")


class DetectRateRow(BaseModel):
    """One row of the detect-rate CSV."""

    mode: Mode = Mode.NON_STORING
    n: int
    k: int
    seed: int
    detection_rate: Optional[float] = None
    error_reason: Optional[str] = None


class RunRequest(BaseModel):
    """Request to start a run through the results service."""

    overrides: list[str] = Field(default_factory=list, description="Dotted section.key=value overrides")
    save_trace: bool = Field(default=True, description="Write the trace file next to the results")


class DetectRateRequest(BaseModel):
    """Request for a detection-rate analysis."""

    sizes: list[int] = Field(default_factory=lambda: [20, 30, 40, 50])
    ks: list[int] = Field(default_factory=lambda: [0, 1, 2])
    seeds: int = Field(default=10, ge=1)
    mode: Optional[Mode] = Field(default=None, description="Mode of operation; the configured one if unset")
