"""Scenario configuration models and loading utilities."""

import json
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from .models import AttackerSelection, Mode


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SimulationConfig(_Section):
    """Run length, mode of operation and scenario randomness."""

    duration_s: float = Field(default=1800.0, gt=0, description="Simulated time (s)")
    mode: Mode = Field(default=Mode.NON_STORING, description="RPL mode of operation")
    seed: int = Field(default=1, description="Scenario seed (MAC, timers, traffic phases)")
    join_window_s: float = Field(default=10.0, ge=0, description="Nodes power on uniformly in [0, window] (s)")


class TopologyConfig(_Section):
    """Node placement and radio ranges."""

    n_nodes: int = Field(default=20, ge=2, description="Number of nodes, root included")
    area_side_m: float = Field(default=150.0, gt=0, description="Side of the square deployment area (m)")
    tx_range_m: float = Field(default=40.0, gt=0, description="Unit-disk transmission range (m)")
    interference_range_m: float = Field(default=80.0, gt=0, description="Interference range (m)")
    seed: int = Field(default=1, description="Topology seed")
    max_attempts: int = Field(default=1000, ge=1, description="Layouts to try before giving up")
    layout_file: Optional[str] = Field(default=None, description="Load positions from a text table instead")


class TrafficConfig(_Section):
    """Upward data traffic toward the root."""

    enabled: bool = Field(default=True, description="Generate data packets")
    start_s: float = Field(default=60.0, ge=0, description="First data packet is sent after this time (s)")
    period_s: float = Field(default=60.0, gt=0, description="Data packet period per node (s)")
    packet_bytes: int = Field(default=50, gt=0, description="Data packet size (bytes)")


class RplConfig(_Section):
    """Objective function and DAO scheduling."""

    rank_step: int = Field(default=256, gt=0, description="Rank increase per hop")
    dao_delay_s: float = Field(default=4.0, ge=0, description="DAOs wait uniformly in [0, delay] (s)")
    dao_refresh_period_s: Optional[float] = Field(default=None, gt=0, description="Periodic DAO refresh (s)")
    root_dtsn_refresh_period_s: Optional[float] = Field(
        default=None, gt=0, description="Root increments its DTSN on this period (s)"
    )


class TrickleConfig(_Section):
    """DIO trickle timer."""

    imin_s: float = Field(default=4.0, gt=0, description="Minimum interval (s)")
    doublings: int = Field(default=8, ge=0, description="Interval doublings up to Imax")
    redundancy: int = Field(default=10, ge=1, description="Suppression threshold k")


class MacConfig(_Section):
    """Abstract CSMA-style MAC."""

    bitrate_bps: int = Field(default=250_000, gt=0, description="Radio bitrate (bit/s)")
    min_backoff_us: int = Field(default=320, gt=0, description="Lower backoff bound (us)")
    max_backoff_us: int = Field(default=2240, gt=0, description="Upper backoff bound for the first attempt (us)")
    max_retries: int = Field(default=3, ge=0, description="Unicast retransmissions after a failed attempt")
    queue_limit: int = Field(default=64, ge=1, description="Frames a node can hold before dropping")
    collisions: bool = Field(default=True, description="Overlapping transmissions destroy receptions")
    link_success_probability: float = Field(default=1.0, ge=0.0, le=1.0, description="Per-reception success")


class SizesConfig(_Section):
    """Control message sizes used by the energy and airtime models."""

    dio_bytes: int = Field(default=80, gt=0, description="DIO size (bytes)")
    dis_bytes: int = Field(default=40, gt=0, description="DIS size (bytes)")
    dao_bytes: int = Field(default=60, gt=0, description="DAO size (bytes)")


class EnergyConfig(_Section):
    """Radio energy model."""

    e_tx_mj_per_byte: float = Field(default=0.000576, ge=0, description="Transmit energy (mJ/byte)")
    e_rx_mj_per_byte: float = Field(default=0.000634, ge=0, description="Receive energy (mJ/byte)")
    p_idle_mw: float = Field(default=0.054, ge=0, description="Baseline power (mW)")


class AttackerConfig(_Section):
    """Malicious insider running the DAO induction attack."""

    enabled: bool = Field(default=False, description="Run the attack")
    node: Optional[int] = Field(default=None, description="Attacker node; a random root neighbour if unset")
    selection: AttackerSelection = Field(
        default=AttackerSelection.RANDOM, description="Root child to pick when no node is given"
    )
    increment_period_s: float = Field(default=30.0, gt=0, description="DTSN increment period (s)")
    start_time_s: float = Field(default=60.0, ge=0, description="First increment (s)")
    drop_descendant_daos: bool = Field(default=True, description="Drop DAOs of the attacker's descendants")


class DetectionConfig(_Section):
    """Extra DAO parents and root-side detection."""

    enabled: bool = Field(default=False, description="Apply the detection rules")
    k: int = Field(default=2, ge=0, description="Extra non-preferred DAO parents per node")
    grace_window_s: Optional[float] = Field(
        default=None, ge=0, description="Legitimate window after a root increment (s); derived if unset"
    )
    hop_latency_bound_s: float = Field(default=1.0, gt=0, description="Per-hop latency bound for the grace window (s)")


class ScenarioConfig(_Section):
    """Complete scenario configuration."""

    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    topology: TopologyConfig = Field(default_factory=TopologyConfig)
    traffic: TrafficConfig = Field(default_factory=TrafficConfig)
    rpl: RplConfig = Field(default_factory=RplConfig)
    trickle: TrickleConfig = Field(default_factory=TrickleConfig)
    mac: MacConfig = Field(default_factory=MacConfig)
    sizes: SizesConfig = Field(default_factory=SizesConfig)
    energy: EnergyConfig = Field(default_factory=EnergyConfig)
    attacker: AttackerConfig = Field(default_factory=AttackerConfig)
    detection: DetectionConfig = Field(default_factory=DetectionConfig)

    @property
    def effective_k(self) -> int:
        """Non-preferred DAO parents per node; zero unless detection is on."""
        return self.detection.k if self.detection.enabled else 0

    def validate_scenario(self) -> None:
        """Validate that cross-section parameters are sensible."""
        t = self.topology
        if t.tx_range_m > t.interference_range_m:
            raise ValueError(
                f"Transmission range {t.tx_range_m}m exceeds interference range {t.interference_range_m}m"
            )

        if self.mac.min_backoff_us > self.mac.max_backoff_us:
            raise ValueError(
                f"min_backoff_us {self.mac.min_backoff_us} is larger than max_backoff_us {self.mac.max_backoff_us}"
            )

        node = self.attacker.node
        if node is not None:
            if node == 0:
                raise ValueError("The root cannot be the attacker")
            if not 0 < node < t.n_nodes:
                raise ValueError(f"Attacker node {node} is not in a {t.n_nodes}-node topology")


def merge(base: dict, update: dict) -> dict:
    """Merge ``update`` into ``base`` recursively."""
    for key, value in update.items():
        if key in base and isinstance(base[key], dict) and isinstance(value, dict):
            merge(base[key], value)
        else:
            base[key] = value
    return base


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def merge_overrides(config: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply ``section.key=value`` overrides and return a validated copy.

    Values are read as JSON when possible (numbers, booleans, null),
    otherwise as plain strings.
    """
    updates: dict = {}
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"Override '{item}' is not of the form section.key=value")
        path, raw = item.split("=", 1)
        keys = path.strip().split(".")
        if len(keys) != 2 or not all(keys):
            raise ValueError(f"Override key '{path}' must be section.key")
        updates.setdefault(keys[0], {})[keys[1]] = _parse_value(raw.strip())

    merged = merge(config.model_dump(mode="json"), updates)
    new_config = ScenarioConfig(**merged)
    new_config.validate_scenario()
    return new_config


def load_config(config_path: Optional[Path] = None) -> ScenarioConfig:
    """Load a scenario from a JSON file or return defaults.

    Args:
        config_path: Path to config.json. If None, looks in current directory
                    and package directory.

    Returns:
        ScenarioConfig with loaded or default values.
    """
    search_paths = []

    if config_path:
        if not Path(config_path).exists():
            raise ValueError(f"Config file {config_path} does not exist")
        search_paths.append(Path(config_path))
    else:
        search_paths.append(Path.cwd() / "config.json")
        search_paths.append(Path(__file__).parent.parent / "config.json")

    for path in search_paths:
        if path.exists():
            try:
                with open(path) as f:
                    data = json.load(f)
                config = ScenarioConfig(**data)
                config.validate_scenario()
                return config
            except (json.JSONDecodeError, ValueError) as e:
                raise ValueError(f"Invalid config file {path}: {e}")

    return ScenarioConfig()


def save_config(config: ScenarioConfig, config_path: Path) -> None:
    """Save a scenario to a JSON file.

    Args:
        config: Configuration to save.
        config_path: Path to write config.json.
    """
    with open(config_path, "w") as f:
        json.dump(config.model_dump(mode="json"), f, indent=2)
