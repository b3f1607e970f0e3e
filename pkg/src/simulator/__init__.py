from .detection import detectability, detection_rate
from .dodag import Dodag, build_dodag
from .engine import SimulationCallbacks, Simulator, build_topology, replay, run_scenario
from .sweep import SweepCallbacks, Variant, detect_rate_rows, sweep
from .topology import Topology, TopologyError, generate

__all__ = [
    "Dodag",
    "SimulationCallbacks",
    "Simulator",
    "SweepCallbacks",
    "Topology",
    "TopologyError",
    "Variant",
    "build_dodag",
    "build_topology",
    "detect_rate_rows",
    "detectability",
    "detection_rate",
    "generate",
    "replay",
    "run_scenario",
    "sweep",
]
