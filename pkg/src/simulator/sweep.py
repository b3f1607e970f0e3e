"""Batch runs: the size x seed x variant sweep and the detection-rate analysis."""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

import pandas as pd

from ..config import ScenarioConfig, TopologyConfig, merge
from ..models import DetectRateRow, LogMessage, Mode, SweepRow
from .detection import detection_rate
from .dodag import build_dodag
from .engine import run_scenario
from .topology import TopologyError, generate

SWEEP_COLUMNS = [
    "mode",
    "n",
    "seed",
    "attack",
    "k",
    "dao_overhead",
    "avg_power_mw",
    "packet_loss_ratio",
    "avg_latency_s",
    "detected",
    "time_to_detect_s",
    "error_reason",
]
SWEEP_METRICS = ["dao_overhead", "avg_power_mw", "packet_loss_ratio", "avg_latency_s", "detected", "time_to_detect_s"]
DETECT_RATE_COLUMNS = ["mode", "n", "k", "seed", "detection_rate", "error_reason"]


@dataclass(frozen=True)
class Variant:
    """One column of the sweep: mode of operation, attack on/off, extra DAO parents."""

    mode: Mode
    attack: bool
    k: int = 0

    @classmethod
    def parse(cls, text: str) -> "Variant":
        """Parse ``mode:attack|baseline[:k]``, e.g. ``non_storing:attack:2``."""
        parts = text.strip().split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"Variant '{text}' is not of the form mode:attack|baseline[:k]")
        mode = Mode(parts[0])
        if parts[1] not in ("attack", "baseline"):
            raise ValueError(f"Variant '{text}': expected 'attack' or 'baseline', got '{parts[1]}'")
        k = int(parts[2]) if len(parts) == 3 else 0
        if k < 0:
            raise ValueError(f"Variant '{text}': k must be non-negative")
        return cls(mode=mode, attack=parts[1] == "attack", k=k)

    def __str__(self) -> str:
        return f"{self.mode.value}:{'attack' if self.attack else 'baseline'}:{self.k}"


DEFAULT_VARIANTS = [
    Variant(Mode.STORING, False),
    Variant(Mode.STORING, True),
    Variant(Mode.NON_STORING, False),
    Variant(Mode.NON_STORING, True),
]


@dataclass
class SweepCallbacks:
    """Callbacks for batch progress."""

    on_log: Optional[Callable[[LogMessage], None]] = None
    on_row: Optional[Callable[[SweepRow], None]] = None


def scenario_for(base: ScenarioConfig, n: int, seed: int, variant: Variant) -> ScenarioConfig:
    """Scenario of one sweep cell; both seeds follow the seed index."""
    data = merge(
        base.model_dump(mode="json"),
        {
            "simulation": {"mode": variant.mode.value, "seed": seed},
            "topology": {"n_nodes": n, "seed": seed, "layout_file": None},
            "attacker": {"enabled": variant.attack, "node": None},
            "detection": {"enabled": variant.k > 0, "k": variant.k},
        },
    )
    return ScenarioConfig(**data)


def run_row(job: tuple[dict, int, int, Variant]) -> SweepRow:
    """Run one sweep cell; failures become an ``error_reason``."""
    base_data, n, seed, variant = job
    row = SweepRow(mode=variant.mode, n=n, seed=seed, attack=variant.attack, k=variant.k)
    try:
        result = run_scenario(scenario_for(ScenarioConfig(**base_data), n, seed, variant))
    except TopologyError as e:
        return row.model_copy(update={"error_reason": f"TOPOLOGY_DISCONNECTED: {e}"})
    except ValueError as e:
        return row.model_copy(update={"error_reason": f"INVALID_SCENARIO: {e}"})
    except Exception as e:
        return row.model_copy(update={"error_reason": f"RUNTIME_ERROR: {e}"})

    report = result.report
    return row.model_copy(
        update={
            "dao_overhead": report.dao_overhead,
            "avg_power_mw": report.avg_power_mw,
            "packet_loss_ratio": report.packet_loss_ratio,
            "avg_latency_s": report.avg_latency_s,
            "detected": report.detected,
            "time_to_detect_s": report.time_to_detect_s,
        }
    )


def seed_range(config: ScenarioConfig, seeds: int) -> list[int]:
    """Seed indices of a batch, starting at the configured topology seed."""
    return list(range(config.topology.seed, config.topology.seed + seeds))


def sweep(
    config: ScenarioConfig,
    sizes: Iterable[int],
    seeds: int,
    variants: Iterable[Variant] = DEFAULT_VARIANTS,
    workers: int = 1,
    callbacks: Optional[SweepCallbacks] = None,
) -> list[SweepRow]:
    """Run the cross product sizes x seeds x variants.

    Rows come back in job order whatever the number of workers, so a sweep
    with fixed seeds always yields the same CSV.
    """
    callbacks = callbacks or SweepCallbacks()
    base = config.model_dump(mode="json")
    variants = list(variants)
    jobs = [(base, n, seed, v) for n in sizes for seed in seed_range(config, seeds) for v in variants]

    def log(level: str, message: str) -> None:
        if callbacks.on_log:
            callbacks.on_log(LogMessage(level=level, message=message))

    log("info", f"Sweep: {len(jobs)} runs on {workers} worker(s)")

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(run_row, jobs)
            rows = _collect(results, len(jobs), callbacks, log)
    else:
        rows = _collect(map(run_row, jobs), len(jobs), callbacks, log)

    failed = sum(1 for r in rows if r.error_reason)
    if failed:
        log("warning", f"{failed} of {len(rows)} runs failed")
    return rows


def _collect(results: Iterable[SweepRow], total: int, callbacks: SweepCallbacks, log) -> list[SweepRow]:
    rows = []
    for i, row in enumerate(results, 1):
        rows.append(row)
        if row.error_reason:
            log("warning", f"[{i}/{total}] {row.mode.value} n={row.n} seed={row.seed}: {row.error_reason}")
        else:
            log("info", f"[{i}/{total}] {row.mode.value} n={row.n} seed={row.seed} attack={row.attack} k={row.k}")
        if callbacks.on_row:
            callbacks.on_row(row)
    return rows


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Mode):
        return value.value
    return str(value)


def write_csv(rows: Iterable, columns: list[str], path: Union[str, Path]) -> None:
    """Write pydantic rows with a fixed column order."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_csv_value(data[c]) for c in columns])


def write_sweep_csv(rows: list[SweepRow], path: Union[str, Path]) -> None:
    write_csv(rows, SWEEP_COLUMNS, path)


def summarize(rows: list[SweepRow]) -> pd.DataFrame:
    """Means over seeds per (mode, attack, k, n); failed runs are left out."""
    keys = ["mode", "attack", "k", "n"]
    ok = [r.model_dump(mode="json") for r in rows if not r.error_reason]
    if not ok:
        return pd.DataFrame(columns=keys + ["runs"] + SWEEP_METRICS)

    df = pd.DataFrame(ok)
    df["detected"] = df["detected"].astype(float)
    for column in SWEEP_METRICS:
        df[column] = pd.to_numeric(df[column], errors="coerce")

    grouped = df.groupby(keys, sort=True)
    summary = grouped[SWEEP_METRICS].mean()
    summary.insert(0, "runs", grouped.size())
    return summary.reset_index()


def attack_gap(summary: pd.DataFrame, metric: str = "dao_overhead") -> pd.DataFrame:
    """Attack minus baseline of ``metric`` per (mode, k, n)."""
    table = summary.pivot_table(index=["mode", "k", "n"], columns="attack", values=metric)
    if True not in table.columns or False not in table.columns:
        return pd.DataFrame(columns=["mode", "k", "n", "gap"])
    table["gap"] = table[True] - table[False]
    return table[["gap"]].reset_index().rename_axis(None, axis=1)


def write_summary_csv(rows: list[SweepRow], path: Union[str, Path]) -> pd.DataFrame:
    summary = summarize(rows)
    summary.to_csv(path, index=False)
    return summary


def detect_rate_rows(
    params: TopologyConfig,
    sizes: Iterable[int],
    ks: Iterable[int],
    seeds: Iterable[int],
    on_log: Optional[Callable[[LogMessage], None]] = None,
    mode: Mode = Mode.NON_STORING,
) -> list[DetectRateRow]:
    """Detection rate of the converged DODAG for every (n, seed, k).

    Pure graph analysis over random layouts; no simulation is run.
    """
    ks = list(ks)
    rows = []
    for n in sizes:
        for seed in seeds:
            try:
                topology = generate(n, seed, params)
            except TopologyError as e:
                rows.extend(
                    DetectRateRow(mode=mode, n=n, k=k, seed=seed, error_reason=f"TOPOLOGY_DISCONNECTED: {e}")
                    for k in ks
                )
                continue
            for k in ks:
                rate = detection_rate(build_dodag(topology, k), on_log=on_log, mode=mode)
                rows.append(DetectRateRow(mode=mode, n=n, k=k, seed=seed, detection_rate=rate))
    return rows


def summarize_detect_rate(rows: list[DetectRateRow]) -> pd.DataFrame:
    """Mean detection rate per (mode, n, k)."""
    ok = [r.model_dump(mode="json") for r in rows if r.error_reason is None]
    if not ok:
        return pd.DataFrame(columns=["mode", "n", "k", "topologies", "detection_rate"])
    grouped = pd.DataFrame(ok).groupby(["mode", "n", "k"], sort=True)

    summary = grouped[["detection_rate"]].mean()
    summary.insert(0, "topologies", grouped.size())
    return summary.reset_index()


def write_detect_rate_csv(rows: list[DetectRateRow], path: Union[str, Path]) -> None:
    write_csv(rows, DETECT_RATE_COLUMNS, path)
