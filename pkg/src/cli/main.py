"""CLI interface using Typer."""

import json
import os
from datetime import datetime
from pathlib import Path
from typing import List, Optional

import typer

# Default output directory - use RESULTS_DIR env var if set (for Docker)
DEFAULT_OUTPUT_DIR = Path(os.environ.get("RESULTS_DIR", "."))

from ..config import ScenarioConfig, load_config, merge_overrides
from ..models import Alarm, LogMessage, MetricsReport, Mode, RunProgress, RunResult, SweepRow
from ..simulator.engine import SimulationCallbacks, replay as replay_trace, run_scenario
from ..simulator.sweep import (
    DEFAULT_VARIANTS,
    SweepCallbacks,
    Variant,
    attack_gap,
    detect_rate_rows,
    seed_range,
    summarize_detect_rate,
    sweep as run_sweep,
    write_detect_rate_csv,
    write_summary_csv,
    write_sweep_csv,
)

EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

# ANSI Color Codes
GREEN = "\033[92m"
YELLOW = "\033[93m"
RED = "\033[91m"
RESET = "\033[0m"

# Enable ANSI on Windows
try:
    import colorama
    colorama.init()
except ImportError:
    pass

app = typer.Typer(
    name="rpl-dao-sim",
    help="RPL DAO induction attack simulator",
    add_completion=False,
)


def on_log(log: LogMessage) -> None:
    if log.level == "error":
        print(RED + log.message + RESET)
    elif log.level == "warning":
        print(YELLOW + log.message + RESET)
    else:
        print(GREEN + log.message + RESET)


def create_cli_callbacks(quiet: bool = False) -> SimulationCallbacks:
    """Create callbacks that print to the console."""

    def on_progress(progress: RunProgress) -> None:
        print(
            f"[{progress.progress_percent:5.1f}%] "
            f"t={progress.sim_time_s:7.1f}s | "
            f"events: {progress.events_processed:8d} | "
            f"joined: {progress.joined_nodes:3d} | "
            f"DAO tx: {progress.dao_transmissions:6d}"
            + RESET
        )

    def on_alarm(alarm: Alarm) -> None:
        trail = " -> ".join(str(n) for n in alarm.hop_trail)
        print(RED + f"ALARM at {alarm.time_s:.3f}s: trigger-bit DAO from node {alarm.reporting_origin} ({trail})" + RESET)

    if quiet:
        return SimulationCallbacks(on_alarm=on_alarm)
    return SimulationCallbacks(on_log=on_log, on_progress=on_progress, on_alarm=on_alarm)


def print_report(report: MetricsReport, attacker: Optional[int] = None) -> None:
    print(GREEN + "\n--- Report ---" + RESET)
    print(GREEN + f"  DAO overhead: {report.dao_overhead} transmissions ({report.dao_originations} originated)" + RESET)
    print(GREEN + f"  Average power: {report.avg_power_mw:.4f} mW" + RESET)
    print(GREEN + f"  Packet loss ratio: {report.packet_loss_ratio:.4f}" + RESET)
    if report.avg_latency_s is None:
        print(YELLOW + "  Average latency: n/a (no packet delivered)" + RESET)
    else:
        print(GREEN + f"  Average latency: {report.avg_latency_s * 1000:.2f} ms" + RESET)
    if attacker is not None:
        print(YELLOW + f"  Attacker: node {attacker}" + RESET)
    if report.detected:
        print(RED + f"  Alarms: {len(report.alarms)}, first after {report.time_to_detect_s:.3f}s" + RESET)
    else:
        print(GREEN + "  Alarms: none" + RESET)


def save_results(result: RunResult, output_dir: Path) -> Path:
    """Save a run report to a timestamped JSON file."""
    output_dir.mkdir(parents=True, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    attack = "attack" if result.attack else "baseline"
    filename = f"rpl_run_{result.mode.value}_n{result.n_nodes}_seed{result.scenario_seed}_{attack}_{timestamp}.json"
    filepath = output_dir / filename

    with open(filepath, "w") as f:
        json.dump(result.model_dump(mode="json"), f, indent=4)

    print(GREEN + f"Results saved to {filepath}" + RESET)
    return filepath


def parse_int_list(text: str, option: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        print(RED + f"Error: {option} expects comma-separated integers, got '{text}'" + RESET)
        raise typer.Exit(EXIT_CONFIG_ERROR)
    return values


def load_scenario(config_path: Optional[Path], overrides: list[str]) -> ScenarioConfig:
    """Load config.json and apply overrides; config problems exit with code 2."""
    try:
        config = load_config(config_path)
        if overrides:
            config = merge_overrides(config, overrides)
        return config
    except ValueError as e:
        print(RED + f"Config error: {e}" + RESET)
        raise typer.Exit(EXIT_CONFIG_ERROR)


@app.command()
def run(
    config_path: Optional[Path] = typer.Option(None, "--config", help="Path to config.json"),
    overrides: List[str] = typer.Option(
        [], "--set", "-s", help="Override any scenario key, e.g. --set attacker.enabled=true"
    ),
    mode: Optional[Mode] = typer.Option(None, "--mode", help="Mode of operation"),
    nodes: Optional[int] = typer.Option(None, "-n", "--nodes", help="Number of nodes, root included"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Topology and scenario seed"),
    attack: Optional[bool] = typer.Option(None, "--attack/--no-attack", help="Run the DAO induction attack"),
    attacker: Optional[int] = typer.Option(None, "--attacker", help="Attacker node id"),
    k: Optional[int] = typer.Option(None, "-k", help="Enable detection with k extra DAO parents"),
    duration: Optional[float] = typer.Option(None, "--duration", help="Simulated time (s)"),
    trace_out: Optional[Path] = typer.Option(None, "--trace-out", help="Write the event trace here"),
    output_dir: Optional[Path] = typer.Option(None, "-o", "--output-dir", help="Save the report JSON here"),
    quiet: bool = typer.Option(False, "-q", "--quiet", help="Only print the report"),
):
    """
    Simulate one scenario and print its metrics.

    Examples:

        # 30 nodes, non-storing mode, under attack
        python -m src.cli.main run -n 30 --mode non_storing --attack

        # Detection with two extra DAO parents, keep the trace
        python -m src.cli.main run --attack -k 2 --trace-out run.trace
    """
    shortcuts = []
    if mode is not None:
        shortcuts.append(f"simulation.mode={mode.value}")
    if nodes is not None:
        shortcuts.append(f"topology.n_nodes={nodes}")
    if seed is not None:
        shortcuts += [f"topology.seed={seed}", f"simulation.seed={seed}"]
    if attack is not None:
        shortcuts.append(f"attacker.enabled={json.dumps(attack)}")
    if attacker is not None:
        shortcuts.append(f"attacker.node={attacker}")
    if k is not None:
        shortcuts += ["detection.enabled=true", f"detection.k={k}"]
    if duration is not None:
        shortcuts.append(f"simulation.duration_s={duration}")

    config = load_scenario(config_path, shortcuts + list(overrides))

    try:
        result = run_scenario(config, create_cli_callbacks(quiet), trace_out)
    except ValueError as e:
        print(RED + f"Config error: {e}" + RESET)
        raise typer.Exit(EXIT_CONFIG_ERROR)
    except Exception as e:
        print(RED + f"Simulation failed: {e}" + RESET)
        raise typer.Exit(EXIT_RUNTIME_ERROR)

    print_report(result.report, result.attacker)
    if output_dir is not None:
        save_results(result, output_dir)


@app.command()
def sweep(
    config_path: Optional[Path] = typer.Option(None, "--config", help="Path to config.json"),
    overrides: List[str] = typer.Option([], "--set", "-s", help="Override any scenario key"),
    sizes: str = typer.Option("20,30,40,50", "--sizes", help="Comma-separated node counts"),
    seeds: int = typer.Option(10, "--seeds", min=1, help="Seeds per size"),
    variants: List[str] = typer.Option(
        [], "--variant", help="mode:attack|baseline[:k], repeatable; default is both modes with and without attack"
    ),
    workers: int = typer.Option(1, "--workers", "-w", min=1, help="Parallel worker processes"),
    csv_out: Path = typer.Option(DEFAULT_OUTPUT_DIR / "sweep.csv", "--csv-out", help="Per-run CSV"),
    summary_out: Optional[Path] = typer.Option(None, "--summary-out", help="Seed-averaged CSV"),
):
    """
    Run sizes x seeds x variants and write one CSV row per run.

    Example:
        python -m src.cli.main sweep --sizes 20,30 --seeds 5 --workers 4
    """
    config = load_scenario(config_path, list(overrides))
    size_list = parse_int_list(sizes, "--sizes")
    try:
        variant_list = [Variant.parse(v) for v in variants] if variants else DEFAULT_VARIANTS
    except ValueError as e:
        print(RED + f"Config error: {e}" + RESET)
        raise typer.Exit(EXIT_CONFIG_ERROR)

    try:
        rows = run_sweep(
            config,
            size_list,
            seeds,
            variant_list,
            workers=workers,
            callbacks=SweepCallbacks(on_log=on_log),
        )
        csv_out.parent.mkdir(parents=True, exist_ok=True)
        write_sweep_csv(rows, csv_out)
        summary_path = summary_out or csv_out.with_name(csv_out.stem + "_summary.csv")
        summary = write_summary_csv(rows, summary_path)
    except Exception as e:
        print(RED + f"Sweep failed: {e}" + RESET)
        raise typer.Exit(EXIT_RUNTIME_ERROR)

    print(GREEN + f"\n{len(rows)} rows written to {csv_out}" + RESET)
    print(GREEN + f"Summary written to {summary_path}" + RESET)
    if not summary.empty:
        gap = attack_gap(summary)
        if not gap.empty:
            print(GREEN + "\n--- DAO overhead, attack minus baseline ---" + RESET)
            print(gap.to_string(index=False))

    failed: list[SweepRow] = [r for r in rows if r.error_reason]
    if failed and len(failed) == len(rows):
        raise typer.Exit(EXIT_RUNTIME_ERROR)


@app.command("detect-rate")
def detect_rate(
    config_path: Optional[Path] = typer.Option(None, "--config", help="Path to config.json"),
    overrides: List[str] = typer.Option([], "--set", "-s", help="Override any scenario key"),
    sizes: str = typer.Option("20,30,40,50", "--sizes", help="Comma-separated node counts"),
    ks: str = typer.Option("0,1,2", "--ks", help="Comma-separated extra DAO parent counts"),
    seeds: int = typer.Option(10, "--seeds", min=1, help="Topologies per size"),
    mode: Optional[Mode] = typer.Option(None, "--mode", help="storing or non_storing (default: from config)"),
    csv_out: Path = typer.Option(DEFAULT_OUTPUT_DIR / "detect_rate.csv", "--csv-out", help="Per-topology CSV"),
    summary_out: Optional[Path] = typer.Option(None, "--summary-out", help="Mean rate per (n, k)"),
):
    """
    Detection rate of the converged DODAG over random topologies.

    Example:
        python -m src.cli.main detect-rate --ks 0,1,2 --seeds 10
    """
    config = load_scenario(config_path, list(overrides))
    size_list = parse_int_list(sizes, "--sizes")
    k_list = parse_int_list(ks, "--ks")
    if any(k < 0 for k in k_list):
        print(RED + "Config error: --ks values must be non-negative" + RESET)
        raise typer.Exit(EXIT_CONFIG_ERROR)

    try:
        rows = detect_rate_rows(
            config.topology,
            size_list,
            k_list,
            seed_range(config, seeds),
            on_log=on_log,
            mode=mode or config.simulation.mode,
        )
        csv_out.parent.mkdir(parents=True, exist_ok=True)
        write_detect_rate_csv(rows, csv_out)
        summary = summarize_detect_rate(rows)
        summary_path = summary_out or csv_out.with_name(csv_out.stem + "_summary.csv")
        summary.to_csv(summary_path, index=False)
    except Exception as e:
        print(RED + f"Detection-rate analysis failed: {e}" + RESET)
        raise typer.Exit(EXIT_RUNTIME_ERROR)

    print(GREEN + f"{len(rows)} rows written to {csv_out}" + RESET)
    if not summary.empty:
        print(summary.to_string(index=False))


@app.command()
def replay(
    trace: Path = typer.Argument(..., help="Trace file written with --trace-out"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
):
    """
    Recompute the metrics of a saved trace.

    Example:
        python -m src.cli.main replay run.trace
    """
    if not trace.exists():
        print(RED + f"Error: trace {trace} does not exist" + RESET)
        raise typer.Exit(EXIT_CONFIG_ERROR)

    try:
        _, report = replay_trace(trace)
    except ValueError as e:
        print(RED + f"Invalid trace: {e}" + RESET)
        raise typer.Exit(EXIT_RUNTIME_ERROR)

    if as_json:
        print(report.model_dump_json(indent=2))
    else:
        print_report(report)


@app.command()
def serve(
    host: str = typer.Option("0.0.0.0", "--host", help="Host to bind to"),
    port: int = typer.Option(8000, "--port", "-p", help="Port to bind to"),
    reload: bool = typer.Option(False, "--reload", help="Enable auto-reload for development"),
):
    """
    Start the results service.

    Example:
        python -m src.cli.main serve --port 8080
    """
    import uvicorn

    print(GREEN + f"Starting RPL DAO simulator service on http://{host}:{port}" + RESET)
    uvicorn.run(
        "src.web.app:app",
        host=host,
        port=port,
        reload=reload,
    )


def main():
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
