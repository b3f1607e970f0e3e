"""FastAPI results service for the RPL DAO simulator."""

import asyncio
import json
import os
from datetime import datetime
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, UploadFile, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse

from ..config import ScenarioConfig, load_config, merge, merge_overrides, save_config
from ..models import DetectRateRequest, ErrorMessage, RunRequest, RunResult, RunState, RunStatus
from ..simulator.engine import report_from_trace, run_scenario
from ..simulator.messages import parse_trace
from ..simulator.sweep import detect_rate_rows, seed_range, summarize_detect_rate
from .websocket import ConnectionManager, create_websocket_callbacks

# Paths - use env vars if set (for Docker), otherwise use local directories
PACKAGE_DIR = Path(__file__).parent.parent.parent
RESULTS_DIR = Path(os.environ.get("RESULTS_DIR", PACKAGE_DIR / "results"))
CONFIG_DIR = Path(os.environ.get("CONFIG_DIR", PACKAGE_DIR))
CONFIG_PATH = CONFIG_DIR / "config.json"

RESULT_SUFFIXES = (".json", ".csv", ".trace")


def _load_or_create_config() -> ScenarioConfig:
    """Load config from file, or create default config file if it doesn't exist."""
    if CONFIG_PATH.exists():
        return load_config(CONFIG_PATH)

    default_config = ScenarioConfig()
    CONFIG_DIR.mkdir(parents=True, exist_ok=True)
    save_config(default_config, CONFIG_PATH)
    return default_config


# Global state
app = FastAPI(
    title="RPL DAO Induction Simulator",
    description="Run scenarios, browse results and analyse traces",
    version="1.0.0",
)

manager = ConnectionManager()
config: ScenarioConfig = _load_or_create_config()
current_task: Optional[asyncio.Task] = None
last_result: Optional[RunResult] = None
run_state: RunState = RunState.IDLE


def save_final_results(result: RunResult) -> Path:
    """Save a finished run to a timestamped JSON file."""
    RESULTS_DIR.mkdir(parents=True, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d-%H%M%S-%f")
    attack = "attack" if result.attack else "baseline"
    filepath = RESULTS_DIR / f"rpl_run_{result.mode.value}_n{result.n_nodes}_seed{result.scenario_seed}_{attack}_{timestamp}.json"

    with open(filepath, "w") as f:
        json.dump(result.model_dump(mode="json"), f, indent=2)

    return filepath


async def _set_state(state: RunState, message: Optional[str] = None) -> None:
    global run_state
    run_state = state
    await manager.broadcast(RunStatus(state=state, message=message))


# --- Config endpoints ---


@app.get("/api/config")
async def get_config() -> dict:
    """Get the current configuration."""
    return config.model_dump(mode="json")


@app.put("/api/config")
async def update_config(new_config: ScenarioConfig) -> dict:
    """Replace the configuration."""
    global config
    try:
        new_config.validate_scenario()
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))

    config = new_config
    save_config(config, CONFIG_PATH)
    return {"status": "ok", "config": config.model_dump(mode="json")}


@app.patch("/api/config")
async def patch_config(updates: dict) -> dict:
    """Partially update the configuration."""
    global config

    merged = merge(config.model_dump(mode="json"), updates)

    try:
        new_config = ScenarioConfig(**merged)
        new_config.validate_scenario()
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))

    config = new_config
    save_config(config, CONFIG_PATH)
    return {"status": "ok", "config": config.model_dump(mode="json")}


# --- Run endpoints ---


@app.post("/api/runs")
async def start_run(request: RunRequest) -> dict:
    """Start a simulation of the current configuration plus ``overrides``."""
    global current_task

    if current_task and not current_task.done():
        raise HTTPException(status_code=409, detail="A run is already in progress")

    try:
        scenario = merge_overrides(config, request.overrides) if request.overrides else config
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))

    trace_path = None
    if request.save_trace:
        RESULTS_DIR.mkdir(parents=True, exist_ok=True)
        trace_path = RESULTS_DIR / f"rpl_trace_{datetime.now().strftime('%Y%m%d-%H%M%S-%f')}.trace"

    callbacks = create_websocket_callbacks(manager, asyncio.get_running_loop())

    async def run_simulation():
        global last_result
        await _set_state(RunState.RUNNING, "Simulation started")
        try:
            last_result = await asyncio.to_thread(run_scenario, scenario, callbacks, trace_path)
        except Exception as e:
            await manager.broadcast(ErrorMessage(error="Simulation failed", details=str(e)))
            await _set_state(RunState.ERROR, str(e))
            return
        save_final_results(last_result)
        await _set_state(RunState.COMPLETED, "Simulation complete")

    current_task = asyncio.create_task(run_simulation())

    return {
        "status": "started",
        "overrides": request.overrides,
        "trace_path": str(trace_path) if trace_path else None,
    }


@app.get("/api/runs/status")
async def get_run_status() -> dict:
    """Get the state of the current or last run."""
    return {
        "state": run_state.value,
        "is_running": current_task is not None and not current_task.done(),
        "connections": manager.connection_count,
    }


@app.get("/api/runs/latest")
async def get_latest_run() -> dict:
    """Get the most recent run result."""
    if last_result:
        return last_result.model_dump(mode="json")

    files = sorted(RESULTS_DIR.glob("rpl_run_*.json"), reverse=True) if RESULTS_DIR.exists() else []
    if not files:
        raise HTTPException(status_code=404, detail="No results available")

    try:
        with open(files[0]) as f:
            return json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        raise HTTPException(status_code=500, detail=f"Failed to read result: {e}")


# --- Results endpoints ---


@app.get("/api/results")
async def list_results() -> list[dict]:
    """List result, CSV and trace files."""
    if not RESULTS_DIR.exists():
        return []

    results = []
    for f in sorted(RESULTS_DIR.iterdir(), reverse=True):
        if not f.is_file() or f.suffix not in RESULT_SUFFIXES:
            continue
        try:
            stat = f.stat()
        except OSError:
            continue
        results.append({"filename": f.name, "size": stat.st_size, "modified": stat.st_mtime})

    return results


@app.get("/api/results/{filename}")
async def get_result(filename: str):
    """Get a specific result file: JSON is returned parsed, CSV and traces as files."""
    if "/" in filename or "\\" in filename or filename.startswith("."):
        raise HTTPException(status_code=400, detail="Invalid file name")

    filepath = RESULTS_DIR / filename
    if not filepath.exists() or not filepath.is_file():
        raise HTTPException(status_code=404, detail="Result not found")

    if filepath.suffix != ".json":
        return FileResponse(filepath, filename=filename)

    try:
        with open(filepath) as f:
            return json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        raise HTTPException(status_code=500, detail=f"Failed to read result: {e}")


@app.post("/api/replay")
async def replay_trace(file: UploadFile) -> dict:
    """Recompute the metrics of an uploaded trace."""
    try:
        text = (await file.read()).decode("utf-8")
        header, events = parse_trace(text)
        scenario, report = report_from_trace(header, events)
    except (UnicodeDecodeError, ValueError, KeyError) as e:
        raise HTTPException(status_code=400, detail=f"Invalid trace file: {e}")

    return {
        "status": "ok",
        "events": len(events),
        "scenario": scenario.model_dump(mode="json"),
        "report": report.model_dump(mode="json"),
    }


@app.post("/api/detect-rate")
async def detect_rate(request: DetectRateRequest) -> dict:
    """Detection rate over random topologies of the current geometry."""
    if any(k < 0 for k in request.ks):
        raise HTTPException(status_code=400, detail="k values must be non-negative")
    if any(n < 2 for n in request.sizes):
        raise HTTPException(status_code=400, detail="Sizes must be at least 2 nodes")

    rows = await asyncio.to_thread(
        detect_rate_rows,
        config.topology,
        request.sizes,
        request.ks,
        seed_range(config, request.seeds),
        mode=request.mode or config.simulation.mode,
    )
    summary = summarize_detect_rate(rows)
    return {
        "rows": [r.model_dump() for r in rows],
        "summary": summary.to_dict(orient="records"),
    }


# --- WebSocket endpoint ---


@app.websocket("/ws")
async def websocket_endpoint(websocket: WebSocket):
    """WebSocket endpoint for run progress, alarms and logs."""
    await manager.connect(websocket)
    await manager.send_personal(websocket, RunStatus(state=run_state, message="Connected"))

    try:
        while True:
            await websocket.receive_text()
    except WebSocketDisconnect:
        await manager.disconnect(websocket)
