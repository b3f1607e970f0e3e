"""WebSocket connection management and callbacks."""

import asyncio
import json
from typing import Any, Callable, Optional

from fastapi import WebSocket
from pydantic import BaseModel

from ..models import Alarm, LogMessage, RunProgress, RunResult
from ..simulator.engine import SimulationCallbacks


class ConnectionManager:
    """Manage WebSocket connections and broadcast messages."""

    def __init__(self):
        self.active_connections: list[WebSocket] = []
        self._lock = asyncio.Lock()

    async def connect(self, websocket: WebSocket) -> None:
        """Accept and store a new WebSocket connection."""
        await websocket.accept()
        async with self._lock:
            self.active_connections.append(websocket)

    async def disconnect(self, websocket: WebSocket) -> None:
        async with self._lock:
            if websocket in self.active_connections:
                self.active_connections.remove(websocket)

    @staticmethod
    def _encode(message: dict[str, Any] | BaseModel) -> str:
        if isinstance(message, BaseModel):
            return message.model_dump_json()
        return json.dumps(message, default=str)

    async def broadcast(self, message: dict[str, Any] | BaseModel) -> None:
        """Send a message to every connected client, dropping dead ones."""
        data = self._encode(message)

        async with self._lock:
            disconnected = []
            for connection in self.active_connections:
                try:
                    await connection.send_text(data)
                except Exception:
                    disconnected.append(connection)

            for conn in disconnected:
                if conn in self.active_connections:
                    self.active_connections.remove(conn)

    async def send_personal(self, websocket: WebSocket, message: dict[str, Any] | BaseModel) -> None:
        try:
            await websocket.send_text(self._encode(message))
        except Exception:
            await self.disconnect(websocket)

    @property
    def connection_count(self) -> int:
        return len(self.active_connections)


def create_websocket_callbacks(
    manager: ConnectionManager,
    loop: asyncio.AbstractEventLoop,
    on_complete_side_effect: Optional[Callable[[RunResult], None]] = None,
) -> SimulationCallbacks:
    """Create simulation callbacks that broadcast via WebSocket.

    The simulation runs in a worker thread, so every message is handed to
    ``loop`` with ``run_coroutine_threadsafe``.

    Args:
        manager: ConnectionManager to broadcast through.
        loop: Event loop serving the websocket clients.
        on_complete_side_effect: Optional callable invoked with the finished run (e.g. to save it).
    """

    def schedule_broadcast(message: BaseModel) -> None:
        asyncio.run_coroutine_threadsafe(manager.broadcast(message), loop)

    def on_progress(progress: RunProgress) -> None:
        schedule_broadcast(progress)

    def on_alarm(alarm: Alarm) -> None:
        schedule_broadcast(alarm)

    def on_log(log: LogMessage) -> None:
        schedule_broadcast(log)

    def on_complete(result: RunResult) -> None:
        if on_complete_side_effect:
            on_complete_side_effect(result)
        schedule_broadcast(result)

    return SimulationCallbacks(
        on_log=on_log,
        on_progress=on_progress,
        on_alarm=on_alarm,
        on_complete=on_complete,
    )
