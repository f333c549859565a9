"""Local web service: datasets, metrics, comparisons, bundles, playback.

All dataset-derived responses come from immutable, lazily loaded and
cached models, so repeated reads of the same resource are byte-identical
while the data folder is unchanged.  The one mutable object is the
playback session: a single writer applies commands (from any number of
WebSocket clients) in a total order under a lock, the server's own timer
ticks the clock while playing, and every state change is broadcast with
a strictly increasing revision.
"""

from __future__ import annotations

import asyncio
import contextlib
import socket
from dataclasses import replace
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import comparison, dataset_io, metrics
from .bundling import BundleParams, bundle_frame, bundles_to_dicts
from .errors import (
    InvalidCommand,
    InvalidSpeed,
    JumpOutOfRange,
    PortInUse,
    TempocaveError,
)
from .metrics import classify_edges
from .model import DatasetSummary, DynamicConnectome
from .playback import PlaybackCommand, PlaybackState, session_apply, session_tick


class ServiceError(Exception):
    """HTTP-mappable error with a machine-readable code."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class DatasetStore:
    """Lazy loader with for-the-lifetime-of-the-process caches."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._summaries: Optional[list[DatasetSummary]] = None
        self._datasets: dict[str, DynamicConnectome] = {}
        self._metrics: dict[str, list[metrics.NodeSummary]] = {}
        self._overlays: dict[str, dict] = {}
        self._bundles: dict[tuple, list[dict]] = {}

    def summaries(self) -> list[DatasetSummary]:
        if self._summaries is None:
            self._summaries = dataset_io.scan_root(self.root)
        return self._summaries

    def get(self, dataset_id: str) -> DynamicConnectome:
        if dataset_id not in self._datasets:
            path = self.root / dataset_id
            if not (path.is_dir() and (path / "manifest.json").is_file()):
                raise ServiceError(404, "DATASET_NOT_FOUND", f"no dataset {dataset_id!r}")
            try:
                self._datasets[dataset_id] = dataset_io.load_dataset(path)
            except TempocaveError as exc:
                raise ServiceError(422, "DATASET_INVALID", str(exc)) from exc
        return self._datasets[dataset_id]

    def node_summaries(self, dataset_id: str) -> list[metrics.NodeSummary]:
        if dataset_id not in self._metrics:
            self._metrics[dataset_id] = metrics.summarize(self.get(dataset_id))
        return self._metrics[dataset_id]

    def overlay(self, left: str, right: str, relabel: bool) -> tuple[str, dict]:
        compare_id = f"{left}~{right}~{int(relabel)}"
        if compare_id not in self._overlays:
            try:
                overlay = comparison.build_overlay(self.get(left), self.get(right), relabel)
            except TempocaveError as exc:
                raise ServiceError(422, "COMPARISON_FAILED", str(exc)) from exc
            doc = {"left": left, "right": right}
            doc.update(comparison.overlay_to_dict(overlay))
            self._overlays[compare_id] = doc
        return compare_id, self._overlays[compare_id]

    def cached_overlay(self, compare_id: str) -> dict:
        if compare_id not in self._overlays:
            raise ServiceError(404, "COMPARE_NOT_FOUND", f"no comparison {compare_id!r}")
        return self._overlays[compare_id]

    def bundle(self, dataset_id: str, frame: int, min_abs_weight: float,
               layout_name: Optional[str]) -> list[dict]:
        key = (dataset_id, frame, min_abs_weight, layout_name)
        if key not in self._bundles:
            connectome = self.get(dataset_id)
            name = layout_name or connectome.manifest.default_layout
            if name not in connectome.layouts:
                raise ServiceError(404, "LAYOUT_NOT_FOUND", f"no layout {name!r}")
            edge_frame = connectome.frame(frame)
            pairs = [
                (e.source, e.target)
                for e in classify_edges(edge_frame, min_abs_weight)
                if e.passes_filter
            ]
            bundles = bundle_frame(connectome.layouts[name], pairs, BundleParams())
            self._bundles[key] = bundles_to_dicts(bundles)
        return self._bundles[key]


class SessionHub:
    """Owns the playback state, its command queue, and connected sockets."""

    def __init__(self, store: DatasetStore, tick_interval: float = 0.5):
        self.store = store
        self.tick_interval = tick_interval
        self.state = PlaybackState()
        self.lock = asyncio.Lock()
        self.sockets: list[WebSocket] = []

    def t_common(self) -> int:
        frames = [self.store.get(d).num_frames for d in self.state.datasets]
        return min(frames) if frames else 1

    async def set_datasets(self, dataset_ids: list[str]) -> PlaybackState:
        if not 1 <= len(dataset_ids) <= 2:
            raise ServiceError(400, "INVALID_PARAMETER", "session takes one or two datasets")
        for d in dataset_ids:
            self.store.get(d)  # raises if unknown/invalid
        async with self.lock:
            before = self.state.revision
            self.state = replace(
                self.state,
                datasets=tuple(dataset_ids),
                frame=0,
                playing=False,
                revision=self.state.revision + 1,
            )
            changed = self.state.revision != before
        if changed:
            await self.broadcast()
        return self.state

    async def apply(self, command: PlaybackCommand) -> PlaybackState:
        async with self.lock:
            before = self.state.revision
            self.state = session_apply(self.state, command, self.t_common())
            changed = self.state.revision != before
        if changed:
            await self.broadcast()
        return self.state

    async def tick(self) -> None:
        async with self.lock:
            before = self.state.revision
            self.state = session_tick(self.state, self.t_common())
            changed = self.state.revision != before
        if changed:
            await self.broadcast()

    def state_message(self) -> dict:
        return {
            "type": "state",
            "frame": self.state.frame,
            "playing": self.state.playing,
            "speed": self.state.speed,
            "synced": self.state.synced,
            "revision": self.state.revision,
        }

    async def broadcast(self) -> None:
        message = self.state_message()
        for ws in list(self.sockets):
            try:
                await ws.send_json(message)
            except Exception:
                with contextlib.suppress(ValueError):
                    self.sockets.remove(ws)

    async def run_ticker(self) -> None:
        while True:
            if self.state.playing:
                await asyncio.sleep(self.tick_interval / self.state.speed)
                if self.state.playing:
                    await self.tick()
            else:
                await asyncio.sleep(self.tick_interval)


def default_static_dir() -> Optional[Path]:
    """Built viewer assets, when the repo checkout has them."""
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if (candidate / "index.html").is_file() else None


def create_app(
    root,
    tick_interval: float = 0.5,
    static_dir: Optional[Path] = None,
) -> FastAPI:
    """Build the service app over one data folder."""
    store = DatasetStore(Path(root))
    hub = SessionHub(store, tick_interval=tick_interval)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        ticker = asyncio.create_task(hub.run_ticker())
        yield
        ticker.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await ticker

    app = FastAPI(title="tempocave", lifespan=lifespan)
    app.state.store = store
    app.state.hub = hub

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return JSONResponse({"code": exc.code, "message": exc.message}, status_code=exc.status)

    def checked_frame(connectome: DynamicConnectome, t: int) -> int:
        if not 0 <= t < connectome.num_frames:
            raise ServiceError(
                404, "FRAME_OUT_OF_RANGE",
                f"frame {t} outside [0, {connectome.num_frames})",
            )
        return t

    def checked_weight(min_abs_weight: float) -> float:
        if min_abs_weight < 0:
            raise ServiceError(400, "INVALID_PARAMETER", "min_abs_weight must be >= 0")
        return min_abs_weight

    @app.get("/api/datasets")
    def list_datasets():
        return [
            {
                "id": s.id,
                "name": s.name,
                "path": str(s.path),
                "num_nodes": s.num_nodes,
                "num_frames": s.num_frames,
                "layouts": list(s.layouts),
                "ok": s.ok,
            }
            for s in store.summaries()
        ]

    @app.get("/api/datasets/{dataset_id}/manifest")
    def get_manifest(dataset_id: str):
        m = store.get(dataset_id).manifest
        doc = {"name": m.name, "num_nodes": m.num_nodes, "num_frames": m.num_frames}
        if m.frame_duration_seconds is not None:
            doc["frame_duration_seconds"] = m.frame_duration_seconds
        doc.update(default_layout=m.default_layout, layouts=list(m.layouts), signed=m.signed)
        return doc

    @app.get("/api/datasets/{dataset_id}/nodes")
    def get_nodes(dataset_id: str):
        return [
            {"id": n.id, "label": n.label, "region": n.region, "hemisphere": n.hemisphere}
            for n in store.get(dataset_id).nodes
        ]

    @app.get("/api/datasets/{dataset_id}/affiliations")
    def get_affiliations(dataset_id: str):
        c = store.get(dataset_id)
        return {
            "num_nodes": c.num_nodes,
            "num_frames": c.num_frames,
            "modules": c.affiliations.tolist(),
        }

    @app.get("/api/datasets/{dataset_id}/metrics")
    def get_metrics(dataset_id: str):
        out = []
        for s in store.node_summaries(dataset_id):
            row = {
                "id": s.node_id,
                "label": s.label,
                "flexibility_raw": s.flexibility.raw,
                "flexibility_norm": s.flexibility.normalized,
                "dominant_module": s.dwelling.dominant_module,
                "dwelling_frames": s.dwelling.dwelling_frames,
                "longest_run_frames": s.dwelling.longest_run_frames,
            }
            if s.dwelling.dwelling_seconds is not None:
                row["dwelling_seconds"] = s.dwelling.dwelling_seconds
            out.append(row)
        return out

    @app.get("/api/datasets/{dataset_id}/layouts/{layout_name}")
    def get_layout(dataset_id: str, layout_name: str):
        c = store.get(dataset_id)
        if layout_name not in c.layouts:
            raise ServiceError(404, "LAYOUT_NOT_FOUND", f"no layout {layout_name!r}")
        return {"name": layout_name, "positions": c.layouts[layout_name].positions.tolist()}

    @app.get("/api/datasets/{dataset_id}/frames/{t}/edges")
    def get_edges(dataset_id: str, t: int, min_abs_weight: float = 0.0, sign: str = "any"):
        if sign not in ("positive", "negative", "any"):
            raise ServiceError(400, "INVALID_PARAMETER",
                               "sign must be positive, negative, or any")
        c = store.get(dataset_id)
        checked_frame(c, t)
        checked_weight(min_abs_weight)
        edges = [
            {"source": e.source, "target": e.target, "weight": e.weight, "sign": e.sign}
            for e in classify_edges(c.frame(t), min_abs_weight)
            if e.passes_filter and (sign == "any" or e.sign == sign)
        ]
        return {"frame": t, "edges": edges}

    @app.get("/api/datasets/{dataset_id}/frames/{t}/bundle")
    def get_bundle(dataset_id: str, t: int, min_abs_weight: float = 0.0,
                   layout: Optional[str] = None):
        c = store.get(dataset_id)
        checked_frame(c, t)
        checked_weight(min_abs_weight)
        return store.bundle(dataset_id, t, min_abs_weight, layout)

    @app.post("/api/compare")
    def post_compare(body: dict):
        left, right = body.get("left"), body.get("right")
        relabel = body.get("relabel", True)
        if not isinstance(left, str) or not isinstance(right, str) or not isinstance(relabel, bool):
            raise ServiceError(400, "INVALID_PARAMETER",
                               "body must be {left: str, right: str, relabel?: bool}")
        compare_id, _ = store.overlay(left, right, relabel)
        return {"compare_id": compare_id}

    @app.get("/api/compare/{compare_id}")
    def get_compare(compare_id: str):
        return store.cached_overlay(compare_id)

    @app.get("/api/session")
    def get_session():
        return hub.state.to_dict()

    @app.post("/api/session")
    async def post_session(body: dict):
        datasets = body.get("datasets")
        if not isinstance(datasets, list) or not all(isinstance(d, str) for d in datasets):
            raise ServiceError(400, "INVALID_PARAMETER", "body must be {datasets: [str, ...]}")
        state = await hub.set_datasets(datasets)
        return state.to_dict()

    @app.websocket("/ws")
    async def websocket_session(ws: WebSocket):
        await ws.accept()
        hub.sockets.append(ws)
        try:
            await ws.send_json(hub.state_message())
            while True:
                try:
                    message = await ws.receive_json()
                except WebSocketDisconnect:
                    raise
                except Exception:
                    await ws.send_json({"type": "error", "code": "BAD_MESSAGE",
                                        "message": "messages must be JSON objects"})
                    continue
                if not isinstance(message, dict) or message.get("type") != "command":
                    await ws.send_json({"type": "error", "code": "BAD_MESSAGE",
                                        "message": 'expected {"type": "command", ...}'})
                    continue
                try:
                    command = PlaybackCommand(message.get("action"), message.get("value"))
                    await hub.apply(command)
                except (InvalidCommand, JumpOutOfRange, InvalidSpeed) as exc:
                    await ws.send_json({"type": "error",
                                        "code": type(exc).__name__,
                                        "message": str(exc)})
        except WebSocketDisconnect:
            pass
        finally:
            with contextlib.suppress(ValueError):
                hub.sockets.remove(ws)

    static = static_dir if static_dir is not None else default_static_dir()
    if static is not None:
        app.mount("/", StaticFiles(directory=static, html=True), name="viewer")

    return app


def serve(root, port: int = 8080, host: str = "127.0.0.1",
          static_dir: Optional[Path] = None) -> None:
    """Run the service until interrupted; raises PortInUse when already bound."""
    import uvicorn

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise PortInUse(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()

    app = create_app(root, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
