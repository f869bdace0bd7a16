"""HTTP/WebSocket gateway for the operator dashboard.

Runs as a uvicorn server task on the master's event loop, so route handlers
can touch master state directly. The WebSocket stream mirrors state / mesh /
cloud updates plus registry changes as JSON text frames; all mutations go
through the POST endpoints. Static dashboard files (when built) are served
at /.
"""

import asyncio
import json
import logging
import secrets
from pathlib import Path

import uvicorn
from fastapi import FastAPI, Response, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..usr.types import Pose

log = logging.getLogger("scenesync.gateway")

WS_QUEUE_CAP = 256

STATIC_DIR = Path(__file__).resolve().parent.parent / "dashboard_static"


def make_gateway_app(master) -> FastAPI:
    app = FastAPI(title="scenesync gateway", docs_url=None, redoc_url=None)

    @app.get("/api/nodes")
    async def nodes():
        return master.list_nodes()

    @app.post("/api/nodes/{node_id}/rename")
    async def rename(node_id: str, body: dict):
        name = (body or {}).get("name", "")
        if not name:
            return JSONResponse({"error": "name must be non-empty"}, status_code=400)
        if node_id not in master.registry:
            return JSONResponse({"error": "unknown node"}, status_code=404)
        master.rename_node(node_id, name)
        return {"ok": True}

    async def _anchor_ctl(node_id: str, enabled: bool, pose_body):
        from ..errors import UnknownNode

        if node_id not in master.registry:
            return JSONResponse({"error": "unknown node"}, status_code=404)
        try:
            if pose_body:
                pose = Pose(
                    pos=tuple(pose_body.get("pos", (0, 0, 0))),
                    rot=tuple(pose_body.get("rot", (0, 0, 0, 1))),
                    rot_order=pose_body.get("rot_order", "xyzw"),
                )
                await master.set_anchor(node_id, pose)
            await master.set_anchor_enabled(node_id, enabled)
        except UnknownNode as exc:
            return JSONResponse({"error": str(exc)}, status_code=409)
        return {"ok": True}

    @app.post("/api/nodes/{node_id}/anchor/start")
    async def anchor_start(node_id: str, body: dict | None = None):
        # an optional pose body pushes the anchor along with enabling it
        return await _anchor_ctl(node_id, True, body)

    @app.post("/api/nodes/{node_id}/anchor/stop")
    async def anchor_stop(node_id: str):
        return await _anchor_ctl(node_id, False, None)

    @app.get("/api/scene")
    async def scene():
        return Response(content=master.scene_doc, media_type="application/json")

    @app.get("/api/assets/{hash_hex}")
    async def asset(hash_hex: str):
        blob = master.scene.assets.get(hash_hex)
        if blob is None:
            return JSONResponse({"error": "unknown asset"}, status_code=404)
        return Response(content=blob, media_type="application/octet-stream")

    @app.websocket("/api/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        queue = asyncio.Queue(maxsize=WS_QUEUE_CAP)
        node_id = secrets.token_bytes(16).hex()
        master.ws_queues.add(queue)
        master.registry.add(node_id, f"dashboard-{node_id[:6]}", "dashboard")
        try:
            await ws.send_text(
                json.dumps(
                    {
                        "type": "hello",
                        "session_id": master.session_id.hex(),
                        "scene_epoch": master.scene_epoch,
                        "node_id": node_id,
                    }
                )
            )
            while True:
                await ws.send_text(await queue.get())
        except (WebSocketDisconnect, ConnectionError, RuntimeError):
            pass
        finally:
            master.ws_queues.discard(queue)
            master.registry.remove(node_id)

    if STATIC_DIR.is_dir():
        app.mount("/", StaticFiles(directory=STATIC_DIR, html=True), name="dashboard")

    return app


def make_gateway_server(master, sock):
    """uvicorn server bound to an already-created socket; returns (server, task)."""
    config = uvicorn.Config(
        make_gateway_app(master),
        log_level="warning",
        access_log=False,
        lifespan="off",
    )
    server = uvicorn.Server(config)
    task = asyncio.get_running_loop().create_task(server.serve(sockets=[sock]), name="gateway")
    return server, task
