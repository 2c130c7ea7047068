"""HTTP/WebSocket service exposing labeling and generation.

Request bodies are validated with the sketch parser so 400 responses carry
the same field-path diagnostics as the library errors.  Unexpected failures
return 500 with a request id.  Loaded models are shared and immutable; each
request works on its own parsed copy, and the /live socket keeps its stroke
accumulator per connection.
"""

from __future__ import annotations

import json
import uuid

import numpy as np
from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from ..categories import DEFAULT_SCHEME
from ..embed.codes import fuse_codes, interpolate
from ..embed.encoders import EmbedModel
from ..embed.generator import generate
from ..embed.raster import render_sketch_raster
from ..embed.train import reconstruct
from ..errors import SketchSemError
from ..sketch import VectorSketch, parse, serialize
from ..ssi.infer import label_sketch
from ..ssi.ssem import SsemModel
from ..ssi.stem import StemModel
from .dataset import box_downsample
from .pngio import b64_to_image, image_to_b64

MAX_INTERPOLATE_STEPS = 64


class ServiceModels:
    """Checkpoint bundle the app serves; embed side is optional."""

    def __init__(self, ssem: SsemModel, stem: StemModel, k_nn: int = 5,
                 embed: EmbedModel | None = None):
        self.ssem = ssem
        self.stem = stem
        self.k_nn = k_nn
        self.embed = embed


def _error(status: int, message: str, request_id: str | None = None) -> JSONResponse:
    body: dict = {"error": {"message": message}}
    if request_id is not None:
        body["error"]["request_id"] = request_id
    return JSONResponse(status_code=status, content=body)


def _parse_sketch(doc, where: str = "sketch") -> VectorSketch:
    if not isinstance(doc, dict):
        raise SketchSemError(f"{where}: expected a sketch object")
    return parse(json.dumps(doc))


async def _body(request: Request) -> dict:
    try:
        doc = await request.json()
    except Exception:
        raise SketchSemError("request body is not valid JSON") from None
    if not isinstance(doc, dict):
        raise SketchSemError("request body must be a JSON object")
    return doc


def _reference_face(body: dict, resolution: int) -> np.ndarray | None:
    if "reference" not in body or body["reference"] is None:
        return None
    ref = body["reference"]
    if not isinstance(ref, str):
        raise SketchSemError("reference: expected a base64 PNG string")
    try:
        face = b64_to_image(ref)
    except Exception:
        raise SketchSemError("reference: could not decode base64 PNG") from None
    size = face.shape[-1]
    if face.shape[-2] != size or size % resolution:
        raise SketchSemError(
            f"reference: size {face.shape[-2]}x{size} does not reduce to "
            f"{resolution}x{resolution}")
    return box_downsample(face, size // resolution)


def _seed_of(body: dict) -> int:
    seed = body.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise SketchSemError("seed: expected an integer")
    return seed


def create_app(models: ServiceModels) -> FastAPI:
    app = FastAPI(title="sketchsem", docs_url=None, redoc_url=None)

    @app.exception_handler(Exception)
    async def on_failure(request: Request, exc: Exception):
        return _error(500, "internal error", request_id=str(uuid.uuid4()))

    @app.get("/categories")
    async def categories():
        return json.loads(DEFAULT_SCHEME.to_json())

    @app.post("/label")
    async def label(request: Request):
        try:
            body = await _body(request)
            sketch = _parse_sketch(body.get("sketch"))
            vote = body.get("vote", True)
            if not isinstance(vote, bool):
                raise SketchSemError("vote: expected a boolean")
        except SketchSemError as e:
            return _error(400, str(e))
        labeled, confs = label_sketch(sketch, models.ssem, models.stem,
                                      models.k_nn, vote=vote)
        return {
            "sketch": json.loads(serialize(labeled)),
            "labels": [s.label for s in labeled.strokes],
            "confidences": confs,
        }

    @app.post("/generate")
    async def generate_face(request: Request):
        if models.embed is None:
            return _error(503, "no embedding checkpoint loaded")
        try:
            body = await _body(request)
            sketch = _parse_sketch(body.get("sketch"))
            seed = _seed_of(body)
            face = _reference_face(body, models.embed.resolution)
        except SketchSemError as e:
            return _error(400, str(e))
        raster = render_sketch_raster(sketch, models.embed.resolution)
        image = reconstruct(models.embed, raster, face=face, seed=seed)
        return {"image": image_to_b64(image), "seed": seed}

    @app.post("/interpolate")
    async def interpolate_faces(request: Request):
        if models.embed is None:
            return _error(503, "no embedding checkpoint loaded")
        try:
            body = await _body(request)
            a = _parse_sketch(body.get("a"), "a")
            b = _parse_sketch(body.get("b"), "b")
            steps = body.get("steps", 8)
            if (not isinstance(steps, int) or isinstance(steps, bool)
                    or not 1 <= steps <= MAX_INTERPOLATE_STEPS):
                raise SketchSemError(
                    f"steps: expected an integer in 1..{MAX_INTERPOLATE_STEPS}")
            seed = _seed_of(body)
        except SketchSemError as e:
            return _error(400, str(e))
        res = models.embed.resolution
        w_a = fuse_codes(models.embed.encode(
            render_sketch_raster(a, res), seed=seed)).data
        w_b = fuse_codes(models.embed.encode(
            render_sketch_raster(b, res), seed=seed)).data
        ts = [0.0] if steps == 1 else [i / (steps - 1) for i in range(steps)]
        images = [
            image_to_b64(generate(interpolate(w_a, w_b, t),
                                  models.embed.generator).data)
            for t in ts
        ]
        return {"images": images, "ts": ts}

    @app.websocket("/live")
    async def live(ws: WebSocket):
        await ws.accept()
        strokes: list[dict] = []
        canvas = [512, 512]
        while True:
            try:
                msg = await ws.receive_json()
            except WebSocketDisconnect:
                return
            except Exception:
                await ws.send_json({"error": {"message": "message is not valid JSON"}})
                continue
            try:
                kind = msg.get("type") if isinstance(msg, dict) else None
                if kind == "reset":
                    strokes = []
                    if "canvas" in msg:
                        canvas = msg["canvas"]
                elif kind == "add":
                    strokes = strokes + [msg.get("stroke")]
                    if "canvas" in msg:
                        canvas = msg["canvas"]
                elif kind == "sketch":
                    doc = msg.get("sketch")
                    if not isinstance(doc, dict):
                        raise SketchSemError("sketch: expected a sketch object")
                    strokes = list(doc.get("strokes", []))
                    canvas = doc.get("canvas", canvas)
                else:
                    raise SketchSemError("type: expected add | sketch | reset")
                sketch = _parse_sketch({"canvas": canvas, "strokes": strokes})
            except SketchSemError as e:
                # reject the message, keep the session's last good state
                if kind == "add" and strokes:
                    strokes = strokes[:-1]
                await ws.send_json({"error": {"message": str(e)}})
                continue
            labeled, confs = label_sketch(sketch, models.ssem, models.stem,
                                          models.k_nn, vote=True)
            await ws.send_json({
                "labels": [s.label for s in labeled.strokes],
                "confidences": confs,
            })

    return app


def serve(models: ServiceModels, host: str = "127.0.0.1", port: int = 8008) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(models), host=host, port=port, log_level="warning")
