"""HTTP service for interactive retouching.

Models are loaded once at startup into an immutable registry, so every
handler is a pure function of (request, registry) and concurrent identical
requests produce identical bytes. A bounded semaphore caps concurrent
inference; FastAPI runs these sync handlers in its worker thread pool.
"""

import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from .checkpoint import load_checkpoint
from .imageio import DecodeError, decode_image, encode_png
from .interpolate import blend, strength_control
from .model import count_parameters, forward

log = logging.getLogger(__name__)

MODEL_DIR_ENV = "CSRNET_MODEL_DIR"
CHECKPOINT_GLOB = "*.ckpt"


@dataclass(frozen=True)
class ServiceConfig:
    model_dir: Path
    host: str = "127.0.0.1"
    port: int = 8000
    max_upload_bytes: int = 16 * 2 ** 20
    request_timeout_seconds: float = 30.0
    max_concurrent_inferences: int = 4
    static_dir: Path | None = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port must lie in [1, 65535], got {self.port}")
        for name in ("max_upload_bytes", "request_timeout_seconds",
                     "max_concurrent_inferences"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_cli(cls, model_dir=None, static_dir=None, **kwargs):
        model_dir = model_dir or os.environ.get(MODEL_DIR_ENV)
        if not model_dir:
            raise ValueError("no model directory: pass --model-dir or set "
                             f"${MODEL_DIR_ENV}")
        if static_dir is not None:
            static_dir = Path(static_dir)
            if not static_dir.is_dir():
                raise ValueError(f"static dir {static_dir} is not a directory")
        return cls(model_dir=Path(model_dir), static_dir=static_dir, **kwargs)


@dataclass(frozen=True)
class ModelRegistryEntry:
    model_id: str
    style: str
    parameter_count: int
    path: str

    def to_dict(self):
        return {"id": self.model_id, "style": self.style,
                "parameter_count": self.parameter_count, "path": self.path}


def load_registry(model_dir):
    """Load every checkpoint in the directory, keyed by file stem."""
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise FileNotFoundError(f"model directory {model_dir} does not exist")
    registry = {}
    for path in sorted(model_dir.glob(CHECKPOINT_GLOB)):
        params = load_checkpoint(path)
        entry = ModelRegistryEntry(model_id=path.stem, style=path.stem,
                                   parameter_count=count_parameters(params),
                                   path=str(path))
        registry[entry.model_id] = (entry, params)
    if not registry:
        log.warning("no %s checkpoints under %s; registry is empty",
                    CHECKPOINT_GLOB, model_dir)
    return registry


def _error(status, message):
    return JSONResponse({"error": message}, status_code=status)


def create_app(config):
    registry = load_registry(config.model_dir)
    gate = threading.BoundedSemaphore(config.max_concurrent_inferences)
    app = FastAPI(title="retouching service")

    def read_upload(upload):
        data = upload.file.read(config.max_upload_bytes + 1)
        if len(data) > config.max_upload_bytes:
            raise _Reject(413, f"upload exceeds {config.max_upload_bytes} bytes")
        try:
            return decode_image(data)
        except DecodeError as exc:
            raise _Reject(400, str(exc)) from exc

    def parse_alpha(raw):
        try:
            alpha = float(raw)
        except ValueError as exc:
            raise _Reject(400, f"alpha must be a number, got {raw!r}") from exc
        if not 0.0 <= alpha <= 1.0:
            raise _Reject(400, f"alpha must lie in [0, 1], got {alpha}")
        return alpha

    def model_of(model_id):
        found = registry.get(model_id)
        if found is None:
            raise _Reject(404, f"unknown model {model_id!r}")
        return found[1]

    @app.get("/api/models")
    def list_models():
        return [entry.to_dict() for entry, _ in registry.values()]

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    @app.post("/api/retouch")
    def retouch(image: UploadFile = File(...), model_id: str = Form(...),
                alpha: str = Form("0.0")):
        try:
            strength = parse_alpha(alpha)
            params = model_of(model_id)
            original = read_upload(image)
            with gate:
                retouched = forward(params, original)
            out = strength_control(original, retouched, strength)
        except _Reject as rej:
            return rej.response
        except ValueError as exc:
            return _error(400, str(exc))
        return Response(encode_png(out), media_type="image/png")

    @app.post("/api/style_blend")
    def style_blend(image: UploadFile = File(...), model_a: str = Form(...),
                    model_b: str = Form(...), alpha: str = Form(...)):
        try:
            weight = parse_alpha(alpha)
            params_a = model_of(model_a)
            params_b = model_of(model_b)
            original = read_upload(image)
            with gate:
                out_a = forward(params_a, original)
                out_b = forward(params_b, original)
            out = blend(out_a, out_b, weight)
        except _Reject as rej:
            return rej.response
        except ValueError as exc:
            return _error(400, str(exc))
        return Response(encode_png(out), media_type="image/png")

    if config.static_dir is not None:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")
    return app


class _Reject(Exception):
    def __init__(self, status, message):
        super().__init__(message)
        self.response = _error(status, message)


def serve(config):
    import uvicorn
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port,
                timeout_keep_alive=max(1, int(config.request_timeout_seconds)))
