"""The HTTP surface: GET /health and POST /embed.

Stateless request handling over one shared read-only backend, so the app
is safe under concurrent clients.  The backend loads in a background
thread; both endpoints answer 503 until it is ready, and /health flips to
200 with the model id and dimension once it is.
"""

from __future__ import annotations

import os
import threading
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backends import BackendError, build_backend

DEFAULT_MODEL = "msmarco-distilbert-base-v4"
MAX_BATCH = 256
MAX_TEXT_LENGTH = 512


class EmbedRequest(BaseModel):
    texts: list[str]


class ModelHolder:
    """Backend slot filled asynchronously; holds the load error if any."""

    def __init__(self):
        self.backend = None
        self.error: Optional[str] = None
        self._lock = threading.Lock()

    def set(self, backend=None, error: Optional[str] = None):
        with self._lock:
            self.backend = backend
            self.error = error

    def get(self):
        with self._lock:
            return self.backend, self.error


def create_app(model_name: Optional[str] = None,
               eager: bool = True) -> FastAPI:
    """Build the service for one pinned model.

    ``eager=True`` loads the backend synchronously (simplest for tests and
    for the hashed backend); ``eager=False`` loads it in a daemon thread,
    during which every endpoint answers 503.
    """
    model_name = model_name or os.environ.get("EMBED_SERVICE_MODEL",
                                              DEFAULT_MODEL)
    app = FastAPI(title="embed-service")
    holder = ModelHolder()
    app.state.holder = holder

    def load():
        try:
            holder.set(backend=build_backend(model_name))
        except Exception as exc:  # noqa: BLE001 - reported via 503
            holder.set(error=str(exc))

    if eager:
        load()
    else:
        threading.Thread(target=load, daemon=True).start()

    @app.get("/health")
    def health():
        backend, error = holder.get()
        if backend is None:
            detail = error or "model loading"
            return JSONResponse(status_code=503, content={"error": detail})
        return {"model": backend.model_id, "dim": backend.dimension}

    @app.post("/embed")
    def embed(request: EmbedRequest):
        backend, error = holder.get()
        if backend is None:
            detail = error or "model loading"
            return JSONResponse(status_code=503, content={"error": detail})
        texts = request.texts
        if not texts:
            return JSONResponse(status_code=422,
                                content={"error": "texts must be non-empty"})
        if len(texts) > MAX_BATCH:
            return JSONResponse(
                status_code=413,
                content={"error": f"batch exceeds {MAX_BATCH} texts"})
        for t in texts:
            if len(t) > MAX_TEXT_LENGTH:
                return JSONResponse(
                    status_code=413,
                    content={"error":
                             f"text exceeds {MAX_TEXT_LENGTH} characters"})
        try:
            vectors = backend.encode(texts)
        except BackendError as exc:
            return JSONResponse(status_code=503, content={"error": str(exc)})
        return {"model": backend.model_id, "dim": backend.dimension,
                "vectors": [[float(x) for x in row] for row in vectors]}

    return app
