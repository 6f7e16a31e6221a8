"""Stateless HTTP facade over the processing pipeline.

One working endpoint, ``POST /api/v1/process``, accepts a multipart upload
with parts ``dataset`` (CSV file), ``metadata`` (CSV file) and ``task``
(text) and answers with the canonical STC JSON document.  Query parameters
named after processor configuration fields override the metadata file, which
is what lets a client expose tuning sliders without rewriting the upload.

Responses depend only on the request content, so identical requests produce
byte-identical bodies.  Error responses share one schema:
``{"code": ..., "message": ..., "details": [...]}``.
"""

from __future__ import annotations

import os
import uuid

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool
from starlette.datastructures import UploadFile
from starlette.exceptions import HTTPException as StarletteHTTPException

from .diagnostics import CtxmineError
from .ingest import CONFIG_PARAMS
from .pipeline import run_pipeline
from .stc import serialize_stc

DEFAULT_MAX_UPLOAD = 64 * 1024 * 1024

_STATUS_CODES = {404: "NOT_FOUND", 405: "METHOD_NOT_ALLOWED", 413: "PAYLOAD_TOO_LARGE"}


def _error_response(status: int, code: str, message: str, details=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details or []},
    )


def create_app(
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD,
    cors_origin: str = "*",
) -> FastAPI:
    app = FastAPI(title="ctxmine", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        code = _STATUS_CODES.get(exc.status_code, f"HTTP_{exc.status_code}")
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        # opaque id only; no internals leak into the response
        return _error_response(
            500, "INTERNAL", "internal error", [{"id": uuid.uuid4().hex}]
        )

    @app.api_route("/health", methods=["GET", "HEAD"])
    async def health(request: Request) -> Response:
        if request.method == "HEAD":
            return Response(status_code=200)
        return JSONResponse({"status": "ok"})

    @app.post("/api/v1/process")
    async def process(request: Request) -> Response:
        declared = request.headers.get("content-length")
        if declared and declared.isdigit() and int(declared) > max_upload_bytes:
            return _error_response(
                413,
                "PAYLOAD_TOO_LARGE",
                f"upload exceeds the {max_upload_bytes} byte limit",
            )
        body = await request.body()
        if len(body) > max_upload_bytes:
            return _error_response(
                413,
                "PAYLOAD_TOO_LARGE",
                f"upload exceeds the {max_upload_bytes} byte limit",
            )

        form = await request.form()
        parts = {}
        for part in ("dataset", "metadata", "task"):
            if part not in form:
                return _error_response(
                    400,
                    "MISSING_PART",
                    f"multipart request is missing the '{part}' part",
                    [{"part": part}],
                )
            value = form[part]
            parts[part] = (
                await value.read() if isinstance(value, UploadFile) else value
            )
        task = parts["task"]
        if isinstance(task, bytes):
            task = task.decode("utf-8", errors="replace")

        overrides = {
            name: value
            for name, value in request.query_params.items()
            if name in CONFIG_PARAMS
        }

        try:
            result = await run_in_threadpool(
                run_pipeline, parts["metadata"], parts["dataset"], task, overrides
            )
        except CtxmineError as exc:
            return _error_response(400, exc.code, str(exc), exc.details())

        return Response(
            content=serialize_stc(result.document),
            media_type="application/json",
        )

    return app


def main() -> None:
    """Serve on CTXMINE_ADDR:CTXMINE_PORT (default 127.0.0.1:8080)."""
    import uvicorn

    app = create_app(
        max_upload_bytes=int(os.environ.get("CTXMINE_MAX_UPLOAD", DEFAULT_MAX_UPLOAD)),
        cors_origin=os.environ.get("CTXMINE_CORS_ORIGIN", "*"),
    )
    uvicorn.run(
        app,
        host=os.environ.get("CTXMINE_ADDR", "127.0.0.1"),
        port=int(os.environ.get("CTXMINE_PORT", "8080")),
    )


if __name__ == "__main__":
    main()
