"""Read-only HTTP service over a pipeline artifact directory, for the network
explorer: slices, event trees, networks and the four analyses. Responses are
the canonical network JSON; errors carry exactly one {code, message} object."""

from __future__ import annotations

import os

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .artifacts import ArtifactError, Artifacts
from .netmodel import network_to_dict
from . import queries


def _error(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message}})


def create_app(artifact_dir, cors_origin: str = "*") -> FastAPI:
    artifacts = Artifacts(artifact_dir)
    app = FastAPI(title="evnet", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.exception_handler(ArtifactError)
    async def artifact_error(request: Request, exc: ArtifactError):
        return _error("not_found", str(exc.args[0]), 404)

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return _error("bad_request", str(exc), 400)

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(part) for part in first.get("loc", ()))
        message = f"{where}: {first.get('msg', 'invalid parameter')}"
        return _error("bad_request", message, 400)

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        return _error("internal", str(exc), 500)

    @app.get("/slices")
    def get_slices():
        return [
            {"index": s["index"], "start": s["start"], "end": s["end"],
             "documents": len(s["members"])}
            for s in artifacts.slices
        ]

    @app.get("/slices/{index}/events")
    def get_slice_events(index: int):
        return artifacts.slice_events_payload(index)

    @app.get("/events/{event_id:path}/network")
    def get_network(event_id: str):
        return network_to_dict(artifacts.network(event_id))

    @app.get("/events/{event_id:path}/analyze/filter")
    def get_filter(event_id: str,
                   vtype: list[str] | None = Query(default=None),
                   etype: list[str] | None = Query(default=None),
                   name: list[str] | None = Query(default=None),
                   min_weight: float | None = Query(default=None)):
        net = queries.query_filter(artifacts, event_id, vtypes=vtype,
                                   etypes=etype, names=name,
                                   min_weight=min_weight)
        return network_to_dict(net)

    @app.get("/events/{event_id:path}/analyze/plt")
    def get_plt(event_id: str, person: str = Query(...)):
        return network_to_dict(queries.query_plt(artifacts, person,
                                                 event_id=event_id))

    @app.get("/events/{event_id:path}/analyze/action")
    def get_action(event_id: str,
                   threshold: float | None = Query(default=None),
                   min_cooccur: int | None = Query(default=None)):
        net = queries.query_action(artifacts, event_id, threshold=threshold,
                                   min_cooccur=min_cooccur)
        return network_to_dict(net)

    @app.get("/events/{event_id:path}/analyze/path")
    def get_path(event_id: str,
                 a: str = Query(..., alias="from"),
                 b: str = Query(..., alias="to")):
        return network_to_dict(queries.query_path(artifacts, event_id, a, b))

    @app.get("/events/{event_id:path}/analyze/ego")
    def get_ego(event_id: str, center: str = Query(...),
                radius: int = Query(default=1)):
        return network_to_dict(queries.query_ego(artifacts, event_id, center,
                                                 radius=radius))

    return app


def serve(artifact_dir, port: int | None = None, host: str = "127.0.0.1",
          cors_origin: str = "*"):
    """Run the service with uvicorn; the port falls back to EVNET_PORT."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("EVNET_PORT", "8321"))
    uvicorn.run(create_app(artifact_dir, cors_origin=cors_origin),
                host=host, port=port)
