"""HTTP API over the job manager (JSON bodies, SSE progress stream)."""

import json

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse, StreamingResponse

from .. import potentials
from .config import ConfigError
from .store import IllegalTransition, UnknownJob


def _descriptor(m):
    return {
        "model_id": m.model_id,
        "arity": m.arity,
        "cutoff_param": m.cutoff_param,
        "description": m.description,
    }


def _space_payload(space):
    return {
        "model_id": space.model_id,
        "species": list(space.species),
        "parameters": [
            {
                "name": s.name,
                "unit": s.unit,
                "lower": s.lower,
                "upper": s.upper,
                "default_low": s.default_low,
                "default_high": s.default_high,
            }
            for s in space.specs
        ],
    }


def create_app(manager):
    app = FastAPI(title="blast", version="0.1.0")

    @app.exception_handler(UnknownJob)
    async def _unknown(request, exc):
        return JSONResponse(status_code=404, content={"detail": f"unknown job: {exc}"})

    @app.exception_handler(IllegalTransition)
    async def _illegal(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/api/models")
    def list_models():
        return {"models": [_descriptor(m) for m in potentials.list_models()]}

    @app.get("/api/models/{model_id}")
    def show_model(model_id: str, species: str = Query("X")):
        try:
            m = potentials.get_model(model_id)
            space = potentials.parameter_space(model_id, species.split(","))
        except potentials.ModelError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"model": _descriptor(m), "parameter_space": _space_payload(space)}

    @app.post("/api/jobs", status_code=201)
    def submit(config: dict):
        try:
            record = manager.submit(config)
        except ConfigError as exc:
            return JSONResponse(status_code=400, content={"errors": exc.to_json()})
        return {"job_id": record.job_id}

    @app.get("/api/jobs")
    def list_jobs():
        return {"jobs": [r.to_dict() for r in manager.list()]}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        return manager.get(job_id).to_dict()

    @app.post("/api/jobs/{job_id}/start")
    def start(job_id: str):
        return manager.start(job_id).to_dict()

    @app.post("/api/jobs/{job_id}/cancel")
    def cancel(job_id: str):
        return manager.cancel(job_id).to_dict()

    @app.post("/api/jobs/{job_id}/restart")
    def restart(job_id: str):
        return manager.restart(job_id).to_dict()

    @app.get("/api/jobs/{job_id}/progress")
    def progress(job_id: str):
        manager.get(job_id)  # 404 on unknown job

        def gen():
            for event in manager.stream_events(job_id):
                yield f"data: {json.dumps(event)}\n\n"
            yield "event: end\ndata: {}\n\n"

        return StreamingResponse(gen(), media_type="text/event-stream")

    @app.get("/api/jobs/{job_id}/result")
    def result(job_id: str):
        payload = manager.result(job_id)
        if payload is None:
            raise HTTPException(status_code=404, detail="no result yet")
        return payload

    return app
