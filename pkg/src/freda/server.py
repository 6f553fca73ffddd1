"""HTTP facade over the annotation engine.

All mutations funnel through the engine (which serializes them) and each
one appends exactly one event to the log, so a restarted server replays
to the same state.  Entity colors are assigned here, deterministically
from the entity_ref, so the UI stays stateless.
"""

from __future__ import annotations

import hashlib
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .agreement import build_agreement_report, report_to_json
from .corpus import cluster_to_json
from .engine import (
    AnnotationEngine,
    response_from_json,
    speed_report,
    speed_report_to_json,
)
from .errors import FredaError
from .facts import corpus_statistics, facts_from_verdict, statistics_to_json

COLOR_PALETTE = (
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
    "#ff7f00", "#a65628", "#f781bf", "#17becf",
)


def color_for_ref(entity_ref: str) -> str:
    digest = hashlib.sha1(entity_ref.encode("utf-8")).hexdigest()
    return COLOR_PALETTE[int(digest, 16) % len(COLOR_PALETTE)]


def _error_body(code: str, message: str) -> dict:
    return {"code": code, "message": message}


def create_app(engine: AnnotationEngine) -> FastAPI:
    app = FastAPI(title="freda annotation server")

    @app.exception_handler(FredaError)
    async def freda_error_handler(request: Request, exc: FredaError):
        return JSONResponse(status_code=exc.http_status,
                            content=_error_body(exc.code, str(exc)))

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400,
                            content=_error_body("malformed_request", str(exc)))

    @app.get("/api/task")
    async def get_task(annotator: Optional[str] = None, relation: Optional[str] = None):
        if not annotator or not relation:
            return JSONResponse(status_code=400, content=_error_body(
                "malformed_request", "annotator and relation params are required"))
        sentence, round_ = engine.next_task(annotator, relation)
        schema = engine.schemas[relation]
        entities = []
        for c in sentence.entities:
            payload = cluster_to_json(c)
            payload["color"] = color_for_ref(c.entity_ref)
            entities.append(payload)
        return {
            "sentence_id": sentence.sentence_id,
            "round": round_,
            "tokens": [t.text for t in sentence.tokens],
            "entities": entities,
            "relation": {
                "name": schema.name,
                "subject_type": schema.subject_type,
                "object_type": schema.object_type,
                "symmetric": schema.symmetric,
            },
        }

    @app.post("/api/response")
    async def post_response(body: dict):
        try:
            response = response_from_json(body)
        except (KeyError, TypeError) as exc:
            return JSONResponse(status_code=400, content=_error_body(
                "malformed_request", f"bad response body: {exc}"))
        state = engine.submit_response(response)
        return {"status": state.status}

    @app.post("/api/sentence/{sentence_id}/delete")
    async def delete_sentence(sentence_id: str):
        engine.delete_sentence(sentence_id)
        return {"status": "deleted"}

    @app.post("/api/sentence/{sentence_id}/ignore")
    async def ignore_sentence(sentence_id: str, relation: Optional[str] = None):
        if not relation:
            return JSONResponse(status_code=400, content=_error_body(
                "malformed_request", "relation param is required"))
        engine.ignore_for_relation(sentence_id, relation)
        return {"status": "ignored"}

    @app.get("/api/stats")
    async def get_stats():
        verdicts = engine.verdicts()
        facts = [f for v in verdicts
                 for f in facts_from_verdict(v, engine.schemas[v.relation_name])]
        return statistics_to_json(corpus_statistics(verdicts, facts))

    @app.get("/api/agreement")
    async def get_agreement():
        return report_to_json(build_agreement_report(engine.states()))

    @app.get("/api/speed")
    async def get_speed():
        return speed_report_to_json(speed_report(engine.timing_records()))

    return app
