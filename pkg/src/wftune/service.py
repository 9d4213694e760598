"""Session service: an HTTP facade so a DBA console can drive a live run.

Each session owns one tuner over one generated (or uploaded) workload. The
console steps the workload, inspects recommendations, partitions and metrics,
casts votes, and materializes indices (implicit feedback). Sessions live in
memory behind a per-session writer lock; reads serve the immutable snapshot
produced by the last mutation. On shutdown the event logs can be dumped to a
JSON file; replaying a log through the library reproduces the session.
"""
from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import asdict
from contextlib import asynccontextmanager
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .core import CachingOracle, CatalogError, ConfigurationError
from .harness import DESK_CATALOG, offline_partition
from .session import SessionEngine
from .synthetic import WorkloadSpec, generate_workload, workload_from_json
from .tuner import TunerConfig

log = logging.getLogger("wftune.service")


class SessionSpec(BaseModel):
    phases: int = Field(default=8, ge=1)
    per_phase: int = Field(default=50, ge=1)
    seed: int = 0
    idx_cnt: int = Field(default=40, ge=1)
    state_cnt: int = Field(default=128, ge=2)
    hist_size: int = Field(default=100, ge=1)
    rand_cnt: int = Field(default=100, ge=0)
    partition: Literal["fixed", "auto"] = "fixed"
    initial: list[int] = []
    workload: dict | None = None


class StepRequest(BaseModel):
    count: int = Field(default=1, ge=1)


class FeedbackRequest(BaseModel):
    plus: list[int] = []
    minus: list[int] = []


class MaterializeRequest(BaseModel):
    create: list[int] = []
    drop: list[int] = []


class ManagedSession:
    """One live session: engine plus its writer lock and read snapshot."""

    def __init__(self, sid: str, spec: SessionSpec, engine: SessionEngine):
        self.id = sid
        self.spec = spec
        self.engine = engine
        self.lock = threading.Lock()
        self.snapshot: dict = {}
        self.refresh()

    def refresh(self) -> dict:
        engine = self.engine
        tuner = engine.tuner
        catalog = engine.catalog
        table = engine.table
        recommendation = tuner.recommend()
        materialized = tuner.materialized
        monitored = tuner.candidates
        plus, minus = tuner.pending_votes

        def describe(a: int) -> dict:
            return {
                "id": a,
                "name": catalog.name_of(a),
                "benefit": tuner.current_benefit(a),
                "create_cost": table.create_cost(a),
                "drop_cost": table.drop_cost(a),
                "recommended": a in recommendation,
                "materialized": a in materialized,
                "monitored": a in monitored,
            }

        self.snapshot = {
            "id": self.id,
            "cursor": engine.cursor,
            "length": engine.length,
            "exhausted": engine.exhausted,
            "recommendation": [describe(a) for a in sorted(recommendation)],
            "materialized": sorted(materialized),
            "pending_votes": {"plus": sorted(plus), "minus": sorted(minus)},
            "partition": [
                {
                    "indices": sorted(part),
                    "states": 1 << len(part),
                }
                for part in tuner.partition
            ],
            "state_count": tuner.state_count(),
            "state_budget": engine.config.state_cnt,
            "universe": [describe(a) for a in sorted(catalog.universe)],
            "metrics": [asdict(row) for row in engine.rows],
            "events": list(engine.events),
        }
        return self.snapshot


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, ManagedSession] = {}
        self._lock = threading.Lock()

    def add(self, session: ManagedSession) -> None:
        with self._lock:
            self._sessions[session.id] = session

    def get(self, sid: str) -> ManagedSession:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        return session

    def all(self) -> list[ManagedSession]:
        with self._lock:
            return list(self._sessions.values())


def build_session(spec: SessionSpec) -> SessionEngine:
    config = TunerConfig(
        idx_cnt=spec.idx_cnt,
        state_cnt=spec.state_cnt,
        hist_size=spec.hist_size,
        rand_cnt=spec.rand_cnt,
        seed=spec.seed,
    )
    if spec.workload is not None:
        workload = workload_from_json(spec.workload)
    else:
        workload = generate_workload(
            WorkloadSpec(
                phases=spec.phases, statements_per_phase=spec.per_phase, seed=spec.seed
            ),
            DESK_CATALOG,
        )
    start = frozenset(spec.initial)
    experimental = offline_partition(
        workload.statements,
        CachingOracle(workload.catalog),
        workload.catalog.transition_table(),
        start,
        config,
    )
    return SessionEngine(
        workload,
        config,
        label="session",
        start=start,
        partition_mode=spec.partition,
        fixed_parts=experimental if spec.partition == "fixed" else None,
        opt_parts=experimental,
        adopt_materialized=False,
    )


def create_app(snapshot_path: str | None = None) -> FastAPI:
    store = SessionStore()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if snapshot_path:
            dump = {
                "sessions": [
                    {
                        "id": session.id,
                        "spec": session.spec.model_dump(),
                        "events": list(session.engine.events),
                    }
                    for session in store.all()
                ]
            }
            with open(snapshot_path, "w", encoding="utf-8") as handle:
                json.dump(dump, handle, indent=1, sort_keys=True)
            log.info("wrote %d session logs to %s", len(dump["sessions"]), snapshot_path)

    app = FastAPI(title="wftune session service", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/sessions")
    def create_session(spec: SessionSpec):
        try:
            engine = build_session(spec)
        except (ConfigurationError, CatalogError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        session = ManagedSession(uuid.uuid4().hex[:12], spec, engine)
        store.add(session)
        return {
            "id": session.id,
            "length": engine.length,
            "recommendation": sorted(engine.recommend()),
        }

    @app.post("/sessions/{sid}/step")
    def step(sid: str, request: StepRequest):
        session = store.get(sid)
        with session.lock:
            engine = session.engine
            if engine.cursor + request.count > engine.length:
                raise HTTPException(
                    status_code=409,
                    detail=f"cannot step {request.count} past the workload end "
                    f"({engine.cursor}/{engine.length})",
                )
            rows = [engine.step() for _ in range(request.count)]
            snapshot = session.refresh()
        return {
            "cursor": snapshot["cursor"],
            "recommendation": snapshot["recommendation"],
            "rows": [asdict(row) for row in rows],
        }

    @app.post("/sessions/{sid}/feedback")
    def feedback(sid: str, request: FeedbackRequest):
        session = store.get(sid)
        with session.lock:
            try:
                recommendation = session.engine.feedback(
                    frozenset(request.plus), frozenset(request.minus)
                )
            except CatalogError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            except (ValueError, ConfigurationError) as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            session.refresh()
        return {"recommendation": sorted(recommendation)}

    @app.post("/sessions/{sid}/materialize")
    def materialize(sid: str, request: MaterializeRequest):
        session = store.get(sid)
        with session.lock:
            try:
                recommendation = session.engine.materialize(
                    frozenset(request.create), frozenset(request.drop)
                )
            except CatalogError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            except (ValueError, ConfigurationError) as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            snapshot = session.refresh()
        return {
            "materialized": snapshot["materialized"],
            "recommendation": sorted(recommendation),
        }

    @app.get("/sessions/{sid}")
    def get_state(sid: str):
        return store.get(sid).snapshot

    return app
