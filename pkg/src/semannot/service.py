"""Project-scoped HTTP API for the annotation workbench.

Mutations are optimistically versioned: every request that changes the
project carries the snapshot version it was based on and is rejected with
409 when stale. Readers always observe a complete snapshot; a committed
mutation bumps the version by exactly one and persists the store file.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.staticfiles import StaticFiles

from .annotation import (
    AnnotationStore,
    Provenance,
    SemanticAnnotation,
    SRKind,
    save_store,
)
from .blocks import SemanticBlock, Selector, delimit_sb
from .errors import AnnotError, FormatError, InvariantViolation, UnknownEntityError
from .kstore import oall, serialize_ontology
from .project import Project
from .reason import Report, run_pipeline

UI_DIR_ENV = "ANNOT_UI_DIR"


@dataclass(frozen=True)
class Snapshot:
    """One immutable project state handed to readers."""

    version: int
    store: AnnotationStore
    pending: tuple[SemanticAnnotation, ...]
    report: Report | None
    report_version: int | None


class ProjectService:
    """Single-writer state machine over project snapshots."""

    def __init__(self, project: Project, *, persist: bool = True):
        self.project = project
        self.persist = persist
        self._lock = threading.Lock()
        self._snapshot = Snapshot(
            version=1,
            store=project.store.copy(),
            pending=(),
            report=None,
            report_version=None,
        )

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    def _require_version(self, snap: Snapshot, claimed: object) -> None:
        if claimed != snap.version:
            raise HTTPException(
                status_code=409,
                detail={
                    "error": "stale version",
                    "claimedVersion": claimed,
                    "currentVersion": snap.version,
                },
            )

    def _persist(self, store: AnnotationStore) -> None:
        if self.persist:
            self.project.config.annotations.write_text(save_store(store), encoding="utf-8")

    def add_annotation(self, claimed_version: object, payload: dict) -> tuple[int, str]:
        with self._lock:
            snap = self._snapshot
            self._require_version(snap, claimed_version)
            store = snap.store.copy()
            new_id = store.annotate(
                payload["element"],
                payload["domain"],
                payload["sr"],
                payload["provenance"],
            )
            self._persist(store)
            self._snapshot = replace(snap, version=snap.version + 1, store=store)
            return self._snapshot.version, new_id

    def delete_annotation(self, claimed_version: object, annotation_id: str) -> int:
        with self._lock:
            snap = self._snapshot
            if annotation_id not in snap.store:
                raise HTTPException(status_code=404, detail=f"unknown annotation {annotation_id}")
            self._require_version(snap, claimed_version)
            store = snap.store.copy()
            store.remove(annotation_id)
            self._persist(store)
            self._snapshot = replace(snap, version=snap.version + 1, store=store)
            return self._snapshot.version

    def reason(self) -> tuple[Snapshot, Report]:
        config = self.project.config
        with self._lock:
            snap = self._snapshot
            report = run_pipeline(
                self.project.model,
                self.project.knowledge,
                self.project.rules,
                snap.store,
                subclass_closure=config.subclass_closure,
                max_inference_depth=config.max_inference_depth,
                auto_accept=config.auto_accept,
            )
            if config.auto_accept and report.suggestions:
                store = snap.store.copy()
                for proposal in report.suggestions:
                    store.annotate(
                        proposal.element, proposal.domain, proposal.sr, proposal.provenance
                    )
                self._persist(store)
                self._snapshot = Snapshot(
                    version=snap.version + 1,
                    store=store,
                    pending=(),
                    report=report,
                    report_version=snap.version,
                )
            else:
                self._snapshot = replace(
                    snap, pending=report.suggestions, report=report, report_version=snap.version
                )
            return self._snapshot, report

    def accept_suggestion(self, claimed_version: object, suggestion_id: str) -> tuple[int, str]:
        with self._lock:
            snap = self._snapshot
            proposal = next((p for p in snap.pending if p.id == suggestion_id), None)
            if proposal is None:
                raise HTTPException(status_code=404, detail=f"unknown suggestion {suggestion_id}")
            self._require_version(snap, claimed_version)
            store = snap.store.copy()
            new_id = store.annotate(
                proposal.element, proposal.domain, proposal.sr, proposal.provenance
            )
            self._persist(store)
            self._snapshot = replace(
                snap,
                version=snap.version + 1,
                store=store,
                pending=tuple(p for p in snap.pending if p.id != suggestion_id),
            )
            return self._snapshot.version, new_id

    def reject_suggestion(self, claimed_version: object, suggestion_id: str) -> int:
        with self._lock:
            snap = self._snapshot
            proposal = next((p for p in snap.pending if p.id == suggestion_id), None)
            if proposal is None:
                raise HTTPException(status_code=404, detail=f"unknown suggestion {suggestion_id}")
            self._require_version(snap, claimed_version)
            self._snapshot = replace(
                snap, pending=tuple(p for p in snap.pending if p.id != suggestion_id)
            )
            return self._snapshot.version


def _canonical_json(doc: dict) -> Response:
    body = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return Response(content=body, media_type="application/json")


def _invariant_detail(exc: AnnotError) -> dict:
    if isinstance(exc, InvariantViolation):
        return {"invariant": exc.invariant, "message": str(exc)}
    if isinstance(exc, UnknownEntityError):
        return {"invariant": "element exists in the bound model", "message": str(exc)}
    return {"invariant": "input well-formed", "message": str(exc)}


def find_ui_dir() -> Path | None:
    """Static assets directory: $ANNOT_UI_DIR, else ./frontend/dist."""
    env = os.environ.get(UI_DIR_ENV)
    if env:
        path = Path(env)
        return path if path.is_dir() else None
    candidate = Path.cwd() / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def create_app(project: Project, *, persist: bool = True, ui_dir: Path | None = None) -> FastAPI:
    service = ProjectService(project, persist=persist)
    app = FastAPI(title="annot", version="0.1.0")
    app.state.service = service
    knowledge = project.knowledge
    model = project.model

    @app.get("/api/project")
    def get_project() -> Response:
        snap = service.snapshot
        return _canonical_json(
            {
                "version": snap.version,
                "model": {
                    "id": model.id,
                    "metamodel": model.metamodel,
                    "elementCount": len(model.elements),
                    "linkCount": len(model.links),
                },
                "namespaces": knowledge.namespaces,
                "annotationCount": len(snap.store),
            }
        )

    @app.get("/api/model")
    def get_model() -> Response:
        snap = service.snapshot
        return _canonical_json(
            {
                "version": snap.version,
                "id": model.id,
                "metamodel": model.metamodel,
                "elements": [
                    {
                        "id": e.id,
                        "label": e.label,
                        "metaType": e.meta_type,
                        "attributes": dict(e.attributes),
                    }
                    for e in model.elements
                ],
                "links": [
                    {"source": link.source, "target": link.target, "kind": link.kind}
                    for link in model.links
                ],
            }
        )

    @app.get("/api/ontology/{namespace}")
    def get_ontology(namespace: str) -> Response:
        snap = service.snapshot
        if namespace not in knowledge:
            raise HTTPException(status_code=404, detail=f"unknown ontology {namespace}")
        ontology = knowledge.ontology(namespace)
        doc = json.loads(serialize_ontology(ontology))
        doc["version"] = snap.version
        doc["oall"] = sorted(oall(ontology))
        return _canonical_json(doc)

    @app.get("/api/ontology/{namespace}/block")
    def get_block(namespace: str, main: str, depth: int | None = None) -> Response:
        snap = service.snapshot
        if namespace not in knowledge:
            raise HTTPException(status_code=404, detail=f"unknown ontology {namespace}")
        union = knowledge.union_graph()
        if main not in union:
            raise HTTPException(status_code=404, detail=f"unknown concept {main}")
        selector = Selector.everything() if depth is None else Selector.depth_bounded(depth)
        block = delimit_sb(union, main, selector)
        return _canonical_json({"version": snap.version, "block": block.to_json_dict()})

    @app.get("/api/annotations")
    def list_annotations() -> Response:
        snap = service.snapshot
        return _canonical_json(
            {
                "version": snap.version,
                "annotations": [a.to_json_dict() for a in snap.store.annotations],
                "associations": [a.to_json_dict() for a in snap.store.associations],
            }
        )

    @app.get("/api/annotations/{annotation_id}")
    def get_annotation(annotation_id: str) -> Response:
        snap = service.snapshot
        if annotation_id not in snap.store:
            raise HTTPException(status_code=404, detail=f"unknown annotation {annotation_id}")
        return _canonical_json(
            {"version": snap.version, "annotation": snap.store.get(annotation_id).to_json_dict()}
        )

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise HTTPException(status_code=422, detail={"invariant": "request body is JSON"})
        if not isinstance(body, dict):
            raise HTTPException(status_code=422, detail={"invariant": "request body is an object"})
        return body

    @app.post("/api/annotations", status_code=201)
    async def post_annotation(request: Request) -> Response:
        body = await _json_body(request)
        try:
            domain = SemanticBlock.from_json_dict(body["domain"])
            payload = {
                "element": body["element"],
                "sr": SRKind(body["sr"]),
                "domain": domain,
                "provenance": Provenance.from_json_dict(body.get("provenance", {"kind": "initial"})),
            }
        except (KeyError, TypeError, ValueError, FormatError, InvariantViolation) as exc:
            raise HTTPException(
                status_code=422,
                detail={"invariant": "annotation payload well-formed", "message": str(exc)},
            )
        try:
            version, new_id = service.add_annotation(body.get("version"), payload)
        except AnnotError as exc:
            raise HTTPException(status_code=422, detail=_invariant_detail(exc))
        return Response(
            content=json.dumps({"version": version, "id": new_id}, sort_keys=True) + "\n",
            media_type="application/json",
            status_code=201,
        )

    @app.delete("/api/annotations/{annotation_id}")
    def delete_annotation(annotation_id: str, version: int) -> Response:
        new_version = service.delete_annotation(version, annotation_id)
        return _canonical_json({"version": new_version})

    @app.post("/api/reason")
    def post_reason() -> Response:
        snap, report = service.reason()
        doc = report.to_json_dict()
        doc["version"] = snap.report_version
        doc["currentVersion"] = snap.version
        return _canonical_json(doc)

    @app.get("/api/report/latest")
    def latest_report() -> Response:
        snap = service.snapshot
        if snap.report is None:
            raise HTTPException(status_code=404, detail="no report yet")
        doc = snap.report.to_json_dict()
        doc["version"] = snap.report_version
        doc["currentVersion"] = snap.version
        return _canonical_json(doc)

    @app.post("/api/suggestions/{suggestion_id}/accept", status_code=201)
    async def accept_suggestion(suggestion_id: str, request: Request) -> Response:
        body = await _json_body(request)
        try:
            version, new_id = service.accept_suggestion(body.get("version"), suggestion_id)
        except AnnotError as exc:
            raise HTTPException(status_code=422, detail=_invariant_detail(exc))
        return Response(
            content=json.dumps({"version": version, "annotationId": new_id}, sort_keys=True) + "\n",
            media_type="application/json",
            status_code=201,
        )

    @app.post("/api/suggestions/{suggestion_id}/reject")
    async def reject_suggestion(suggestion_id: str, request: Request) -> Response:
        body = await _json_body(request)
        version = service.reject_suggestion(body.get("version"), suggestion_id)
        return _canonical_json({"version": version})

    if ui_dir is not None and ui_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
