"""HTTP service tying the workflow together with durable storage.

Every mutating endpoint authenticates a bearer token, checks the actor's
role, and commits to the embedded store before acknowledging. Annotators
are isolated from each other: one can never read the partner's work on a
shared document.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request, Response

from . import __version__, adjudication, agreement, ingest, serialize, suggest, workflow
from .config import ActorAccount, ProjectConfig
from .model import (
    Actor,
    Annotation,
    Document,
    DocumentStatus,
    ModelError,
    Relation,
    Role,
    Span,
    make_annotation,
    make_relation,
)
from .export import (
    ExportError,
    dictionary_tsv,
    extract_dictionaries,
    export_gold,
    gold_to_payload,
    payload_to_xml,
)
from .registry import Registry, RegistryError, default_registry, load_registry
from .storage import Storage
from .suggest import AnnotationHistory, FileTerminology, HttpTerminology

logger = logging.getLogger(__name__)

KIND_DOCUMENT = "document"
KIND_SUBMISSION = "submission"
KIND_ASSIGNMENT = "assignment"
KIND_GOLD = "gold"
KIND_REDACTION = "redaction"

SYSTEM_ACTOR = "system"


@dataclass
class ServiceState:
    config: ProjectConfig
    storage: Storage
    registry: Registry
    terminology: Optional[object]
    history: AnnotationHistory

    # -- storage helpers ----------------------------------------------------

    def load_document(self, doc_id: str) -> Document:
        data = self.storage.get(KIND_DOCUMENT, doc_id)
        if data is None:
            raise HTTPException(404, f"document {doc_id} not found")
        return serialize.document_from_dict(data)

    def save_document(self, doc: Document, actor: str, action: str) -> None:
        self.storage.put(
            KIND_DOCUMENT, doc.id, serialize.document_to_dict(doc), actor=actor, action=action
        )

    def load_assignment(self, doc_id: str) -> Optional[workflow.Assignment]:
        data = self.storage.get(KIND_ASSIGNMENT, doc_id)
        return serialize.assignment_from_dict(data) if data else None

    def submission_key(self, doc_id: str, annotator_id: str) -> str:
        return f"{doc_id}:{annotator_id}"

    def load_submission(self, doc_id: str, annotator_id: str) -> dict:
        data = self.storage.get(KIND_SUBMISSION, self.submission_key(doc_id, annotator_id))
        return data or {"annotations": [], "relations": [], "finalized": False}

    def save_submission(self, doc_id: str, annotator_id: str, data: dict, action: str) -> None:
        self.storage.put(
            KIND_SUBMISSION,
            self.submission_key(doc_id, annotator_id),
            data,
            actor=annotator_id,
            action=action,
        )

    def submission_objects(
        self, doc: Document, annotator_id: str
    ) -> tuple[list[Annotation], list[Relation]]:
        data = self.load_submission(doc.id, annotator_id)
        annotations = [serialize.annotation_from_dict(a) for a in data["annotations"]]
        relations = [serialize.relation_from_dict(r) for r in data["relations"]]
        return annotations, relations

    def has_saved_work(self, doc_id: str) -> bool:
        assignment = self.load_assignment(doc_id)
        if assignment is None:
            return False
        for annotator in (assignment.annotator_a, assignment.annotator_b):
            data = self.load_submission(doc_id, annotator)
            if data["annotations"] or data["relations"] or data["finalized"]:
                return True
        return False

    def gold_documents(self) -> list[adjudication.GoldDocument]:
        return [serialize.gold_from_dict(data) for _, data in self.storage.list(KIND_GOLD)]

    def rebuild_history(self) -> None:
        for key, data in self.storage.list(KIND_SUBMISSION):
            if not data.get("finalized"):
                continue
            doc_id = key.rsplit(":", 1)[0]
            doc_data = self.storage.get(KIND_DOCUMENT, doc_id)
            if doc_data is None:
                continue
            doc = serialize.document_from_dict(doc_data)
            for entry in data["annotations"]:
                self.history.record_acceptance(doc, serialize.annotation_from_dict(entry))

    def divergence_inputs(self, doc: Document):
        assignment = self.load_assignment(doc.id)
        if assignment is None:
            raise HTTPException(409, f"document {doc.id} has no assignment")
        sub_a = self.load_submission(doc.id, assignment.annotator_a)
        sub_b = self.load_submission(doc.id, assignment.annotator_b)
        if not (sub_a["finalized"] and sub_b["finalized"]):
            raise HTTPException(409, "awaiting second annotation")
        set_a, rels_a = self.submission_objects(doc, assignment.annotator_a)
        set_b, rels_b = self.submission_objects(doc, assignment.annotator_b)
        return assignment, set_a, set_b, rels_a, rels_b


def build_state(config: ProjectConfig) -> ServiceState:
    try:
        registry = (
            load_registry(config.registry_path) if config.registry_path else default_registry()
        )
    except RegistryError as exc:
        raise RuntimeError(f"cannot start: {exc}") from exc
    storage = Storage(config.storage_path)
    terminology = None
    if config.terminology:
        if config.terminology.startswith(("http://", "https://")):
            terminology = HttpTerminology(config.terminology)
        else:
            terminology = FileTerminology(config.terminology, registry)
    state = ServiceState(
        config=config,
        storage=storage,
        registry=registry,
        terminology=terminology,
        history=AnnotationHistory(),
    )
    state.rebuild_history()
    return state


def create_app(config: ProjectConfig) -> FastAPI:
    state = build_state(config)
    app = FastAPI(title="dupla", version=__version__)
    app.state.dupla = state

    accounts_by_token = {account.token: account for account in config.accounts}

    def authenticate(request: Request) -> ActorAccount:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise HTTPException(401, "missing bearer token")
        account = accounts_by_token.get(header[7:].strip())
        if account is None:
            raise HTTPException(401, "invalid token")
        if account.expired():
            raise HTTPException(401, "token expired")
        return account

    def require(*roles: Role):
        def dependency(account: ActorAccount = Depends(authenticate)) -> ActorAccount:
            if account.actor.role not in roles:
                raise HTTPException(403, f"requires role in {[r.value for r in roles]}")
            return account

        return dependency

    # -- health -------------------------------------------------------------

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "documents": state.storage.count(KIND_DOCUMENT),
            "gold": state.storage.count(KIND_GOLD),
        }

    @app.get("/registry")
    def registry_view(account: ActorAccount = Depends(authenticate)) -> dict:
        return {
            "types": [
                {
                    "code": sty.code,
                    "name": sty.name,
                    "group_code": sty.group.code,
                    "group_name": sty.group.name,
                }
                for sty in sorted(state.registry, key=lambda s: (s.group.code, s.name))
            ]
        }

    # -- import & review ----------------------------------------------------

    @app.post("/import", status_code=201)
    async def import_records(
        request: Request, account: ActorAccount = Depends(require(Role.MANAGER))
    ) -> dict:
        body = (await request.body()).decode("utf-8")
        try:
            records = ingest.parse_jsonl(body)
            report = ingest.import_records(records)
        except ingest.IngestError as exc:
            raise HTTPException(422, str(exc))
        for doc in report.documents:
            if state.storage.get(KIND_DOCUMENT, doc.id) is not None:
                raise HTTPException(409, f"document {doc.id} already exists")
        for doc in report.documents:
            state.save_document(doc, account.actor.id, "import")
        return {
            "imported": [doc.id for doc in report.documents],
            "skipped": report.skipped,
            "warnings": report.warnings,
        }

    @app.post("/documents/{doc_id}/review")
    def review(
        doc_id: str,
        account: ActorAccount = Depends(require(Role.MANAGER, Role.ADJUDICATOR)),
    ) -> dict:
        doc = state.load_document(doc_id)
        try:
            ingest.mark_reviewed(doc, account.actor)
        except (ingest.IngestError, ModelError) as exc:
            raise HTTPException(409, str(exc))
        state.save_document(doc, account.actor.id, "review")
        return {"id": doc.id, "status": doc.status.value}

    @app.post("/documents/{doc_id}/redactions")
    def redact(
        doc_id: str,
        payload: dict,
        account: ActorAccount = Depends(require(Role.MANAGER, Role.ADJUDICATOR)),
    ) -> dict:
        doc = state.load_document(doc_id)
        try:
            span = Span(int(payload["start"]), int(payload["end"]))
            redaction, _ = ingest.apply_redaction(doc, span, account.actor)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"bad redaction payload: {exc}")
        except (ingest.IngestError, ModelError) as exc:
            raise HTTPException(409, str(exc))
        state.save_document(doc, account.actor.id, "redact")
        count = state.storage.count(KIND_REDACTION)
        state.storage.put(
            KIND_REDACTION,
            f"{doc.id}:{count + 1}",
            {
                "doc_id": doc.id,
                "start": redaction.span.start,
                "end": redaction.span.end,
                "reviewer": redaction.reviewer_id,
                "replacement": redaction.replacement,
            },
            actor=account.actor.id,
            action="redact",
        )
        return {"id": doc.id, "status": doc.status.value, "text": doc.text}

    # -- assignment ---------------------------------------------------------

    @app.post("/assignments", status_code=201)
    def create_assignments(
        payload: dict, account: ActorAccount = Depends(require(Role.MANAGER))
    ) -> dict:
        try:
            doc_ids = list(payload["documents"])
            annotator_ids = list(payload["annotators"])
            adjudicator_ids = list(payload["adjudicators"])
            seed = int(payload.get("seed", state.config.seed))
            round_no = int(payload.get("round", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"bad assignment payload: {exc}")

        actors = {account.actor.id: account.actor for account in config.accounts}
        try:
            annotators = [_resolve_actor(actors, aid, Role.ANNOTATOR) for aid in annotator_ids]
            adjudicators = [
                _resolve_actor(actors, aid, Role.ADJUDICATOR) for aid in adjudicator_ids
            ]
        except KeyError as exc:
            raise HTTPException(422, f"unknown actor: {exc}")

        docs = []
        for doc_id in doc_ids:
            doc = state.load_document(doc_id)
            if doc.status is DocumentStatus.ASSIGNED:
                if state.has_saved_work(doc.id):
                    raise HTTPException(
                        409, f"document {doc.id} already has saved annotations"
                    )
                # Reassignment before any work is saved: administratively
                # reopen the document.
                doc = Document(
                    id=doc.id,
                    text=doc.text,
                    section_map=doc.section_map,
                    status=DocumentStatus.REVIEWED,
                    metadata=doc.metadata,
                )
            docs.append(doc)
        try:
            assignments = workflow.assign(docs, annotators, adjudicators, seed, round_no)
        except workflow.WorkflowError as exc:
            raise HTTPException(422, str(exc))
        for doc in docs:
            state.save_document(doc, account.actor.id, "assign")
        for assignment in assignments:
            state.storage.put(
                KIND_ASSIGNMENT,
                assignment.doc_id,
                serialize.assignment_to_dict(assignment),
                actor=account.actor.id,
                action="assign",
            )
        return {"assignments": [serialize.assignment_to_dict(a) for a in assignments]}

    # -- document views -----------------------------------------------------

    @app.get("/documents/{doc_id}")
    def get_document(
        doc_id: str, account: ActorAccount = Depends(authenticate)
    ) -> dict:
        doc = state.load_document(doc_id)
        assignment = state.load_assignment(doc_id)
        view: dict = {
            "document": serialize.document_to_dict(doc),
            "assignment": serialize.assignment_to_dict(assignment) if assignment else None,
        }
        actor = account.actor
        if actor.role is Role.ANNOTATOR:
            if assignment and actor.id in (assignment.annotator_a, assignment.annotator_b):
                submission = state.load_submission(doc_id, actor.id)
                view["annotations"] = submission["annotations"]
                view["relations"] = submission["relations"]
                view["submitted"] = submission["finalized"]
            else:
                view["annotations"] = []
                view["relations"] = []
                view["submitted"] = False
        else:
            submissions = {}
            if assignment:
                for annotator in (assignment.annotator_a, assignment.annotator_b):
                    submissions[annotator] = state.load_submission(doc_id, annotator)
            view["submissions"] = submissions
        return view

    @app.get("/documents/{doc_id}/annotations")
    def get_annotations(
        doc_id: str,
        view: str = Query("mine"),
        account: ActorAccount = Depends(authenticate),
    ) -> dict:
        doc = state.load_document(doc_id)
        if view == "mine":
            submission = state.load_submission(doc_id, account.actor.id)
            return {
                "annotations": submission["annotations"],
                "relations": submission["relations"],
                "submitted": submission["finalized"],
            }
        if view == "pair":
            if account.actor.role not in (Role.MANAGER, Role.ADJUDICATOR):
                raise HTTPException(403, "pair view requires manager or adjudicator role")
            assignment, set_a, set_b, rels_a, rels_b = state.divergence_inputs(doc)
            return {
                "document": serialize.document_to_dict(doc),
                "annotators": {
                    assignment.annotator_a: {
                        "annotations": [serialize.annotation_to_dict(a) for a in set_a],
                        "relations": [serialize.relation_to_dict(r) for r in rels_a],
                    },
                    assignment.annotator_b: {
                        "annotations": [serialize.annotation_to_dict(a) for a in set_b],
                        "relations": [serialize.relation_to_dict(r) for r in rels_b],
                    },
                },
            }
        raise HTTPException(422, f"unknown view {view!r}")

    # -- suggestions ----------------------------------------------------------

    @app.get("/suggestions")
    def get_suggestions(
        doc: str,
        start: int,
        end: int,
        account: ActorAccount = Depends(authenticate),
    ) -> dict:
        document = state.load_document(doc)
        try:
            span = Span(start, end)
            response = suggest.suggest(
                document.text,
                span,
                state.history,
                state.terminology,
                stale_after_round=state.config.stale_after_round,
            )
        except (suggest.SuggestError, ModelError) as exc:
            raise HTTPException(422, str(exc))
        return {
            "suggestions": [
                {
                    "start": s.span.start,
                    "end": s.span.end,
                    "types": sorted(s.types),
                    "source": s.source.value,
                    "score": s.score,
                    "term": s.term,
                }
                for s in response.suggestions
            ],
            "provider_unavailable": response.provider_unavailable,
        }

    # -- annotation ----------------------------------------------------------

    def _assigned_annotator(doc_id: str, account: ActorAccount) -> workflow.Assignment:
        assignment = state.load_assignment(doc_id)
        if assignment is None:
            raise HTTPException(403, f"document {doc_id} is not assigned")
        if account.actor.id not in (assignment.annotator_a, assignment.annotator_b):
            raise HTTPException(403, "not an assigned annotator for this document")
        return assignment

    def _canonical_id(annotator_id: str, raw: str) -> str:
        # Namespacing by annotator keeps ids globally unique even when two
        # annotators pick the same local id for a shared document.
        return raw if raw.startswith(f"{annotator_id}-") else f"{annotator_id}-{raw}"

    def _build_annotations(
        doc: Document,
        annotator_id: str,
        round_no: int,
        entries: list[dict],
        existing_ids: set[str],
    ) -> list[Annotation]:
        built = []
        counter = len(existing_ids)
        for entry in entries:
            counter += 1
            ann_id = _canonical_id(annotator_id, entry.get("id") or f"a{counter}")
            if ann_id in existing_ids:
                raise HTTPException(422, f"duplicate annotation id {ann_id}")
            existing_ids.add(ann_id)
            try:
                built.append(
                    make_annotation(
                        doc,
                        state.registry,
                        id=ann_id,
                        annotator_id=annotator_id,
                        span=Span(int(entry["start"]), int(entry["end"])),
                        types=entry["types"],
                        expansion=entry.get("expansion"),
                        created_round=round_no,
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise HTTPException(422, f"bad annotation payload: {exc}")
            except (ModelError, RegistryError) as exc:
                raise HTTPException(422, str(exc))
        return built

    @app.post("/documents/{doc_id}/annotations", status_code=201)
    def save_annotation(
        doc_id: str,
        payload: dict,
        account: ActorAccount = Depends(require(Role.ANNOTATOR)),
    ) -> dict:
        doc = state.load_document(doc_id)
        assignment = _assigned_annotator(doc_id, account)
        submission = state.load_submission(doc_id, account.actor.id)
        if submission["finalized"]:
            raise HTTPException(409, "annotation pass already submitted")
        existing_ids = {a["id"] for a in submission["annotations"]}
        annotations = _build_annotations(
            doc, account.actor.id, assignment.round, [payload], existing_ids
        )
        submission["annotations"].append(serialize.annotation_to_dict(annotations[0]))
        state.save_submission(doc_id, account.actor.id, submission, "save-annotation")
        return {"id": annotations[0].id}

    @app.post("/documents/{doc_id}/annotations:submit")
    def submit_annotations(
        doc_id: str,
        payload: Optional[dict] = None,
        account: ActorAccount = Depends(require(Role.ANNOTATOR)),
    ) -> dict:
        payload = payload or {}
        doc = state.load_document(doc_id)
        assignment = _assigned_annotator(doc_id, account)
        annotator_id = account.actor.id
        submission = state.load_submission(doc_id, annotator_id)
        if submission["finalized"]:
            raise HTTPException(409, "annotation pass already submitted")

        existing_ids = {a["id"] for a in submission["annotations"]}
        new_annotations = _build_annotations(
            doc, annotator_id, assignment.round, payload.get("annotations", []), existing_ids
        )
        all_annotation_dicts = submission["annotations"] + [
            serialize.annotation_to_dict(a) for a in new_annotations
        ]
        by_id = {
            a["id"]: serialize.annotation_from_dict(a) for a in all_annotation_dicts
        }

        relations = []
        existing_rel_ids = {r["id"] for r in submission["relations"]}
        counter = len(existing_rel_ids)
        for entry in submission["relations"]:
            relations.append(serialize.relation_from_dict(entry))
        for entry in payload.get("relations", []):
            counter += 1
            rel_id = _canonical_id(annotator_id, entry.get("id") or f"r{counter}")
            if rel_id in existing_rel_ids:
                raise HTTPException(422, f"duplicate relation id {rel_id}")
            existing_rel_ids.add(rel_id)
            try:
                source_ref = _canonical_id(annotator_id, str(entry["source"]))
                target_ref = _canonical_id(annotator_id, str(entry["target"]))
                relations.append(
                    make_relation(
                        state.registry,
                        by_id,
                        id=rel_id,
                        source_id=source_ref,
                        target_id=target_ref,
                        rtype=entry["rtype"],
                    )
                )
            except (KeyError, TypeError) as exc:
                raise HTTPException(422, f"bad relation payload: {exc}")
            except (ModelError, ValueError) as exc:
                raise HTTPException(422, f"relation {rel_id}: {exc}")

        submission = {
            "annotations": all_annotation_dicts,
            "relations": [serialize.relation_to_dict(r) for r in relations],
            "finalized": True,
        }
        state.save_submission(doc_id, annotator_id, submission, "submit")

        for entry in all_annotation_dicts:
            state.history.record_acceptance(doc, serialize.annotation_from_dict(entry))

        partner = (
            assignment.annotator_b
            if annotator_id == assignment.annotator_a
            else assignment.annotator_a
        )
        partner_done = state.load_submission(doc_id, partner)["finalized"]
        if partner_done:
            doc.advance_status(DocumentStatus.ANNOTATED)
            state.save_document(doc, SYSTEM_ACTOR, "both-submitted")
        return {
            "submitted": True,
            "document_status": doc.status.value,
            "annotations": len(all_annotation_dicts),
            "relations": len(relations),
        }

    # -- adjudication ---------------------------------------------------------

    @app.get("/documents/{doc_id}/divergence")
    def get_divergence(
        doc_id: str,
        account: ActorAccount = Depends(require(Role.MANAGER, Role.ADJUDICATOR)),
    ) -> dict:
        doc = state.load_document(doc_id)
        assignment, set_a, set_b, rels_a, rels_b = state.divergence_inputs(doc)
        if (
            account.actor.role is Role.ADJUDICATOR
            and account.actor.id != assignment.adjudicator
        ):
            raise HTTPException(403, "not the adjudicator assigned to this document")
        try:
            divergence = adjudication.compute_divergence(
                doc, set_a, set_b, rels_a, rels_b, state.registry
            )
        except adjudication.AdjudicationError as exc:
            raise HTTPException(409, str(exc))
        return serialize.divergence_to_dict(divergence)

    @app.post("/documents/{doc_id}/adjudication")
    def adjudicate_document(
        doc_id: str,
        payload: dict,
        account: ActorAccount = Depends(require(Role.ADJUDICATOR)),
    ) -> dict:
        doc = state.load_document(doc_id)
        assignment, set_a, set_b, rels_a, rels_b = state.divergence_inputs(doc)
        try:
            divergence = adjudication.compute_divergence(
                doc, set_a, set_b, rels_a, rels_b, state.registry
            )
            report = agreement.compute_document_agreement(
                doc.id, set_a, set_b, rels_a, rels_b, state.registry
            )
            decision = adjudication.AdjudicationDecision(
                adjudicator=account.actor,
                kept=frozenset(payload.get("kept", [])),
                dropped=frozenset(payload.get("dropped", [])),
                note=payload.get("note"),
            )
            gold = adjudication.adjudicate(
                doc,
                divergence,
                decision,
                report,
                assigned_adjudicator=assignment.adjudicator,
                variant=state.config.variant,
                threshold=state.config.threshold,
            )
        except adjudication.AdjudicationError as exc:
            detail = str(exc)
            if "cannot create" in detail or "cannot remove" in detail:
                raise HTTPException(422, detail)
            raise HTTPException(403 if "adjudicator" in detail else 409, detail)
        except agreement.AgreementError as exc:
            raise HTTPException(409, str(exc))
        state.storage.put(
            KIND_GOLD, doc.id, serialize.gold_to_dict(gold), actor=account.actor.id, action="adjudicate"
        )
        state.save_document(doc, account.actor.id, "adjudicate")
        return gold_to_payload(gold)

    # -- reports --------------------------------------------------------------

    @app.get("/reports/iaa")
    def iaa_report(
        scope: str = Query("corpus"),
        doc: Optional[str] = None,
        per_type: bool = Query(False),
        account: ActorAccount = Depends(require(Role.MANAGER, Role.ADJUDICATOR)),
    ) -> dict:
        if scope == "doc":
            if not doc:
                raise HTTPException(422, "scope=doc requires ?doc=<id>")
            document = state.load_document(doc)
            _, set_a, set_b, rels_a, rels_b = state.divergence_inputs(document)
            report = agreement.compute_document_agreement(
                document.id, set_a, set_b, rels_a, rels_b, state.registry, per_type=per_type
            )
            return _document_report_payload(report)
        if scope == "corpus":
            reports = _all_document_reports(state)
            if not reports:
                raise HTTPException(409, "no double-annotated documents yet")
            try:
                corpus = agreement.aggregate(reports)
            except agreement.AgreementError as exc:
                raise HTTPException(409, str(exc))
            return {
                "documents": corpus.documents,
                "macro": _labelled(corpus.macro),
                "micro": _labelled(corpus.micro),
            }
        if scope == "round":
            return _round_report_payload(state)
        raise HTTPException(422, f"unknown scope {scope!r}")

    # -- export ---------------------------------------------------------------

    @app.get("/export")
    def export(
        format: str = Query("json"),
        doc: Optional[str] = None,
        segment: str = Query("all"),
        account: ActorAccount = Depends(require(Role.MANAGER, Role.ADJUDICATOR)),
    ) -> Response:
        if format not in ("json", "xml"):
            raise HTTPException(422, f"unknown format {format!r}")
        media = "application/json" if format == "json" else "application/xml"
        if doc is not None:
            data = state.storage.get(KIND_GOLD, doc)
            if data is None:
                raise HTTPException(404, f"document {doc} has no gold standard")
            gold = serialize.gold_from_dict(data)
            try:
                return Response(content=export_gold(gold, format), media_type=media)
            except ExportError as exc:
                raise HTTPException(409, str(exc))
        if segment not in ("gold", "platinum", "all"):
            raise HTTPException(422, f"unknown segment {segment!r}")
        golds = [
            g
            for g in state.gold_documents()
            if segment == "all" or g.segment.value == segment
        ]
        golds.sort(key=lambda g: g.document.id)
        if format == "json":
            payloads = [gold_to_payload(g) for g in golds]
            body = json.dumps({"documents": payloads}, ensure_ascii=False, indent=2) + "\n"
            return Response(content=body.encode("utf-8"), media_type=media)
        parts = ['<?xml version="1.0" encoding="utf-8"?>', "<corpus>"]
        for g in golds:
            doc_xml = payload_to_xml(gold_to_payload(g)).decode("utf-8")
            parts.append(doc_xml.split("\n", 1)[1].rstrip("\n"))
        parts.append("</corpus>")
        return Response(content=("\n".join(parts) + "\n").encode("utf-8"), media_type=media)

    # -- dictionaries -----------------------------------------------------------

    @app.get("/dictionaries/{kind}")
    def dictionaries(
        kind: str, account: ActorAccount = Depends(authenticate)
    ) -> Response:
        if kind not in ("negation", "abbreviation"):
            raise HTTPException(404, f"unknown dictionary {kind!r}")
        negation, abbreviation = extract_dictionaries(state.gold_documents(), state.registry)
        entries = negation if kind == "negation" else abbreviation
        return Response(
            content=dictionary_tsv(entries), media_type="text/tab-separated-values"
        )

    return app


def _resolve_actor(actors: dict[str, Actor], actor_id: str, expected: Role) -> Actor:
    actor = actors.get(actor_id)
    if actor is None:
        raise KeyError(actor_id)
    if actor.role is not expected:
        raise KeyError(f"{actor_id} (role {actor.role.value}, expected {expected.value})")
    return actor


def _labelled(values: dict[str, Optional[float]]) -> dict:
    out = {}
    for variant, value in values.items():
        out[variant] = {
            "value": value,
            "label": agreement.strength_label(value) if value is not None else None,
            "reliability": agreement.reliability_flag(value) if value is not None else None,
        }
    return out


def _document_report_payload(report: agreement.DocumentAgreement) -> dict:
    payload = {
        "doc": report.doc_id,
        "values": report.values,
        "labels": report.labels,
        "relations": report.relations,
        "per_rtype": report.per_rtype,
    }
    if report.per_type:
        payload["per_type"] = report.per_type
    return payload


def _all_document_reports(state: ServiceState) -> list[agreement.DocumentAgreement]:
    reports = []
    for doc_id, data in state.storage.list(KIND_DOCUMENT):
        if data["status"] not in ("annotated", "adjudicated"):
            continue
        doc = serialize.document_from_dict(data)
        try:
            _, set_a, set_b, rels_a, rels_b = state.divergence_inputs(doc)
        except HTTPException:
            continue
        reports.append(
            agreement.compute_document_agreement(
                doc.id, set_a, set_b, rels_a, rels_b, state.registry
            )
        )
    return reports


def _round_report_payload(state: ServiceState) -> dict:
    by_round: dict[int, dict[str, float]] = {}
    pairs: dict[str, frozenset] = {}
    for doc_id, data in state.storage.list(KIND_ASSIGNMENT):
        assignment = serialize.assignment_from_dict(data)
        doc_data = state.storage.get(KIND_DOCUMENT, doc_id)
        if doc_data is None or doc_data["status"] not in ("annotated", "adjudicated"):
            continue
        doc = serialize.document_from_dict(doc_data)
        try:
            _, set_a, set_b, _, _ = state.divergence_inputs(doc)
        except HTTPException:
            continue
        value = agreement.agreement_value(set_a, set_b, state.config.variant, state.registry)
        if value is None:
            continue
        by_round.setdefault(assignment.round, {})[doc_id] = value
        pairs[doc_id] = assignment.pair

    rounds = []
    reports = []
    for round_no in sorted(by_round):
        report = workflow.build_round_report(round_no, by_round[round_no], pairs)
        reports.append(report)
        rounds.append(
            {
                "round": round_no,
                "documents": report.doc_ids,
                "mean": report.mean_iaa,
                "per_pair": {
                    "|".join(sorted(pair)): value for pair, value in report.per_pair.items()
                },
            }
        )
    verdict = workflow.check_stability(reports, state.config.epsilon)
    return {"rounds": rounds, "stability": verdict.value, "epsilon": state.config.epsilon}
