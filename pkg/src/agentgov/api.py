"""HTTP/JSON service surface over the control plane.

The API is deliberately thin: every handler maps one endpoint to one plane
operation, so anything reachable over HTTP is equally reachable through the
module APIs. Errors map to JSON problem bodies with conventional status
codes. Identity ids are workload URIs and ride in the path (path converter
tolerates the embedded slashes) or URL-encoded.
"""

from __future__ import annotations

import json
from datetime import datetime
from typing import Optional
from urllib.parse import unquote

from fastapi import Body, FastAPI, Query, Request, Response

from .credentials import DelegationEdge
from .errors import (
    AcceptanceTokenError,
    ChainImportError,
    DecisionNotPermissiveError,
    DuplicateIdError,
    GovernanceError,
    IdentityNotActiveError,
    IllegalTransitionError,
    MalformedFeedError,
    NotActiveError,
    NotOwnerError,
    RangeOutOfBoundsError,
    ScopeExceedsPolicyError,
    ScopeWideningError,
    UnknownEscalationError,
    UnknownIdentityError,
    UnknownPhaseError,
)
from .governor import AccessRequest, TaskSpec
from .model import iso, parse_iso
from .plane import ControlPlane
from .provenance import AibomRecord
from .regulatory import ConflictEntry

_STATUS = {
    UnknownIdentityError: 404,
    UnknownEscalationError: 404,
    DuplicateIdError: 409,
    IllegalTransitionError: 409,
    NotOwnerError: 403,
    AcceptanceTokenError: 403,
    NotActiveError: 409,
    IdentityNotActiveError: 409,
    DecisionNotPermissiveError: 409,
    ScopeExceedsPolicyError: 409,
    ScopeWideningError: 409,
    RangeOutOfBoundsError: 400,
    MalformedFeedError: 400,
    UnknownPhaseError: 400,
    ChainImportError: 409,
}


def _problem(exc: GovernanceError) -> Response:
    status = _STATUS.get(type(exc), 400)
    body = {"error": type(exc).__name__.removesuffix("Error"), "detail": str(exc)}
    return Response(
        content=json.dumps(body), status_code=status, media_type="application/json"
    )


def _identity_view(plane: ControlPlane, identity_id: str) -> dict:
    identity = plane.registry.get(identity_id)
    report = plane.aggregate_privilege(identity_id)
    return {
        **identity.to_dict(),
        "privilege": {
            "distinct_systems": report.distinct_systems,
            "admin_grant_count": report.admin_grant_count,
            "alerts": list(report.alerts),
        },
    }


def _escalation_view(esc) -> dict:
    a = esc.assessment
    return {
        "escalation_id": esc.escalation_id,
        "created_at": iso(esc.created_at),
        "resolved": esc.resolved,
        "resolution": esc.resolution,
        "justification": esc.justification,
        "resolver": esc.resolver,
        "assessment": a.to_dict(),
    }


def create_app(plane: ControlPlane) -> FastAPI:
    app = FastAPI(title="agentgov", docs_url=None, redoc_url=None)
    app.state.plane = plane

    @app.exception_handler(GovernanceError)
    async def governance_error(request: Request, exc: GovernanceError):
        return _problem(exc)

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return Response(
            content=json.dumps({"error": "ValueError", "detail": str(exc)}),
            status_code=400,
            media_type="application/json",
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "ledger_entries": len(plane.ledger)}

    # -- identities ------------------------------------------------------------

    @app.post("/identities", status_code=201)
    def register_identity(payload: dict = Body(...)):
        identity = plane.register_identity(payload["spec"], payload["approval"])
        return identity.to_dict()

    @app.get("/identities")
    def list_identities(lifecycle: Optional[str] = None):
        rows = [i.to_dict() for i in plane.registry.all()]
        if lifecycle:
            rows = [r for r in rows if r["lifecycle"] == lifecycle]
        return {"identities": rows}

    @app.get("/identities/{identity_id:path}/privilege")
    def privilege(identity_id: str):
        return _identity_view(plane, unquote(identity_id))

    @app.post("/identities/{identity_id:path}/lifecycle")
    def lifecycle(identity_id: str, payload: dict = Body(...)):
        state = plane.transition_lifecycle(
            unquote(identity_id), payload["event"], note=payload.get("justification")
        )
        return {"id": unquote(identity_id), "lifecycle": state.value}

    @app.post("/identities/{identity_id:path}/owner")
    def assign_owner(identity_id: str, payload: dict = Body(...)):
        identity = plane.assign_owner(
            unquote(identity_id), payload["owner"], payload["acceptance_token"]
        )
        return identity.to_dict()

    @app.post("/identities/{identity_id:path}/certify")
    def certify(identity_id: str, payload: dict = Body(...)):
        record = plane.certify(
            unquote(identity_id),
            payload.get("behavioral_summary", ""),
            payload["attesting_owner"],
        )
        return {
            "identity_id": record.identity_id,
            "certified_at": iso(record.certified_at),
            "certifier": record.certifier,
            "verdict": record.verdict,
        }

    @app.get("/identities/{identity_id:path}")
    def get_identity(identity_id: str):
        return _identity_view(plane, unquote(identity_id))

    @app.get("/orphans")
    def orphans():
        return {"orphans": plane.registry.detect_orphans(plane.clock())}

    @app.post("/discovery/import")
    def import_discovered(payload: dict = Body(...)):
        out = plane.import_discovered(payload["records"])
        return {"imported": [i.to_dict() for i in out]}

    # -- credentials -----------------------------------------------------------

    @app.post("/credentials", status_code=201)
    def issue(payload: dict = Body(...)):
        credential = plane.issue_credential(
            payload["identity_id"],
            payload["task_id"],
            payload["scope"],
            payload["assessment_id"],
            ttl_seconds=payload.get("ttl_seconds"),
        )
        return {
            "credential_id": credential.credential_id,
            "token": credential.token(),
            "subject": credential.subject,
            "task_id": credential.task_id,
            "issued_at": iso(credential.issued_at),
            "ttl_seconds": credential.ttl_seconds,
        }

    @app.post("/credentials/verify")
    def verify_credential(payload: dict = Body(...)):
        verdict = plane.verify_credential(
            payload["token"], payload["system"], payload["resource"], payload["action"]
        )
        return {"verdict": verdict.value}

    @app.post("/credentials/revoke")
    def revoke(payload: dict = Body(...)):
        return {"revoked": plane.revoke_task(payload["task_id"])}

    @app.post("/keys/{workload_uri:path}", status_code=201)
    def register_key(workload_uri: str):
        record = plane.register_key(unquote(workload_uri))
        return {
            "workload_uri": record.workload_uri,
            "algorithm": record.algorithm,
            "public_key": record.public_key.hex(),
        }

    @app.post("/delegations", status_code=201)
    def record_delegation(payload: dict = Body(...)):
        edge = plane.record_delegation(
            payload["delegator"], payload["delegatee"], payload["task_id"], payload["scope"]
        )
        return edge.to_dict()

    @app.post("/delegations/verify")
    def verify_chain(payload: dict = Body(...)):
        chain = [DelegationEdge.from_dict(e) for e in payload["chain"]]
        verdict = plane.authority.verify_delegation_chain(chain, plane.clock())
        return {"verdict": verdict.value}

    @app.post("/toolsets", status_code=201)
    def measure(payload: dict = Body(...)):
        m = plane.measure_toolset(
            payload["identity_id"], payload["session_id"], payload["manifest"]
        )
        return {
            "identity_id": m.identity_id,
            "session_id": m.session_id,
            "manifest_digest": m.manifest_digest,
            "measured_at": iso(m.measured_at),
        }

    @app.get("/zsp/violations")
    def zsp():
        return {
            "violations": [
                {"identity_id": v.identity_id, "kind": v.kind, "detail": v.detail}
                for v in plane.list_standing_privilege()
            ]
        }

    # -- governance -------------------------------------------------------------

    @app.post("/tasks", status_code=201)
    def register_task(payload: dict = Body(...)):
        spec = plane.register_task(payload)
        return spec.to_dict()

    @app.post("/baselines", status_code=201)
    def build_baseline(payload: dict = Body(...)):
        history = [AccessRequest.from_dict(r) for r in payload["history"]]
        baseline = plane.build_baseline(payload["identity_id"], history)
        return baseline.to_dict()

    @app.post("/decide")
    def decide(payload: dict = Body(...)):
        assessment = plane.decide(payload)
        return assessment.to_dict()

    @app.get("/escalations")
    def escalations(include_resolved: bool = False):
        if include_resolved:
            rows = list(plane.governor._escalations.values())
        else:
            rows = plane.governor.pending_escalations()
        return {"escalations": [_escalation_view(e) for e in rows]}

    @app.post("/escalations/{escalation_id}/resolve")
    def resolve(escalation_id: str, payload: dict = Body(...)):
        esc = plane.resolve_escalation(
            escalation_id,
            payload["verdict"],
            payload.get("justification", ""),
            payload.get("resolver", ""),
        )
        return _escalation_view(esc)

    # -- audit ------------------------------------------------------------------

    @app.get("/audit/verify")
    def audit_verify(start: int = 0, end: Optional[int] = None):
        verdict = plane.verify_audit(start, end)
        return {"valid": verdict.valid, "broken_at": verdict.broken_at}

    @app.get("/audit/reconstruct")
    def reconstruct(
        identity: Optional[str] = None,
        session: Optional[str] = None,
        task: Optional[str] = None,
        start: Optional[str] = None,
        end: Optional[str] = None,
    ):
        entries, attribution = plane.reconstruct(
            identity=identity,
            session=session,
            task=task,
            start=parse_iso(start) if start else None,
            end=parse_iso(end) if end else None,
        )
        return {
            "entries": [e.to_wire() for e in entries],
            "attribution": (
                None
                if attribution is None
                else {
                    "agent": attribution.agent,
                    "model_ref": attribution.model_ref,
                    "owners": [
                        {
                            "owner": span.owner,
                            "start": iso(span.start),
                            "end": iso(span.end) if span.end else None,
                        }
                        for span in attribution.owners
                    ],
                }
            ),
        }

    @app.get("/audit/export")
    def audit_export():
        return Response(content=plane.ledger.export_jsonl(), media_type="application/jsonl")

    # -- provenance -----------------------------------------------------------------

    @app.post("/aibom", status_code=201)
    def register_aibom(payload: dict = Body(...)):
        record = plane.register_aibom(payload)
        return record.to_dict()

    @app.post("/aibom/{model_id}/verify")
    def verify_model(model_id: str, payload: dict = Body(...)):
        if "path" in payload:
            with open(payload["path"], "rb") as f:
                verdict = plane.verify_model_integrity(model_id, f)
        else:
            import base64

            content = base64.b64decode(payload["content_base64"])
            verdict = plane.verify_model_integrity(model_id, iter([content]))
        return {"model_id": model_id, "verdict": verdict.value}

    # -- regulatory --------------------------------------------------------------------

    @app.get("/regulatory/matrix")
    def matrix():
        return json.loads(plane.matrix.export_json())

    @app.get("/regulatory/conflicts")
    def conflicts(status: Optional[str] = None):
        rows = plane.conflicts.all() if status is None else plane.conflicts.by_status(status)
        return {"conflicts": [c.to_dict() for c in rows]}

    @app.post("/regulatory/conflicts", status_code=201)
    def register_conflict(payload: dict = Body(...)):
        entry = plane.register_conflict(payload)
        return entry.to_dict()

    @app.post("/regulatory/conflicts/{conflict_id}/status")
    def conflict_status(conflict_id: str, payload: dict = Body(...)):
        entry = plane.set_conflict_status(
            conflict_id, payload["status"], payload.get("management_approach")
        )
        return entry.to_dict()

    @app.get("/regulatory/tier")
    def tier(jurisdictions: str = Query(...), domains: Optional[str] = None):
        result = plane.tier_deployment(
            [j.strip() for j in jurisdictions.split(",") if j.strip()],
            [d.strip() for d in domains.split(",")] if domains else None,
        )
        return {
            "tier": result.tier.value,
            "domain_conflicts": {d: lv.value for d, lv in result.domain_conflicts.items()},
            "max_conflict": result.max_conflict.value,
            "requires_conflict_registry": result.requires_conflict_registry,
        }

    # -- metrics and risk ------------------------------------------------------------------

    @app.get("/metrics")
    def metrics():
        return plane.metrics().to_dict()

    @app.get("/phase/{phase}")
    def phase(phase: int):
        result = plane.phase_check(phase)
        return {"phase": result.phase, "passed": result.passed, "failures": list(result.failures)}

    @app.post("/threat/indicators")
    async def indicators(request: Request):
        body = (await request.body()).decode("utf-8")
        count = plane.ingest_indicators(body)
        return {"ingested": count}

    @app.post("/threat/flag")
    def flag():
        flagged = plane.flag_identities()
        return {"flagged": {k: sorted(f.value for f in v) for k, v in flagged.items()}}

    @app.get("/threat/exposure")
    def exposure():
        report = plane.exposure_assessment()
        return {
            "total": report.total,
            "standing_count": report.standing_count,
            "exposed_standing_count": report.exposed_standing_count,
            "rows": [
                {
                    "credential_ref": r.credential_ref,
                    "identity_id": r.identity_id,
                    "standing": r.standing,
                    "matched_campaigns": list(r.matched_campaigns),
                    "downstream_systems": list(r.downstream_systems),
                }
                for r in report.rows
            ],
        }

    @app.get("/risk/intersections")
    def intersections():
        return {
            "alerts": [
                {
                    "nexus": a.nexus,
                    "identity_id": a.identity_id,
                    "domains": list(a.domains),
                    "evidence": a.evidence,
                }
                for a in plane.detect_intersections()
            ]
        }

    @app.get("/risk/catalog")
    def catalog(domain: Optional[str] = None):
        rows = plane.catalog.by_domain(domain) if domain else plane.catalog.all()
        return {"risks": [r.to_dict() for r in rows]}

    return app


def serve(config, plane: Optional[ControlPlane] = None, seed_demo: bool = False):
    """Build the app and run it under uvicorn (blocking)."""
    import uvicorn

    from .errors import BindFailureError

    if plane is None:
        plane = (
            ControlPlane.open(config) if config.data_dir else ControlPlane(config)
        )
    if seed_demo:
        seed_demo_state(plane)
    app = create_app(plane)
    try:
        uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="warning")
    except OSError as exc:
        raise BindFailureError(f"{config.listen_host}:{config.listen_port}: {exc}") from exc


def seed_demo_state(plane: ControlPlane) -> None:
    """Small fixture for interactive use: pending approvals, one escalation,
    an open HIGH conflict, and a threat indicator."""
    from datetime import timedelta

    from .canonical import sha3_256_hex
    from .model import ActionVerb, DataClass, OwnerRef, ScopeEntry
    from .registry import IdentityKind, IdentitySpec, LifecycleEvent

    blob = b"demo-model-weights" * 512
    digest = sha3_256_hex(blob)
    plane.register_aibom(
        AibomRecord(
            model_id="demo-model",
            architecture="transformer-2b",
            parameter_digest=digest,
        )
    )
    plane.verify_model_integrity("demo-model", iter([blob]))

    owner = OwnerRef(owner_id="ops-lead", display_name="Ops Lead", contact="ops@corp.example")
    for i in range(2):
        plane.register_identity(
            IdentitySpec(
                id=f"migt://demo.example/pending-{i}",
                kind=IdentityKind.AGENT,
                purpose="awaiting provisioning approval",
                owner=owner,
                aibom_ref=digest,
            ),
            approval=owner,
        )

    runner = "migt://demo.example/runner"
    plane.register_identity(
        IdentitySpec(
            id=runner,
            kind=IdentityKind.AGENT,
            purpose="report distribution",
            owner=owner,
            autonomy=2,
            aibom_ref=digest,
        ),
        approval=owner,
    )
    plane.transition_lifecycle(runner, LifecycleEvent.APPROVE)
    plane.transition_lifecycle(runner, LifecycleEvent.ACTIVATE)
    plane.register_key(runner)
    plane.register_task(
        TaskSpec(
            task_id="task-demo",
            description="compile and file weekly report",
            tool_data_scope={"report-writer": DataClass.INTERNAL},
            recipients_allowlist=frozenset({"archive@corp.example"}),
        )
    )
    plane.decide(
        AccessRequest(
            identity_id=runner,
            session_id="session-demo",
            task_id="task-demo",
            tool_id="bulk-http-export",
            action=ActionVerb.SEND,
            data_class=DataClass.RESTRICTED,
            recipients=frozenset({"sink@drop.external.example"}),
            data_volume=25_000_000,
            timestamp=plane.clock(),
            requested_scope=frozenset(
                {ScopeEntry("sys-export", "data/*", ActionVerb.SEND)}
            ),
        )
    )
    plane.register_conflict(
        ConflictEntry(
            conflict_id="conf-dom5-eu-cn",
            domains=["V"],
            jurisdictions=["EU", "CN"],
            description=(
                "model transparency filing obligations conflict with trade secret protection"
            ),
            status="open",
        )
    )
    expiry = iso(plane.clock() + timedelta(days=30))
    plane.ingest_indicators(
        json.dumps(
            {
                "indicator_id": "demo-ind-1",
                "kind": "system-target",
                "matcher": "pam-*",
                "campaign": "silk-typhoon",
                "expires_at": expiry,
            }
        )
    )
