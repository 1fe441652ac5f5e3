"""HTTP surface: endpoint behavior, error mapping, and API/module parity."""

import json
from urllib.parse import quote

import pytest
from fastapi.testclient import TestClient

from agentgov.api import create_app, seed_demo_state
from agentgov.canonical import sha3_256_hex
from agentgov.config import Config
from agentgov.plane import ControlPlane

from conftest import (
    MODEL_BLOB,
    T0,
    FakeClock,
    make_request,
    make_spec,
    provision_agent,
    provision_model,
)


@pytest.fixture
def client(plane):
    return TestClient(create_app(plane))


def _register_payload(owner, identity_id="migt://test.example/api-1", aibom_ref=None):
    return {
        "spec": {
            "id": identity_id,
            "kind": "agent",
            "purpose": "api-driven workload",
            "owner": owner.to_dict(),
            "grants": [],
            "autonomy": 2,
            "aibom_ref": aibom_ref,
        },
        "approval": owner.to_dict(),
    }


def test_decide_endpoint_returns_allow_with_scores(plane, client, owner):
    spec = provision_agent(plane, owner)
    request = make_request(spec.id)
    response = client.post("/decide", json=request.to_dict())
    assert response.status_code == 200
    body = response.json()
    assert body["decision"] == "ALLOW"
    assert set(body["dims"]) == {"sensitivity", "irreversibility", "deviation",
                                 "alignment_static"}
    assert 0.0 <= body["composite"] <= 1.0


def test_audit_verify_endpoint_on_untouched_store(plane, client, owner):
    provision_agent(plane, owner)
    response = client.get("/audit/verify")
    assert response.status_code == 200
    assert response.json() == {"valid": True, "broken_at": None}


def test_register_lifecycle_flow_over_http(plane, client, owner):
    digest = provision_model(plane)
    payload = _register_payload(owner, aibom_ref=digest)
    created = client.post("/identities", json=payload)
    assert created.status_code == 201
    assert created.json()["lifecycle"] == "Requested"

    identity_id = payload["spec"]["id"]
    url = f"/identities/{quote(identity_id, safe='')}/lifecycle"
    assert client.post(url, json={"event": "approve"}).json()["lifecycle"] == "Approved"
    assert client.post(url, json={"event": "activate"}).json()["lifecycle"] == "Active"

    fetched = client.get(f"/identities/{quote(identity_id, safe='')}")
    assert fetched.status_code == 200
    assert fetched.json()["lifecycle"] == "Active"


def test_error_mapping(plane, client, owner):
    # unknown identity -> 404
    response = client.post(
        f"/identities/{quote('migt://test.example/ghost', safe='')}/lifecycle",
        json={"event": "approve"},
    )
    assert response.status_code == 404
    assert response.json()["error"] == "UnknownIdentity"
    # missing aibom -> gate failure -> 400
    response = client.post("/identities", json=_register_payload(owner))
    assert response.status_code == 400
    assert response.json()["error"] == "ProvenanceGateFailed"
    # duplicate -> 409
    digest = provision_model(plane, model_id="m-dup")
    payload = _register_payload(owner, identity_id="migt://test.example/api-dup")
    payload["spec"]["aibom_ref"] = sha3_256_hex(MODEL_BLOB)
    assert client.post("/identities", json=payload).status_code == 201
    assert client.post("/identities", json=payload).status_code == 409


def test_escalation_resolution_demotes_autonomy_visibly(plane, client, owner):
    spec = provision_agent(plane, owner, autonomy=3)
    request = make_request(spec.id, tool="exfil-tool", action="send",
                           data_class="confidential",
                           recipients=frozenset({"x@drop.external.example"}))
    # build via dict to exercise the wire shape end to end
    from agentgov.model import ActionVerb, DataClass

    body = make_request(spec.id, tool="exfil-tool", action=ActionVerb.SEND,
                        data_class=DataClass.CONFIDENTIAL,
                        recipients=frozenset({"x@drop.external.example"})).to_dict()
    decided = client.post("/decide", json=body).json()
    assert decided["decision"] == "ESCALATE"

    queue = client.get("/escalations").json()["escalations"]
    assert len(queue) == 1
    escalation_id = queue[0]["escalation_id"]
    assert queue[0]["assessment"]["decision"] == "ESCALATE"

    resolved = client.post(
        f"/escalations/{escalation_id}/resolve",
        json={"verdict": "violation", "justification": "confirmed exfil", "resolver": "alice"},
    )
    assert resolved.status_code == 200
    identity = client.get(f"/identities/{quote(spec.id, safe='')}").json()
    assert identity["autonomy"] == 2
    assert client.get("/escalations").json()["escalations"] == []


def test_credential_issue_verify_revoke_over_http(plane, client, owner):
    spec = provision_agent(plane, owner)
    request = make_request(spec.id)
    decided = client.post("/decide", json=request.to_dict()).json()
    issued = client.post("/credentials", json={
        "identity_id": spec.id,
        "task_id": request.task_id,
        "scope": [e.to_dict() for e in request.requested_scope],
        "assessment_id": decided["assessment_id"],
    })
    assert issued.status_code == 201
    token = issued.json()["token"]

    entry = next(iter(request.requested_scope))
    verdict = client.post("/credentials/verify", json={
        "token": token, "system": entry.system, "resource": "data/report-writer/x",
        "action": "read",
    }).json()
    assert verdict["verdict"] == "valid"

    revoked = client.post("/credentials/revoke", json={"task_id": request.task_id}).json()
    assert revoked["revoked"] == 1
    verdict = client.post("/credentials/verify", json={
        "token": token, "system": entry.system, "resource": "data/report-writer/x",
        "action": "read",
    }).json()
    assert verdict["verdict"] == "revoked"


def test_api_results_match_module_results(plane, client, owner):
    """Parity across representative read endpoints."""
    spec = provision_agent(plane, owner)
    client.post("/decide", json=make_request(spec.id).to_dict())

    assert client.get("/orphans").json()["orphans"] == plane.registry.detect_orphans()
    assert client.get("/audit/verify").json()["valid"] == plane.verify_audit().valid
    assert client.get("/metrics").json() == plane.metrics().to_dict()
    assert client.get("/regulatory/matrix").json() == json.loads(plane.matrix.export_json())
    assert (client.get("/zsp/violations").json()["violations"] ==
            [{"identity_id": v.identity_id, "kind": v.kind, "detail": v.detail}
             for v in plane.list_standing_privilege()])
    phase = client.get("/phase/1").json()
    gate = plane.phase_check(1)
    assert phase == {"phase": 1, "passed": gate.passed, "failures": list(gate.failures)}
    assert client.get("/risk/intersections").json()["alerts"] == [
        {"nexus": a.nexus, "identity_id": a.identity_id, "domains": list(a.domains),
         "evidence": a.evidence}
        for a in plane.detect_intersections()
    ]
    assert client.get("/risk/catalog").json()["risks"] == [
        r.to_dict() for r in plane.catalog.all()
    ]
    exposure = client.get("/threat/exposure").json()
    assert exposure["total"] == plane.exposure_assessment().total
    recon_api = client.get("/audit/reconstruct", params={"identity": spec.id}).json()
    entries, _ = plane.reconstruct(identity=spec.id)
    assert [e["seq"] for e in recon_api["entries"]] == [e.seq for e in entries]


def test_threat_indicator_feed_ingestion_over_http(plane, client, owner):
    from datetime import timedelta

    expires = (plane.clock() + timedelta(days=5)).isoformat()
    feed = "\n".join(
        json.dumps({"indicator_id": f"i-{k}", "kind": "system-target",
                    "matcher": "pam-*", "campaign": "c", "expires_at": expires})
        for k in range(3)
    )
    response = client.post("/threat/indicators", content=feed)
    assert response.status_code == 200
    assert response.json()["ingested"] == 3
    # malformed feed -> 400 with line number
    bad = client.post("/threat/indicators", content='{"nope"')
    assert bad.status_code == 400


def test_aibom_register_and_verify_over_http(plane, client, tmp_path):
    digest = sha3_256_hex(b"served-weights" * 100)
    created = client.post("/aibom", json={
        "model_id": "served-model", "architecture": "cnn",
        "parameter_digest": digest,
    })
    assert created.status_code == 201
    artifact = tmp_path / "weights.bin"
    artifact.write_bytes(b"served-weights" * 100)
    verdict = client.post("/aibom/served-model/verify", json={"path": str(artifact)})
    assert verdict.json()["verdict"] == "match"
    artifact.write_bytes(b"served-weights" * 99 + b"tamper")
    verdict = client.post("/aibom/served-model/verify", json={"path": str(artifact)})
    assert verdict.json()["verdict"] == "mismatch"


def test_regulatory_conflict_workflow_over_http(plane, client):
    created = client.post("/regulatory/conflicts", json={
        "conflict_id": "http-c1", "domains": ["V"], "jurisdictions": ["EU", "CN"],
        "description": "transparency filing vs trade secrets", "status": "open",
    })
    assert created.status_code == 201
    listed = client.get("/regulatory/conflicts").json()["conflicts"]
    assert any(c["conflict_id"] == "http-c1" for c in listed)
    # managed without approach -> 400
    bad = client.post("/regulatory/conflicts/http-c1/status", json={"status": "managed"})
    assert bad.status_code == 400
    good = client.post("/regulatory/conflicts/http-c1/status", json={
        "status": "managed", "management_approach": "regional partitioning"})
    assert good.status_code == 200
    tier = client.get("/regulatory/tier",
                      params={"jurisdictions": "EU,US,CN"}).json()
    assert tier["tier"] == "tri-plus" and tier["requires_conflict_registry"] is True


def test_seed_demo_provides_console_fixtures(plane, client):
    seed_demo_state(plane)
    pending = client.get("/identities", params={"lifecycle": "Requested"}).json()
    assert len(pending["identities"]) == 2
    queue = client.get("/escalations").json()["escalations"]
    assert len(queue) == 1
    conflicts = client.get("/regulatory/conflicts", params={"status": "open"}).json()
    assert len(conflicts["conflicts"]) == 1
