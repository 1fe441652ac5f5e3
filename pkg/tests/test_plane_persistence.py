"""Control plane composition: journal replay, mirror reconciliation, concurrency."""

import json
import threading

import pytest

from agentgov.config import Config
from agentgov.errors import ChainImportError
from agentgov.governor import Decision
from agentgov.model import ActionVerb, DataClass, OwnerRef
from agentgov.plane import ControlPlane
from agentgov.registry import LifecycleEvent

from conftest import make_request, provision_agent


def _seeded_plane(data_dir):
    plane = ControlPlane.open(Config(trust_domain="test.example"), str(data_dir))
    owner = OwnerRef(owner_id="alice", display_name="Alice")
    spec = provision_agent(plane, owner)
    request = make_request(spec.id)
    assessment = plane.decide(request)
    credential = plane.issue_credential(spec.id, request.task_id,
                                        request.requested_scope,
                                        assessment.assessment_id)
    bad = make_request(spec.id, tool="exfil-tool", action=ActionVerb.SEND,
                       data_class=DataClass.CONFIDENTIAL,
                       recipients=frozenset({"x@drop.external.example"}))
    escalated = plane.decide(bad)
    assert escalated.decision is Decision.ESCALATE
    return plane, spec, request, credential


def test_restart_replays_identical_state(tmp_path):
    data_dir = tmp_path / "state"
    plane, spec, request, credential = _seeded_plane(data_dir)
    head = plane.ledger.head_hash()
    entries = len(plane.ledger)
    registry_dump = plane.registry.export_jsonl()
    pending = [e.escalation_id for e in plane.governor.pending_escalations()]
    token = credential.token()
    plane.close()

    revived = ControlPlane.open(Config(trust_domain="test.example"), str(data_dir))
    assert len(revived.ledger) == entries
    assert revived.ledger.head_hash() == head
    assert revived.registry.export_jsonl() == registry_dump
    assert [e.escalation_id for e in revived.governor.pending_escalations()] == pending
    assert revived.verify_audit().valid
    # a token issued before restart still verifies against the replayed authority
    entry = next(iter(request.requested_scope))
    verdict = revived.verify_credential(token, entry.system, "data/report-writer/x",
                                        entry.action)
    assert verdict.value == "valid"
    revived.close()


def test_operations_continue_after_restart(tmp_path):
    data_dir = tmp_path / "state"
    plane, spec, request, _ = _seeded_plane(data_dir)
    escalation_id = plane.governor.pending_escalations()[0].escalation_id
    plane.close()

    revived = ControlPlane.open(Config(trust_domain="test.example"), str(data_dir))
    revived.resolve_escalation(escalation_id, "violation", "confirmed", "alice")
    assert revived.registry.get(spec.id).autonomy == 1
    assert revived.verify_audit().valid
    revived.close()

    third = ControlPlane.open(Config(trust_domain="test.example"), str(data_dir))
    assert third.registry.get(spec.id).autonomy == 1
    assert not third.governor.pending_escalations()
    third.close()


def test_tampered_ledger_mirror_detected_on_open(tmp_path):
    data_dir = tmp_path / "state"
    plane, *_ = _seeded_plane(data_dir)
    plane.close()

    ledger_path = data_dir / "ledger.jsonl"
    lines = ledger_path.read_text("utf-8").splitlines()
    record = json.loads(lines[3])
    record["actor"] = "migt://test.example/intruder"
    lines[3] = json.dumps(record, sort_keys=True)
    ledger_path.write_text("\n".join(lines) + "\n", "utf-8")

    with pytest.raises(ChainImportError):
        ControlPlane.open(Config(trust_domain="test.example"), str(data_dir))


def test_torn_ledger_tail_is_recovered_from_journal(tmp_path):
    """A crash can leave the mirror one entry ahead or behind; prefix-consistent
    mirrors are rewritten from the replayed chain."""
    data_dir = tmp_path / "state"
    plane, *_ = _seeded_plane(data_dir)
    expected = len(plane.ledger)
    plane.close()

    ledger_path = data_dir / "ledger.jsonl"
    lines = ledger_path.read_text("utf-8").splitlines()
    ledger_path.write_text("\n".join(lines[:-1]) + "\n", "utf-8")

    revived = ControlPlane.open(Config(trust_domain="test.example"), str(data_dir))
    assert len(revived.ledger) == expected
    assert ledger_path.read_text("utf-8").count("\n") == expected
    revived.close()


def test_concurrent_decides_yield_dense_ledger(plane, owner):
    specs = [provision_agent(plane, owner, f"migt://test.example/agent-{i}")
             for i in range(4)]
    errors = []

    def worker(spec):
        try:
            for _ in range(50):
                plane.decide(make_request(spec.id))
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=worker, args=(s,)) for s in specs]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert [e.seq for e in plane.ledger.entries] == list(range(len(plane.ledger)))
    assert plane.verify_audit().valid


def test_atomic_decommission_under_concurrent_reads(plane, owner):
    spec = provision_agent(plane, owner)
    request = make_request(spec.id)
    assessment = plane.decide(request)
    plane.issue_credential(spec.id, request.task_id, request.requested_scope,
                           assessment.assessment_id)
    stop = threading.Event()
    seen_inconsistent = []

    def reader():
        # revocation happens strictly before the terminal state becomes
        # visible, so once Decommissioned is observed, a subsequent read of
        # live credentials must be empty
        while not stop.is_set():
            state = plane.registry.get(spec.id).lifecycle.value
            if state == "Decommissioned":
                live = plane.authority.live_credentials(spec.id)
                if live:
                    seen_inconsistent.append((state, len(live)))

    t = threading.Thread(target=reader)
    t.start()
    plane.transition_lifecycle(spec.id, LifecycleEvent.DECOMMISSION)
    stop.set()
    t.join()
    assert not seen_inconsistent
    assert plane.authority.live_credentials(spec.id) == []
