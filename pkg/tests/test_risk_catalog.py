"""Severity rubric, catalog consistency, compound intersection detection."""

import itertools
import random

import pytest

from agentgov.errors import OutOfRangeError, SeverityInconsistentError
from agentgov.governor import Decision
from agentgov.model import AccessGrant, ActionVerb, DataClass, OwnerRef
from agentgov.registry import IdentityFlag, LifecycleEvent
from agentgov.riskcatalog import (
    EvidenceFlag,
    RiskCatalog,
    RiskEntry,
    RiskStateView,
    Severity,
    assess_severity,
    detect_intersections,
    seeded_entries,
)

from conftest import build_history_baseline, make_request, provision_agent

# Hand-written oracle: base severity per (impact, likelihood) cell, written
# out explicitly rather than computed from the product.
BASE_TABLE = {
    (1, 1): "Medium", (1, 2): "Medium", (2, 1): "Medium", (2, 2): "Medium",
    (1, 3): "High", (3, 1): "High",
    (2, 3): "Critical", (3, 2): "Critical", (3, 3): "Critical",
}
BAND_UP = {"Medium": "High", "High": "Critical", "Critical": "Critical"}


def oracle_severity(impact, likelihood, flags):
    if EvidenceFlag.THREAT_INTEL_ATTRIBUTED in flags:
        return "Critical"
    severity = BASE_TABLE[(impact, likelihood)]
    if EvidenceFlag.DOCUMENTED_INCIDENT in flags or EvidenceFlag.REGULATORY_RECOGNITION in flags:
        severity = BAND_UP[severity]
    return severity


def all_flag_subsets():
    flags = list(EvidenceFlag)
    for r in range(len(flags) + 1):
        for combo in itertools.combinations(flags, r):
            yield frozenset(combo)


def test_threat_intel_forces_critical_for_any_inputs():
    for impact in (1, 2, 3):
        for likelihood in (1, 2, 3):
            severity = assess_severity(
                impact, likelihood, {EvidenceFlag.THREAT_INTEL_ATTRIBUTED}
            )
            assert severity is Severity.CRITICAL


def test_structural_exposure_profile_is_medium():
    assert assess_severity(2, 2, set()) is Severity.MEDIUM


def test_documented_incident_elevates_one_band():
    assert assess_severity(2, 2, {EvidenceFlag.DOCUMENTED_INCIDENT}) is Severity.HIGH


def test_out_of_range_factors_rejected():
    for impact, likelihood in ((0, 1), (4, 1), (1, 0), (1, 4)):
        with pytest.raises(OutOfRangeError):
            assess_severity(impact, likelihood)


def test_rubric_exhaustive_against_oracle_table():
    checked = 0
    for impact in (1, 2, 3):
        for likelihood in (1, 2, 3):
            for flags in all_flag_subsets():
                got = assess_severity(impact, likelihood, flags)
                assert got.value == oracle_severity(impact, likelihood, flags), (
                    impact, likelihood, sorted(f.value for f in flags))
                checked += 1
    assert checked == 9 * 16


# -- catalog --------------------------------------------------------------------------


def test_seeded_catalog_all_rubric_consistent():
    catalog = RiskCatalog()
    entries = catalog.all()
    assert len(entries) == len(seeded_entries())
    for entry in entries:
        assert entry.severity is assess_severity(
            entry.impact, entry.likelihood, entry.evidence_flags
        )


def test_static_credential_persistence_seeded_critical():
    catalog = RiskCatalog()
    entry = catalog.get("static-credential-persistence")
    assert entry.airt_domain == "I"
    assert entry.severity is Severity.CRITICAL
    assert EvidenceFlag.THREAT_INTEL_ATTRIBUTED in entry.evidence_flags


def test_domain_viii_compute_governance_seeded_medium():
    catalog = RiskCatalog()
    rows = catalog.by_domain("VIII")
    assert rows and all(r.severity is Severity.MEDIUM for r in rows)


def test_register_inconsistent_severity_rejected():
    catalog = RiskCatalog(seed=False)
    with pytest.raises(SeverityInconsistentError):
        catalog.register_risk(
            RiskEntry(
                risk_id="bogus", airt_domain="I", name="Bogus", description="",
                severity=Severity.MEDIUM, impact=2, likelihood=2,
                primary_vector="", governance_implications="",
                evidence_flags=frozenset({EvidenceFlag.THREAT_INTEL_ATTRIBUTED}),
            )
        )


def test_register_consistent_addition_listable_by_domain():
    catalog = RiskCatalog(seed=False)
    entry = RiskEntry(
        risk_id="new-risk", airt_domain="III", name="New Risk", description="",
        severity=Severity.HIGH, impact=3, likelihood=1,
        primary_vector="", governance_implications="",
    )
    catalog.register_risk(entry)
    assert catalog.by_domain("III") == [entry]


def test_catalog_export_json_parses():
    import json

    rows = json.loads(RiskCatalog().export_json())
    assert {r["risk_id"] for r in rows} >= {"static-credential-persistence",
                                            "high-volume-autonomous-exfiltration"}


# -- compound intersections ----------------------------------------------------------------


def test_clean_all_jit_fixture_has_no_alerts(plane, owner):
    spec = provision_agent(plane, owner)
    request = make_request(spec.id)
    assessment = plane.decide(request)
    plane.issue_credential(spec.id, request.task_id, request.requested_scope,
                           assessment.assessment_id)
    assert plane.detect_intersections() == []


def test_silk_typhoon_fixture_fires_credential_exfiltration_nexus(plane, owner):
    from datetime import timedelta

    from conftest import T0

    grant = AccessGrant("pam-connector", "vault/*",
                        frozenset({ActionVerb.READ, ActionVerb.SEND}),
                        standing=True, waiver_id="legacy-waiver", waiver_owner="alice",
                        waiver_expires=T0 + timedelta(days=90))
    spec = provision_agent(plane, owner, grants=frozenset({grant}))
    plane.registry.add_flags(spec.id, {IdentityFlag.FOREIGN_EXPOSED})
    plane.decide(make_request(spec.id, action=ActionVerb.SEND,
                              data_class=DataClass.CONFIDENTIAL,
                              recipients=frozenset({"x@drop.external.example"})))
    alerts = plane.detect_intersections()
    assert any(a.nexus == "credential-exfiltration-state-actor" and
               a.identity_id == spec.id and a.domains == ("I", "III", "VII")
               for a in alerts)


def test_active_agent_with_integrity_mismatch_fires_supply_chain_nexus(plane, owner):
    spec = provision_agent(plane, owner)
    model_id = f"model-{spec.id.rsplit('/', 1)[-1]}"
    plane.verify_model_integrity(model_id, iter([b"tampered bytes"]))
    alerts = plane.detect_intersections()
    assert any(a.nexus == "supply-chain-authentication-influence" and
               a.identity_id == spec.id for a in alerts)


def test_injection_escalation_accountability_void_nexus(plane, owner):
    grants = frozenset({AccessGrant("infra", "*", frozenset({ActionVerb.WRITE}), admin=True)})
    spec = provision_agent(plane, owner, grants=grants)
    build_history_baseline(plane, spec.id)
    assessment = plane.decide(
        make_request(spec.id, tool="wire-transfer", action=ActionVerb.EXECUTE,
                     data_class=DataClass.CRITICAL, volume=10_000_000,
                     recipients=frozenset({"x@drop.external.example"}))
    )
    assert assessment.decision in (Decision.ESCALATE, Decision.DENY)
    assert assessment.alignment_score is not None
    plane.remove_owner(spec.id)  # accountability gap
    alerts = plane.detect_intersections()
    assert any(a.nexus == "injection-escalation-accountability-void" and
               a.identity_id == spec.id and a.domains == ("IV", "II", "V")
               for a in alerts)


def test_detect_intersections_matches_brute_force_on_random_fixtures():
    """Predicate-by-predicate brute force over randomized plain-data states."""
    from datetime import datetime, timezone

    from agentgov.governor import AccessRequest, Dimensions, RiskAssessment
    from agentgov.registry import AgentIdentity, IdentityKind, LifecycleState

    rng = random.Random(77)
    t0 = datetime(2026, 3, 2, tzinfo=timezone.utc)

    def random_state(n):
        identities, assessments, alerts_map, gate_failures = [], [], {}, {}
        for i in range(n):
            identity_id = f"migt://t/i-{i}"
            grants = set()
            if rng.random() < 0.4:
                grants.add(AccessGrant("db", "x/*", frozenset({ActionVerb.READ}),
                                       standing=rng.random() < 0.6,
                                       waiver_id="w" if rng.random() < 0.5 else None))
            if rng.random() < 0.4:
                grants.add(AccessGrant("mailer", "out/*", frozenset({ActionVerb.SEND})))
            identities.append(AgentIdentity(
                id=identity_id, kind=IdentityKind.AGENT, purpose="p",
                owner=None if rng.random() < 0.3 else OwnerRef(owner_id="o"),
                provisioned_at=t0, review_due=t0,
                lifecycle=rng.choice([LifecycleState.ACTIVE, LifecycleState.SUSPENDED]),
                grants=frozenset(grants),
                flags={IdentityFlag.FOREIGN_EXPOSED} if rng.random() < 0.4 else set(),
            ))
            if rng.random() < 0.6:
                assessments.append(RiskAssessment(
                    assessment_id=f"a-{i}",
                    request=AccessRequest(
                        identity_id=identity_id, session_id="s", task_id="t",
                        tool_id="x", action=ActionVerb.SEND,
                        data_class=rng.choice(list(DataClass)), timestamp=t0),
                    dims=Dimensions(0, 0, 0, 0),
                    composite=rng.random(),
                    alignment_score=rng.choice([None, rng.random()]),
                    decision=rng.choice(list(Decision)),
                ))
            if rng.random() < 0.3:
                alerts_map[identity_id] = ("admin-grants: 1",)
            if rng.random() < 0.3:
                gate_failures[identity_id] = ["integrity"]
        return RiskStateView(
            identities=identities, assessments=assessments,
            privilege_alerts=alerts_map, chain_valid=rng.random() < 0.7,
            gate_failures=gate_failures, alignment_threshold=0.7,
        )

    def brute_force(state):
        found = set()
        for identity in state.identities:
            standing = any(g.standing for g in identity.grants)
            exfil = any(a in (ActionVerb.SEND, ActionVerb.PUBLISH)
                        for g in identity.grants for a in g.actions)
            flagged = IdentityFlag.FOREIGN_EXPOSED in identity.flags
            conf = any(a.request.identity_id == identity.id
                       and a.request.data_class.rank >= DataClass.CONFIDENTIAL.rank
                       for a in state.assessments)
            if standing and exfil and flagged and conf:
                found.add(("credential-exfiltration-state-actor", identity.id))
            low_align = any(
                a.request.identity_id == identity.id
                and a.decision in (Decision.ESCALATE, Decision.DENY)
                and a.alignment_score is not None and a.alignment_score < 0.7
                for a in state.assessments)
            gap = (not state.chain_valid) or identity.owner is None
            if low_align and state.privilege_alerts.get(identity.id) and gap:
                found.add(("injection-escalation-accountability-void", identity.id))
            if state.gate_failures.get(identity.id) and \
                    identity.lifecycle is LifecycleState.ACTIVE:
                found.add(("supply-chain-authentication-influence", identity.id))
        return found

    for _ in range(40):
        state = random_state(rng.randrange(1, 25))
        got = {(a.nexus, a.identity_id) for a in detect_intersections(state)}
        assert got == brute_force(state)
