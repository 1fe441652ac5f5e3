"""Acceptance suite: one test per shipping criterion, at stated tolerances.

Each test prints a single PASS/FAIL line (run pytest with -s to see them all;
a failing criterion fails its test either way). Runtime bounds are asserted
with time.monotonic around the measured section only.
"""

import itertools
import random
import time
from dataclasses import replace
from datetime import datetime, timedelta, timezone

import pytest

from agentgov.audit import AuditLedger, EventKind
from agentgov.config import Config
from agentgov.credentials import ChainVerdict
from agentgov.governor import Decision, RiskPolicy, evaluate_decision
from agentgov.metrics import compute_metrics, phase_gate
from agentgov.model import ActionVerb, DataClass, OwnerRef, ScopeEntry
from agentgov.regulatory import ConflictLevel, bundled_dataset_text, load_matrix
from agentgov.riskcatalog import EvidenceFlag, Severity, assess_severity
from agentgov.simulate import Scenario, run_simulation

from conftest import T0, FakeClock
from test_metrics import assert_reports_equal, brute_force_metrics, random_snapshot
from test_risk_catalog import all_flag_subsets, oracle_severity


def _report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f" — {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


# 1. Regulatory matrix fidelity ------------------------------------------------------


def test_acceptance_regulatory_matrix_fidelity():
    started = time.monotonic()
    matrix = load_matrix()
    levels = tuple(matrix.conflict_level(d).value for d in ("I", "II", "III", "IV", "V", "VI"))
    round_trip = matrix.export_json() == bundled_dataset_text()
    texts_present = all(
        matrix.applicable_obligations({j}, d) for d in ("I", "II", "III", "IV", "V", "VI")
        for j in ("EU", "US", "CN")
    )
    elapsed = time.monotonic() - started
    ok = (
        levels == ("LOW", "LOW", "MODERATE", "MODERATE", "HIGH", "HIGH")
        and round_trip
        and texts_present
        and elapsed < 1.0
    )
    _report("regulatory matrix fidelity", ok,
            f"levels={levels} round_trip={round_trip} {elapsed:.3f}s")


# 2. Decision-matrix oracle ------------------------------------------------------------


def oracle_decision_table(composite, alignment, autonomy, irreversibility, flagged, policy):
    """Independent transcription of the decision logic as a rule list."""
    if autonomy == 1 and irreversibility >= 0.85:
        return "ESCALATE"
    gate_threshold = policy.t_risk * (policy.threat_modifier if flagged else 1.0)
    if composite < gate_threshold:
        return "ALLOW"
    if alignment >= policy.t_align:
        return "ALLOW_ENHANCED_LOGGING"
    if composite >= policy.t_critical:
        return "DENY"
    return "ESCALATE"


def test_acceptance_decision_matrix_oracle():
    started = time.monotonic()
    rng = random.Random(20260309)
    policy = RiskPolicy()
    divergences = 0
    for _ in range(10_000):
        composite = rng.random()
        alignment = rng.random()
        autonomy = rng.randint(1, 4)
        irrev = rng.choice([0.25, 0.5, 0.85, 0.85, 1.0])
        flagged = rng.random() < 0.5
        got, _, _ = evaluate_decision(
            composite, lambda: alignment, autonomy, irrev, flagged, policy
        )
        expected = oracle_decision_table(composite, alignment, autonomy, irrev, flagged,
                                         policy)
        if got.value != expected:
            divergences += 1
    elapsed = time.monotonic() - started
    ok = divergences == 0 and elapsed < 10.0
    _report("decision-matrix oracle (10,000 tuples)", ok,
            f"divergences={divergences} {elapsed:.1f}s")


# 3. ZSP closure --------------------------------------------------------------------------


def test_acceptance_zsp_closure_benign_simulation():
    started = time.monotonic()
    report = run_simulation(Scenario("benign", 42, identity_count=1000,
                                     request_count=10_000))
    elapsed = time.monotonic() - started
    ok = (report.standing_violations == 0 and report.chain_valid and elapsed < 60.0)
    _report("zsp closure (benign, 1k identities / 10k requests, seed 42)", ok,
            f"standing={report.standing_violations} chain={report.chain_valid} "
            f"{elapsed:.1f}s")


# 4. Tamper evidence ------------------------------------------------------------------------


def test_acceptance_tamper_evidence():
    clock = FakeClock()
    ledger = AuditLedger()
    for i in range(10_000):
        clock.tick(0.25)
        ledger.append(actor=f"migt://t/a-{i % 101}", kind=EventKind.DECISION,
                      payload={"n": i, "tool": f"tool-{i % 13}"},
                      session=f"s-{i % 17}", timestamp=clock.now)
    assert ledger.verify_chain().valid

    started = time.monotonic()
    rng = random.Random(4242)
    false_valid = 0
    wrong_index = 0
    for _ in range(100):
        k = rng.randrange(len(ledger.entries))
        entry = ledger.entries[k]
        mode = rng.choice(["payload", "prev_hash", "entry_hash", "actor"])
        if mode == "payload":
            mutated = replace(entry, payload={**entry.payload, "n": entry.payload["n"] ^ 1})
        elif mode == "actor":
            flipped = bytearray(entry.actor.encode())
            flipped[-1] ^= 0x01
            mutated = replace(entry, actor=flipped.decode("latin-1"))
        else:
            raw = bytearray(getattr(entry, mode))
            raw[rng.randrange(32)] ^= 1 << rng.randrange(8)
            mutated = replace(entry, **{mode: bytes(raw)})
        ledger.entries[k] = mutated
        verdict = ledger.verify_chain()
        if verdict.valid:
            false_valid += 1
        elif verdict.broken_at != k:
            wrong_index += 1
        ledger.entries[k] = entry
    elapsed = time.monotonic() - started
    ok = false_valid == 0 and wrong_index == 0 and elapsed < 30.0
    _report("tamper evidence (100 mutations over 10k entries)", ok,
            f"false_valid={false_valid} wrong_index={wrong_index} {elapsed:.1f}s")


# 5. Delegation fuzz ---------------------------------------------------------------------------


def _delegation_fixture():
    """An authority with keys and live credentials for chain construction."""
    from agentgov.plane import ControlPlane
    from conftest import make_request, provision_agent

    clock = FakeClock()
    plane = ControlPlane(Config(trust_domain="fuzz.example"), clock_base=clock)
    owner = OwnerRef(owner_id="fuzz")
    agents = [provision_agent(plane, owner, f"migt://fuzz.example/agent-{i}", task=False)
              for i in range(10)]
    from agentgov.governor import TaskSpec

    plane.register_task(TaskSpec(task_id="task-fuzz", description="fuzz",
                                 tool_data_scope={"report-writer": DataClass.RESTRICTED}))
    return plane, agents, clock


def _fresh_chain(plane, agents, rng, length):
    scope = frozenset({
        ScopeEntry("sys-report-writer", f"data/part-{i}/*", ActionVerb.READ)
        for i in range(length + 2)
    })
    order = rng.sample(range(len(agents)), length + 1)
    edges = []
    from conftest import make_request

    for hop in range(length):
        delegator = agents[order[hop]]
        request = make_request(delegator.id, task="task-fuzz")
        request = replace(request, requested_scope=scope)
        assessment = plane.decide(request)
        plane.issue_credential(delegator.id, "task-fuzz", scope, assessment.assessment_id)
        drop = rng.choice(sorted(scope))
        scope = frozenset(s for s in scope if s != drop)
        edges.append(plane.record_delegation(
            delegator.id, agents[order[hop + 1]].id, "task-fuzz", scope))
    return edges


def test_acceptance_delegation_fuzz():
    plane, agents, clock = _delegation_fixture()
    rng = random.Random(555)
    started = time.monotonic()

    valid_failures = 0
    for _ in range(1000):
        edges = _fresh_chain(plane, agents, rng, rng.randint(1, 4))
        if plane.authority.verify_delegation_chain(edges) is not ChainVerdict.VALID:
            valid_failures += 1

    base = _fresh_chain(plane, agents, rng, 4)
    corrupted_valid = 0
    for _ in range(1000):
        mode = rng.choice(["sig", "scope", "depth", "expiry"])
        chain = list(base)
        if mode == "sig":
            k = rng.randrange(len(chain))
            sig = bytearray(chain[k].signature)
            sig[rng.randrange(len(sig))] ^= 1 << rng.randrange(8)
            chain[k] = replace(chain[k], signature=bytes(sig))
        elif mode == "scope":
            k = rng.randrange(len(chain))
            widened = chain[k].delegated_scope | {
                ScopeEntry("sys-evil", f"loot-{rng.randrange(99)}/*", ActionVerb.DELETE)}
            chain[k] = replace(chain[k], delegated_scope=frozenset(widened))
        elif mode == "depth":
            while len(chain) <= plane.authority.max_delegation_depth:
                chain = chain + [replace(e, delegatee=e.delegatee + "x") for e in base]
        else:
            k = rng.randrange(len(chain))
            chain[k] = replace(chain[k],
                               issued_at=chain[k].issued_at - timedelta(seconds=10_000))
        if plane.authority.verify_delegation_chain(chain) is ChainVerdict.VALID:
            corrupted_valid += 1
    elapsed = time.monotonic() - started
    ok = valid_failures == 0 and corrupted_valid == 0 and elapsed < 30.0
    _report("delegation fuzz (1000 valid + 1000 corrupted)", ok,
            f"valid_failures={valid_failures} corrupted_valid={corrupted_valid} "
            f"{elapsed:.1f}s")


# 6. Injection-drift containment ------------------------------------------------------------------


def test_acceptance_injection_drift_containment():
    started = time.monotonic()
    report = run_simulation(Scenario("injection-drift", 42, identity_count=200,
                                     request_count=4000))
    elapsed = time.monotonic() - started
    ok = (report.planted_total > 0
          and report.planted_contained == report.planted_total
          and report.conforming_denied == 0
          and elapsed < 60.0)
    _report("injection-drift containment", ok,
            f"contained={report.planted_contained}/{report.planted_total} "
            f"conforming_denied={report.conforming_denied} {elapsed:.1f}s")


# 7. Silk-typhoon nexus -----------------------------------------------------------------------------


def test_acceptance_silk_typhoon_nexus():
    started = time.monotonic()
    report = run_simulation(Scenario("silk-typhoon", 42, identity_count=200,
                                     request_count=4000))
    elapsed = time.monotonic() - started
    ok = ("credential-exfiltration-state-actor" in report.alerts
          and report.exposed_standing >= 1
          and "silk-typhoon" in report.exposure_campaigns
          and elapsed < 60.0)
    _report("silk-typhoon nexus + exposure", ok,
            f"alerts={report.alerts} exposed={report.exposed_standing} "
            f"campaigns={report.exposure_campaigns} {elapsed:.1f}s")


# 8. Severity rubric exhaustion ------------------------------------------------------------------------


def test_acceptance_severity_rubric_exhaustion():
    mismatches = []
    for impact in (1, 2, 3):
        for likelihood in (1, 2, 3):
            for flags in all_flag_subsets():
                got = assess_severity(impact, likelihood, flags).value
                expected = oracle_severity(impact, likelihood, flags)
                if got != expected:
                    mismatches.append((impact, likelihood, sorted(f.value for f in flags)))
    anchor_threat = assess_severity(1, 1, {EvidenceFlag.THREAT_INTEL_ATTRIBUTED})
    anchor_structural = assess_severity(2, 2, set())
    ok = (not mismatches and anchor_threat is Severity.CRITICAL
          and anchor_structural is Severity.MEDIUM)
    _report("severity rubric exhaustion (9 x 16)", ok,
            f"mismatches={len(mismatches)} threat->Critical structural->Medium")


# 9. Phase gates at threshold boundaries ---------------------------------------------------------------


def test_acceptance_phase_gate_boundaries():
    from test_metrics import _gate_snapshot

    cases = [
        (1, "registered 80%", lambda p: _gate_snapshot(registered=p), 80),
        (1, "owner 90%", lambda p: _gate_snapshot(owner_pct=p), 90),
        (2, "tier1 crypto 50%", lambda p: _gate_snapshot(keys_pct=p), 50),
        (2, "baselines 80%", lambda p: _gate_snapshot(baselines_pct=p), 80),
        (3, "crypto 95%", lambda p: _gate_snapshot(keys_pct=p), 95),
    ]
    failures = []
    for phase, name, build, threshold in cases:
        at = phase_gate(phase, compute_metrics(build(threshold)))
        below = phase_gate(phase, compute_metrics(build(threshold - 2)))  # 1 of 50
        if not at.passed:
            failures.append(f"{name} fails at threshold: {at.failures}")
        if below.passed:
            failures.append(f"{name} passes below threshold")
    ok = not failures
    _report("phase gates at 80/90/50/80/95 boundaries", ok, "; ".join(failures))


# 10. Metrics oracle equivalence -----------------------------------------------------------------------


def test_acceptance_metrics_oracle_equivalence():
    rng = random.Random(31337)
    started = time.monotonic()
    for _ in range(100):
        snapshot = random_snapshot(rng, max_identities=5000)
        assert_reports_equal(compute_metrics(snapshot), brute_force_metrics(snapshot))
    elapsed = time.monotonic() - started
    _report("metrics oracle equivalence (100 snapshots <= 5000 identities)", True,
            f"{elapsed:.1f}s")


# 11. Desk-scale throughput -------------------------------------------------------------------------------


def test_acceptance_desk_scale_throughput():
    from agentgov.audit import AuditLedger
    from agentgov.governor import AccessGovernor, AccessRequest, TaskSpec
    from agentgov.registry import (
        IdentityKind,
        IdentityRegistry,
        IdentitySpec,
        LifecycleEvent,
    )

    clock = FakeClock()
    ledger = AuditLedger()
    registry = IdentityRegistry(ledger, trust_domain="perf.example", clock=clock)
    governor = AccessGovernor(ledger, registry, clock=clock)
    owner = OwnerRef(owner_id="perf")
    n_identities = 10_000
    ids = []
    for i in range(n_identities):
        identity_id = f"migt://perf.example/agent-{i:05d}"
        registry.register_identity(
            IdentitySpec(id=identity_id, kind=IdentityKind.SERVICE_ACCOUNT,
                         purpose="perf", owner=owner, autonomy=2),
            approval=owner,
        )
        registry.transition_lifecycle(identity_id, LifecycleEvent.APPROVE)
        registry.transition_lifecycle(identity_id, LifecycleEvent.ACTIVATE)
        ids.append(identity_id)
    governor.register_task(TaskSpec(task_id="task-perf", description="perf",
                                    tool_data_scope={"scan": DataClass.CONFIDENTIAL}))

    requests = [
        AccessRequest(
            identity_id=ids[k % n_identities], session_id="s", task_id="task-perf",
            tool_id="scan", action=ActionVerb.READ,
            data_class=DataClass.INTERNAL if k % 2 else DataClass.CONFIDENTIAL,
            data_volume=k % 10_000, timestamp=clock.now,
        )
        for k in range(100_000)
    ]
    started = time.monotonic()
    for request in requests:
        governor.decide(request)
    elapsed = time.monotonic() - started
    ok = elapsed < 60.0
    _report("desk-scale throughput (100k decides over 10k identities)", ok,
            f"{elapsed:.1f}s ({100_000 / elapsed:,.0f} decisions/s)")
