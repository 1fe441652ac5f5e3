"""Seeded workload simulator driving the full governance pipeline at desk scale.

Three scenarios:

* ``benign`` — identities operate strictly inside their task scopes and
  baselines; every task is revoked at the end, so the run must close with
  zero standing privilege and a valid audit chain.
* ``injection-drift`` — a fraction of requests drift outside the declared
  task scope (unknown tool, external recipient, oversized volume, irreversible
  action), the signature of prompt injection or task expansion. Every planted
  request must be escalated or denied; no conforming request may be denied.
* ``silk-typhoon`` — a victim identity carries a legacy standing key on a
  PAM-tagged system with exfiltration capability, and the indicator feed
  attributes that key to a state-actor campaign. The compound intersection
  alert must fire and the exposure report must surface the planted key.

Runs are deterministic for a given (name, seed): the generated event stream
is byte-identical, timestamps come from a virtual clock, and all generated
ids are derived from the stream, so two runs produce identical reports.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Dict, List, Optional, Tuple

from .canonical import canonical_json_bytes, sha3_256_hex
from .config import Config
from .governor import AccessRequest, Decision, TaskSpec
from .model import AccessGrant, ActionVerb, DataClass, OwnerRef, ScopeEntry
from .plane import ControlPlane
from .provenance import AibomRecord
from .registry import IdentityKind, IdentitySpec, LifecycleEvent

SCENARIO_NAMES = ("benign", "injection-drift", "silk-typhoon")

SIM_EPOCH = datetime(2026, 3, 2, 9, 0, 0, tzinfo=timezone.utc)

TOOL_POOL = [
    "crm-reader",
    "doc-search",
    "report-writer",
    "ticket-updater",
    "mailer",
    "db-query",
    "wiki-editor",
    "calendar",
]
EXFIL_TOOL = "bulk-http-export"
INTERNAL_DOMAINS = ["corp.example", "intra.example"]
FOREIGN_DOMAIN = "drop.external.example"


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    identity_count: int = 100
    request_count: int = 1000

    def __post_init__(self):
        if self.name not in SCENARIO_NAMES:
            raise ValueError(f"unknown scenario {self.name!r} (choose from {SCENARIO_NAMES})")


@dataclass
class SimulationReport:
    scenario: str
    seed: int
    identity_count: int
    request_count: int
    decision_counts: Dict[str, int]
    planted_total: int
    planted_contained: int
    conforming_denied: int
    credentials_issued: int
    credentials_revoked: int
    standing_violations: int
    chain_valid: bool
    ledger_entries: int
    alerts: List[str]
    exposed_standing: int
    exposure_campaigns: List[str]
    event_stream_digest: str
    coverage_owner_pct: float
    hygiene_jit_pct: float

    def to_dict(self) -> dict:
        return dict(vars(self))


class SimClock:
    def __init__(self, start: datetime = SIM_EPOCH):
        self.now = start

    def __call__(self) -> datetime:
        return self.now

    def tick(self, seconds: float = 1.0) -> None:
        self.now = self.now + timedelta(seconds=seconds)


def run_simulation(scenario: Scenario, config: Optional[Config] = None) -> SimulationReport:
    rng = random.Random(scenario.seed)
    clock = SimClock()
    config = config or Config(
        trust_domain="sim.example",
        pam_system_tags=("pam-connector",),
    )
    plane = ControlPlane(config, clock_base=clock)

    events = _generate_stream(scenario, rng)
    stream_digest = sha3_256_hex(canonical_json_bytes(events))

    ids = [f"migt://sim.example/agent-{i:04d}" for i in range(scenario.identity_count)]
    owners = [
        OwnerRef(owner_id=f"owner-{i:03d}", display_name=f"Owner {i}")
        for i in range(max(1, scenario.identity_count // 10))
    ]
    _provision(plane, scenario, clock, ids, owners, events)

    planted_total = 0
    planted_contained = 0
    conforming_denied = 0
    issued = 0
    decisions: Counter = Counter()
    open_tasks = set()

    for event in events["requests"]:
        clock.tick(1.0)
        request = AccessRequest(
            identity_id=event["identity"],
            session_id=event["session"],
            task_id=event["task"],
            tool_id=event["tool"],
            action=ActionVerb(event["action"]),
            data_class=DataClass(event["data_class"]),
            recipients=frozenset(event["recipients"]),
            data_volume=event["volume"],
            timestamp=clock.now,
            requested_scope=frozenset(
                {ScopeEntry(event["system"], event["resource"], ActionVerb(event["action"]))}
            ),
        )
        assessment = plane.decide(request)
        decisions[assessment.decision.value] += 1
        if event["planted"]:
            planted_total += 1
            if assessment.decision in (Decision.ESCALATE, Decision.DENY):
                planted_contained += 1
        else:
            if assessment.decision is Decision.DENY:
                conforming_denied += 1
        if assessment.decision in (Decision.ALLOW, Decision.ALLOW_ENHANCED_LOGGING):
            plane.issue_credential(
                request.identity_id,
                request.task_id,
                request.requested_scope,
                assessment.assessment_id,
            )
            issued += 1
            open_tasks.add(request.task_id)
            if event.get("delegate_to"):
                plane.record_delegation(
                    request.identity_id,
                    event["delegate_to"],
                    request.task_id,
                    request.requested_scope,
                )

    revoked = 0
    for task in sorted(open_tasks):
        clock.tick(0.1)
        revoked += plane.revoke_task(task)

    clock.tick(1.0)
    if scenario.name == "silk-typhoon":
        plane.flag_identities()

    alerts = [a.nexus for a in plane.scan_intersections()]
    exposure = plane.exposure_assessment()
    standing = plane.list_standing_privilege()
    chain = plane.verify_audit()
    report_metrics = plane.metrics()

    return SimulationReport(
        scenario=scenario.name,
        seed=scenario.seed,
        identity_count=scenario.identity_count,
        request_count=len(events["requests"]),
        decision_counts=dict(sorted(decisions.items())),
        planted_total=planted_total,
        planted_contained=planted_contained,
        conforming_denied=conforming_denied,
        credentials_issued=issued,
        credentials_revoked=revoked,
        standing_violations=len(standing),
        chain_valid=chain.valid,
        ledger_entries=len(plane.ledger),
        alerts=sorted(set(alerts)),
        exposed_standing=exposure.exposed_standing_count,
        exposure_campaigns=sorted(
            {c for row in exposure.rows for c in row.matched_campaigns}
        ),
        event_stream_digest=stream_digest,
        coverage_owner_pct=report_metrics.coverage.owner_pct,
        hygiene_jit_pct=report_metrics.hygiene.jit_pct,
    )


def _generate_stream(scenario: Scenario, rng: random.Random) -> dict:
    """The full event stream as plain data; byte-identical for (name, seed)."""
    identities = []
    for i in range(scenario.identity_count):
        tools = rng.sample(TOOL_POOL, 3)
        cap = rng.choice(
            [DataClass.INTERNAL, DataClass.CONFIDENTIAL, DataClass.RESTRICTED]
        )
        allowlist = [f"partner-{rng.randrange(4)}@{rng.choice(INTERNAL_DOMAINS)}"]
        identities.append(
            {
                "index": i,
                "tools": tools,
                "data_cap": cap.value,
                "allowlist": allowlist,
                "autonomy": rng.choice([2, 2, 3]),
                "hours": sorted(rng.sample(range(8, 18), 6)),
            }
        )

    victim_index = 0 if scenario.name == "silk-typhoon" else None
    drift_every = 10 if scenario.name == "injection-drift" else 0

    requests = []
    for k in range(scenario.request_count):
        i = rng.randrange(scenario.identity_count)
        ident = identities[i]
        planted = bool(drift_every and k % drift_every == 5)
        victim_exfil = victim_index is not None and k % 40 == 7
        if victim_exfil:
            i = victim_index
            ident = identities[victim_index]
        identity_id = f"migt://sim.example/agent-{i:04d}"
        if planted:
            tool = EXFIL_TOOL
            action = rng.choice([ActionVerb.SEND, ActionVerb.PUBLISH, ActionVerb.EXECUTE])
            data_class = rng.choice([DataClass.CONFIDENTIAL, DataClass.RESTRICTED, DataClass.CRITICAL])
            recipients = [f"sink-{rng.randrange(3)}@{FOREIGN_DOMAIN}"]
            volume = 50_000_000 + rng.randrange(1_000_000)
        elif victim_exfil:
            tool = EXFIL_TOOL
            action = ActionVerb.SEND
            data_class = DataClass.CONFIDENTIAL
            recipients = [f"sink-{rng.randrange(3)}@{FOREIGN_DOMAIN}"]
            volume = 20_000_000 + rng.randrange(1_000_000)
        else:
            tool = rng.choice(ident["tools"])
            action = rng.choice([ActionVerb.READ, ActionVerb.READ, ActionVerb.WRITE])
            data_class = DataClass(ident["data_cap"])
            recipients = [] if rng.random() < 0.8 else [ident["allowlist"][0]]
            volume = rng.randrange(1_000, 900_000)
        requests.append(
            {
                "identity": identity_id,
                "session": f"session-{i:04d}",
                "task": f"task-{i:04d}",
                "tool": tool,
                "action": action.value,
                "data_class": data_class.value,
                "recipients": recipients,
                "volume": volume,
                "system": f"sys-{tool}",
                "resource": f"data/{tool}/*",
                "planted": planted,
                "delegate_to": (
                    f"migt://sim.example/agent-{(i + 1) % scenario.identity_count:04d}"
                    if (not planted and not victim_exfil and k % 100 == 50)
                    else None
                ),
            }
        )
    return {"identities": identities, "requests": requests}


def _provision(
    plane: ControlPlane,
    scenario: Scenario,
    clock: SimClock,
    ids: List[str],
    owners: List[OwnerRef],
    events: dict,
) -> None:
    model_count = max(1, scenario.identity_count // 50)
    digests = []
    for m in range(model_count):
        blob = f"model-weights-{scenario.name}-{m}".encode() * 64
        digest = sha3_256_hex(blob)
        plane.register_aibom(
            AibomRecord(
                model_id=f"model-{m:02d}",
                architecture="transformer-9b",
                parameter_digest=digest,
                training_data_sources=[{"source": "curated-corpus", "governance_status": "approved"}],
                dependencies=[{"name": "runtime", "version": "1.2"}],
            )
        )
        plane.verify_model_integrity(f"model-{m:02d}", iter([blob]))
        digests.append(digest)

    victim_index = 0 if scenario.name == "silk-typhoon" else None

    for i, identity_id in enumerate(ids):
        clock.tick(0.2)
        ident = events["identities"][i]
        owner = owners[i % len(owners)]
        grants = frozenset()
        if i == victim_index:
            grants = frozenset(
                {
                    AccessGrant(
                        system="pam-connector",
                        resource_pattern="vault/*",
                        actions=frozenset({ActionVerb.READ, ActionVerb.SEND}),
                        standing=True,
                        waiver_id="waiver-legacy-pam-key",
                        waiver_owner=owner.owner_id,
                        waiver_expires=clock.now + timedelta(days=90),
                    )
                }
            )
        spec = IdentitySpec(
            id=identity_id,
            kind=IdentityKind.AGENT,
            purpose=f"simulated workload {i}",
            owner=owner,
            grants=grants,
            associated_systems=frozenset({f"sys-{t}" for t in ident["tools"]}),
            autonomy=ident["autonomy"],
            aibom_ref=digests[i % len(digests)],
        )
        plane.register_identity(spec, approval=owner)
        plane.transition_lifecycle(identity_id, LifecycleEvent.APPROVE)
        plane.transition_lifecycle(identity_id, LifecycleEvent.ACTIVATE)
        plane.register_key(identity_id)

        tool_scope = {t: DataClass(ident["data_cap"]) for t in ident["tools"]}
        if i == victim_index:
            tool_scope[EXFIL_TOOL] = DataClass.CONFIDENTIAL
        plane.register_task(
            TaskSpec(
                task_id=f"task-{i:04d}",
                description=f"routine duties for workload {i}",
                tool_data_scope=tool_scope,
                recipients_allowlist=frozenset(ident["allowlist"]),
            )
        )
        manifest = [{"tool_id": t, "version": "1.0"} for t in sorted(set(ident["tools"]))]
        if i == victim_index:
            manifest.append({"tool_id": EXFIL_TOOL, "version": "1.0"})
        plane.measure_toolset(identity_id, f"session-{i:04d}", manifest)

        history = _history_for(ident, identity_id, clock.now)
        plane.build_baseline(identity_id, history)

    if scenario.name == "silk-typhoon":
        import json

        expiry = (clock.now + timedelta(days=30)).isoformat()
        feed = "\n".join(
            json.dumps(record)
            for record in [
                {
                    "indicator_id": "ind-st-001",
                    "kind": "credential-pattern",
                    "matcher": "grant:pam-connector:*",
                    "campaign": "silk-typhoon",
                    "expires_at": expiry,
                },
                {
                    "indicator_id": "ind-st-002",
                    "kind": "system-target",
                    "matcher": "pam-connector",
                    "campaign": "silk-typhoon",
                    "expires_at": expiry,
                },
            ]
        )
        plane.ingest_indicators(feed)
        plane.flag_identities()


def _history_for(ident: dict, identity_id: str, now: datetime) -> List[AccessRequest]:
    """Deterministic 60-request history covering the identity's normal habits."""
    history = []
    base = now - timedelta(days=7)
    hours = ident["hours"]
    for j in range(60):
        ts = (base + timedelta(hours=6 * j)).replace(hour=hours[j % len(hours)])
        history.append(
            AccessRequest(
                identity_id=identity_id,
                session_id=f"hist-{j}",
                task_id=f"task-{ident['index']:04d}",
                tool_id=ident["tools"][j % len(ident["tools"])],
                action=ActionVerb.READ if j % 3 else ActionVerb.WRITE,
                data_class=DataClass(ident["data_cap"]),
                recipients=frozenset() if j % 4 else frozenset(ident["allowlist"]),
                data_volume=100_000 + 10_000 * (j % 10),
                timestamp=ts,
            )
        )
    return history
