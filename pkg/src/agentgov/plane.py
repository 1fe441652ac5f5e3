"""The composed control plane: one object wiring every governance module.

Cross-module effects flow through here: registering an agent runs the
provenance gate, decommissioning revokes live credentials atomically with the
registry update, decisions feed the escalation queue and autonomy windows,
threat flags tighten the decision thresholds, and every write lands in the
audit ledger.

With a data directory attached, every mutating command is journaled with its
resolved parameters and replayed on start (see persistence module). Writes
are serialized behind one lock with the clock frozen per command, so rebuild
regenerates a byte-identical audit chain.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime, timedelta
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .audit import AuditLedger, ChainVerdict, EventKind
from .canonical import b64url_decode
from .config import Config
from .credentials import (
    Credential,
    CredentialAuthority,
    CredentialVerdict,
    DelegationEdge,
    ToolsetMeasurement,
)
from .errors import ChainImportError, GovernanceError
from .governor import (
    AccessGovernor,
    AccessRequest,
    BehavioralBaseline,
    Decision,
    Escalation,
    RiskAssessment,
    TaskSpec,
)
from .metrics import GateResult, MetricsReport, SystemSnapshot, compute_metrics, phase_gate
from .model import OwnerRef, Scope, iso, parse_iso, scope_from_list, scope_to_list, utcnow
from .persistence import DataStore
from .provenance import AibomRecord, IntegrityVerdict, ProvenanceStore
from .registry import (
    AgentIdentity,
    DiscoveryRecord,
    IdentityKind,
    IdentityRegistry,
    IdentitySpec,
    LifecycleEvent,
    LifecycleState,
)
from .regulatory import (
    ConflictEntry,
    ConflictRegistry,
    ObligationMatrix,
    TieringResult,
    load_matrix,
    tier_deployment,
)
from .riskcatalog import CompoundAlert, RiskCatalog, RiskStateView, detect_intersections
from .threatintel import CredentialInventoryItem, ExposureReport, ThreatOverlay


class PlaneClock:
    """Injectable clock; frozen per command so one command shares one instant."""

    def __init__(self, base: Callable[[], datetime] = utcnow):
        self.base = base
        self.frozen: Optional[datetime] = None

    def __call__(self) -> datetime:
        return self.frozen if self.frozen is not None else self.base()


class ControlPlane:
    def __init__(
        self,
        config: Optional[Config] = None,
        *,
        clock_base: Callable[[], datetime] = utcnow,
    ):
        self.config = config or Config()
        self.clock = PlaneClock(clock_base)
        self._write_lock = threading.RLock()
        self._store: Optional[DataStore] = None
        self._replaying = False

        self.ledger = AuditLedger(sink=self._ledger_sink)
        self.provenance = ProvenanceStore(self.ledger, clock=self.clock)
        self.registry = IdentityRegistry(
            self.ledger,
            trust_domain=self.config.trust_domain,
            certification_cadence=timedelta(days=self.config.certification_cadence_days),
            deployment_gate=self.provenance.deployment_gate,
            on_decommission=self._revoke_for_identity,
            clock=self.clock,
        )
        self.authority = CredentialAuthority(
            self.ledger,
            self.registry,
            max_ttl=self.config.max_ttl,
            max_delegation_depth=self.config.max_delegation_depth,
            clock=self.clock,
        )
        self.governor = AccessGovernor(
            self.ledger,
            self.registry,
            self.config.policy,
            measurement_flag=self.authority.measurement_violation,
            min_history=self.config.min_history,
            promotion_streak=self.config.promotion_streak,
            aggregation_alert_systems=self.config.aggregation_alert_systems,
            live_credentials=self.authority.live_credentials,
            clock=self.clock,
        )
        self.overlay = ThreatOverlay(self.config.pam_system_tags, clock=self.clock)
        self.catalog = RiskCatalog()
        self.matrix: ObligationMatrix = load_matrix()
        self.conflicts = ConflictRegistry(clock=self.clock)

    # -- persistence -------------------------------------------------------------

    @classmethod
    def open(cls, config: Config, data_dir: Union[None, str] = None) -> "ControlPlane":
        """Create a plane backed by a data directory, replaying any journal."""
        plane = cls(config)
        plane._attach_storage(data_dir or config.data_dir)
        return plane

    def _attach_storage(self, data_dir) -> None:
        if data_dir is None:
            raise ValueError("data_dir required to attach storage")
        store = DataStore(data_dir)
        records = store.journal_records()
        if records:
            self._replay(records)
            self._reconcile_ledger_mirror(store)
        self._store = store
        if not records:
            self._journal("init_authority", {"private": self.authority.authority_private_hex()})

    def _replay(self, records: List[dict]) -> None:
        self._replaying = True
        try:
            for record in records:
                self.clock.frozen = parse_iso(record["ts"])
                try:
                    getattr(self, record["op"])(**_revive(record["op"], record["args"]))
                finally:
                    self.clock.frozen = None
        finally:
            self._replaying = False

    def _reconcile_ledger_mirror(self, store: DataStore) -> None:
        regenerated = list(self.ledger.export_lines())
        on_disk = store.ledger_lines()
        if on_disk[: len(regenerated)] != regenerated and regenerated[: len(on_disk)] != on_disk:
            raise ChainImportError(
                "stored audit ledger diverges from journal replay: trail tampered or torn"
            )
        if on_disk != regenerated:
            store.reset_ledger_mirror(regenerated)

    def _ledger_sink(self, entry) -> None:
        if self._store is not None and not self._replaying:
            self._store.append_ledger_line(json.dumps(entry.to_wire(), sort_keys=True))

    def _journal(self, op: str, args: dict) -> None:
        if self._store is not None and not self._replaying:
            self._store.append_journal(
                {"op": op, "ts": iso(self.clock()), "args": args}
            )

    def close(self) -> None:
        if self._store is not None:
            self._store.close()

    # -- command plumbing ------------------------------------------------------------

    def _command(self):
        """Freeze the clock for the duration of one write command."""
        return _CommandScope(self)

    def _revoke_for_identity(self, identity_id: str) -> int:
        return self.authority.revoke_for_identity(identity_id)

    # -- authority key management (journaled) -----------------------------------------

    def init_authority(self, private: str) -> None:
        self.authority.set_authority_key(private)

    def rotate_authority_key(self) -> None:
        with self._command():
            self.authority.rotate_authority_key()
            self._journal(
                "init_authority_rotation",
                {"private": self.authority.authority_private_hex()},
            )

    def init_authority_rotation(self, private: str) -> None:
        self.authority.rotate_authority_key(private_hex=private)

    # -- registry commands ---------------------------------------------------------------

    def register_identity(self, spec: Union[IdentitySpec, dict], approval: Union[OwnerRef, dict]) -> AgentIdentity:
        spec = spec if isinstance(spec, IdentitySpec) else IdentitySpec.from_dict(spec)
        approval = approval if isinstance(approval, OwnerRef) else OwnerRef.from_dict(approval)
        with self._command():
            identity = self.registry.register_identity(spec, approval)
            self._journal(
                "register_identity",
                {"spec": spec.to_dict(), "approval": approval.to_dict()},
            )
            return identity

    def transition_lifecycle(
        self,
        identity_id: str,
        event: Union[LifecycleEvent, str],
        note: Optional[str] = None,
    ) -> LifecycleState:
        event = event if isinstance(event, LifecycleEvent) else LifecycleEvent(event)
        with self._command():
            state = self.registry.transition_lifecycle(identity_id, event, note=note)
            self._journal(
                "transition_lifecycle",
                {"identity_id": identity_id, "event": event.value, "note": note},
            )
            return state

    def assign_owner(self, identity_id: str, owner: Union[OwnerRef, dict], acceptance_token: str) -> AgentIdentity:
        owner = owner if isinstance(owner, OwnerRef) else OwnerRef.from_dict(owner)
        with self._command():
            identity = self.registry.assign_owner(identity_id, owner, acceptance_token)
            self._journal(
                "assign_owner",
                {
                    "identity_id": identity_id,
                    "owner": owner.to_dict(),
                    "acceptance_token": acceptance_token,
                },
            )
            return identity

    def remove_owner(self, identity_id: str) -> AgentIdentity:
        with self._command():
            identity = self.registry.remove_owner(identity_id)
            self._journal("remove_owner", {"identity_id": identity_id})
            return identity

    def add_grant(self, identity_id: str, grant) -> AgentIdentity:
        from .model import AccessGrant

        grant = grant if isinstance(grant, AccessGrant) else AccessGrant.from_dict(grant)
        with self._command():
            identity = self.registry.add_grant(identity_id, grant)
            self._journal(
                "add_grant", {"identity_id": identity_id, "grant": grant.to_dict()}
            )
            return identity

    def certify(self, identity_id: str, behavioral_summary: str, attesting_owner: Union[OwnerRef, dict]):
        attesting_owner = (
            attesting_owner
            if isinstance(attesting_owner, OwnerRef)
            else OwnerRef.from_dict(attesting_owner)
        )
        with self._command():
            record = self.registry.certify(identity_id, behavioral_summary, attesting_owner)
            self._journal(
                "certify",
                {
                    "identity_id": identity_id,
                    "behavioral_summary": behavioral_summary,
                    "attesting_owner": attesting_owner.to_dict(),
                },
            )
            return record

    def import_discovered(
        self,
        records: Sequence[Union[DiscoveryRecord, dict]],
        ids: Optional[Dict[str, str]] = None,
    ) -> List[AgentIdentity]:
        revived = [
            r if isinstance(r, DiscoveryRecord) else DiscoveryRecord.from_dict(r)
            for r in records
        ]
        with self._command():
            out = self.registry.import_discovered(revived, id_overrides=ids)
            self._journal(
                "import_discovered",
                {
                    "records": [r.to_dict() for r in revived],
                    "ids": {r.digest(): i.id for r, i in zip(revived, out)},
                },
            )
            return out

    def update_autonomy(self, identity_id: str) -> int:
        with self._command():
            level = self.governor.update_autonomy(identity_id)
            self._journal("update_autonomy", {"identity_id": identity_id})
            return level

    # -- credential commands -----------------------------------------------------------

    def register_key(self, workload_uri: str, private: Optional[str] = None):
        with self._command():
            record = self.authority.register_key(workload_uri, private_hex=private)
            self._journal(
                "register_key",
                {
                    "workload_uri": workload_uri,
                    "private": self.authority._workload_keys[workload_uri].private_hex(),
                },
            )
            self.ledger.append(
                actor=workload_uri,
                kind=EventKind.CONFIG_CHANGE,
                payload={"event": "key-registered"},
                timestamp=self.clock(),
            )
            return record

    def rotate_key(self, workload_uri: str, private: Optional[str] = None):
        with self._command():
            record = self.authority.rotate_key(workload_uri, private_hex=private)
            self._journal(
                "rotate_key",
                {
                    "workload_uri": workload_uri,
                    "private": self.authority._workload_keys[workload_uri].private_hex(),
                },
            )
            self.ledger.append(
                actor=workload_uri,
                kind=EventKind.CONFIG_CHANGE,
                payload={"event": "key-rotated"},
                timestamp=self.clock(),
            )
            return record

    def issue_credential(
        self,
        identity_id: str,
        task_id: str,
        scope: Union[Scope, list],
        assessment_id: str,
        *,
        ttl_seconds: Optional[int] = None,
        credential_id: Optional[str] = None,
    ) -> Credential:
        scope = scope if isinstance(scope, frozenset) else scope_from_list(scope)
        assessment = self.governor.get_assessment(assessment_id)
        if assessment is None:
            raise GovernanceError(f"unknown assessment {assessment_id}")
        with self._command():
            credential = self.authority.issue_jit_credential(
                identity_id,
                task_id,
                scope,
                assessment,
                ttl_seconds=ttl_seconds,
                credential_id=credential_id,
                issued_at=self.clock(),
            )
            self._journal(
                "issue_credential",
                {
                    "identity_id": identity_id,
                    "task_id": task_id,
                    "scope": scope_to_list(scope),
                    "assessment_id": assessment_id,
                    "ttl_seconds": credential.ttl_seconds,
                    "credential_id": credential.credential_id,
                },
            )
            return credential

    def revoke_task(self, task_id: str) -> int:
        with self._command():
            count = self.authority.revoke_on_completion(task_id)
            self._journal("revoke_task", {"task_id": task_id})
            return count

    def record_delegation(
        self, delegator: str, delegatee: str, task_id: str, scope: Union[Scope, list]
    ) -> DelegationEdge:
        scope = scope if isinstance(scope, frozenset) else scope_from_list(scope)
        with self._command():
            edge = self.authority.record_delegation(delegator, delegatee, task_id, scope)
            self._journal(
                "record_delegation",
                {
                    "delegator": delegator,
                    "delegatee": delegatee,
                    "task_id": task_id,
                    "scope": scope_to_list(scope),
                },
            )
            return edge

    def measure_toolset(
        self, identity_id: str, session_id: str, manifest: Sequence
    ) -> ToolsetMeasurement:
        with self._command():
            measurement = self.authority.measure_toolset(identity_id, session_id, list(manifest))
            self._journal(
                "measure_toolset",
                {
                    "identity_id": identity_id,
                    "session_id": session_id,
                    "manifest": list(manifest),
                },
            )
            self.ledger.append(
                actor=identity_id,
                kind=EventKind.CONFIG_CHANGE,
                payload={
                    "event": "toolset-measured",
                    "session_id": session_id,
                    "manifest_digest": measurement.manifest_digest,
                },
                session=session_id,
                timestamp=self.clock(),
            )
            return measurement

    # -- governor commands ----------------------------------------------------------------

    def register_task(self, spec: Union[TaskSpec, dict]) -> TaskSpec:
        spec = spec if isinstance(spec, TaskSpec) else TaskSpec.from_dict(spec)
        with self._command():
            self.governor.register_task(spec)
            self._journal("register_task", {"spec": spec.to_dict()})
            self.ledger.append(
                actor=f"task:{spec.task_id}",
                kind=EventKind.CONFIG_CHANGE,
                payload={"event": "task-registered", "task_id": spec.task_id},
                timestamp=self.clock(),
            )
            return spec

    def build_baseline(
        self, identity_id: str, history: Sequence[AccessRequest]
    ) -> BehavioralBaseline:
        with self._command():
            baseline = self.governor.build_baseline(identity_id, history)
            self._journal("set_baseline", {"baseline": baseline.to_dict()})
            self.ledger.append(
                actor=identity_id,
                kind=EventKind.CONFIG_CHANGE,
                payload={
                    "event": "baseline-built",
                    "window_size": baseline.window_size,
                    "volume_p95": baseline.volume_p95,
                },
                timestamp=self.clock(),
            )
            return baseline

    def set_baseline(self, baseline: Union[BehavioralBaseline, dict]) -> None:
        baseline = (
            baseline
            if isinstance(baseline, BehavioralBaseline)
            else BehavioralBaseline.from_dict(baseline)
        )
        with self._command():
            self.governor.set_baseline(baseline)
            self._journal("set_baseline", {"baseline": baseline.to_dict()})
            self.ledger.append(
                actor=baseline.identity_id,
                kind=EventKind.CONFIG_CHANGE,
                payload={
                    "event": "baseline-built",
                    "window_size": baseline.window_size,
                    "volume_p95": baseline.volume_p95,
                },
                timestamp=self.clock(),
            )

    def decide(
        self,
        request: Union[AccessRequest, dict],
        *,
        assessment_id: Optional[str] = None,
        escalation_id: Optional[str] = None,
    ) -> RiskAssessment:
        request = (
            request if isinstance(request, AccessRequest) else AccessRequest.from_dict(request)
        )
        with self._command():
            assessment = self.governor.decide(
                request, assessment_id=assessment_id, escalation_id=escalation_id
            )
            esc_id = None
            if assessment.decision is Decision.ESCALATE:
                pend = self.governor.pending_escalations()
                esc_id = pend[-1].escalation_id if pend else None
            self._journal(
                "decide",
                {
                    "request": request.to_dict(),
                    "assessment_id": assessment.assessment_id,
                    "escalation_id": esc_id,
                },
            )
            return assessment

    def resolve_escalation(
        self, escalation_id: str, verdict: str, justification: str, resolver: str
    ) -> Escalation:
        with self._command():
            esc = self.governor.resolve_escalation(
                escalation_id, verdict, justification, resolver
            )
            self._journal(
                "resolve_escalation",
                {
                    "escalation_id": escalation_id,
                    "verdict": verdict,
                    "justification": justification,
                    "resolver": resolver,
                },
            )
            return esc

    # -- provenance commands -----------------------------------------------------------------

    def register_aibom(self, record: Union[AibomRecord, dict]) -> AibomRecord:
        record = record if isinstance(record, AibomRecord) else AibomRecord.from_dict(record)
        with self._command():
            stored = self.provenance.register_aibom(record)
            self._journal("register_aibom", {"record": stored.to_dict()})
            return stored

    def verify_model_integrity(self, model_id: str, artifact) -> IntegrityVerdict:
        with self._command():
            verdict = self.provenance.verify_model_integrity(model_id, artifact)
            self._journal(
                "record_integrity_check", {"model_id": model_id, "verdict": verdict.value}
            )
            self.ledger.append(
                actor=f"model:{model_id}",
                kind=EventKind.CONFIG_CHANGE,
                payload={"event": "integrity-check", "verdict": verdict.value},
                timestamp=self.clock(),
            )
            return verdict

    def record_integrity_check(self, model_id: str, verdict: str) -> None:
        self.provenance.set_last_check(model_id, IntegrityVerdict(verdict), self.clock())
        self.ledger.append(
            actor=f"model:{model_id}",
            kind=EventKind.CONFIG_CHANGE,
            payload={"event": "integrity-check", "verdict": verdict},
            timestamp=self.clock(),
        )

    # -- regulatory commands --------------------------------------------------------------------

    def register_conflict(self, entry: Union[ConflictEntry, dict]) -> ConflictEntry:
        entry = entry if isinstance(entry, ConflictEntry) else ConflictEntry.from_dict(entry)
        with self._command():
            if entry.opened_at is None:
                entry.opened_at = self.clock()
            stored = self.conflicts.register_conflict(entry)
            self._journal("register_conflict", {"entry": stored.to_dict()})
            self.ledger.append(
                actor=f"conflict:{entry.conflict_id}",
                kind=EventKind.CONFIG_CHANGE,
                payload={"event": "conflict-registered", "status": stored.status},
                timestamp=self.clock(),
            )
            return stored

    def set_conflict_status(
        self, conflict_id: str, status: str, management_approach: Optional[str] = None
    ) -> ConflictEntry:
        with self._command():
            entry = self.conflicts.set_status(conflict_id, status, management_approach)
            self._journal(
                "set_conflict_status",
                {
                    "conflict_id": conflict_id,
                    "status": status,
                    "management_approach": management_approach,
                },
            )
            self.ledger.append(
                actor=f"conflict:{conflict_id}",
                kind=EventKind.CONFIG_CHANGE,
                payload={"event": "conflict-status", "status": status},
                timestamp=self.clock(),
            )
            return entry

    def tier_deployment(self, jurisdictions: Iterable[str], domains=None) -> TieringResult:
        return tier_deployment(jurisdictions, self.matrix, domains)

    # -- threat overlay commands --------------------------------------------------------------------

    def ingest_indicators(self, feed: str) -> int:
        with self._command():
            count = self.overlay.ingest_indicators(feed)
            self._journal("ingest_indicators", {"feed": feed})
            self.ledger.append(
                actor="threat-feed",
                kind=EventKind.CONFIG_CHANGE,
                payload={"event": "indicators-ingested", "count": count},
                timestamp=self.clock(),
            )
            return count

    def flag_identities(self) -> Dict[str, set]:
        with self._command():
            flagged = self.overlay.flag_identities(self.registry, self.credential_inventory())
            self._journal("flag_identities", {})
            return flagged

    # -- queries (never journaled) -----------------------------------------------------------------

    def verify_audit(self, start: int = 0, end: Optional[int] = None) -> ChainVerdict:
        return self.ledger.verify_chain(start, end)

    def reconstruct(self, **query):
        return self.ledger.reconstruct(**query)

    def verify_credential(self, token: str, system: str, resource: str, action) -> CredentialVerdict:
        return self.authority.verify_credential(token, system, resource, action, self.clock())

    def list_standing_privilege(self):
        return self.authority.list_standing_privilege()

    def aggregate_privilege(self, identity_id: str):
        return self.governor.aggregate_privilege(identity_id)

    def credential_inventory(self) -> List[CredentialInventoryItem]:
        items: List[CredentialInventoryItem] = []
        for cred in self.authority.live_credentials():
            items.append(
                CredentialInventoryItem(
                    credential_ref=cred.credential_id,
                    identity_id=cred.subject,
                    standing=False,
                    systems=tuple(sorted({e.system for e in cred.scope})),
                )
            )
        for identity in self.registry.all():
            for grant in identity.grants:
                if grant.standing:
                    items.append(
                        CredentialInventoryItem(
                            credential_ref=f"grant:{grant.system}:{grant.resource_pattern}",
                            identity_id=identity.id,
                            standing=True,
                            systems=(grant.system,),
                        )
                    )
        return items

    def exposure_assessment(self) -> ExposureReport:
        return self.overlay.exposure_assessment(self.credential_inventory())

    def risk_state(self) -> RiskStateView:
        identities = self.registry.all()
        privilege_alerts = {}
        for identity in identities:
            report = self.governor.aggregate_privilege(identity.id)
            if report.alerts:
                privilege_alerts[identity.id] = report.alerts
        gate_failures = {}
        for identity in identities:
            if identity.kind is not IdentityKind.AGENT:
                continue
            ok, reasons = self.provenance.deployment_gate(identity)
            if not ok:
                gate_failures[identity.id] = reasons
        return RiskStateView(
            identities=identities,
            live_credentials=self.authority.live_credentials(),
            assessments=self.governor.assessments,
            privilege_alerts=privilege_alerts,
            chain_valid=self.ledger.verify_chain().valid,
            gate_failures=gate_failures,
            alignment_threshold=self.config.policy.t_align,
        )

    def detect_intersections(self) -> List[CompoundAlert]:
        return detect_intersections(self.risk_state())

    def scan_intersections(self) -> List[CompoundAlert]:
        """Detect compound risk intersections and emit each alert to the audit
        ledger (one entry per alert); the pure read path is detect_intersections."""
        with self._command():
            alerts = detect_intersections(self.risk_state())
            for alert in alerts:
                self.ledger.append(
                    actor=alert.identity_id,
                    kind=EventKind.CONFIG_CHANGE,
                    payload={
                        "event": "compound-alert",
                        "nexus": alert.nexus,
                        "domains": list(alert.domains),
                        "evidence": alert.evidence,
                    },
                    timestamp=self.clock(),
                )
            self._journal("scan_intersections", {})
            return alerts

    def snapshot(self) -> SystemSnapshot:
        applicable = [
            (r.migt_domain, r.jurisdiction)
            for r in self.matrix.applicable_obligations(self.config.jurisdictions)
        ]
        aibom_models = {r.model_id for r in self.provenance.records()}
        production = set(self.config.production_models) or set(aibom_models)
        return SystemSnapshot(
            now=self.clock(),
            identities=self.registry.all(),
            key_rotations={
                r.workload_uri: r.rotated_at for r in self.authority.key_records()
            },
            baseline_ids=set(self.governor.baseline_ids()),
            credentials=self.authority.all_credentials(),
            assessments=list(self.governor.assessments),
            ledger_entries=list(self.ledger.entries),
            chain_valid=self.ledger.verify_chain().valid,
            applicable_obligations=applicable,
            mapped_obligations=set(applicable),
            open_conflicts=len(self.conflicts.open_conflicts()),
            total_conflicts=len(self.conflicts.all()),
            production_models=production,
            aibom_models=aibom_models,
            indicators_count=len(self.overlay.active_indicators()),
            velocity_changelog=self.matrix.changelog,
            eu_ai_act_doc=self.config.eu_ai_act_doc,
            provisioning_enabled=self.config.provisioning_enabled,
            jit_pilot_active=self.config.jit_pilot_active,
            pdp_automation_enabled=self.config.pdp_automation_enabled,
            rotation_policy_days=self.config.rotation_policy_days,
            max_ttl=self.config.max_ttl,
        )

    def metrics(self) -> MetricsReport:
        return compute_metrics(self.snapshot())

    def phase_check(self, phase: int) -> GateResult:
        return phase_gate(phase, self.metrics())


class _CommandScope:
    def __init__(self, plane: ControlPlane):
        self._plane = plane
        self._entered_frozen = False

    def __enter__(self):
        self._plane._write_lock.acquire()
        if self._plane.clock.frozen is None:
            self._plane.clock.frozen = self._plane.clock.base()
            self._entered_frozen = True
        return self

    def __exit__(self, exc_type, exc, tb):
        if self._entered_frozen:
            self._plane.clock.frozen = None
        self._plane._write_lock.release()
        return False


def _revive(op: str, args: dict) -> dict:
    """Journal args are plain JSON; plane commands revive their own types."""
    return args
