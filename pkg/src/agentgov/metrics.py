"""Program metrics over a full system snapshot, plus phase gates.

Every figure is a definitional ratio over the snapshot; nothing is sampled
or estimated, so an independent recomputation must agree exactly. Percentages
over an empty population report 100 (gates must not fail on an empty pilot
scope); the threat-attribution share reports 0 when there are no deviations.

Mean-time figures derive from audit timestamps: each escalation resolution is
paired with its originating decision entry via the decision reference, and
investigation time is the mean span over all pairs while attribution time is
the mean over confirmed violations.

Tier-1 identities are the highest-risk slice: pam-adjacent or holding any
admin grant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .audit import AuditEntry, EventKind
from .errors import UnknownPhaseError
from .governor import RiskAssessment
from .registry import AgentIdentity, IdentityFlag, LifecycleState

DEFAULT_ROTATION_POLICY_DAYS = 90
DEFAULT_DEVIATION_ALERT = 0.5


@dataclass
class SystemSnapshot:
    """Plain-data view of the whole control plane at one instant."""

    now: datetime
    identities: List[AgentIdentity] = field(default_factory=list)
    key_rotations: Dict[str, datetime] = field(default_factory=dict)  # uri -> rotated_at
    baseline_ids: Set[str] = field(default_factory=set)
    credentials: list = field(default_factory=list)
    assessments: List[RiskAssessment] = field(default_factory=list)
    ledger_entries: List[AuditEntry] = field(default_factory=list)
    chain_valid: bool = True
    applicable_obligations: List[Tuple[str, str]] = field(default_factory=list)
    mapped_obligations: Set[Tuple[str, str]] = field(default_factory=set)
    open_conflicts: int = 0
    total_conflicts: int = 0
    production_models: Set[str] = field(default_factory=set)
    aibom_models: Set[str] = field(default_factory=set)
    indicators_count: int = 0
    velocity_changelog: List[str] = field(default_factory=list)
    eu_ai_act_doc: str = "missing"  # missing | in-progress | complete
    provisioning_enabled: bool = False
    jit_pilot_active: bool = False
    pdp_automation_enabled: bool = False
    rotation_policy_days: int = DEFAULT_ROTATION_POLICY_DAYS
    deviation_alert_threshold: float = DEFAULT_DEVIATION_ALERT
    max_ttl: int = 300


@dataclass(frozen=True)
class CoverageMetrics:
    registered_pct: float
    owner_pct: float
    crypto_pct: float
    baseline_pct: float


@dataclass(frozen=True)
class HygieneMetrics:
    rotated_in_policy_pct: float
    jit_pct: float
    standing_static_count: int


@dataclass(frozen=True)
class BehavioralMetrics:
    deviations_count: int
    mean_time_to_investigate_s: float
    threat_attributed_pct: float


@dataclass(frozen=True)
class AccountabilityMetrics:
    reconstructable_incident_pct: float
    mean_time_to_attribution_s: float
    orphan_count: int


@dataclass(frozen=True)
class ComplianceMetrics:
    obligations_mapped_pct: float
    open_conflict_count: int
    eu_ai_act_doc: str


@dataclass(frozen=True)
class OpsFigures:
    """Auxiliary figures the phase gates check beyond the five metric groups."""

    crypto_pct_tier1: float
    tier1_standing_static_count: int
    chain_valid: bool
    aibom_production_pct: float
    total_conflicts: int
    indicators_count: int
    velocity_entries: int
    provisioning_enabled: bool
    jit_pilot_active: bool
    pdp_automation_enabled: bool


@dataclass(frozen=True)
class MetricsReport:
    coverage: CoverageMetrics
    hygiene: HygieneMetrics
    behavioral: BehavioralMetrics
    accountability: AccountabilityMetrics
    compliance: ComplianceMetrics
    ops: OpsFigures

    def to_dict(self) -> dict:
        return {
            "coverage": vars(self.coverage),
            "hygiene": vars(self.hygiene),
            "behavioral": vars(self.behavioral),
            "accountability": vars(self.accountability),
            "compliance": vars(self.compliance),
            "ops": vars(self.ops),
        }


def _pct(numerator: int, denominator: int, vacuous: float = 100.0) -> float:
    if denominator == 0:
        return vacuous
    return 100.0 * numerator / denominator


def is_tier1(identity: AgentIdentity) -> bool:
    return IdentityFlag.PAM_ADJACENT in identity.flags or any(
        g.admin for g in identity.grants
    )


def compute_metrics(snapshot: SystemSnapshot) -> MetricsReport:
    population = [
        i for i in snapshot.identities if i.lifecycle is not LifecycleState.DECOMMISSIONED
    ]
    n = len(population)
    tier1 = [i for i in population if is_tier1(i)]

    registered = sum(1 for i in population if IdentityFlag.SHADOW not in i.flags)
    with_owner = sum(1 for i in population if i.owner is not None)
    with_key = sum(1 for i in population if i.id in snapshot.key_rotations)
    tier1_with_key = sum(1 for i in tier1 if i.id in snapshot.key_rotations)
    with_baseline = sum(1 for i in population if i.id in snapshot.baseline_ids)

    coverage = CoverageMetrics(
        registered_pct=_pct(registered, n),
        owner_pct=_pct(with_owner, n),
        crypto_pct=_pct(with_key, n),
        baseline_pct=_pct(with_baseline, n),
    )

    rotation_window = timedelta(days=snapshot.rotation_policy_days)
    keys = list(snapshot.key_rotations.values())
    rotated_ok = sum(1 for at in keys if snapshot.now - at <= rotation_window)
    jit_only = sum(1 for i in population if not any(g.standing for g in i.grants))
    standing = _standing_static(population, snapshot)
    hygiene = HygieneMetrics(
        rotated_in_policy_pct=_pct(rotated_ok, len(keys)),
        jit_pct=_pct(jit_only, n),
        standing_static_count=standing,
    )

    flagged_ids = {
        i.id
        for i in population
        if i.flags & {IdentityFlag.PAM_ADJACENT, IdentityFlag.FOREIGN_EXPOSED}
    }
    deviant = [
        a
        for a in snapshot.assessments
        if a.dims.deviation > snapshot.deviation_alert_threshold
    ]
    threat_attr = sum(1 for a in deviant if a.request.identity_id in flagged_ids)
    invest_spans, attrib_spans = _resolution_spans(snapshot.ledger_entries)
    behavioral = BehavioralMetrics(
        deviations_count=len(deviant),
        mean_time_to_investigate_s=_mean(invest_spans),
        threat_attributed_pct=_pct(threat_attr, len(deviant), vacuous=0.0),
    )

    owner_by_id = {i.id: i.owner for i in snapshot.identities}
    incidents = [
        e for e in snapshot.ledger_entries if e.kind is EventKind.ESCALATION_RESOLUTION
    ]
    reconstructable = sum(
        1
        for e in incidents
        if snapshot.chain_valid and owner_by_id.get(e.actor) is not None
    )
    orphans = sum(
        1 for i in population if i.owner is None or i.review_due < snapshot.now
    )
    accountability = AccountabilityMetrics(
        reconstructable_incident_pct=_pct(reconstructable, len(incidents)),
        mean_time_to_attribution_s=_mean(attrib_spans),
        orphan_count=orphans,
    )

    applicable = list(snapshot.applicable_obligations)
    mapped = sum(1 for row in applicable if row in snapshot.mapped_obligations)
    compliance = ComplianceMetrics(
        obligations_mapped_pct=_pct(mapped, len(applicable)),
        open_conflict_count=snapshot.open_conflicts,
        eu_ai_act_doc=snapshot.eu_ai_act_doc,
    )

    production = snapshot.production_models
    ops = OpsFigures(
        crypto_pct_tier1=_pct(tier1_with_key, len(tier1)),
        tier1_standing_static_count=_standing_static(tier1, snapshot),
        chain_valid=snapshot.chain_valid,
        aibom_production_pct=_pct(
            len(production & snapshot.aibom_models), len(production)
        ),
        total_conflicts=snapshot.total_conflicts,
        indicators_count=snapshot.indicators_count,
        velocity_entries=len(snapshot.velocity_changelog),
        provisioning_enabled=snapshot.provisioning_enabled,
        jit_pilot_active=snapshot.jit_pilot_active,
        pdp_automation_enabled=snapshot.pdp_automation_enabled,
    )
    return MetricsReport(coverage, hygiene, behavioral, accountability, compliance, ops)


def _standing_static(identities: Sequence[AgentIdentity], snapshot: SystemSnapshot) -> int:
    ids = {i.id for i in identities}
    grants = sum(sum(1 for g in i.grants if g.standing) for i in identities)
    over_ttl = sum(
        1
        for c in snapshot.credentials
        if c.subject in ids and not c.revoked and c.ttl_seconds > snapshot.max_ttl
    )
    return grants + over_ttl


def _resolution_spans(entries: Sequence[AuditEntry]) -> Tuple[List[float], List[float]]:
    decision_at: Dict[str, datetime] = {}
    for e in entries:
        if e.kind is EventKind.DECISION and e.decision_ref:
            decision_at[e.decision_ref] = e.timestamp
    investigate: List[float] = []
    attribution: List[float] = []
    for e in entries:
        if e.kind is not EventKind.ESCALATION_RESOLUTION or not e.decision_ref:
            continue
        started = decision_at.get(e.decision_ref)
        if started is None:
            continue
        span = (e.timestamp - started).total_seconds()
        investigate.append(span)
        if e.payload.get("verdict") == "violation":
            attribution.append(span)
    return investigate, attribution


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


# -- phase gates --------------------------------------------------------------------


@dataclass(frozen=True)
class GateResult:
    phase: int
    passed: bool
    failures: Tuple[str, ...]


def phase_gate(phase: int, report: MetricsReport) -> GateResult:
    """Check one implementation phase's success criteria against a report.

    Thresholds pass at the boundary (>=) and fail below it.
    """
    failures: List[str] = []

    def need(ok: bool, criterion: str) -> None:
        if not ok:
            failures.append(criterion)

    if phase == 1:
        need(report.coverage.registered_pct >= 80, "registered >= 80%")
        need(report.coverage.owner_pct >= 90, "owner >= 90%")
        need(report.ops.tier1_standing_static_count == 0, "tier1 standing-static == 0")
        need(report.ops.provisioning_enabled, "provisioning process enabled")
    elif phase == 2:
        need(report.ops.crypto_pct_tier1 >= 50, "tier1 crypto-id >= 50%")
        need(report.coverage.baseline_pct >= 80, "baselines >= 80%")
        need(report.ops.jit_pilot_active, "jit pilot active")
    elif phase == 3:
        need(report.coverage.crypto_pct >= 95, "crypto-id >= 95%")
        need(report.ops.tier1_standing_static_count == 0, "tier1 standing-static == 0 (zsp)")
        need(report.ops.chain_valid, "audit chain valid")
        need(report.ops.aibom_production_pct >= 100, "aibom coverage == 100% for production models")
        need(report.ops.total_conflicts > 0, "conflict registry populated")
    elif phase == 4:
        need(report.ops.pdp_automation_enabled, "pdp automation enabled")
        need(report.ops.indicators_count > 0, "threat intelligence feed loaded")
        need(report.ops.velocity_entries > 0, "regulatory velocity changelog non-empty")
    else:
        raise UnknownPhaseError(str(phase))
    return GateResult(phase=phase, passed=not failures, failures=tuple(failures))
