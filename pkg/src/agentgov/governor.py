"""Access governance: behavioral baselines, composite risk scoring, intent gate.

Every access request is scored on four normalized dimensions — data
sensitivity, action irreversibility, contextual deviation from the identity's
behavioral baseline, and static task alignment — combined into a weighted
composite. Requests under the risk threshold are allowed outright; the rest
pass through an intent verification gate whose semantic checker is pluggable
and, by contract, sees only the task specification, the request, and the
execution context (never the agent's own reasoning output). High composite
with high alignment means a legitimate but sensitive pattern (allow with
enhanced logging); high composite with low alignment is the signature of
prompt injection or task drift and is denied or escalated by severity.

Autonomy is earned: identities progress one maturity level at a time on
sustained compliant behavior and drop a level on any confirmed violation.
"""

from __future__ import annotations

import threading
import uuid
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Callable, Deque, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .audit import AuditLedger, EventKind
from .errors import (
    CheckerUnavailableError,
    IdentityMismatchError,
    IdentityNotActiveError,
    InsufficientHistoryError,
    UnknownEscalationError,
)
from .model import ActionVerb, DataClass, Scope, iso, scope_to_list, utcnow
from .registry import IdentityFlag, IdentityRegistry, LifecycleState

DEFAULT_MIN_HISTORY = 50
DEFAULT_PROMOTION_STREAK = 100
DEFAULT_AGGREGATION_ALERT_SYSTEMS = 10
HOUR_SMOOTHING_FLOOR = 1

SENSITIVITY_SCORE = {
    DataClass.PUBLIC: 0.0,
    DataClass.INTERNAL: 0.25,
    DataClass.CONFIDENTIAL: 0.5,
    DataClass.RESTRICTED: 0.75,
    DataClass.CRITICAL: 1.0,
}

# read is nonzero: disclosure of sensitive data is itself irreversible
IRREVERSIBILITY_SCORE = {
    ActionVerb.READ: 0.25,
    ActionVerb.WRITE: 0.5,
    ActionVerb.SEND: 0.85,
    ActionVerb.PUBLISH: 0.85,
    ActionVerb.DELETE: 1.0,
    ActionVerb.EXECUTE: 1.0,
}

IRREVERSIBLE_THRESHOLD = 0.85

THREAT_FLAGS = {IdentityFlag.PAM_ADJACENT, IdentityFlag.FOREIGN_EXPOSED}


class Decision(str, Enum):
    ALLOW = "ALLOW"
    ALLOW_ENHANCED_LOGGING = "ALLOW_ENHANCED_LOGGING"
    ESCALATE = "ESCALATE"
    DENY = "DENY"


@dataclass(frozen=True)
class AccessRequest:
    identity_id: str
    session_id: str
    task_id: str
    tool_id: str
    action: ActionVerb
    data_class: DataClass
    recipients: FrozenSet[str] = frozenset()
    data_volume: int = 0
    timestamp: Optional[datetime] = None
    context_notes: str = ""
    requested_scope: Scope = frozenset()

    def __post_init__(self):
        if self.data_volume < 0:
            raise ValueError("data_volume must be >= 0")

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "session_id": self.session_id,
            "task_id": self.task_id,
            "tool_id": self.tool_id,
            "action": self.action.value,
            "data_class": self.data_class.value,
            "recipients": sorted(self.recipients),
            "data_volume": self.data_volume,
            "timestamp": iso(self.timestamp) if self.timestamp else None,
            "context_notes": self.context_notes,
            "requested_scope": scope_to_list(self.requested_scope),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AccessRequest":
        from .model import parse_iso, scope_from_list

        return cls(
            identity_id=data["identity_id"],
            session_id=data["session_id"],
            task_id=data["task_id"],
            tool_id=data["tool_id"],
            action=ActionVerb(data["action"]),
            data_class=DataClass(data["data_class"]),
            recipients=frozenset(data.get("recipients", [])),
            data_volume=data.get("data_volume", 0),
            timestamp=parse_iso(data["timestamp"]) if data.get("timestamp") else None,
            context_notes=data.get("context_notes", ""),
            requested_scope=scope_from_list(data.get("requested_scope", [])),
        )


@dataclass(frozen=True)
class TaskSpec:
    """Declared intent boundary: what a task is allowed to touch."""

    task_id: str
    description: str
    tool_data_scope: Dict[str, DataClass]  # tool id -> max data class
    recipients_allowlist: FrozenSet[str] = frozenset()

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "description": self.description,
            "tool_data_scope": {t: dc.value for t, dc in sorted(self.tool_data_scope.items())},
            "recipients_allowlist": sorted(self.recipients_allowlist),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TaskSpec":
        return cls(
            task_id=data["task_id"],
            description=data.get("description", ""),
            tool_data_scope={t: DataClass(dc) for t, dc in data["tool_data_scope"].items()},
            recipients_allowlist=frozenset(data.get("recipients_allowlist", [])),
        )


@dataclass(frozen=True)
class BehavioralBaseline:
    identity_id: str
    hour_histogram: Tuple[int, ...]  # 24 buckets
    known_tools: FrozenSet[str]
    known_recipient_domains: FrozenSet[str]
    volume_p95: float
    window_size: int
    built_at: datetime

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "hour_histogram": list(self.hour_histogram),
            "known_tools": sorted(self.known_tools),
            "known_recipient_domains": sorted(self.known_recipient_domains),
            "volume_p95": self.volume_p95,
            "window_size": self.window_size,
            "built_at": iso(self.built_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BehavioralBaseline":
        from .model import parse_iso

        return cls(
            identity_id=data["identity_id"],
            hour_histogram=tuple(data["hour_histogram"]),
            known_tools=frozenset(data["known_tools"]),
            known_recipient_domains=frozenset(data["known_recipient_domains"]),
            volume_p95=data["volume_p95"],
            window_size=data["window_size"],
            built_at=parse_iso(data["built_at"]),
        )


@dataclass(frozen=True)
class RiskPolicy:
    w_sens: float = 0.25
    w_irrev: float = 0.25
    w_dev: float = 0.25
    w_align: float = 0.25
    t_risk: float = 0.5
    t_align: float = 0.7
    t_critical: float = 0.85
    threat_modifier: float = 0.6

    def __post_init__(self):
        total = self.w_sens + self.w_irrev + self.w_dev + self.w_align
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"dimension weights must sum to 1, got {total}")
        if min(self.w_sens, self.w_irrev, self.w_dev, self.w_align) < 0:
            raise ValueError("dimension weights must be non-negative")
        if not 0 < self.t_risk < self.t_critical <= 1:
            raise ValueError("thresholds must satisfy 0 < t_risk < t_critical <= 1")
        if not 0 < self.t_align < 1:
            raise ValueError("t_align must be in (0, 1)")

    @property
    def weights(self) -> Tuple[float, float, float, float]:
        return (self.w_sens, self.w_irrev, self.w_dev, self.w_align)


@dataclass(frozen=True)
class Dimensions:
    sensitivity: float
    irreversibility: float
    deviation: float
    alignment_static: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.sensitivity, self.irreversibility, self.deviation, self.alignment_static)


@dataclass(frozen=True)
class ExecutionContext:
    """What the intent checker may see besides the task spec and request."""

    measurement_violation: bool = False


@dataclass(frozen=True)
class RiskAssessment:
    assessment_id: str
    request: AccessRequest
    dims: Dimensions
    composite: float
    alignment_score: Optional[float]
    decision: Decision
    modifiers: Tuple[str, ...] = ()
    decided_at: Optional[datetime] = None

    def to_dict(self) -> dict:
        return {
            "assessment_id": self.assessment_id,
            "request": self.request.to_dict(),
            "dims": {
                "sensitivity": self.dims.sensitivity,
                "irreversibility": self.dims.irreversibility,
                "deviation": self.dims.deviation,
                "alignment_static": self.dims.alignment_static,
            },
            "composite": self.composite,
            "alignment_score": self.alignment_score,
            "decision": self.decision.value,
            "modifiers": list(self.modifiers),
            "decided_at": iso(self.decided_at) if self.decided_at else None,
        }


@dataclass(frozen=True)
class Outcome:
    decision: Decision
    confirmed_violation: bool = False

    @property
    def compliant(self) -> bool:
        return not self.confirmed_violation and self.decision in (
            Decision.ALLOW,
            Decision.ALLOW_ENHANCED_LOGGING,
        )


@dataclass
class Escalation:
    escalation_id: str
    assessment: RiskAssessment
    created_at: datetime
    resolved: bool = False
    resolution: Optional[str] = None  # "approved" | "violation"
    justification: str = ""
    resolver: str = ""


@dataclass(frozen=True)
class PrivilegeReport:
    identity_id: str
    distinct_systems: int
    admin_grant_count: int
    union_scope: tuple
    alerts: Tuple[str, ...]


# -- pure scoring functions -----------------------------------------------------


def sensitivity_score(data_class: DataClass) -> float:
    return SENSITIVITY_SCORE[data_class]


def irreversibility_score(action: ActionVerb) -> float:
    return IRREVERSIBILITY_SCORE[action]


def recipient_domain(recipient: str) -> str:
    return recipient.rsplit("@", 1)[-1]


def build_baseline(
    identity_id: str,
    history: Sequence[AccessRequest],
    *,
    minimum: int = DEFAULT_MIN_HISTORY,
    built_at: Optional[datetime] = None,
) -> BehavioralBaseline:
    """Deterministic summary of past allowed requests for one identity."""
    if len(history) < minimum:
        raise InsufficientHistoryError(
            f"{identity_id}: {len(history)} requests, minimum {minimum}"
        )
    histogram = [0] * 24
    tools = set()
    domains = set()
    volumes = []
    for req in history:
        if req.identity_id != identity_id:
            raise IdentityMismatchError(
                f"history entry for {req.identity_id} in baseline for {identity_id}"
            )
        if req.timestamp is None:
            raise ValueError("baseline history entries need timestamps")
        histogram[req.timestamp.hour] += 1
        tools.add(req.tool_id)
        domains.update(recipient_domain(r) for r in req.recipients)
        volumes.append(req.data_volume)
    return BehavioralBaseline(
        identity_id=identity_id,
        hour_histogram=tuple(histogram),
        known_tools=frozenset(tools),
        known_recipient_domains=frozenset(domains),
        volume_p95=_percentile_95(volumes),
        window_size=len(history),
        built_at=built_at or utcnow(),
    )


def _percentile_95(values: Sequence[float]) -> float:
    """Nearest-rank 95th percentile: smallest x with at least 95% of values <= x."""
    import math

    ordered = sorted(values)
    rank = math.ceil(0.95 * len(ordered))
    return float(ordered[max(rank - 1, 0)])


def deviation_score(baseline: BehavioralBaseline, request: AccessRequest) -> float:
    """Mean of four sub-scores: tool novelty, recipient novelty, unseen hour,
    and volume excess over the baseline 95th percentile."""
    if baseline.identity_id != request.identity_id:
        raise IdentityMismatchError(
            f"baseline {baseline.identity_id} vs request {request.identity_id}"
        )
    tool = 0.0 if request.tool_id in baseline.known_tools else 1.0
    if not request.recipients:
        recipient = 0.0
    else:
        recipient = (
            0.0
            if all(
                recipient_domain(r) in baseline.known_recipient_domains
                for r in request.recipients
            )
            else 1.0
        )
    hour = request.timestamp.hour if request.timestamp else 0
    time_score = 0.0 if baseline.hour_histogram[hour] >= HOUR_SMOOTHING_FLOOR else 1.0
    v = float(request.data_volume)
    p95 = baseline.volume_p95
    if p95 == 0:
        volume = 0.0 if v == 0 else 1.0
    else:
        volume = min(1.0, max(0.0, (v - p95) / p95))
    return (tool + recipient + time_score + volume) / 4.0


def static_alignment(request: AccessRequest, task_spec: Optional[TaskSpec]) -> float:
    """0 when the tool/data combination and recipients are within the declared
    task scope; 1 otherwise. An undeclared task is fully out of scope."""
    if task_spec is None:
        return 1.0
    max_class = task_spec.tool_data_scope.get(request.tool_id)
    if max_class is None or request.data_class > max_class:
        return 1.0
    if request.recipients and not request.recipients <= task_spec.recipients_allowlist:
        return 1.0
    return 0.0


def recipient_violation(request: AccessRequest, task_spec: Optional[TaskSpec]) -> bool:
    if not request.recipients:
        return False
    if task_spec is None:
        return True
    return not request.recipients <= task_spec.recipients_allowlist


def dimension_scores(
    request: AccessRequest,
    task_spec: Optional[TaskSpec],
    baseline: Optional[BehavioralBaseline],
) -> Dimensions:
    return Dimensions(
        sensitivity=sensitivity_score(request.data_class),
        irreversibility=irreversibility_score(request.action),
        deviation=deviation_score(baseline, request) if baseline is not None else 0.0,
        alignment_static=static_alignment(request, task_spec),
    )


def composite_score(dims: Dimensions, policy: RiskPolicy) -> float:
    return (
        policy.w_sens * dims.sensitivity
        + policy.w_irrev * dims.irreversibility
        + policy.w_dev * dims.deviation
        + policy.w_align * dims.alignment_static
    )


def reference_intent_checker(
    task_spec: Optional[TaskSpec], request: AccessRequest, context: ExecutionContext
) -> float:
    """Deterministic reference alignment scorer.

    alignment = 1 - (0.5 * static misalignment + 0.25 * recipient violation
    + 0.25 * measurement violation), clamped to [0, 1]. Production checkers
    plug in behind the same (task_spec, request, context) contract.
    """
    penalty = (
        0.5 * static_alignment(request, task_spec)
        + 0.25 * (1.0 if recipient_violation(request, task_spec) else 0.0)
        + 0.25 * (1.0 if context.measurement_violation else 0.0)
    )
    return min(1.0, max(0.0, 1.0 - penalty))


def evaluate_decision(
    composite: float,
    alignment: Callable[[], float],
    autonomy: int,
    irreversibility: float,
    threat_flagged: bool,
    policy: RiskPolicy,
) -> Tuple[Decision, Optional[float], List[str]]:
    """The decision matrix. ``alignment`` is invoked lazily: only requests at
    or above the effective risk threshold reach the intent gate.

    Level-1 identities have every irreversible action forced to ESCALATE
    regardless of score. A threat flag tightens the risk threshold; it can
    never turn a non-ALLOW outcome into ALLOW.
    """
    modifiers: List[str] = []
    effective_t_risk = policy.t_risk
    if threat_flagged:
        effective_t_risk *= policy.threat_modifier
        modifiers.append("threat-overlay-threshold")

    alignment_value: Optional[float] = None
    if composite < effective_t_risk:
        decision = Decision.ALLOW
    else:
        try:
            alignment_value = alignment()
        except CheckerUnavailableError:
            alignment_value = 0.0
            modifiers.append("checker-unavailable")
        if alignment_value >= policy.t_align:
            decision = Decision.ALLOW_ENHANCED_LOGGING
        elif composite >= policy.t_critical:
            decision = Decision.DENY
        else:
            decision = Decision.ESCALATE

    if autonomy <= 1 and irreversibility >= IRREVERSIBLE_THRESHOLD:
        if decision is not Decision.ESCALATE:
            modifiers.append("autonomy-gate")
        decision = Decision.ESCALATE
    return decision, alignment_value, modifiers


# -- the governor -------------------------------------------------------------------


class AccessGovernor:
    """Policy decision point over a consistent snapshot of registry, baselines,
    task specs, policy and threat flags."""

    def __init__(
        self,
        ledger: AuditLedger,
        registry: IdentityRegistry,
        policy: Optional[RiskPolicy] = None,
        *,
        intent_checker: Callable[..., float] = reference_intent_checker,
        measurement_flag: Optional[Callable[[str, str, str], bool]] = None,
        min_history: int = DEFAULT_MIN_HISTORY,
        promotion_streak: int = DEFAULT_PROMOTION_STREAK,
        aggregation_alert_systems: int = DEFAULT_AGGREGATION_ALERT_SYSTEMS,
        live_credentials: Optional[Callable[[str], list]] = None,
        clock: Callable[[], datetime] = utcnow,
    ):
        self._ledger = ledger
        self._registry = registry
        self.policy = policy or RiskPolicy()
        self._intent_checker = intent_checker
        self._measurement_flag = measurement_flag or (lambda i, s, t: False)
        self._min_history = min_history
        self._promotion_streak = promotion_streak
        self._aggregation_alert_systems = aggregation_alert_systems
        self._live_credentials = live_credentials or (lambda identity_id: [])
        self._clock = clock

        self._tasks: Dict[str, TaskSpec] = {}
        self._baselines: Dict[str, BehavioralBaseline] = {}
        self._assessments: List[RiskAssessment] = []
        self._assessments_by_id: Dict[str, RiskAssessment] = {}
        self._outcomes: Dict[str, Deque[Outcome]] = {}
        self._escalations: Dict[str, Escalation] = {}
        self._escalation_order: List[str] = []
        self._queue_lock = threading.Lock()

    # -- task specs and baselines -----------------------------------------------

    def register_task(self, spec: TaskSpec) -> None:
        if not spec.tool_data_scope:
            raise ValueError(f"task {spec.task_id} declares an empty scope")
        self._tasks[spec.task_id] = spec

    def get_task(self, task_id: str) -> Optional[TaskSpec]:
        return self._tasks.get(task_id)

    def build_baseline(
        self, identity_id: str, history: Sequence[AccessRequest]
    ) -> BehavioralBaseline:
        baseline = build_baseline(
            identity_id, history, minimum=self._min_history, built_at=self._clock()
        )
        self._baselines[identity_id] = baseline  # atomic replace
        return baseline

    def set_baseline(self, baseline: BehavioralBaseline) -> None:
        """Install an already-computed baseline (state restore path)."""
        self._baselines[baseline.identity_id] = baseline

    def get_baseline(self, identity_id: str) -> Optional[BehavioralBaseline]:
        return self._baselines.get(identity_id)

    def baseline_ids(self) -> List[str]:
        return list(self._baselines)

    @property
    def assessments(self) -> List[RiskAssessment]:
        return self._assessments

    def get_assessment(self, assessment_id: str) -> Optional[RiskAssessment]:
        return self._assessments_by_id.get(assessment_id)

    # -- the decision pipeline ----------------------------------------------------

    def decide(
        self,
        request: AccessRequest,
        *,
        assessment_id: Optional[str] = None,
        escalation_id: Optional[str] = None,
    ) -> RiskAssessment:
        identity = self._registry.get(request.identity_id)
        if identity.lifecycle is not LifecycleState.ACTIVE:
            raise IdentityNotActiveError(
                f"{request.identity_id} is {identity.lifecycle.value}"
            )
        task_spec = self._tasks.get(request.task_id)
        baseline = self._baselines.get(request.identity_id)
        dims = dimension_scores(request, task_spec, baseline)
        composite = composite_score(dims, self.policy)
        threat_flagged = bool(identity.flags & THREAT_FLAGS)

        context = ExecutionContext(
            measurement_violation=self._measurement_flag(
                request.identity_id, request.session_id, request.tool_id
            )
        )

        def alignment() -> float:
            return self._intent_checker(task_spec, request, context)

        decision, alignment_value, modifiers = evaluate_decision(
            composite,
            alignment,
            identity.autonomy,
            dims.irreversibility,
            threat_flagged,
            self.policy,
        )
        if baseline is None:
            modifiers.append("no-baseline")
        if context.measurement_violation:
            modifiers.append("measurement-violation")

        now = self._clock()
        assessment = RiskAssessment(
            assessment_id=assessment_id or f"asm-{uuid.uuid4().hex}",
            request=request,
            dims=dims,
            composite=composite,
            alignment_score=alignment_value,
            decision=decision,
            modifiers=tuple(modifiers),
            decided_at=now,
        )
        self._assessments.append(assessment)
        self._assessments_by_id[assessment.assessment_id] = assessment
        self._record_outcome(request.identity_id, Outcome(decision=decision))
        self._ledger.append(
            actor=request.identity_id,
            kind=EventKind.DECISION,
            payload={
                "assessment_id": assessment.assessment_id,
                "task_id": request.task_id,
                "tool_id": request.tool_id,
                "action": request.action.value,
                "dims": list(dims.as_tuple()),
                "composite": composite,
                "alignment_score": alignment_value,
                "decision": decision.value,
                "modifiers": modifiers,
            },
            data_class=request.data_class.value,
            session=request.session_id,
            decision_ref=assessment.assessment_id,
            timestamp=now,
        )
        if decision is Decision.ESCALATE:
            self._enqueue_escalation(assessment, now, escalation_id)
        return assessment

    # -- escalation queue -----------------------------------------------------------

    def _enqueue_escalation(
        self,
        assessment: RiskAssessment,
        now: datetime,
        escalation_id: Optional[str] = None,
    ) -> Escalation:
        esc = Escalation(
            escalation_id=escalation_id or f"esc-{uuid.uuid4().hex}",
            assessment=assessment,
            created_at=now,
        )
        with self._queue_lock:
            self._escalations[esc.escalation_id] = esc
            self._escalation_order.append(esc.escalation_id)
        return esc

    def pending_escalations(self) -> List[Escalation]:
        with self._queue_lock:
            return [
                self._escalations[eid]
                for eid in self._escalation_order
                if not self._escalations[eid].resolved
            ]

    def get_escalation(self, escalation_id: str) -> Escalation:
        try:
            return self._escalations[escalation_id]
        except KeyError:
            raise UnknownEscalationError(escalation_id) from None

    def resolve_escalation(
        self, escalation_id: str, verdict: str, justification: str, resolver: str
    ) -> Escalation:
        """Record a human resolution. A confirmed violation demotes autonomy."""
        if verdict not in ("approved", "violation"):
            raise ValueError(f"verdict must be approved or violation, got {verdict}")
        with self._queue_lock:
            esc = self.get_escalation(escalation_id)
            esc.resolved = True
            esc.resolution = verdict
            esc.justification = justification
            esc.resolver = resolver
        identity_id = esc.assessment.request.identity_id
        confirmed = verdict == "violation"
        self._record_outcome(
            identity_id,
            Outcome(decision=Decision.ESCALATE, confirmed_violation=confirmed),
        )
        self._ledger.append(
            actor=identity_id,
            kind=EventKind.ESCALATION_RESOLUTION,
            payload={
                "escalation_id": escalation_id,
                "verdict": verdict,
                "justification": justification,
                "resolver": resolver,
                "assessment_id": esc.assessment.assessment_id,
            },
            decision_ref=esc.assessment.assessment_id,
            timestamp=self._clock(),
        )
        if confirmed:
            identity = self._registry.get(identity_id)
            new_level = max(1, identity.autonomy - 1)
            if new_level != identity.autonomy:
                self._registry.set_autonomy(
                    identity_id, new_level, reason=f"confirmed violation {escalation_id}"
                )
        return esc

    # -- autonomy progression ---------------------------------------------------------

    def _record_outcome(self, identity_id: str, outcome: Outcome) -> None:
        window = self._outcomes.setdefault(
            identity_id, deque(maxlen=2 * self._promotion_streak)
        )
        window.append(outcome)

    def outcome_window(self, identity_id: str) -> List[Outcome]:
        return list(self._outcomes.get(identity_id, ()))

    def update_autonomy(
        self, identity_id: str, window: Optional[Sequence[Outcome]] = None
    ) -> int:
        """Promote one level after a sustained compliant streak with zero
        confirmed violations; demote one level on any confirmed violation.
        Level moves at most one step and stays in [1, 4]."""
        identity = self._registry.get(identity_id)
        outcomes = list(window) if window is not None else self.outcome_window(identity_id)
        level = identity.autonomy
        if any(o.confirmed_violation for o in outcomes):
            new_level = max(1, level - 1)
            reason = "confirmed violation in window"
        else:
            streak = 0
            best = 0
            for o in outcomes:
                streak = streak + 1 if o.compliant else 0
                best = max(best, streak)
            if best >= self._promotion_streak:
                new_level = min(4, level + 1)
                reason = f"{best} consecutive compliant decisions"
            else:
                return level
        if new_level != level:
            self._registry.set_autonomy(identity_id, new_level, reason=reason)
        return new_level

    # -- privilege aggregation ---------------------------------------------------------

    def aggregate_privilege(self, identity_id: str) -> PrivilegeReport:
        identity = self._registry.get(identity_id)
        systems = {g.system for g in identity.grants}
        union: set = set()
        for g in identity.grants:
            union.add((g.system, g.resource_pattern, tuple(sorted(a.value for a in g.actions))))
        for cred in self._live_credentials(identity_id):
            for entry in cred.scope:
                systems.add(entry.system)
                union.add((entry.system, entry.resource, (entry.action.value,)))
        admin_count = sum(1 for g in identity.grants if g.admin)
        alerts = []
        if len(systems) > self._aggregation_alert_systems:
            alerts.append(f"privilege-aggregation: {len(systems)} distinct systems")
        if admin_count:
            alerts.append(f"admin-grants: {admin_count}")
        return PrivilegeReport(
            identity_id=identity_id,
            distinct_systems=len(systems),
            admin_grant_count=admin_count,
            union_scope=tuple(sorted(union)),
            alerts=tuple(alerts),
        )
