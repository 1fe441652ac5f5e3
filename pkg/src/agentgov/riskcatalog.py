"""Risk catalog: severity rubric, seeded sub-category entries, compound alerts.

Severity comes from a two-factor impact x likelihood assessment refined by
evidence: threat-intel attribution forces Critical; a documented incident or
regulatory recognition raises the base one band; risks whose both factors sit
at or below 2 are structural exposure and start at Medium. The catalog ships
seeded with the named sub-categories and accepts schema-compatible additions.

Compound intersections evaluate live system state for the three highest-value
failure combinations: standing credentials plus exfiltration capability on a
threat-flagged identity; low-alignment escalations on over-privileged
identities with an accountability gap; and active identities running
unverified or tampered models.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .errors import OutOfRangeError, SeverityInconsistentError
from .governor import Decision, RiskAssessment
from .model import ActionVerb, DataClass
from .registry import AgentIdentity, IdentityFlag, LifecycleState

AIRT_DOMAINS = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")


class Severity(str, Enum):
    CRITICAL = "Critical"
    HIGH = "High"
    MEDIUM = "Medium"


class EvidenceFlag(str, Enum):
    DOCUMENTED_INCIDENT = "documented-incident"
    REGULATORY_RECOGNITION = "regulatory-recognition"
    PRACTITIONER_PREVALENCE = "practitioner-prevalence"
    THREAT_INTEL_ATTRIBUTED = "threat-intel-attributed"


_BANDS = [Severity.MEDIUM, Severity.HIGH, Severity.CRITICAL]

# flags that elevate the base band by one
_ELEVATING = {EvidenceFlag.DOCUMENTED_INCIDENT, EvidenceFlag.REGULATORY_RECOGNITION}


def assess_severity(
    impact: int, likelihood: int, evidence: Iterable[EvidenceFlag] = ()
) -> Severity:
    """Two-factor severity with evidence refinement.

    Base band by impact x likelihood product: >=6 Critical, 3..4 High,
    <=2 Medium — except that both factors at or below 2 is the structural
    exposure profile and bases at Medium. Threat-intel attribution forces
    Critical outright; a documented incident or regulatory recognition raises
    the base one band (capped at Critical). Practitioner prevalence informs
    the likelihood input and carries no extra elevation.
    """
    if not 1 <= impact <= 3 or not 1 <= likelihood <= 3:
        raise OutOfRangeError(f"impact={impact}, likelihood={likelihood} (must be 1..3)")
    flags = set(evidence)
    if EvidenceFlag.THREAT_INTEL_ATTRIBUTED in flags:
        return Severity.CRITICAL
    if impact <= 2 and likelihood <= 2:
        base = Severity.MEDIUM
    else:
        product = impact * likelihood
        if product >= 6:
            base = Severity.CRITICAL
        elif product >= 3:
            base = Severity.HIGH
        else:
            base = Severity.MEDIUM
    if flags & _ELEVATING:
        base = _BANDS[min(_BANDS.index(base) + 1, 2)]
    return base


@dataclass(frozen=True)
class RiskEntry:
    risk_id: str
    airt_domain: str
    name: str
    description: str
    severity: Severity
    impact: int
    likelihood: int
    primary_vector: str
    governance_implications: str
    evidence_flags: FrozenSet[EvidenceFlag] = frozenset()

    def to_dict(self) -> dict:
        return {
            "risk_id": self.risk_id,
            "airt_domain": self.airt_domain,
            "name": self.name,
            "description": self.description,
            "severity": self.severity.value,
            "impact": self.impact,
            "likelihood": self.likelihood,
            "primary_vector": self.primary_vector,
            "governance_implications": self.governance_implications,
            "evidence_flags": sorted(f.value for f in self.evidence_flags),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RiskEntry":
        return cls(
            risk_id=data["risk_id"],
            airt_domain=data["airt_domain"],
            name=data["name"],
            description=data.get("description", ""),
            severity=Severity(data["severity"]),
            impact=data["impact"],
            likelihood=data["likelihood"],
            primary_vector=data.get("primary_vector", ""),
            governance_implications=data.get("governance_implications", ""),
            evidence_flags=frozenset(EvidenceFlag(f) for f in data.get("evidence_flags", [])),
        )


class RiskCatalog:
    def __init__(self, seed: bool = True):
        self._entries: Dict[str, RiskEntry] = {}
        self._lock = threading.Lock()
        if seed:
            for entry in seeded_entries():
                self.register_risk(entry)

    def register_risk(self, entry: RiskEntry) -> RiskEntry:
        if entry.airt_domain not in AIRT_DOMAINS:
            raise ValueError(f"unknown risk domain {entry.airt_domain}")
        expected = assess_severity(entry.impact, entry.likelihood, entry.evidence_flags)
        if entry.severity is not expected:
            raise SeverityInconsistentError(
                f"{entry.risk_id}: claims {entry.severity.value}, rubric says {expected.value}"
            )
        with self._lock:
            self._entries[entry.risk_id] = entry
            return entry

    def get(self, risk_id: str) -> Optional[RiskEntry]:
        return self._entries.get(risk_id)

    def by_domain(self, domain: str) -> List[RiskEntry]:
        return [e for e in self._entries.values() if e.airt_domain == domain]

    def all(self) -> List[RiskEntry]:
        return sorted(self._entries.values(), key=lambda e: (e.airt_domain, e.risk_id))

    def export_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.all()], indent=2, ensure_ascii=False)


def seeded_entries() -> List[RiskEntry]:
    """The sub-categories named across the taxonomy prose, rubric-consistent."""
    spec = [
        # (risk_id, domain, name, impact, likelihood, flags, vector)
        ("static-credential-persistence", "I", "Static Credential Persistence", 3, 3,
         {EvidenceFlag.THREAT_INTEL_ATTRIBUTED, EvidenceFlag.DOCUMENTED_INCIDENT},
         "long-lived API keys and hardcoded secrets"),
        ("cryptographic-identity-absence", "I", "Cryptographic Identity Absence", 3, 2,
         {EvidenceFlag.REGULATORY_RECOGNITION},
         "unverifiable workload identity claims"),
        ("authentication-mechanism-mismatch", "I", "Authentication Mechanism Mismatch", 2, 2,
         {EvidenceFlag.PRACTITIONER_PREVALENCE},
         "human-centric auth flows applied to machine actors"),
        ("orphaned-ai-identity", "II", "Orphaned AI Identity", 2, 2,
         {EvidenceFlag.DOCUMENTED_INCIDENT},
         "identities with no accountable owner"),
        ("shadow-ai-identity", "II", "Shadow AI Identity", 2, 2,
         {EvidenceFlag.DOCUMENTED_INCIDENT},
         "identities provisioned outside governance"),
        ("dynamic-access-requirement-mismatch", "II", "Dynamic Access Requirement Mismatch", 2, 2,
         set(), "static entitlements for dynamic workloads"),
        ("cross-system-privilege-accumulation", "II", "Cross-System Privilege Accumulation", 3, 1,
         {EvidenceFlag.PRACTITIONER_PREVALENCE},
         "aggregate privilege invisible per-system"),
        ("multi-agent-privilege-escalation", "II", "Multi-Agent Privilege Escalation", 3, 2,
         {EvidenceFlag.DOCUMENTED_INCIDENT},
         "delegation chains amplifying effective privilege"),
        ("certification-gap", "II", "Certification Gap", 2, 2,
         set(), "reviews designed for humans skipping machine identities"),
        ("high-volume-autonomous-exfiltration", "III", "High-Volume Autonomous Exfiltration", 3, 2,
         {EvidenceFlag.DOCUMENTED_INCIDENT},
         "machine-speed data movement beyond human response"),
        ("indirect-prompt-injection", "IV", "Indirect Prompt Injection", 3, 2,
         {EvidenceFlag.DOCUMENTED_INCIDENT},
         "untrusted content steering agent actions"),
        ("audit-trail-insufficiency", "V", "Audit Trail Insufficiency", 3, 2,
         {EvidenceFlag.REGULATORY_RECOGNITION},
         "actions without reconstructable records"),
        ("diffuse-accountability", "V", "Diffuse Accountability for AI Harm", 1, 3,
         set(), "harm with no assignable human owner"),
        ("human-oversight-nominalism", "V", "Human Oversight Nominalism", 2, 2,
         {EvidenceFlag.REGULATORY_RECOGNITION},
         "oversight that exists on paper only"),
        ("ai-supply-chain-compromise", "VI", "AI Supply Chain Compromise", 3, 2,
         {EvidenceFlag.DOCUMENTED_INCIDENT},
         "poisoned models and dependencies"),
        ("state-sponsored-api-credential-theft", "VII", "State-Sponsored API Credential Theft", 3, 3,
         {EvidenceFlag.THREAT_INTEL_ATTRIBUTED},
         "campaign-scale theft of machine credentials"),
        ("ai-enhanced-identity-fraud", "VII", "AI-Enhanced Identity Fraud for Enterprise Access", 3, 2,
         {EvidenceFlag.THREAT_INTEL_ATTRIBUTED},
         "synthetic identities passing enterprise vetting"),
        ("algorithmic-foreign-influence", "VII", "Algorithmic Foreign Influence via Enterprise AI", 2, 2,
         {EvidenceFlag.THREAT_INTEL_ATTRIBUTED},
         "covert steering of enterprise AI outputs"),
        ("ai-model-critical-infrastructure-target", "VII", "AI Model as Critical Infrastructure Target", 3, 1,
         set(), "models as high-value attack targets"),
        ("cross-jurisdictional-regulatory-weaponization", "VII",
         "Cross-Jurisdictional Regulatory Weaponization", 2, 2,
         {EvidenceFlag.REGULATORY_RECOGNITION},
         "compelled disclosure across incompatible regimes"),
        ("compute-governance-gap", "VIII", "Compute Infrastructure and Governance Exposure", 2, 2,
         set(), "concentration of AI compute without governance hooks"),
    ]
    entries = []
    for risk_id, domain, name, impact, likelihood, flags, vector in spec:
        entries.append(
            RiskEntry(
                risk_id=risk_id,
                airt_domain=domain,
                name=name,
                description=name,
                severity=assess_severity(impact, likelihood, flags),
                impact=impact,
                likelihood=likelihood,
                primary_vector=vector,
                governance_implications="registry, credential and audit controls",
                evidence_flags=frozenset(flags),
            )
        )
    return entries


# -- compound intersections --------------------------------------------------------


EXFIL_ACTIONS = {ActionVerb.SEND, ActionVerb.PUBLISH}


@dataclass(frozen=True)
class CompoundAlert:
    nexus: str
    identity_id: str
    domains: Tuple[str, ...]
    evidence: dict


@dataclass
class RiskStateView:
    """The system state detect_intersections evaluates. Pure data."""

    identities: List[AgentIdentity]
    live_credentials: list = field(default_factory=list)
    assessments: List[RiskAssessment] = field(default_factory=list)
    privilege_alerts: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    chain_valid: bool = True
    gate_failures: Dict[str, List[str]] = field(default_factory=dict)
    alignment_threshold: float = 0.7


def detect_intersections(state: RiskStateView) -> List[CompoundAlert]:
    alerts: List[CompoundAlert] = []
    by_id = {i.id: i for i in state.identities}
    cred_scopes: Dict[str, set] = {}
    for cred in state.live_credentials:
        cred_scopes.setdefault(cred.subject, set()).update(cred.scope)
    touched_confidential: Set[str] = set()
    low_alignment_blocked: Set[str] = set()
    for a in state.assessments:
        if a.request.data_class >= DataClass.CONFIDENTIAL:
            touched_confidential.add(a.request.identity_id)
        if (
            a.decision in (Decision.ESCALATE, Decision.DENY)
            and a.alignment_score is not None
            and a.alignment_score < state.alignment_threshold
        ):
            low_alignment_blocked.add(a.request.identity_id)

    for identity in state.identities:
        # (a) standing credential + exfiltration capability + state-actor flag
        has_standing = any(g.standing for g in identity.grants)
        has_exfil = any(
            a in EXFIL_ACTIONS for g in identity.grants for a in g.actions
        ) or any(e.action in EXFIL_ACTIONS for e in cred_scopes.get(identity.id, ()))
        threat_flagged = IdentityFlag.FOREIGN_EXPOSED in identity.flags
        if (
            has_standing
            and has_exfil
            and threat_flagged
            and identity.id in touched_confidential
        ):
            alerts.append(
                CompoundAlert(
                    nexus="credential-exfiltration-state-actor",
                    identity_id=identity.id,
                    domains=("I", "III", "VII"),
                    evidence={
                        "standing_grants": sum(1 for g in identity.grants if g.standing),
                        "exfil_capable": True,
                        "threat_flagged": True,
                    },
                )
            )

        # (b) low-alignment block + privilege aggregation alert + accountability gap
        audit_gap = (not state.chain_valid) or identity.owner is None
        if (
            identity.id in low_alignment_blocked
            and state.privilege_alerts.get(identity.id)
            and audit_gap
        ):
            alerts.append(
                CompoundAlert(
                    nexus="injection-escalation-accountability-void",
                    identity_id=identity.id,
                    domains=("IV", "II", "V"),
                    evidence={
                        "privilege_alerts": list(state.privilege_alerts[identity.id]),
                        "chain_valid": state.chain_valid,
                        "owner_missing": identity.owner is None,
                    },
                )
            )

        # (c) failed provenance gate or integrity mismatch while Active
        reasons = state.gate_failures.get(identity.id)
        if reasons and identity.lifecycle is LifecycleState.ACTIVE:
            alerts.append(
                CompoundAlert(
                    nexus="supply-chain-authentication-influence",
                    identity_id=identity.id,
                    domains=("VI", "I", "VII"),
                    evidence={"gate_failures": list(reasons)},
                )
            )
    return alerts
