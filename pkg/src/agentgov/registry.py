"""Authoritative AI identity registry: lifecycle, ownership, certification.

Identity ids are workload URIs of the form ``migt://<trust-domain>/<path>``.
Lifecycle moves Requested -> Approved -> Active <-> Suspended, and from
Active or Suspended to the terminal Decommissioned state. Every mutation
appends exactly one audit entry.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set

from .audit import AuditLedger, EventKind
from .canonical import sha3_256_hex
from .errors import (
    AcceptanceTokenError,
    DuplicateIdError,
    EmptyPurposeError,
    IllegalTransitionError,
    MissingOwnerError,
    NotActiveError,
    NotOwnerError,
    ProvenanceGateFailedError,
    StandingGrantWithoutWaiverError,
    UnknownIdentityError,
)
from .model import AccessGrant, OwnerRef, iso, parse_iso, utcnow

WORKLOAD_URI_RE = re.compile(r"^migt://[A-Za-z0-9.\-]+/.+$")

DEFAULT_CERTIFICATION_CADENCE = timedelta(days=90)
MAX_WAIVER_TERM = timedelta(days=180)


class IdentityKind(str, Enum):
    AGENT = "agent"
    SERVICE_ACCOUNT = "service-account"
    API_TOKEN = "api-token"
    WORKFLOW = "workflow"
    DEVICE = "device"


class LifecycleState(str, Enum):
    REQUESTED = "Requested"
    APPROVED = "Approved"
    ACTIVE = "Active"
    SUSPENDED = "Suspended"
    DECOMMISSIONED = "Decommissioned"


class LifecycleEvent(str, Enum):
    APPROVE = "approve"
    DENY = "deny"
    ACTIVATE = "activate"
    SUSPEND = "suspend"
    RESUME = "resume"
    DECOMMISSION = "decommission"


# deny is the terminal rejection of a provisioning request (approval-queue path)
_TRANSITIONS = {
    (LifecycleState.REQUESTED, LifecycleEvent.APPROVE): LifecycleState.APPROVED,
    (LifecycleState.REQUESTED, LifecycleEvent.DENY): LifecycleState.DECOMMISSIONED,
    (LifecycleState.APPROVED, LifecycleEvent.ACTIVATE): LifecycleState.ACTIVE,
    (LifecycleState.ACTIVE, LifecycleEvent.SUSPEND): LifecycleState.SUSPENDED,
    (LifecycleState.SUSPENDED, LifecycleEvent.RESUME): LifecycleState.ACTIVE,
    (LifecycleState.ACTIVE, LifecycleEvent.DECOMMISSION): LifecycleState.DECOMMISSIONED,
    (LifecycleState.SUSPENDED, LifecycleEvent.DECOMMISSION): LifecycleState.DECOMMISSIONED,
}


class IdentityFlag(str, Enum):
    SHADOW = "shadow"
    PAM_ADJACENT = "pam-adjacent"
    FOREIGN_EXPOSED = "foreign-exposed"


class JurisdictionTier(str, Enum):
    SINGLE = "single"
    DUAL = "dual"
    TRI_PLUS = "tri-plus"


@dataclass
class AgentIdentity:
    id: str
    kind: IdentityKind
    purpose: str
    owner: Optional[OwnerRef]
    provisioned_at: datetime
    review_due: datetime
    lifecycle: LifecycleState
    autonomy: int = 1
    grants: FrozenSet[AccessGrant] = frozenset()
    associated_systems: FrozenSet[str] = frozenset()
    flags: Set[IdentityFlag] = field(default_factory=set)
    jurisdiction_tier: JurisdictionTier = JurisdictionTier.SINGLE
    aibom_ref: Optional[str] = None
    decommissioned_at: Optional[datetime] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "purpose": self.purpose,
            "owner": self.owner.to_dict() if self.owner else None,
            "provisioned_at": iso(self.provisioned_at),
            "review_due": iso(self.review_due),
            "lifecycle": self.lifecycle.value,
            "autonomy": self.autonomy,
            "grants": [g.to_dict() for g in sorted(self.grants, key=lambda g: (g.system, g.resource_pattern))],
            "associated_systems": sorted(self.associated_systems),
            "flags": sorted(f.value for f in self.flags),
            "jurisdiction_tier": self.jurisdiction_tier.value,
            "aibom_ref": self.aibom_ref,
            "decommissioned_at": iso(self.decommissioned_at) if self.decommissioned_at else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AgentIdentity":
        return cls(
            id=data["id"],
            kind=IdentityKind(data["kind"]),
            purpose=data["purpose"],
            owner=OwnerRef.from_dict(data["owner"]) if data.get("owner") else None,
            provisioned_at=parse_iso(data["provisioned_at"]),
            review_due=parse_iso(data["review_due"]),
            lifecycle=LifecycleState(data["lifecycle"]),
            autonomy=data.get("autonomy", 1),
            grants=frozenset(AccessGrant.from_dict(g) for g in data.get("grants", [])),
            associated_systems=frozenset(data.get("associated_systems", [])),
            flags={IdentityFlag(f) for f in data.get("flags", [])},
            jurisdiction_tier=JurisdictionTier(data.get("jurisdiction_tier", "single")),
            aibom_ref=data.get("aibom_ref"),
            decommissioned_at=(
                parse_iso(data["decommissioned_at"]) if data.get("decommissioned_at") else None
            ),
        )


@dataclass(frozen=True)
class IdentitySpec:
    """Provisioning request: what register_identity validates and stores."""

    id: str
    kind: IdentityKind
    purpose: str
    owner: Optional[OwnerRef]
    grants: FrozenSet[AccessGrant] = frozenset()
    associated_systems: FrozenSet[str] = frozenset()
    autonomy: int = 1
    jurisdiction_tier: JurisdictionTier = JurisdictionTier.SINGLE
    aibom_ref: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "purpose": self.purpose,
            "owner": self.owner.to_dict() if self.owner else None,
            "grants": [g.to_dict() for g in sorted(self.grants, key=lambda g: (g.system, g.resource_pattern))],
            "associated_systems": sorted(self.associated_systems),
            "autonomy": self.autonomy,
            "jurisdiction_tier": self.jurisdiction_tier.value,
            "aibom_ref": self.aibom_ref,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IdentitySpec":
        return cls(
            id=data["id"],
            kind=IdentityKind(data["kind"]),
            purpose=data["purpose"],
            owner=OwnerRef.from_dict(data["owner"]) if data.get("owner") else None,
            grants=frozenset(AccessGrant.from_dict(g) for g in data.get("grants", [])),
            associated_systems=frozenset(data.get("associated_systems", [])),
            autonomy=data.get("autonomy", 1),
            jurisdiction_tier=JurisdictionTier(data.get("jurisdiction_tier", "single")),
            aibom_ref=data.get("aibom_ref"),
        )


@dataclass(frozen=True)
class CertificationRecord:
    identity_id: str
    certified_at: datetime
    certifier: str
    behavioral_summary_digest: str
    verdict: str  # "recertified" | "revoke-recommended"


@dataclass(frozen=True)
class DiscoveryRecord:
    source: str
    discovered_locator: str
    kind_hint: Optional[str] = None

    def digest(self) -> str:
        return sha3_256_hex(f"{self.source}\x00{self.discovered_locator}".encode())[:16]

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "discovered_locator": self.discovered_locator,
            "kind_hint": self.kind_hint,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscoveryRecord":
        return cls(
            source=data["source"],
            discovered_locator=data["discovered_locator"],
            kind_hint=data.get("kind_hint"),
        )


def parse_scan_jsonl(text: str) -> List[DiscoveryRecord]:
    """Discovery scan input: JSON Lines of {source, discovered_locator, kind_hint}."""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(DiscoveryRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError) as exc:
            raise ValueError(f"scan line {lineno}: {exc}") from exc
    return records


class IdentityRegistry:
    """Registry of every AI identity, with lifecycle state machine and audit."""

    def __init__(
        self,
        ledger: AuditLedger,
        *,
        trust_domain: str = "example.org",
        certification_cadence: timedelta = DEFAULT_CERTIFICATION_CADENCE,
        deployment_gate: Optional[Callable[[IdentitySpec], tuple]] = None,
        on_decommission: Optional[Callable[[str], int]] = None,
        clock: Callable[[], datetime] = utcnow,
    ):
        self._identities: Dict[str, AgentIdentity] = {}
        self._certifications: List[CertificationRecord] = []
        self._triage_queue: List[str] = []
        self._import_index: Dict[str, str] = {}  # discovery digest -> identity id
        self._ledger = ledger
        self._trust_domain = trust_domain
        self._cadence = certification_cadence
        self._deployment_gate = deployment_gate
        self._on_decommission = on_decommission
        self._clock = clock
        self._lock = threading.RLock()

    # -- lookups ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._identities)

    def __contains__(self, identity_id: str) -> bool:
        return identity_id in self._identities

    def get(self, identity_id: str) -> AgentIdentity:
        try:
            return self._identities[identity_id]
        except KeyError:
            raise UnknownIdentityError(identity_id) from None

    def all(self) -> List[AgentIdentity]:
        return list(self._identities.values())

    @property
    def triage_queue(self) -> List[str]:
        return list(self._triage_queue)

    def certifications(self, identity_id: Optional[str] = None) -> List[CertificationRecord]:
        if identity_id is None:
            return list(self._certifications)
        return [c for c in self._certifications if c.identity_id == identity_id]

    # -- provisioning ----------------------------------------------------------

    def register_identity(self, spec: IdentitySpec, approval: OwnerRef) -> AgentIdentity:
        if not spec.purpose or not spec.purpose.strip():
            raise EmptyPurposeError(spec.id)
        if spec.owner is None:
            raise MissingOwnerError(spec.id)
        if not WORKLOAD_URI_RE.match(spec.id):
            raise ValueError(f"workload URI must match migt://<trust-domain>/<path>: {spec.id}")
        if not 1 <= spec.autonomy <= 4:
            raise ValueError(f"autonomy must be in [1, 4], got {spec.autonomy}")
        self._check_grants(spec.grants)
        if spec.kind is IdentityKind.AGENT and self._deployment_gate is not None:
            ok, reasons = self._deployment_gate(spec)
            if not ok:
                raise ProvenanceGateFailedError(reasons)

        with self._lock:
            if spec.id in self._identities:
                raise DuplicateIdError(spec.id)
            now = self._clock()
            identity = AgentIdentity(
                id=spec.id,
                kind=spec.kind,
                purpose=spec.purpose,
                owner=spec.owner,
                provisioned_at=now,
                review_due=now + self._cadence,
                lifecycle=LifecycleState.REQUESTED,
                autonomy=spec.autonomy,
                grants=spec.grants,
                associated_systems=spec.associated_systems,
                jurisdiction_tier=spec.jurisdiction_tier,
                aibom_ref=spec.aibom_ref,
            )
            self._identities[spec.id] = identity
            self._ledger.append(
                actor=spec.id,
                kind=EventKind.LIFECYCLE,
                payload={
                    "event": "registered",
                    "state": identity.lifecycle.value,
                    "owner": spec.owner.to_dict(),
                    "approval": approval.to_dict(),
                    "aibom_ref": spec.aibom_ref,
                    "purpose": spec.purpose,
                },
                timestamp=now,
            )
            return identity

    def _check_grants(self, grants: Iterable[AccessGrant]) -> None:
        for g in grants:
            if not g.standing:
                continue
            locator = f"{g.system}:{g.resource_pattern}"
            if not g.waiver_id:
                raise StandingGrantWithoutWaiverError(locator)
            if not g.waiver_owner:
                raise StandingGrantWithoutWaiverError(
                    f"waiver {g.waiver_id} lacks an approving owner"
                )
            if g.waiver_expires is None:
                raise StandingGrantWithoutWaiverError(
                    f"waiver {g.waiver_id} lacks an expiry"
                )
            if g.waiver_expires - self._clock() > MAX_WAIVER_TERM:
                raise StandingGrantWithoutWaiverError(
                    f"waiver {g.waiver_id} exceeds {MAX_WAIVER_TERM.days}-day term"
                )

    # -- lifecycle ------------------------------------------------------------

    def transition_lifecycle(
        self, identity_id: str, event: LifecycleEvent, note: Optional[str] = None
    ) -> LifecycleState:
        with self._lock:
            identity = self.get(identity_id)
            key = (identity.lifecycle, event)
            if key not in _TRANSITIONS:
                raise IllegalTransitionError(
                    f"{identity.lifecycle.value} + {event.value} is not a legal transition"
                )
            target = _TRANSITIONS[key]
            if target is LifecycleState.ACTIVE and identity.owner is None:
                raise MissingOwnerError(
                    f"{identity_id}: cannot become Active without an owner"
                )
            now = self._clock()
            revoked = 0
            if target is LifecycleState.DECOMMISSIONED:
                if self._on_decommission is not None:
                    revoked = self._on_decommission(identity_id)
                identity.decommissioned_at = now
            identity.lifecycle = target
            payload = {
                "event": event.value,
                "state": target.value,
                "credentials_revoked": revoked,
            }
            if note:
                payload["note"] = note
            self._ledger.append(
                actor=identity_id,
                kind=EventKind.LIFECYCLE,
                payload=payload,
                timestamp=now,
            )
            return target

    def assign_owner(
        self, identity_id: str, new_owner: OwnerRef, acceptance_token: str
    ) -> AgentIdentity:
        """Ownership transfer; the new owner must present their acceptance token."""
        if acceptance_token != new_owner.acceptance_token(identity_id):
            raise AcceptanceTokenError(
                f"token does not match {new_owner.owner_id} accepting {identity_id}"
            )
        with self._lock:
            identity = self.get(identity_id)
            identity.owner = new_owner
            if identity_id in self._triage_queue:
                self._triage_queue.remove(identity_id)
            self._ledger.append(
                actor=identity_id,
                kind=EventKind.LIFECYCLE,
                payload={"event": "owner-transfer", "owner": new_owner.to_dict()},
                timestamp=self._clock(),
            )
            return identity

    def remove_owner(self, identity_id: str) -> AgentIdentity:
        """Owner departure; leaves the identity orphaned until triaged."""
        with self._lock:
            identity = self.get(identity_id)
            identity.owner = None
            self._ledger.append(
                actor=identity_id,
                kind=EventKind.LIFECYCLE,
                payload={"event": "owner-removed", "owner": None},
                timestamp=self._clock(),
            )
            return identity

    def set_autonomy(self, identity_id: str, level: int, reason: str) -> int:
        if not 1 <= level <= 4:
            raise ValueError(f"autonomy must be in [1, 4], got {level}")
        with self._lock:
            identity = self.get(identity_id)
            identity.autonomy = level
            self._ledger.append(
                actor=identity_id,
                kind=EventKind.LIFECYCLE,
                payload={"event": "autonomy-change", "level": level, "reason": reason},
                timestamp=self._clock(),
            )
            return level

    def add_flags(self, identity_id: str, flags: Iterable[IdentityFlag]) -> Set[IdentityFlag]:
        with self._lock:
            identity = self.get(identity_id)
            new = set(flags) - identity.flags
            if new:
                identity.flags |= new
                self._ledger.append(
                    actor=identity_id,
                    kind=EventKind.LIFECYCLE,
                    payload={"event": "flags-added", "flags": sorted(f.value for f in new)},
                    timestamp=self._clock(),
                )
            return identity.flags

    def add_grant(self, identity_id: str, grant: AccessGrant) -> AgentIdentity:
        self._check_grants([grant])
        with self._lock:
            identity = self.get(identity_id)
            identity.grants = identity.grants | {grant}
            self._ledger.append(
                actor=identity_id,
                kind=EventKind.LIFECYCLE,
                payload={"event": "grant-added", "grant": grant.to_dict()},
                timestamp=self._clock(),
            )
            return identity

    # -- governance sweeps ---------------------------------------------------

    def detect_orphans(self, now: Optional[datetime] = None) -> List[str]:
        """Non-decommissioned identities with no owner or an overdue review."""
        now = now or self._clock()
        return [
            i.id
            for i in self._identities.values()
            if i.lifecycle is not LifecycleState.DECOMMISSIONED
            and (i.owner is None or i.review_due < now)
        ]

    def certify(
        self, identity_id: str, behavioral_summary: str, attesting_owner: OwnerRef
    ) -> CertificationRecord:
        with self._lock:
            identity = self.get(identity_id)
            if identity.lifecycle is not LifecycleState.ACTIVE:
                raise NotActiveError(f"{identity_id} is {identity.lifecycle.value}")
            if identity.owner is None or identity.owner.owner_id != attesting_owner.owner_id:
                raise NotOwnerError(
                    f"{attesting_owner.owner_id} is not the owner of {identity_id}"
                )
            now = self._clock()
            record = CertificationRecord(
                identity_id=identity_id,
                certified_at=now,
                certifier=attesting_owner.owner_id,
                behavioral_summary_digest=sha3_256_hex(behavioral_summary.encode()),
                verdict="recertified",
            )
            identity.review_due = identity.review_due + self._cadence
            self._certifications.append(record)
            self._ledger.append(
                actor=identity_id,
                kind=EventKind.CERTIFICATION,
                payload={
                    "certifier": record.certifier,
                    "verdict": record.verdict,
                    "behavioral_summary_digest": record.behavioral_summary_digest,
                    "review_due": iso(identity.review_due),
                },
                timestamp=now,
            )
            return record

    # -- discovery import --------------------------------------------------------

    def import_discovered(
        self,
        records: Iterable[DiscoveryRecord],
        id_overrides: Optional[Dict[str, str]] = None,
    ) -> List[AgentIdentity]:
        """Shadow-import discovered identities: Suspended, ownerless, flagged.

        Idempotent on the (source, discovered_locator) digest; a record whose
        locator names an already-registered id only adds the shadow flag.
        id_overrides (digest -> id) pins generated ids on state replay.
        """
        out: List[AgentIdentity] = []
        id_overrides = id_overrides or {}
        with self._lock:
            for record in records:
                if record.discovered_locator in self._identities:
                    identity = self._identities[record.discovered_locator]
                    self.add_flags(identity.id, {IdentityFlag.SHADOW})
                    out.append(identity)
                    continue
                digest = record.digest()
                if digest in self._import_index:
                    out.append(self._identities[self._import_index[digest]])
                    continue
                now = self._clock()
                identity_id = id_overrides.get(
                    digest, f"migt://{self._trust_domain}/discovered/{digest}"
                )
                kind = IdentityKind.AGENT
                if record.kind_hint:
                    try:
                        kind = IdentityKind(record.kind_hint)
                    except ValueError:
                        kind = IdentityKind.SERVICE_ACCOUNT
                identity = AgentIdentity(
                    id=identity_id,
                    kind=kind,
                    purpose=f"discovered via {record.source}",
                    owner=None,
                    provisioned_at=now,
                    review_due=now,  # immediately due: forces triage
                    lifecycle=LifecycleState.SUSPENDED,
                    flags={IdentityFlag.SHADOW},
                )
                self._identities[identity_id] = identity
                self._import_index[digest] = identity_id
                self._triage_queue.append(identity_id)
                self._ledger.append(
                    actor=identity_id,
                    kind=EventKind.LIFECYCLE,
                    payload={
                        "event": "shadow-import",
                        "state": identity.lifecycle.value,
                        "source": record.source,
                        "discovered_locator": record.discovered_locator,
                        "owner": None,
                    },
                    timestamp=now,
                )
                out.append(identity)
        return out

    # -- export / import -----------------------------------------------------------

    def export_jsonl(self) -> str:
        return "\n".join(
            json.dumps(i.to_dict(), sort_keys=True) for i in self._identities.values()
        )

    def load_jsonl(self, text: str) -> int:
        count = 0
        with self._lock:
            for line in text.splitlines():
                line = line.strip()
                if not line:
                    continue
                identity = AgentIdentity.from_dict(json.loads(line))
                self._identities[identity.id] = identity
                count += 1
        return count
