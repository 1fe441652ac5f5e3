"""Shared vocabulary types: action verbs, data classes, scopes, owners, grants.

These types cross module boundaries (registry grants, credential scopes,
access requests) so they live in one place. Scope coverage semantics are
deliberately conservative: a pattern is only treated as covering another
when the containment is decidable (equal patterns, the universal pattern,
or a literal inner resource matched against the outer glob).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from fnmatch import fnmatchcase
from typing import FrozenSet, Iterable, Optional


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def iso(ts: datetime) -> str:
    """ISO-8601 with explicit UTC offset, second precision kept as given."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.isoformat()


def parse_iso(text: str) -> datetime:
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


class ActionVerb(str, Enum):
    READ = "read"
    WRITE = "write"
    DELETE = "delete"
    SEND = "send"
    PUBLISH = "publish"
    EXECUTE = "execute"


class DataClass(str, Enum):
    PUBLIC = "public"
    INTERNAL = "internal"
    CONFIDENTIAL = "confidential"
    RESTRICTED = "restricted"
    CRITICAL = "critical"

    @property
    def rank(self) -> int:
        return _DATA_CLASS_RANK[self]

    def __le__(self, other: "DataClass") -> bool:  # type: ignore[override]
        return self.rank <= other.rank

    def __lt__(self, other: "DataClass") -> bool:  # type: ignore[override]
        return self.rank < other.rank

    def __ge__(self, other: "DataClass") -> bool:  # type: ignore[override]
        return self.rank >= other.rank

    def __gt__(self, other: "DataClass") -> bool:  # type: ignore[override]
        return self.rank > other.rank


_DATA_CLASS_RANK = {
    DataClass.PUBLIC: 0,
    DataClass.INTERNAL: 1,
    DataClass.CONFIDENTIAL: 2,
    DataClass.RESTRICTED: 3,
    DataClass.CRITICAL: 4,
}


class AccountabilityLevel(str, Enum):
    INDIVIDUAL = "individual"
    TEAM_LEAD = "team-lead"
    EXECUTIVE = "executive"


@dataclass(frozen=True)
class OwnerRef:
    """Designated human accountability owner for an identity."""

    owner_id: str
    display_name: str = ""
    contact: str = ""
    accountability_level: AccountabilityLevel = AccountabilityLevel.INDIVIDUAL

    def __post_init__(self):
        if not self.owner_id:
            raise ValueError("owner_id must be non-empty")

    def acceptance_token(self, identity_id: str) -> str:
        """Token this owner presents to accept an ownership transfer."""
        return f"{self.owner_id}/accepts/{identity_id}"

    def to_dict(self) -> dict:
        return {
            "owner_id": self.owner_id,
            "display_name": self.display_name,
            "contact": self.contact,
            "accountability_level": self.accountability_level.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OwnerRef":
        return cls(
            owner_id=data["owner_id"],
            display_name=data.get("display_name", ""),
            contact=data.get("contact", ""),
            accountability_level=AccountabilityLevel(
                data.get("accountability_level", "individual")
            ),
        )


@dataclass(frozen=True, order=True)
class ScopeEntry:
    """One (system, resource pattern, action) access triple."""

    system: str
    resource: str
    action: ActionVerb

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "resource": self.resource,
            "action": self.action.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScopeEntry":
        return cls(data["system"], data["resource"], ActionVerb(data["action"]))


Scope = FrozenSet[ScopeEntry]


@dataclass(frozen=True)
class AccessGrant:
    """Registry-held grant. standing=True requires an explicit waiver record
    (the zero-standing-privilege exception): waiver id, approving owner, and
    an expiry at most 180 days out, enforced at provisioning time."""

    system: str
    resource_pattern: str
    actions: FrozenSet[ActionVerb]
    admin: bool = False
    standing: bool = False
    waiver_id: Optional[str] = None
    waiver_owner: Optional[str] = None
    waiver_expires: Optional[datetime] = None

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "resource_pattern": self.resource_pattern,
            "actions": sorted(a.value for a in self.actions),
            "admin": self.admin,
            "standing": self.standing,
            "waiver_id": self.waiver_id,
            "waiver_owner": self.waiver_owner,
            "waiver_expires": iso(self.waiver_expires) if self.waiver_expires else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AccessGrant":
        return cls(
            system=data["system"],
            resource_pattern=data["resource_pattern"],
            actions=frozenset(ActionVerb(a) for a in data["actions"]),
            admin=data.get("admin", False),
            standing=data.get("standing", False),
            waiver_id=data.get("waiver_id"),
            waiver_owner=data.get("waiver_owner"),
            waiver_expires=(
                parse_iso(data["waiver_expires"]) if data.get("waiver_expires") else None
            ),
        )


def pattern_covers(outer: str, inner: str) -> bool:
    """True when every resource matched by ``inner`` is matched by ``outer``.

    Conservative: only equal patterns, the universal pattern, or a literal
    inner resource checked against the outer glob count as covered.
    """
    if outer == inner or outer == "*":
        return True
    if any(ch in inner for ch in "*?["):
        return False
    return fnmatchcase(inner, outer)


def entry_covered_by_grant(entry: ScopeEntry, grant: AccessGrant) -> bool:
    return (
        entry.system == grant.system
        and entry.action in grant.actions
        and pattern_covers(grant.resource_pattern, entry.resource)
    )


def entry_covered_by_scope(entry: ScopeEntry, scope: Iterable[ScopeEntry]) -> bool:
    return any(
        entry.system == outer.system
        and entry.action == outer.action
        and pattern_covers(outer.resource, entry.resource)
        for outer in scope
    )


def scope_subset(inner: Iterable[ScopeEntry], outer: Iterable[ScopeEntry]) -> bool:
    outer = list(outer)
    return all(entry_covered_by_scope(entry, outer) for entry in inner)


def scope_covered_by_grants(
    scope: Iterable[ScopeEntry],
    grants: Iterable[AccessGrant],
    extra: Iterable[ScopeEntry] = (),
) -> bool:
    """True when every scope entry is covered by a grant or the extra scope."""
    grants = list(grants)
    extra = list(extra)
    return all(
        any(entry_covered_by_grant(entry, g) for g in grants)
        or entry_covered_by_scope(entry, extra)
        for entry in scope
    )


def scope_to_list(scope: Iterable[ScopeEntry]) -> list:
    """Deterministic (sorted) list-of-dicts form used in wire payloads."""
    return [e.to_dict() for e in sorted(scope)]


def scope_from_list(items: Iterable[dict]) -> Scope:
    return frozenset(ScopeEntry.from_dict(item) for item in items)
