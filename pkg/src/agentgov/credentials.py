"""Ephemeral credential authority: JIT issuance, delegation, toolset measurement.

Zero standing privilege is the target architecture: credentials are issued
just-in-time against a permissive policy decision, bound to one task, live
for at most ``max_ttl`` seconds, and revoked when the task completes.
Credentials are Ed25519-signed by the authority over a length-prefixed
canonical body; agent-to-agent delegations are signed by the delegator's own
workload key and must narrow scope monotonically.

Rotation keeps retired public keys for verification, so credentials signed
before a rotation remain verifiable until they expire. Rotation happens under
the issuance lock, blocking issuance but not verification.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    NoEncryption,
    PrivateFormat,
    PublicFormat,
)

from .audit import AuditLedger, EventKind
from .canonical import (
    b64url_decode,
    b64url_encode,
    canonical_json,
    canonical_json_bytes,
    length_prefixed,
    sha3_256_hex,
)
from .errors import (
    DecisionNotPermissiveError,
    EmptyManifestError,
    IdentityNotActiveError,
    NoLiveCredentialError,
    ScopeExceedsPolicyError,
    ScopeWideningError,
    UnknownKeyError,
)
from .model import (
    Scope,
    ScopeEntry,
    iso,
    parse_iso,
    scope_covered_by_grants,
    scope_subset,
    scope_to_list,
    scope_from_list,
    utcnow,
)
from .registry import IdentityRegistry, LifecycleState

DEFAULT_MAX_TTL = 300
DEFAULT_MAX_DELEGATION_DEPTH = 8

PERMISSIVE_DECISIONS = {"ALLOW", "ALLOW_ENHANCED_LOGGING"}


class CredentialVerdict(str, Enum):
    VALID = "valid"
    EXPIRED = "expired"
    REVOKED = "revoked"
    OUT_OF_SCOPE = "out-of-scope"
    BAD_SIGNATURE = "bad-signature"


class ChainVerdict(str, Enum):
    VALID = "valid"
    BROKEN_SIGNATURE = "broken-signature"
    SCOPE_WIDENING = "scope-widening"
    DEPTH_EXCEEDED = "depth-exceeded"
    EXPIRED_LINK = "expired-link"


@dataclass(frozen=True)
class Credential:
    credential_id: str
    subject: str
    task_id: str
    scope: Scope
    issued_at: datetime
    ttl_seconds: int
    signature: bytes
    revoked: bool = False

    def body_bytes(self) -> bytes:
        return credential_body(
            self.credential_id,
            self.subject,
            self.task_id,
            self.scope,
            self.issued_at,
            self.ttl_seconds,
        )

    def expires_at(self) -> datetime:
        return self.issued_at + timedelta(seconds=self.ttl_seconds)

    def token(self) -> str:
        return b64url_encode(self.body_bytes()) + "." + b64url_encode(self.signature)


def credential_body(
    credential_id: str,
    subject: str,
    task_id: str,
    scope: Scope,
    issued_at: datetime,
    ttl_seconds: int,
) -> bytes:
    return length_prefixed(
        credential_id.encode(),
        subject.encode(),
        task_id.encode(),
        canonical_json(scope_to_list(scope)).encode(),
        iso(issued_at).encode(),
        str(ttl_seconds).encode(),
    )


def parse_credential_body(body: bytes) -> dict:
    fields = []
    offset = 0
    while offset < len(body):
        if offset + 4 > len(body):
            raise ValueError("truncated length prefix")
        length = int.from_bytes(body[offset : offset + 4], "big")
        offset += 4
        if offset + length > len(body):
            raise ValueError("truncated field")
        fields.append(body[offset : offset + length])
        offset += length
    if len(fields) != 6:
        raise ValueError(f"expected 6 credential fields, got {len(fields)}")
    return {
        "credential_id": fields[0].decode(),
        "subject": fields[1].decode(),
        "task_id": fields[2].decode(),
        "scope": scope_from_list(json.loads(fields[3].decode())),
        "issued_at": parse_iso(fields[4].decode()),
        "ttl_seconds": int(fields[5].decode()),
    }


@dataclass(frozen=True)
class DelegationEdge:
    delegator: str
    delegatee: str
    task_id: str
    delegated_scope: Scope
    issued_at: datetime
    ttl_seconds: int
    signature: bytes

    def body_bytes(self) -> bytes:
        return length_prefixed(
            self.delegator.encode(),
            self.delegatee.encode(),
            self.task_id.encode(),
            canonical_json(scope_to_list(self.delegated_scope)).encode(),
            iso(self.issued_at).encode(),
            str(self.ttl_seconds).encode(),
        )

    def expires_at(self) -> datetime:
        return self.issued_at + timedelta(seconds=self.ttl_seconds)

    def to_dict(self) -> dict:
        return {
            "delegator": self.delegator,
            "delegatee": self.delegatee,
            "task_id": self.task_id,
            "delegated_scope": scope_to_list(self.delegated_scope),
            "issued_at": iso(self.issued_at),
            "ttl_seconds": self.ttl_seconds,
            "signature": self.signature.hex(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DelegationEdge":
        return cls(
            delegator=data["delegator"],
            delegatee=data["delegatee"],
            task_id=data["task_id"],
            delegated_scope=scope_from_list(data["delegated_scope"]),
            issued_at=parse_iso(data["issued_at"]),
            ttl_seconds=data["ttl_seconds"],
            signature=bytes.fromhex(data["signature"]),
        )


@dataclass(frozen=True)
class ToolsetMeasurement:
    identity_id: str
    session_id: str
    manifest_digest: str
    tools: frozenset
    measured_at: datetime


@dataclass
class KeyRecord:
    workload_uri: str
    public_key: bytes
    algorithm: str = "Ed25519"
    rotated_at: Optional[datetime] = None


@dataclass(frozen=True)
class StandingViolation:
    identity_id: str
    kind: str  # "standing-grant" | "over-ttl-credential"
    detail: str


def toolset_digest(manifest: Iterable) -> str:
    """Order-independent digest over canonical tool descriptors."""
    canon = sorted(canonical_json(tool) for tool in manifest)
    return sha3_256_hex(canonical_json_bytes(canon))


def _tool_id(tool) -> str:
    if isinstance(tool, dict):
        return tool.get("tool_id") or tool.get("id") or canonical_json(tool)
    return str(tool)


class _KeyChain:
    """Current signing key plus retained verification-only predecessors."""

    def __init__(self, uri: str, now: datetime, private: Optional[Ed25519PrivateKey] = None):
        self.uri = uri
        self.private = private or Ed25519PrivateKey.generate()
        self.retired: List[Ed25519PublicKey] = []
        self.rotated_at = now

    def public_bytes(self) -> bytes:
        return self.private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)

    def private_hex(self) -> str:
        return self.private.private_bytes(
            Encoding.Raw, PrivateFormat.Raw, NoEncryption()
        ).hex()

    def rotate(self, now: datetime, private: Optional[Ed25519PrivateKey] = None) -> None:
        self.retired.append(self.private.public_key())
        self.private = private or Ed25519PrivateKey.generate()
        self.rotated_at = now

    def verify(self, signature: bytes, body: bytes) -> bool:
        for key in [self.private.public_key()] + self.retired:
            try:
                key.verify(signature, body)
                return True
            except InvalidSignature:
                continue
        return False

    def to_dict(self) -> dict:
        return {
            "private": self.private.private_bytes(
                Encoding.Raw, PrivateFormat.Raw, NoEncryption()
            ).hex(),
            "retired": [
                k.public_bytes(Encoding.Raw, PublicFormat.Raw).hex() for k in self.retired
            ],
            "rotated_at": iso(self.rotated_at),
        }

    @classmethod
    def from_dict(cls, uri: str, data: dict) -> "_KeyChain":
        chain = cls.__new__(cls)
        chain.uri = uri
        chain.private = Ed25519PrivateKey.from_private_bytes(bytes.fromhex(data["private"]))
        chain.retired = [
            Ed25519PublicKey.from_public_bytes(bytes.fromhex(h)) for h in data["retired"]
        ]
        chain.rotated_at = parse_iso(data["rotated_at"])
        return chain


class CredentialAuthority:
    """Issues, verifies and revokes task-bound credentials; records delegations."""

    def __init__(
        self,
        ledger: AuditLedger,
        registry: IdentityRegistry,
        *,
        max_ttl: int = DEFAULT_MAX_TTL,
        max_delegation_depth: int = DEFAULT_MAX_DELEGATION_DEPTH,
        clock: Callable[[], datetime] = utcnow,
    ):
        self._ledger = ledger
        self._registry = registry
        self.max_ttl = max_ttl
        self.max_delegation_depth = max_delegation_depth
        self._clock = clock
        self._lock = threading.RLock()
        self._authority = _KeyChain("authority", clock())
        self._workload_keys: Dict[str, _KeyChain] = {}
        self._credentials: Dict[str, Credential] = {}
        self._by_task: Dict[str, List[str]] = {}
        self._edges: List[DelegationEdge] = []
        self._measurements: Dict[Tuple[str, str], ToolsetMeasurement] = {}

    # -- key registry ------------------------------------------------------------

    def register_key(
        self, workload_uri: str, private_hex: Optional[str] = None
    ) -> KeyRecord:
        with self._lock:
            if workload_uri not in self._workload_keys:
                private = (
                    Ed25519PrivateKey.from_private_bytes(bytes.fromhex(private_hex))
                    if private_hex
                    else None
                )
                self._workload_keys[workload_uri] = _KeyChain(
                    workload_uri, self._clock(), private
                )
            return self._key_record(workload_uri)

    def has_key(self, workload_uri: str) -> bool:
        return workload_uri in self._workload_keys

    def rotate_key(self, workload_uri: str, private_hex: Optional[str] = None) -> KeyRecord:
        with self._lock:
            chain = self._require_keychain(workload_uri)
            private = (
                Ed25519PrivateKey.from_private_bytes(bytes.fromhex(private_hex))
                if private_hex
                else None
            )
            chain.rotate(self._clock(), private)
            return self._key_record(workload_uri)

    def rotate_authority_key(self, private_hex: Optional[str] = None) -> None:
        with self._lock:
            private = (
                Ed25519PrivateKey.from_private_bytes(bytes.fromhex(private_hex))
                if private_hex
                else None
            )
            self._authority.rotate(self._clock(), private)

    def authority_private_hex(self) -> str:
        return self._authority.private_hex()

    def set_authority_key(self, private_hex: str) -> None:
        with self._lock:
            self._authority = _KeyChain("authority", self._clock())
            self._authority.private = Ed25519PrivateKey.from_private_bytes(
                bytes.fromhex(private_hex)
            )

    def key_records(self) -> List[KeyRecord]:
        return [self._key_record(uri) for uri in sorted(self._workload_keys)]

    def _key_record(self, uri: str) -> KeyRecord:
        chain = self._workload_keys[uri]
        return KeyRecord(
            workload_uri=uri,
            public_key=chain.public_bytes(),
            rotated_at=chain.rotated_at,
        )

    def _require_keychain(self, uri: str) -> _KeyChain:
        try:
            return self._workload_keys[uri]
        except KeyError:
            raise UnknownKeyError(uri) from None

    def export_keys_json(self) -> str:
        import base64

        return json.dumps(
            {
                r.workload_uri: {
                    "algorithm": r.algorithm,
                    "public_key": base64.b64encode(r.public_key).decode(),
                    "rotated_at": iso(r.rotated_at) if r.rotated_at else None,
                }
                for r in self.key_records()
            },
            sort_keys=True,
            indent=2,
        )

    def dump_key_material(self) -> dict:
        """Full key material (private keys included) for the data directory."""
        with self._lock:
            return {
                "authority": self._authority.to_dict(),
                "workloads": {uri: c.to_dict() for uri, c in self._workload_keys.items()},
            }

    def load_key_material(self, data: dict) -> None:
        with self._lock:
            self._authority = _KeyChain.from_dict("authority", data["authority"])
            self._workload_keys = {
                uri: _KeyChain.from_dict(uri, d) for uri, d in data["workloads"].items()
            }

    # -- issuance ----------------------------------------------------------------

    def issue_jit_credential(
        self,
        identity_id: str,
        task_id: str,
        requested_scope: Scope,
        pdp_decision,
        *,
        ttl_seconds: Optional[int] = None,
        credential_id: Optional[str] = None,
        issued_at: Optional[datetime] = None,
    ) -> Credential:
        if not requested_scope:
            raise ScopeExceedsPolicyError("requested scope is empty")
        identity = self._registry.get(identity_id)
        if identity.lifecycle is not LifecycleState.ACTIVE:
            raise IdentityNotActiveError(f"{identity_id} is {identity.lifecycle.value}")

        decision_value = getattr(pdp_decision.decision, "value", str(pdp_decision.decision))
        if decision_value not in PERMISSIVE_DECISIONS:
            raise DecisionNotPermissiveError(decision_value)
        req = pdp_decision.request
        if req.identity_id != identity_id or req.task_id != task_id:
            raise DecisionNotPermissiveError(
                "decision was made for a different identity or task"
            )
        approved = req.requested_scope or frozenset()
        if not scope_covered_by_grants(requested_scope, identity.grants, approved):
            raise ScopeExceedsPolicyError(
                "scope not covered by registry grants plus the approved request"
            )

        ttl = self.max_ttl if ttl_seconds is None else ttl_seconds
        if not 0 < ttl <= self.max_ttl:
            raise ValueError(f"ttl must be in (0, {self.max_ttl}], got {ttl}")

        with self._lock:
            now = issued_at or self._clock()
            cred_id = credential_id or f"cred-{uuid.uuid4().hex}"
            body = credential_body(cred_id, identity_id, task_id, requested_scope, now, ttl)
            credential = Credential(
                credential_id=cred_id,
                subject=identity_id,
                task_id=task_id,
                scope=requested_scope,
                issued_at=now,
                ttl_seconds=ttl,
                signature=self._authority.private.sign(body),
            )
            self._credentials[cred_id] = credential
            self._by_task.setdefault(task_id, []).append(cred_id)
            self._ledger.append(
                actor=identity_id,
                kind=EventKind.ISSUANCE,
                payload={
                    "credential_id": cred_id,
                    "task_id": task_id,
                    "scope": scope_to_list(requested_scope),
                    "ttl_seconds": ttl,
                },
                decision_ref=getattr(pdp_decision, "assessment_id", None),
                timestamp=now,
            )
            return credential

    # -- verification -------------------------------------------------------------

    def verify_credential(
        self,
        token: str,
        system: str,
        resource: str,
        action,
        now: Optional[datetime] = None,
    ) -> CredentialVerdict:
        """Verdicts are total and mutually exclusive, in precedence order:
        bad-signature, revoked, expired, out-of-scope, valid."""
        now = now or self._clock()
        try:
            body_b64, sig_b64 = token.split(".")
            body = b64url_decode(body_b64)
            signature = b64url_decode(sig_b64)
        except Exception:
            return CredentialVerdict.BAD_SIGNATURE
        if not self._authority.verify(signature, body):
            return CredentialVerdict.BAD_SIGNATURE
        try:
            fields = parse_credential_body(body)
        except ValueError:
            return CredentialVerdict.BAD_SIGNATURE

        stored = self._credentials.get(fields["credential_id"])
        if stored is not None and stored.revoked:
            return CredentialVerdict.REVOKED
        if now >= fields["issued_at"] + timedelta(seconds=fields["ttl_seconds"]):
            return CredentialVerdict.EXPIRED
        action_value = getattr(action, "value", str(action))
        matched = any(
            entry.system == system
            and entry.action.value == action_value
            and _resource_matches(entry.resource, resource)
            for entry in fields["scope"]
        )
        if not matched:
            return CredentialVerdict.OUT_OF_SCOPE
        return CredentialVerdict.VALID

    # -- revocation --------------------------------------------------------------

    def revoke_on_completion(self, task_id: str) -> int:
        """Revoke all live credentials bound to the task. Idempotent."""
        with self._lock:
            revoked_ids = []
            for cred_id in self._by_task.get(task_id, []):
                cred = self._credentials[cred_id]
                if not cred.revoked:
                    self._credentials[cred_id] = replace(cred, revoked=True)
                    revoked_ids.append(cred_id)
            if revoked_ids:
                self._ledger.append(
                    actor=self._credentials[revoked_ids[0]].subject,
                    kind=EventKind.REVOCATION,
                    payload={
                        "task_id": task_id,
                        "credential_ids": revoked_ids,
                        "count": len(revoked_ids),
                    },
                    timestamp=self._clock(),
                )
            return len(revoked_ids)

    def revoke_for_identity(self, identity_id: str) -> int:
        """Revoke every live credential held by the identity (decommission path)."""
        with self._lock:
            revoked_ids = [
                cid
                for cid, cred in self._credentials.items()
                if cred.subject == identity_id and not cred.revoked
            ]
            for cid in revoked_ids:
                self._credentials[cid] = replace(self._credentials[cid], revoked=True)
            if revoked_ids:
                self._ledger.append(
                    actor=identity_id,
                    kind=EventKind.REVOCATION,
                    payload={"credential_ids": revoked_ids, "count": len(revoked_ids)},
                    timestamp=self._clock(),
                )
            return len(revoked_ids)

    def live_credentials(self, identity_id: Optional[str] = None) -> List[Credential]:
        now = self._clock()
        return [
            c
            for c in self._credentials.values()
            if not c.revoked
            and now < c.expires_at()
            and (identity_id is None or c.subject == identity_id)
        ]

    def all_credentials(self) -> List[Credential]:
        return list(self._credentials.values())

    def get_credential(self, credential_id: str) -> Optional[Credential]:
        return self._credentials.get(credential_id)

    # -- delegation (governance graph) ------------------------------------------------

    def record_delegation(
        self,
        delegator: str,
        delegatee: str,
        task_id: str,
        delegated_scope: Scope,
    ) -> DelegationEdge:
        with self._lock:
            now = self._clock()
            live = [
                c
                for c in self._credentials.values()
                if c.subject == delegator
                and c.task_id == task_id
                and not c.revoked
                and now < c.expires_at()
            ]
            if not live:
                raise NoLiveCredentialError(f"{delegator} holds no live credential for {task_id}")
            effective: set = set()
            for c in live:
                effective |= c.scope
            if not scope_subset(delegated_scope, effective):
                raise ScopeWideningError(
                    f"delegated scope exceeds {delegator}'s effective scope for {task_id}"
                )
            chain = self._require_keychain(delegator)
            ttl = min(self.max_ttl, max(int((c.expires_at() - now).total_seconds()) for c in live))
            edge = DelegationEdge(
                delegator=delegator,
                delegatee=delegatee,
                task_id=task_id,
                delegated_scope=frozenset(delegated_scope),
                issued_at=now,
                ttl_seconds=ttl,
                signature=b"",
            )
            edge = replace(edge, signature=chain.private.sign(edge.body_bytes()))
            self._edges.append(edge)
            self._ledger.append(
                actor=delegator,
                kind=EventKind.DELEGATION,
                payload={
                    "delegatee": delegatee,
                    "task_id": task_id,
                    "delegated_scope": scope_to_list(delegated_scope),
                    "ttl_seconds": ttl,
                },
                timestamp=now,
            )
            return edge

    def delegation_edges(self, task_id: Optional[str] = None) -> List[DelegationEdge]:
        if task_id is None:
            return list(self._edges)
        return [e for e in self._edges if e.task_id == task_id]

    def verify_delegation_chain(
        self, chain: Sequence[DelegationEdge], now: Optional[datetime] = None
    ) -> ChainVerdict:
        """Validity requires: length within bounds, every signature good, every
        link unexpired (including cascade from revoked delegator credentials),
        and monotonically non-widening scope along the chain."""
        now = now or self._clock()
        if len(chain) > self.max_delegation_depth:
            return ChainVerdict.DEPTH_EXCEEDED
        for edge in chain:
            keychain = self._workload_keys.get(edge.delegator)
            if keychain is None or not keychain.verify(edge.signature, edge.body_bytes()):
                return ChainVerdict.BROKEN_SIGNATURE
        for edge in chain:
            if now >= edge.expires_at():
                return ChainVerdict.EXPIRED_LINK
            if self._delegator_revoked(edge.delegator, edge.task_id):
                return ChainVerdict.EXPIRED_LINK
        for prev, nxt in zip(chain, chain[1:]):
            if not scope_subset(nxt.delegated_scope, prev.delegated_scope):
                return ChainVerdict.SCOPE_WIDENING
        return ChainVerdict.VALID

    def _delegator_revoked(self, delegator: str, task_id: str) -> bool:
        """Cascade rule: a delegator whose task credentials are all revoked
        expires every edge it signed for that task. Unknown (task, delegator)
        pairs are detached edges and are not cascaded."""
        creds = [
            c
            for cid in self._by_task.get(task_id, [])
            for c in [self._credentials[cid]]
            if c.subject == delegator
        ]
        return bool(creds) and all(c.revoked for c in creds)

    def export_delegations_jsonl(self) -> str:
        return "\n".join(json.dumps(e.to_dict(), sort_keys=True) for e in self._edges)

    # -- zero-standing-privilege sweep ---------------------------------------------

    def list_standing_privilege(self) -> List[StandingViolation]:
        """Every standing grant without a waiver, plus any over-TTL credential."""
        violations: List[StandingViolation] = []
        for identity in self._registry.all():
            for grant in identity.grants:
                if grant.standing and not grant.waiver_id:
                    violations.append(
                        StandingViolation(
                            identity_id=identity.id,
                            kind="standing-grant",
                            detail=f"{grant.system}:{grant.resource_pattern}",
                        )
                    )
        for cred in self._credentials.values():
            if cred.ttl_seconds > self.max_ttl and not cred.revoked:
                violations.append(
                    StandingViolation(
                        identity_id=cred.subject,
                        kind="over-ttl-credential",
                        detail=cred.credential_id,
                    )
                )
        return violations

    # -- toolset measurement ----------------------------------------------------------

    def measure_toolset(
        self, identity_id: str, session_id: str, manifest: Sequence
    ) -> ToolsetMeasurement:
        if not manifest:
            raise EmptyManifestError(f"{identity_id}/{session_id}")
        measurement = ToolsetMeasurement(
            identity_id=identity_id,
            session_id=session_id,
            manifest_digest=toolset_digest(manifest),
            tools=frozenset(_tool_id(t) for t in manifest),
            measured_at=self._clock(),
        )
        with self._lock:
            self._measurements[(identity_id, session_id)] = measurement
        return measurement

    def get_measurement(self, identity_id: str, session_id: str) -> Optional[ToolsetMeasurement]:
        return self._measurements.get((identity_id, session_id))

    def measurement_violation(self, identity_id: str, session_id: str, tool_id: str) -> bool:
        """True when the session was measured and the tool is outside the set."""
        m = self._measurements.get((identity_id, session_id))
        return m is not None and tool_id not in m.tools


def _resource_matches(pattern: str, resource: str) -> bool:
    from fnmatch import fnmatchcase

    return fnmatchcase(resource, pattern)
