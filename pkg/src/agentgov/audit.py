"""Tamper-evident, hash-chained audit ledger with accountability attribution.

Entries form a SHA3-256 hash chain: each entry hash covers the previous
entry hash plus the canonical JSON of every other field, so any single-byte
change anywhere in the ledger breaks verification at that entry. Appends are
serialized behind a lock, producing a dense, gap-free sequence; reads operate
on the immutable prefix and need no locking.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Callable, Iterable, List, Optional

from .canonical import ZERO_DIGEST, canonical_json_bytes, sha3_256
from .errors import ChainImportError, RangeOutOfBoundsError
from .model import iso, parse_iso, utcnow


class EventKind(str, Enum):
    LIFECYCLE = "lifecycle"
    ISSUANCE = "issuance"
    REVOCATION = "revocation"
    DELEGATION = "delegation"
    DECISION = "decision"
    ESCALATION_RESOLUTION = "escalation-resolution"
    CERTIFICATION = "certification"
    CONFIG_CHANGE = "config-change"


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    prev_hash: bytes
    entry_hash: bytes
    timestamp: datetime
    actor: str
    kind: EventKind
    payload: dict
    data_class: Optional[str] = None
    session: Optional[str] = None
    decision_ref: Optional[str] = None

    def body_fields(self) -> dict:
        """Every field except the hashes, in wire form. This is what gets hashed."""
        return {
            "seq": self.seq,
            "timestamp": iso(self.timestamp),
            "actor": self.actor,
            "kind": self.kind.value,
            "payload": self.payload,
            "data_class": self.data_class,
            "session": self.session,
            "decision_ref": self.decision_ref,
        }

    def compute_hash(self) -> bytes:
        return sha3_256(self.prev_hash + canonical_json_bytes(self.body_fields()))

    def to_wire(self) -> dict:
        record = self.body_fields()
        record["prev_hash"] = self.prev_hash.hex()
        record["entry_hash"] = self.entry_hash.hex()
        return record

    @classmethod
    def from_wire(cls, record: dict) -> "AuditEntry":
        return cls(
            seq=record["seq"],
            prev_hash=bytes.fromhex(record["prev_hash"]),
            entry_hash=bytes.fromhex(record["entry_hash"]),
            timestamp=parse_iso(record["timestamp"]),
            actor=record["actor"],
            kind=EventKind(record["kind"]),
            payload=record["payload"],
            data_class=record.get("data_class"),
            session=record.get("session"),
            decision_ref=record.get("decision_ref"),
        )


@dataclass(frozen=True)
class ChainVerdict:
    valid: bool
    broken_at: Optional[int] = None


@dataclass(frozen=True)
class OwnerSpan:
    owner: Optional[dict]
    start: datetime
    end: Optional[datetime]


@dataclass(frozen=True)
class Attribution:
    agent: str
    owners: List[OwnerSpan]
    model_ref: Optional[str]


class AuditLedger:
    """Append-only hash chain. No deletion, no compaction; export and archive."""

    def __init__(self, sink: Optional[Callable[[AuditEntry], None]] = None):
        self._entries: List[AuditEntry] = []
        self._lock = threading.Lock()
        self._sink = sink

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> List[AuditEntry]:
        return self._entries

    def head_hash(self) -> bytes:
        return self._entries[-1].entry_hash if self._entries else ZERO_DIGEST

    def append(
        self,
        actor: str,
        kind: EventKind,
        payload: dict,
        *,
        data_class: Optional[str] = None,
        session: Optional[str] = None,
        decision_ref: Optional[str] = None,
        timestamp: Optional[datetime] = None,
    ) -> AuditEntry:
        if not actor:
            raise ValueError("audit event requires an actor")
        with self._lock:
            prev = self.head_hash()
            entry = AuditEntry(
                seq=len(self._entries),
                prev_hash=prev,
                entry_hash=b"",
                timestamp=timestamp or utcnow(),
                actor=actor,
                kind=kind,
                payload=payload,
                data_class=data_class,
                session=session,
                decision_ref=decision_ref,
            )
            entry = replace(entry, entry_hash=entry.compute_hash())
            self._entries.append(entry)
        if self._sink is not None:
            self._sink(entry)
        return entry

    def verify_chain(self, start: int = 0, end: Optional[int] = None) -> ChainVerdict:
        """Recompute every hash in [start, end); report the first break."""
        n = len(self._entries)
        if end is None:
            end = n
        if start < 0 or end > n or start > end:
            raise RangeOutOfBoundsError(f"range [{start}, {end}) outside ledger of {n}")
        for i in range(start, end):
            entry = self._entries[i]
            if entry.seq != i:
                return ChainVerdict(False, i)
            expected_prev = ZERO_DIGEST if i == 0 else self._entries[i - 1].entry_hash
            if entry.prev_hash != expected_prev:
                return ChainVerdict(False, i)
            if entry.compute_hash() != entry.entry_hash:
                return ChainVerdict(False, i)
        return ChainVerdict(True, None)

    # -- forensic reconstruction ---------------------------------------------

    def reconstruct(
        self,
        identity: Optional[str] = None,
        session: Optional[str] = None,
        task: Optional[str] = None,
        start: Optional[datetime] = None,
        end: Optional[datetime] = None,
    ) -> tuple[List[AuditEntry], Optional[Attribution]]:
        """Sequence-ordered entries matching all given filters, plus attribution.

        Attribution resolves the designated owner from lifecycle entries at
        entry time, so an ownership change inside the window yields one span
        per owner.
        """
        if identity is None and session is None and task is None and start is None and end is None:
            raise ValueError("reconstruct requires at least one filter")

        matched = [
            e
            for e in self._entries
            if (identity is None or e.actor == identity or e.payload.get("identity") == identity)
            and (session is None or e.session == session)
            and (task is None or e.payload.get("task_id") == task)
            and (start is None or e.timestamp >= start)
            and (end is None or e.timestamp <= end)
        ]

        subject = identity
        if subject is None:
            actors = {e.actor for e in matched if e.kind != EventKind.CONFIG_CHANGE}
            subject = actors.pop() if len(actors) == 1 else None
        if subject is None or not matched:
            return matched, None
        return matched, self._attribution(subject, matched)

    def _attribution(self, identity: str, matched: List[AuditEntry]) -> Attribution:
        timeline: List[tuple[datetime, Optional[dict]]] = []
        model_ref: Optional[str] = None
        for e in self._entries:
            if e.kind != EventKind.LIFECYCLE:
                continue
            if e.actor != identity and e.payload.get("identity") != identity:
                continue
            if "owner" in e.payload:
                timeline.append((e.timestamp, e.payload["owner"]))
            if e.payload.get("aibom_ref"):
                model_ref = e.payload["aibom_ref"]

        lo = min(e.timestamp for e in matched)
        hi = max(e.timestamp for e in matched)
        spans: List[OwnerSpan] = []
        for idx, (at, owner) in enumerate(timeline):
            span_start = at
            span_end = timeline[idx + 1][0] if idx + 1 < len(timeline) else None
            if span_end is not None and span_end < lo:
                continue
            if span_start > hi:
                continue
            spans.append(
                OwnerSpan(owner=owner, start=max(span_start, lo), end=(
                    min(span_end, hi) if span_end is not None else hi
                ))
            )
        return Attribution(agent=identity, owners=spans, model_ref=model_ref)

    # -- export / import --------------------------------------------------------

    def export_jsonl(self) -> str:
        return "\n".join(json.dumps(e.to_wire(), sort_keys=True) for e in self._entries)

    def export_lines(self) -> Iterable[str]:
        for e in self._entries:
            yield json.dumps(e.to_wire(), sort_keys=True)

    @classmethod
    def import_jsonl(cls, text: str, sink=None, verify: bool = True) -> "AuditLedger":
        """Parse an exported ledger. With verify (the default), a broken chain
        is rejected; verify=False loads as-is so the caller can locate the break."""
        ledger = cls(sink=sink)
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                entry = AuditEntry.from_wire(record)
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ChainImportError(f"unparseable ledger line: {exc}") from exc
            ledger._entries.append(entry)
        if verify:
            verdict = ledger.verify_chain()
            if not verdict.valid:
                raise ChainImportError(f"imported chain broken at {verdict.broken_at}")
        return ledger
