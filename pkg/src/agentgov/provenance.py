"""Model provenance: AIBOM registration, integrity verification, deployment gate.

Each deployed model carries a bill of materials with a SHA3-256 parameter
digest. Artifacts are hashed in fixed 64 KiB units so very large (or sparse)
files verify without memory pressure. Registering an agent identity is gated
on its referenced AIBOM existing, its last integrity check matching, and GPAI
documentation where applicable.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import BinaryIO, Callable, Dict, Iterable, List, Optional, Tuple, Union

from .audit import AuditLedger, EventKind
from .canonical import digest_stream
from .errors import GpaiDocMissingError, MissingDigestError
from .model import iso, utcnow

READ_UNIT = 64 * 1024


class IntegrityVerdict(str, Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    UNKNOWN_MODEL = "unknown-model"


@dataclass
class AibomRecord:
    model_id: str
    architecture: str
    training_data_sources: List[dict] = field(default_factory=list)  # {source, governance_status}
    fine_tuning_history: List[str] = field(default_factory=list)
    dependencies: List[dict] = field(default_factory=list)  # {name, version}
    modification_records: List[str] = field(default_factory=list)
    parameter_digest: str = ""
    gpai: bool = False
    gpai_doc_ref: Optional[str] = None

    def validate(self) -> None:
        if not self.parameter_digest:
            raise MissingDigestError(self.model_id)
        if self.gpai and not self.gpai_doc_ref:
            raise GpaiDocMissingError(self.model_id)

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "architecture": self.architecture,
            "training_data_sources": self.training_data_sources,
            "fine_tuning_history": self.fine_tuning_history,
            "dependencies": self.dependencies,
            "modification_records": self.modification_records,
            "parameter_digest": self.parameter_digest,
            "gpai": self.gpai,
            "gpai_doc_ref": self.gpai_doc_ref,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AibomRecord":
        return cls(
            model_id=data["model_id"],
            architecture=data.get("architecture", ""),
            training_data_sources=data.get("training_data_sources", []),
            fine_tuning_history=data.get("fine_tuning_history", []),
            dependencies=data.get("dependencies", []),
            modification_records=data.get("modification_records", []),
            parameter_digest=data.get("parameter_digest", ""),
            gpai=data.get("gpai", False),
            gpai_doc_ref=data.get("gpai_doc_ref"),
        )


class ProvenanceStore:
    """AIBOM registry with full supersession history per model id."""

    def __init__(self, ledger: AuditLedger, clock: Callable[[], datetime] = utcnow):
        self._ledger = ledger
        self._clock = clock
        self._records: Dict[str, AibomRecord] = {}
        self._history: Dict[str, List[AibomRecord]] = {}
        self._last_check: Dict[str, Tuple[IntegrityVerdict, datetime]] = {}
        self._lock = threading.Lock()

    def register_aibom(self, record: AibomRecord) -> AibomRecord:
        record.validate()
        with self._lock:
            now = self._clock()
            previous = self._records.get(record.model_id)
            if previous is not None:
                record.modification_records = previous.modification_records + [
                    f"superseded {previous.parameter_digest} at {iso(now)}"
                ]
                self._history.setdefault(record.model_id, []).append(previous)
            self._records[record.model_id] = record
            self._ledger.append(
                actor=f"model:{record.model_id}",
                kind=EventKind.CONFIG_CHANGE,
                payload={
                    "event": "aibom-registered",
                    "model_id": record.model_id,
                    "parameter_digest": record.parameter_digest,
                    "gpai": record.gpai,
                    "superseded": previous.parameter_digest if previous else None,
                },
                timestamp=now,
            )
            return record

    def get(self, model_id: str) -> Optional[AibomRecord]:
        return self._records.get(model_id)

    def find_by_digest(self, digest: str) -> Optional[AibomRecord]:
        for record in self._records.values():
            if record.parameter_digest == digest:
                return record
        return None

    def history(self, model_id: str) -> List[AibomRecord]:
        return list(self._history.get(model_id, []))

    def records(self) -> List[AibomRecord]:
        return list(self._records.values())

    def last_check(self, model_id: str) -> Optional[Tuple[IntegrityVerdict, datetime]]:
        return self._last_check.get(model_id)

    def set_last_check(self, model_id: str, verdict: IntegrityVerdict, at: datetime) -> None:
        """Install a recorded check result (state restore path)."""
        with self._lock:
            self._last_check[model_id] = (verdict, at)

    # -- integrity -------------------------------------------------------------

    def verify_model_integrity(
        self, model_id: str, artifact: Union[BinaryIO, Iterable[bytes]]
    ) -> IntegrityVerdict:
        record = self._records.get(model_id)
        if record is None:
            return IntegrityVerdict.UNKNOWN_MODEL
        digest = digest_stream(_chunks(artifact))
        verdict = (
            IntegrityVerdict.MATCH
            if digest == record.parameter_digest
            else IntegrityVerdict.MISMATCH
        )
        with self._lock:
            self._last_check[model_id] = (verdict, self._clock())
        return verdict

    # -- deployment gate ------------------------------------------------------------

    def deployment_gate(self, identity_spec) -> Tuple[bool, List[str]]:
        """Gate for provisioning agent identities: AIBOM on file, verified, documented."""
        reasons: List[str] = []
        digest = getattr(identity_spec, "aibom_ref", None)
        if not digest:
            return False, ["no-aibom"]
        record = self.find_by_digest(digest)
        if record is None:
            return False, ["no-aibom"]
        check = self._last_check.get(record.model_id)
        if check is None:
            reasons.append("integrity-unverified")
        elif check[0] is not IntegrityVerdict.MATCH:
            reasons.append("integrity")
        if record.gpai and not record.gpai_doc_ref:
            reasons.append("gpai-doc")
        return (not reasons), reasons


def _chunks(artifact: Union[BinaryIO, Iterable[bytes]]) -> Iterable[bytes]:
    if hasattr(artifact, "read"):
        while True:
            chunk = artifact.read(READ_UNIT)
            if not chunk:
                break
            yield chunk
    else:
        yield from artifact
