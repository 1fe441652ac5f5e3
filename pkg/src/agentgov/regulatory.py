"""Cross-jurisdictional obligation matrix, conflict registry, deployment tiering.

The obligation matrix is data, not code: the bundled dataset maps each
governance domain (I..VI) to its EU, US and CN obligations and a per-domain
conflict level. Added jurisdictions are dataset edits carried in the
``other:<tag>`` jurisdiction form. Regulatory velocity is tracked as dataset
versioning with a changelog, not a feed client.
"""

from __future__ import annotations

import csv
import io
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Union

from .errors import (
    EmptyJurisdictionsError,
    MalformedDatasetError,
    ManagedWithoutApproachError,
)
from .model import iso, parse_iso, utcnow

MIGT_DOMAINS = ("I", "II", "III", "IV", "V", "VI")
CORE_JURISDICTIONS = ("EU", "US", "CN")


class ConflictLevel(str, Enum):
    LOW = "LOW"
    MODERATE = "MODERATE"
    HIGH = "HIGH"

    @property
    def rank(self) -> int:
        return {"LOW": 0, "MODERATE": 1, "HIGH": 2}[self.value]


class DeploymentTier(str, Enum):
    SINGLE = "single"
    DUAL = "dual"
    TRI_PLUS = "tri-plus"


def validate_jurisdiction(tag: str) -> str:
    if tag in CORE_JURISDICTIONS or tag.startswith("other:"):
        return tag
    raise MalformedDatasetError(f"unknown jurisdiction {tag!r} (use EU, US, CN or other:<tag>)")


@dataclass(frozen=True)
class ObligationRow:
    migt_domain: str
    jurisdiction: str
    obligation: str
    citations: tuple
    conflict_level: ConflictLevel  # shared across the domain's row triplet


@dataclass
class ConflictEntry:
    conflict_id: str
    domains: List[str]
    jurisdictions: List[str]
    description: str
    management_approach: str = ""
    residual_risk: str = ""
    status: str = "open"  # open | managed | closed
    opened_at: Optional[datetime] = None

    def validate(self) -> None:
        if self.status not in ("open", "managed", "closed"):
            raise ValueError(f"unknown status {self.status}")
        if self.status == "managed" and not self.management_approach.strip():
            raise ManagedWithoutApproachError(self.conflict_id)
        for d in self.domains:
            if d not in MIGT_DOMAINS:
                raise ValueError(f"unknown governance domain {d}")
        for j in self.jurisdictions:
            validate_jurisdiction(j)

    def to_dict(self) -> dict:
        return {
            "conflict_id": self.conflict_id,
            "domains": self.domains,
            "jurisdictions": self.jurisdictions,
            "description": self.description,
            "management_approach": self.management_approach,
            "residual_risk": self.residual_risk,
            "status": self.status,
            "opened_at": iso(self.opened_at) if self.opened_at else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConflictEntry":
        return cls(
            conflict_id=data["conflict_id"],
            domains=list(data["domains"]),
            jurisdictions=list(data["jurisdictions"]),
            description=data.get("description", ""),
            management_approach=data.get("management_approach", ""),
            residual_risk=data.get("residual_risk", ""),
            status=data.get("status", "open"),
            opened_at=parse_iso(data["opened_at"]) if data.get("opened_at") else None,
        )


@dataclass(frozen=True)
class TieringResult:
    tier: DeploymentTier
    domain_conflicts: Dict[str, ConflictLevel]
    max_conflict: ConflictLevel
    requires_conflict_registry: bool


class ObligationMatrix:
    """Queryable view over one loaded dataset. Immutable after load."""

    def __init__(self, data: dict):
        self._data = data
        self._rows: List[ObligationRow] = []
        self._levels: Dict[str, ConflictLevel] = {}
        try:
            for domain_block in data["domains"]:
                domain = domain_block["domain"]
                if domain not in MIGT_DOMAINS:
                    raise MalformedDatasetError(f"unknown domain {domain!r}")
                level = ConflictLevel(domain_block["conflict_level"])
                if domain in self._levels:
                    raise MalformedDatasetError(f"duplicate domain {domain}")
                self._levels[domain] = level
                for ob in domain_block["obligations"]:
                    jurisdiction = validate_jurisdiction(ob["jurisdiction"])
                    self._rows.append(
                        ObligationRow(
                            migt_domain=domain,
                            jurisdiction=jurisdiction,
                            obligation=ob["obligation"],
                            citations=tuple(ob.get("citations", [])),
                            conflict_level=level,
                        )
                    )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MalformedDatasetError):
                raise
            raise MalformedDatasetError(str(exc)) from exc
        missing = set(MIGT_DOMAINS) - set(self._levels)
        if missing:
            raise MalformedDatasetError(f"dataset missing domains {sorted(missing)}")

    @property
    def version(self) -> str:
        return self._data.get("version", "")

    @property
    def changelog(self) -> List[str]:
        return list(self._data.get("changelog", []))

    def conflict_level(self, domain: str) -> ConflictLevel:
        if domain not in self._levels:
            raise MalformedDatasetError(f"unknown domain {domain!r}")
        return self._levels[domain]

    def conflict_levels(self) -> Dict[str, ConflictLevel]:
        return dict(self._levels)

    def applicable_obligations(
        self, jurisdictions: Iterable[str], domain: Optional[str] = None
    ) -> List[ObligationRow]:
        wanted = set(jurisdictions)
        rows = [
            r
            for r in self._rows
            if r.jurisdiction in wanted and (domain is None or r.migt_domain == domain)
        ]
        order = {d: i for i, d in enumerate(MIGT_DOMAINS)}
        return sorted(rows, key=lambda r: (order[r.migt_domain], r.jurisdiction))

    def rows(self) -> List[ObligationRow]:
        return list(self._rows)

    def export_json(self) -> str:
        """Byte-identical to the bundled dataset formatting."""
        return dump_dataset(self._data)

    def export_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["domain", "jurisdiction", "obligation", "conflict_level", "citations"])
        for r in self._rows:
            writer.writerow(
                [r.migt_domain, r.jurisdiction, r.obligation, r.conflict_level.value,
                 "; ".join(r.citations)]
            )
        return out.getvalue()


def dump_dataset(data: dict) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def bundled_dataset_text() -> str:
    return (
        resources.files("agentgov").joinpath("data/regulatory_matrix.json").read_text("utf-8")
    )


def load_matrix(source: Union[None, str, Path, dict] = None) -> ObligationMatrix:
    """Load the bundled dataset (default), a file path, or an in-memory dict."""
    if source is None:
        text = bundled_dataset_text()
        data = json.loads(text)
    elif isinstance(source, dict):
        data = source
    else:
        try:
            data = json.loads(Path(source).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedDatasetError(str(exc)) from exc
    if not isinstance(data, dict) or "domains" not in data:
        raise MalformedDatasetError("dataset must be an object with a 'domains' list")
    return ObligationMatrix(data)


class ConflictRegistry:
    """Human-authored registry of identified cross-jurisdictional conflicts."""

    def __init__(self, clock: Callable[[], datetime] = utcnow):
        self._entries: Dict[str, ConflictEntry] = {}
        self._order: List[str] = []
        self._clock = clock
        self._lock = threading.Lock()

    def register_conflict(self, entry: ConflictEntry) -> ConflictEntry:
        entry.validate()
        with self._lock:
            if entry.opened_at is None:
                entry.opened_at = self._clock()
            if entry.conflict_id not in self._entries:
                self._order.append(entry.conflict_id)
            self._entries[entry.conflict_id] = entry
            return entry

    def set_status(
        self, conflict_id: str, status: str, management_approach: Optional[str] = None
    ) -> ConflictEntry:
        with self._lock:
            entry = self._entries[conflict_id]
            if management_approach is not None:
                entry.management_approach = management_approach
            entry.status = status
            entry.validate()
            return entry

    def get(self, conflict_id: str) -> Optional[ConflictEntry]:
        return self._entries.get(conflict_id)

    def open_conflicts(self) -> List[ConflictEntry]:
        """Open entries, oldest first."""
        entries = [self._entries[cid] for cid in self._order if self._entries[cid].status == "open"]
        return sorted(entries, key=lambda e: (e.opened_at or utcnow()))

    def by_status(self, status: str) -> List[ConflictEntry]:
        return [self._entries[cid] for cid in self._order if self._entries[cid].status == status]

    def all(self) -> List[ConflictEntry]:
        return [self._entries[cid] for cid in self._order]

    def export_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.all()], indent=2, ensure_ascii=False)

    def load_json(self, text: str) -> int:
        entries = json.loads(text)
        for data in entries:
            self.register_conflict(ConflictEntry.from_dict(data))
        return len(entries)


def tier_deployment(
    jurisdictions: Iterable[str],
    matrix: ObligationMatrix,
    domains_in_use: Optional[Sequence[str]] = None,
) -> TieringResult:
    """Classify a deployment by jurisdictional exposure and attach the conflict
    profile of the domains it exercises. Tri-plus deployments touching any
    HIGH-conflict domain must be linked to the conflict registry."""
    wanted = {validate_jurisdiction(j) for j in jurisdictions}
    if not wanted:
        raise EmptyJurisdictionsError("deployment needs at least one jurisdiction")
    if len(wanted) == 1:
        tier = DeploymentTier.SINGLE
    elif len(wanted) == 2:
        tier = DeploymentTier.DUAL
    else:
        tier = DeploymentTier.TRI_PLUS
    domains = list(domains_in_use) if domains_in_use is not None else list(MIGT_DOMAINS)
    conflicts = {d: matrix.conflict_level(d) for d in domains}
    max_conflict = max(conflicts.values(), key=lambda lv: lv.rank) if conflicts else ConflictLevel.LOW
    requires_registry = tier is DeploymentTier.TRI_PLUS and max_conflict is ConflictLevel.HIGH
    return TieringResult(
        tier=tier,
        domain_conflicts=conflicts,
        max_conflict=max_conflict,
        requires_conflict_registry=requires_registry,
    )
