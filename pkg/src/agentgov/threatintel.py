"""State-actor threat overlay: indicator ingestion, flagging, exposure reports.

Indicators arrive as a JSON Lines feed and match credentials, target systems
or identities. Matching identities gain the foreign-exposed flag; identities
whose grants touch PAM-tagged systems gain pam-adjacent. Flags only ever
tighten policy behavior: the governor applies a threshold multiplier to
flagged identities, never a loosening.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from fnmatch import fnmatchcase
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import MalformedFeedError
from .model import parse_iso, utcnow
from .registry import AgentIdentity, IdentityFlag, IdentityRegistry


class IndicatorKind(str, Enum):
    CREDENTIAL_PATTERN = "credential-pattern"
    SYSTEM_TARGET = "system-target"
    ACTOR_CAMPAIGN = "actor-campaign"


@dataclass(frozen=True)
class ThreatIndicator:
    indicator_id: str
    kind: IndicatorKind
    matcher: str
    campaign: str
    ingested_at: datetime
    expires_at: datetime

    def __post_init__(self):
        if self.expires_at <= self.ingested_at:
            raise ValueError(f"{self.indicator_id}: expires_at must be after ingested_at")


@dataclass(frozen=True)
class CredentialInventoryItem:
    """One credential-shaped thing: an issued credential or a standing grant."""

    credential_ref: str
    identity_id: str
    standing: bool
    systems: Tuple[str, ...]


@dataclass(frozen=True)
class ExposureRow:
    credential_ref: str
    identity_id: str
    standing: bool
    matched_campaigns: Tuple[str, ...]
    downstream_systems: Tuple[str, ...]


@dataclass(frozen=True)
class ExposureReport:
    rows: Tuple[ExposureRow, ...]
    total: int
    standing_count: int
    exposed_standing_count: int


class ThreatOverlay:
    def __init__(
        self,
        pam_system_tags: Iterable[str] = (),
        clock: Callable[[], datetime] = utcnow,
    ):
        self._indicators: Dict[str, ThreatIndicator] = {}
        self._pam_systems = set(pam_system_tags)
        self._clock = clock
        self._lock = threading.Lock()

    # -- ingestion ---------------------------------------------------------------

    def ingest_indicators(self, feed: str) -> int:
        """Parse a JSON Lines feed; store fresh indicators and prune expired."""
        parsed: List[ThreatIndicator] = []
        now = self._clock()
        for lineno, line in enumerate(feed.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                indicator = ThreatIndicator(
                    indicator_id=record["indicator_id"],
                    kind=IndicatorKind(record["kind"]),
                    matcher=record["matcher"],
                    campaign=record.get("campaign", ""),
                    ingested_at=now,
                    expires_at=parse_iso(record["expires_at"]),
                )
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                raise MalformedFeedError(lineno, str(exc)) from exc
            parsed.append(indicator)
        with self._lock:
            for indicator in parsed:
                self._indicators[indicator.indicator_id] = indicator
            self._prune(now)
        return len(parsed)

    def _prune(self, now: datetime) -> None:
        expired = [iid for iid, ind in self._indicators.items() if ind.expires_at <= now]
        for iid in expired:
            del self._indicators[iid]

    def active_indicators(self) -> List[ThreatIndicator]:
        now = self._clock()
        with self._lock:
            self._prune(now)
            return list(self._indicators.values())

    # -- matching ---------------------------------------------------------------

    def _matches_identity(
        self, identity: AgentIdentity, inventory: Sequence[CredentialInventoryItem]
    ) -> List[ThreatIndicator]:
        refs = [item.credential_ref for item in inventory if item.identity_id == identity.id]
        systems = {g.system for g in identity.grants} | set(identity.associated_systems)
        hits = []
        for ind in self.active_indicators():
            if ind.kind is IndicatorKind.CREDENTIAL_PATTERN:
                if any(fnmatchcase(ref, ind.matcher) for ref in refs):
                    hits.append(ind)
            elif ind.kind is IndicatorKind.SYSTEM_TARGET:
                if any(fnmatchcase(s, ind.matcher) for s in systems):
                    hits.append(ind)
            elif ind.kind is IndicatorKind.ACTOR_CAMPAIGN:
                if fnmatchcase(identity.id, ind.matcher):
                    hits.append(ind)
        return hits

    def flag_identities(
        self,
        registry: IdentityRegistry,
        inventory: Sequence[CredentialInventoryItem] = (),
    ) -> Dict[str, Set[IdentityFlag]]:
        """Write pam-adjacent / foreign-exposed flags back to the registry.

        Returns the flags newly applicable per identity (audit entries are
        appended by the registry on actual changes).
        """
        flagged: Dict[str, Set[IdentityFlag]] = {}
        for identity in registry.all():
            flags: Set[IdentityFlag] = set()
            grant_systems = {g.system for g in identity.grants}
            if grant_systems & self._pam_systems:
                flags.add(IdentityFlag.PAM_ADJACENT)
            if self._matches_identity(identity, inventory):
                flags.add(IdentityFlag.FOREIGN_EXPOSED)
            if flags:
                registry.add_flags(identity.id, flags)
                flagged[identity.id] = flags
        return flagged

    # -- exposure assessment ------------------------------------------------------

    def exposure_assessment(
        self, inventory: Sequence[CredentialInventoryItem]
    ) -> ExposureReport:
        indicators = self.active_indicators()
        rows: List[ExposureRow] = []
        for item in inventory:
            campaigns = []
            for ind in indicators:
                if ind.kind is IndicatorKind.CREDENTIAL_PATTERN and fnmatchcase(
                    item.credential_ref, ind.matcher
                ):
                    campaigns.append(ind.campaign)
                elif ind.kind is IndicatorKind.SYSTEM_TARGET and any(
                    fnmatchcase(s, ind.matcher) for s in item.systems
                ):
                    campaigns.append(ind.campaign)
                elif ind.kind is IndicatorKind.ACTOR_CAMPAIGN and fnmatchcase(
                    item.identity_id, ind.matcher
                ):
                    campaigns.append(ind.campaign)
            rows.append(
                ExposureRow(
                    credential_ref=item.credential_ref,
                    identity_id=item.identity_id,
                    standing=item.standing,
                    matched_campaigns=tuple(sorted(set(campaigns))),
                    downstream_systems=item.systems,
                )
            )
        standing = [r for r in rows if r.standing]
        return ExposureReport(
            rows=tuple(rows),
            total=len(rows),
            standing_count=len(standing),
            exposed_standing_count=sum(1 for r in standing if r.matched_campaigns),
        )
