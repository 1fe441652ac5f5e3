"""Append-only persistence for the control plane.

Two files live in the data directory:

* ``journal.jsonl`` — every mutating command with its resolved parameters
  (generated ids, timestamps, key material), appended after the command
  succeeds. Rebuild-on-start replays this journal with the clock frozen to
  each command's recorded timestamp, which regenerates identical state and
  an identical audit chain.
* ``ledger.jsonl`` — the audit ledger, one entry per line, written as entries
  are appended. On start the regenerated chain is cross-checked against this
  file; a divergence means the stored trail was tampered with or torn.

Snapshots are archival exports (registry, delegations, ledger) written on
demand; the journal remains the rebuild source.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator, List, Optional


class DataStore:
    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.journal_path = self.root / "journal.jsonl"
        self.ledger_path = self.root / "ledger.jsonl"
        self._journal_file = None
        self._ledger_file = None

    # -- journal -----------------------------------------------------------------

    def journal_records(self) -> List[dict]:
        if not self.journal_path.exists():
            return []
        records = []
        with open(self.journal_path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    def append_journal(self, record: dict) -> None:
        if self._journal_file is None:
            self._journal_file = open(self.journal_path, "a", encoding="utf-8")
        self._journal_file.write(json.dumps(record, sort_keys=True) + "\n")
        self._journal_file.flush()

    # -- ledger mirror --------------------------------------------------------------

    def ledger_lines(self) -> List[str]:
        if not self.ledger_path.exists():
            return []
        with open(self.ledger_path, "r", encoding="utf-8") as f:
            return [line.strip() for line in f if line.strip()]

    def append_ledger_line(self, line: str) -> None:
        if self._ledger_file is None:
            self._ledger_file = open(self.ledger_path, "a", encoding="utf-8")
        self._ledger_file.write(line + "\n")
        self._ledger_file.flush()

    def reset_ledger_mirror(self, lines: List[str]) -> None:
        """Rewrite the mirror to match regenerated state (crash recovery)."""
        if self._ledger_file is not None:
            self._ledger_file.close()
            self._ledger_file = None
        tmp = self.ledger_path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as f:
            for line in lines:
                f.write(line + "\n")
        os.replace(tmp, self.ledger_path)

    def close(self) -> None:
        if self._journal_file is not None:
            self._journal_file.close()
            self._journal_file = None
        if self._ledger_file is not None:
            self._ledger_file.close()
            self._ledger_file = None
