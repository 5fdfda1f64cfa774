"""Embedded file-backed store for service state.

One append-only JSONL log plus a snapshot file covers every namespace
(accounts, profiles, chat history, tests, token blacklist). Each put is
flushed on write, so state survives process restarts byte-for-byte.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path


class NamespaceStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._log_path = self.root / "state.log.jsonl"
        self._snapshot_path = self.root / "state.snapshot.json"
        self._lock = threading.RLock()
        self._data: dict[str, dict[str, object]] = {}
        self._replay()

    def _replay(self):
        if self._snapshot_path.exists():
            self._data = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
        if self._log_path.exists():
            with open(self._log_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    entry = json.loads(line)
                    ns = self._data.setdefault(entry["ns"], {})
                    if entry.get("deleted"):
                        ns.pop(entry["key"], None)
                    else:
                        ns[entry["key"]] = entry["value"]

    def _append(self, record: dict):
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def put(self, ns: str, key: str, value) -> None:
        with self._lock:
            self._data.setdefault(ns, {})[key] = value
            self._append({"ns": ns, "key": key, "value": value})

    def get(self, ns: str, key: str, default=None):
        with self._lock:
            return self._data.get(ns, {}).get(key, default)

    def delete(self, ns: str, key: str) -> bool:
        with self._lock:
            existed = key in self._data.get(ns, {})
            if existed:
                del self._data[ns][key]
                self._append({"ns": ns, "key": key, "deleted": True})
            return existed

    def keys(self, ns: str) -> list[str]:
        with self._lock:
            return list(self._data.get(ns, {}))

    def items(self, ns: str) -> list[tuple[str, object]]:
        with self._lock:
            return list(self._data.get(ns, {}).items())

    def snapshot(self) -> None:
        """Collapse the log into the snapshot file."""
        with self._lock:
            tmp = self._snapshot_path.with_suffix(".tmp")
            tmp.write_text(json.dumps(self._data, ensure_ascii=False), encoding="utf-8")
            tmp.replace(self._snapshot_path)
            self._log_path.unlink(missing_ok=True)
