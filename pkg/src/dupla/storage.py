"""Embedded transactional store with an append-only audit log.

SQLite keeps the artifact self-contained: entities live in one table keyed
by (kind, id) with JSON payloads, every mutation lands in the audit table
inside the same transaction, and the WAL + synchronous=FULL combination
makes acknowledged writes survive a hard kill.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator, Optional


class StorageError(Exception):
    """Raised when the store cannot be opened or written."""


class Storage:
    def __init__(self, path: str | Path):
        self._path = str(path)
        try:
            self._conn = sqlite3.connect(self._path, check_same_thread=False)
        except sqlite3.Error as exc:
            raise StorageError(f"cannot open storage at {self._path}: {exc}") from exc
        self._lock = threading.RLock()
        with self._lock:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA synchronous=FULL")
            self._conn.execute(
                """
                CREATE TABLE IF NOT EXISTS entities (
                    kind TEXT NOT NULL,
                    id   TEXT NOT NULL,
                    data TEXT NOT NULL,
                    PRIMARY KEY (kind, id)
                )
                """
            )
            self._conn.execute(
                """
                CREATE TABLE IF NOT EXISTS audit (
                    seq         INTEGER PRIMARY KEY AUTOINCREMENT,
                    ts          TEXT NOT NULL,
                    actor       TEXT NOT NULL,
                    action      TEXT NOT NULL,
                    entity_kind TEXT NOT NULL,
                    entity_id   TEXT NOT NULL
                )
                """
            )
            self._conn.commit()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def put(self, kind: str, entity_id: str, data: dict, *, actor: str, action: str) -> None:
        """Upsert one entity and its audit entry; durable once this returns."""
        payload = json.dumps(data, ensure_ascii=False, sort_keys=True)
        timestamp = datetime.now(timezone.utc).isoformat()
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT OR REPLACE INTO entities (kind, id, data) VALUES (?, ?, ?)",
                    (kind, entity_id, payload),
                )
                self._conn.execute(
                    "INSERT INTO audit (ts, actor, action, entity_kind, entity_id)"
                    " VALUES (?, ?, ?, ?, ?)",
                    (timestamp, actor, action, kind, entity_id),
                )
                self._conn.commit()
            except sqlite3.Error as exc:
                self._conn.rollback()
                raise StorageError(f"write failed for {kind}/{entity_id}: {exc}") from exc

    def get(self, kind: str, entity_id: str) -> Optional[dict]:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM entities WHERE kind = ? AND id = ?",
                (kind, entity_id),
            ).fetchone()
        return json.loads(row[0]) if row else None

    def list(self, kind: str) -> Iterator[tuple[str, dict]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id, data FROM entities WHERE kind = ? ORDER BY id", (kind,)
            ).fetchall()
        for entity_id, data in rows:
            yield entity_id, json.loads(data)

    def count(self, kind: str) -> int:
        with self._lock:
            row = self._conn.execute(
                "SELECT COUNT(*) FROM entities WHERE kind = ?", (kind,)
            ).fetchone()
        return int(row[0])

    def delete(self, kind: str, entity_id: str, *, actor: str, action: str) -> None:
        timestamp = datetime.now(timezone.utc).isoformat()
        with self._lock:
            self._conn.execute(
                "DELETE FROM entities WHERE kind = ? AND id = ?", (kind, entity_id)
            )
            self._conn.execute(
                "INSERT INTO audit (ts, actor, action, entity_kind, entity_id)"
                " VALUES (?, ?, ?, ?, ?)",
                (timestamp, actor, action, kind, entity_id),
            )
            self._conn.commit()

    def audit_log(self, limit: Optional[int] = None) -> list[dict[str, Any]]:
        query = "SELECT seq, ts, actor, action, entity_kind, entity_id FROM audit ORDER BY seq"
        if limit is not None:
            query += f" DESC LIMIT {int(limit)}"
        with self._lock:
            rows = self._conn.execute(query).fetchall()
        entries = [
            {
                "seq": seq,
                "ts": ts,
                "actor": actor,
                "action": action,
                "entity_kind": kind,
                "entity_id": entity_id,
            }
            for seq, ts, actor, action, kind, entity_id in rows
        ]
        return list(reversed(entries)) if limit is not None else entries
