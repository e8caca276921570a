"""Embedded store: transactional writes, audit trail, crash consistency."""

import os
import signal
import subprocess
import sys
import textwrap
import time

import pytest

from dupla.storage import Storage, StorageError


class TestBasics:
    def test_put_get_roundtrip(self, tmp_path):
        storage = Storage(tmp_path / "s.db")
        storage.put("document", "d1", {"text": "olá"}, actor="mgr", action="import")
        assert storage.get("document", "d1") == {"text": "olá"}
        assert storage.get("document", "missing") is None

    def test_list_sorted(self, tmp_path):
        storage = Storage(tmp_path / "s.db")
        for key in ("b", "a", "c"):
            storage.put("thing", key, {"k": key}, actor="x", action="put")
        assert [k for k, _ in storage.list("thing")] == ["a", "b", "c"]

    def test_count(self, tmp_path):
        storage = Storage(tmp_path / "s.db")
        assert storage.count("thing") == 0
        storage.put("thing", "a", {}, actor="x", action="put")
        assert storage.count("thing") == 1

    def test_survives_reopen(self, tmp_path):
        path = tmp_path / "s.db"
        storage = Storage(path)
        storage.put("document", "d1", {"n": 1}, actor="x", action="put")
        storage.close()
        assert Storage(path).get("document", "d1") == {"n": 1}

    def test_unopenable_path_raises(self, tmp_path):
        with pytest.raises(StorageError):
            Storage(tmp_path / "nodir" / "s.db")


class TestAuditLog:
    def test_every_write_audited(self, tmp_path):
        storage = Storage(tmp_path / "s.db")
        storage.put("document", "d1", {}, actor="mgr", action="import")
        storage.put("document", "d1", {}, actor="mgr", action="review")
        storage.delete("document", "d1", actor="mgr", action="purge")
        log = storage.audit_log()
        assert [(e["action"], e["entity_id"]) for e in log] == [
            ("import", "d1"),
            ("review", "d1"),
            ("purge", "d1"),
        ]
        # Sequence numbers are append-only and strictly increasing.
        seqs = [e["seq"] for e in log]
        assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)

    def test_limit_returns_tail(self, tmp_path):
        storage = Storage(tmp_path / "s.db")
        for i in range(5):
            storage.put("thing", str(i), {}, actor="x", action=f"put{i}")
        tail = storage.audit_log(limit=2)
        assert [e["action"] for e in tail] == ["put3", "put4"]


CRASH_WRITER = textwrap.dedent(
    """
    import sys
    from dupla.storage import Storage

    storage = Storage(sys.argv[1])
    i = 0
    while True:
        i += 1
        storage.put("item", f"k{i}", {"n": i}, actor="writer", action="put")
        print(i, flush=True)
    """
)


class TestCrashConsistency:
    def test_acknowledged_writes_survive_sigkill(self, tmp_path):
        """Kill the writer mid-stream; every acked write must be readable."""
        db = str(tmp_path / "crash.db")
        script = tmp_path / "writer.py"
        script.write_text(CRASH_WRITER, encoding="utf-8")
        proc = subprocess.Popen(
            [sys.executable, str(script), db],
            stdout=subprocess.PIPE,
            text=True,
        )
        acked = 0
        deadline = time.time() + 15
        try:
            while acked < 25 and time.time() < deadline:
                line = proc.stdout.readline()
                if line.strip().isdigit():
                    acked = int(line)
            os.kill(proc.pid, signal.SIGKILL)
        finally:
            proc.wait(timeout=10)
        assert acked >= 25, "writer failed to make progress"
        storage = Storage(db)
        for i in range(1, acked + 1):
            assert storage.get("item", f"k{i}") == {"n": i}, f"acked write k{i} lost"
