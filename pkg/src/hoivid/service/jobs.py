"""FIFO job execution with monotone status transitions.

One inference job runs at a time (a single worker thread), which keeps
output determinism trivial. The store is the only mutable shared state and
guards every transition.
"""

from __future__ import annotations

import queue
import threading
import traceback
import uuid
from dataclasses import dataclass, field

_ORDER = {"queued": 0, "running": 1, "done": 2, "failed": 2}
VALID_KINDS = ("infer", "rasterize")


class JobStateError(RuntimeError):
    pass


@dataclass
class JobRecord:
    job_id: str
    kind: str
    input_hash: str = ""
    status: str = "queued"
    output_path: str | None = None
    error: str | None = None
    result: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "status": self.status,
            "input_hash": self.input_hash,
            "output_path": self.output_path,
            "error": self.error,
            **self.result,
        }


class JobStore:
    def __init__(self):
        self._jobs: dict[str, JobRecord] = {}
        self._lock = threading.Lock()

    def create(self, kind: str, input_hash: str = "") -> JobRecord:
        if kind not in VALID_KINDS:
            raise JobStateError(f"unknown job kind {kind!r}")
        record = JobRecord(job_id=uuid.uuid4().hex[:12], kind=kind, input_hash=input_hash)
        with self._lock:
            self._jobs[record.job_id] = record
        return record

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            return self._jobs.get(job_id)

    def transition(self, job_id: str, status: str, **updates) -> JobRecord:
        with self._lock:
            record = self._jobs[job_id]
            if _ORDER[status] < _ORDER[record.status] or (
                record.status in ("done", "failed") and status != record.status
            ):
                raise JobStateError(
                    f"illegal transition {record.status} -> {status} for {job_id}"
                )
            record.status = status
            for key, value in updates.items():
                setattr(record, key, value)
            return record


class JobQueue:
    """Single background worker draining a FIFO of callables."""

    def __init__(self, store: JobStore):
        self.store = store
        self._queue: queue.Queue = queue.Queue()
        self._worker = threading.Thread(target=self._run, daemon=True)
        self._worker.start()

    def submit(self, kind: str, fn, input_hash: str = "") -> JobRecord:
        record = self.store.create(kind, input_hash)
        self._queue.put((record.job_id, fn))
        return record

    def _run(self):
        while True:
            job_id, fn = self._queue.get()
            try:
                self.store.transition(job_id, "running")
                result = fn() or {}
                self.store.transition(
                    job_id, "done",
                    output_path=result.get("output_path"),
                    result={k: v for k, v in result.items() if k != "output_path"},
                )
            except Exception as err:
                self.store.transition(
                    job_id, "failed",
                    error=f"{err}\n{traceback.format_exc(limit=3)}",
                )
            finally:
                self._queue.task_done()

    def wait_idle(self):
        self._queue.join()
