"""On-disk job persistence: records, progress events, checkpoints.

Everything is plain JSON under <home>/jobs/<job_id>/. Record and
checkpoint writes are atomic (temp file + rename), and mutations hit disk
before any API response is sent.
"""

import json
import os
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

STATUSES = ("created", "running", "completed", "cancelled", "failed")

LEGAL_TRANSITIONS = {
    ("created", "running"),
    ("running", "completed"),
    ("running", "cancelled"),
    ("running", "failed"),
    ("cancelled", "running"),
    ("failed", "running"),
}


class JobError(Exception):
    pass


class UnknownJob(JobError):
    pass


class IllegalTransition(JobError):
    pass


@dataclass
class JobRecord:
    job_id: str
    config: dict
    status: str = "created"
    created_at: float = 0.0
    started_at: float | None = None
    ended_at: float | None = None
    progress: dict | None = None  # latest ProgressEvent
    checkpoint_path: str | None = None
    error: str | None = None
    status_history: list = field(default_factory=list)  # [from, to, timestamp]

    def to_dict(self):
        return {
            "job_id": self.job_id,
            "config": self.config,
            "status": self.status,
            "created_at": self.created_at,
            "started_at": self.started_at,
            "ended_at": self.ended_at,
            "progress": self.progress,
            "checkpoint_path": self.checkpoint_path,
            "error": self.error,
            "status_history": self.status_history,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def atomic_write_json(path, payload):
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}-{uuid.uuid4().hex[:6]}")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class JobStore:
    def __init__(self, home):
        self.home = Path(home)
        self.jobs_dir = self.home / "jobs"
        self.jobs_dir.mkdir(parents=True, exist_ok=True)

    def job_dir(self, job_id):
        return self.jobs_dir / job_id

    def new_job_id(self):
        return time.strftime("%Y%m%d") + "-" + uuid.uuid4().hex[:10]

    def create(self, config_doc):
        job_id = self.new_job_id()
        record = JobRecord(
            job_id=job_id, config=config_doc, status="created", created_at=time.time()
        )
        d = self.job_dir(job_id)
        d.mkdir(parents=True)
        self.write_record(record)
        return record

    def write_record(self, record):
        atomic_write_json(self.job_dir(record.job_id) / "record.json", record.to_dict())

    def read_record(self, job_id):
        path = self.job_dir(job_id) / "record.json"
        if not path.exists():
            raise UnknownJob(job_id)
        with open(path, encoding="utf-8") as fh:
            return JobRecord.from_dict(json.load(fh))

    def list_records(self):
        out = []
        for d in sorted(self.jobs_dir.iterdir()):
            if (d / "record.json").exists():
                out.append(self.read_record(d.name))
        return out

    def transition(self, record, new_status):
        """Apply and persist a status transition; rejects illegal ones."""
        if (record.status, new_status) not in LEGAL_TRANSITIONS:
            raise IllegalTransition(
                f"job {record.job_id}: cannot go {record.status} -> {new_status}"
            )
        now = time.time()
        record.status_history.append([record.status, new_status, now])
        record.status = new_status
        if new_status == "running" and record.started_at is None:
            record.started_at = now
        if new_status in ("completed", "cancelled", "failed"):
            record.ended_at = now
        self.write_record(record)
        return record

    # -- progress events ---------------------------------------------------

    def events_path(self, job_id):
        return self.job_dir(job_id) / "events.jsonl"

    def append_event(self, job_id, event):
        with open(self.events_path(job_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def read_events(self, job_id):
        path = self.events_path(job_id)
        if not path.exists():
            return []
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def clear_events(self, job_id):
        path = self.events_path(job_id)
        if path.exists():
            path.unlink()

    # -- checkpoints -------------------------------------------------------

    def checkpoint_path(self, job_id):
        return self.job_dir(job_id) / "checkpoint.json"

    def write_checkpoint(self, job_id, state):
        atomic_write_json(self.checkpoint_path(job_id), state)

    def read_checkpoint(self, job_id):
        """Returns the persisted state or None; corrupt files raise."""
        path = self.checkpoint_path(job_id)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def clear_checkpoint(self, job_id):
        path = self.checkpoint_path(job_id)
        if path.exists():
            path.unlink()

    # -- results -----------------------------------------------------------

    def write_result(self, job_id, payload):
        atomic_write_json(self.job_dir(job_id) / "result.json", payload)

    def read_result(self, job_id):
        path = self.job_dir(job_id) / "result.json"
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def delete(self, job_id):
        import shutil

        shutil.rmtree(self.job_dir(job_id), ignore_errors=True)
