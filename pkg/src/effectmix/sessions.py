"""File-backed session store with per-id write serialization.

Each session lives in one JSON file carrying a revision counter.
Writers do compare-and-swap on the revision: when two callers race to
advance the same session, exactly one wins and the other gets a
ConflictError. The interface is small so a database can replace it.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path

from .elicitation import ElicitationSession, session_from_json, session_to_json


class SessionNotFoundError(KeyError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"no session with id {session_id!r}")


class ConflictError(RuntimeError):
    """Concurrent write lost the compare-and-swap race; reload and retry."""


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        if not session_id or any(c in session_id for c in "/\\."):
            raise SessionNotFoundError(session_id)
        return self.root / f"{session_id}.json"

    def save(self, session: ElicitationSession, expected_revision: int | None = None) -> int:
        """Persist the session; returns the new revision.

        expected_revision None means "create or overwrite-from-latest is
        fine" for fresh sessions; pass the revision from load() when the
        write must be conditional.
        """
        path = self._path(session.id)
        with self._lock:
            current = self._read_revision(path)
            if expected_revision is not None and current != expected_revision:
                raise ConflictError(
                    f"session {session.id!r} is at revision {current}, "
                    f"expected {expected_revision}"
                )
            revision = (current or 0) + 1
            doc = {"revision": revision, "session": session_to_json(session)}
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            try:
                with os.fdopen(fd, "w") as fh:
                    json.dump(doc, fh)
                os.replace(tmp, path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
            return revision

    def load(self, session_id: str) -> tuple[ElicitationSession, int]:
        path = self._path(session_id)
        if not path.exists():
            raise SessionNotFoundError(session_id)
        with open(path) as fh:
            doc = json.load(fh)
        return session_from_json(doc["session"]), doc["revision"]

    def _read_revision(self, path: Path) -> int | None:
        if not path.exists():
            return None
        with open(path) as fh:
            return json.load(fh)["revision"]

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))
