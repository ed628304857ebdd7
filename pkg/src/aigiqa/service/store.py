"""Append-only, durable store of rating events.

Events are written as one JSON line each and fsynced before the submission is
acknowledged, so an acknowledged rating survives a process crash. The
in-memory index is rebuilt from the log on startup; the log itself is the
source of truth and doubles as the audit trail behind every MOS label.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict
from pathlib import Path

from ..subjective import RatingEvent


class DuplicateRatingError(ValueError):
    """The (evaluator, image) pair already has a stored rating."""


class RatingStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._events: list[RatingEvent] = []
        self._by_pair: dict[tuple[str, str], RatingEvent] = {}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists():
            self._replay()
        self._fh = open(self.path, "a", encoding="utf-8")

    def _replay(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = RatingEvent(**json.loads(line))
                self._index(event)

    def _index(self, event: RatingEvent) -> None:
        key = (event.evaluator_id, event.image_id)
        if key in self._by_pair:
            raise DuplicateRatingError(
                f"evaluator {event.evaluator_id!r} already rated image {event.image_id!r}"
            )
        self._by_pair[key] = event
        self._events.append(event)

    def append(self, event: RatingEvent) -> None:
        """Index and durably persist one event; duplicates are rejected whole."""
        with self._lock:
            self._index(event)
            self._fh.write(json.dumps(asdict(event)) + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def has(self, evaluator_id: str, image_id: str) -> bool:
        return (evaluator_id, image_id) in self._by_pair

    def events(self) -> list[RatingEvent]:
        with self._lock:
            return list(self._events)

    def events_for(self, evaluator_id: str) -> list[RatingEvent]:
        with self._lock:
            return [e for e in self._events if e.evaluator_id == evaluator_id]

    def rated_count(self, evaluator_id: str, image_ids: list[str]) -> int:
        with self._lock:
            return sum(1 for iid in image_ids if (evaluator_id, iid) in self._by_pair)

    def __len__(self) -> int:
        return len(self._events)

    def close(self) -> None:
        self._fh.close()
