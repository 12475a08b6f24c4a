"""Append-only JSONL decision log with the pending-confirmation queue
persisted as state-change records in the same file.

Appends are flushed (and fsynced) before the caller gets an acknowledgement,
so a restart reconstructs every acknowledged write. A single lock serializes
writers; reads work on immutable snapshots.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Optional

from .errors import TrustbenchError
from .model import (
    Decision,
    DecisionLogEntry,
    ResolvedBy,
    TrustScore,
    format_ts,
    parse_ts,
    utcnow,
)

DEFAULT_PENDING_TTL_MINUTES = 15


class AlreadyResolved(TrustbenchError):
    """A pending confirmation was resolved (or expired) earlier; one-shot rule."""


class UnknownPending(TrustbenchError):
    pass


@dataclass
class PendingConfirmation:
    request_id: str
    trust_score: TrustScore
    enqueued_at: datetime
    expires_at: datetime
    state: str = "pending"  # pending | approved | denied | expired

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "trust_score": self.trust_score.to_dict(),
            "enqueued_at": format_ts(self.enqueued_at),
            "expires_at": format_ts(self.expires_at),
            "state": self.state,
        }


class DecisionLog:
    """Append-only store of decisions and pending-queue state changes."""

    def __init__(self, path: str | Path, pending_ttl_minutes: int = DEFAULT_PENDING_TTL_MINUTES):
        self.path = Path(path)
        self.pending_ttl = timedelta(minutes=pending_ttl_minutes)
        self._lock = threading.Lock()
        self._entries: list[DecisionLogEntry] = []
        self._pending: dict[str, PendingConfirmation] = {}
        self._seen_request_ids: set[str] = set()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._replay()
        self._fh = open(self.path, "a", encoding="utf-8")

    # -- persistence ------------------------------------------------------

    def _replay(self) -> None:
        if not self.path.exists():
            return
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            kind = doc.get("type")
            if kind == "decision":
                entry = DecisionLogEntry.from_dict(doc["entry"])
                self._entries.append(entry)
                self._seen_request_ids.add(entry.request_id)
                # a resolved confirm leaves the queue
                self._pending.pop(entry.request_id, None)
            elif kind == "pending":
                self._pending[doc["request_id"]] = PendingConfirmation(
                    request_id=doc["request_id"],
                    trust_score=TrustScore.from_dict(doc["trust_score"]),
                    enqueued_at=parse_ts(doc["enqueued_at"]),
                    expires_at=parse_ts(doc["expires_at"]),
                )

    def _append(self, doc: dict) -> None:
        self._fh.write(json.dumps(doc, sort_keys=True) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()

    # -- writes -----------------------------------------------------------

    def record_decision(
        self,
        request_id: str,
        trust_score: TrustScore,
        resolved_by: ResolvedBy = ResolvedBy.AUTOMATIC,
        resolved_at: Optional[datetime] = None,
    ) -> DecisionLogEntry:
        entry = DecisionLogEntry(
            request_id=request_id,
            trust_score=trust_score,
            resolved_by=resolved_by,
            resolved_at=resolved_at or utcnow(),
        )
        with self._lock:
            self._entries.append(entry)
            self._seen_request_ids.add(request_id)
            self._append({"type": "decision", "entry": entry.to_dict()})
        return entry

    def enqueue_pending(
        self, request_id: str, trust_score: TrustScore, now: Optional[datetime] = None
    ) -> PendingConfirmation:
        now = now or utcnow()
        item = PendingConfirmation(
            request_id=request_id,
            trust_score=trust_score,
            enqueued_at=now,
            expires_at=now + self.pending_ttl,
        )
        with self._lock:
            self._pending[request_id] = item
            self._append(
                {
                    "type": "pending",
                    "request_id": request_id,
                    "trust_score": trust_score.to_dict(),
                    "enqueued_at": format_ts(item.enqueued_at),
                    "expires_at": format_ts(item.expires_at),
                }
            )
        return item

    def resolve_pending(
        self, request_id: str, approve: bool, now: Optional[datetime] = None
    ) -> DecisionLogEntry:
        """One-shot resolution: the first resolver wins, later ones get
        AlreadyResolved. Items past their TTL expire as timeout_deny."""
        now = now or utcnow()
        with self._lock:
            self._expire_locked(now)
            item = self._pending.get(request_id)
            if item is None:
                if request_id in self._seen_request_ids:
                    raise AlreadyResolved(f"{request_id} already resolved")
                raise UnknownPending(f"no pending confirmation {request_id!r}")
            item.state = "approved" if approve else "denied"
            del self._pending[request_id]
            entry = DecisionLogEntry(
                request_id=request_id,
                trust_score=item.trust_score,
                resolved_by=ResolvedBy.HUMAN_APPROVE if approve else ResolvedBy.HUMAN_DENY,
                resolved_at=now,
            )
            self._entries.append(entry)
            self._seen_request_ids.add(request_id)
            self._append({"type": "decision", "entry": entry.to_dict()})
        return entry

    def _expire_locked(self, now: datetime) -> None:
        for request_id in [
            rid for rid, item in self._pending.items() if item.expires_at <= now
        ]:
            item = self._pending.pop(request_id)
            item.state = "expired"
            entry = DecisionLogEntry(
                request_id=request_id,
                trust_score=item.trust_score,
                resolved_by=ResolvedBy.TIMEOUT_DENY,
                resolved_at=now,
            )
            self._entries.append(entry)
            self._seen_request_ids.add(request_id)
            self._append({"type": "decision", "entry": entry.to_dict()})

    def expire_due(self, now: Optional[datetime] = None) -> None:
        with self._lock:
            self._expire_locked(now or utcnow())

    # -- reads ------------------------------------------------------------

    def pending_items(self, now: Optional[datetime] = None) -> list[PendingConfirmation]:
        with self._lock:
            self._expire_locked(now or utcnow())
            return sorted(self._pending.values(), key=lambda p: p.enqueued_at)

    def entries(self, since: Optional[datetime] = None) -> list[DecisionLogEntry]:
        with self._lock:
            out = list(self._entries)
        if since is not None:
            out = [e for e in out if e.resolved_at > since]
        return sorted(out, key=lambda e: e.resolved_at, reverse=True)

    def has_request(self, request_id: str) -> bool:
        with self._lock:
            return request_id in self._seen_request_ids or request_id in self._pending

    def verify_integrity(self) -> int:
        """Re-check the composite identity on every logged score; returns
        the number of entries checked, raises on the first inconsistency."""
        with self._lock:
            entries = list(self._entries)
        for entry in entries:
            ts = entry.trust_score
            expected = (
                ts.prior_weight * ts.calibrated_prior
                + (1 - ts.prior_weight) * ts.runtime_aggregate
            )
            if abs(ts.composite - expected) > 1e-9:
                raise TrustbenchError(
                    f"composite identity broken for {entry.request_id}"
                )
        return len(entries)
