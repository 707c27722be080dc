"""Middleware between raw tag reports and the client application.

Deduplicates repeated reads of the tag currently in front of the reader and
turns the raw report stream into location events: Changed(tag) when a new
tag becomes current, Lost when the current tag has not been seen for longer
than the staleness timeout. State is an immutable value; both operations
return an updated copy.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .framing import TagReportFrame

DEFAULT_DEDUP_WINDOW = 1.0
DEFAULT_LOST_TIMEOUT = 5.0


class EventKind(Enum):
    CHANGED = "changed"
    LOST = "lost"


@dataclass(frozen=True)
class LocationEvent:
    kind: EventKind
    tag_id: Optional[int]  # set for CHANGED, None for LOST
    at: float


@dataclass(frozen=True)
class MiddlewareState:
    current: Optional[tuple[int, float]] = None  # (tag id, last_seen)
    dedup_window: float = DEFAULT_DEDUP_WINDOW
    lost_timeout: float = DEFAULT_LOST_TIMEOUT


def current_tag(state: MiddlewareState) -> Optional[int]:
    return state.current[0] if state.current is not None else None


def ingest(
    state: MiddlewareState, report: TagReportFrame, now: float
) -> tuple[MiddlewareState, Optional[LocationEvent]]:
    """Absorb one tag report. Emits Changed when the reported tag differs
    from the current one (or there is none); repeats of the current tag only
    refresh its last-seen time."""
    if state.current is not None and state.current[0] == report.tag_id:
        return replace(state, current=(report.tag_id, now)), None
    new_state = replace(state, current=(report.tag_id, now))
    return new_state, LocationEvent(EventKind.CHANGED, report.tag_id, now)


def poll_lost(
    state: MiddlewareState, now: float
) -> tuple[MiddlewareState, Optional[LocationEvent]]:
    """Emit Lost and clear the current tag once it has been silent for
    longer than lost_timeout."""
    if state.current is None:
        return state, None
    _, last_seen = state.current
    if now - last_seen > state.lost_timeout:
        return replace(state, current=None), LocationEvent(EventKind.LOST, None, now)
    return state, None
