"""Event timelines: ordered failure times over an observation window.

The window convention is open-closed, ``(0, window_end]``: an event exactly
at the window end belongs to the timeline, an event at 0 does not.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class TimelineFormatError(ValueError):
    """Raised for malformed timeline CSV input; carries the offending line."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True, eq=False)
class EventTimeline:
    """Ordered event times (hours) within ``(0, window_end]``.

    Times must be sorted non-decreasing.  Simulators only ever emit strictly
    increasing times; exact duplicates can still enter through observed CSV
    data and are kept so that the singularity check can flag them.
    """

    window_end: float
    events: np.ndarray
    unit_id: str | None = None

    def __post_init__(self) -> None:
        w = float(self.window_end)
        if not np.isfinite(w) or w <= 0:
            raise ValueError(f"window_end must be finite and > 0, got {self.window_end}")
        ev = np.array(self.events, dtype=float, copy=True).reshape(-1)
        if ev.size:
            if not np.all(np.isfinite(ev)):
                raise ValueError("event times must be finite")
            if np.any(np.diff(ev) < 0):
                raise ValueError("event times must be sorted non-decreasing")
            if ev[0] <= 0:
                raise ValueError(f"event times must be > 0, got {ev[0]}")
            if ev[-1] > w:
                raise ValueError(f"event {ev[-1]} lies past window_end {w}")
        ev.setflags(write=False)
        object.__setattr__(self, "window_end", w)
        object.__setattr__(self, "events", ev)

    def __len__(self) -> int:
        return int(self.events.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventTimeline):
            return NotImplemented
        return (
            self.window_end == other.window_end
            and self.unit_id == other.unit_id
            and np.array_equal(self.events, other.events)
        )

    def __repr__(self) -> str:
        return (
            f"EventTimeline(window_end={self.window_end}, n={len(self)}, "
            f"unit_id={self.unit_id!r})"
        )

    @property
    def count(self) -> int:
        return len(self)

    def gaps(self) -> np.ndarray:
        """Inter-arrival gaps, the first one measured from 0 (n values)."""
        return np.diff(self.events, prepend=0.0)

    def scaled(self, factor: float) -> "EventTimeline":
        """Timeline with all times and the window multiplied by ``factor``."""
        if factor <= 0:
            raise ValueError(f"scale factor must be > 0, got {factor}")
        return EventTimeline(self.window_end * factor, self.events * factor, self.unit_id)


def write_timeline_csv(timeline: EventTimeline, path: str | Path) -> None:
    """Write the CSV form: a window comment, a header, one row per event.

    Times are written with ``repr`` (shortest exact round-trip, at full
    double precision), so identical timelines serialize byte-for-byte
    identically.
    """
    unit = timeline.unit_id or ""
    lines = [f"# window_end={timeline.window_end!r}", "unit_id,time_h"]
    lines.extend(f"{unit},{float(t)!r}" for t in timeline.events)
    Path(path).write_text("\n".join(lines) + "\n")


def read_timeline_csv(path: str | Path) -> EventTimeline:
    """Parse a timeline CSV written by :func:`write_timeline_csv`."""
    text = Path(path).read_text()
    window_end: float | None = None
    header_seen = False
    unit_ids: set[str] = set()
    times: list[float] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("window_end="):
                try:
                    window_end = float(body.split("=", 1)[1])
                except ValueError:
                    raise TimelineFormatError(line_no, f"bad window_end value in {line!r}")
            continue
        if not header_seen:
            if line != "unit_id,time_h":
                raise TimelineFormatError(line_no, f"expected header 'unit_id,time_h', got {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise TimelineFormatError(line_no, f"expected 'unit_id,time_h' row, got {line!r}")
        unit, time_s = parts[0].strip(), parts[1].strip()
        try:
            times.append(float(time_s))
        except ValueError:
            raise TimelineFormatError(line_no, f"bad time value {time_s!r}")
        if unit:
            unit_ids.add(unit)
    if window_end is None:
        raise TimelineFormatError(0, "missing '# window_end=<hours>' comment line")
    if not header_seen:
        raise TimelineFormatError(0, "missing 'unit_id,time_h' header")
    if len(unit_ids) > 1:
        raise TimelineFormatError(0, f"mixed unit ids in one timeline: {sorted(unit_ids)}")
    unit_id = unit_ids.pop() if unit_ids else None
    try:
        return EventTimeline(window_end, np.array(times, dtype=float), unit_id)
    except ValueError as exc:
        raise TimelineFormatError(0, str(exc))
