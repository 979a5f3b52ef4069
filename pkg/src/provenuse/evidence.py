"""Proven-in-use claims from fleet operating logs.

The pipeline is: accumulate in-service exposure T and dangerous-failure
count r per component version, bound the dangerous failure rate at a
confidence level with the chi-square/Poisson relation, map the bound onto
SIL bands, and gate the whole claim on a qualitative requirement checklist.
A failed checklist flag invalidates the claim no matter how good the
statistics are.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from scipy import stats

HOURS_PER_YEAR = 8760.0


class FleetLogError(ValueError):
    """Invalid fleet log content; carries a line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)
        self.line_no = line_no


class MixedVersionsError(FleetLogError):
    """Exposure over several component versions without a version filter."""

    def __init__(self, versions: Sequence[str]):
        super().__init__(
            f"fleet log mixes component versions {sorted(versions)}; "
            "fixed bugs make a different component, pass a version filter"
        )
        self.versions = tuple(sorted(versions))


@dataclass(frozen=True)
class ServiceInterval:
    start: float
    end: float
    version_id: str

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise FleetLogError("interval bounds must be finite")
        if self.end <= self.start:
            raise FleetLogError(f"interval end {self.end} must exceed start {self.start}")
        if not self.version_id:
            raise FleetLogError("interval needs a non-empty version_id")


@dataclass(frozen=True)
class Outage:
    start: float
    end: float

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise FleetLogError(f"outage end {self.end} must exceed start {self.start}")


@dataclass(frozen=True)
class FailureEvent:
    time: float
    dangerous: bool
    description: str = ""


@dataclass(frozen=True)
class ServiceRecord:
    """One unit's service history on the fleet's common hour clock."""

    unit_id: str
    intervals: tuple[ServiceInterval, ...]
    out_of_service: tuple[Outage, ...] = ()
    failures: tuple[FailureEvent, ...] = ()

    def __post_init__(self) -> None:
        if not self.unit_id:
            raise FleetLogError("unit_id must be non-empty")
        intervals = tuple(self.intervals)
        outages = tuple(self.out_of_service)
        failures = tuple(self.failures)
        for prev, cur in zip(intervals, intervals[1:]):
            if cur.start < prev.end:
                raise FleetLogError(
                    f"unit {self.unit_id}: service intervals overlap or are out of order "
                    f"({prev.start},{prev.end}) then ({cur.start},{cur.end})"
                )
        for prev, cur in zip(outages, outages[1:]):
            if cur.start < prev.end:
                raise FleetLogError(
                    f"unit {self.unit_id}: out-of-service periods overlap or are out of order"
                )
        for o in outages:
            if not any(iv.start <= o.start and o.end <= iv.end for iv in intervals):
                raise FleetLogError(
                    f"unit {self.unit_id}: out-of-service ({o.start},{o.end}) is not nested "
                    "inside a service interval"
                )
        for f in failures:
            if not self._in_service(f.time):
                raise FleetLogError(
                    f"unit {self.unit_id}: failure at t={f.time} lies outside counted service time"
                )
        object.__setattr__(self, "intervals", intervals)
        object.__setattr__(self, "out_of_service", outages)
        object.__setattr__(self, "failures", failures)

    def _in_service(self, t: float) -> bool:
        # outages are open intervals: a failure on an outage boundary is in service
        if any(o.start < t < o.end for o in self.out_of_service):
            return False
        return any(iv.start <= t <= iv.end for iv in self.intervals)

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "intervals": [
                {"start": iv.start, "end": iv.end, "version_id": iv.version_id}
                for iv in self.intervals
            ],
            "out_of_service": [{"start": o.start, "end": o.end} for o in self.out_of_service],
            "failures": [
                {"time": f.time, "dangerous": f.dangerous, "description": f.description}
                for f in self.failures
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceRecord":
        try:
            return cls(
                unit_id=data["unit_id"],
                intervals=tuple(
                    ServiceInterval(iv["start"], iv["end"], iv["version_id"])
                    for iv in data["intervals"]
                ),
                out_of_service=tuple(
                    Outage(o["start"], o["end"]) for o in data.get("out_of_service", ())
                ),
                failures=tuple(
                    FailureEvent(f["time"], bool(f["dangerous"]), f.get("description", ""))
                    for f in data.get("failures", ())
                ),
            )
        except KeyError as exc:
            raise FleetLogError(f"service record is missing field {exc.args[0]!r}")


@dataclass(frozen=True)
class FleetLog:
    records: tuple[ServiceRecord, ...]

    def __post_init__(self) -> None:
        records = tuple(self.records)
        seen: set[str] = set()
        for rec in records:
            if rec.unit_id in seen:
                raise FleetLogError(f"duplicate unit_id {rec.unit_id!r}")
            seen.add(rec.unit_id)
        object.__setattr__(self, "records", records)


def read_fleet_log(path: str | Path) -> FleetLog:
    """Read a JSON Lines fleet log, one service record per line."""
    records: list[ServiceRecord] = []
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FleetLogError(f"invalid JSON ({exc.msg})", line_no)
        try:
            records.append(ServiceRecord.from_dict(data))
        except FleetLogError as exc:
            raise FleetLogError(str(exc), line_no)
    return FleetLog(tuple(records))


def write_fleet_log(fleet: FleetLog, path: str | Path) -> None:
    lines = [json.dumps(rec.to_dict()) for rec in fleet.records]
    Path(path).write_text("\n".join(lines) + "\n")


def _counted_hours(record: ServiceRecord, interval: ServiceInterval) -> float:
    hours = interval.end - interval.start
    for o in record.out_of_service:
        hours -= max(0.0, min(o.end, interval.end) - max(o.start, interval.start))
    return hours


def exposure(fleet: FleetLog, version_filter: str | None = None) -> tuple[float, int]:
    """Total counted operating hours T and dangerous failures r.

    Only intervals of one component version may be pooled: without a
    filter, a fleet log containing several versions is rejected, because a
    modified component is a different component.
    """
    selected: list[tuple[ServiceRecord, ServiceInterval]] = []
    versions: set[str] = set()
    for rec in fleet.records:
        for iv in rec.intervals:
            if version_filter is None or iv.version_id == version_filter:
                selected.append((rec, iv))
                versions.add(iv.version_id)
    if version_filter is None and len(versions) > 1:
        raise MixedVersionsError(sorted(versions))
    if not selected:
        raise FleetLogError(
            "no exposure: no service intervals"
            + (f" for version {version_filter!r}" if version_filter else " in the fleet log")
        )
    total = 0.0
    dangerous = 0
    for rec, iv in selected:
        total += _counted_hours(rec, iv)
        for f in rec.failures:
            if f.dangerous and iv.start <= f.time <= iv.end and rec._in_service(f.time):
                dangerous += 1
    if total <= 0:
        raise FleetLogError("no exposure: counted operating time is zero")
    return total, dangerous


def chi_square_quantile(df: int, p: float) -> float:
    """Quantile of the chi-square law with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    return float(stats.chi2.ppf(p, df))


def rate_upper_bound(T: float, r: int, confidence: float) -> float:
    """One-sided upper confidence bound on a constant failure rate.

    With r failures in T hours under the Poisson model the bound is
    ``chi2(2r + 2, confidence) / (2 T)``; for r = 0 this reduces to
    ``-ln(1 - confidence) / T``.
    """
    if T <= 0:
        raise ValueError(f"exposure T must be > 0, got {T}")
    if r < 0:
        raise ValueError(f"failure count r must be >= 0, got {r}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie strictly between 0 and 1, got {confidence}")
    return chi_square_quantile(2 * int(r) + 2, confidence) / (2.0 * T)


@dataclass(frozen=True)
class SilBandTable:
    """Tolerable dangerous-failure-rate bands per hour (high-demand mode).

    Bands are half-open: a bound exactly on an edge does not earn the band.
    The constants live in a config file so an assessor can substitute their
    own table; see :func:`load_sil_bands`.
    """

    sil4: float = 1e-8
    sil3: float = 1e-7
    sil2: float = 1e-6
    sil1: float = 1e-5
    version: str = "high-demand-per-hour-v1"

    def __post_init__(self) -> None:
        edges = (self.sil4, self.sil3, self.sil2, self.sil1)
        if any(e <= 0 for e in edges) or list(edges) != sorted(edges) or len(set(edges)) != 4:
            raise ValueError(f"band edges must be positive and strictly increasing, got {edges}")


DEFAULT_SIL_BANDS = SilBandTable()


def load_sil_bands(path: str | Path) -> SilBandTable:
    data = json.loads(Path(path).read_text())
    try:
        return SilBandTable(
            sil4=float(data["sil4"]),
            sil3=float(data["sil3"]),
            sil2=float(data["sil2"]),
            sil1=float(data["sil1"]),
            version=str(data.get("version", "custom")),
        )
    except KeyError as exc:
        raise ValueError(f"SIL band table is missing key {exc.args[0]!r}")


def sil_for_rate(bound: float, bands: SilBandTable = DEFAULT_SIL_BANDS) -> int | None:
    """SIL level whose band contains the rate bound; ``None`` below SIL 1."""
    if bound <= 0:
        raise ValueError(f"rate bound must be > 0, got {bound}")
    if bound < bands.sil4:
        return 4
    if bound < bands.sil3:
        return 3
    if bound < bands.sil2:
        return 2
    if bound < bands.sil1:
        return 1
    return None


_CHECKLIST_FLAGS = (
    "representative_environment",
    "similar_environments_all_units",
    "components_similar",
    "all_failures_recorded",
    "all_lifetimes_recorded",
    "no_unrecorded_modifications",
)


@dataclass(frozen=True)
class Checklist:
    """Qualitative requirements that gate every claim.

    All six flags must be set explicitly; there are no defaults, because an
    unexamined requirement is not a satisfied one.
    """

    representative_environment: bool
    similar_environments_all_units: bool
    components_similar: bool
    all_failures_recorded: bool
    all_lifetimes_recorded: bool
    no_unrecorded_modifications: bool
    notes: str = ""

    def failed_flags(self) -> tuple[str, ...]:
        return tuple(name for name in _CHECKLIST_FLAGS if not getattr(self, name))

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in _CHECKLIST_FLAGS}
        out["notes"] = self.notes
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Checklist":
        missing = set(_CHECKLIST_FLAGS) - set(data)
        if missing:
            raise ValueError(f"checklist is missing flags: {sorted(missing)}")
        return cls(
            **{name: bool(data[name]) for name in _CHECKLIST_FLAGS},
            notes=str(data.get("notes", "")),
        )


def load_checklist(path: str | Path) -> Checklist:
    return Checklist.from_dict(json.loads(Path(path).read_text()))


def en50129_check(T: float, years_experience: float, distinct_equipments: int) -> bool:
    """EN 50129 experience recommendation for SIL 3/4 claims.

    True iff at least one million operating hours, two years of experience,
    and two distinct equipments.  Boundaries are inclusive.
    """
    if T < 0 or years_experience < 0 or distinct_equipments < 0:
        raise ValueError("inputs must be non-negative")
    return T >= 1e6 and years_experience >= 2.0 and distinct_equipments >= 2


@dataclass(frozen=True)
class ClaimResult:
    exposure_hours: float
    dangerous_failures: int
    confidence: float
    rate_upper_bound: float
    sil: int | None
    valid: bool
    en50129_sil34_recommendation_met: bool
    audit: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "exposure_hours": self.exposure_hours,
            "dangerous_failures": self.dangerous_failures,
            "confidence": self.confidence,
            "rate_upper_bound": self.rate_upper_bound,
            "sil": self.sil,
            "valid": self.valid,
            "en50129_sil34_recommendation_met": self.en50129_sil34_recommendation_met,
            "audit": list(self.audit),
        }

    def summary(self) -> str:
        sil = "none" if self.sil is None else str(self.sil)
        lines = [
            "Proven-in-use claim",
            "-" * 19,
            f"exposure hours      {self.exposure_hours!r}",
            f"dangerous failures  {self.dangerous_failures}",
            f"confidence          {self.confidence!r}",
            f"rate upper bound    {self.rate_upper_bound:.6g} /h",
            f"sil                 {sil}",
            f"claim valid         {'yes' if self.valid else 'no'}",
            f"en50129 sil3/4 rec  {'met' if self.en50129_sil34_recommendation_met else 'not met'}",
            "audit:",
        ]
        lines.extend(f"  - {line}" for line in self.audit)
        return "\n".join(lines)


def evaluate_claim(
    fleet: FleetLog,
    checklist: Checklist,
    confidence: float = 0.95,
    version_filter: str | None = None,
    bands: SilBandTable = DEFAULT_SIL_BANDS,
) -> ClaimResult:
    """Full claim pipeline: exposure, rate bound, SIL verdict, checklist gate.

    Any false checklist flag forces ``valid=False`` regardless of the
    statistics; the audit trail records every input, derived quantity and
    gate decision in a stable order.
    """
    T, r = exposure(fleet, version_filter)
    bound = rate_upper_bound(T, r, confidence)
    sil = sil_for_rate(bound, bands)

    counted = [
        (rec, iv)
        for rec in fleet.records
        for iv in rec.intervals
        if version_filter is None or iv.version_id == version_filter
    ]
    span_hours = max(iv.end for _, iv in counted) - min(iv.start for _, iv in counted)
    years = span_hours / HOURS_PER_YEAR
    units = len({rec.unit_id for rec, iv in counted if _counted_hours(rec, iv) > 0})
    en_met = en50129_check(T, years, units)
    non_dangerous = sum(
        1 for rec, iv in counted for f in rec.failures
        if not f.dangerous and iv.start <= f.time <= iv.end and rec._in_service(f.time)
    )

    audit = [
        f"exposure: T={T!r} h over {units} unit(s)"
        + (f", version filter {version_filter!r}" if version_filter else ", no version filter"),
        f"dangerous failures counted: r={r}",
        f"non-dangerous failures recorded (not counted in r): {non_dangerous}",
        f"rate upper bound at confidence {confidence!r}: {bound!r} /h "
        f"(chi-square df={2 * r + 2})",
        f"SIL band table {bands.version}: verdict {'none' if sil is None else f'SIL {sil}'}",
        f"EN 50129 SIL 3/4 recommendation (>=1e6 h, >=2 y, >=2 equipments): "
        f"T={T!r} h, span={years:.2f} y, units={units} -> {'met' if en_met else 'not met'}",
    ]
    failed = checklist.failed_flags()
    for name in _CHECKLIST_FLAGS:
        state = getattr(checklist, name)
        audit.append(f"checklist {name}: {'ok' if state else 'FAILED'}")
    if failed:
        audit.append(
            "claim INVALID: checklist requirement(s) not fulfilled: " + ", ".join(failed)
        )
    else:
        audit.append("claim valid: all checklist requirements fulfilled")
    if checklist.notes:
        audit.append(f"checklist notes: {checklist.notes}")

    return ClaimResult(
        exposure_hours=T,
        dangerous_failures=r,
        confidence=confidence,
        rate_upper_bound=bound,
        sil=sil,
        valid=not failed,
        en50129_sil34_recommendation_met=en_met,
        audit=tuple(audit),
    )
