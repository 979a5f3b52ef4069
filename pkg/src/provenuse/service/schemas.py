"""Pydantic request/response models for the HTTP API.

These mirror the core domain types one-to-one; parameter validation beyond
shape checking is delegated to the core constructors so rules live in one
place.
"""
from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from .. import evidence as ev
from ..distributions import DistributionSpec
from ..generators import IntensityProfile
from ..semimarkov import SemiMarkovModel
from ..superposition import ComponentSpec, ConvergenceRow, SuperpositionSpec
from ..timeline import EventTimeline
from ..validation import AssumptionReport, ValidationConfig


class DistributionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["exponential", "weibull", "gamma", "lognormal", "degenerate"]
    rate: float | None = None
    shape: float | None = None
    scale: float | None = None
    log_mean: float | None = None
    log_sd: float | None = None
    value: float | None = None

    def to_core(self) -> DistributionSpec:
        params = {k: v for k, v in self.model_dump().items() if k != "kind" and v is not None}
        return DistributionSpec(self.kind, params)

    @classmethod
    def from_core(cls, dist: DistributionSpec) -> "DistributionModel":
        return cls.model_validate(dist.to_dict())


class IntensityModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["constant", "loglinear", "powerlaw"]
    lambda0: float
    beta: float | None = None
    shape: float | None = None

    def to_core(self) -> IntensityProfile:
        params = {k: v for k, v in self.model_dump().items() if k != "kind" and v is not None}
        return IntensityProfile(self.kind, params)


class TimelineModel(BaseModel):
    window_end: float
    events: list[float]
    unit_id: str | None = None

    def to_core(self) -> EventTimeline:
        return EventTimeline(self.window_end, self.events, self.unit_id)

    @classmethod
    def from_core(cls, t: EventTimeline) -> "TimelineModel":
        return cls(window_end=t.window_end, events=t.events.tolist(), unit_id=t.unit_id)


# --- simulation specs --------------------------------------------------------


class RenewalSpec(BaseModel):
    kind: Literal["renewal"]
    dist: DistributionModel
    horizon: float


class NhppSpec(BaseModel):
    kind: Literal["nhpp"]
    profile: IntensityModel
    horizon: float
    method: Literal["inverse", "thinning"] = "inverse"


class ComponentModel(BaseModel):
    dist: DistributionModel
    label: str | None = None
    count: int = Field(default=1, ge=1)


class SuperpositionSpecModel(BaseModel):
    kind: Literal["superposition"]
    components: list[ComponentModel]
    horizon: float

    def to_core(self) -> SuperpositionSpec:
        comps: list[ComponentSpec] = []
        for c in self.components:
            dist = c.dist.to_core()
            comps.extend(ComponentSpec(dist, c.label) for _ in range(c.count))
        return SuperpositionSpec(tuple(comps), self.horizon)


class ModularModelModel(BaseModel):
    states: list[str]
    P: list[list[float]]
    sojourn: list[DistributionModel]
    module_rate: list[float]
    transfer_fail: list[list[float]]

    def to_core(self) -> SemiMarkovModel:
        return SemiMarkovModel.from_dict(
            {
                "states": self.states,
                "P": self.P,
                "sojourn": [d.model_dump(exclude_none=True) for d in self.sojourn],
                "module_rate": self.module_rate,
                "transfer_fail": self.transfer_fail,
            }
        )


class ModularSpec(BaseModel):
    kind: Literal["modular"]
    model: ModularModelModel
    horizon: float


class RareEventSpec(BaseModel):
    kind: Literal["rare_event"]
    p_fault: float
    n_steps: int
    step_duration: float


SimSpec = Annotated[
    Union[RenewalSpec, NhppSpec, SuperpositionSpecModel, ModularSpec, RareEventSpec],
    Field(discriminator="kind"),
]


class SimulateRequest(BaseModel):
    spec: SimSpec
    seed: int = 0
    stream_id: int = 0


class SimulateResponse(BaseModel):
    timeline: TimelineModel
    metadata: dict


# --- validation --------------------------------------------------------------


class ValidateRequest(BaseModel):
    timeline: TimelineModel
    seed: int = 0
    significance: float = 0.05
    bins: int = 20
    epsilon: float = 0.0
    resamples: int = 1000
    familywise_correction: bool = False

    def to_config(self) -> ValidationConfig:
        return ValidationConfig(
            significance=self.significance,
            bins=self.bins,
            epsilon=self.epsilon,
            resamples=self.resamples,
            familywise_correction=self.familywise_correction,
        )


class TestResultModel(BaseModel):
    name: str
    statistic: float | None
    p_value: float | None
    verdict: str
    method: str
    parameters: dict[str, float]
    details: str = ""


class ValidateResponse(BaseModel):
    proportionality: TestResultModel
    singularity: TestResultModel
    homogeneity: TestResultModel
    independence: TestResultModel
    overall: bool

    @classmethod
    def from_core(cls, report: AssumptionReport) -> "ValidateResponse":
        return cls.model_validate(report.to_dict())


# --- claims ------------------------------------------------------------------


class IntervalModel(BaseModel):
    start: float
    end: float
    version_id: str


class OutageModel(BaseModel):
    start: float
    end: float


class FailureModel(BaseModel):
    time: float
    dangerous: bool
    description: str = ""


class ServiceRecordModel(BaseModel):
    unit_id: str
    intervals: list[IntervalModel]
    out_of_service: list[OutageModel] = Field(default_factory=list)
    failures: list[FailureModel] = Field(default_factory=list)

    def to_core(self) -> ev.ServiceRecord:
        return ev.ServiceRecord.from_dict(self.model_dump())


class ChecklistModel(BaseModel):
    representative_environment: bool
    similar_environments_all_units: bool
    components_similar: bool
    all_failures_recorded: bool
    all_lifetimes_recorded: bool
    no_unrecorded_modifications: bool
    notes: str = ""

    def to_core(self) -> ev.Checklist:
        return ev.Checklist.from_dict(self.model_dump())


class SilBandsModel(BaseModel):
    sil4: float = 1e-8
    sil3: float = 1e-7
    sil2: float = 1e-6
    sil1: float = 1e-5
    version: str = "high-demand-per-hour-v1"

    def to_core(self) -> ev.SilBandTable:
        return ev.SilBandTable(**self.model_dump())


class ClaimRequest(BaseModel):
    records: list[ServiceRecordModel]
    checklist: ChecklistModel
    confidence: float = 0.95
    version_filter: str | None = None
    sil_bands: SilBandsModel = Field(default_factory=SilBandsModel)


class ClaimResponse(BaseModel):
    exposure_hours: float
    dangerous_failures: int
    confidence: float
    rate_upper_bound: float
    sil: int | None
    valid: bool
    en50129_sil34_recommendation_met: bool
    audit: list[str]
    summary: str

    @classmethod
    def from_core(cls, result: ev.ClaimResult) -> "ClaimResponse":
        return cls(summary=result.summary(), **result.to_dict())


# --- convergence ---------------------------------------------------------------


class ConvergenceRequest(BaseModel):
    family: Literal["exponential", "weibull", "gamma", "lognormal"]
    shape_params: dict[str, float] = Field(default_factory=dict)
    total_rate: float = 1.0
    horizon: float = 1000.0
    n_values: list[int]
    replications: int = Field(ge=0)
    seed: int = 0
    significance: float = 0.05
    bins: int = 20
    epsilon: float = 0.0
    resamples: int = 1000


class ConvergenceRowModel(BaseModel):
    n: int
    replications: int
    pass_fraction: float
    empirical_rate_mean: float
    theoretical_rate: float

    @classmethod
    def from_core(cls, row: ConvergenceRow) -> "ConvergenceRowModel":
        return cls(
            n=row.n,
            replications=row.replications,
            pass_fraction=row.pass_fraction,
            empirical_rate_mean=row.empirical_rate_mean,
            theoretical_rate=row.theoretical_rate,
        )


class ConvergenceResponse(BaseModel):
    rows: list[ConvergenceRowModel]


class HealthResponse(BaseModel):
    status: str
    version: str
