"""Service operations: request model in, response model out.

Both the HTTP routes and the CLI's local mode run through these functions,
so there is exactly one code path from the wire format to the core library.
"""
from __future__ import annotations

from .. import __version__
from ..evidence import FleetLog, evaluate_claim
from ..generators import simulate_nhpp, simulate_renewal
from ..semimarkov import asymptotic_failure_rate, rarity_warning, simulate_modular
from ..streams import RngStream
from ..superposition import ConvergenceTemplate, convergence_study, simulate_superposition
from ..validation import assess_poisson, summarize_report
from . import schemas as sc


def simulate(req: sc.SimulateRequest) -> sc.SimulateResponse:
    rng = RngStream(req.seed, req.stream_id)
    spec = req.spec
    metadata: dict = {
        "command": "simulate",
        "seed": req.seed,
        "stream_id": req.stream_id,
        "spec": spec.model_dump(exclude_none=True),
        "library_version": __version__,
        "theoretical_rate": None,
    }
    if spec.kind == "renewal":
        dist = spec.dist.to_core()
        timeline = simulate_renewal(dist, spec.horizon, rng)
        metadata["theoretical_rate"] = 1.0 / dist.mean
    elif spec.kind == "nhpp":
        profile = spec.profile.to_core()
        timeline = simulate_nhpp(profile, spec.horizon, rng, method=spec.method)
        metadata["method"] = spec.method
        metadata["expected_count"] = profile.cumulative(spec.horizon)
        if profile.kind == "constant":
            metadata["theoretical_rate"] = profile.params["lambda0"]
    elif spec.kind == "superposition":
        timeline, rate = simulate_superposition(spec.to_core(), rng)
        metadata["theoretical_rate"] = rate
    elif spec.kind == "modular":
        model = spec.model.to_core()
        timeline = simulate_modular(model, spec.horizon, rng)
        metadata["theoretical_rate"] = asymptotic_failure_rate(model)
        metadata["rarity_warnings"] = rarity_warning(model)
    else:  # rare_event
        from ..superposition import rare_event_hitting

        timeline = rare_event_hitting(spec.p_fault, spec.n_steps, spec.step_duration, rng)
        metadata["theoretical_rate"] = spec.p_fault / spec.step_duration
    return sc.SimulateResponse(timeline=sc.TimelineModel.from_core(timeline), metadata=metadata)


def validate(req: sc.ValidateRequest) -> sc.ValidateResponse:
    report = assess_poisson(req.timeline.to_core(), req.to_config(), RngStream(req.seed))
    return sc.ValidateResponse.from_core(report)


def validate_summary(resp: sc.ValidateResponse) -> str:
    # reuse the core renderer by rebuilding the report from the response
    from ..validation import AssumptionReport, TestResult

    def result(m: sc.TestResultModel) -> TestResult:
        return TestResult(
            m.name, m.statistic, m.p_value, m.verdict, m.method, m.parameters, m.details
        )

    report = AssumptionReport(
        proportionality=result(resp.proportionality),
        singularity=result(resp.singularity),
        homogeneity=result(resp.homogeneity),
        independence=result(resp.independence),
        overall=resp.overall,
    )
    return summarize_report(report)


def claim(req: sc.ClaimRequest) -> sc.ClaimResponse:
    fleet = FleetLog(tuple(rec.to_core() for rec in req.records))
    result = evaluate_claim(
        fleet,
        req.checklist.to_core(),
        confidence=req.confidence,
        version_filter=req.version_filter,
        bands=req.sil_bands.to_core(),
    )
    return sc.ClaimResponse.from_core(result)


def convergence(req: sc.ConvergenceRequest) -> sc.ConvergenceResponse:
    from ..validation import ValidationConfig

    template = ConvergenceTemplate(
        family=req.family,
        shape_params=req.shape_params,
        total_rate=req.total_rate,
        horizon=req.horizon,
    )
    config = ValidationConfig(
        significance=req.significance,
        bins=req.bins,
        epsilon=req.epsilon,
        resamples=req.resamples,
    )
    rows = convergence_study(
        template, req.n_values, req.replications, RngStream(req.seed), config
    )
    return sc.ConvergenceResponse(rows=[sc.ConvergenceRowModel.from_core(r) for r in rows])


def health() -> sc.HealthResponse:
    return sc.HealthResponse(status="ok", version=__version__)
