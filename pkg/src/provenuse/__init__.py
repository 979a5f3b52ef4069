"""provenuse: failure-process simulation, Poisson-assumption validation,
and proven-in-use SIL claim evaluation from fleet operating logs."""

from .distributions import (
    DistributionSpec,
    degenerate,
    exponential,
    gamma,
    lognormal,
    mean_of,
    sample,
    weibull,
)
from .evidence import (
    Checklist,
    ClaimResult,
    FailureEvent,
    FleetLog,
    FleetLogError,
    MixedVersionsError,
    Outage,
    ServiceInterval,
    ServiceRecord,
    SilBandTable,
    chi_square_quantile,
    en50129_check,
    evaluate_claim,
    exposure,
    load_checklist,
    load_sil_bands,
    rate_upper_bound,
    read_fleet_log,
    sil_for_rate,
    write_fleet_log,
)
from .generators import (
    IntensityProfile,
    constant,
    loglinear,
    powerlaw,
    simulate_nhpp,
    simulate_renewal,
)
from .semimarkov import (
    SemiMarkovModel,
    asymptotic_failure_rate,
    dump_model,
    load_model,
    rarity_warning,
    simulate_modular,
    stationary_embedded,
)
from .streams import RngStream
from .superposition import (
    ComponentSpec,
    ConvergenceRow,
    ConvergenceTemplate,
    SuperpositionSpec,
    convergence_study,
    grigelionis_intensity,
    rare_event_hitting,
    scaled_to_mean,
    simulate_superposition,
    superpose,
    write_convergence_csv,
)
from .timeline import EventTimeline, TimelineFormatError, read_timeline_csv, write_timeline_csv
from .validation import (
    AssumptionReport,
    TestResult,
    ValidationConfig,
    assess_poisson,
    dispersion_test,
    exp_gof_test,
    laplace_trend_test,
    singularity_check,
    summarize_report,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
