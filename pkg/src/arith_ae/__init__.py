"""Empirical moments, asymptotic predictions, and almost-everywhere
classification of additive and multiplicative arithmetic functions on the
uniform probability space {1, ..., n}."""

from .classifier import (
    Assertion,
    AsymptoticStatement,
    BoundKind,
    ClassifyOptions,
    ClassStatus,
    ClassVerdict,
    GrowthCertificate,
    Regime,
    asymptotic_statement,
    classify,
    default_checkpoints,
    growth_certificate,
)
from .empirical import (
    ConcentrationReport,
    EnvelopeDensity,
    MomentSummary,
    TailReport,
    checkpoint_moments,
    concentration,
    envelope_density,
    evaluate_range,
    markov_tail,
    moments,
)
from .errors import (
    ArgumentError,
    ArithAEError,
    CapacityError,
    EvaluationError,
    InternalInvariantError,
    KernelDomainError,
    ModeError,
    RangeError,
)
from .functions import (
    BUILTIN_FACTORIES,
    FunctionSpec,
    Kernel,
    Mode,
    big_omega,
    builtin_ids,
    evaluate,
    exp_transform,
    get_builtin,
    log_p_minus_1,
    log_phi,
    log_ratio_phi,
    log_transform,
    omega_plus_log,
    ratio_phi,
    scaled_totient,
    small_omega,
    strong_companion,
)
from .predictor import (
    DriftRow,
    Law,
    PredictionTable,
    ProbeResult,
    ProbeVerdict,
    Weighting,
    mean_prediction,
    prediction_table,
    prime_power_sum,
    prime_sum,
    reference_law,
    series_convergence_probe,
    variance_heuristic,
)
from .sieve import Factorization, PrimePower, SpfTable, build_spf, sieve_capacity

__version__ = "0.1.0"
