"""Gaussian target-detection numerics for correlated two-mode sources.

Closed-form receiver statistics for the conjugate-and-mix chain, quantum
and classical Chernoff-type error bounds, and seeded sampling that checks
every formula against simulation.
"""
from .bounds import (
    ClassicalDistributionPair,
    SOverlapResult,
    ccb,
    ccb_reference_expression,
    classical_s_overlap,
    cs_qcb_closed,
    cs_qcb_exponent,
    gaussian_s_overlap,
    heterodyne_distributions,
    qbb,
    qcb,
)
from .errors import NumericFailure
from .montecarlo import (
    EmpiricalStats,
    MomentCheckReport,
    MomentCheckRow,
    SamplerConfig,
    check_gaussian_moment_identities,
    empirical_error_rate,
    sample_pc_modes,
    sample_quadratures,
    simulate_pc_receiver,
)
from .receiver import (
    BeamsplitterMoments,
    ErrorProbabilities,
    HomodyneOptimum,
    ReceiverConfig,
    ReceiverStats,
    asymptotic_snr,
    beamsplitter_moments,
    erfc,
    error_prob_pc,
    half_erfc,
    homodyne_errors,
    homodyne_min_error,
    log_erfc,
    log_error_prob_pc,
    pc_transform,
    snr_from_moments,
    snr_pc,
)
from .states import (
    ChannelParams,
    GaussianState,
    Hypothesis,
    NoiseParams,
    SourceParams,
    apply_noise,
    c_direct,
    c_quantum,
    coherent_benchmark_states,
    conditional_states,
    make_source,
    source_cm,
)
from .symplectic import (
    CovMatrix,
    WilliamsonDecomposition,
    is_physical,
    symplectic_eigenvalues,
    symplectic_form,
    williamson,
)

__version__ = "0.1.0"
