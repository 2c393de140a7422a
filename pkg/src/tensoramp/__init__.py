"""Low-rank recovery of noisy order-p tensors by approximate message
passing, with an analytic performance recursion (state evolution), phase
boundary mapping, and an alternating least squares baseline.

Quick start::

    from tensoramp import (
        GaussianPrior, make_shape, sample_truth, low_rank_tensor,
        add_noise, run_amp, align_components,
    )

    shape = make_shape([60, 48, 75])
    priors = [GaussianPrior(0.2, 1.0)] * 3
    truth = sample_truth(shape, priors, rank=1, seed=0)
    obs = add_noise(low_rank_tensor(truth), delta=0.03, seed=1)
    result = run_amp(obs, priors, rank=1, seed=2)
    aligned, overlaps = align_components(result.factors, truth)
"""
from .als_baseline import AlsConfig, AlsResult, als_step, run_als
from .amp_engine import (
    AmpResult,
    AmpState,
    amp_step,
    bp_reference,
    compute_A,
    init_state,
    overlap,
    run_amp,
    self_overlap,
)
from .errors import (
    BracketError,
    ConfigError,
    DivergedError,
    IndeterminateError,
    InvalidParameterError,
    InvalidShapeError,
    NumericDomainError,
    ShapeMismatchError,
    SingularSystemError,
    TensorAmpError,
    TooLargeError,
    UnsupportedPriorError,
)
from .experiment_harness import (
    ExperimentConfig,
    RunRecord,
    align_components,
    compare_amp_als,
    factor_mse,
    load_config,
    run_experiment,
    sample_truth,
    tensor_mse,
)
from .phase_diagram import (
    PhaseQuery,
    classify_delta,
    find_delta_alg,
    find_delta_dyn,
    sweep_means,
    sweep_shape,
)
from .priors import (
    BernoulliPrior,
    ChannelState,
    GaussBernoulliPrior,
    GaussianPrior,
    parse_prior,
    posterior_cov,
    posterior_mean,
    prior_moments,
    prior_to_text,
    sample_prior,
)
from .state_evolution import (
    OverlapSet,
    SeParams,
    SeResult,
    informed_overlaps,
    mse_from_overlap,
    se_fixed_point,
    se_step_gaussian,
    se_step_generic,
    uninformed_overlaps,
)
from .tensor_core import (
    DenseTensor,
    FactorSet,
    Observation,
    TensorShape,
    add_noise,
    load_factors,
    load_tensor,
    low_rank_tensor,
    make_shape,
    mttkrp_exclude,
    save_factors,
    save_tensor,
    shape_from_ratios,
)

__version__ = "1.0.0"
