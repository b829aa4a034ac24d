"""Detection-noise robustness of interaction-based readouts in collective spin systems."""

__version__ = "0.1.0"

from .ibr import (
    ReadoutKind,
    SweepRecord,
    cfi_sweep,
    find_phi0,
    sweep_setup,
    u_flip,
    u_flip_prime,
    u_opt,
)
from .metrology import (
    IllConditionedDistributionError,
    PhaseAxis,
    ProbDist,
    cfi,
    encode_phase,
    hellinger,
    measurement_distribution,
    optimal_phase_axis,
    phase_axis,
    qfi_mixed,
    qfi_pure,
)
from .noise import (
    NoiseKernel,
    NqcrbResult,
    apply_noise,
    evaluate_nqcrb,
    make_popt,
    noise_kernel,
    nqcrb_analytic,
    nqcrb_numeric,
    two_point_cfi,
)
from .optimizer import (
    AmplitudePair,
    OptTrace,
    dist_from_pair,
    hill_climb,
    pair_from_dist,
    random_constrained_dist,
    random_plane_rotation,
    reference_starts,
)
from .spin_core import (
    HusimiField,
    MixedState,
    PureState,
    SpinOps,
    Unitary,
    apply,
    build_spin_ops,
    expm_generator,
    husimi_q,
    jz_eigenstate,
)
from .state_prep import (
    PrepScheme,
    prep_unitary,
    prepared_state,
    qnd_state,
    qpt_evolve,
    scheme,
    scheme_from_dict,
)

__all__ = [
    "AmplitudePair",
    "HusimiField",
    "IllConditionedDistributionError",
    "MixedState",
    "NoiseKernel",
    "NqcrbResult",
    "OptTrace",
    "PhaseAxis",
    "PrepScheme",
    "ProbDist",
    "PureState",
    "ReadoutKind",
    "SpinOps",
    "SweepRecord",
    "Unitary",
    "apply",
    "apply_noise",
    "build_spin_ops",
    "cfi",
    "cfi_sweep",
    "dist_from_pair",
    "encode_phase",
    "evaluate_nqcrb",
    "expm_generator",
    "find_phi0",
    "hellinger",
    "hill_climb",
    "husimi_q",
    "jz_eigenstate",
    "make_popt",
    "measurement_distribution",
    "noise_kernel",
    "nqcrb_analytic",
    "nqcrb_numeric",
    "optimal_phase_axis",
    "pair_from_dist",
    "phase_axis",
    "prep_unitary",
    "prepared_state",
    "qfi_mixed",
    "qfi_pure",
    "qnd_state",
    "qpt_evolve",
    "random_constrained_dist",
    "random_plane_rotation",
    "reference_starts",
    "scheme",
    "scheme_from_dict",
    "sweep_setup",
    "two_point_cfi",
    "u_flip",
    "u_flip_prime",
    "u_opt",
]
