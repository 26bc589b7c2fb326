"""Solver and verification lab for maxmin persuasion games with
set-valued priors and ambiguous experiments."""

from .errors import (
    DimensionMismatch,
    GameFormatError,
    InvariantViolation,
    LPFailure,
    NotObedientError,
    PersuasionLabError,
    TheoremViolation,
)
from .model import (
    FEAS_TOL,
    ROW_TOL,
    TIE_TOL,
    VALUE_TOL,
    AmbiguousExperiment,
    GameSpec,
    JointDistribution,
    PriorSet,
    ReceiverStrategy,
    StatisticalExperiment,
    ambiguous_meu_payoff,
    as_ambiguous,
    canonicalize,
    compose_strategy,
    expected_payoff,
    induced_joint,
    meu_payoff,
)
from .obedience import (
    DeviationVector,
    FaceWeight,
    KStarFace,
    ObedienceWitness,
    WorstPriorFace,
    ambiguous_obedience,
    deviation_vectors,
    joint_obedience,
    k_star,
    statistical_obedience,
    witness_joint,
    worst_case_priors,
)
from .bestresponse import BestResponseResult, is_best_response, receiver_best_response
from .binary import (
    BinaryExperiment,
    BinaryNormalization,
    DecompositionWitness,
    as_binary,
    as_experiment,
    binary_obedience,
    construct_sigma_hat,
    decompose_obedient_pi,
    hull_distance,
    line_coefficients,
    normalize,
    obedience_threshold,
    phi,
    split_faces,
)
from .senderopt import (
    GainReport,
    GainTrial,
    SenderSolution,
    ambiguous_sender_value,
    gain_search,
    has_obedient_member,
    optimal_statistical_value,
    sample_obedient_ambiguous,
    trial_seed,
    uniform_row_sampler,
)
from .campaign import (
    TheoremReport,
    TheoremTrial,
    random_binary_game,
    random_game,
    theorem_campaign,
)
from .fileio import load_experiment, load_game, load_strategy, save_game

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
