"""Secure computability of functions of correlated discrete sources."""
from .capacity import (
    CapacityResult,
    Decomposition,
    Verdict,
    ask_capacity,
    build_constraints,
    decide,
    decompose,
    secure_computability_capacity,
    sk_capacity,
    solve_rco,
)
from .dist import (
    FunctionSpec,
    JointDistribution,
    adjoin_function,
    conditional_entropy,
    entropy,
    function_entropy,
    mutual_information,
)
from .errors import (
    CapacityTooLargeError,
    DecoderSpaceTooLargeError,
    InvalidArgumentError,
    ResourceLimitError,
    SecComputeError,
)
from .mcf import McfLabeling, mcf_all, mcf_entropy, pairwise_mcf
from .problem import ProblemFile, generate_auction, parse_problem, problem_from_dict

__version__ = "0.1.0"
