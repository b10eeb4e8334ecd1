"""Stationary distributions of combined policies in unichain MDPs."""

from .combine import (
    FKernel,
    NuVector,
    cancellation_check,
    cancellation_scale,
    combine_deterministic_gamma,
    combine_randomized,
    combine_word,
    enumerate_gamma,
    f_kernel,
    gamma_sets,
    nu_vector,
)
from .errors import (
    DegenerateDenominator,
    EmptyNumerator,
    ModelError,
    NoConvergence,
    NonPositiveResult,
    NumericalError,
    SingularSystem,
)
from .model import (
    DeterministicPolicy,
    Distribution,
    Mdp,
    MixtureVector,
    PolicyFamily,
    ValidationReport,
    induced_matrix,
    is_combination,
    mixed_matrix,
    relabel_to_ones,
    validate_mdp,
    word_to_policy,
)
from .permutations import Permutation, enumerate_gamma_prime
from .randgen import GenSpec, random_family, random_unichain_mdp
from .statdist import (
    SolveOptions,
    is_irreducible,
    residual,
    stationary_cesaro,
    stationary_linear,
)

__version__ = "0.1.0"
