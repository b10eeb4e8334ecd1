"""Stationary distributions of combined policies from the base distributions.

Given a family of ``n + 1`` policies that differ on ``n`` states, the
stationary distribution of any policy mixing actions 0 and 1 on those states
is the normalization of a weight vector ``nu`` built only from the base
distributions ``mu_0 .. mu_n``::

    nu_s = sum_k sum_{g : g(k) = n} sgn(g) mu_k(s) prod_{j != k} f(g(j), j)

with the kernel

    f(i, j) = lam_i * mu_j(s_i)        if base policy j plays 1 at s_i
              (lam_i - 1) * mu_j(s_i)  if it plays 0

where ``lam_i`` is the probability of action 0 at ``s_i``. ``nu_s`` is the
determinant of the ``(n + 1) x (n + 1)`` matrix ``[F | mu(s)]`` with
``F[j, i] = f(i, j)``. Two evaluators are offered:

``permsum``
    the literal signed sum over permutations, ``O((n+1)! n N)``;
    kept as an audit path.
``determinant``
    Laplace expansion along the last column. The ``n + 1`` cofactors
    depend only on ``F``, so all states cost ``O(n^4 + n N)``.

For deterministic targets :func:`combine_deterministic_gamma` evaluates the
restricted form that keeps only permutations whose factors are all nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateDenominator, EmptyNumerator, ModelError, NonPositiveResult
from .model import (
    DIST_SUM_TOL,
    Distribution,
    MixtureVector,
    PolicyFamily,
    WordLike,
    parse_word,
    relabel_to_ones,
)
from .permutations import Permutation, enumerate_gamma_words, iter_gamma_prime

Evaluator = Literal["permsum", "determinant"]
EVALUATORS = ("permsum", "determinant")

DEGENERATE_REL_TOL = 1e-12
# |nu| below this fraction of the term-size bound is rounding noise
CANCELLATION_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class FKernel:
    """``values[j, i] = f(i, j)``: row per base policy, column per differing state."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class NuVector:
    """Unnormalized stationary weights and their sum.

    ``scale`` bounds the size of the terms summed into ``nu``; it is used to
    tell genuine weights from cancellation noise.
    """

    nu: np.ndarray
    denominator: float
    scale: float | None = None

    def normalized(self) -> Distribution:
        return _normalize(self)


def _as_mixture(family: PolicyFamily, lambdas) -> MixtureVector:
    if not isinstance(lambdas, MixtureVector):
        lambdas = MixtureVector(lambdas)
    if len(lambdas) != family.n:
        raise ModelError(f"expected {family.n} mixture weights, got {len(lambdas)}")
    return lambdas


def f_kernel(family: PolicyFamily, lambdas) -> FKernel:
    lam = _as_mixture(family, lambdas).lambdas
    words = family.word_matrix()
    mu_at_diff = family.mu_matrix()[:, list(family.diff_states)]
    # words[j, i] == 1 -> lam_i, else lam_i - 1
    factor = np.where(words == 1, lam[None, :], lam[None, :] - 1.0)
    return FKernel(factor * mu_at_diff)


def term_scale(F: np.ndarray, M: np.ndarray) -> float:
    """Bound ``max_s sum_k mu_k(s) prod_{j != k} |F_j|_1`` on the terms of any evaluator."""
    r = np.abs(F).sum(axis=1)
    h = np.array([np.prod(np.delete(r, k)) for k in range(F.shape[0])])
    return float(np.max(h @ M))


def _nu_permsum(F: np.ndarray, M: np.ndarray) -> NuVector:
    n = F.shape[1]
    nu = np.zeros(M.shape[1])
    for k in range(n + 1):
        rows = [j for j in range(n + 1) if j != k]
        for img, sign in iter_gamma_prime(n, k):
            prod = 1.0
            for j in rows:
                prod *= F[j, img[j]]
            nu += sign * prod * M[k]
    return NuVector(nu, float(nu.sum()), term_scale(F, M))


def cofactors(F: np.ndarray) -> np.ndarray:
    """Cofactors of the last column of ``[F | x]`` for an ``(n + 1, n)`` kernel."""
    n = F.shape[1]
    C = np.empty(n + 1)
    for k in range(n + 1):
        minor = np.delete(F, k, axis=0)
        C[k] = (-1.0) ** (k + n) * np.linalg.det(minor)
    return C


def _nu_determinant(F: np.ndarray, M: np.ndarray) -> NuVector:
    C = cofactors(F)
    # each row of M sums to 1, so sum_s nu_s = sum_k C_k
    return NuVector(C @ M, float(C.sum()), term_scale(F, M))


def nu_vector(
    family: PolicyFamily, lambdas, evaluator: Evaluator = "determinant"
) -> NuVector:
    """Unnormalized weights for the randomized policy ``lambdas``."""
    F = f_kernel(family, lambdas).values
    M = family.mu_matrix()
    if evaluator == "permsum":
        return _nu_permsum(F, M)
    if evaluator == "determinant":
        return _nu_determinant(F, M)
    raise ValueError(f"unknown evaluator {evaluator!r}")


def _face_hint(family: PolicyFamily | None) -> str:
    if family is None or family.is_generic:
        return ""
    fixed, count = family.overfull_face
    free = family.n - len(fixed)
    return (
        f"; {count} base words share the face {fixed} with only {free} free "
        f"positions, so the family does not determine this policy"
    )


def _normalize(v: NuVector, family: PolicyFamily | None = None) -> Distribution:
    scale = float(np.max(np.abs(v.nu))) if v.nu.size else 0.0
    if v.scale is not None and scale < CANCELLATION_TOL * v.scale:
        raise DegenerateDenominator(
            f"weights of size {scale:.3g} are cancellation noise against terms "
            f"of size {v.scale:.3g}" + _face_hint(family)
        )
    if scale == 0.0 or not np.isfinite(scale) or abs(v.denominator) < DEGENERATE_REL_TOL * scale:
        raise DegenerateDenominator(
            f"normalizing sum {v.denominator:.3g} is negligible against weights "
            f"of size {scale:.3g}" + _face_hint(family)
        )
    mu = v.nu / v.denominator
    if abs(mu.sum() - 1.0) > DIST_SUM_TOL:
        # cofactor denominator and entrywise sum disagree: cancellation ate the weights
        raise DegenerateDenominator(
            f"weights sum to {mu.sum():.15g} of their computed total" + _face_hint(family)
        )
    if np.any(mu <= 0.0):
        raise NonPositiveResult(
            f"combined distribution has non-positive entry {mu.min():.3g}"
        )
    return Distribution(mu)


def combine_randomized(
    family: PolicyFamily, lambdas, evaluator: Evaluator = "determinant"
) -> Distribution:
    """Stationary distribution of the policy playing action 0 at ``s_i`` with probability ``lambdas[i]``."""
    return _normalize(nu_vector(family, lambdas, evaluator), family)


def combine_word(
    family: PolicyFamily, word: WordLike, evaluator: Evaluator = "determinant"
) -> Distribution:
    """Stationary distribution of the deterministic combination ``word``."""
    return combine_randomized(family, MixtureVector.for_word(word), evaluator)


def enumerate_gamma(family: PolicyFamily, k: int) -> list[Permutation]:
    """Permutations ``g`` with ``g[k] = n`` such that base policy ``j`` plays 0 at
    ``s_{g[j]}`` for every ``j != k``.

    The family must already be relabeled so that the target word is all ones
    (see :func:`~mdpmix.model.relabel_to_ones`).
    """
    return enumerate_gamma_words(family.word_matrix(), k)


def gamma_sets(family: PolicyFamily, word: WordLike) -> list[list[Permutation]]:
    """Restricted permutation sets for every base policy, relative to target ``word``."""
    relabeled = relabel_to_ones(family, word)
    return [enumerate_gamma(relabeled, k) for k in range(family.n + 1)]


def nu_gamma(family: PolicyFamily, word: WordLike) -> NuVector:
    """Weights of the restricted formula for deterministic target ``word``.

    Only permutations whose factors are all nonzero survive; each factor is a
    plain base-distribution value, so every term is a signed product of
    probabilities.
    """
    bits = parse_word(word)
    if len(bits) != family.n:
        raise ModelError(f"word length {len(bits)} does not match n={family.n}")
    sets = gamma_sets(family, bits)
    if not any(sets):
        raise EmptyNumerator(f"no admissible permutations for target {bits}" + _face_hint(family))
    M = family.mu_matrix()
    diff = family.diff_states
    n = family.n
    nu = np.zeros(family.num_states)
    for k, perms in enumerate(sets):
        for g in perms:
            prod = 1.0
            for j in range(n + 1):
                if j != k:
                    prod *= M[j, diff[g.image[j]]]
            nu += g.sign * prod * M[k]
    F = f_kernel(family, MixtureVector.for_word(bits)).values
    return NuVector(nu, float(nu.sum()), term_scale(F, M))


def combine_deterministic_gamma(family: PolicyFamily, word: WordLike) -> Distribution:
    """Stationary distribution of combination ``word`` via the restricted permutation sets."""
    return _normalize(nu_gamma(family, word), family)


def _cancellation_terms(family: PolicyFamily, lambdas, i: int) -> np.ndarray:
    F = f_kernel(family, lambdas).values
    n = F.shape[1]
    if not 0 <= i < n:
        raise ValueError(f"state position {i} out of range 0..{n - 1}")
    terms = []
    for k in range(n + 1):
        rows = [j for j in range(n + 1) if j != k]
        for img, sign in iter_gamma_prime(n, k):
            prod = F[k, i]
            for j in rows:
                prod *= F[j, img[j]]
            terms.append(sign * prod)
    return np.asarray(terms)


def cancellation_check(family: PolicyFamily, lambdas, i: int) -> float:
    """Signed permutation sum with the ``mu_k(s)`` slot replaced by ``f(i, k)``.

    This is the determinant of ``[F | F[:, i]]``, which has a repeated column,
    so the result should vanish up to rounding. ``i`` is 0-based.
    """
    return float(_cancellation_terms(family, lambdas, i).sum())


def cancellation_scale(family: PolicyFamily, lambdas, i: int) -> float:
    """Sum of absolute values of the terms in :func:`cancellation_check`."""
    return float(np.abs(_cancellation_terms(family, lambdas, i)).sum())
