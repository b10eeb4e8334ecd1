"""Core data model: MDPs, deterministic policies, policy families.

States and actions are dense 0-based indices. Transition probabilities are
held in a padded array ``transitions[i, a, j]``; slots with
``a >= actions_per_state[i]`` are zero and never read.

A *policy family* fixes ``n`` differing states ``s_1..s_n`` and ``n + 1``
distinct binary words, word ``k`` listing the action (0 or 1) that base
policy ``k`` plays at each differing state. Off the differing states every
policy follows ``shared_policy``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ModelError

ROW_SUM_TOL = 1e-12
DIST_SUM_TOL = 1e-10
BASE_RESIDUAL_TOL = 1e-9

Word = tuple[int, ...]
WordLike = Union[str, Sequence[int]]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def parse_word(word: WordLike) -> Word:
    """Turn ``"0110"`` or ``[0, 1, 1, 0]`` into a tuple of bits."""
    if isinstance(word, str):
        if any(c not in "01" for c in word):
            raise ModelError(f"word {word!r} is not binary")
        return tuple(int(c) for c in word)
    bits = tuple(int(b) for b in word)
    if any(b not in (0, 1) for b in bits):
        raise ModelError(f"word {list(word)!r} is not binary")
    return bits


def format_word(word: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in word)


@dataclass(frozen=True, eq=False)
class Mdp:
    """Finite MDP without rewards.

    Parameters
    ----------
    transitions : ndarray, shape (N, A, N)
        ``transitions[i, a, j]`` is the probability of moving from ``i`` to
        ``j`` under action ``a``. Padding slots must be zero.
    actions_per_state : tuple of int
        Number of actions available in each state (at least one).
    initial_distribution : ndarray or None
        Start distribution. Kept for completeness; stationary analysis
        does not depend on it.
    """

    transitions: np.ndarray
    actions_per_state: tuple[int, ...]
    initial_distribution: np.ndarray | None = None

    def __post_init__(self) -> None:
        t = _frozen(self.transitions)
        if t.ndim != 3 or t.shape[0] != t.shape[2] or t.shape[0] == 0:
            raise ModelError(f"transitions must have shape (N, A, N), got {t.shape}")
        aps = tuple(int(a) for a in self.actions_per_state)
        if len(aps) != t.shape[0]:
            raise ModelError("actions_per_state length does not match num_states")
        if any(a < 1 or a > t.shape[1] for a in aps):
            raise ModelError(f"action counts {aps} out of range 1..{t.shape[1]}")
        object.__setattr__(self, "transitions", t)
        object.__setattr__(self, "actions_per_state", aps)
        if self.initial_distribution is not None:
            mu0 = _frozen(self.initial_distribution)
            if mu0.shape != (t.shape[0],):
                raise ModelError("initial_distribution has wrong length")
            object.__setattr__(self, "initial_distribution", mu0)

    @classmethod
    def from_nested(
        cls,
        transitions: Sequence[Sequence[Sequence[float]]],
        initial_distribution: Sequence[float] | None = None,
    ) -> "Mdp":
        """Build from the ragged ``transitions[i][a][j]`` layout used in JSON."""
        n = len(transitions)
        if n == 0:
            raise ModelError("MDP needs at least one state")
        aps = []
        for i, rows in enumerate(transitions):
            if len(rows) == 0:
                raise ModelError(f"state {i} has no actions")
            for a, row in enumerate(rows):
                if len(row) != n:
                    raise ModelError(
                        f"row ({i},{a}) has length {len(row)}, expected {n}"
                    )
            aps.append(len(rows))
        t = np.zeros((n, max(aps), n))
        for i, rows in enumerate(transitions):
            t[i, : len(rows)] = np.asarray(rows, dtype=float)
        return cls(t, tuple(aps), initial_distribution)

    @property
    def num_states(self) -> int:
        return self.transitions.shape[0]

    def rows(self, state: int) -> np.ndarray:
        """Transition rows of ``state``, one per available action."""
        return self.transitions[state, : self.actions_per_state[state]]

    def to_nested(self) -> list[list[list[float]]]:
        return [self.rows(i).tolist() for i in range(self.num_states)]


@dataclass(frozen=True)
class Issue:
    kind: str
    state: int
    action: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(i.message for i in self.issues)


def validate_mdp(mdp: Mdp, tol: float = ROW_SUM_TOL) -> ValidationReport:
    """Check every available transition row for range and row-sum errors."""
    issues = []
    for i in range(mdp.num_states):
        for a, row in enumerate(mdp.rows(i)):
            if not np.all(np.isfinite(row)):
                issues.append(Issue("range", i, a, f"non-finite entry at ({i},{a})"))
                continue
            bad = np.flatnonzero((row < 0.0) | (row > 1.0))
            for j in bad:
                issues.append(
                    Issue(
                        "range",
                        i,
                        a,
                        f"entry {row[j]:.12g} outside [0,1] at ({i},{a}) -> {j}",
                    )
                )
            s = float(row.sum())
            if abs(s - 1.0) > tol:
                issues.append(Issue("row_sum", i, a, f"row sum {s:.12g} at ({i},{a})"))
    if mdp.initial_distribution is not None:
        mu0 = mdp.initial_distribution
        if np.any(mu0 < 0) or abs(mu0.sum() - 1.0) > DIST_SUM_TOL:
            issues.append(Issue("initial", -1, -1, "initial distribution is not a distribution"))
    return ValidationReport(tuple(issues))


def checked_mdp(mdp: Mdp) -> Mdp:
    """Reject an invalid MDP, otherwise return it with rows renormalized.

    Rows within the row-sum tolerance are divided by their sum so that later
    arithmetic starts from exactly stochastic data.
    """
    report = validate_mdp(mdp)
    if not report.ok:
        raise ModelError(f"invalid MDP:\n{report}")
    t = mdp.transitions.copy()
    for i, k in enumerate(mdp.actions_per_state):
        t[i, :k] /= t[i, :k].sum(axis=1, keepdims=True)
    return Mdp(t, mdp.actions_per_state, mdp.initial_distribution)


@dataclass(frozen=True)
class DeterministicPolicy:
    """Action index chosen in every state."""

    choice: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "choice", tuple(int(a) for a in self.choice))

    def __len__(self) -> int:
        return len(self.choice)

    def __getitem__(self, state: int) -> int:
        return self.choice[state]

    def check(self, mdp: Mdp) -> None:
        if len(self.choice) != mdp.num_states:
            raise ModelError(
                f"policy covers {len(self.choice)} states, MDP has {mdp.num_states}"
            )
        for i, a in enumerate(self.choice):
            if not 0 <= a < mdp.actions_per_state[i]:
                raise ModelError(
                    f"action {a} out of range in state {i} "
                    f"({mdp.actions_per_state[i]} available)"
                )


def induced_matrix(mdp: Mdp, policy: DeterministicPolicy) -> np.ndarray:
    """Transition matrix of the chain obtained by following ``policy``."""
    policy.check(mdp)
    idx = np.arange(mdp.num_states)
    return mdp.transitions[idx, np.asarray(policy.choice, dtype=int), :].copy()


@dataclass(frozen=True, eq=False)
class Distribution:
    """Strictly positive probability vector over the states."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = _frozen(self.probs)
        if p.ndim != 1 or p.size == 0:
            raise ModelError("distribution must be a non-empty vector")
        if not np.all(np.isfinite(p)):
            raise ModelError("distribution has non-finite entries")
        if abs(p.sum() - 1.0) > DIST_SUM_TOL:
            raise ModelError(f"distribution sums to {p.sum():.15g}")
        if np.any(p <= 0.0):
            raise ModelError("distribution is not strictly positive")
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return self.probs.size

    def __getitem__(self, state):
        return self.probs[state]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)


@dataclass(frozen=True, eq=False)
class MixtureVector:
    """Per differing state, the probability of playing action 0."""

    lambdas: np.ndarray

    def __post_init__(self) -> None:
        lam = _frozen(np.atleast_1d(np.asarray(self.lambdas, dtype=float)))
        if lam.ndim != 1:
            raise ModelError("lambdas must be a vector")
        if np.any(~np.isfinite(lam)) or np.any(lam < 0.0) or np.any(lam > 1.0):
            raise ModelError(f"lambdas {lam.tolist()} outside [0, 1]")
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def for_word(cls, word: WordLike) -> "MixtureVector":
        """The degenerate mixture that plays exactly ``word``."""
        return cls(1.0 - np.asarray(parse_word(word), dtype=float))

    def __len__(self) -> int:
        return self.lambdas.size


@dataclass(frozen=True, eq=False)
class PolicyFamily:
    """``n + 1`` distinct policies that differ only on ``diff_states``.

    ``base_distributions`` may be left out; they are then solved on first
    use and cached (see :attr:`distributions`).
    """

    mdp: Mdp
    diff_states: tuple[int, ...]
    base_words: tuple[Word, ...]
    shared_policy: DeterministicPolicy
    base_distributions: tuple[Distribution, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        mdp = self.mdp
        diff = tuple(int(s) for s in self.diff_states)
        n = len(diff)
        if len(set(diff)) != n:
            raise ModelError(f"differing states {diff} are not distinct")
        for s in diff:
            if not 0 <= s < mdp.num_states:
                raise ModelError(f"differing state {s} out of range")
            if mdp.actions_per_state[s] < 2:
                raise ModelError(f"differing state {s} offers fewer than 2 actions")
        words = tuple(parse_word(w) for w in self.base_words)
        if len(words) != n + 1:
            raise ModelError(f"need exactly {n + 1} base words, got {len(words)}")
        if any(len(w) != n for w in words):
            raise ModelError(f"every base word must have length {n}")
        if len(set(words)) != len(words):
            raise ModelError("base words are not pairwise distinct")
        shared = self.shared_policy
        if not isinstance(shared, DeterministicPolicy):
            shared = DeterministicPolicy(tuple(shared))
        shared.check(mdp)
        report = validate_mdp(mdp)
        if not report.ok:
            raise ModelError(f"invalid MDP:\n{report}")
        object.__setattr__(self, "diff_states", diff)
        object.__setattr__(self, "base_words", words)
        object.__setattr__(self, "shared_policy", shared)
        if self.base_distributions is not None:
            dists = tuple(
                d if isinstance(d, Distribution) else Distribution(d)
                for d in self.base_distributions
            )
            if len(dists) != n + 1:
                raise ModelError(f"need {n + 1} base distributions, got {len(dists)}")
            from .statdist import residual

            for k, d in enumerate(dists):
                if len(d) != mdp.num_states:
                    raise ModelError(f"base distribution {k} has wrong length")
                r = residual(self.base_matrix(k), d)
                if r > BASE_RESIDUAL_TOL:
                    raise ModelError(
                        f"base distribution {k} is not stationary (residual {r:.3g})"
                    )
            object.__setattr__(self, "base_distributions", dists)

    @property
    def n(self) -> int:
        return len(self.diff_states)

    @property
    def num_states(self) -> int:
        return self.mdp.num_states

    def word_matrix(self) -> np.ndarray:
        """Base words stacked as an ``(n + 1, n)`` integer array."""
        return np.array(self.base_words, dtype=int).reshape(self.n + 1, self.n)

    @cached_property
    def overfull_face(self) -> tuple[dict[int, int], int] | None:
        return overfull_face(self.base_words)

    @property
    def is_generic(self) -> bool:
        """False if some face of the cube holds redundant base words (see :func:`overfull_face`)."""
        return self.overfull_face is None

    def base_policy(self, k: int) -> DeterministicPolicy:
        return word_to_policy(self, self.base_words[k])

    def base_matrix(self, k: int) -> np.ndarray:
        return induced_matrix(self.mdp, self.base_policy(k))

    @cached_property
    def distributions(self) -> tuple[Distribution, ...]:
        """Base stationary distributions, supplied or solved once."""
        if self.base_distributions is not None:
            return self.base_distributions
        from .statdist import stationary_linear

        return tuple(stationary_linear(self.base_matrix(k)) for k in range(self.n + 1))

    def mu_matrix(self) -> np.ndarray:
        """Base distributions stacked as an ``(n + 1, N)`` array."""
        return np.vstack([d.probs for d in self.distributions])

    def with_distributions(self) -> "PolicyFamily":
        """Copy of the family with its base distributions attached."""
        return PolicyFamily(
            self.mdp, self.diff_states, self.base_words, self.shared_policy,
            self.distributions,
        )


def overfull_face(words: Sequence[Sequence[int]]) -> tuple[dict[int, int], int] | None:
    """Find a face of the cube holding too many base words.

    A face fixes some coordinates and leaves ``d`` free. If it contains more
    than ``d + 1`` of the words, those words carry redundant information and
    the combination formula degenerates (its weights vanish identically).
    Returns ``(fixed coordinates -> bit, word count)`` for the first such face
    found, or ``None`` if the word set is generic.
    """
    words = [tuple(w) for w in words]
    if not words:
        return None
    n = len(words[0])
    ints = [sum(b << (n - 1 - j) for j, b in enumerate(w)) for w in words]
    for mask in range(1, 2**n):
        free = n - bin(mask).count("1")
        counts: dict[int, int] = {}
        for x in ints:
            key = x & mask
            counts[key] = counts.get(key, 0) + 1
        for key, c in counts.items():
            if c > free + 1:
                fixed = {
                    j: (key >> (n - 1 - j)) & 1 for j in range(n) if mask >> (n - 1 - j) & 1
                }
                return fixed, c
    return None


def word_to_policy(family: PolicyFamily, word: WordLike) -> DeterministicPolicy:
    """The policy playing ``word`` on the differing states, ``shared_policy`` elsewhere."""
    bits = parse_word(word)
    if len(bits) != family.n:
        raise ModelError(f"word length {len(bits)} does not match n={family.n}")
    choice = list(family.shared_policy.choice)
    for s, b in zip(family.diff_states, bits):
        choice[s] = b
    return DeterministicPolicy(tuple(choice))


def is_combination(family: PolicyFamily, word: WordLike) -> bool:
    """True if every bit of ``word`` is played by some base policy at that position."""
    bits = parse_word(word)
    if len(bits) != family.n:
        raise ModelError(f"word length {len(bits)} does not match n={family.n}")
    return all(any(w[j] == b for w in family.base_words) for j, b in enumerate(bits))


def mixed_matrix(family: PolicyFamily, lambdas: MixtureVector | Sequence[float]) -> np.ndarray:
    """Transition matrix of the randomized policy.

    Row ``s_i`` is ``lambda_i * p_0(s_i, .) + (1 - lambda_i) * p_1(s_i, .)``;
    all other rows follow ``shared_policy``.
    """
    if not isinstance(lambdas, MixtureVector):
        lambdas = MixtureVector(lambdas)
    if len(lambdas) != family.n:
        raise ModelError(f"expected {family.n} mixture weights, got {len(lambdas)}")
    P = induced_matrix(family.mdp, family.shared_policy)
    t = family.mdp.transitions
    for s, lam in zip(family.diff_states, lambdas.lambdas):
        P[s] = lam * t[s, 0] + (1.0 - lam) * t[s, 1]
    return P


def all_words(n: int) -> Iterable[Word]:
    """Every binary word of length ``n``, in lexicographic order."""
    for x in range(2**n):
        yield tuple((x >> (n - 1 - j)) & 1 for j in range(n))


def relabel_to_ones(family: PolicyFamily, word: WordLike) -> PolicyFamily:
    """Swap actions 0 and 1 wherever ``word`` has a 0.

    The returned family describes the same policies and has the same base
    distributions, but under the new action names ``word`` reads ``11...1``.
    """
    bits = parse_word(word)
    if len(bits) != family.n:
        raise ModelError(f"word length {len(bits)} does not match n={family.n}")
    t = family.mdp.transitions.copy()
    flip = [j for j, b in enumerate(bits) if b == 0]
    for j in flip:
        s = family.diff_states[j]
        t[s, [0, 1]] = t[s, [1, 0]]
    mdp = Mdp(t, family.mdp.actions_per_state, family.mdp.initial_distribution)
    words = tuple(
        tuple(1 - w[j] if bits[j] == 0 else w[j] for j in range(family.n))
        for w in family.base_words
    )
    return PolicyFamily(
        mdp, family.diff_states, words, family.shared_policy, family.distributions
    )
