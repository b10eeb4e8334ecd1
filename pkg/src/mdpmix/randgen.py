"""Seeded generation of unichain MDPs and policy families.

Random stream
-------------
All randomness comes from PCG64 (128-bit LCG state, XSL-RR output to 64
bits), driven through :class:`numpy.random.PCG64` with its state set
explicitly rather than through numpy's seed hashing::

    inc   = (STREAM << 1) | 1
    state = ((0 * MULT + inc) + seed) * MULT + inc       (mod 2**128)

which is the reference ``pcg64_srandom(seed, STREAM)``. Each raw draw
advances the LCG once and returns the XSL-RR output of the new state.
Derived draws:

* ``uniform``: ``(raw >> 11) * 2**-53``
* ``below(m)``: reject ``raw >= 2**64 - 2**64 % m``, return ``raw % m``
* ``exponential``: ``-log(1 - uniform)``

Instance layout (scheme ``dirichlet-floor-v1``), in draw order:

1. ``n`` distinct differing states by ``below(N)``, duplicates redrawn.
2. For each state ``i`` and each of its actions, ``N`` exponentials,
   normalized, then ``row = min_prob + (1 - N * min_prob) * row``.
   Differing states get two actions, the others ``1 + extra_actions``.
3. If ``near_degenerate = d > 0``, action 1 at each differing state is
   replaced by ``d * row0 + (1 - d) * row1``.
4. Shared action per non-differing state with more than one action,
   by ``below(actions)``; everything else plays action 0.
5. ``n + 1`` distinct words by ``below(2**n)``, duplicates redrawn; the
   integer is written most-significant bit first. Unless
   ``allow_degenerate`` is set, a word set with an overfull face (see
   :func:`mdpmix.model.overfull_face`) is discarded and the whole set is
   redrawn, which keeps the result uniform over admissible sets.

Every transition probability is at least ``min_prob`` > 0, so every policy
induces an irreducible chain.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .model import DeterministicPolicy, Mdp, PolicyFamily, Word, overfull_face

RNG_NAME = "pcg64-xsl-rr-128/64"
SCHEME = "dirichlet-floor-v1"
PCG_MULT = 0x2360ED051FC65DA44385DF649FCCF645
PCG_STREAM = 0xDA3E39CB94B95BDB
_MASK128 = (1 << 128) - 1


class PortableRng:
    """Minimal, documented draws on top of a PCG64 stream."""

    def __init__(self, seed: int, stream: int = PCG_STREAM) -> None:
        inc = ((stream << 1) | 1) & _MASK128
        state = (0 * PCG_MULT + inc) & _MASK128
        state = (state + (seed & _MASK128)) & _MASK128
        state = (state * PCG_MULT + inc) & _MASK128
        self._bitgen = np.random.PCG64()
        self._bitgen.state = {
            "bit_generator": "PCG64",
            "state": {"state": state, "inc": inc},
            "has_uint32": 0,
            "uinteger": 0,
        }

    def raw(self) -> int:
        return int(self._bitgen.random_raw())

    def uniform(self) -> float:
        return (self.raw() >> 11) * 2.0**-53

    def below(self, m: int) -> int:
        if m < 1:
            raise ValueError("m must be positive")
        limit = (1 << 64) - (1 << 64) % m
        while True:
            r = self.raw()
            if r < limit:
                return r % m

    def exponential(self) -> float:
        return -math.log1p(-self.uniform())

    def distinct(self, count: int, m: int) -> list[int]:
        out: list[int] = []
        seen = set()
        while len(out) < count:
            v = self.below(m)
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out


@dataclass(frozen=True)
class GenSpec:
    num_states: int
    num_diff_states: int
    seed: int
    min_prob: float = 0.01
    extra_actions: int = 0
    near_degenerate: float = 0.0
    allow_degenerate: bool = False

    def __post_init__(self) -> None:
        N, n = self.num_states, self.num_diff_states
        if N < 1 or n < 0 or n >= N:
            raise ValueError(f"need 0 <= n < N, got N={N}, n={n}")
        if not 0.0 < self.min_prob or self.min_prob * N >= 1.0:
            raise ValueError(
                f"min_prob={self.min_prob} infeasible for N={N} (need 0 < min_prob < 1/N)"
            )
        if self.extra_actions < 0:
            raise ValueError("extra_actions must be non-negative")
        if not 0.0 <= self.near_degenerate < 1.0:
            raise ValueError("near_degenerate must lie in [0, 1)")
        if n + 1 > 2**n:
            raise ValueError(f"cannot draw {n + 1} distinct words of length {n}")
        if n > 62:
            raise ValueError("n > 62 is not supported")


@dataclass(frozen=True, eq=False)
class Instance:
    mdp: Mdp
    diff_states: tuple[int, ...]
    words: tuple[Word, ...]
    shared_policy: DeterministicPolicy


def random_instance(spec: GenSpec) -> Instance:
    rng = PortableRng(spec.seed)
    N, n = spec.num_states, spec.num_diff_states
    diff = tuple(rng.distinct(n, N))
    diff_set = set(diff)
    aps = [2 if i in diff_set else 1 + spec.extra_actions for i in range(N)]
    t = np.zeros((N, max(aps), N))
    spread = 1.0 - N * spec.min_prob
    for i in range(N):
        for a in range(aps[i]):
            row = np.array([rng.exponential() for _ in range(N)])
            t[i, a] = spec.min_prob + spread * (row / row.sum())
    if spec.near_degenerate > 0.0:
        d = spec.near_degenerate
        for s in diff:
            t[s, 1] = d * t[s, 0] + (1.0 - d) * t[s, 1]
    shared = [
        rng.below(aps[i]) if i not in diff_set and aps[i] > 1 else 0 for i in range(N)
    ]
    while True:
        words = tuple(
            tuple((x >> (n - 1 - j)) & 1 for j in range(n))
            for x in rng.distinct(n + 1, 2**n)
        )
        if spec.allow_degenerate or overfull_face(words) is None:
            break
    return Instance(Mdp(t, tuple(aps)), diff, words, DeterministicPolicy(tuple(shared)))


def random_unichain_mdp(spec: GenSpec) -> Mdp:
    """MDP whose every transition probability is at least ``spec.min_prob``."""
    return random_instance(spec).mdp


def random_family(spec: GenSpec, words=None) -> PolicyFamily:
    """Family over :func:`random_unichain_mdp` with base distributions attached.

    ``words`` overrides the sampled base words (the MDP and differing states
    are unchanged).
    """
    inst = random_instance(spec)
    family = PolicyFamily(
        inst.mdp,
        inst.diff_states,
        inst.words if words is None else tuple(words),
        inst.shared_policy,
    )
    return family.with_distributions()


def gen_meta(spec: GenSpec) -> dict:
    return {
        "rng": RNG_NAME,
        "rng_stream": hex(PCG_STREAM),
        "scheme": SCHEME,
        "spec": asdict(spec),
    }
