import itertools

import numpy as np
import pytest

from mdpmix.model import DeterministicPolicy, Mdp, PolicyFamily
from mdpmix.randgen import GenSpec, random_family

EXAMPLE_WORDS = ("000", "010", "101", "110")


def two_state(a=0.3, b=0.6):
    return np.array([[1 - a, a], [b, 1 - b]])


def example_family(seed, num_states=6):
    """Random MDP with the four base words of the worked example."""
    return random_family(GenSpec(num_states, 3, seed), words=EXAMPLE_WORDS)


def leibniz_det(A):
    """Determinant by the full Leibniz sum with inversion-count signs."""
    n = A.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1.0
        for i in range(n):
            prod *= A[i, perm[i]]
        total += (-1) ** inv * prod
    return total


def seeded_families(count, n_values=range(1, 6), state_range=(3, 10), seed0=1000):
    """Deterministic sweep of families over (N, n)."""
    out = []
    rng = np.random.default_rng(seed0)
    seed = seed0
    while len(out) < count:
        n = int(n_values[len(out) % len(n_values)])
        N = int(rng.integers(max(state_range[0], n + 1), state_range[1] + 1))
        out.append(random_family(GenSpec(N, n, seed)))
        seed += 1
    return out


@pytest.fixture
def hand_family():
    """3-state MDP, state 1 differs, n = 1."""
    t = np.zeros((3, 2, 3))
    t[0, 0] = [0.2, 0.5, 0.3]
    t[1, 0] = [0.6, 0.1, 0.3]
    t[1, 1] = [0.1, 0.1, 0.8]
    t[2, 0] = [0.3, 0.3, 0.4]
    mdp = Mdp(t, (1, 2, 1))
    return PolicyFamily(mdp, (1,), ("0", "1"), DeterministicPolicy((0, 0, 0)))


@pytest.fixture
def criterion(capsys):
    """Print one PASS/FAIL line per acceptance criterion, bypassing capture."""

    def report(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return report
