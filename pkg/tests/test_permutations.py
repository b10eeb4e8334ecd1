import itertools
import math

import pytest
from hypothesis import given, strategies as st

from mdpmix.permutations import (
    cycle_sign,
    enumerate_gamma_prime,
    enumerate_gamma_words,
    heap_permutations,
)


def inversion_sign(image):
    inv = sum(1 for i, j in itertools.combinations(range(len(image)), 2) if image[i] > image[j])
    return -1 if inv % 2 else 1


@pytest.mark.parametrize("n", range(0, 7))
def test_heap_covers_all_with_correct_sign(n):
    seen = set()
    for arr, sign in heap_permutations(range(n)):
        seen.add(tuple(arr))
        assert sign == inversion_sign(arr)
    assert len(seen) == math.factorial(n)


@given(st.permutations(list(range(8))))
def test_cycle_sign_matches_inversions(perm):
    assert cycle_sign(perm) == inversion_sign(perm)


def test_gamma_prime_small_cases():
    (only,) = enumerate_gamma_prime(1, 0)
    assert only.one_based() == (2, 1) and only.sign == -1
    got = {(p.one_based(), p.sign) for p in enumerate_gamma_prime(2, 2)}
    assert got == {((1, 2, 3), 1), ((2, 1, 3), -1)}
    for k in range(4):
        perms = enumerate_gamma_prime(3, k)
        assert len(perms) == 6
        assert sum(p.sign for p in perms) == 0


@pytest.mark.parametrize("n", range(0, 6))
def test_gamma_prime_against_brute_force(n):
    for k in range(n + 1):
        brute = {
            (p, inversion_sign(p))
            for p in itertools.permutations(range(n + 1))
            if p[k] == n
        }
        ours = [(p.image, p.sign) for p in enumerate_gamma_prime(n, k)]
        assert len(ours) == len(set(ours)) == math.factorial(n)
        assert set(ours) == brute


def test_gamma_prime_guards():
    with pytest.raises(ValueError):
        enumerate_gamma_prime(11, 0)
    with pytest.raises(ValueError):
        enumerate_gamma_prime(3, 4)


def test_gamma_words_worked_example():
    words = [[0, 0, 0], [0, 1, 0], [1, 0, 1], [1, 1, 0]]
    sets = [enumerate_gamma_words(words, k) for k in range(4)]
    assert [len(s) for s in sets] == [1, 1, 1, 2]
    assert [p.one_based() for p in sets[2]] == [(2, 1, 4, 3)]
    assert sets[2][0].sign == 1


def test_gamma_words_empty_when_row_has_no_zero():
    # row 1 is all ones, so any set that must use it is empty
    words = [[0, 0], [1, 1], [0, 1]]
    assert enumerate_gamma_words(words, 0) == []
    assert enumerate_gamma_words(words, 2) == []
    assert len(enumerate_gamma_words(words, 1)) == 1
