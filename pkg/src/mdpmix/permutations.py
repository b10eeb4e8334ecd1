"""Permutations with sign, and the sets used by the combination formula.

Permutations act on ``{0, ..., n}`` (0-based); :meth:`Permutation.one_based`
gives the 1-based image for display.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_ENUM_N = 10


@dataclass(frozen=True)
class Permutation:
    image: tuple[int, ...]
    sign: int

    def one_based(self) -> tuple[int, ...]:
        return tuple(v + 1 for v in self.image)

    def __len__(self) -> int:
        return len(self.image)


def cycle_sign(image: Sequence[int]) -> int:
    """Sign of a permutation from its cycle decomposition."""
    seen = [False] * len(image)
    sign = 1
    for start in range(len(image)):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            v = image[v]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def heap_permutations(items: Sequence[int]) -> Iterator[tuple[list[int], int]]:
    """Yield every arrangement of ``items`` with its sign relative to the input order.

    Iterative Heap's algorithm: consecutive arrangements differ by a single
    transposition, so the sign flips at every step. The yielded list is
    reused; copy it if you keep it.
    """
    a = list(items)
    n = len(a)
    c = [0] * n
    sign = 1
    yield a, sign
    i = 1
    while i < n:
        if c[i] < i:
            if i % 2 == 0:
                a[0], a[i] = a[i], a[0]
            else:
                a[c[i]], a[i] = a[i], a[c[i]]
            sign = -sign
            yield a, sign
            c[i] += 1
            i = 1
        else:
            c[i] = 0
            i += 1


def _check_nk(n: int, k: int) -> None:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > MAX_ENUM_N:
        raise ValueError(f"n={n} too large for permutation enumeration (max {MAX_ENUM_N})")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range 0..{n}")


def iter_gamma_prime(n: int, k: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Permutations ``g`` of ``{0..n}`` with ``g[k] == n``, as ``(image, sign)``."""
    _check_nk(n, k)
    slots = [j for j in range(n + 1) if j != k]
    # start from [0, .., k-1, n, k, .., n-1]: an (n-k+1)-cycle
    base_sign = -1 if (n - k) % 2 else 1
    image = [0] * (n + 1)
    image[k] = n
    for values, sign in heap_permutations(range(n)):
        for slot, v in zip(slots, values):
            image[slot] = v
        yield tuple(image), base_sign * sign


def enumerate_gamma_prime(n: int, k: int) -> list[Permutation]:
    """All ``n!`` permutations sending ``k`` to ``n``."""
    return [Permutation(img, s) for img, s in iter_gamma_prime(n, k)]


def enumerate_gamma_words(words: np.ndarray, k: int) -> list[Permutation]:
    """Members of :func:`enumerate_gamma_prime` where every row ``j != k``
    of ``words`` has a 0 in column ``g[j]``.

    ``words`` is the ``(n + 1, n)`` 0/1 matrix of base words, already
    relabeled so that the target word is all ones.
    """
    words = np.asarray(words, dtype=int)
    n = words.shape[0] - 1
    rows = [j for j in range(n + 1) if j != k]
    out = []
    for img, s in iter_gamma_prime(n, k):
        if all(words[j, img[j]] == 0 for j in rows):
            out.append(Permutation(img, s))
    return out
