"""Verification and benchmark harness behind ``mdpmix verify`` / ``mdpmix bench``."""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .combine import combine_deterministic_gamma, combine_randomized, combine_word, nu_vector
from .errors import NumericalError
from .model import (
    MixtureVector,
    PolicyFamily,
    Word,
    all_words,
    format_word,
    induced_matrix,
    is_combination,
    mixed_matrix,
    word_to_policy,
)
from .permutations import MAX_ENUM_N
from .randgen import GenSpec, PortableRng, random_family
from .statdist import residual, stationary_linear

MAX_VERIFY_N = 20
MAX_BENCH_N = 8
BENCH_AGREE_TOL = 1e-9


@dataclass
class WordRecord:
    word: str
    max_error: float
    formula_residual: float
    oracle_residual: float
    formula_seconds: float
    oracle_seconds: float
    error: str | None = None


@dataclass
class VerifyReport:
    tolerance: float
    method: str
    records: list[WordRecord] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def max_error(self) -> float:
        return max((r.max_error for r in self.records), default=0.0)

    @property
    def passed(self) -> bool:
        return all(r.max_error <= self.tolerance for r in self.records)

    def to_dict(self) -> dict:
        return {
            "records": [asdict(r) for r in self.records],
            "skipped_non_combinations": self.skipped,
            "summary": {
                "method": self.method,
                "words_checked": len(self.records),
                "max_error": self.max_error,
                "tolerance": self.tolerance,
                "pass": self.passed,
            },
        }


def formula_for_word(family: PolicyFamily, word: Word, method: str):
    if method == "gamma":
        return combine_deterministic_gamma(family, word)
    return combine_word(family, word, method)


def check_word(family: PolicyFamily, word: Word, method: str = "determinant") -> WordRecord:
    P = induced_matrix(family.mdp, word_to_policy(family, word))
    t0 = time.perf_counter()
    oracle = stationary_linear(P)
    t1 = time.perf_counter()
    try:
        mu = formula_for_word(family, word, method)
    except NumericalError as exc:
        return WordRecord(
            format_word(word), float("inf"), float("inf"), residual(P, oracle),
            0.0, t1 - t0, f"{type(exc).__name__}: {exc}",
        )
    t2 = time.perf_counter()
    return WordRecord(
        word=format_word(word),
        max_error=float(np.max(np.abs(mu.probs - oracle.probs))),
        formula_residual=residual(P, mu),
        oracle_residual=residual(P, oracle),
        formula_seconds=t2 - t1,
        oracle_seconds=t1 - t0,
    )


def verify_family(
    family: PolicyFamily,
    words=None,
    tol: float = 1e-9,
    method: str = "determinant",
    jobs: int = 1,
) -> VerifyReport:
    """Compare the formula with a direct solve for each word.

    With ``words=None`` every combination word is checked. Records are
    sorted by word whatever the execution order.
    """
    if words is None:
        if family.n > MAX_VERIFY_N:
            raise ValueError(f"n={family.n} exceeds the all-words limit {MAX_VERIFY_N}")
        candidates = list(all_words(family.n))
    else:
        candidates = list(words)
    report = VerifyReport(tolerance=tol, method=method)
    todo = []
    for w in candidates:
        if is_combination(family, w):
            todo.append(w)
        else:
            report.skipped.append(format_word(w))
    family.distributions  # fill the cache before fanning out
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda w: check_word(family, w, method), todo))
    else:
        records = [check_word(family, w, method) for w in todo]
    report.records = sorted(records, key=lambda r: r.word)
    report.skipped.sort()
    return report


def _median_time(fn, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench(n_values, num_states: int = 10, seed: int = 0, reps: int = 3) -> dict:
    """Time permsum, determinant and direct solve per ``n``.

    All three results are cross-checked before any timing is taken; a
    disagreement above ``BENCH_AGREE_TOL`` marks the row as failed.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    rows = []
    for n in n_values:
        if not 0 <= n <= min(MAX_BENCH_N, MAX_ENUM_N):
            raise ValueError(f"n={n} outside 0..{MAX_BENCH_N}")
        family = random_family(GenSpec(max(num_states, n + 1), n, seed + n))
        rng = PortableRng(seed + n)
        lam = MixtureVector([0.05 + 0.9 * rng.uniform() for _ in range(n)])
        via_perm = combine_randomized(family, lam, "permsum").probs
        via_det = combine_randomized(family, lam, "determinant").probs
        direct = stationary_linear(mixed_matrix(family, lam)).probs
        disagreement = float(
            max(np.max(np.abs(via_perm - direct)), np.max(np.abs(via_det - direct)))
        )
        t_perm = _median_time(lambda: nu_vector(family, lam, "permsum").normalized(), reps)
        t_det = _median_time(lambda: nu_vector(family, lam, "determinant").normalized(), reps)
        t_direct = _median_time(lambda: stationary_linear(mixed_matrix(family, lam)), reps)
        rows.append(
            {
                "n": n,
                "num_states": family.num_states,
                "permsum_s": t_perm,
                "determinant_s": t_det,
                "direct_s": t_direct,
                "permsum_over_determinant": t_perm / t_det if t_det > 0 else float("inf"),
                "max_disagreement": disagreement,
                "cross_check": disagreement <= BENCH_AGREE_TOL,
            }
        )
    ratios = [r["permsum_over_determinant"] for r in rows]
    return {
        "rows": rows,
        "summary": {
            "cross_check": all(r["cross_check"] for r in rows),
            "ratio_monotone": all(a <= b for a, b in zip(ratios, ratios[1:])),
            "reps": reps,
            "seed": seed,
        },
    }
