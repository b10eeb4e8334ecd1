"""Command-line interface.

Exit codes: 0 success, 1 validation or verification failure, 2 usage or
input error, 3 numerical degeneracy. Only the JSON payload goes to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .combine import combine_deterministic_gamma, combine_randomized
from .errors import DegenerateDenominator, ModelError, NumericalError
from .model import (
    DeterministicPolicy,
    MixtureVector,
    PolicyFamily,
    induced_matrix,
    mixed_matrix,
    parse_word,
    validate_mdp,
    word_to_policy,
)
from .randgen import GenSpec, gen_meta, random_instance
from .statdist import SolveOptions, is_irreducible, residual, stationary, stationary_linear
from .verify import MAX_BENCH_N, MAX_VERIFY_N, bench, verify_family

TOL_ENV = "MDPMIX_TOL"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def default_tol() -> float:
    value = os.environ.get(TOL_ENV)
    if value is None:
        return 1e-9
    try:
        return float(value)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={value!r} is not a number") from None


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_family(path):
    try:
        return io.load_family(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def cmd_gen(args) -> int:
    spec = GenSpec(
        args.states, args.diff, args.seed, args.min_prob, args.extra_actions,
        args.near_degenerate,
    )
    inst = random_instance(spec)
    meta = gen_meta(spec)
    family = PolicyFamily(inst.mdp, inst.diff_states, inst.words, inst.shared_policy)
    mdp_ref = None
    if args.mdp_out:
        Path(args.mdp_out).write_text(json.dumps(io.mdp_to_dict(inst.mdp, meta)) + "\n")
        mdp_ref = os.path.relpath(args.mdp_out, Path(args.out).parent) if args.out else args.mdp_out
    payload = io.family_to_dict(family, mdp_path=mdp_ref, meta=meta)
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    else:
        _emit(payload)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        data = io.read_json(args.file)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("top-level JSON value must be an object")
    family_data = None
    if "diff_states" in data:
        family_data = data
        mdp_data = data["mdp"]
        if isinstance(mdp_data, str):
            mdp_data = io.read_json(Path(args.file).parent / mdp_data)
    else:
        mdp_data = data
    mdp = io.mdp_from_dict(mdp_data, validate=False)
    report = validate_mdp(mdp)
    out = {"valid": report.ok, "issues": [i.message for i in report.issues], "policies": []}
    for msg in out["issues"]:
        _err(msg)
    if report.ok:
        policies = [DeterministicPolicy(tuple(p)) for p in mdp_data.get("policies", [])]
        if family_data is not None:
            family = io.family_from_dict(family_data, Path(args.file).parent)
            policies += [family.base_policy(k) for k in range(family.n + 1)]
        for idx, pol in enumerate(policies):
            try:
                irreducible = is_irreducible(induced_matrix(mdp, pol))
            except ModelError as exc:
                irreducible = False
                _err(f"policy {idx}: {exc}")
            out["policies"].append({"index": idx, "irreducible": irreducible})
            if not irreducible:
                out["valid"] = False
                _err(f"policy {idx} induces a reducible chain")
    _emit(out)
    return EXIT_OK if out["valid"] else EXIT_FAIL


def _parse_lambdas(text: str, n: int) -> MixtureVector:
    parts = [p for p in text.split(",") if p.strip()]
    try:
        lam = MixtureVector([float(p) for p in parts]) if parts else MixtureVector(np.zeros(0))
    except ValueError as exc:
        raise UsageError(f"bad --lambda {text!r}: {exc}") from exc
    if len(lam) != n:
        raise UsageError(f"--lambda needs {n} values, got {len(lam)}")
    return lam


def _parse_word(text: str, n: int):
    try:
        word = parse_word(text)
    except ModelError as exc:
        raise UsageError(str(exc)) from exc
    if len(word) != n:
        raise UsageError(f"--word needs length {n}, got {len(word)}")
    return word


def cmd_solve(args) -> int:
    family = _load_family(args.family)
    word = _parse_word(args.word, family.n)
    P = induced_matrix(family.mdp, word_to_policy(family, word))
    mu = stationary(P, SolveOptions(method=args.method))
    _emit(io.distribution_to_dict(mu.probs, args.method, residual(P, mu)))
    return EXIT_OK


def cmd_combine(args) -> int:
    family = _load_family(args.family)
    if args.word is not None:
        word = _parse_word(args.word, family.n)
        lam = MixtureVector.for_word(word)
        if args.method == "gamma":
            mu = combine_deterministic_gamma(family, word)
        else:
            mu = combine_randomized(family, lam, args.method)
    else:
        if args.method == "gamma":
            raise UsageError("--method gamma needs --word")
        lam = _parse_lambdas(args.lam, family.n)
        mu = combine_randomized(family, lam, args.method)
    P = mixed_matrix(family, lam)
    out = io.distribution_to_dict(mu.probs, args.method, residual(P, mu))
    status = EXIT_OK
    if args.check:
        tol = args.tol if args.tol is not None else default_tol()
        oracle = stationary_linear(P)
        err = float(np.max(np.abs(mu.probs - oracle.probs)))
        out["check"] = {
            "oracle_probs": oracle.probs.tolist(),
            "oracle_residual": residual(P, oracle),
            "max_error": err,
            "tolerance": tol,
            "pass": err <= tol,
        }
        if err > tol:
            _err(f"formula differs from direct solve by {err:.3g} > {tol:.3g}")
            status = EXIT_FAIL
    _emit(out)
    return status


def cmd_verify(args) -> int:
    family = _load_family(args.family)
    tol = args.tol if args.tol is not None else default_tol()
    if args.word:
        words = [_parse_word(w, family.n) for w in args.word]
    else:
        if family.n > MAX_VERIFY_N:
            raise UsageError(f"--all-words limited to n <= {MAX_VERIFY_N}, family has n={family.n}")
        words = None
    report = verify_family(family, words, tol=tol, method=args.method, jobs=args.jobs)
    _emit(report.to_dict())
    if not report.passed:
        _err(f"verification failed: max error {report.max_error:.3g} > {tol:.3g}")
        return EXIT_FAIL
    return EXIT_OK


def _parse_range(text: str) -> list[int]:
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --n-range {text!r}; use e.g. 1-7 or 1,3,5") from None


def cmd_bench(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    ns = _parse_range(args.n_range)
    if not ns or min(ns) < 0 or max(ns) > MAX_BENCH_N:
        raise UsageError(f"--n-range must lie within 0..{MAX_BENCH_N}")
    result = bench(ns, num_states=args.states, seed=args.seed, reps=args.reps)
    for row in result["rows"]:
        _err(
            f"n={row['n']}: permsum {row['permsum_s']:.3g}s  "
            f"determinant {row['determinant_s']:.3g}s  direct {row['direct_s']:.3g}s"
        )
    _emit(result)
    return EXIT_OK if result["summary"]["cross_check"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdpmix",
        description="Stationary distributions of combined policies in unichain MDPs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded unichain MDP and policy family")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--diff", type=int, required=True, help="number of differing states n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-prob", type=float, default=0.01)
    p.add_argument("--extra-actions", type=int, default=0)
    p.add_argument("--near-degenerate", type=float, default=0.0)
    p.add_argument("-o", "--out", help="write the family file here instead of stdout")
    p.add_argument("--mdp-out", help="write the MDP to its own file and reference it by path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="validate an MDP or family file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve one policy's chain directly")
    p.add_argument("family")
    p.add_argument("--word", required=True)
    p.add_argument("--method", choices=["linear", "cesaro"], default="linear")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("combine", help="stationary distribution of a combined policy")
    p.add_argument("family")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--word")
    target.add_argument("--lambda", dest="lam", help="comma-separated action-0 probabilities")
    p.add_argument("--method", choices=["determinant", "permsum", "gamma"], default="determinant")
    p.add_argument("--check", action="store_true", help="compare with a direct solve")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("verify", help="check the formula against direct solves")
    p.add_argument("family")
    p.add_argument("--all-words", action="store_true", help="every combination word (default)")
    p.add_argument("--word", action="append", help="check only these words (repeatable)")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--method", choices=["determinant", "permsum", "gamma"], default="determinant")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time the evaluators against a direct solve")
    p.add_argument("--n-range", default="1-7")
    p.add_argument("--states", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    except DegenerateDenominator as exc:
        _err(f"numerical degeneracy: {exc}")
        return EXIT_DEGENERATE
    except NumericalError as exc:
        _err(f"numerical failure: {exc}")
        return EXIT_DEGENERATE
    except (ModelError, ValueError, OSError) as exc:
        _err(f"invalid input: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
