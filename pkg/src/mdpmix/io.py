"""JSON instance files.

MDP file::

    {"num_states": N, "transitions": [[[p, ...], ...], ...]}

``transitions[i][a][j]``, ragged in ``a``. Optional keys:
``"initial_distribution"``, ``"policies"`` (lists of actions, checked for
irreducibility by ``mdpmix validate``) and ``"gen_meta"``.

Family file::

    {"mdp": <path or inline MDP object>, "diff_states": [s1, ...],
     "base_words": ["010", ...], "shared_policy": [a_0, ..., a_{N-1}]}

A relative ``"mdp"`` path is resolved against the family file's directory.

Distribution output::

    {"probs": [...], "method": "...", "residual": r}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import ModelError
from .model import DeterministicPolicy, Mdp, PolicyFamily, checked_mdp, format_word


def read_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def mdp_from_dict(data: dict, validate: bool = True) -> Mdp:
    try:
        transitions = data["transitions"]
    except (KeyError, TypeError) as exc:
        raise ModelError("MDP object needs a 'transitions' key") from exc
    mdp = Mdp.from_nested(transitions, data.get("initial_distribution"))
    if "num_states" in data and int(data["num_states"]) != mdp.num_states:
        raise ModelError(
            f"num_states={data['num_states']} but transitions describe {mdp.num_states}"
        )
    return checked_mdp(mdp) if validate else mdp


def mdp_to_dict(mdp: Mdp, meta: dict | None = None) -> dict:
    out: dict[str, Any] = {"num_states": mdp.num_states, "transitions": mdp.to_nested()}
    if mdp.initial_distribution is not None:
        out["initial_distribution"] = mdp.initial_distribution.tolist()
    if meta is not None:
        out["gen_meta"] = meta
    return out


def family_from_dict(data: dict, base_dir: Path | None = None) -> PolicyFamily:
    try:
        mdp_ref = data["mdp"]
        diff = data["diff_states"]
        words = data["base_words"]
        shared = data["shared_policy"]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"family object is missing key {exc}") from exc
    if isinstance(mdp_ref, str):
        path = Path(mdp_ref)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        mdp = mdp_from_dict(read_json(path))
    else:
        mdp = mdp_from_dict(mdp_ref)
    return PolicyFamily(mdp, tuple(diff), tuple(words), DeterministicPolicy(tuple(shared)))


def family_to_dict(
    family: PolicyFamily, mdp_path: str | None = None, meta: dict | None = None
) -> dict:
    out: dict[str, Any] = {
        "mdp": mdp_path if mdp_path is not None else mdp_to_dict(family.mdp),
        "diff_states": list(family.diff_states),
        "base_words": [format_word(w) for w in family.base_words],
        "shared_policy": list(family.shared_policy.choice),
    }
    if meta is not None:
        out["gen_meta"] = meta
    return out


def load_mdp(path) -> Mdp:
    return mdp_from_dict(read_json(path))


def load_family(path) -> PolicyFamily:
    path = Path(path)
    return family_from_dict(read_json(path), base_dir=path.parent)


def distribution_to_dict(probs, method: str, residual: float) -> dict:
    return {"probs": [float(p) for p in probs], "method": method, "residual": float(residual)}
