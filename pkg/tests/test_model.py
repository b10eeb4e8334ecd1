import numpy as np
import pytest

from mdpmix.errors import ModelError
from mdpmix.model import (
    DeterministicPolicy,
    Distribution,
    Mdp,
    MixtureVector,
    PolicyFamily,
    all_words,
    checked_mdp,
    induced_matrix,
    is_combination,
    mixed_matrix,
    parse_word,
    relabel_to_ones,
    validate_mdp,
    word_to_policy,
)
from mdpmix.randgen import GenSpec, random_family, random_unichain_mdp

from conftest import example_family


def test_validate_accepts_stochastic_rows():
    mdp = Mdp.from_nested([[[0.5, 0.5]], [[0.3, 0.7]]])
    assert validate_mdp(mdp).ok


def test_validate_reports_row_sum():
    mdp = Mdp.from_nested([[[0.5, 0.6]], [[0.3, 0.7]]])
    report = validate_mdp(mdp)
    assert not report.ok
    assert [i.kind for i in report.issues] == ["row_sum"]
    assert "row sum 1.1 at (0,0)" in report.issues[0].message


def test_validate_reports_negative_entry():
    mdp = Mdp.from_nested([[[1.1, -0.1]], [[0.3, 0.7]]])
    report = validate_mdp(mdp)
    assert any(i.kind == "range" and (i.state, i.action) == (0, 0) for i in report.issues)


def test_validate_lists_every_violation():
    mdp = Mdp.from_nested([[[0.5, 0.6], [0.5, 0.5]], [[0.2, 0.7], [-0.5, 1.5]]])
    report = validate_mdp(mdp)
    assert {(i.kind, i.state, i.action) for i in report.issues} == {
        ("row_sum", 0, 0),
        ("row_sum", 1, 0),
        ("range", 1, 1),
    }


def test_checked_mdp_renormalizes_within_tolerance_only():
    nearly = Mdp.from_nested([[[0.5, 0.5 + 5e-13]], [[0.3, 0.7]]])
    fixed = checked_mdp(nearly)
    assert fixed.rows(0).sum() == pytest.approx(1.0, abs=1e-16)
    with pytest.raises(ModelError):
        checked_mdp(Mdp.from_nested([[[0.5, 0.5 + 1e-9]], [[0.3, 0.7]]]))


def test_mdp_structural_errors():
    with pytest.raises(ModelError):
        Mdp.from_nested([[[0.5, 0.5]], [[1.0]]])
    with pytest.raises(ModelError):
        Mdp.from_nested([[[1.0]], []])
    with pytest.raises(ModelError):
        Mdp(np.ones((2, 1, 3)), (1, 1))


def test_mdp_is_read_only():
    mdp = Mdp.from_nested([[[0.5, 0.5]], [[0.3, 0.7]]])
    with pytest.raises(ValueError):
        mdp.transitions[0, 0, 0] = 1.0


def test_induced_matrix_single_action():
    rows = [[[0.5, 0.5]], [[0.3, 0.7]]]
    mdp = Mdp.from_nested(rows)
    P = induced_matrix(mdp, DeterministicPolicy((0, 0)))
    np.testing.assert_array_equal(P, [[0.5, 0.5], [0.3, 0.7]])


def test_induced_matrix_mixed_choices():
    rows = [
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        [[0.2, 0.3, 0.5]],
        [[0.1, 0.1, 0.8], [0.4, 0.4, 0.2], [0.0, 0.0, 1.0]],
    ]
    mdp = Mdp.from_nested(rows)
    P = induced_matrix(mdp, DeterministicPolicy((1, 0, 2)))
    expected = np.array([[0.0, 1.0, 0.0], [0.2, 0.3, 0.5], [0.0, 0.0, 1.0]])
    np.testing.assert_array_equal(P, expected)
    np.testing.assert_allclose(P.sum(axis=1), 1.0)
    all_zero = induced_matrix(mdp, DeterministicPolicy((0, 0, 0)))
    np.testing.assert_array_equal(all_zero, [r[0] for r in rows])


def test_induced_matrix_rejects_bad_action():
    mdp = Mdp.from_nested([[[0.5, 0.5]], [[0.3, 0.7]]])
    with pytest.raises(ModelError):
        induced_matrix(mdp, DeterministicPolicy((1, 0)))
    with pytest.raises(ModelError):
        induced_matrix(mdp, DeterministicPolicy((0,)))


def test_distribution_invariants():
    Distribution([0.25, 0.75])
    with pytest.raises(ModelError):
        Distribution([0.5, 0.6])
    with pytest.raises(ModelError):
        Distribution([1.0, 0.0])


def test_mixture_bounds():
    MixtureVector([0.0, 1.0, 0.5])
    with pytest.raises(ModelError):
        MixtureVector([1.2])
    with pytest.raises(ModelError):
        MixtureVector([-0.01])
    np.testing.assert_array_equal(MixtureVector.for_word("0110").lambdas, [1, 0, 0, 1])


def test_parse_word():
    assert parse_word("0110") == (0, 1, 1, 0)
    assert parse_word([1, 0]) == (1, 0)
    assert parse_word("") == ()
    with pytest.raises(ModelError):
        parse_word("012")


def test_word_to_policy(hand_family):
    fam = hand_family
    assert word_to_policy(fam, "1").choice == (0, 1, 0)
    assert word_to_policy(fam, (0,)).choice == (0, 0, 0)
    with pytest.raises(ModelError):
        word_to_policy(fam, "01")


def test_word_to_policy_base_words_and_all_ones():
    fam = example_family(3)
    for k, w in enumerate(fam.base_words):
        assert word_to_policy(fam, w) == fam.base_policy(k)
    ones = word_to_policy(fam, "111")
    assert all(ones[s] == 1 for s in fam.diff_states)


def test_word_to_policy_n0():
    fam = random_family(GenSpec(3, 0, 5))
    assert word_to_policy(fam, "") == fam.shared_policy
    assert fam.base_words == ((),)


def test_is_combination():
    fam = example_family(1)
    assert all(is_combination(fam, w) for w in fam.base_words)
    assert is_combination(fam, "111")
    # 000, 001, 010, 011 never play 1 at position 0
    fam2 = random_family(GenSpec(6, 3, 2), words=("000", "001", "010", "011"))
    assert not is_combination(fam2, "100")
    assert is_combination(fam2, "011")


def test_is_combination_monotone_under_adding_words():
    for seed in range(20):
        big = random_family(GenSpec(6, 3, seed))
        for drop in range(4):
            words = [w for k, w in enumerate(big.base_words) if k != drop]
            for target in all_words(3):
                small_ok = all(
                    any(w[j] == b for w in words) for j, b in enumerate(target)
                )
                if small_ok:
                    assert is_combination(big, target)


def test_family_invariants(hand_family):
    fam = hand_family
    mdp, shared = fam.mdp, fam.shared_policy
    with pytest.raises(ModelError, match="distinct"):
        PolicyFamily(mdp, (1,), ("0", "0"), shared)
    with pytest.raises(ModelError, match="exactly 2"):
        PolicyFamily(mdp, (1,), ("0",), shared)
    with pytest.raises(ModelError, match="fewer than 2"):
        PolicyFamily(mdp, (0,), ("0", "1"), shared)
    with pytest.raises(ModelError):
        PolicyFamily(mdp, (1,), ("0", "2"), shared)


def test_family_rejects_wrong_distributions(hand_family):
    fam = hand_family.with_distributions()
    good = fam.base_distributions
    PolicyFamily(fam.mdp, fam.diff_states, fam.base_words, fam.shared_policy, good)
    with pytest.raises(ModelError, match="not stationary"):
        PolicyFamily(
            fam.mdp, fam.diff_states, fam.base_words, fam.shared_policy, good[::-1]
        )


def test_distribution_cache_is_write_once(hand_family):
    fam = hand_family
    first = fam.distributions
    assert fam.distributions is first


def test_base_policy_matrix_matches_direct_assembly():
    for seed in range(10):
        fam = random_family(GenSpec(7, 3, seed))
        for k, w in enumerate(fam.base_words):
            direct = np.array(
                [
                    fam.mdp.transitions[i, w[fam.diff_states.index(i)] if i in fam.diff_states else fam.shared_policy[i]]
                    for i in range(fam.num_states)
                ]
            )
            np.testing.assert_array_equal(fam.base_matrix(k), direct)


def test_mixed_matrix_rows(hand_family):
    P = mixed_matrix(hand_family, [0.25])
    np.testing.assert_allclose(P[1], 0.25 * np.array([0.6, 0.1, 0.3]) + 0.75 * np.array([0.1, 0.1, 0.8]))
    np.testing.assert_array_equal(P[0], [0.2, 0.5, 0.3])
    np.testing.assert_allclose(P.sum(axis=1), 1.0)


def test_relabel_to_ones_keeps_policies():
    fam = example_family(4)
    target = (0, 1, 0)
    rel = relabel_to_ones(fam, target)
    for k in range(4):
        np.testing.assert_array_equal(rel.base_matrix(k), fam.base_matrix(k))
    np.testing.assert_array_equal(
        induced_matrix(rel.mdp, word_to_policy(rel, "111")),
        induced_matrix(fam.mdp, word_to_policy(fam, target)),
    )


def test_generator_output_validates():
    for seed in range(25):
        assert validate_mdp(random_unichain_mdp(GenSpec(6, 2, seed, extra_actions=seed % 3))).ok


def test_overfull_face():
    from mdpmix.model import overfull_face

    assert overfull_face([(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 0)]) is None
    # constant first column: four words on a 2-dimensional face
    fixed, count = overfull_face([(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)])
    assert fixed == {0: 0} and count == 4
    # four words on the face x1 = 0, x3 = 1 of the 4-cube
    words = [(0, 0, 0, 1), (1, 1, 1, 0), (1, 0, 1, 1), (1, 0, 0, 1), (0, 0, 1, 1)]
    fixed, count = overfull_face(words)
    assert fixed == {1: 0, 3: 1} and count == 4
    # n <= 2: every distinct word set is generic
    for n in (1, 2):
        import itertools

        for ws in itertools.combinations(list(all_words(n)), n + 1):
            assert overfull_face(ws) is None


def test_generator_skips_overfull_word_sets():
    from mdpmix.model import overfull_face

    hits = 0
    for seed in range(80):
        spec = GenSpec(8, 3 + seed % 3, seed)
        assert random_family(spec).is_generic
        raw = random_family(GenSpec(8, 3 + seed % 3, seed, allow_degenerate=True))
        hits += not raw.is_generic
    assert hits > 0  # the filter is actually exercised
