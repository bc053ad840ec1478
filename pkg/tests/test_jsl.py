"""Joint stable lengths, the pair sandwich, and spectral radii.

Frozen oracles: for S = {abA, aBA} on the unit tree the level maxima are
a_n = n + 2 (alternating seams cancel one letter per factor), giving the
bracket [1, 5/4] at n_max = 8; the pair maximum is l[abA abA] = 2.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from lenspec.errors import InputError, ResourceCapError
from lenspec.jsl import (
    BochiConstants,
    SubsetS,
    bf_lower_check,
    bf_minimal_K,
    bf_upper,
    bochi_rhs,
    joint_stable_length,
    joint_stable_profile,
    jsr_bracket,
    jsr_profile,
    tree_joint_profile,
)
from lenspec.spaces import TreeModel, WordMetricModel, build_schottky
from lenspec.words import GeneratingSet, Word


def random_subset(rng, size, max_len=4):
    out = set()
    while len(out) < size:
        ln = rng.randint(1, max_len)
        w = Word([rng.choice([1, -1, 2, -2]) for _ in range(ln)])
        if w:
            out.add(w)
    return sorted(out, key=lambda w: (len(w), w.letters))


# ------------------------------------------------------------ tree engine


def test_standard_pair_is_exact():
    p = tree_joint_profile(TreeModel(2), ["a", "b"], n_max=8)
    assert p.bracket.exact
    assert p.bracket.lo == 1
    assert p.a == {n: n for n in range(1, 9)}
    assert not p.eroded


def test_cancelling_subset_oracle():
    p = tree_joint_profile(TreeModel(2), ["abA", "aBA"], n_max=8)
    assert p.a == {n: n + 2 for n in range(1, 9)}
    assert p.pair_half == 1
    assert p.bracket.lo == 1
    assert p.bracket.hi == Fraction(5, 4)
    assert not p.bracket.exact


def test_weighted_tree_profile_stays_exact():
    m = TreeModel(2, [Fraction(1, 2), 3])
    p = tree_joint_profile(m, ["a", "b"], n_max=6)
    assert p.a[6] == 18  # all-b products dominate
    assert p.bracket.lo == Fraction(3, 1)
    assert isinstance(p.a[1], (int, Fraction))


def test_tree_dp_matches_product_enumeration():
    rng = random.Random(19)
    for trial in range(12):
        s = random_subset(rng, rng.randint(2, 3))
        m = TreeModel(2, [1, rng.choice([1, 2, Fraction(3, 2)])])
        dp = tree_joint_profile(m, s, n_max=6)
        exact = joint_stable_profile(m, s, n_max=6, engine="products")
        for n in exact.a:
            assert dp.a[n] >= exact.a[n]
            if not dp.eroded:
                assert dp.a[n] == exact.a[n]
        assert dp.pair_half == exact.pair_half


def test_auto_engine_switches_to_dp_beyond_cap():
    m = TreeModel(2)
    s = ["a", "A", "b", "B"]
    p = joint_stable_profile(m, s, n_max=12, frontier_cap=1000)
    assert p.engine == "tree-dp"
    assert p.bracket.lo == 1
    p2 = joint_stable_profile(m, s, n_max=4, frontier_cap=1000)
    assert p2.engine == "products"


def test_identity_element_is_tolerated():
    p = tree_joint_profile(TreeModel(2), ["", "a"], n_max=4)
    assert p.a[4] == 4


# ------------------------------------------------------------ word engine


def test_word_engine_on_word_metric_agrees_with_tree():
    gens = GeneratingSet.standard(2)
    wm = WordMetricModel(gens)
    tree = TreeModel(2)
    s = ["ab", "Ba"]
    pw = joint_stable_profile(wm, s, n_max=6)
    pt = joint_stable_profile(tree, s, n_max=6, engine="products")
    assert pw.a == pt.a
    assert pw.bracket.lo == pt.bracket.lo
    assert pw.bracket.hi == pt.bracket.hi


def test_word_engine_resource_cap():
    with pytest.raises(ResourceCapError):
        joint_stable_profile(
            TreeModel(2), ["a", "A", "b", "B"], n_max=6,
            frontier_cap=10, engine="products",
        )


def test_word_engine_beam_drops_certification():
    p = joint_stable_profile(
        TreeModel(2), ["a", "A", "b", "B"], n_max=6,
        frontier_cap=10, beam=4, engine="products",
    )
    assert p.pruned
    assert not p.bracket.certified


def test_n_max_validation():
    with pytest.raises(InputError):
        joint_stable_profile(TreeModel(2), ["a"], n_max=1)
    with pytest.raises(InputError):
        joint_stable_profile(WordMetricModel(GeneratingSet.standard(2)),
                             ["a"], n_max=4, engine="tree-dp")


def test_subset_validation():
    with pytest.raises(InputError):
        SubsetS([])
    s = SubsetS(["a", "bA"])
    assert len(s) == 2
    assert [str(w) for w in s] == ["a", "bA"]


# ---------------------------------------------------------- matrix engine


def test_schottky_generators_joint_length():
    act = build_schottky(4.0, [0.0, 1.2])
    b = joint_stable_length(act.mobius, ["a", "b"], n_max=6)
    # powers of a single generator dominate: the joint length is 2 log 4
    assert b.lo == pytest.approx(2 * math.log(4), abs=1e-9)
    assert b.hi == pytest.approx(2.7725887222397807, abs=1e-6)


def test_matrix_engine_displacements_match_model():
    act = build_schottky(4.0, [0.0, 1.2])
    m = act.mobius
    s = [Word("a"), Word("bA")]
    p = joint_stable_profile(m, s, n_max=3)
    # level 1 maximum is just the largest displacement
    assert p.a[1] == pytest.approx(max(m.displacement(w) for w in s), abs=1e-9)
    best2 = max(
        m.displacement(u * v) for u in s for v in s
    )
    assert p.a[2] == pytest.approx(best2, abs=1e-9)


def test_matrix_engine_cap_and_beam():
    act = build_schottky(4.0, [0.0, 1.2])
    with pytest.raises(ResourceCapError):
        joint_stable_profile(act.mobius, ["a", "A", "b", "B"], n_max=12,
                             frontier_cap=100)
    p = joint_stable_profile(act.mobius, ["a", "A", "b", "B"], n_max=12,
                             frontier_cap=100, beam=16)
    assert p.pruned and not p.bracket.certified


# ------------------------------------------------------------ pair bounds


def test_bf_check_on_standard_pair():
    chk = bf_lower_check(TreeModel(2), ["a", "b"])
    assert chk.ok
    assert chk.pair_half.lo == 1
    assert chk.joint.lo == 1
    assert chk.minimal_K == 0
    assert chk.minimal_K_lower == 0


def test_bf_check_bracket_too_loose_for_certification():
    # delta = 0 and joint.hi > pair_half.lo: no finite K is certified,
    # but nothing refutes K = 0 either
    chk = bf_lower_check(TreeModel(2), ["abA", "aBA"])
    assert chk.ok
    assert chk.minimal_K == math.inf
    assert chk.minimal_K_lower == 0


def test_bf_check_on_schottky():
    act = build_schottky(4.0, [0.0, 1.2])
    chk = bf_lower_check(act.mobius, ["a", "b"], n_max=6)
    assert chk.ok
    assert chk.delta == pytest.approx(math.log(2))
    assert 0 <= chk.minimal_K < 0.01
    assert chk.upper_value == pytest.approx(
        chk.K * chk.delta + chk.pair_half.hi
    )


def test_bf_upper_and_minimal_K_helpers():
    m = TreeModel(2)
    assert bf_upper(m, ["a", "b"], K=3) == 1  # delta 0: just the half pair
    assert bf_minimal_K(m, ["a", "b"]) == 0


# -------------------------------------------------------------------- jsr


def test_jsr_single_diagonal_is_exact():
    b = jsr_bracket([np.diag([2.0, 0.5])])
    assert b.lo == pytest.approx(math.log(2), abs=1e-12)
    assert b.hi == pytest.approx(math.log(2), abs=1e-12)


def test_jsr_rotation_is_zero():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    b = jsr_bracket([rot], n_max=4)
    assert b.lo == pytest.approx(0.0, abs=1e-12)
    assert b.hi == pytest.approx(0.0, abs=1e-12)


def test_jsr_pair_with_rotation():
    mats = [np.diag([2.0, 0.5]), np.array([[0.0, -1.0], [1.0, 0.0]])]
    b = jsr_bracket(mats, n_max=8)
    assert b.contains(math.log(2), tol=1e-9)
    assert b.hi == pytest.approx(math.log(2), abs=1e-9)


def test_jsr_profile_terms_are_monotone_evidence():
    mats = [np.diag([3.0, 1 / 3.0]), np.array([[1.0, 1.0], [0.0, 1.0]])]
    p = jsr_profile(mats, n_max=6)
    assert max(p.lambda_terms.values()) <= min(p.sigma_terms.values()) + 1e-9
    assert p.bracket.lo <= p.bracket.hi


def test_jsr_cap_raises_and_beam_prunes():
    mats = [np.diag([2.0, 0.5]), np.array([[0.0, -1.0], [1.0, 0.0]]),
            np.array([[1.0, 1.0], [0.0, 1.0]])]
    with pytest.raises(ResourceCapError):
        jsr_profile(mats, n_max=12, cap=50)
    p = jsr_profile(mats, n_max=12, cap=50, beam=10)
    assert p.pruned and not p.bracket.certified


def test_jsr_overflow_resistance():
    # stretch 1e8: naive products overflow float64 by level 5
    b = jsr_bracket([np.diag([1e8, 1e-8])], n_max=8)
    assert b.lo == pytest.approx(8 * math.log(10), rel=1e-12)


# ------------------------------------------------------------------ bochi


def test_bochi_constants():
    c2 = BochiConstants.for_dim(2)
    assert c2.c_m == pytest.approx(13 * math.log(2))
    assert c2.d_m == 16
    c3 = BochiConstants.for_dim(3)
    assert c3.c_m == pytest.approx(8 * math.log(2) + 5 * math.log(3))
    assert c3.d_m == 54
    with pytest.raises(InputError):
        BochiConstants.for_dim(0)


def test_bochi_bound_dominates_jsr():
    rng = np.random.default_rng(123)
    for _ in range(30):
        mats = []
        for _ in range(2):
            while True:
                a = rng.normal(size=(2, 2))
                if abs(np.linalg.det(a)) > 1e-12:
                    break
            mats.append(a / abs(np.linalg.det(a)) ** 0.5)
        rhs = bochi_rhs(mats)
        assert not rhs.partial
        assert rhs.j_used == 16
        jsr = jsr_bracket(mats, n_max=8)
        assert jsr.hi <= rhs.value + 1e-9


def test_bochi_partial_flag():
    mats = [np.diag([2.0, 0.5]), np.array([[0.0, -1.0], [1.0, 0.0]])]
    probe = bochi_rhs(mats, j_cap=3)
    assert probe.partial
    assert probe.j_used == 3
    capped = bochi_rhs(mats, cap=100)
    assert capped.partial


def test_bochi_dimension_mismatch():
    with pytest.raises(InputError):
        bochi_rhs([np.eye(3)], BochiConstants.for_dim(2))
