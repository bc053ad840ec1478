"""Acceptance sweep: every headline guarantee of the package at desk scale.

Each criterion is one test that ends by printing a single PASS line with
its workload counts (visible under ``pytest -s``); an assertion failure
surfaces as the usual FAILED line for that criterion.  Tolerances are zero
wherever the arithmetic is exact (trees, Fractions) and 1e-9 on floats.
"""

import itertools
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from lenspec.words import Word, GeneratingSet, enumerate_ball
from lenspec.actions import stable_length_bracket
from lenspec.spaces import TreeModel, build_schottky
from lenspec.jsl import (
    BochiConstants,
    bochi_rhs,
    joint_stable_profile,
    jsr_profile,
)
from lenspec.bounds import (
    VerifierConfig,
    cobounded_dilation_report,
    displacement_sandwich_report,
    joint_vs_dilation_report,
    metric_distance_report,
    word_metric_dilation_report,
)
from lenspec.cli import _ensemble_pairs, load_scenario, run

SCEN_DIR = Path(__file__).resolve().parents[1] / "src" / "lenspec" / "scenarios"

ALPHABET = {1: "a", -1: "A", 2: "b", -2: "B"}


def _ok(n, label, detail=""):
    tail = f" ({detail})" if detail else ""
    print(f"acceptance {n:02d} {label}: PASS{tail}")


def _random_reduced(rng, max_len, min_len=1):
    n = int(rng.integers(min_len, max_len + 1))
    letters = []
    while len(letters) < n:
        x = int(rng.integers(1, 3)) * (1 if int(rng.integers(2)) else -1)
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word("".join(ALPHABET[x] for x in letters))


def test_acceptance_01_tree_joint_length_equality_sweep():
    # every S in F_2 with |S| <= 3 drawn from the 52 nonempty words of
    # length <= 3: the DP upper side never undercuts the pair half-max,
    # and converges at rate 2*maxdisp/n by level 12
    tree = TreeModel(2)
    elems = [w for w in enumerate_ball(2, 3) if w.letters]
    assert len(elems) == 52
    t0 = time.perf_counter()
    checked = 0
    for k in (1, 2, 3):
        for idx in itertools.combinations(range(len(elems)), k):
            S = [elems[i] for i in idx]
            prof = joint_stable_profile(tree, S, 12, engine="tree-dp")
            assert prof.bracket.lo == prof.pair_half
            maxdisp = max(len(w.letters) for w in S)
            assert prof.bracket.hi - prof.bracket.lo <= Fraction(2 * maxdisp, 12)
            checked += 1
    elapsed = time.perf_counter() - t0
    assert checked == 23478
    assert elapsed < 120.0
    _ok(1, "tree joint-length equality sweep",
        f"{checked} subsets, 0 violations, {elapsed:.0f}s")


def test_acceptance_02_spectral_upper_bound_ensemble():
    # 100 seeded unit-determinant Gaussian pairs: certified radius bracket
    # sits under the c_2 + d_2-window upper bound with the frozen constants
    consts = BochiConstants.for_dim(2)
    assert consts.c_m == 13 * math.log(2)
    assert consts.d_m == 16
    pairs = _ensemble_pairs({"count": 100, "dim": 2, "scale": 1.0}, 0)
    t0 = time.perf_counter()
    violations = 0
    for mats in pairs:
        prof = jsr_profile(mats, 8)
        rhs = bochi_rhs(mats)
        assert rhs.j_used == 16 and not rhs.partial
        if prof.bracket.hi > rhs.value:
            violations += 1
    elapsed = time.perf_counter() - t0
    assert violations == 0
    assert elapsed < 300.0
    _ok(2, "spectral upper bound on random ensemble",
        f"100 pairs, 0 violations, {elapsed:.1f}s")


def test_acceptance_03_word_metric_bound_exact_case():
    # weighted tree (w_b = 2) against the standard word metric: delta = 0
    # kills the additive term, so the bound collapses to the window sup
    # and matches the true dilation 2 exactly at every window length
    target = TreeModel(2, weights=(1, 2))
    gens = GeneratingSet(2, tuple(Word(x) for x in ("a", "A", "b", "B")))
    cfg = VerifierConfig(L_values=(1, 2, 4, 8), delta=0.0)
    reports = word_metric_dilation_report(target, gens, cfg)
    assert [r.window_L for r in reports] == [1, 2, 4, 8]
    for r in reports:
        assert r.verdict == "holds"
        assert r.bound_value == 2
        assert r.reference_dilation.lo == 2
        assert r.reference_dilation.hi == 2
    _ok(3, "word-metric bound exact case", "bound == Dil == 2 at L in {1,2,4,8}")


def test_acceptance_04_cobounded_schottky_pipeline():
    # unit tree (D = 1/2) vs plane Schottky action, stretch 4, angles 0 and
    # 1.2, declared delta = log 2, K = 1e4: tight bound holds at every L
    # and the minimal-K diagnostic stays finite
    target = build_schottky(4.0, (0.0, 1.2), delta=math.log(2)).mobius
    cfg = VerifierConfig(L_values=(4, 6, 8, 12), K=1e4, delta=math.log(2))
    t0 = time.perf_counter()
    reports = cobounded_dilation_report(target, TreeModel(2), cfg, "tight")
    elapsed = time.perf_counter() - t0
    assert [r.window_L for r in reports] == [4, 6, 8, 12]
    min_ks = []
    for r in reports:
        assert r.verdict == "holds"
        assert math.isfinite(float(r.bound_value))
        k = r.extras["minimal_K"]
        assert math.isfinite(k)
        min_ks.append(k)
    assert elapsed < 180.0
    _ok(4, "cobounded Schottky pipeline",
        f"holds at L in {{4,6,8,12}}, minimal K {min_ks}, {elapsed:.1f}s")


def test_acceptance_05_bracket_contains_eigenvalue_length():
    # 200 seeded random reduced words of length <= 8 in the Schottky group:
    # the power-drift bracket always contains the exact eigenvalue length
    mob = build_schottky(4.0, (0.0, 1.2), delta=math.log(2)).mobius
    rng = np.random.default_rng(5)
    escapes = 0
    for _ in range(200):
        w = _random_reduced(rng, 8)
        br = stable_length_bracket(mob, w, k_max=8, c_delta=4)
        lam = max(abs(v) for v in np.linalg.eigvals(mob.matrix(w)))
        exact = 2.0 * math.log(lam)
        if not (br.lo - 1e-9 <= exact <= br.hi + 1e-9):
            escapes += 1
    assert escapes == 0
    _ok(5, "estimator bracket vs eigenvalue length", "200 words, 0 escapes")


def test_acceptance_06_displacement_sandwich_ball():
    # unit tree, n = 4, full radius-9 ball: both sandwich inequalities in
    # exact integer arithmetic over every element
    rep = displacement_sandwich_report(TreeModel(2), 4, 9, VerifierConfig())
    assert rep.verdict == "holds"
    assert rep.case == "cobounded"
    assert rep.checked == 39365
    assert rep.violations == []
    assert rep.scale == Fraction(1, 2)
    assert rep.bound == 3
    assert not rep.truncated
    _ok(6, "displacement sandwich on radius-9 ball",
        f"{rep.checked} elements, 0 violations")


def test_acceptance_07_dilation_equals_joint_length():
    # window dilation against the S word metric equals the joint stable
    # length, exactly, for the standard set (value 1) and with ab added
    # (value 2)
    tree = TreeModel(2)
    std = [Word(x) for x in ("a", "A", "b", "B")]
    for s, value in ((std, 1), (std + [Word("ab")], 2)):
        rep = joint_vs_dilation_report(tree, s)
        assert rep.verdict == "holds"
        assert rep.extras["exact_equal"]
        assert rep.window_sup.lo == value and rep.window_sup.hi == value
        assert rep.extras["joint_lo"] == value
        assert rep.extras["joint_hi"] == value
    _ok(7, "dilation equals joint stable length", "values 1 and 2, exact")


def test_acceptance_08_property_suites():
    # homogeneity and conjugation invariance of the stable length, then the
    # metric axioms of the log-dilation distance; >= 500 cases per suite,
    # exact on trees, 1e-9 relative on matrix models
    rng = np.random.default_rng(88)
    # moderate stretch: conjugation sends intermediate products through
    # sigma_1(h)^2 worth of cancellation, and the 1e-9 budget needs that
    # amplification of float roundoff to stay below ~1e3
    sch = build_schottky(2.0, (0.0, 1.2), delta=math.log(2))
    matrix_models = (sch.mobius, sch.linear)

    def rand_tree():
        w = (Fraction(int(rng.integers(1, 7)), int(rng.integers(1, 4))),
             Fraction(int(rng.integers(1, 7)), int(rng.integers(1, 4))))
        return TreeModel(2, weights=w)

    # homogeneity: l[g^k] = k l[g]
    for _ in range(500):
        tree, g = rand_tree(), _random_reduced(rng, 10)
        k = int(rng.integers(2, 7))
        assert (stable_length_bracket(tree, g ** k).lo
                == k * stable_length_bracket(tree, g).lo)
    for _ in range(500):
        model = matrix_models[int(rng.integers(2))]
        g = _random_reduced(rng, 8)
        k = int(rng.integers(2, 5))
        a = model.class_length((g ** k).letters)
        b = k * model.class_length(g.letters)
        assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)

    # conjugation invariance: l[hgh^-1] = l[g]
    for _ in range(500):
        tree, g, h = rand_tree(), _random_reduced(rng, 10), _random_reduced(rng, 8)
        assert (stable_length_bracket(tree, g.conjugate_by(h)).lo
                == stable_length_bracket(tree, g).lo)
    for _ in range(500):
        model = matrix_models[int(rng.integers(2))]
        g, h = _random_reduced(rng, 8), _random_reduced(rng, 6)
        a = model.class_length(g.conjugate_by(h).letters)
        b = model.class_length(g.letters)
        assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)

    # log-dilation distance: exact value, symmetry, vanishing on homothety
    # classes, triangle inequality; random integer-weight trees keep every
    # window sup a Fraction
    cfg = VerifierConfig(L_values=(6,))

    def int_tree():
        return TreeModel(2, weights=(int(rng.integers(1, 4)),
                                     int(rng.integers(1, 4))))

    delta_cases = 0
    for _ in range(250):
        a, b = int_tree(), int_tree()
        wa, wb = a.weights, b.weights
        exact = math.log(float(max(Fraction(wb[i], wa[i]) for i in range(2))
                               * max(Fraction(wa[i], wb[i]) for i in range(2))))
        fwd = metric_distance_report(a, b, cfg)
        bak = metric_distance_report(b, a, cfg)
        assert fwd.verdict == "holds" and bak.verdict == "holds"
        assert math.isclose(fwd.delta.lo, exact, rel_tol=1e-12, abs_tol=1e-12)
        assert fwd.delta.hi == fwd.delta.lo
        assert bak.delta.lo == fwd.delta.lo  # symmetry
        delta_cases += 2
    for _ in range(100):
        base = int_tree()
        # scale capped so the scaled tree keeps classes inside the L=6
        # window; otherwise the report degrades to an honest inconclusive
        c = int(rng.integers(1, 3))
        scaled = TreeModel(2, weights=(c * base.weights[0], c * base.weights[1]))
        rep = metric_distance_report(base, scaled, cfg)
        assert rep.delta.lo == 0.0 and rep.delta.hi == 0.0
        delta_cases += 1
    for _ in range(100):
        x, y, z = int_tree(), int_tree(), int_tree()
        dxz = metric_distance_report(x, z, cfg).delta.hi
        dxy = metric_distance_report(x, y, cfg).delta.hi
        dyz = metric_distance_report(y, z, cfg).delta.hi
        assert dxz <= dxy + dyz + 1e-12
        delta_cases += 1
    assert delta_cases >= 500
    _ok(8, "property suites",
        f"homogeneity 1000, conjugation 1000, distance axioms {delta_cases}")


def test_acceptance_09_shipped_scenarios_never_violated():
    # master regression: a certified violation in any shipped scenario
    # means an implementation bug, never a new theorem
    paths = sorted(SCEN_DIR.glob("*.json"))
    assert len(paths) == 7
    for p in paths:
        rep = run(load_scenario(p))
        assert rep.verdict != "violated", p.stem
        assert all(e["verdict"] != "violated" for e in rep.entries), p.stem
    _ok(9, "shipped scenarios regression", "7 scenarios, no violation verdicts")
