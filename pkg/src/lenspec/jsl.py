"""Joint stable lengths of finite sets and joint spectral radius brackets.

For a finite subset S of the group acting on X, the joint stable length is

    D_X(S) = lim_n  max over (s_1, ..., s_n) in S^n of  d(x, s_1...s_n x) / n,

again a subadditive limit, so a_n / n certifies upper bounds while stable
lengths of specific products certify lower bounds:

    hi = min over n <= n_max of a_n / n,
    lo = max( half the largest stable length over S^2,
              max over n, s in S^n of l_lo[s] / n ).

On trees the two collapse to the same number, half the largest two-letter
stable length; the product enumeration is still run to witness it.

The matrix joint spectral radius gets the same treatment in log scale, with
sigma_1 certifying from above and spectral radii from below, plus the
explicit dimension-dependent constants for the spectral upper bound
c_m = 8 log 2 + 5 log m, d_m = 2 m^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .actions import LengthBracket, exact_div
from .errors import InputError, NumericError, ResourceCapError
from .spaces import MatrixActionModel, MobiusModel, TreeModel, WordMetricModel
from .words import Word

__all__ = [
    "SubsetS",
    "JointLengthProfile",
    "joint_stable_length",
    "joint_stable_profile",
    "tree_joint_profile",
    "BochiConstants",
    "BochiBound",
    "bochi_rhs",
    "jsr_bracket",
    "jsr_profile",
    "JsrProfile",
    "bf_upper",
    "bf_lower_check",
    "bf_minimal_K",
    "BfCheck",
]


@dataclass(frozen=True)
class SubsetS:
    """A finite subset of the free group, the S in joint-length quantities."""

    elements: tuple[Word, ...]

    def __init__(self, elements: Sequence[Word | str]):
        elems = tuple(e if isinstance(e, Word) else Word(e) for e in elements)
        if not elems:
            raise InputError("subset must be nonempty")
        object.__setattr__(self, "elements", elems)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def _as_words(s) -> list[Word]:
    if isinstance(s, SubsetS):
        return list(s.elements)
    return [e if isinstance(e, Word) else Word(e) for e in s]


@dataclass
class JointLengthProfile:
    """Joint stable length bracket plus the per-level evidence."""

    bracket: LengthBracket
    a: dict
    lo_terms: dict
    pair_half: object
    engine: str
    pruned: bool = False
    eroded: bool = False


def _concat_reduced(w: tuple, s: tuple) -> tuple:
    """Reduce w * s assuming both are reduced (cancellation only at the seam)."""
    i = len(w)
    j = 0
    while i > 0 and j < len(s) and w[i - 1] == -s[j]:
        i -= 1
        j += 1
    return w[:i] + s[j:]


def _peeled_length(letters: tuple, weight_of) -> object:
    """Weighted cyclically reduced length (no rotation needed for lengths)."""
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    if i > j:
        return 0
    return sum(weight_of(x) for x in letters[i : j + 1])


def _word_lower_oracle(model):
    """Cheap per-word stable-length lower bound for word-frontier models."""
    if isinstance(model, TreeModel):
        return lambda letters: _peeled_length(letters, model.weight_of)
    if isinstance(model, WordMetricModel):
        if model.exactness == "tree-exact":
            tree = model._tree
            return lambda letters: _peeled_length(letters, tree.weight_of)
        c = model._c_cmp
        return lambda letters: exact_div(_peeled_length(letters, lambda _x: 1), c)
    return None


def _word_joint_profile(model, words, n_max, frontier_cap, beam, deep_lo):
    s_list = [w.letters for w in words]
    lower = _word_lower_oracle(model) if deep_lo else None
    frontier = set(s_list)
    a = {}
    lo_terms = {}
    pruned = False
    for n in range(1, n_max + 1):
        if n > 1:
            if len(frontier) * len(s_list) > frontier_cap:
                if beam is None:
                    raise ResourceCapError(
                        f"level {n} frontier would exceed cap {frontier_cap}; "
                        "pass a beam width to prune (bracket loses certification)"
                    )
                ranked = sorted(
                    frontier, key=lambda w: model.displacement(Word(w)), reverse=True
                )
                frontier = set(ranked[:beam])
                pruned = True
            frontier = {_concat_reduced(w, s) for w in frontier for s in s_list}
        a[n] = max(model.displacement(Word(w)) for w in frontier)
        if lower is not None:
            lo_terms[n] = exact_div(max(lower(w) for w in frontier), n)
    return a, lo_terms, pruned, frontier


# ------------------------------------------------- vectorized matrix levels


def _batch_sigma1(batch: np.ndarray) -> np.ndarray:
    m = batch.shape[-1]
    if m == 2:
        f = np.sum(np.abs(batch) ** 2, axis=(1, 2))
        det = batch[:, 0, 0] * batch[:, 1, 1] - batch[:, 0, 1] * batch[:, 1, 0]
        d2 = np.abs(det) ** 2
        q = np.sqrt(np.clip(f * f - 4.0 * d2, 0.0, None))
        return np.sqrt(np.clip((f + q) / 2.0, 0.0, None))
    return np.linalg.svd(batch, compute_uv=False)[:, 0]


def _batch_lambda1(batch: np.ndarray) -> np.ndarray:
    m = batch.shape[-1]
    if m == 2:
        tr = (batch[:, 0, 0] + batch[:, 1, 1]).astype(np.complex128)
        det = (batch[:, 0, 0] * batch[:, 1, 1]
               - batch[:, 0, 1] * batch[:, 1, 0]).astype(np.complex128)
        q = np.sqrt(tr * tr - 4.0 * det)
        return np.maximum(np.abs((tr + q) / 2.0), np.abs((tr - q) / 2.0))
    return np.max(np.abs(np.linalg.eigvals(batch)), axis=1)


class _MatrixLevels:
    """Iterates S^n as a normalized batch with an accumulated log scale."""

    def __init__(self, mats: Sequence[np.ndarray], cap: int, beam: Optional[int]):
        base = np.stack([np.asarray(m) for m in mats])
        if np.iscomplexobj(base):
            base = base.astype(np.complex128)
        else:
            base = base.astype(np.float64)
        self.gens = base
        self.cap = cap
        self.beam = beam
        self.pruned = False
        self.batch = base.copy()
        self.log_scale = 0.0
        self._renorm()

    def _renorm(self):
        c = float(np.max(np.abs(self.batch)))
        if not math.isfinite(c):
            raise NumericError("non-finite matrix entries in joint enumeration")
        if c <= 0:
            raise NumericError("zero matrix reached in joint enumeration")
        self.batch = self.batch / c
        self.log_scale += math.log(c)

    def advance(self):
        n_next = self.batch.shape[0] * self.gens.shape[0]
        if n_next > self.cap:
            if self.beam is None:
                raise ResourceCapError(
                    f"matrix frontier would exceed cap {self.cap}; "
                    "pass a beam width to prune"
                )
            order = np.argsort(-_batch_sigma1(self.batch))
            self.batch = self.batch[order[: self.beam]]
            self.pruned = True
        self.batch = np.concatenate(
            [self.batch @ g for g in self.gens], axis=0
        )
        self._renorm()


def _matrix_joint_profile(model, words, n_max, frontier_cap, beam, deep_lo):
    mats = [model.matrix(w) for w in words]
    levels = _MatrixLevels(mats, frontier_cap, beam)
    a = {}
    lo_terms = {}
    is_mobius = isinstance(model, MobiusModel)
    for n in range(1, n_max + 1):
        if n > 1:
            levels.advance()
        ls = levels.log_scale
        s1 = _batch_sigma1(levels.batch)
        log_disp = np.log(np.clip(s1, 1e-300, None)) + ls
        if is_mobius:
            # d = arccosh(|A|_F^2 / 2); |A|_F^2 = s1^2 + s2^2 and s1 s2 = 1,
            # so in terms of s1 this is exactly 2 log s1... only for det 1.
            f = np.sum(np.abs(levels.batch) ** 2, axis=(1, 2))
            log_y = np.log(np.clip(f / 2.0, 1e-300, None)) + 2.0 * ls
            big = log_y >= 20.0
            y_small = np.exp(np.where(big, 0.0, log_y))
            disp = np.where(
                big,
                math.log(2.0) + log_y,
                np.arccosh(np.clip(y_small, 1.0, None)),
            )
        else:
            disp = np.maximum(log_disp, 0.0)
        a[n] = float(np.max(disp))
        if deep_lo:
            lam = _batch_lambda1(levels.batch)
            ll = np.log(np.clip(lam, 1e-300, None)) + ls
            ll = np.maximum(ll, 0.0)
            if is_mobius:
                ll = 2.0 * ll
            lo_terms[n] = float(np.max(ll)) / n
    return a, lo_terms, levels.pruned


# ----------------------------------------------------- tree fast path (DP)

# Transition memo shared across models with the same weight signature:
# key (weights, suffix, trunc, s) -> (new_suffix, new_trunc, delta, eroded).
_TREE_STEP_MEMO: dict = {}

_EXACT, _TRUNC, _BLIND = 0, 1, 2


def _tree_step(weights, suffix, trunc, s, cap):
    key = (weights, suffix, trunc, s)
    hit = _TREE_STEP_MEMO.get(key)
    if hit is not None:
        return hit
    w = list(suffix)
    t = 0
    delta = 0
    while t < len(s) and w and w[-1] == -s[t]:
        delta -= weights[abs(w.pop()) - 1]
        t += 1
    eroded = trunc == _TRUNC and not w and t < len(s)
    kept = s[t:]
    for x in kept:
        delta += weights[abs(x) - 1]
    if eroded:
        out = ((), _BLIND, delta, True)
    else:
        new = tuple(w) + kept
        new_trunc = trunc
        if len(new) > cap:
            new = new[-cap:]
            new_trunc = _TRUNC
        out = (new, new_trunc, delta, False)
    _TREE_STEP_MEMO[key] = out
    return out


def tree_joint_profile(model: TreeModel, s, n_max: int = 12,
                       suffix_cap: int = 6) -> JointLengthProfile:
    """Joint stable length on a tree via a bounded-suffix automaton.

    Cancellation against a single factor never looks deeper than the factor
    length, so transitions on the last few letters are exact; when repeated
    cancellation erodes past the retained suffix the sequence switches to a
    blind state that stops cancelling altogether.  Level maxima are then
    certified upper bounds for the true maxima (exact when nothing eroded,
    as reported by ``eroded``), so the hi side of the bracket stays sound.
    The lo side is the exact half-max stable length over S^2.
    """
    words = _as_words(s)
    s_list = [w.letters for w in words]
    if any(not w for w in s_list):
        s_list = [w for w in s_list if w] or [()]
    weights = tuple(model.weights)
    cap = max(suffix_cap, 2 * max((len(w) for w in s_list), default=1))
    states: dict = {}
    a = {}
    eroded_any = False
    for w in s_list:
        st = (w, _EXACT) if len(w) <= cap else (w[-cap:], _TRUNC)
        v = sum(weights[abs(x) - 1] for x in w)
        if states.get(st, -1) < v:
            states[st] = v
    a[1] = max(states.values())
    sw_weight = [sum(weights[abs(x) - 1] for x in sw) for sw in s_list]
    blind_key = ((), _BLIND)
    for n in range(2, n_max + 1):
        nxt: dict = {}
        for (suffix, trunc), val in states.items():
            if trunc == _BLIND:
                nv = val + max(sw_weight)
                if nxt.get(blind_key, -1) < nv:
                    nxt[blind_key] = nv
                continue
            for sw in s_list:
                nsuf, ntr, delta, er = _tree_step(weights, suffix, trunc, sw, cap)
                if er:
                    eroded_any = True
                key = (nsuf, ntr)
                nv = val + delta
                if nxt.get(key, -1) < nv:
                    nxt[key] = nv
        states = nxt
        a[n] = max(states.values())
    pair = 0
    for u in s_list:
        for v in s_list:
            cand = _peeled_length(_concat_reduced(u, v), model.weight_of)
            if cand > pair:
                pair = cand
    pair_half = exact_div(pair, 2)
    hi = min(exact_div(a[n], n) for n in a)
    lo = min(pair_half, hi)
    bracket = LengthBracket(lo, hi, exact=bool(lo == hi))
    return JointLengthProfile(
        bracket=bracket,
        a=a,
        lo_terms={2: pair_half},
        pair_half=pair_half,
        engine="tree-dp",
        eroded=eroded_any,
    )


# ----------------------------------------------------------- public API


def joint_stable_profile(
    model,
    s,
    n_max: int = 8,
    *,
    frontier_cap: int = 1_000_000,
    beam: Optional[int] = None,
    deep_lo: bool = True,
    engine: str = "auto",
) -> JointLengthProfile:
    """Joint stable length of S under the model, with per-level evidence.

    engine: 'products' enumerates S^n (deduplicated reduced words for word
    models, vectorized batches for matrix models); 'tree-dp' is the bounded
    suffix automaton (TreeModel only); 'auto' picks by model kind.
    """
    words = _as_words(s)
    if n_max < 2:
        raise InputError("n_max must be >= 2")
    if engine == "tree-dp" or (
        engine == "auto" and isinstance(model, TreeModel) and n_max >= 2
        and len(words) ** n_max > frontier_cap
    ):
        if not isinstance(model, TreeModel):
            raise InputError("tree-dp engine needs a TreeModel")
        return tree_joint_profile(model, words, n_max)
    if model.frontier_kind == "matrix":
        a, lo_terms, pruned = _matrix_joint_profile(
            model, words, n_max, frontier_cap, beam, deep_lo
        )
    else:
        a, lo_terms, pruned, _ = _word_joint_profile(
            model, words, n_max, frontier_cap, beam, deep_lo
        )
    hi = min(exact_div(a[n], n) for n in a)
    pair_half = lo_terms.get(2)
    lo = max(lo_terms.values()) if lo_terms else (0 if isinstance(hi, (int, Fraction)) else 0.0)
    lo = min(lo, hi)  # guards float noise; exact engines satisfy lo <= hi
    bracket = LengthBracket(
        lo, hi, exact=bool(lo == hi and not pruned), certified=not pruned
    )
    return JointLengthProfile(
        bracket=bracket,
        a=a,
        lo_terms=lo_terms,
        pair_half=pair_half,
        engine="matrix" if model.frontier_kind == "matrix" else "products",
        pruned=pruned,
    )


def joint_stable_length(model, s, n_max: int = 8, **kw) -> LengthBracket:
    return joint_stable_profile(model, s, n_max, **kw).bracket


# ------------------------------------------------------- pairwise bounds


@dataclass(frozen=True)
class BfCheck:
    """Two-sided sandwich of the joint length by half the pair maximum."""

    ok: bool
    pair_half: LengthBracket
    joint: LengthBracket
    upper_value: object
    minimal_K: object
    minimal_K_lower: object
    K: object
    delta: object
    tol: float


def _pair_sup_bracket(model, words) -> LengthBracket:
    from .words import ConjClass

    best_lo = None
    best_hi = None
    for u in words:
        for v in words:
            b = model.stable_length(ConjClass.of(u * v))
            best_lo = b.lo if best_lo is None else max(best_lo, b.lo)
            best_hi = b.hi if best_hi is None else max(best_hi, b.hi)
    return LengthBracket(best_lo, best_hi, exact=bool(best_lo == best_hi))


def bf_upper(model, s, K) -> object:
    """Value of K*delta + half the largest pair stable length (upper side)."""
    words = _as_words(s)
    pair = _pair_sup_bracket(model, words)
    return K * model.delta + exact_div(pair.hi, 2)


def _k_from_gap(gap, delta):
    if delta == 0:
        return 0 if gap <= 0 else math.inf
    return max(0.0, float(gap) / float(delta))


def bf_minimal_K(model, s, n_max: int = 8, **kw):
    """Smallest K certified to make the pair upper bound hold here.

    Uses the hi side of the joint bracket against the lo side of the pair
    sup, so it can only overshoot the true minimal K; inf means the bracket
    is too loose to certify any K when delta is zero.
    """
    words = _as_words(s)
    pair = _pair_sup_bracket(model, words)
    joint = joint_stable_length(model, words, n_max, **kw)
    return _k_from_gap(joint.hi - exact_div(pair.lo, 2), model.delta)


def bf_lower_check(model, s, n_max: int = 8, tol: float = 1e-9, K=None, **kw) -> BfCheck:
    """Check half the pair maximum really sits below the joint length."""
    words = _as_words(s)
    pair = _pair_sup_bracket(model, words)
    profile = joint_stable_profile(model, words, n_max, **kw)
    joint = profile.bracket
    half = LengthBracket(
        exact_div(pair.lo, 2), exact_div(pair.hi, 2), pair.exact, pair.certified
    )
    ok = bool(half.lo <= joint.hi + tol)
    K = 1 if K is None else K
    upper = K * model.delta + half.hi
    return BfCheck(
        ok=ok,
        pair_half=half,
        joint=joint,
        upper_value=upper,
        minimal_K=_k_from_gap(joint.hi - half.lo, model.delta),
        minimal_K_lower=_k_from_gap(joint.lo - half.hi, model.delta),
        K=K,
        delta=model.delta,
        tol=tol,
    )


# --------------------------------------------------------- matrix JSR side


@dataclass(frozen=True)
class BochiConstants:
    """Dimension constants for the spectral upper bound on joint growth."""

    m: int
    c_m: float
    d_m: int

    @classmethod
    def for_dim(cls, m: int) -> "BochiConstants":
        if m < 1:
            raise InputError("dimension must be >= 1")
        return cls(m=m, c_m=8.0 * math.log(2.0) + 5.0 * math.log(m), d_m=2 * m**3)

    def __post_init__(self):
        if self.c_m <= 0 or self.d_m < 1:
            raise InputError("constants must be positive")


@dataclass
class JsrProfile:
    bracket: LengthBracket
    sigma_terms: dict
    lambda_terms: dict
    pruned: bool


def jsr_profile(mats, n_max: int = 8, *, cap: int = 2_000_000,
                beam: Optional[int] = None) -> JsrProfile:
    """Joint spectral radius bracket in log scale.

    hi = min over n of (1/n) log max sigma_1 over S^n (submultiplicativity),
    lo = max over n of (1/n) log max spectral radius over S^n (Gelfand).
    Levels are renormalized, so overflow cannot occur silently.
    """
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    levels = _MatrixLevels(list(mats), cap, beam)
    sig = {}
    lam = {}
    for n in range(1, n_max + 1):
        if n > 1:
            levels.advance()
        ls = levels.log_scale
        s1 = float(np.max(_batch_sigma1(levels.batch)))
        l1 = float(np.max(_batch_lambda1(levels.batch)))
        sig[n] = (math.log(s1) + ls) / n if s1 > 0 else -math.inf
        lam[n] = (math.log(l1) + ls) / n if l1 > 0 else -math.inf
    hi = min(sig.values())
    lo = max(lam.values())
    lo = min(lo, hi)
    bracket = LengthBracket(lo, hi, certified=not levels.pruned)
    return JsrProfile(bracket=bracket, sigma_terms=sig, lambda_terms=lam,
                      pruned=levels.pruned)


def jsr_bracket(mats, n_max: int = 8, **kw) -> LengthBracket:
    return jsr_profile(mats, n_max, **kw).bracket


@dataclass(frozen=True)
class BochiBound:
    """Log-scale spectral upper bound c_m + max_j (1/j) log max lambda_1."""

    value: float
    constants: BochiConstants
    j_used: int
    partial: bool
    lambda_terms: dict = field(default_factory=dict)


def bochi_rhs(mats, constants: Optional[BochiConstants] = None, *,
              cap: int = 2_000_000, j_cap: Optional[int] = None) -> BochiBound:
    """Spectral-radius upper bound for the joint spectral radius (log scale).

    Scans products of length j = 1..d_m.  If |S|^j would exceed the cap the
    scan stops early and the result is flagged partial (a probe): a partial
    maximum can only undershoot, so a probe must not be used to certify.
    """
    mats = list(mats)
    m = np.asarray(mats[0]).shape[0]
    if constants is None:
        constants = BochiConstants.for_dim(m)
    if constants.m != m:
        raise InputError(f"constants are for dimension {constants.m}, matrices are {m}x{m}")
    j_stop = constants.d_m if j_cap is None else min(j_cap, constants.d_m)
    levels = _MatrixLevels(mats, cap, None)
    lam = {}
    j_used = 0
    partial = False
    for j in range(1, j_stop + 1):
        if j > 1:
            try:
                levels.advance()
            except ResourceCapError:
                partial = True
                break
        ls = levels.log_scale
        l1 = float(np.max(_batch_lambda1(levels.batch)))
        lam[j] = (math.log(l1) + ls) / j if l1 > 0 else -math.inf
        j_used = j
    if j_used < constants.d_m:
        partial = True
    value = constants.c_m + max(lam.values())
    return BochiBound(value=value, constants=constants, j_used=j_used,
                      partial=partial, lambda_terms=lam)
