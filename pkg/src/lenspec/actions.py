"""Action models, certified length brackets and stable-length estimators.

An action model exposes one oracle, the displacement g -> d(x, g x) of a
fixed basepoint, plus a few declared constants (hyperbolicity delta, a
coboundedness constant D when the orbit is D-dense, a roughness constant
alpha for rough-geodesic pseudo-metrics).  Everything else in the package
is computed from displacements.

Stable translation length of g is lim_k d(x, g^k x)/k; the limit exists by
subadditivity, does not depend on the basepoint, and is a conjugacy
invariant.  Models that can evaluate it exactly say so via ``exactness``:

* ``tree-exact``: weighted cyclically reduced length, exact arithmetic;
* ``eigenvalue-exact``: spectral formula on the class representative;
* ``bracket-only``: only certified brackets are available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InputError, NumericError
from .words import ConjClass, Word, cyclic_reduce

__all__ = [
    "LengthBracket",
    "ActionModel",
    "AnosovCertificate",
    "displacement",
    "gromov_product",
    "stable_length",
    "stable_length_bracket",
    "ratio_bracket",
    "anosov_certificate",
    "power_schedule",
]


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def exact_div(a, b):
    """a / b, staying in Fraction when both sides are exact."""
    if _is_exact(a) and _is_exact(b):
        return Fraction(a, 1) / Fraction(b, 1)
    return a / b


def _half(x):
    return Fraction(x, 1) / 2 if _is_exact(x) else x / 2


@dataclass(frozen=True)
class LengthBracket:
    """A certified interval [lo, hi] around a length-type quantity.

    ``exact`` means lo == hi by construction (not merely numerically).
    ``certified`` drops to False when a resource-capped computation pruned
    candidates, in which case hi is no longer a proven upper bound.
    Values may be int/Fraction (exact models) or float.
    """

    lo: object
    hi: object
    exact: bool = False
    certified: bool = True

    def __post_init__(self):
        lo, hi = self.lo, self.hi
        if not (_is_exact(lo) and _is_exact(hi)):
            # allow a hair of float noise, then clamp
            scale = max(abs(float(lo)), abs(float(hi)), 1.0)
            if float(lo) > float(hi) + 1e-9 * scale:
                raise InputError(f"bracket lo {lo} > hi {hi}")
            if float(lo) > float(hi):
                object.__setattr__(self, "lo", hi)
        elif lo > hi:
            raise InputError(f"bracket lo {lo} > hi {hi}")
        if self.exact and self.lo != self.hi:
            raise InputError("exact bracket must have lo == hi")

    @classmethod
    def exactly(cls, v) -> "LengthBracket":
        return cls(v, v, exact=True)

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, v, tol=0) -> bool:
        return self.lo - tol <= v <= self.hi + tol

    def scale(self, c) -> "LengthBracket":
        if c < 0:
            raise InputError("scale factor must be nonnegative")
        return LengthBracket(self.lo * c, self.hi * c, self.exact, self.certified)

    def __str__(self):
        if self.exact:
            return f"{self.lo}"
        return f"[{self.lo}, {self.hi}]"


def ratio_bracket(num: LengthBracket, den: LengthBracket) -> LengthBracket:
    """Bracket of num/den for positive den (den.lo > 0)."""
    if not den.lo > 0:
        raise InputError("ratio bracket needs a positive denominator")
    lo = exact_div(num.lo, den.hi)
    hi = exact_div(num.hi, den.lo)
    return LengthBracket(
        lo,
        hi,
        exact=num.exact and den.exact,
        certified=num.certified and den.certified,
    )


def sup_bracket(brackets: Sequence[LengthBracket]) -> LengthBracket:
    """Bracket of the supremum of finitely many bracketed quantities."""
    if not brackets:
        raise InputError("sup of empty bracket list")
    lo = max(b.lo for b in brackets)
    hi = max(b.hi for b in brackets)
    return LengthBracket(
        lo,
        hi,
        exact=all(b.exact for b in brackets) and lo == hi,
        certified=all(b.certified for b in brackets),
    )


class ActionModel:
    """Base class: an isometric action of a free group given by displacements.

    Attributes set by subclasses:
      rank         free group rank
      symmetric    False for asymmetric pseudo-metrics
      delta        hyperbolicity constant of the space (0 for trees)
      cobound_D    orbit density constant, or None
      alpha        rough-geodesicity constant, or None
      exactness    'tree-exact' | 'eigenvalue-exact' | 'bracket-only'
      frontier_kind 'word' or 'matrix', picks the joint-length engine
    """

    rank: int = 0
    symmetric: bool = True
    delta = 0
    cobound_D = None
    alpha = None
    exactness: str = "bracket-only"
    frontier_kind: str = "word"

    def displacement(self, g: Word):
        raise NotImplementedError

    def displacement_of_powers(self, g: Word, ks: Sequence[int]) -> dict:
        """d(x, g^k x) for each k.  Word models use the cyclic decomposition."""
        c = cyclic_reduce(g)
        u, w = c.rep.letters, c.conjugator.letters
        winv = tuple(-x for x in reversed(w))
        out = {}
        for k in ks:
            out[k] = self.displacement(Word(w + u * k + winv))
        return out

    def exact_stable_length(self, c: ConjClass):
        """Exact stable length of the class, or None if unavailable."""
        return None

    def stable_length(self, c: ConjClass, k_max: int = 8, c_delta=4) -> LengthBracket:
        v = self.exact_stable_length(c)
        if v is not None:
            return LengthBracket.exactly(v)
        return stable_length_bracket(self, c.rep, k_max=k_max, c_delta=c_delta)

    def window_radius(self, length_bound) -> int:
        """Standard-length radius guaranteed to contain every conjugacy class
        with stable length <= length_bound.  Subclasses implement the
        comparison to the unit tree."""
        raise NotImplementedError


def displacement(model: ActionModel, g: Word):
    return model.displacement(g)


def gromov_product(model: ActionModel, g: Word, h: Word):
    """(g x | h x)_x from displacements.

    Computed as (d(x, g^-1 x) + d(x, h x) - d(x, (g^-1 h) x)) / 2, which is
    the ordered variant; for symmetric models it coincides with the usual
    Gromov product.  Exact weights give exact values.
    """
    a = model.displacement(g.inverse())
    b = model.displacement(h)
    c = model.displacement(g.inverse() * h)
    s = a + b - c
    return _half(s)


def power_schedule(k_max: int) -> list[int]:
    """Doubling exponents 1, 2, 4, ..., up to twice k_max (rounded up)."""
    if k_max < 2:
        raise InputError("k_max must be >= 2")
    top = 2 ** (math.ceil(math.log2(k_max)) + 1)
    ks, k = [], 1
    while k <= top:
        ks.append(k)
        k *= 2
    return ks


def stable_length_bracket(
    model: ActionModel, g: Word, k_max: int = 8, c_delta=4
) -> LengthBracket:
    """Certified bracket around the stable length of g from power displacements.

    With a_k = d(x, g^k x):
      hi = min over computed k of a_k / k          (subadditivity),
      lo = max over pairs (k, 2k) of (a_2k - a_k)/k - c_delta*delta/k,
    clamped at 0.  In a delta-hyperbolic space the drift of consecutive
    powers underestimates the stable length by at most a fixed multiple of
    delta, which c_delta (default 4) is meant to dominate; trees (delta=0)
    give lo exactly.
    """
    if not g.letters:
        return LengthBracket.exactly(0 if _is_exact(model.delta) else 0.0)
    ks = power_schedule(k_max)
    a = model.displacement_of_powers(g, ks)
    hi = min(exact_div(a[k], k) for k in ks)
    lo = None
    for k in ks:
        if 2 * k not in a:
            continue
        cand = exact_div(a[2 * k] - a[k], k) - exact_div(c_delta * model.delta, k)
        if lo is None or cand > lo:
            lo = cand
    zero = 0 if _is_exact(hi) else 0.0
    lo = max(zero, zero if lo is None else lo)
    lo = min(lo, hi)  # float noise guard; exact models satisfy lo <= hi anyway
    return LengthBracket(lo, hi, exact=bool(lo == hi))


def stable_length(model: ActionModel, c: ConjClass, k_max: int = 8, c_delta=4):
    return model.stable_length(c, k_max=k_max, c_delta=c_delta)


@dataclass(frozen=True)
class AnosovCertificate:
    """Singular-gap growth certificate for a linear model.

    Scans the ball of the given radius and fits the largest mu with
    log(sigma_1/sigma_2)(rho(g)) >= log C + mu |g| over the ball, anchored
    at the identity: mu = min over the ball of gap/|g|, log C = min of
    (gap - mu |g|).  mu > 0 certifies a uniform singular-value gap on the
    sample (dominated / convex-cocompact behavior); rotations and the
    trivial representation give mu = 0.
    """

    mu: float
    log_C: float
    ok: bool
    radius: int
    worst: Word = field(default_factory=Word)

    @property
    def C(self) -> float:
        return math.exp(self.log_C)


def anosov_certificate(model, radius: int = 6) -> AnosovCertificate:
    """Fit the gap certificate by enumerating the ball of the given radius.

    ``model`` must expose ``rank``, ``generator_matrix(letter)`` and
    ``singular_gap(matrix) -> log(sigma1/sigma2)`` (the matrix models do).
    """
    rank = model.rank
    letters = []
    for i in range(1, rank + 1):
        letters.extend((i, -i))
    mu = math.inf
    worst = Word()
    rows: list[tuple[int, float]] = []

    def walk(word: tuple[int, ...], mat):
        nonlocal mu, worst
        gap = model.singular_gap(mat)
        if not math.isfinite(gap):
            raise NumericError(f"non-finite singular gap at {Word(word)}")
        rows.append((len(word), gap))
        r = gap / len(word)
        if r < mu:
            mu = r
            worst = Word(word)
        if len(word) < radius:
            for x in letters:
                if word and x == -word[-1]:
                    continue
                walk(word + (x,), mat @ model.generator_matrix(x))

    for x in letters:
        walk((x,), model.generator_matrix(x))
    if not rows:
        raise InputError("empty ball; radius must be >= 1")
    mu = max(mu, 0.0)
    log_c = min(gap - mu * n for n, gap in rows)
    log_c = min(log_c, 0.0)
    return AnosovCertificate(
        mu=mu, log_C=log_c, ok=mu > 1e-9, radius=radius, worst=worst
    )
