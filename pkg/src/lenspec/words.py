"""Free group words, conjugacy classes and weighted generating sets.

Conventions used throughout the package:

* A letter is a nonzero int: ``+i`` is the i-th free generator (1-indexed),
  ``-i`` is its inverse.
* A word is reduced iff no two adjacent letters cancel.  ``Word`` instances
  always hold reduced letter tuples.
* The fixed letter order for canonical choices is
  ``a1 < a1^-1 < a2 < a2^-1 < ...``, i.e. key ``(|x|, x < 0)``.
* Words render as strings over ``a..z`` with inverses ``A..Z`` when the rank
  allows it, e.g. ``aBa`` for ``a b^-1 a``.

Conjugacy classes are represented by the cyclically reduced, lexicographically
minimal rotation of the word.  Inverse classes are not identified: ``[ab]``
and ``[b^-1 a^-1]`` are distinct.
"""

from __future__ import annotations

import heapq
import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InputError, ResourceCapError, SearchExhaustedError

__all__ = [
    "Word",
    "ConjClass",
    "GeneratingSet",
    "GenerationCheck",
    "reduce_word",
    "free_reduce",
    "letter_key",
    "cyclic_reduce",
    "enumerate_conj_classes",
    "enumerate_ball",
    "word_length",
    "check_semigroup_generation",
]


def letter_key(x: int) -> tuple[int, bool]:
    """Sort key realizing the order a1 < a1^-1 < a2 < a2^-1 < ..."""
    return (abs(x), x < 0)


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Stack-based free reduction of a raw letter sequence."""
    out: list[int] = []
    for x in letters:
        if not isinstance(x, int) or x == 0:
            raise InputError(f"bad letter {x!r}: letters are nonzero ints")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _parse_letter_string(s: str) -> tuple[int, ...]:
    letters = []
    for ch in s:
        if ch in string.ascii_lowercase:
            letters.append(string.ascii_lowercase.index(ch) + 1)
        elif ch in string.ascii_uppercase:
            letters.append(-(string.ascii_uppercase.index(ch) + 1))
        elif ch in " .":
            continue
        else:
            raise InputError(f"cannot parse letter {ch!r} in word string {s!r}")
    return tuple(letters)


@dataclass(frozen=True, slots=True)
class Word:
    """A reduced word in a free group.

    The constructor free-reduces its input, so ``Word("abB")`` equals
    ``Word("a")``.  Accepts a letter iterable or a string like ``"aBa"``.
    """

    letters: tuple[int, ...] = ()

    def __init__(self, letters: Iterable[int] | str = ()):
        if isinstance(letters, str):
            letters = _parse_letter_string(letters)
        object.__setattr__(self, "letters", free_reduce(letters))

    # -- basic algebra ------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, k: int) -> "Word":
        if k == 0:
            return Word()
        if k < 0:
            return self.inverse() ** (-k)
        if k == 1:
            return self
        # g = c u c^-1 with u cyclically reduced, so g^k = c u^k c^-1 and u^k
        # needs no internal reduction.
        c = cyclic_reduce(self)
        u = c.rep.letters
        w = c.conjugator.letters
        return Word(w + u * k + tuple(-x for x in reversed(w)))

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def conjugate_by(self, w: "Word") -> "Word":
        """Return w^-1 * self * w."""
        return w.inverse() * self * w

    def max_index(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    # -- rendering ----------------------------------------------------

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        if self.max_index() > 26:
            return ".".join(str(x) for x in self.letters)
        out = []
        for x in self.letters:
            c = string.ascii_lowercase[abs(x) - 1]
            out.append(c if x > 0 else c.upper())
        return "".join(out)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


def reduce_word(letters: Iterable[int] | str) -> Word:
    """Free-reduce a raw letter sequence (or string) into a Word."""
    return Word(letters)


def _min_rotation(u: tuple[int, ...]) -> int:
    """Index of the lexicographically minimal rotation of u (letter_key order)."""
    n = len(u)
    if n <= 1:
        return 0
    keyed = [letter_key(x) for x in u]
    best = 0
    best_rot = keyed
    for r in range(1, n):
        rot = keyed[r:] + keyed[:r]
        if rot < best_rot:
            best, best_rot = r, rot
    return best


@dataclass(frozen=True, slots=True)
class ConjClass:
    """A conjugacy class, canonically represented.

    ``rep`` is cyclically reduced and is the minimal rotation among all
    rotations of itself; ``conjugator`` is a witness w with
    ``rep == w^-1 * g * w`` for the word g the class was built from.
    """

    rep: Word
    conjugator: Word = field(default_factory=Word)

    @classmethod
    def of(cls, g: Word) -> "ConjClass":
        return cyclic_reduce(g)

    @property
    def std_length(self) -> int:
        return len(self.rep)

    def __str__(self) -> str:
        return f"[{self.rep}]"

    def __repr__(self) -> str:
        return f"ConjClass({str(self.rep)!r})"


def cyclic_reduce(g: Word) -> ConjClass:
    """Cyclically reduce and rotate to the canonical class representative."""
    letters = g.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    peeled = letters[:i]          # conjugator prefix from peeling
    core = letters[i : j + 1]
    r = _min_rotation(core)
    rep = core[r:] + core[:r]
    conj = peeled + core[:r]      # rep = conj^-1 g conj; concatenation is reduced
    w = Word.__new__(Word)
    object.__setattr__(w, "letters", rep)
    c = Word.__new__(Word)
    object.__setattr__(c, "letters", conj)
    return ConjClass(rep=w, conjugator=c)


def _letters_in_order(rank: int) -> list[int]:
    out = []
    for i in range(1, rank + 1):
        out.extend((i, -i))
    return out


def enumerate_ball(rank: int, radius: int, cap: int = 2_000_000) -> list[Word]:
    """All reduced words of standard length <= radius, in (length, lex) order."""
    if rank < 1:
        raise InputError("rank must be >= 1")
    alphabet = _letters_in_order(rank)
    out = [Word()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            last = w[-1] if w else 0
            for x in alphabet:
                if x != -last:
                    nxt.append(w + (x,))
        if len(out) + len(nxt) > cap:
            raise ResourceCapError(
                f"ball of radius {radius} in rank {rank} exceeds cap {cap}"
            )
        for w in nxt:
            wd = Word.__new__(Word)
            object.__setattr__(wd, "letters", w)
            out.append(wd)
        frontier = nxt
    return out


def _is_least_rotation(w: tuple[int, ...]) -> bool:
    """Whether w equals its canonical rotation (ties resolve to index 0)."""
    n = len(w)
    k0 = letter_key(w[0])
    for r in range(1, n):
        kr = letter_key(w[r])
        if kr < k0:
            return False
        if kr != k0:
            continue
        # deep compare rotation r against rotation 0; equal keys mean equal
        # letters, so start at offset 1
        for i in range(1, n):
            a = letter_key(w[r + i - n if r + i >= n else r + i])
            b = letter_key(w[i])
            if a < b:
                return False
            if a > b:
                break
    return True


def iter_class_reps(rank: int, max_std_length: int, cap: int = 4_000_000):
    """Canonical class representatives as letter tuples, by (length, order).

    One pruned depth-first walk: a branch dies as soon as it contains a
    letter ordered before its first letter, since no rotation of any
    extension could then start at index 0.  Identity is not included.
    """
    if rank < 1:
        raise InputError("rank must be >= 1")
    if max_std_length < 1:
        return []
    alphabet = _letters_in_order(rank)
    by_len: list[list[tuple[int, ...]]] = [[] for _ in range(max_std_length + 1)]
    visited = 0
    rev = list(reversed(alphabet))
    stack: list[tuple[int, ...]] = [(x,) for x in rev]
    while stack:
        w = stack.pop()
        visited += 1
        if visited > cap:
            raise ResourceCapError(f"class enumeration exceeds cap {cap}")
        n = len(w)
        if not (n > 1 and w[0] == -w[-1]) and _is_least_rotation(w):
            by_len[n].append(w)
        if n == max_std_length:
            continue
        k0 = letter_key(w[0])
        last = w[-1]
        for x in rev:
            if x != -last and letter_key(x) >= k0:
                stack.append(w + (x,))
    out: list[tuple[int, ...]] = []
    for bucket in by_len:
        out.extend(bucket)
    return out


def enumerate_conj_classes(
    rank: int, max_std_length: int, cap: int = 4_000_000
) -> list[ConjClass]:
    """All conjugacy classes with cyclically reduced length in 1..max_std_length.

    Deterministic order: by (length, letter order).  Identity is not included.
    """
    out: list[ConjClass] = []
    for rep in iter_class_reps(rank, max_std_length, cap):
        wd = Word.__new__(Word)
        object.__setattr__(wd, "letters", rep)
        out.append(ConjClass(rep=wd))
    return out


# -- weighted generating sets and word metrics -------------------------


def _as_weight(w):
    if isinstance(w, (int, Fraction)):
        if w <= 0:
            raise InputError(f"weights must be positive, got {w}")
        return w
    wf = float(w)
    if not wf > 0:
        raise InputError(f"weights must be positive, got {w}")
    return wf


@dataclass(frozen=True)
class GeneratingSet:
    """A finite weighted generating set of words.

    ``symmetric`` is computed: true iff the set is closed under inversion
    with equal weights.  Weights stay exact (int / Fraction) when given so.
    """

    rank: int
    elements: tuple[Word, ...]
    weights: tuple

    def __init__(self, rank: int, elements: Sequence[Word | str], weights=None):
        elems = tuple(e if isinstance(e, Word) else Word(e) for e in elements)
        if not elems:
            raise InputError("generating set must be nonempty")
        for e in elems:
            if e.max_index() > rank:
                raise InputError(f"element {e} uses letters beyond rank {rank}")
        if weights is None:
            wts = tuple(1 for _ in elems)
        else:
            if len(weights) != len(elems):
                raise InputError("weights length must match elements")
            wts = tuple(_as_weight(w) for w in weights)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def standard(cls, rank: int, weights=None) -> "GeneratingSet":
        """Standard symmetric set {a_i, a_i^-1} with per-generator weights."""
        if weights is None:
            weights = [1] * rank
        if len(weights) != rank:
            raise InputError("need one weight per generator")
        elems, wts = [], []
        for i in range(1, rank + 1):
            elems += [Word((i,)), Word((-i,))]
            wts += [weights[i - 1], weights[i - 1]]
        return cls(rank, elems, wts)

    @property
    def symmetric(self) -> bool:
        table = {e.letters: w for e, w in zip(self.elements, self.weights)}
        return all(
            table.get(e.inverse().letters) == w
            for e, w in zip(self.elements, self.weights)
        )

    @property
    def is_standard(self) -> bool:
        """True iff the set is exactly {a_i^+-1} with inversion-equal weights."""
        need = {(i,) for i in range(1, self.rank + 1)}
        need |= {(-i,) for i in range(1, self.rank + 1)}
        have = {e.letters for e in self.elements}
        return have == need and self.symmetric

    def weight_of(self, i: int):
        """Weight of standard generator i (requires is_standard)."""
        for e, w in zip(self.elements, self.weights):
            if e.letters == (i,):
                return w
        raise InputError(f"generator {i} not in set")

    def __iter__(self):
        return iter(zip(self.elements, self.weights))

    def __len__(self):
        return len(self.elements)


def word_length(g: Word, s: GeneratingSet, radius_cap=32):
    """Length of g in the (possibly asymmetric) weighted word metric of s.

    Uniform-cost search over the free group: expand the identity by right
    multiplication with s-elements until g is settled.  Exact weights give
    exact costs.  Raises SearchExhaustedError when the budget runs out,
    reporting whether the ball closed (certifying unreachability) or the
    radius cap was hit (inconclusive).
    """
    target = g.letters
    if not target:
        return 0
    dist: dict[tuple[int, ...], object] = {(): 0}
    heap: list = [(0, ())]
    while heap:
        d, w = heapq.heappop(heap)
        if dist.get(w, None) != d:
            continue
        if w == target:
            return d
        for e, wt in zip(s.elements, s.weights):
            nd = d + wt
            if nd > radius_cap:
                continue
            nw = free_reduce(w + e.letters)
            old = dist.get(nw)
            if old is None or nd < old:
                dist[nw] = nd
                heapq.heappush(heap, (nd, nw))
    if target in dist:
        return dist[target]
    raise SearchExhaustedError(
        f"{g} not reached within cost {radius_cap} "
        f"(searched {len(dist)} elements; larger radius_cap may help)"
    )


@dataclass(frozen=True)
class GenerationCheck:
    """Result of a semigroup generation check.

    ``ok`` true means every standard generator and inverse was written as a
    product of set elements within the radius; ``witnesses`` maps the letter
    to one such product (as element indices).  When ``ok`` is false,
    ``inconclusive`` distinguishes a genuine exhaustion of the ball (false:
    certified non-generation) from a radius cap (true: unknown).
    """

    ok: bool
    inconclusive: bool
    witnesses: dict
    missing: Optional[int] = None


def check_semigroup_generation(
    s: GeneratingSet, rank: Optional[int] = None, radius_cap=8, node_cap=200_000
) -> GenerationCheck:
    """Check that s generates the free group as a semigroup (within a radius).

    The search stops at radius_cap cost or node_cap settled states,
    whichever comes first; either cap makes a negative answer inconclusive
    rather than certified.  Without the node cap a non-generating set would
    force exploration of the entire cost ball, which is exponential.
    """
    rank = s.rank if rank is None else rank
    targets = {(i,) for i in range(1, rank + 1)} | {(-i,) for i in range(1, rank + 1)}
    paths: dict[tuple[int, ...], tuple] = {(): ()}
    dist: dict[tuple[int, ...], object] = {(): 0}
    heap: list = [(0, ())]
    capped = False
    found: dict[int, tuple] = {}
    while heap and len(found) < len(targets):
        d, w = heapq.heappop(heap)
        if dist.get(w) != d:
            continue
        if w in targets and w[0] not in found:
            found[w[0]] = paths[w]
        if len(dist) > node_cap:
            capped = True
            break
        for idx, (e, wt) in enumerate(zip(s.elements, s.weights)):
            nd = d + wt
            if nd > radius_cap:
                capped = True
                continue
            nw = free_reduce(w + e.letters)
            old = dist.get(nw)
            if old is None or nd < old:
                dist[nw] = nd
                paths[nw] = paths[w] + (idx,)
                heapq.heappush(heap, (nd, nw))
    witnesses = {x: list(p) for x, p in found.items()}
    if len(found) == len(targets):
        return GenerationCheck(ok=True, inconclusive=False, witnesses=witnesses)
    missing = min(
        (x for x in _letters_in_order(rank) if x not in found), key=letter_key
    )
    return GenerationCheck(
        ok=False, inconclusive=capped, witnesses=witnesses, missing=missing
    )
