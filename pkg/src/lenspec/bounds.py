"""Windowed dilation computation and executable checks for length-spectrum
comparison inequalities.

The dilation Dil(X*, X) = sup over nontrivial conjugacy classes of
l_X*[g] / l_X[g] is approximated from below by window sups

    sup over 0 < l_X[g] <= L of the ratio bracket,

with enumeration depth chosen so that every class in the window is seen
(each model provides a comparison radius; when it exceeds the configured
cap, the window is flagged truncated and verdicts degrade accordingly).

Verdict policy, uniformly: a bound "holds" when the reference bracket's hi
sits below the bound, is "violated" only when the reference lo certifiedly
exceeds the bound AND the bound-side window had full coverage (otherwise
the computed bound may understate the true right-hand side), and is
"inconclusive" in between.  Violations are therefore certified events.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .actions import LengthBracket, exact_div
from .errors import InputError
from .jsl import BochiConstants, joint_stable_profile
from .spaces import MobiusModel, TreeModel, WordMetricModel
from .words import ConjClass, GeneratingSet, Word, enumerate_ball, iter_class_reps

__all__ = [
    "HOLDS",
    "VIOLATED",
    "INCONCLUSIVE",
    "HYPOTHESIS_FAILED",
    "VerifierConfig",
    "WindowRow",
    "WindowSup",
    "ClassTable",
    "dilation_window",
    "window_comparison_bound",
    "cobounded_dilation_report",
    "word_metric_dilation_report",
    "spectral_dilation_report",
    "ratio_envelope_report",
    "joint_vs_dilation_report",
    "displacement_ball",
    "displacement_sandwich_report",
    "SandwichReport",
    "pointwise_cover_report",
    "CoverReport",
    "metric_distance_report",
    "DeltaReport",
    "DilationReport",
]

HOLDS = "holds"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
HYPOTHESIS_FAILED = "hypothesis-failed"

_ZERO_EPS = 1e-9


@dataclass(frozen=True)
class VerifierConfig:
    """Shared knobs for the verifiers; all radii and caps live here."""

    K: float = 1e4
    delta: Optional[float] = None
    D: object = None
    L_values: tuple = (8,)
    c_delta: float = 4.0
    tolerance: float = 1e-9
    radius_cap: int = 12
    class_cap: int = 4_000_000
    k_max: int = 8
    window_k_max: int = 2
    reference_factor: int = 2
    n_max: int = 8
    frontier_cap: int = 1_000_000
    diagnostics_cap: int = 16

    def __post_init__(self):
        if self.K < 0 or self.tolerance < 0 or self.c_delta < 0:
            raise InputError("K, tolerance and c_delta must be nonnegative")
        if self.delta is not None and self.delta < 0:
            raise InputError("delta must be nonnegative")
        if not self.L_values or any(L <= 0 for L in self.L_values):
            raise InputError("L_values must be a nonempty tuple of positive lengths")
        if self.reference_factor < 1:
            raise InputError("reference_factor must be >= 1")
        if self.radius_cap < 1:
            raise InputError("radius_cap must be >= 1")

    def with_L(self, L_values) -> "VerifierConfig":
        return replace(self, L_values=tuple(L_values))


@dataclass(frozen=True)
class WindowRow:
    rep: Word
    ref_length: LengthBracket
    target_length: LengthBracket
    ratio: LengthBracket
    straddles: bool


@dataclass(frozen=True)
class WindowSup:
    """Sup of length ratios over a window of the reference spectrum."""

    value: LengthBracket
    L: object
    count: int
    excluded: int
    straddled: int
    radius: int
    radius_needed: object
    truncated: bool
    attained: Optional[Word]
    empty: bool
    rows: tuple = ()


def _word_of(letters) -> Word:
    w = Word.__new__(Word)
    object.__setattr__(w, "letters", tuple(letters))
    return w


def _class_of(letters) -> ConjClass:
    return ConjClass(rep=_word_of(letters))


def _eval_class_lengths(model, reps, k_max):
    """Per-class stable-length lo/hi lists for a model over canonical reps."""
    cl = getattr(model, "class_length", None)
    if cl is not None:
        vals = [cl(r) for r in reps]
        return vals, vals
    br = getattr(model, "class_length_bracket", None)
    if br is not None:
        lows, highs = [], []
        for r in reps:
            lo, hi = br(r, k_max)
            lows.append(lo)
            highs.append(hi)
        return lows, highs
    lows, highs = [], []
    for r in reps:
        b = model.stable_length(_class_of(r), k_max=k_max)
        lows.append(b.lo)
        highs.append(b.hi)
    return lows, highs


class ClassTable:
    """Canonical classes with length brackets under two models at once."""

    def __init__(self, target, ref, radius: int, *,
                 class_cap: int = 4_000_000, window_k_max: int = 2):
        if target.rank != ref.rank:
            raise InputError(
                f"rank mismatch: target {target.rank}, reference {ref.rank}"
            )
        self.rank = target.rank
        self.radius = int(radius)
        self.reps = iter_class_reps(self.rank, self.radius, class_cap)
        self.ref_lo, self.ref_hi = _eval_class_lengths(ref, self.reps, window_k_max)
        self.tgt_lo, self.tgt_hi = _eval_class_lengths(target, self.reps, window_k_max)

    def __len__(self):
        return len(self.reps)


def _needed_radius(ref, L) -> object:
    r = ref.window_radius(L)
    return r


def _window_sup(table: ClassTable, L, radius_needed, *, swap: bool = False,
                diag_cap: int = 16) -> WindowSup:
    if swap:
        ref_lo, ref_hi = table.tgt_lo, table.tgt_hi
        tgt_lo, tgt_hi = table.ref_lo, table.ref_hi
    else:
        ref_lo, ref_hi = table.ref_lo, table.ref_hi
        tgt_lo, tgt_hi = table.tgt_lo, table.tgt_hi
    reps = table.reps
    sup_lo = None
    sup_hi = None
    att_idx = -1
    count = excluded = straddled = 0
    top: list = []
    for i in range(len(reps)):
        rlo = ref_lo[i]
        if rlo > L:
            continue
        if rlo <= _ZERO_EPS:
            excluded += 1
            continue
        rhi = ref_hi[i]
        straddle = rhi > L
        count += 1
        if straddle:
            straddled += 1
        r_lo = exact_div(tgt_lo[i], rhi)
        r_hi = exact_div(tgt_hi[i], rlo)
        if not straddle and (sup_lo is None or r_lo > sup_lo):
            sup_lo = r_lo
        if sup_hi is None or r_hi > sup_hi:
            sup_hi = r_hi
            att_idx = i
        if diag_cap > 0:
            item = (r_hi, i, r_lo, straddle)
            if len(top) < diag_cap:
                heapq.heappush(top, item)
            elif item > top[0]:
                heapq.heapreplace(top, item)
    truncated = bool(radius_needed > table.radius)
    if count == 0:
        return WindowSup(
            value=LengthBracket(0, 0, exact=True),
            L=L, count=0, excluded=excluded, straddled=0,
            radius=table.radius, radius_needed=radius_needed,
            truncated=truncated, attained=None, empty=True,
        )
    if sup_lo is None:
        sup_lo = 0
    sup_lo = min(sup_lo, sup_hi)
    rows = []
    for r_hi, i, r_lo, straddle in sorted(top, reverse=True):
        rows.append(WindowRow(
            rep=_word_of(reps[i]),
            ref_length=LengthBracket(ref_lo[i], ref_hi[i],
                                     exact=bool(ref_lo[i] == ref_hi[i])),
            target_length=LengthBracket(tgt_lo[i], tgt_hi[i],
                                        exact=bool(tgt_lo[i] == tgt_hi[i])),
            ratio=LengthBracket(r_lo, r_hi, exact=bool(r_lo == r_hi)),
            straddles=straddle,
        ))
    return WindowSup(
        value=LengthBracket(sup_lo, sup_hi, exact=bool(sup_lo == sup_hi)),
        L=L, count=count, excluded=excluded, straddled=straddled,
        radius=table.radius, radius_needed=radius_needed,
        truncated=truncated, attained=_word_of(reps[att_idx]), empty=False,
        rows=tuple(rows),
    )


def dilation_window(target, ref, L, classes: Optional[ClassTable] = None,
                    config: Optional[VerifierConfig] = None) -> WindowSup:
    """Sup of l_target/l_ref ratio brackets over classes with 0 < l_ref <= L.

    Classes whose reference bracket straddles L are included (conservative
    for the hi side, excluded from the lo side); classes whose reference
    length cannot be certified positive are excluded and counted.
    """
    cfg = config or VerifierConfig()
    needed = _needed_radius(ref, L)
    if classes is None:
        radius = int(min(needed, cfg.radius_cap))
        classes = ClassTable(target, ref, radius, class_cap=cfg.class_cap,
                             window_k_max=cfg.window_k_max)
    return _window_sup(classes, L, needed, diag_cap=cfg.diagnostics_cap)


# ----------------------------------------------------------------- verdicts


@dataclass
class DilationReport:
    """One verifier outcome: window sup, bound, reference, verdict."""

    name: str
    window_L: object
    window_sup: LengthBracket
    bound_value: object
    reference_dilation: LengthBracket
    verdict: str
    diagnostics: list
    coverage: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


def _verdict(reference: LengthBracket, bound, tol: float,
             refutation_certified: bool) -> str:
    if reference.hi <= bound + tol:
        return HOLDS
    if refutation_certified and reference.lo > bound + tol:
        return VIOLATED
    return INCONCLUSIVE


def _coverage(ws: WindowSup) -> dict:
    return {
        "L": ws.L,
        "classes": ws.count,
        "excluded": ws.excluded,
        "straddled": ws.straddled,
        "radius": ws.radius,
        "radius_needed": ws.radius_needed,
        "truncated": ws.truncated,
        "empty": ws.empty,
    }


def _build_table(target, ref, radii, cfg: VerifierConfig) -> ClassTable:
    finite = [r for r in radii if r != math.inf]
    radius = int(min(max(finite, default=cfg.radius_cap), cfg.radius_cap))
    return ClassTable(target, ref, radius, class_cap=cfg.class_cap,
                      window_k_max=cfg.window_k_max)


# ------------------------------------------------- cobounded comparison


def window_comparison_bound(window_sup_hi, L, D, delta, K,
                            variant: str = "tight"):
    """Right-hand side of the cobounded comparison bound.

    variant 'tight': sup * (L-2D)/(L-6D) + 2*K*delta/(L-6D).
    variant 'plain-log4': sup * L/(L-6D) + 2*K*log(4)/(L-6D), the form for
    actions on convex cores where log 4 replaces the measured delta.
    Requires L > 6D.
    """
    if not L > 6 * D:
        raise InputError(f"need L > 6D; got L={L}, 6D={6 * D}")
    den = L - 6 * D
    if variant == "tight":
        coef = exact_div(L - 2 * D, den)
        pen = 2 * K * delta
    elif variant == "plain-log4":
        coef = exact_div(L, den)
        pen = 2 * K * math.log(4)
    else:
        raise InputError(f"unknown variant {variant!r}")
    bound = window_sup_hi * coef
    if pen:
        bound = bound + exact_div(pen, den)
    return bound


def _minimal_K(ref_hi, sup_term, den, delta):
    if delta == 0:
        return 0 if ref_hi <= sup_term else math.inf
    return max(0.0, float(ref_hi - sup_term) * float(den) / (2.0 * float(delta)))


def cobounded_dilation_report(target, ref, config: Optional[VerifierConfig] = None,
                              variant: str = "tight") -> list[DilationReport]:
    """Window-sup comparison bound for a pair of cobounded actions.

    For each L: Dil(target, ref) <= window_sup(L) * coefficient + penalty,
    compared against a reference dilation estimated on a window
    reference_factor * L.  The minimal K making the bound hold on this
    instance is reported as a diagnostic.
    """
    cfg = config or VerifierConfig()
    D = cfg.D if cfg.D is not None else ref.cobound_D
    if D is None or D <= 0:
        raise InputError("reference model declares no positive coboundedness "
                         "constant; pass D in the config")
    delta = cfg.delta
    if delta is None:
        delta = max(target.delta, ref.delta)
    radii = []
    for L in cfg.L_values:
        if not L > 6 * D:
            raise InputError(f"need L > 6D for every window; L={L}, 6D={6 * D}")
        radii.append(_needed_radius(ref, L))
        radii.append(_needed_radius(ref, cfg.reference_factor * L))
    table = _build_table(target, ref, radii, cfg)
    out = []
    for L in cfg.L_values:
        ws = _window_sup(table, L, _needed_radius(ref, L),
                         diag_cap=cfg.diagnostics_cap)
        ref_ws = _window_sup(table, cfg.reference_factor * L,
                             _needed_radius(ref, cfg.reference_factor * L),
                             diag_cap=cfg.diagnostics_cap)
        bound = window_comparison_bound(ws.value.hi, L, D, delta, cfg.K, variant)
        den = L - 6 * D
        sup_term = ws.value.hi * (exact_div(L - 2 * D, den) if variant == "tight"
                                  else exact_div(L, den))
        pen_delta = delta if variant == "tight" else math.log(4)
        verdict = _verdict(ref_ws.value, bound, cfg.tolerance,
                           refutation_certified=not ws.truncated)
        out.append(DilationReport(
            name=f"cobounded-window[{variant}]",
            window_L=L,
            window_sup=ws.value,
            bound_value=bound,
            reference_dilation=ref_ws.value,
            verdict=verdict,
            diagnostics=list(ws.rows),
            coverage={"window": _coverage(ws), "reference": _coverage(ref_ws)},
            extras={
                "D": D,
                "delta": delta,
                "K": cfg.K,
                "variant": variant,
                "attained": str(ws.attained) if ws.attained else None,
                "minimal_K": _minimal_K(ref_ws.value.hi, sup_term, den, pen_delta),
            },
        ))
    return out


# --------------------------------------------- semigroup word-metric bound


def word_metric_dilation_report(target, gens, config: Optional[VerifierConfig] = None
                                ) -> list[DilationReport]:
    """Dilation of target against a word metric: K*delta/L + window sup at 2L.

    `gens` may be a GeneratingSet or a prebuilt WordMetricModel; the set must
    generate the group as a semigroup (validated by the model).  delta is the
    target's hyperbolicity constant unless overridden.
    """
    cfg = config or VerifierConfig()
    ref = gens if isinstance(gens, WordMetricModel) else WordMetricModel(gens)
    delta = cfg.delta if cfg.delta is not None else target.delta
    radii = []
    for L in cfg.L_values:
        if L < 1 or int(L) != L:
            raise InputError(f"window lengths must be integers >= 1, got {L}")
        radii.append(_needed_radius(ref, 2 * L))
        radii.append(_needed_radius(ref, 2 * cfg.reference_factor * L))
    table = _build_table(target, ref, radii, cfg)
    out = []
    for L in cfg.L_values:
        ws = _window_sup(table, 2 * L, _needed_radius(ref, 2 * L),
                         diag_cap=cfg.diagnostics_cap)
        ref_ws = _window_sup(table, 2 * cfg.reference_factor * L,
                             _needed_radius(ref, 2 * cfg.reference_factor * L),
                             diag_cap=cfg.diagnostics_cap)
        pen = cfg.K * delta
        bound = ws.value.hi if pen == 0 else exact_div(pen, L) + ws.value.hi
        verdict = _verdict(ref_ws.value, bound, cfg.tolerance,
                           refutation_certified=not ws.truncated)
        out.append(DilationReport(
            name="word-metric-window",
            window_L=L,
            window_sup=ws.value,
            bound_value=bound,
            reference_dilation=ref_ws.value,
            verdict=verdict,
            diagnostics=list(ws.rows),
            coverage={"window": _coverage(ws), "reference": _coverage(ref_ws)},
            extras={
                "delta": delta,
                "K": cfg.K,
                "window": 2 * L,
                "attained": str(ws.attained) if ws.attained else None,
            },
        ))
    return out


# ---------------------------------------------------- spectral-radius bound


def spectral_dilation_report(rho, tau, config: Optional[VerifierConfig] = None,
                             alpha: float = 0.0,
                             constants: Optional[BochiConstants] = None,
                             cert_radius: int = 6) -> list[DilationReport]:
    """Dilation of log-spectral-radius lengths of rho against those of tau.

    eta is the window sup of log lambda_1(rho(g)) / log lambda_1(tau(g)) over
    0 < l_tau <= L; the bound is c_m*d_m/(L - d_m(a+1)) + eta*L/(L - d_m(a+1)).
    Requires L > d_m(alpha+1) and a passing gap certificate for rho.
    """
    cfg = config or VerifierConfig()
    cert = rho.certificate(cert_radius)
    if not cert.ok:
        raise InputError(
            "singular gap certificate failed for the dominated representation "
            f"(mu={cert.mu:.6g} at radius {cert.radius}); cannot certify windows"
        )
    consts = constants or BochiConstants.for_dim(rho.dim)
    slack = consts.d_m * (alpha + 1)
    radii = []
    for L in cfg.L_values:
        if not L > slack:
            raise InputError(f"need L > d_m(alpha+1) = {slack}; got L={L}")
        radii.append(_needed_radius(tau, L))
        radii.append(_needed_radius(tau, cfg.reference_factor * L))
    table = _build_table(rho, tau, radii, cfg)
    out = []
    for L in cfg.L_values:
        ws = _window_sup(table, L, _needed_radius(tau, L),
                         diag_cap=cfg.diagnostics_cap)
        ref_ws = _window_sup(table, cfg.reference_factor * L,
                             _needed_radius(tau, cfg.reference_factor * L),
                             diag_cap=cfg.diagnostics_cap)
        den = L - slack
        bound = consts.c_m * consts.d_m / den + float(ws.value.hi) * L / den
        verdict = _verdict(ref_ws.value, bound, cfg.tolerance,
                           refutation_certified=not ws.truncated)
        out.append(DilationReport(
            name="spectral-window",
            window_L=L,
            window_sup=ws.value,
            bound_value=bound,
            reference_dilation=ref_ws.value,
            verdict=verdict,
            diagnostics=list(ws.rows),
            coverage={"window": _coverage(ws), "reference": _coverage(ref_ws)},
            extras={
                "c_m": consts.c_m,
                "d_m": consts.d_m,
                "alpha": alpha,
                "eta": ws.value.hi,
                "certificate_mu": cert.mu,
                "attained": str(ws.attained) if ws.attained else None,
            },
        ))
    return out


# ------------------------------------------------------- ratio envelope


def ratio_envelope_report(target, ref, alpha_lo, beta_hi,
                          config: Optional[VerifierConfig] = None,
                          C0=None) -> list[DilationReport]:
    """Two-sided envelope check: if ratios lie in [alpha, beta] on the window,
    the conclusion pins all ratios inside the C0/L-inflated envelope.

    With C0 given, the conclusion is checked classwise on the reference
    window (a single certified escapee refutes).  Without C0, the minimal
    C0 making both conclusion inequalities hold there is measured.
    """
    cfg = config or VerifierConfig()
    if alpha_lo < 0 or beta_hi < alpha_lo:
        raise InputError("need 0 <= alpha <= beta")
    radii = []
    for L in cfg.L_values:
        radii.append(_needed_radius(ref, L))
        radii.append(_needed_radius(ref, cfg.reference_factor * L))
    table = _build_table(target, ref, radii, cfg)
    out = []
    tol = cfg.tolerance
    for L in cfg.L_values:
        ws = _window_sup(table, L, _needed_radius(ref, L),
                         diag_cap=cfg.diagnostics_cap)
        ref_ws = _window_sup(table, cfg.reference_factor * L,
                             _needed_radius(ref, cfg.reference_factor * L),
                             diag_cap=0)
        hyp_failed = False
        hyp_uncertified = ws.truncated
        need_c0 = 0
        cert_c0 = 0
        worst = None
        refL = cfg.reference_factor * L
        for i in range(len(table.reps)):
            rlo = table.ref_lo[i]
            if rlo <= _ZERO_EPS or rlo > refL:
                continue
            rhi = table.ref_hi[i]
            r_lo = exact_div(table.tgt_lo[i], rhi)
            r_hi = exact_div(table.tgt_hi[i], rlo)
            if rlo <= L:
                # hypothesis scope
                if r_hi < alpha_lo - tol or r_lo > beta_hi + tol:
                    hyp_failed = True
                if r_lo < alpha_lo - tol or r_hi > beta_hi + tol:
                    hyp_uncertified = True
            # measurement: outer bracket, can only overstate the needed C0
            c_lo = (alpha_lo - r_lo) * exact_div(L, alpha_lo + 1)
            c_hi = (r_hi - beta_hi) * exact_div(L, beta_hi + 1)
            c = max(c_lo, c_hi)
            if c > need_c0:
                need_c0 = c
                worst = table.reps[i]
            # refutation: inner bracket, the true ratio escapes for sure
            c_cert = max(
                (alpha_lo - r_hi) * exact_div(L, alpha_lo + 1),
                (r_lo - beta_hi) * exact_div(L, beta_hi + 1),
            )
            if c_cert > cert_c0:
                cert_c0 = c_cert
        need_c0 = max(need_c0, 0)
        if hyp_failed:
            verdict = HYPOTHESIS_FAILED
            bound = None
        elif C0 is None:
            verdict = HOLDS if not hyp_uncertified else INCONCLUSIVE
            bound = None
        else:
            bound = C0
            if need_c0 <= C0 + tol:
                verdict = HOLDS if not hyp_uncertified else INCONCLUSIVE
            elif cert_c0 > C0 + tol:
                # a single certified escapee refutes, whatever the coverage
                verdict = VIOLATED
            else:
                verdict = INCONCLUSIVE
        out.append(DilationReport(
            name="ratio-envelope",
            window_L=L,
            window_sup=ws.value,
            bound_value=bound,
            reference_dilation=ref_ws.value,
            verdict=verdict,
            diagnostics=list(ws.rows),
            coverage={"window": _coverage(ws), "reference": _coverage(ref_ws)},
            extras={
                "alpha": alpha_lo,
                "beta": beta_hi,
                "C0": C0,
                "minimal_C0": need_c0,
                "worst_class": str(_word_of(worst)) if worst else None,
                "hypothesis": ("failed" if hyp_failed else
                               "inconclusive" if hyp_uncertified else "verified"),
            },
        ))
    return out


# ------------------------------------------- dilation vs joint stable length


def joint_vs_dilation_report(model, s, config: Optional[VerifierConfig] = None,
                             window_L=None) -> DilationReport:
    """Windowed Dil(model, word metric of S) against the joint stable length.

    The two agree for isometric actions on hyperbolic spaces; the check
    certifies Dil <= joint on the window and reports the equality gap.
    """
    from .jsl import _as_words

    cfg = config or VerifierConfig()
    if isinstance(s, GeneratingSet):
        words = list(s.elements)
        gens = s
    else:
        words = _as_words(s)
        gens = GeneratingSet(rank=model.rank, elements=tuple(words))
    ref = WordMetricModel(gens)
    L = window_L if window_L is not None else max(cfg.L_values)
    needed = _needed_radius(ref, L)
    table = _build_table(model, ref, [needed], cfg)
    ws = _window_sup(table, L, needed, diag_cap=cfg.diagnostics_cap)
    profile = joint_stable_profile(model, words, cfg.n_max,
                                   frontier_cap=cfg.frontier_cap)
    joint = profile.bracket
    tol = cfg.tolerance
    if ws.value.lo > joint.hi + tol and not ws.truncated:
        verdict = VIOLATED
    elif ws.value.hi <= joint.lo + tol:
        verdict = HOLDS
    else:
        verdict = INCONCLUSIVE
    return DilationReport(
        name="joint-vs-dilation",
        window_L=L,
        window_sup=ws.value,
        bound_value=joint.hi,
        reference_dilation=ws.value,
        verdict=verdict,
        diagnostics=list(ws.rows),
        coverage={"window": _coverage(ws)},
        extras={
            "joint_lo": joint.lo,
            "joint_hi": joint.hi,
            "joint_engine": profile.engine,
            "exact_equal": bool(joint.exact and ws.value.exact
                                and joint.lo == ws.value.lo),
            "n_max": cfg.n_max,
        },
    )


# ------------------------------------------------- displacement sandwiches


def displacement_ball(model, bound, config: Optional[VerifierConfig] = None
                      ) -> GeneratingSet:
    """All nontrivial g with displacement <= bound, as a generating set."""
    cfg = config or VerifierConfig()
    if isinstance(model, TreeModel):
        unit_radius = int(exact_div(bound, min(model.weights)))
    else:
        cert = model.certificate()
        if cert.mu <= 0:
            raise InputError("cannot bound the displacement ball: no gap certificate")
        unit_radius = math.ceil((2 * float(bound) - 2 * cert.log_C) / cert.mu)
        unit_radius = min(unit_radius, cfg.radius_cap)
    if unit_radius < 1:
        raise InputError(f"displacement bound {bound} admits no generator")
    elems = []
    for w in enumerate_ball(model.rank, unit_radius, cap=cfg.class_cap):
        if not w.letters:
            continue
        if model.displacement(w) <= bound:
            elems.append(w)
    if not elems:
        raise InputError(f"displacement bound {bound} admits no generator")
    return GeneratingSet(rank=model.rank, elements=tuple(elems))


def _greedy_chunks(letters, weight_of, bound) -> int:
    """Minimal number of weight-<=bound pieces covering a reduced word.

    On a tree this equals the word length with respect to the displacement
    ball: each piece is a subword (so a group element of displacement equal
    to its weight), and no factorization can move farther per factor.
    """
    k = 0
    acc = 0
    for x in letters:
        w = weight_of(x)
        if w > bound:
            raise InputError("a single letter exceeds the displacement bound")
        if acc + w > bound:
            k += 1
            acc = w
        else:
            acc += w
    if acc > 0:
        k += 1
    return k


@dataclass
class SandwichReport:
    """Word-length sandwich of displacements against a displacement ball."""

    case: str
    n: int
    scale: object
    bound: object
    s_n: GeneratingSet
    checked: int
    violations: list
    verdict: str
    truncated: bool
    extras: dict = field(default_factory=dict)


def displacement_sandwich_report(model, n: int, ball_radius: int,
                                 config: Optional[VerifierConfig] = None,
                                 case: str = "auto") -> SandwichReport:
    """Check the two-sided control of displacement by S_n word length.

    Cobounded case (trees): S_n = {d(x,gx) <= (n+2)D} and
    n*D*|g| - n*D <= d(x,gx) <= (n+2)*D*|g| for every g, in exact arithmetic.
    Rough-geodesic case: S_n = {psi <= n}, needs n > alpha+1, and
    (n-alpha-1)*|g| - (n-1) <= psi(x,gx) <= n*|g|.
    """
    cfg = config or VerifierConfig()
    if case == "auto":
        case = "cobounded" if model.cobound_D is not None else "rough"
    if n < 1:
        raise InputError("n must be >= 1")
    violations = []
    if case == "cobounded":
        D = model.cobound_D
        if D is None or D <= 0:
            raise InputError("model declares no coboundedness constant")
        if not isinstance(model, TreeModel):
            raise InputError("exact sandwich checking needs a tree model")
        B = (n + 2) * D
        s_n = displacement_ball(model, B, cfg)
        checked = 0
        for g in enumerate_ball(model.rank, ball_radius, cap=cfg.class_cap):
            k = _greedy_chunks(g.letters, model.weight_of, B)
            d = model.displacement(g)
            lo = n * D * k - n * D
            hi = (n + 2) * D * k
            if not (lo <= d <= hi):
                violations.append((str(g), k, d))
            checked += 1
        verdict = HOLDS if not violations else VIOLATED
        return SandwichReport(
            case=case, n=n, scale=D, bound=B, s_n=s_n, checked=checked,
            violations=violations, verdict=verdict, truncated=False,
            extras={"s_n_size": len(s_n.elements)},
        )
    alpha = model.alpha
    if alpha is None:
        raise InputError("rough-geodesic case needs a declared alpha")
    if not n > alpha + 1:
        raise InputError(f"need n > alpha+1 = {alpha + 1}, got {n}")
    s_n = displacement_ball(model, n, cfg)
    truncated = not isinstance(model, TreeModel)
    # breadth-first word lengths over S_n, exact while the frontier fits
    targets = {g.letters: None for g in
               enumerate_ball(model.rank, ball_radius, cap=cfg.class_cap)}
    dist = {(): 0}
    frontier = [()]
    pending = sum(1 for t in targets if t != ())
    depth = 0
    gen_letters = [e.letters for e in s_n.elements]
    capped = False
    while pending > 0 and frontier:
        depth += 1
        nxt = []
        for w in frontier:
            for s in gen_letters:
                i = len(w)
                j = 0
                while i > 0 and j < len(s) and w[i - 1] == -s[j]:
                    i -= 1
                    j += 1
                prod = w[:i] + s[j:]
                if prod in dist:
                    continue
                dist[prod] = depth
                nxt.append(prod)
                if prod in targets:
                    pending -= 1
        if len(dist) > cfg.frontier_cap:
            capped = True
            break
        frontier = nxt
    checked = 0
    tol = cfg.tolerance
    for t in targets:
        if t == ():
            continue
        k = dist.get(t)
        if k is None:
            continue
        d = model.displacement(_word_of(t))
        lo = (n - alpha - 1) * k - (n - 1)
        hi = n * k
        if not (lo - tol <= d <= hi + tol):
            violations.append((str(_word_of(t)), k, d))
        checked += 1
    verdict = VIOLATED if violations and not truncated else (
        HOLDS if not violations and not capped else INCONCLUSIVE)
    return SandwichReport(
        case=case, n=n, scale=alpha, bound=n, s_n=s_n, checked=checked,
        violations=violations, verdict=verdict,
        truncated=truncated or capped,
        extras={"s_n_size": len(s_n.elements), "bfs_capped": capped},
    )


# ---------------------------------------------------- pointwise length cover


@dataclass
class CoverReport:
    """A finite set F and constant C with d(x,gx) <= max_f l[gf] + C on a ball."""

    F: list
    C: object
    checked: int
    ball_radius: int
    f_radius: int
    verdict: str
    extras: dict = field(default_factory=dict)


def pointwise_cover_report(model, ball_radius: int, f_radius: int,
                           config: Optional[VerifierConfig] = None,
                           max_f: int = 12) -> CoverReport:
    """Greedy search for translates whose class lengths dominate displacement.

    Starts from F = {identity} and adds the candidate (word of length <=
    f_radius) that most reduces C = max over the ball of
    d(x,gx) - max_f l[gf], until no strict improvement remains.
    Needs a model with exact class lengths.
    """
    cfg = config or VerifierConfig()
    if model.exactness not in ("tree-exact", "eigenvalue-exact"):
        raise InputError("cover search needs exact class lengths")
    ball = enumerate_ball(model.rank, ball_radius, cap=cfg.class_cap)
    pool = enumerate_ball(model.rank, f_radius, cap=cfg.class_cap)
    disp = [model.displacement(g) for g in ball]

    if isinstance(model, TreeModel):
        def col(f: Word):
            out = []
            for g in ball:
                prod = (g * f).letters
                i, j = 0, len(prod) - 1
                while i < j and prod[i] == -prod[j]:
                    i += 1
                    j -= 1
                out.append(sum(model.weight_of(x) for x in prod[i:j + 1]))
            return out
    else:
        mats = [model.matrix(g) for g in ball]
        double = 2.0 if isinstance(model, MobiusModel) else 1.0

        def col(f: Word):
            mf = model.matrix(f)
            out = []
            for m in mats:
                lam = model.spectral_radius(m @ mf)
                out.append(double * math.log(lam) if lam > 1.0 else 0.0)
            return out

    cols = {}

    def c_of(best_vals):
        worst = None
        for i in range(len(ball)):
            gap = disp[i] - best_vals[i]
            if worst is None or gap > worst:
                worst = gap
        return max(worst, 0)

    F = [Word()]
    best_vals = col(Word())
    C = c_of(best_vals)
    while len(F) < max_f and C > 0:
        best_c, best_f, best_col = None, None, None
        for f in pool:
            if f in F:
                continue
            if f.letters not in cols:
                cols[f.letters] = col(f)
            trial = [max(a, b) for a, b in zip(best_vals, cols[f.letters])]
            c_new = c_of(trial)
            if best_c is None or c_new < best_c:
                best_c, best_f, best_col = c_new, f, trial
        if best_c is None or not best_c < C:
            break
        F.append(best_f)
        best_vals = best_col
        C = best_c
    return CoverReport(
        F=F, C=C, checked=len(ball), ball_radius=ball_radius,
        f_radius=f_radius, verdict=HOLDS,
        extras={"pool": len(pool), "F_size": len(F)},
    )


# -------------------------------------------------------- metric distance


@dataclass
class DeltaReport:
    """Symmetrized log-dilation distance between two length spectra."""

    delta: LengthBracket
    dil_ab: LengthBracket
    dil_ba: LengthBracket
    window_L: object
    verdict: str
    coverage: dict = field(default_factory=dict)


def metric_distance_report(a, b, config: Optional[VerifierConfig] = None
                           ) -> DeltaReport:
    """log(Dil(a,b) * Dil(b,a)) from windowed dilations in both directions."""
    cfg = config or VerifierConfig()
    L = max(cfg.L_values)
    needed = max(_needed_radius(b, L), _needed_radius(a, L))
    table = _build_table(a, b, [needed], cfg)
    ws_ab = _window_sup(table, L, _needed_radius(b, L),
                        diag_cap=cfg.diagnostics_cap)
    ws_ba = _window_sup(table, L, _needed_radius(a, L),
                        diag_cap=cfg.diagnostics_cap, swap=True)
    if ws_ab.empty or ws_ba.empty or ws_ab.value.lo <= 0 or ws_ba.value.lo <= 0:
        return DeltaReport(
            delta=LengthBracket(0.0, math.inf), dil_ab=ws_ab.value,
            dil_ba=ws_ba.value, window_L=L, verdict=INCONCLUSIVE,
            coverage={"ab": _coverage(ws_ab), "ba": _coverage(ws_ba)},
        )
    lo = math.log(float(ws_ab.value.lo * ws_ba.value.lo))
    hi = math.log(float(ws_ab.value.hi * ws_ba.value.hi))
    exact = ws_ab.value.exact and ws_ba.value.exact
    return DeltaReport(
        delta=LengthBracket(lo, hi, exact=bool(exact and lo == hi)),
        dil_ab=ws_ab.value,
        dil_ba=ws_ba.value,
        window_L=L,
        verdict=HOLDS,
        coverage={"ab": _coverage(ws_ab), "ba": _coverage(ws_ba)},
    )
