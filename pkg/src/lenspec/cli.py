"""Scenario files, batch verification runs, and report emission.

A scenario is a JSON object; parsing fills every default so that
``parse(emit(s)) == s`` byte-for-byte.  Top-level keys:

    name       run label (default "scenario")
    rank       free group rank (default 2)
    seed       RNG seed for matrix ensembles (default 0)
    target     model spec for X* (the compared metric), or null
    reference  model spec for X (the window metric), or null
    subset     list of words (strings) for joint-length checks, or null
    matrices   explicit matrix list for spectral checks, or null
    ensemble   {"count", "dim", "scale"} seeded random matrix pairs, or null
    verify     list of check tokens to run, in order
    config     VerifierConfig fields (K, delta, L_values, radius_cap, ...)
    params     per-check knobs (band, C0, alpha, n, ball_radius, f_radius,
               max_f, cert_radius, radius)

Model specs: {"kind": "tree", "weights": [...]},
{"kind": "word-metric", "elements": [...], "weights": [...]},
{"kind": "mobius"|"linear", "matrices": [[[a,b],[c,d]], ...], "delta": ...},
{"kind": "schottky", "stretch": l, "angles": [...], "use": "mobius"|"linear"},
{"kind": "preset", "name": "cor17-default"} (expands at parse time).

Exit codes: 0 clean, 1 certified violation, 2 input error, 3 resource cap.
Report files never contain wall-clock data, so equal seeds give
byte-identical reports.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .actions import LengthBracket, stable_length_bracket
from .bounds import (
    ClassTable,
    VerifierConfig,
    WindowRow,
    _needed_radius,
    _window_sup,
    cobounded_dilation_report,
    displacement_sandwich_report,
    joint_vs_dilation_report,
    metric_distance_report,
    pointwise_cover_report,
    ratio_envelope_report,
    spectral_dilation_report,
    word_metric_dilation_report,
)
from .errors import InputError, NumericError, ResourceCapError
from .jsl import BochiConstants, bf_lower_check, bochi_rhs, jsr_profile
from .spaces import (
    LinearRepModel,
    MatrixActionModel,
    MobiusModel,
    TreeModel,
    WordMetricModel,
    build_schottky,
)
from .words import GeneratingSet, Word, iter_class_reps

try:
    from importlib.metadata import version as _pkg_version

    _VERSION = _pkg_version("lenspec")
except Exception:  # pragma: no cover - not installed
    _VERSION = "0.1.0"

__all__ = [
    "Scenario",
    "RunReport",
    "parse_scenario",
    "emit_scenario",
    "load_scenario",
    "builtin_preset",
    "run",
    "emit",
    "main",
]

VERIFY_TOKENS = (
    "thm13", "thm15", "cor14", "cor17", "anosov",
    "bf", "bochi", "prop31", "lemma25", "lemma32",
)

MODEL_KINDS = ("tree", "word-metric", "mobius", "linear", "schottky", "preset")

_PRESETS = {
    "cor17-default": {
        "kind": "schottky",
        "stretch": 4.0,
        "angles": [0.0, 1.2],
        "delta": math.log(4),
        "use": "mobius",
    },
}

_CONFIG_DEFAULTS = {
    "K": 1e4,
    "delta": None,
    "D": None,
    "L_values": [8],
    "c_delta": 4.0,
    "tolerance": 1e-9,
    "radius_cap": 12,
    "class_cap": 4_000_000,
    "k_max": 8,
    "window_k_max": 2,
    "reference_factor": 2,
    "n_max": 8,
    "frontier_cap": 1_000_000,
    "diagnostics_cap": 16,
}

_PARAM_DEFAULTS = {
    "alpha": 0.0,
    "band": None,
    "C0": None,
    "n": 4,
    "ball_radius": 6,
    "f_radius": 2,
    "max_f": 12,
    "cert_radius": 6,
    "radius": None,
}

_TOP_KEYS = ("name", "rank", "seed", "target", "reference", "subset",
             "matrices", "ensemble", "verify", "config", "params")


@dataclass(frozen=True)
class Scenario:
    """A normalized verification scenario; ``data`` is canonical JSON-ready."""

    data: dict

    @property
    def name(self) -> str:
        return self.data["name"]

    @property
    def rank(self) -> int:
        return self.data["rank"]

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def verify(self) -> tuple:
        return tuple(self.data["verify"])

    @property
    def params(self) -> dict:
        return self.data["params"]

    def config(self) -> VerifierConfig:
        c = dict(self.data["config"])
        c["L_values"] = tuple(c["L_values"])
        return VerifierConfig(**c)

    def with_overrides(self, *, seed: Optional[int] = None,
                       max_frontier: Optional[int] = None) -> "Scenario":
        d = json.loads(json.dumps(self.data))
        if seed is not None:
            d["seed"] = seed
        if max_frontier is not None:
            d["config"]["frontier_cap"] = max_frontier
        return Scenario(data=d)


def _fail(path: str, msg: str):
    raise InputError(f"scenario.{path}: {msg}" if path else f"scenario: {msg}")


def _check_num(v, path, *, positive=False, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(path, f"expected a number, got {type(v).__name__}")
    if not math.isfinite(v):
        _fail(path, f"expected a finite number, got {v}")
    if integer and int(v) != v:
        _fail(path, f"expected an integer, got {v}")
    if positive and not v > 0:
        _fail(path, f"must be positive, got {v}")
    return v


def _norm_matrix(m, path):
    if not isinstance(m, list) or not m:
        _fail(path, "expected a matrix as a list of rows")
    n = len(m)
    for i, row in enumerate(m):
        if not isinstance(row, list) or len(row) != n:
            _fail(f"{path}[{i}]", f"expected a row of {n} entries")
        for j, e in enumerate(row):
            if isinstance(e, list):
                if len(e) != 2 or not all(isinstance(x, (int, float))
                                          and not isinstance(x, bool) for x in e):
                    _fail(f"{path}[{i}][{j}]",
                          "complex entries are [re, im] number pairs")
            else:
                _check_num(e, f"{path}[{i}][{j}]")
    return m


def _norm_model(spec, path, rank):
    if spec is None:
        return None
    if not isinstance(spec, dict):
        _fail(path, "expected a model object or null")
    kind = spec.get("kind")
    if kind == "preset":
        name = spec.get("name")
        if name not in _PRESETS:
            _fail(f"{path}.name",
                  f"unknown preset {name!r} (known: {sorted(_PRESETS)})")
        expanded = dict(_PRESETS[name])
        expanded["preset"] = name
        if "use" in spec:
            expanded["use"] = spec["use"]
        spec = expanded
        kind = spec["kind"]
    if kind not in MODEL_KINDS:
        _fail(f"{path}.kind",
              f"unknown model kind {kind!r} (known: {', '.join(MODEL_KINDS)})")
    out = {"kind": kind}
    if "preset" in spec:
        out["preset"] = spec["preset"]
    extra = set(spec) - {"kind", "preset"}
    if kind == "tree":
        allowed = {"weights"}
        w = spec.get("weights")
        if w is not None:
            if not isinstance(w, list) or len(w) != rank:
                _fail(f"{path}.weights", f"expected {rank} weights")
            for i, x in enumerate(w):
                _check_num(x, f"{path}.weights[{i}]", positive=True)
        out["weights"] = w
    elif kind == "word-metric":
        allowed = {"elements", "weights"}
        els = spec.get("elements")
        if not isinstance(els, list) or not els:
            _fail(f"{path}.elements", "expected a nonempty list of words")
        for i, e in enumerate(els):
            if not isinstance(e, str):
                _fail(f"{path}.elements[{i}]", "expected a word string")
            if Word(e).max_index() > rank:
                _fail(f"{path}.elements[{i}]",
                      f"word {e!r} uses letters beyond rank {rank}")
        w = spec.get("weights")
        if w is not None:
            if not isinstance(w, list) or len(w) != len(els):
                _fail(f"{path}.weights", "expected one weight per element")
            for i, x in enumerate(w):
                _check_num(x, f"{path}.weights[{i}]", positive=True)
        out["elements"] = els
        out["weights"] = w
    elif kind in ("mobius", "linear"):
        allowed = {"matrices", "delta", "alpha", "dim"}
        mats = spec.get("matrices")
        if not isinstance(mats, list) or len(mats) != rank:
            _fail(f"{path}.matrices", f"expected {rank} generator matrices")
        out["matrices"] = [_norm_matrix(m, f"{path}.matrices[{i}]")
                           for i, m in enumerate(mats)]
        if spec.get("delta") is not None:
            _check_num(spec["delta"], f"{path}.delta", positive=True)
        out["delta"] = spec.get("delta")
        if kind == "linear":
            if spec.get("alpha") is not None:
                _check_num(spec["alpha"], f"{path}.alpha")
            out["alpha"] = spec.get("alpha")
        if kind == "mobius":
            dim = spec.get("dim")
            if dim is not None and dim not in (2, 3):
                _fail(f"{path}.dim", "hyperbolic dimension must be 2 or 3")
            out["dim"] = dim
    elif kind == "schottky":
        allowed = {"stretch", "angles", "delta", "use"}
        stretch = spec.get("stretch")
        if isinstance(stretch, list):
            if len(stretch) != rank:
                _fail(f"{path}.stretch", f"expected {rank} stretch factors")
            for i, s in enumerate(stretch):
                _check_num(s, f"{path}.stretch[{i}]", positive=True)
        else:
            _check_num(stretch, f"{path}.stretch", positive=True)
        angles = spec.get("angles")
        if not isinstance(angles, list) or len(angles) != rank:
            _fail(f"{path}.angles", f"expected {rank} rotation angles")
        for i, a in enumerate(angles):
            _check_num(a, f"{path}.angles[{i}]")
        use = spec.get("use", "mobius")
        if use not in ("mobius", "linear"):
            _fail(f"{path}.use", "expected 'mobius' or 'linear'")
        if spec.get("delta") is not None:
            _check_num(spec["delta"], f"{path}.delta", positive=True)
        out.update(stretch=stretch, angles=angles,
                   delta=spec.get("delta"), use=use)
    unknown = extra - allowed
    if unknown:
        _fail(path, f"unknown field(s) {sorted(unknown)} for kind {kind!r}")
    return out


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario JSON, filling every default."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(
            f"scenario is not valid JSON: {e.msg} at line {e.lineno} "
            f"column {e.colno}"
        ) from None
    if not isinstance(raw, dict):
        _fail("", "top level must be a JSON object")
    unknown = set(raw) - set(_TOP_KEYS)
    if unknown:
        _fail("", f"unknown field(s) {sorted(unknown)}")
    data: dict = {}
    name = raw.get("name", "scenario")
    if not isinstance(name, str):
        _fail("name", "expected a string")
    data["name"] = name
    rank = raw.get("rank", 2)
    _check_num(rank, "rank", positive=True, integer=True)
    data["rank"] = int(rank)
    seed = raw.get("seed", 0)
    _check_num(seed, "seed", integer=True)
    data["seed"] = int(seed)
    data["target"] = _norm_model(raw.get("target"), "target", data["rank"])
    data["reference"] = _norm_model(raw.get("reference"), "reference",
                                    data["rank"])
    subset = raw.get("subset")
    if subset is not None:
        if not isinstance(subset, list) or not subset:
            _fail("subset", "expected a nonempty list of word strings")
        for i, e in enumerate(subset):
            if not isinstance(e, str):
                _fail(f"subset[{i}]", "expected a word string")
            if Word(e).max_index() > data["rank"]:
                _fail(f"subset[{i}]",
                      f"word {e!r} uses letters beyond rank {data['rank']}")
    data["subset"] = subset
    mats = raw.get("matrices")
    if mats is not None:
        if not isinstance(mats, list) or not mats:
            _fail("matrices", "expected a nonempty list of matrices")
        mats = [_norm_matrix(m, f"matrices[{i}]") for i, m in enumerate(mats)]
    data["matrices"] = mats
    ens = raw.get("ensemble")
    if ens is not None:
        if not isinstance(ens, dict):
            _fail("ensemble", "expected an object")
        unknown = set(ens) - {"count", "dim", "scale"}
        if unknown:
            _fail("ensemble", f"unknown field(s) {sorted(unknown)}")
        count = ens.get("count", 1)
        _check_num(count, "ensemble.count", positive=True, integer=True)
        dim = ens.get("dim", 2)
        _check_num(dim, "ensemble.dim", positive=True, integer=True)
        if dim < 2:
            _fail("ensemble.dim", "dimension must be >= 2")
        scale = ens.get("scale", 1.0)
        _check_num(scale, "ensemble.scale", positive=True)
        ens = {"count": int(count), "dim": int(dim), "scale": scale}
    data["ensemble"] = ens
    verify = raw.get("verify", [])
    if not isinstance(verify, list):
        _fail("verify", "expected a list of check tokens")
    for i, t in enumerate(verify):
        if t not in VERIFY_TOKENS:
            _fail(f"verify[{i}]",
                  f"unknown verifier {t!r} (known: {', '.join(VERIFY_TOKENS)})")
    data["verify"] = list(verify)
    cfg_in = raw.get("config", {})
    if not isinstance(cfg_in, dict):
        _fail("config", "expected an object")
    unknown = set(cfg_in) - set(_CONFIG_DEFAULTS)
    if unknown:
        _fail("config", f"unknown field(s) {sorted(unknown)} "
              f"(known: {', '.join(sorted(_CONFIG_DEFAULTS))})")
    cfg = dict(_CONFIG_DEFAULTS)
    cfg.update(cfg_in)
    if not isinstance(cfg["L_values"], list) or not cfg["L_values"]:
        _fail("config.L_values", "expected a nonempty list of window lengths")
    for i, L in enumerate(cfg["L_values"]):
        _check_num(L, f"config.L_values[{i}]", positive=True)
    data["config"] = cfg
    par_in = raw.get("params", {})
    if not isinstance(par_in, dict):
        _fail("params", "expected an object")
    unknown = set(par_in) - set(_PARAM_DEFAULTS)
    if unknown:
        _fail("params", f"unknown field(s) {sorted(unknown)} "
              f"(known: {', '.join(sorted(_PARAM_DEFAULTS))})")
    par = dict(_PARAM_DEFAULTS)
    par.update(par_in)
    band = par["band"]
    if band is not None:
        if (not isinstance(band, list) or len(band) != 2):
            _fail("params.band", "expected [alpha, beta]")
        _check_num(band[0], "params.band[0]")
        _check_num(band[1], "params.band[1]")
    data["params"] = par
    scen = Scenario(data=data)
    scen.config()  # validate config values via the dataclass
    return scen


def emit_scenario(scenario: Scenario) -> str:
    """Canonical scenario text; parse(emit(s)) == s."""
    return json.dumps(scenario.data, sort_keys=True, indent=2) + "\n"


def load_scenario(path) -> Scenario:
    p = Path(path)
    if not p.exists():
        raise InputError(f"scenario file not found: {p}")
    return parse_scenario(p.read_text())


def builtin_preset(name: str) -> dict:
    if name not in _PRESETS:
        raise InputError(f"unknown preset {name!r} (known: {sorted(_PRESETS)})")
    out = dict(_PRESETS[name])
    out["preset"] = name
    return out


# ------------------------------------------------------------- model build


def _mat_array(rows) -> np.ndarray:
    cplx = any(isinstance(e, list) for row in rows for e in row)
    if cplx:
        return np.array([[complex(e[0], e[1]) if isinstance(e, list) else e
                          for e in row] for row in rows], dtype=np.complex128)
    return np.array(rows, dtype=np.float64)


def build_model(spec: Optional[dict], rank: int):
    """Instantiate an action model from a normalized scenario model spec."""
    if spec is None:
        return None
    kind = spec["kind"]
    if kind == "tree":
        w = spec.get("weights")
        return TreeModel(rank, weights=tuple(w) if w else None)
    if kind == "word-metric":
        gens = GeneratingSet(rank, [Word(e) for e in spec["elements"]],
                             spec.get("weights"))
        return WordMetricModel(gens)
    if kind == "mobius":
        mats = [_mat_array(m) for m in spec["matrices"]]
        kw = {}
        if spec.get("delta") is not None:
            kw["delta"] = spec["delta"]
        if spec.get("dim") is not None:
            kw["dim"] = spec["dim"]
        return MobiusModel(mats, **kw)
    if kind == "linear":
        mats = [_mat_array(m) for m in spec["matrices"]]
        kw = {}
        if spec.get("delta") is not None:
            kw["delta"] = spec["delta"]
        if spec.get("alpha") is not None:
            kw["alpha"] = spec["alpha"]
        return LinearRepModel(mats, **kw)
    if kind == "schottky":
        action = build_schottky(spec["stretch"], spec["angles"],
                                delta=spec.get("delta"))
        return action.linear if spec.get("use") == "linear" else action.mobius
    raise InputError(f"unknown model kind {kind!r}")


def _ensemble_pairs(ens: dict, seed: int) -> list:
    """Seeded random unit-|det| matrix pairs for spectral checks."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(ens["count"]):
        pair = []
        while len(pair) < 2:
            m = rng.standard_normal((ens["dim"], ens["dim"])) * ens["scale"]
            d = abs(np.linalg.det(m))
            if d < 1e-12:
                continue
            pair.append(m / d ** (1.0 / ens["dim"]))
        out.append(pair)
    return out


# --------------------------------------------------------- serialization


def _num(v):
    if isinstance(v, bool) or v is None or isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    return str(v)


def _jsonable(obj):
    if isinstance(obj, LengthBracket):
        return {"lo": _num(obj.lo), "hi": _num(obj.hi),
                "exact": obj.exact, "certified": obj.certified}
    if isinstance(obj, WindowRow):
        return {
            "class": str(obj.rep),
            "ref": _jsonable(obj.ref_length),
            "target": _jsonable(obj.target_length),
            "ratio": _jsonable(obj.ratio),
            "straddles": obj.straddles,
        }
    if isinstance(obj, Word):
        return str(obj)
    if isinstance(obj, GeneratingSet):
        return {"elements": [str(e) for e in obj.elements],
                "weights": [_num(w) for w in obj.weights]}
    if isinstance(obj, BochiConstants):
        return {"m": obj.m, "c_m": obj.c_m, "d_m": obj.d_m}
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _jsonable(getattr(obj, k))
                for k in obj.__dataclass_fields__}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _num(obj)


_VERDICT_RANK = {"holds": 0, "inconclusive": 1, "hypothesis-failed": 2,
                 "violated": 3}


def _worst(verdicts) -> str:
    worst = "holds"
    for v in verdicts:
        if _VERDICT_RANK.get(v, 1) > _VERDICT_RANK[worst]:
            worst = v
    return worst


# ------------------------------------------------------------ verifier glue


def _require(cond, what):
    if not cond:
        raise InputError(what)


def _word_metric_reference(scen: Scenario, reference):
    if isinstance(reference, WordMetricModel):
        return reference
    subset = scen.data["subset"]
    _require(subset is not None,
             "this check needs a word-metric reference or a subset")
    return WordMetricModel(GeneratingSet(scen.rank,
                                         [Word(e) for e in subset]))


def _spectral_instances(scen: Scenario, target):
    if scen.data["matrices"] is not None:
        return [[_mat_array(m) for m in scen.data["matrices"]]]
    if scen.data["ensemble"] is not None:
        return _ensemble_pairs(scen.data["ensemble"], scen.seed)
    if isinstance(target, MatrixActionModel):
        return [[target.matrix(Word((i,))) for i in range(1, scen.rank + 1)]]
    raise InputError("this check needs matrices, an ensemble, or a matrix "
                     "target model")


def _run_token(token: str, scen: Scenario, cfg: VerifierConfig,
               target, reference) -> dict:
    p = scen.params
    tol = cfg.tolerance
    if token in ("thm13", "cor17"):
        _require(target is not None and reference is not None,
                 f"verifier {token} needs target and reference models")
        variant = "tight" if token == "thm13" else "plain-log4"
        reports = cobounded_dilation_report(target, reference, cfg, variant)
        return {"reports": [_jsonable(r) for r in reports],
                "verdict": _worst(r.verdict for r in reports)}
    if token == "thm15":
        _require(target is not None, "verifier thm15 needs a target model")
        ref = _word_metric_reference(scen, reference)
        reports = word_metric_dilation_report(target, ref, cfg)
        return {"reports": [_jsonable(r) for r in reports],
                "verdict": _worst(r.verdict for r in reports)}
    if token == "cor14":
        _require(target is not None and reference is not None,
                 "verifier cor14 needs target and reference models")
        _require(p["band"] is not None,
                 "verifier cor14 needs params.band = [alpha, beta]")
        reports = ratio_envelope_report(target, reference, p["band"][0],
                                        p["band"][1], cfg, C0=p["C0"])
        return {"reports": [_jsonable(r) for r in reports],
                "verdict": _worst(r.verdict for r in reports)}
    if token == "anosov":
        _require(isinstance(target, MatrixActionModel),
                 "verifier anosov needs a matrix target model")
        cert = target.certificate(p["cert_radius"])
        entry = {"certificate": _jsonable(cert)}
        verdicts = ["holds" if cert.ok else "inconclusive"]
        if cert.ok and reference is not None and isinstance(target,
                                                            LinearRepModel):
            reports = spectral_dilation_report(
                target, reference, cfg, alpha=p["alpha"],
                cert_radius=p["cert_radius"])
            entry["reports"] = [_jsonable(r) for r in reports]
            verdicts += [r.verdict for r in reports]
        return {**entry, "verdict": _worst(verdicts)}
    if token == "bf":
        _require(target is not None and scen.data["subset"] is not None,
                 "verifier bf needs a target model and a subset")
        words = [Word(e) for e in scen.data["subset"]]
        check = bf_lower_check(target, words, n_max=cfg.n_max, tol=tol,
                               K=cfg.K, frontier_cap=cfg.frontier_cap)
        if check.ok:
            verdict = "holds"
        elif check.joint.certified:
            verdict = "violated"
        else:
            verdict = "inconclusive"
        return {"reports": [_jsonable(check)], "verdict": verdict}
    if token == "bochi":
        instances = _spectral_instances(scen, target)
        rows = []
        verdicts = []
        for mats in instances:
            prof = jsr_profile(mats, cfg.n_max, cap=cfg.frontier_cap)
            rhs = bochi_rhs(mats, cap=cfg.frontier_cap)
            ok = bool(prof.bracket.hi <= rhs.value + tol)
            if ok:
                verdicts.append("holds")
            elif prof.bracket.lo > rhs.value + tol and not rhs.partial:
                verdicts.append("violated")
            else:
                verdicts.append("inconclusive")
            rows.append({
                "jsr": _jsonable(prof.bracket),
                "rhs": _num(rhs.value),
                "j_used": rhs.j_used,
                "partial": rhs.partial,
                "ok": ok,
            })
        return {"reports": rows, "verdict": _worst(verdicts)}
    if token == "prop31":
        _require(target is not None and scen.data["subset"] is not None,
                 "verifier prop31 needs a target model and a subset")
        words = [Word(e) for e in scen.data["subset"]]
        report = joint_vs_dilation_report(target, words, cfg)
        return {"reports": [_jsonable(report)], "verdict": report.verdict}
    if token == "lemma25":
        _require(target is not None, "verifier lemma25 needs a target model")
        report = displacement_sandwich_report(target, p["n"],
                                              p["ball_radius"], cfg)
        return {"reports": [_jsonable(report)], "verdict": report.verdict}
    if token == "lemma32":
        _require(target is not None, "verifier lemma32 needs a target model")
        report = pointwise_cover_report(target, p["ball_radius"],
                                        p["f_radius"], cfg, max_f=p["max_f"])
        return {"reports": [_jsonable(report)], "verdict": report.verdict}
    raise InputError(f"unknown verifier token {token!r}")


# ------------------------------------------------------------- run + emit


@dataclass
class RunReport:
    """Deterministic run output; no wall-clock data inside."""

    scenario: dict
    entries: list
    verdict: str
    exit_code: int
    env: dict
    class_rows: list = field(default_factory=list)

    def to_json(self) -> str:
        body = {
            "scenario": self.scenario,
            "entries": self.entries,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "env": self.env,
        }
        return json.dumps(body, sort_keys=True, indent=2,
                          allow_nan=False) + "\n"


def _csv_cell(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return v


def _class_rows(scen: Scenario, cfg: VerifierConfig, target, reference):
    """Per-class table rows: id, reference lo/hi, target lo/hi, ratio lo/hi."""
    radius = scen.params["radius"]
    if radius is None:
        radius = cfg.radius_cap
        if reference is not None:
            needed = _needed_radius(reference, max(cfg.L_values))
            radius = int(min(needed, cfg.radius_cap))
    primary = target if target is not None else reference
    if primary is None:
        return []
    other = reference if target is not None else None
    rows = []
    if other is None:
        from .bounds import _eval_class_lengths

        reps = iter_class_reps(scen.rank, int(radius), cfg.class_cap)
        lo, hi = _eval_class_lengths(primary, reps, cfg.window_k_max)
        for i, rep in enumerate(reps):
            w = Word.__new__(Word)
            object.__setattr__(w, "letters", tuple(rep))
            rows.append((str(w), "", "", _csv_cell(lo[i]), _csv_cell(hi[i]),
                         "", ""))
        return rows
    table = ClassTable(primary, other, int(radius), class_cap=cfg.class_cap,
                       window_k_max=cfg.window_k_max)
    for i, rep in enumerate(table.reps):
        w = Word.__new__(Word)
        object.__setattr__(w, "letters", tuple(rep))
        rlo, rhi = table.ref_lo[i], table.ref_hi[i]
        tlo, thi = table.tgt_lo[i], table.tgt_hi[i]
        if rlo > 1e-9:
            from .actions import exact_div

            ratio_lo, ratio_hi = exact_div(tlo, rhi), exact_div(thi, rlo)
        else:
            ratio_lo = ratio_hi = ""
        rows.append((str(w), _csv_cell(rlo), _csv_cell(rhi), _csv_cell(tlo),
                     _csv_cell(thi), _csv_cell(ratio_lo), _csv_cell(ratio_hi)))
    return rows


def run(scenario: Scenario, *, max_frontier: Optional[int] = None,
        with_classes: bool = False) -> RunReport:
    """Execute the scenario's verifiers in order.

    Resource-cap errors are captured per verifier and the run continues;
    input errors propagate (the scenario itself is wrong).
    """
    if max_frontier is not None:
        scenario = scenario.with_overrides(max_frontier=max_frontier)
    cfg = scenario.config()
    target = build_model(scenario.data["target"], scenario.rank)
    reference = build_model(scenario.data["reference"], scenario.rank)
    entries = []
    capped = False
    for token in scenario.verify:
        t0 = time.perf_counter()
        try:
            entry = _run_token(token, scenario, cfg, target, reference)
        except ResourceCapError as e:
            capped = True
            entry = {"status": "resource-cap", "error": str(e),
                     "verdict": "inconclusive"}
        else:
            entry.setdefault("status", "ok")
        print(f"[{scenario.name}] {token}: {entry['verdict']} "
              f"({time.perf_counter() - t0:.2f}s)", file=sys.stderr)
        entries.append({"token": token, **entry})
    verdict = _worst(e["verdict"] for e in entries) if entries else "holds"
    exit_code = 1 if verdict == "violated" else 3 if capped else 0
    class_rows = (_class_rows(scenario, cfg, target, reference)
                  if with_classes else [])
    return RunReport(
        scenario=scenario.data,
        entries=entries,
        verdict=verdict,
        exit_code=exit_code,
        env={
            "package": "lenspec",
            "version": _VERSION,
            "python": platform.python_version(),
            "seed": scenario.seed,
        },
        class_rows=class_rows,
    )


_CSV_HEADER = ("class", "ref_lo", "ref_hi", "target_lo", "target_hi",
               "ratio_lo", "ratio_hi")


def _classes_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_HEADER)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def emit(report: RunReport, out_dir, fmt: str = "json") -> list:
    """Write report.json (always) and classes.csv (when rows are present)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "report.json"]
    paths[0].write_text(report.to_json())
    if report.class_rows:
        p = out / "classes.csv"
        p.write_text(_classes_csv(report.class_rows))
        paths.append(p)
    if fmt == "csv" and not report.class_rows:
        p = out / "entries.csv"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("token", "status", "verdict"))
        for e in report.entries:
            w.writerow((e["token"], e["status"], e["verdict"]))
        p.write_text(buf.getvalue())
        paths.append(p)
    return paths


# ----------------------------------------------------------------- CLI


def _add_common(sub):
    sub.add_argument("--scenario", required=True, help="scenario JSON path")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--seed", type=int, default=None,
                     help="override the scenario seed")
    sub.add_argument("--max-frontier", type=int, default=None,
                     help="override the frontier/product cap")
    sub.add_argument("--format", choices=("json", "csv"), default="json",
                     help="stdout format")


def _print_report(report: RunReport, fmt: str):
    if fmt == "json":
        sys.stdout.write(report.to_json())
    else:
        for e in report.entries:
            print(f"{e['token']},{e['status']},{e['verdict']}")
        if report.class_rows:
            sys.stdout.write(_classes_csv(report.class_rows))


def _load(args) -> Scenario:
    scen = load_scenario(args.scenario)
    if args.seed is not None:
        scen = scen.with_overrides(seed=args.seed)
    return scen


def _cmd_verify(args, tokens=None) -> int:
    scen = _load(args)
    if tokens:
        d = json.loads(json.dumps(scen.data))
        d["verify"] = list(tokens)
        scen = parse_scenario(json.dumps(d))
    report = run(scen, max_frontier=args.max_frontier,
                 with_classes=args.format == "csv" or args.out is not None)
    if args.out:
        for p in emit(report, args.out, args.format):
            print(f"wrote {p}", file=sys.stderr)
    _print_report(report, args.format)
    return report.exit_code


def _cmd_spectrum(args) -> int:
    scen = _load(args)
    cfg = scen.config()
    if args.max_frontier is not None:
        scen = scen.with_overrides(max_frontier=args.max_frontier)
        cfg = scen.config()
    target = build_model(scen.data["target"], scen.rank)
    reference = build_model(scen.data["reference"], scen.rank)
    if target is None and reference is None:
        raise InputError("spectrum needs a target or reference model")
    rows = _class_rows(scen, cfg, target, reference)
    report = RunReport(
        scenario=scen.data, entries=[], verdict="holds", exit_code=0,
        env={"package": "lenspec", "version": _VERSION,
             "python": platform.python_version(), "seed": scen.seed},
        class_rows=rows,
    )
    if args.out:
        for p in emit(report, args.out, args.format):
            print(f"wrote {p}", file=sys.stderr)
    if args.format == "csv":
        sys.stdout.write(_classes_csv(rows))
    else:
        preview = [dict(zip(_CSV_HEADER, r)) for r in rows[:20]]
        print(json.dumps({"classes": len(rows), "first": preview},
                         indent=2, sort_keys=True))
    return 0


def _cmd_dilation(args) -> int:
    scen = _load(args)
    cfg = scen.config()
    target = build_model(scen.data["target"], scen.rank)
    reference = build_model(scen.data["reference"], scen.rank)
    _require(target is not None and reference is not None,
             "dilation needs target and reference models")
    radii = [_needed_radius(reference, L) for L in cfg.L_values]
    from .bounds import _build_table

    table = _build_table(target, reference, radii, cfg)
    out = {}
    for L in cfg.L_values:
        ws = _window_sup(table, L, _needed_radius(reference, L),
                         diag_cap=cfg.diagnostics_cap)
        out[str(L)] = {
            "sup": _jsonable(ws.value),
            "attained": str(ws.attained) if ws.attained else None,
            "classes": ws.count,
            "truncated": ws.truncated,
        }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_jsr(args) -> int:
    scen = _load(args)
    cfg = scen.config()
    target = build_model(scen.data["target"], scen.rank)
    instances = _spectral_instances(scen, target)
    cap = args.max_frontier or cfg.frontier_cap
    rows = []
    worst = "holds"
    for mats in instances:
        prof = jsr_profile(mats, cfg.n_max, cap=cap)
        rhs = bochi_rhs(mats, cap=cap)
        ok = bool(prof.bracket.hi <= rhs.value + cfg.tolerance)
        rows.append({"jsr": _jsonable(prof.bracket), "rhs": _num(rhs.value),
                     "j_used": rhs.j_used, "partial": rhs.partial, "ok": ok})
        if not ok:
            worst = ("violated" if prof.bracket.lo > rhs.value + cfg.tolerance
                     and not rhs.partial else "inconclusive")
    print(json.dumps({"instances": rows, "verdict": worst},
                     indent=2, sort_keys=True))
    return 1 if worst == "violated" else 0


def _cmd_delta(args) -> int:
    scen = _load(args)
    cfg = scen.config()
    target = build_model(scen.data["target"], scen.rank)
    reference = build_model(scen.data["reference"], scen.rank)
    _require(target is not None and reference is not None,
             "delta needs target and reference models")
    rep = metric_distance_report(target, reference, cfg)
    print(json.dumps(_jsonable(rep), indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lenspec",
        description="Length-spectrum comparison toolkit: windowed dilations, "
                    "joint stable lengths, and inequality verification runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("spectrum", "enumerate conjugacy classes with length brackets"),
        ("dilation", "windowed dilation sup between two models"),
        ("jsr", "joint spectral radius bracket and spectral upper bound"),
        ("delta", "symmetrized log-dilation distance between two models"),
    ):
        _add_common(sub.add_parser(name, help=helptext))
    vp = sub.add_parser("verify", help="run named inequality checks")
    vp.add_argument("tokens", nargs="*", metavar="token",
                    help=f"checks to run (default: scenario's verify list); "
                         f"one of {', '.join(VERIFY_TOKENS)}")
    _add_common(vp)
    args = parser.parse_args(argv)
    try:
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        if args.command == "dilation":
            return _cmd_dilation(args)
        if args.command == "jsr":
            return _cmd_jsr(args)
        if args.command == "delta":
            return _cmd_delta(args)
        return _cmd_verify(args, tokens=args.tokens)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 2
    except ResourceCapError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
