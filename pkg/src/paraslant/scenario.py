"""Scenario documents: schema validation, built-in scenarios and sampling.

A scenario is a JSON object (schema version 1). Expression-valued fields are
strings in the expression grammar; every failure to read a document is a
``ConfigError`` naming the offending field.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .ambient import AmbientStructure, canonical_paracosymplectic
from .catalog import CHECKS
from .errors import ConfigError, ToolkitError
from .expr import Expr, free_vars, parse
from .submanifold import FrameField, Immersion
from .warped import WarpedSpec

SCHEMA = 1
CLAIM_KINDS = ("slant_lambda", "warping_function", "orthogonal_distributions", "pr_anti_slant_proper",
               "warped_product")


@dataclass
class WarpConfig:
    mode: str                      # "declared" or "detect"
    base: tuple                    # frame indices
    fiber: tuple
    f: Optional[Expr] = None       # declared mode
    reference: Optional[list] = None
    f_reference: float = 1.0
    base_params: Optional[tuple] = None
    fiber_params: Optional[tuple] = None


@dataclass
class Sampling:
    mode: str
    names: tuple
    points: list = field(default_factory=list)
    seed: Optional[int] = None
    count: int = 0
    bounds: dict = field(default_factory=dict)
    singular: dict = field(default_factory=dict)

    def draw(self, seed: Optional[int] = None, count: Optional[int] = None):
        """Candidate points: explicit ones, or an endless seeded uniform stream."""
        if self.mode == "explicit":
            pts = self.points if count is None else self.points[:count]
            yield from (np.array(p, dtype=float) for p in pts)
            return
        rng = np.random.default_rng(self.seed if seed is None else seed)
        lo = np.array([self.bounds[n][0] for n in self.names], dtype=float)
        hi = np.array([self.bounds[n][1] for n in self.names], dtype=float)
        while True:
            yield lo + (hi - lo) * rng.random(len(self.names))


@dataclass
class Scenario:
    name: str
    document: dict
    ambient: Optional[AmbientStructure]
    immersion: Optional[Immersion]
    frame: Optional[FrameField]
    D_perp: tuple
    D_lambda: tuple
    xi: Optional[int]
    lam: Optional[float]
    warp: Optional[WarpConfig]
    warped_spec: Optional[WarpedSpec]
    sampling: Sampling
    checks: Optional[dict]         # id -> tol override (None = default); None = every check
    tolerances: dict
    claims: list

    @property
    def digest(self) -> str:
        canon = json.dumps(self.document, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    @property
    def seed(self) -> int:
        return int(self.sampling.seed) if self.sampling.seed is not None else 0


# -- reading --------------------------------------------------------------------


class _Reader:
    def __init__(self, source: str):
        self.source = source

    def fail(self, fld: str, reason: str):
        raise ConfigError(self.source, fld, reason)

    def get(self, obj: dict, key: str, fld: str, kind=None, required: bool = True, default=None):
        if not isinstance(obj, dict):
            self.fail(fld, "expected an object")
        if key not in obj:
            if required:
                self.fail(f"{fld}.{key}" if fld else key, "missing required field")
            return default
        val = obj[key]
        if kind is not None and not isinstance(val, kind):
            self.fail(f"{fld}.{key}" if fld else key, f"expected {_kind_name(kind)}, got {type(val).__name__}")
        return val

    def expr(self, text, fld: str, allowed: set) -> Expr:
        if isinstance(text, bool) or not isinstance(text, (str, int, float)):
            self.fail(fld, "expected an expression string or a number")
        try:
            e = parse(str(text))
        except ToolkitError as exc:
            self.fail(fld, f"{exc} in {str(text)!r}")
        unknown = free_vars(e) - allowed
        if unknown:
            self.fail(fld, f"unknown name(s) {sorted(unknown)} in {str(text)!r}")
        return e

    def number(self, val, fld: str) -> float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(fld, "expected a number")
        return float(val)

    def names(self, val, fld: str) -> list:
        if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
            self.fail(fld, "expected a list of names")
        if len(set(val)) != len(val):
            self.fail(fld, "names must be distinct")
        return list(val)

    def constants(self, obj, fld: str) -> dict:
        if obj is None:
            return {}
        if not isinstance(obj, dict):
            self.fail(fld, "expected an object of name: number")
        return {k: self.number(v, f"{fld}.{k}") for k, v in obj.items()}

    def matrix(self, rows, fld: str, d: int, allowed: set) -> list:
        if not isinstance(rows, list) or len(rows) != d:
            self.fail(fld, f"expected {d} rows")
        out = []
        for i, r in enumerate(rows):
            if not isinstance(r, list) or len(r) != d:
                self.fail(f"{fld}[{i}]", f"expected {d} entries")
            out.append([self.expr(e, f"{fld}[{i}][{j}]", allowed) for j, e in enumerate(r)])
        return out


def _kind_name(kind) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return {dict: "object", list: "list", str: "string"}.get(kind, kind.__name__)


def _read_ambient(r: _Reader, doc: dict) -> AmbientStructure:
    amb = r.get(doc, "ambient", "", dict)
    if "canonical" in amb:
        n = r.get(r.get(amb, "canonical", "ambient", dict), "n", "ambient.canonical", int)
        if n < 1:
            r.fail("ambient.canonical.n", "must be >= 1")
        return canonical_paracosymplectic(n)
    if "explicit" in amb:
        ex = r.get(amb, "explicit", "ambient", dict)
        f = "ambient.explicit"
        coords = r.names(r.get(ex, "coords", f, list), f + ".coords")
        d = len(coords)
        if d < 3 or d % 2 == 0:
            r.fail(f + ".coords", "ambient dimension must be odd and >= 3")
        consts = r.constants(ex.get("constants"), f + ".constants")
        allowed = set(coords) | set(consts)
        phi = r.matrix(r.get(ex, "phi", f, list), f + ".phi", d, allowed)
        g = r.matrix(r.get(ex, "g", f, list), f + ".g", d, allowed)
        vecs = {}
        for key in ("xi", "eta"):
            v = r.get(ex, key, f, list)
            if len(v) != d:
                r.fail(f"{f}.{key}", f"expected {d} entries")
            vecs[key] = [r.expr(e, f"{f}.{key}[{i}]", allowed) for i, e in enumerate(v)]
        return AmbientStructure(coords, phi, vecs["xi"], vecs["eta"], g, consts, name="explicit")
    r.fail("ambient", "expected 'canonical' or 'explicit'")


def _frame_index(r: _Reader, names: tuple, name, fld: str) -> int:
    if name not in names:
        r.fail(fld, f"unknown frame field {name!r}; frame has {list(names)}")
    return names.index(name)


def _read_sampling(r: _Reader, doc: dict, names: tuple) -> Sampling:
    s = r.get(doc, "sampling", "", dict)
    mode = r.get(s, "mode", "sampling", str)
    if mode == "explicit":
        raw = r.get(s, "points", "sampling", list)
        if not raw:
            r.fail("sampling.points", "needs at least one point")
        pts = []
        for i, p in enumerate(raw):
            if isinstance(p, dict):
                missing = [n for n in names if n not in p]
                if missing:
                    r.fail(f"sampling.points[{i}]", f"missing {missing}")
                p = [p[n] for n in names]
            if not isinstance(p, list) or len(p) != len(names):
                r.fail(f"sampling.points[{i}]", f"expected {len(names)} values for {list(names)}")
            pts.append([r.number(x, f"sampling.points[{i}]") for x in p])
        return Sampling("explicit", names, pts, seed=s.get("seed"))
    if mode == "random":
        if "seed" not in s:
            r.fail("sampling.seed", "random sampling needs a seed")
        seed = r.get(s, "seed", "sampling", int)
        count = r.get(s, "count", "sampling", int)
        if count < 1:
            r.fail("sampling.count", "must be >= 1")
        bounds_raw = r.get(s, "bounds", "sampling", dict)
        bounds = {}
        for n in names:
            b = bounds_raw.get(n)
            if not isinstance(b, list) or len(b) != 2:
                r.fail(f"sampling.bounds.{n}", "expected [low, high]")
            lo, hi = (r.number(x, f"sampling.bounds.{n}") for x in b)
            if not lo <= hi:
                r.fail(f"sampling.bounds.{n}", "low must not exceed high")
            bounds[n] = (lo, hi)
        extra = set(bounds_raw) - set(names)
        if extra:
            r.fail("sampling.bounds", f"unknown names {sorted(extra)}")
        singular = {}
        for n, vals in (s.get("singular") or {}).items():
            if n not in bounds:
                r.fail(f"sampling.singular.{n}", "unknown name")
            vals = [r.number(v, f"sampling.singular.{n}") for v in vals]
            lo, hi = bounds[n]
            for v in vals:
                if lo <= v <= hi:
                    r.fail(f"sampling.bounds.{n}", f"bounds [{lo}, {hi}] contain the singular value {v}")
            singular[n] = vals
        return Sampling("random", names, seed=seed, count=count, bounds=bounds, singular=singular)
    r.fail("sampling.mode", "expected 'explicit' or 'random'")


def load(doc: Any, source: str = "<scenario>") -> Scenario:
    """Validate a scenario document (a dict or JSON text)."""
    r = _Reader(source)
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            r.fail("<document>", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        r.fail("<document>", "expected a JSON object")
    doc = copy.deepcopy(doc)
    if doc.get("schema", SCHEMA) != SCHEMA:
        r.fail("schema", f"unsupported schema {doc.get('schema')!r}; expected {SCHEMA}")
    name = str(doc.get("name", source))

    ambient = _read_ambient(r, doc) if "ambient" in doc else None
    immersion = frame = None
    D_perp: tuple = ()
    D_lambda: tuple = ()
    xi = None
    lam = None
    warp = None
    if "immersion" in doc:
        if ambient is None:
            r.fail("ambient", "an immersion needs an ambient structure")
        im = r.get(doc, "immersion", "", dict)
        params = tuple(r.names(r.get(im, "params", "immersion", list), "immersion.params"))
        consts = r.constants(im.get("constants"), "immersion.constants")
        allowed = set(params) | set(consts)
        comps = r.get(im, "components", "immersion", list)
        if len(comps) != ambient.dim:
            r.fail("immersion.components", f"expected {ambient.dim} components, got {len(comps)}")
        comps = [r.expr(c, f"immersion.components[{i}]", allowed) for i, c in enumerate(comps)]
        immersion = Immersion(ambient, params, comps, consts)
        m = len(params)
        fr = doc.get("frame") or {}
        fnames = r.names(fr.get("names", [f"d_{p}" for p in params]), "frame.names")
        if len(fnames) != m:
            r.fail("frame.names", f"expected {m} names")
        rows = fr.get("rows")
        if rows is None:
            rows = [["1" if i == j else "0" for j in range(m)] for i in range(m)]
        frame = FrameField(fnames, r.matrix(rows, "frame.rows", m, allowed), params, consts)
        names = frame.names

        dist = doc.get("distributions") or {}
        D_perp = tuple(_frame_index(r, names, n, "distributions.D_perp") for n in dist.get("D_perp", []))
        D_lambda = tuple(_frame_index(r, names, n, "distributions.D_lambda") for n in dist.get("D_lambda", []))
        if dist.get("xi") is not None:
            xi = _frame_index(r, names, dist["xi"], "distributions.xi")
        if set(D_perp) & set(D_lambda):
            r.fail("distributions", "D_perp and D_lambda overlap")
        if xi is not None and xi in D_lambda:
            r.fail("distributions.xi", "xi cannot belong to D_lambda")
        if dist.get("lambda") is not None:
            lam = r.number(dist["lambda"], "distributions.lambda")

        if doc.get("warp") is not None:
            w = r.get(doc, "warp", "", dict)
            mode = r.get(w, "mode", "warp", str)
            base = tuple(_frame_index(r, names, n, "warp.base") for n in r.get(w, "base", "warp", list))
            fiber = tuple(_frame_index(r, names, n, "warp.fiber") for n in r.get(w, "fiber", "warp", list))
            if set(base) & set(fiber) or len(base) + len(fiber) != m:
                r.fail("warp", "base and fiber must partition the frame")
            if mode == "declared":
                warp = WarpConfig("declared", base, fiber, f=r.expr(r.get(w, "f", "warp"), "warp.f", allowed))
            elif mode == "detect":
                ref = r.get(w, "reference", "warp", (list, dict))
                if isinstance(ref, dict):
                    ref = [ref.get(p) for p in params]
                if len(ref) != m or any(v is None for v in ref):
                    r.fail("warp.reference", f"expected values for {list(params)}")
                ref = [r.number(v, "warp.reference") for v in ref]

                def pidx(key):
                    if w.get(key) is None:
                        return None
                    return tuple(params.index(p) if p in params else r.fail(f"warp.{key}", f"unknown param {p!r}")
                                 for p in r.names(w[key], f"warp.{key}"))

                warp = WarpConfig("detect", base, fiber, reference=ref,
                                  f_reference=r.number(w.get("f_reference", 1.0), "warp.f_reference"),
                                  base_params=pidx("base_params"), fiber_params=pidx("fiber_params"))
                if not warp.f_reference > 0:
                    r.fail("warp.f_reference", "must be positive")
            else:
                r.fail("warp.mode", "expected 'declared' or 'detect'")
        sample_names = params
    elif "warped_spec" in doc:
        sample_names = ()
    else:
        r.fail("immersion", "a scenario needs an immersion or a warped_spec")

    spec = None
    if doc.get("warped_spec") is not None:
        ws = r.get(doc, "warped_spec", "", dict)
        f = "warped_spec"
        bc = r.names(r.get(ws, "base_coords", f, list), f + ".base_coords")
        fc = r.names(r.get(ws, "fiber_coords", f, list), f + ".fiber_coords")
        consts = r.constants(ws.get("constants"), f + ".constants")
        gB = r.matrix(r.get(ws, "g_B", f, list), f + ".g_B", len(bc), set(bc) | set(consts))
        gF = r.matrix(r.get(ws, "g_F", f, list), f + ".g_F", len(fc), set(fc) | set(consts))
        fx = r.expr(r.get(ws, "f", f), f + ".f", set(bc) | set(consts))
        try:
            spec = WarpedSpec(bc, gB, fc, gF, fx, consts)
        except ValueError as exc:
            r.fail(f, str(exc))
        if immersion is None:
            sample_names = spec.coords

    sampling = _read_sampling(r, doc, tuple(sample_names))

    checks = None
    if doc.get("checks") is not None:
        from .catalog import BY_ID

        checks = {}
        for i, c in enumerate(r.get(doc, "checks", "", list)):
            cid, tol = (c, None) if isinstance(c, str) else (r.get(c, "id", f"checks[{i}]", str),
                                                             c.get("tol"))
            if cid not in BY_ID:
                r.fail(f"checks[{i}]", f"unknown check id {cid!r}")
            checks[cid] = None if tol is None else r.number(tol, f"checks[{i}].tol")

    tol_doc = doc.get("tolerances") or {}
    tolerances = {
        "default": r.number(tol_doc.get("default", 1e-8), "tolerances.default"),
        "theorem": r.number(tol_doc.get("theorem", 1e-9), "tolerances.theorem"),
        "axiom": (r.number(tol_doc["axiom"], "tolerances.axiom") if tol_doc.get("axiom") is not None
                  else (ambient.default_tol if ambient is not None else 1e-12)),
    }

    claims = []
    for i, c in enumerate(doc.get("reference_claims") or []):
        q = r.get(c, "quantity", f"reference_claims[{i}]", str)
        if q not in CLAIM_KINDS:
            r.fail(f"reference_claims[{i}].quantity", f"expected one of {list(CLAIM_KINDS)}")
        claimed = r.get(c, "claimed", f"reference_claims[{i}]")
        if q == "warping_function":
            r.expr(claimed, f"reference_claims[{i}].claimed", set(sample_names) | set(
                immersion.constants if immersion else {}))
        claims.append({"quantity": q, "claimed": claimed, "source": str(c.get("source", ""))})

    return Scenario(name, doc, ambient, immersion, frame, D_perp, D_lambda, xi, lam, warp, spec, sampling,
                    checks, tolerances, claims)


# -- built-in scenarios ---------------------------------------------------------------

_EXAMPLE_41 = {
    "schema": 1,
    "name": "example-4.1",
    "ambient": {"canonical": {"n": 2}},
    "immersion": {
        "params": ["v", "alpha", "beta", "t"],
        "components": ["v*cosh(alpha)", "v*cosh(beta)", "v*sinh(alpha)", "v*sinh(beta)", "t"],
    },
    "frame": {"names": ["Z1", "Z2", "Z3", "Z4"]},
    "distributions": {"D_perp": ["Z4"], "D_lambda": ["Z1", "Z2", "Z3"], "xi": "Z4", "lambda": 0.5},
    "warp": {"mode": "detect", "base": ["Z4", "Z1"], "fiber": ["Z2", "Z3"],
             "reference": [2.0, 0.3, -0.5, 1.0], "f_reference": 2.0},
    "sampling": {"mode": "random", "seed": 41, "count": 50,
                 "bounds": {"v": [1.5, 3.0], "alpha": [-1.0, 1.0], "beta": [-1.0, 1.0], "t": [-1.0, 1.0]},
                 "singular": {"v": [0.0, 1.0]}},
    "reference_claims": [
        {"quantity": "slant_lambda", "claimed": 0.5, "source": "slant coefficent $\\lambda=\\frac{1}{2}$"},
        {"quantity": "warping_function", "claimed": "v^2",
         "source": "with $f=v^{2}$"},
        {"quantity": "pr_anti_slant_proper", "claimed": True,
         "source": "where $\\xi = Z_{4}$ and $\\varphi(Z_{4})=0$"},
        {"quantity": "warped_product", "claimed": True, "source": "Hence $M$ is a $4$-dimensional"},
    ],
}

_EXAMPLE_42 = {
    "schema": 1,
    "name": "example-4.2",
    "ambient": {"canonical": {"n": 3}},
    "immersion": {
        "params": ["u", "alpha", "v", "t"],
        "components": ["u/sqrt(2)*cosh(alpha)", "u + v", "v", "u/sqrt(2)*sinh(alpha)", "k1", "k2", "t"],
        "constants": {"k1": 1.0, "k2": 2.0},
    },
    "frame": {"names": ["Z1", "Z2", "Z3", "Z4"]},
    "distributions": {"D_perp": ["Z3", "Z4"], "D_lambda": ["Z1", "Z2"], "xi": "Z4", "lambda": 1.0 / 3.0},
    "warp": {"mode": "detect", "base": ["Z3", "Z4"], "fiber": ["Z1", "Z2"],
             "reference": [1.0, 0.2, 0.0, 0.0], "f_reference": 1.0},
    "sampling": {"mode": "random", "seed": 42, "count": 50,
                 "bounds": {"u": [0.5, 2.5], "alpha": [-1.0, 1.0], "v": [-1.0, 1.0], "t": [-1.0, 1.0]},
                 "singular": {"u": [0.0]}},
    "reference_claims": [
        {"quantity": "slant_lambda", "claimed": 1.0 / 3.0,
         "source": "with slant coefficient $\\lambda=\\frac{1}{3}$"},
        {"quantity": "orthogonal_distributions", "claimed": True,
         "source": "So, $M$ turn into a proper"},
        {"quantity": "warping_function", "claimed": "u^2/2",
         "source": "with wrapping function $f=\\frac{1}{2}u^{2}$"},
        {"quantity": "warped_product", "claimed": True,
         "source": "Thus, $M$ is a $4$-dimensional"},
    ],
}

_SYNTHETIC_SLANT = {
    "schema": 1,
    "name": "synthetic-slant",
    "ambient": {"canonical": {"n": 2}},
    "immersion": {
        "params": ["p", "q"],
        "components": ["p", "b*q", "a*q", "0", "0"],
        "constants": {"a": 2.0, "b": 1.4142135623730951},
    },
    "frame": {"names": ["E1", "E2"]},
    "distributions": {"D_perp": [], "D_lambda": ["E1", "E2"], "lambda": 2.0},
    "sampling": {"mode": "random", "seed": 7, "count": 20, "bounds": {"p": [-2.0, 2.0], "q": [-2.0, 2.0]}},
}

_SYNTHETIC_WARPED = {
    "schema": 1,
    "name": "synthetic-warped",
    "warped_spec": {
        "base_coords": ["t", "v"], "g_B": [["1", "0"], ["0", "2"]],
        "fiber_coords": ["alpha", "beta"], "g_F": [["-1", "0"], ["0", "-1"]],
        "f": "v",
    },
    "sampling": {"mode": "random", "seed": 11, "count": 50,
                 "bounds": {"t": [-1.0, 1.0], "v": [0.5, 3.0], "alpha": [-1.0, 1.0], "beta": [-1.0, 1.0]},
                 "singular": {"v": [0.0]}},
}

_PRODUCT_TG = {
    "schema": 1,
    "name": "product-tg",
    "ambient": {"canonical": {"n": 3}},
    "immersion": {
        "params": ["s", "q", "u", "w"],
        "components": ["u", "sqrt(2)*w", "0", "2*w", "0", "q", "s"],
    },
    "frame": {"names": ["Zs", "Zq", "Zu", "Zw"]},
    "distributions": {"D_perp": ["Zq"], "D_lambda": ["Zu", "Zw"], "xi": "Zs", "lambda": 2.0},
    "warp": {"mode": "declared", "base": ["Zs", "Zq"], "fiber": ["Zu", "Zw"], "f": "1"},
    # every check except the nearly para-Sasakian classification, which this ambient does not have
    "checks": [c.check_id for c in CHECKS if c.check_id != "def-nps"],
    "sampling": {"mode": "random", "seed": 3, "count": 20,
                 "bounds": {"s": [-1.0, 1.0], "q": [-1.0, 1.0], "u": [-1.0, 1.0], "w": [-1.0, 1.0]}},
}

BUILTINS = {d["name"]: d for d in (_EXAMPLE_41, _EXAMPLE_42, _SYNTHETIC_SLANT, _SYNTHETIC_WARPED, _PRODUCT_TG)}


def builtin_document(name: str) -> dict:
    if name not in BUILTINS:
        raise ConfigError(f"builtin:{name}", "<name>", f"unknown builtin; choose from {sorted(BUILTINS)}")
    return copy.deepcopy(BUILTINS[name])


def load_source(source: str) -> Scenario:
    """``builtin:NAME`` or a path to a JSON scenario file."""
    if source.startswith("builtin:"):
        return load(builtin_document(source[len("builtin:"):]), source)
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(source, "<file>", f"cannot read: {exc.strerror or exc}") from exc
    return load(text, source)
