"""JSON descriptors for profiles, fibers, warped metrics, pairs and geodesics.

``parse`` validates a descriptor and fills defaults, returning a canonical
``Descriptor``; ``serialize`` writes it back.  Parsing the serialized form
gives an equal descriptor.  ``build_*`` turn canonical specs into objects.

Top-level kinds: warped, pair, hessian, profile, geodesic.
Profile types: power, constant, csc, cosh, sine, user-table.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path


from . import csc as _csc
from . import fibers as _fibers
from . import pairs as _pairs
from .errors import DescriptorError
from .profiles import RadialProfile, constant, from_table, power
from .warped import WarpedMetric

KINDS = ("warped", "pair", "hessian", "profile", "geodesic")
PROFILE_TYPES = ("power", "constant", "csc", "cosh", "sine", "user-table")
FIBER_TYPES = tuple(_fibers.BUILTIN)
POTENTIAL_TYPES = ("quadratic", "lorentz", "product2d", "maschke", "polynomial")


def _num(d, key, default=None, *, positive=False, nonzero=False):
    if key not in d:
        if default is None:
            raise DescriptorError(f"missing field {key!r}")
        return float(default)
    try:
        x = float(d[key])
    except (TypeError, ValueError):
        raise DescriptorError(f"field {key!r} must be a number") from None
    if not math.isfinite(x):
        raise DescriptorError(f"field {key!r} must be finite")
    if positive and not x > 0:
        raise DescriptorError(f"field {key!r} must be positive")
    if nonzero and x == 0:
        raise DescriptorError(f"field {key!r} must be nonzero")
    return x


def _int(d, key, default=None, lo=None):
    x = _num(d, key, default)
    if x != int(x) or (lo is not None and x < lo):
        raise DescriptorError(f"field {key!r} must be an integer >= {lo}")
    return int(x)


def _vec(d, key, default=None, dim=None):
    if key not in d:
        if default is None:
            raise DescriptorError(f"missing field {key!r}")
        v = default
    else:
        v = d[key]
    try:
        arr = [float(c) for c in (v if isinstance(v, (list, tuple)) else [v])]
    except (TypeError, ValueError):
        raise DescriptorError(f"field {key!r} must be a list of numbers") from None
    if not all(math.isfinite(c) for c in arr):
        raise DescriptorError(f"field {key!r} must be finite")
    if dim is not None and len(arr) != dim:
        raise DescriptorError(f"field {key!r} must have length {dim}")
    return arr


def _obj(d, key):
    v = d.get(key)
    if not isinstance(v, dict):
        raise DescriptorError(f"field {key!r} must be an object")
    return v


def _type(d, allowed):
    t = d.get("type")
    if t not in allowed:
        raise DescriptorError(f"type must be one of {allowed}, got {t!r}")
    return t


# --------------------------------------------------------------------------
# canonical forms


def norm_profile(d) -> dict:
    if not isinstance(d, dict):
        raise DescriptorError("profile must be an object")
    t = _type(d, PROFILE_TYPES)
    if t == "power":
        return {"type": t, "p": _num(d, "p"), "coef": _num(d, "coef", 1.0, positive=True)}
    if t == "constant":
        return {"type": t, "value": _num(d, "value", 1.0, positive=True)}
    if t == "csc":
        bs = _int(d, "branch_sign", 1)
        if bs not in (1, -1):
            raise DescriptorError("branch_sign must be +1 or -1")
        return {
            "type": t,
            "k": _num(d, "k", nonzero=True),
            "C": _num(d, "C"),
            "C1": _num(d, "C1"),
            "C2": _num(d, "C2", 0.0),
            "branch_sign": bs,
        }
    if t in ("cosh", "sine"):
        return {"type": t, "s": _num(d, "s"), "C1": _num(d, "C1"), "C2": _num(d, "C2", 0.0)}
    r = _vec(d, "r")
    w = _vec(d, "w", dim=len(r))
    if len(r) < 4:
        raise DescriptorError("user-table needs at least 4 points")
    if min(r) <= 0 or min(w) <= 0:
        raise DescriptorError("user-table radii and values must be positive")
    return {"type": t, "r": r, "w": w}


def norm_fiber(d) -> dict:
    if not isinstance(d, dict):
        raise DescriptorError("fiber must be an object")
    t = _type(d, FIBER_TYPES)
    default_dim = 1 if t == "circle" else 2
    return {"type": t, "dim": _int(d, "dim", default_dim, lo=1)}


def norm_potential(d) -> dict:
    if not isinstance(d, dict):
        raise DescriptorError("potential must be an object")
    t = _type(d, POTENTIAL_TYPES)
    if t in ("quadratic", "lorentz"):
        return {"type": t, "n": _int(d, "n", 2 if t == "quadratic" else 3, lo=2)}
    if t == "product2d":
        out = {"type": t}
        if "factors" in d:
            out["factors"] = [_norm_terms(f, 2) for f in d["factors"]]
        if "probe" in d:
            out["probe"] = _vec(d, "probe")
        return out
    if t == "maschke":
        return {"type": t}
    nv = _int(d, "nvars", lo=1)
    out = {"type": t, "nvars": nv, "terms": _norm_terms(d.get("terms"), nv), "probe": _vec(d, "probe", dim=nv)}
    if "alpha" in d:
        out["alpha"] = _num(d, "alpha")
    out["name"] = str(d.get("name", "user"))
    return out


def _norm_terms(terms, nvars):
    if not isinstance(terms, list) or not terms:
        raise DescriptorError("terms must be a nonempty list of [coef, exponents]")
    out = []
    for t in terms:
        try:
            c, e = t
            e = [int(x) for x in e]
            c = float(c)
        except (TypeError, ValueError):
            raise DescriptorError(f"bad polynomial term {t!r}") from None
        if len(e) != nvars or min(e) < 0:
            raise DescriptorError(f"exponents {e} do not match nvars={nvars}")
        out.append([c, e])
    return out


def _norm_init(d) -> dict:
    y0 = _vec(d, "y0")
    return {
        "r0": _num(d, "r0", positive=True),
        "y0": y0,
        "rdot0": _num(d, "rdot0"),
        "ydot0": _vec(d, "ydot0", dim=len(y0)),
    }


def normalize(d) -> dict:
    if not isinstance(d, dict):
        raise DescriptorError("descriptor must be a JSON object")
    kind = d.get("kind")
    if kind not in KINDS:
        raise DescriptorError(f"kind must be one of {KINDS}, got {kind!r}")
    out = {"kind": kind}
    if "name" in d:
        out["name"] = str(d["name"])
    if kind == "warped":
        out["k"] = _num(d, "k", nonzero=True)
        out["profile"] = norm_profile(_obj(d, "profile"))
        out["fiber"] = norm_fiber(_obj(d, "fiber"))
        if "C" in d:
            out["C"] = _num(d, "C")
    elif kind == "hessian":
        out["potential"] = norm_potential(_obj(d, "potential"))
    elif kind == "pair":
        out["potential"] = norm_potential(_obj(d, "potential"))
        which = d.get("metric", "g")
        if which not in ("g", "ghat"):
            raise DescriptorError("metric must be 'g' or 'ghat'")
        out["metric"] = which
        out["v"] = norm_profile(d["v"]) if "v" in d else {"type": "constant", "value": 1.0}
        out["l"] = _num(d, "l", 1.0, positive=True)
    elif kind == "profile":
        mode = d.get("mode", "k")
        if mode not in ("k", "v", "ebin"):
            raise DescriptorError("mode must be 'k', 'v' or 'ebin'")
        out["mode"] = mode
        if mode == "ebin":
            out["n"] = _int(d, "n", lo=1)
            if "p" in d and "profile" in d:
                raise DescriptorError("give either p or profile for ebin mode")
            if "profile" in d:
                out["profile"] = norm_profile(_obj(d, "profile"))
            else:
                out["p"] = _num(d, "p")
        else:
            out["profile"] = norm_profile(_obj(d, "profile"))
            out["k"] = _num(d, "k", 1.0, positive=True)
            out["R0"] = _num(d, "R0", 1.0, positive=True)
            if mode == "v":
                out["alpha"] = _num(d, "alpha", 1.0)
    else:
        out["t_end"] = _num(d, "t_end", positive=True)
        out["n_samples"] = _int(d, "n_samples", 101, lo=2)
        if "pair" in d:
            out["pair"] = norm_potential(_obj(d, "pair"))
            out["beta"] = _num(d, "beta")
            out["x0"] = _vec(d, "x0")
            out["A"] = _vec(d, "A", dim=len(out["x0"]))
        else:
            out["k"] = _num(d, "k", nonzero=True)
            out["C0"] = _num(d, "C0")
            out["fiber"] = norm_fiber(_obj(d, "fiber"))
            out["init"] = _norm_init(_obj(d, "init"))
            if len(out["init"]["y0"]) != out["fiber"]["dim"]:
                raise DescriptorError("init.y0 must match the fiber dimension")
    return out


@dataclass(frozen=True)
class Descriptor:
    spec: dict

    @property
    def kind(self) -> str:
        return self.spec["kind"]

    def to_json(self) -> str:
        return serialize(self)


def parse(source) -> Descriptor:
    """Parse a dict or JSON text; other strings and paths name a JSON file."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            source = Path(source).read_text()
        except OSError as e:
            raise DescriptorError(f"cannot read descriptor: {e}") from None
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as e:
            raise DescriptorError(f"invalid JSON: {e}") from None
    return Descriptor(normalize(source))


def serialize(desc: Descriptor) -> str:
    return json.dumps(desc.spec, indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# builders


def build_profile(d: dict) -> RadialProfile:
    d = norm_profile(d)
    t = d["type"]
    if t == "power":
        return power(d["p"], d["coef"])
    if t == "constant":
        return constant(d["value"])
    if t == "csc":
        return _csc.solve_csc_profile(d["k"], d["C"], d["C1"], d["C2"], d["branch_sign"])
    if t in ("cosh", "sine"):
        p = _csc.CscParams(d["s"], d["C1"], d["C2"])
        reg = _csc.regime_of(p)
        want = _csc.Regime.DELTA1 if t == "cosh" else _csc.Regime.DELTA3
        if reg is not want:
            from .errors import InvalidRegime

            raise InvalidRegime(f"invalid regime for a {t} profile: (s, C1) = ({d['s']}, {d['C1']})")
        return _csc.csc_profile(p)
    return from_table(d["r"], d["w"])


def build_fiber(d: dict):
    d = norm_fiber(d)
    return _fibers.by_name(d["type"], d["dim"])


def build_potential(d: dict):
    d = norm_potential(d)
    t = d["type"]
    if t == "quadratic":
        return _pairs.quadratic(d["n"])
    if t == "lorentz":
        return _pairs.lorentz_quadratic(d["n"])
    if t == "product2d":
        facs = d.get("factors", _pairs.DEFAULT_2D_FACTORS)
        return _pairs.product2d([[(c, tuple(e)) for c, e in f] for f in facs], d.get("probe"))
    if t == "maschke":
        return _pairs.maschke()
    return _pairs.user_polynomial([(c, tuple(e)) for c, e in d["terms"]], d["nvars"], d["probe"], d.get("alpha"), d["name"])


def build_warped(d: dict) -> WarpedMetric:
    return WarpedMetric(d["k"], build_profile(d["profile"]), build_fiber(d["fiber"]))


def build_hessian(d: dict):
    """(pair_g, pair_ghat) for the potential."""
    return _pairs.hessian_cone_pair(build_potential(d["potential"]))


def build_pair(d: dict):
    """(HomogeneousPair, v, l) for a pair descriptor."""
    P, Q = build_hessian(d)
    return (P if d["metric"] == "g" else Q), build_profile(d["v"]), d["l"]


def build(desc: Descriptor):
    s = desc.spec
    k = s["kind"]
    if k == "warped":
        return build_warped(s)
    if k == "hessian":
        return build_hessian(s)
    if k == "pair":
        return build_pair(s)
    if k == "profile":
        return build_profile(s["profile"]) if "profile" in s else power(-s["p"])
    if s.get("pair") is not None:
        return _pairs.hessian_cone_pair(build_potential(s["pair"]))[0]
    return build_fiber(s["fiber"])


def load_dir(path) -> dict:
    """Parse every *.json under ``path``; returns {filename: Descriptor}."""
    return {p.name: parse(p) for p in sorted(Path(path).glob("*.json"))}
