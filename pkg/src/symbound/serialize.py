"""JSON readers and writers for every object the command line exchanges.

Floats are written with 12 significant digits and rationals as ``"p/q"``
strings, so identical inputs give identical bytes.  Every writer has a
reader that accepts its output unchanged.
"""

import json
from fractions import Fraction

import numpy as np

from .errors import InputError
from .growth import poly_str
from .laurent import _rat_str
from .pencils import FinitePencilData, NullPencilData, SolvablePencilData
from .polytopes import FaceLattice, LeveledTreePartition, Stratum, TreePartition
from .satake import Flag, SatakePoint, SubquotientForm
from .spd import ComplexDistance, Geodesic, Velocity, make_spd
from .xi import BoundaryPoint, KarpLimit, PassLimit, XiPoint, XiRay, karp_json, pass_json

SIG_DIGITS = 12


def fmt_float(x):
    """Round to 12 significant digits; ``-0.0`` becomes ``0.0``."""
    y = float(f"{float(x):.{SIG_DIGITS}g}")
    return 0.0 if y == 0 else y


def rat(x):
    return _rat_str(Fraction(x))


def parse_rat(s):
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {s!r}") from exc


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, Fraction):
        return rat(obj)
    return obj


def dumps(obj, pretty=False):
    """Deterministic JSON text for a tree of plain values."""
    return json.dumps(_clean(obj), indent=2 if pretty else None, sort_keys=False)


# matrices and geodesics

def matrix_to_json(m):
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def matrix_from_json(obj):
    if isinstance(obj, dict):
        for key in ("rows", "entries", "matrix"):
            if key in obj:
                obj = obj[key]
                break
        else:
            raise InputError("matrix JSON needs a rows field")
    try:
        m = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError("matrix must be a list of numeric rows") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError("matrix must be square")
    return m


def spd_to_json(x):
    return {"n": x.n, "model": x.model, "rows": matrix_to_json(x.entries)}


def spd_from_json(obj, model=None):
    if isinstance(obj, dict) and model is None:
        model = obj.get("model", "E")
    return make_spd(matrix_from_json(obj), model or "E")


def distance_to_json(d):
    return {"psis": [float(p) for p in d.psis], "rho": float(np.sqrt(np.sum(np.square(d.psis))))}


def distance_from_json(obj):
    return ComplexDistance(tuple(float(p) for p in obj["psis"]))


def velocity_to_json(v):
    return {"blocks": list(v.block_sizes), "values": [float(x) for x in v.values], "model": v.model}


def velocity_from_json(obj):
    return Velocity(tuple(int(a) for a in obj["blocks"]), tuple(float(x) for x in obj["values"]),
                    obj.get("model", "E"))


def geodesic_to_json(g):
    v = g.velocity
    return {"frame": matrix_to_json(g.frame), "blocks": list(v.block_sizes), "values": [float(x) for x in v.values],
            "model": v.model}


def geodesic_from_json(obj):
    try:
        vel = Velocity(tuple(int(a) for a in obj["blocks"]), tuple(float(x) for x in obj["values"]),
                       obj.get("model", "E"))
        return Geodesic(matrix_from_json(obj["frame"]), vel)
    except KeyError as exc:
        raise InputError(f"geodesic JSON lacks {exc}") from None


# Satake data

def flag_to_json(f):
    return {"n": f.n, "codims": list(f.codims), "basis": matrix_to_json(f.basis)}


def flag_from_json(obj):
    return Flag(int(obj["n"]), tuple(obj["codims"]), np.array(obj["basis"], dtype=float))


def satake_to_json(p):
    return {"n": p.n, "codims": list(p.codims), "basis": matrix_to_json(p.flag.basis),
            "forms": [{"dim": f.dim, "matrix": matrix_to_json(f.matrix), "scale": f.mode} for f in p.forms]}


def satake_from_json(obj):
    forms = tuple(SubquotientForm(matrix_from_json(f["matrix"]), f.get("scale", "upToScale")) for f in obj["forms"])
    return SatakePoint(flag_from_json(obj), forms)


def pencil_to_json(data):
    vel = velocity_to_json(data.velocity)
    if isinstance(data, FinitePencilData):
        return {"kind": "finite", "velocity": vel, **flag_to_json(data.flag)}
    if isinstance(data, SolvablePencilData):
        return {"kind": "solvable", "velocity": vel, **satake_to_json(data.satake)}
    if isinstance(data, NullPencilData):
        point = satake_to_json(SatakePoint(data.flag, data.forms))
        return {"kind": "null", "velocity": vel, **point, "formsMode": "literal"}
    raise TypeError(f"not pencil data: {type(data).__name__}")


def pencil_from_json(obj):
    kind = obj.get("kind")
    vel = velocity_from_json(obj["velocity"])
    if kind == "finite":
        return FinitePencilData(vel, flag_from_json(obj))
    if kind == "solvable":
        return SolvablePencilData(vel, satake_from_json(obj))
    if kind == "null":
        point = satake_from_json(obj)
        return NullPencilData(vel, point.flag, point.forms)
    raise InputError(f"unknown pencil kind {kind!r}")


# combinatorics

def index_to_json(a):
    if isinstance(a, TreePartition):
        return {"n": a.n, "tree": a.to_json()}
    if isinstance(a, LeveledTreePartition):
        return {"n": a.n, "levels": a.to_json()}
    return {"codims": list(a)}


def index_from_json(obj):
    if "tree" in obj:
        return TreePartition(int(obj["n"]), tuple(tuple(s) for s in obj["tree"]))
    if "levels" in obj:
        return LeveledTreePartition(int(obj["n"]), tuple(tuple(tuple(b) for b in p) for p in obj["levels"]))
    return tuple(obj["codims"])


def stratum_to_json(s):
    return {"kind": s.kind, "dim": s.dim, "components": s.components, "index": index_to_json(s.index),
            "label": s.label()}


def stratum_from_json(obj):
    return Stratum(index_from_json(obj["index"]), obj["kind"], int(obj["dim"]), int(obj["components"]))


def lattice_from_json(obj):
    n = int(obj["n"])
    nodes = []
    for node in obj["nodes"]:
        idx = node["index"]
        key = {"n": n, "levels" if obj["kind"] == "Karp" else "tree": idx}
        nodes.append(Stratum(index_from_json(key), node.get("kind", obj["kind"]), int(node["dim"]),
                             int(node["components"])))
    return FaceLattice(n, obj["kind"], tuple(nodes), tuple(tuple(c) for c in obj["covers"]),
                       tuple(obj["top"]), tuple(obj["bottom"]))


# exact limits in Xi

def xi_to_json(lim):
    return {"labels": list(lim.labels), lim.kind: [rat(x) for x in lim.coords]}


def xi_from_json(obj):
    if "ray" in obj:
        return XiRay(tuple(obj["labels"]), tuple(parse_rat(x) for x in obj["ray"]))
    return XiPoint(tuple(obj["labels"]), tuple(parse_rat(x) for x in obj["point"]))


def pass_limit_to_json(lim):
    return {"kind": "pass", "n": lim.tree.n, "tree": lim.tree.to_json(), "data": pass_json(lim)}


def karp_limit_to_json(lim):
    return {"kind": "karp", "n": lim.leveled.n, "levels": lim.leveled.to_json(), "data": karp_json(lim)}


def pass_limit_from_json(obj):
    n = int(obj["n"])
    tree = TreePartition(n, tuple(tuple(s) for s in obj["tree"]))
    data = []
    for item in obj["data"]:
        s = tuple(item["set"])
        if "ray" in item:
            data.append((s, XiRay(s, tuple(parse_rat(x) for x in item["ray"]))))
        else:
            data.append((s, XiPoint(s, tuple(parse_rat(x) for x in item["point"]))))
    return PassLimit(tree, tuple(data))


def karp_limit_from_json(obj):
    n = int(obj["n"])
    lev = LeveledTreePartition(n, tuple(tuple(tuple(b) for b in p) for p in obj["levels"]))
    rays, points = [], ()
    for item in obj["data"]:
        if "ray" in item:
            rays.append(tuple((tuple(r["set"]), tuple(parse_rat(x) for x in r["ray"])) for r in item["ray"]))
        else:
            points = tuple((tuple(r["set"]), tuple(parse_rat(x) for x in r["point"])) for r in item["point"])
    return KarpLimit(lev, tuple(rays), points)


def growth_to_json(v):
    return [poly_str(p) for p in v.coords]


# boundary points

def boundary_to_json(b):
    return {"kind": b.kind, "interior": b.is_interior,
            "index": None if b.index is None else index_to_json(b.index),
            "chamber": b.chamber, "satake": satake_to_json(b.satake)}


def boundary_from_json(obj):
    idx = obj.get("index")
    return BoundaryPoint(obj["kind"], None if idx is None else index_from_json(idx), dict(obj["chamber"]),
                         satake_from_json(obj["satake"]))


# sea urchin

def _rat_matrix(rows):
    return [[rat(x) for x in r] for r in rows]


def urchin_to_json(lim):
    return {"values": [int(v) for v in lim.values], "blocks": list(lim.block_sizes),
            "subspaces": [_rat_matrix(s) for s in lim.subspaces],
            "forms": [_rat_matrix(f) for f in lim.forms],
            "frame": matrix_to_json(lim.frame())}


def urchin_from_json(obj):
    from .urchin import UrchinLimit

    def mat(rows):
        return tuple(tuple(parse_rat(x) for x in r) for r in rows)

    return UrchinLimit(tuple(int(v) for v in obj["values"]), tuple(int(a) for a in obj["blocks"]),
                       tuple(mat(s) for s in obj["subspaces"]), tuple(mat(f) for f in obj["forms"]),
                       np.array(obj["frame"], dtype=float))


def factorization_to_json(fac):
    return {"exponents": [int(k) for k in fac.exponents], "scales": [rat(c) for c in fac.scales],
            "g": [[s.to_json() for s in row] for row in fac.g]}


def spd_matrix_list(obj):
    """A list of matrices, either bare or under the key ``samples``."""
    if isinstance(obj, dict):
        obj = obj["samples"]
    return [matrix_from_json(m) for m in obj]

