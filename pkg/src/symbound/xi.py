"""Exact limits in the spaces of vectors modulo constants, and boundary points.

``Xi(I)`` is the space of real vectors indexed by ``I`` modulo adding a
constant; its rays are taken modulo constants and positive scaling.  For a
vector whose coordinates are polynomials in the sequence index the limit is
decided exactly from leading coefficients.

Canonical representatives: a point is shifted so its smallest coordinate is
0; a ray is shifted the same way and then scaled by a positive factor to
coprime integers.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import linalg
from .errors import IncompatibleFrame, InputError, NotSorted
from .growth import GrowthVector, poly_coeff, poly_degree, poly_sub
from .polytopes import LeveledTreePartition, TreePartition, karp_to_pass, leveled, make_partition
from .satake import LITERAL, SatakePoint, SubquotientForm, geodesic_satake_limit, interior_point
from .spd import Velocity


def _shift_min(values):
    values = [Fraction(v) for v in values]
    low = min(values)
    return tuple(v - low for v in values)


def _primitive(values):
    """Positive multiple of a nonnegative rational vector with coprime integer entries."""
    values = [Fraction(v) for v in values]
    den = lcm(*(v.denominator for v in values))
    ints = [int(v * den) for v in values]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(Fraction(0) for _ in ints)
    return tuple(Fraction(x // g) for x in ints)


@dataclass(frozen=True)
class XiPoint:
    labels: tuple
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "coords", _shift_min(self.coords))

    kind = "point"


@dataclass(frozen=True)
class XiRay:
    labels: tuple
    coords: tuple

    def __post_init__(self):
        coords = _primitive(_shift_min(self.coords))
        if all(c == 0 for c in coords):
            raise InputError("a ray direction cannot be constant")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "coords", coords)

    kind = "ray"


def _differences(polys):
    base = polys[0]
    return [poly_sub(p, base) for p in polys]


def xi_limit(v):
    """Limit of a polynomial sequence in ``Xi(I)``: a point or a ray at infinity."""
    if v.n < 1:
        raise InputError("growth vector must be nonempty")
    diffs = _differences(v.coords)
    top = max(poly_degree(d) for d in diffs)
    if top <= 0:
        return XiPoint(v.labels, tuple(poly_coeff(d, 0) for d in diffs))
    return XiRay(v.labels, tuple(poly_coeff(d, top) for d in diffs))


def _classes(labels, coords):
    groups = {}
    for lab, c in zip(labels, coords):
        groups.setdefault(c, []).append(lab)
    return [tuple(g) for g in groups.values()]


@dataclass(frozen=True)
class PassLimit:
    """Tree-partition with one point (irreducible set) or ray (reducible set) per node."""

    tree: TreePartition
    data: tuple

    def node(self, s):
        return dict(self.data)[tuple(s)]


def pass_limit(v):
    """Limit of a polynomial growth vector in the tree-partition stratification.

    The ray of the full set splits it into classes of equal leading
    coefficient; each class is then treated recursively on its own.
    """
    data = []

    def visit(w):
        lim = xi_limit(w)
        data.append((tuple(sorted(w.labels)), lim))
        if isinstance(lim, XiRay):
            for cls in _classes(lim.labels, lim.coords):
                visit(w.restrict(cls))

    labels = tuple(range(1, v.n + 1))
    visit(GrowthVector(v.coords, labels))
    tree = TreePartition(v.n, tuple(s for s, _ in data))
    order = {s: i for i, s in enumerate(tree.sets)}
    return PassLimit(tree, tuple(sorted(data, key=lambda item: order[item[0]])))


@dataclass(frozen=True)
class KarpLimit:
    """Leveled tree-partition with one joint ray per level and per-block final points."""

    leveled: LeveledTreePartition
    rays: tuple
    points: tuple


def _joint_ray(blocks, per_block):
    shifted = [_shift_min(vals) for vals in per_block]
    flat = _primitive([x for vals in shifted for x in vals])
    out, pos = [], 0
    for blk in blocks:
        out.append((blk, flat[pos:pos + len(blk)]))
        pos += len(blk)
    return tuple(out)


def karp_limit(v):
    """Limit of a polynomial growth vector in the leveled stratification.

    At every level the blocks whose internal spread has the globally largest
    degree are split by their leading coefficients at that degree; the
    resulting ray is recorded jointly over all blocks (per-block shifts, one
    common positive factor).  When every block has constant internal
    differences the per-block points are recorded and the process stops.
    """
    n = v.n
    where = {lab: i for i, lab in enumerate(range(1, n + 1))}
    part = (tuple(range(1, n + 1)),)
    levels = [part]
    rays = []
    while True:
        diffs = [_differences([v.coords[where[i]] for i in blk]) for blk in part]
        degs = [max(poly_degree(d) for d in ds) for ds in diffs]
        top = max(degs)
        if top <= 0:
            points = tuple((blk, XiPoint(blk, tuple(poly_coeff(d, 0) for d in ds)).coords)
                           for blk, ds in zip(part, diffs))
            return KarpLimit(LeveledTreePartition(n, tuple(levels)), tuple(rays), points)
        lead = [tuple(poly_coeff(d, top) for d in ds) for ds in diffs]
        rays.append(_joint_ray(part, lead))
        new_blocks = []
        for blk, mu in zip(part, lead):
            new_blocks.extend(_classes(blk, mu))
        part = make_partition(new_blocks, n)
        levels.append(part)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """Hybrid boundary point: combinatorial index, chamber data and Satake part.

    ``index`` is ``None`` for interior points.  ``chamber`` holds the
    velocity ray (or exact limit data) and ``psi``, the per-block
    log-semiaxis values matched by the Literal forms of ``satake``.
    """

    kind: str
    index: object
    chamber: dict
    satake: SatakePoint

    @property
    def is_interior(self):
        return self.index is None


BOUNDARY_KINDS = ("Ass", "Karp", "Martin")


def _check_kind(kind):
    if kind not in BOUNDARY_KINDS:
        raise InputError(f"kind must be one of {BOUNDARY_KINDS}")


def _segments(sizes):
    out, start = [], 1
    for a in sizes:
        out.append(tuple(range(start, start + a)))
        start += a
    return out


def _det_one(m):
    m = np.asarray(m, dtype=float)
    _, logdet = np.linalg.slogdet(m)
    return m * np.exp(-logdet / m.shape[0])


def geodesic_boundary_point(gamma, kind):
    """Boundary point reached by a geodesic, read in the projective model."""
    _check_kind(kind)
    vel = Velocity(gamma.velocity.block_sizes, gamma.velocity.values, "PE")
    n = gamma.n
    if vel.m == 1:
        return BoundaryPoint(kind, None, {}, interior_point(gamma.frame @ gamma.frame.T))
    limit = geodesic_satake_limit(gamma)
    ray = [float(x) for x in vel.canonical().expanded()]
    segs = _segments(vel.block_sizes)
    if kind == "Martin":
        return BoundaryPoint(kind, vel.partial_sums(), {"ray": ray}, limit)
    forms = [SubquotientForm(_det_one(f.matrix), LITERAL) for f in limit.forms]
    psi = [sorted((float(x) for x in np.log(np.linalg.eigvalsh(f.matrix))), reverse=True) for f in forms]
    karp_index = leveled(n, [make_partition(segs, n)])
    index = karp_index if kind == "Karp" else karp_to_pass(karp_index)
    return BoundaryPoint(kind, index, {"ray": ray, "psi": psi}, SatakePoint(limit.flag, tuple(forms)))


def check_sorted(eigen):
    """Raise NotSorted unless the coordinates are eventually non-increasing."""
    for i, (a, b) in enumerate(zip(eigen.coords, eigen.coords[1:])):
        d = poly_sub(a, b)
        if d and d[-1] < 0:
            raise NotSorted(f"coordinate {i + 2} eventually exceeds coordinate {i + 1}")


def _boundaries(part):
    return tuple(int(x) for x in np.cumsum([len(b) for b in part])[:-1])


def _retarget_forms(frame_limit, psi_blocks):
    forms = []
    for f, psi in zip(frame_limit.forms, psi_blocks):
        vals, vecs = linalg.jacobi_eigh(f.matrix)
        target = np.exp(np.sort(np.asarray(psi, dtype=float))[::-1])
        forms.append(SubquotientForm(linalg.symmetrize(vecs @ np.diag(target) @ vecs.T), LITERAL))
    return SatakePoint(frame_limit.flag, tuple(forms))


def pass_json(lim):
    return [{"set": list(s), d.kind: [str(x) for x in d.coords]} for s, d in lim.data]


def karp_json(lim):
    data = []
    for j, ray in enumerate(lim.rays):
        data.append({"level": j, "ray": [{"set": list(b), "ray": [str(x) for x in vals]} for b, vals in ray]})
    data.append({"level": len(lim.rays), "point": [{"set": list(b), "point": [str(x) for x in vals]}
                                                    for b, vals in lim.points]})
    return data


def sequence_boundary_point(eigen, frame_limit, kind):
    """Boundary point of a sequence given its log-eigenvalue growth and frame limit.

    The combinatorial index comes from the exact limit of ``eigen``.  The
    frame limit must have its flag cut at the boundaries of the final blocks
    (the first-level blocks for ``Martin``); its form eigenvectors are kept
    and the eigenvalues replaced by ``exp(psi)`` with ``psi`` the final point
    data in the zero-sum gauge.
    """
    _check_kind(kind)
    check_sorted(eigen)
    n = eigen.n
    if frame_limit.n != n:
        raise IncompatibleFrame("frame limit has the wrong dimension")
    klim = karp_limit(eigen)
    if klim.leveled.tau == 0:
        if not frame_limit.is_interior():
            raise IncompatibleFrame("an interior limit needs an interior frame point")
        return BoundaryPoint(kind, None, {}, frame_limit)
    final = klim.leveled.levels[-1]
    if kind == "Martin":
        first = klim.leveled.levels[1]
        if frame_limit.codims != _boundaries(first):
            raise IncompatibleFrame(f"frame codimensions {frame_limit.codims} differ from {_boundaries(first)}")
        ray = [float(x) for b, vals in klim.rays[0] for x in vals]
        return BoundaryPoint(kind, _boundaries(first), {"ray": ray}, frame_limit.with_mode("upToScale"))
    if frame_limit.codims != _boundaries(final):
        raise IncompatibleFrame(f"frame codimensions {frame_limit.codims} differ from {_boundaries(final)}")
    psi = []
    for blk, vals in klim.points:
        arr = np.array([float(x) for x in vals])
        psi.append(sorted((arr - arr.mean()).tolist(), reverse=True))
    satake = _retarget_forms(frame_limit, psi)
    if kind == "Karp":
        return BoundaryPoint(kind, klim.leveled, {"limit": karp_json(klim), "psi": psi}, satake)
    plim = pass_limit(eigen)
    return BoundaryPoint(kind, plim.tree, {"limit": pass_json(plim), "psi": psi}, satake)
