"""Points, complex distance and geodesics of the spaces E_n and PE_n.

A point of ``E_n`` is a positive definite real symmetric matrix; a point of
``PE_n`` is such a matrix up to a positive factor, stored with determinant 1.
Geodesics are kept in frame-plus-exponents form
``gamma(t) = g diag(exp(values * t)) g^T`` where the diagonal is expanded
from a block structure of strictly decreasing values.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import CoincidentPoints, DimensionMismatch, InputError

MODELS = ("E", "PE")
EQ_TOL = 1e-9
BLOCK_TOL = 1e-9
# |psi| below this is round-off of a unit root and is reported as 0.
ROUNDOFF = 1e-13


def _check_model(model):
    if model not in MODELS:
        raise InputError(f"model must be one of {MODELS}, got {model!r}")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SPDMatrix:
    """Validated positive definite matrix; PE values are determinant-normalized."""

    entries: np.ndarray
    model: str = "E"

    @property
    def n(self):
        return self.entries.shape[0]

    def equals(self, other, tol=EQ_TOL):
        if not isinstance(other, SPDMatrix) or other.n != self.n or other.model != self.model:
            return False
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        return bool(np.max(np.abs(self.entries - other.entries)) <= tol * scale)

    def __eq__(self, other):
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"SPDMatrix(model={self.model!r}, entries={self.entries.tolist()!r})"


def make_spd(matrix, model="E"):
    """Validate a symmetric positive definite matrix.

    Raises NotSymmetric or NotPositiveDefinite.  In the PE model the result is
    rescaled to determinant 1.
    """
    _check_model(model)
    m = np.array(matrix, dtype=float)
    linalg.check_symmetric(m)
    m = linalg.symmetrize(m)
    low = linalg.cholesky_lower(m)
    if model == "PE":
        logdet = 2.0 * np.sum(np.log(np.diag(low)))
        m = m * np.exp(-logdet / m.shape[0])
    return SPDMatrix(_frozen(m), model)


def _spd_by_construction(m, model):
    """Wrap ``g D g^T`` without the pivot test, which rejects valid far-out points."""
    m = linalg.symmetrize(m)
    if model == "PE":
        _, logdet = np.linalg.slogdet(m)
        m = m * np.exp(-logdet / m.shape[0])
    return SPDMatrix(_frozen(m), model)


def _same_space(x, y):
    if x.n != y.n:
        raise DimensionMismatch(f"dimensions differ: {x.n} vs {y.n}")
    if x.model != y.model:
        raise DimensionMismatch(f"models differ: {x.model} vs {y.model}")


@dataclass(frozen=True, eq=False)
class ComplexDistance:
    psis: np.ndarray

    @property
    def n(self):
        return len(self.psis)

    def __repr__(self):
        return f"ComplexDistance({self.psis.tolist()!r})"


def _as_psis(v):
    if isinstance(v, ComplexDistance):
        return np.asarray(v.psis, dtype=float)
    return np.asarray(v, dtype=float)


def complex_distance(x, y):
    """Sorted logarithms of the roots of ``det(X - lam Y) = 0``.

    In the PE model the representative with zero sum is returned.
    """
    _same_space(x, y)
    lam, _ = linalg.pencil_eig(x.entries, y.entries)
    psis = np.log(lam)
    if x.model == "PE":
        psis = psis - psis.mean()
    psis = np.where(np.abs(psis) < ROUNDOFF, 0.0, psis)
    return ComplexDistance(_frozen(psis))


def riemannian_distance(x, y):
    return float(np.sqrt(np.sum(complex_distance(x, y).psis ** 2)))


def triangle_membership(theta, psi, phi, tol=1e-9):
    """Decide whether ``theta - psi`` lies in the permutohedron of ``phi``.

    Uses majorization: equal totals and every partial sum of the ``k``
    largest entries of ``theta - psi`` bounded by that of ``phi``.
    """
    theta, psi, phi = _as_psis(theta), _as_psis(psi), _as_psis(phi)
    if not (len(theta) == len(psi) == len(phi)):
        raise DimensionMismatch("complex distances must have equal length")
    diff = np.sort(theta - psi)[::-1]
    ref = np.sort(phi)[::-1]
    scale = max(1.0, float(np.max(np.abs(diff), initial=0.0)), float(np.max(np.abs(ref), initial=0.0)))
    slack = tol * scale * max(len(ref), 1)
    if abs(diff.sum() - ref.sum()) > slack:
        return False
    return bool(np.all(np.cumsum(diff) <= np.cumsum(ref) + slack))


@dataclass(frozen=True)
class Velocity:
    """Block velocity: ``values[k]`` repeated ``block_sizes[k]`` times.

    Values are stored literally (they fix a parametrization); ``canonical``
    returns the representative used for comparisons: norm 1 of the expanded
    vector in E, zero sum then norm 1 in PE.
    """

    block_sizes: tuple
    values: tuple
    model: str = "E"

    def __post_init__(self):
        _check_model(self.model)
        sizes = tuple(int(a) for a in self.block_sizes)
        values = tuple(float(v) for v in self.values)
        if len(sizes) != len(values) or not sizes or any(a <= 0 for a in sizes):
            raise InputError("block sizes and values must be nonempty and aligned")
        if any(values[i] <= values[i + 1] for i in range(len(values) - 1)):
            raise InputError("velocity values must be strictly decreasing")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return sum(self.block_sizes)

    @property
    def m(self):
        return len(self.block_sizes)

    def expanded(self):
        return np.repeat(np.array(self.values), self.block_sizes)

    def partial_sums(self):
        """Codimensions ``i_1 < ... < i_{m-1}`` (the last partial sum n dropped)."""
        return tuple(int(s) for s in np.cumsum(self.block_sizes)[:-1])

    def is_degenerate(self):
        if self.model == "PE":
            return self.m == 1
        return self.m == 1 and self.values[0] == 0.0

    def canonical(self):
        if self.is_degenerate():
            raise CoincidentPoints("zero velocity has no canonical direction")
        vals = np.array(self.values)
        if self.model == "PE":
            vals = vals - np.dot(vals, self.block_sizes) / self.n
        norm = np.sqrt(np.dot(vals ** 2, self.block_sizes))
        return Velocity(self.block_sizes, tuple(vals / norm), self.model)

    def same_as(self, other, tol=1e-9):
        if self.block_sizes != other.block_sizes or self.model != other.model:
            return False
        a, b = self.canonical(), other.canonical()
        return bool(np.max(np.abs(np.subtract(a.values, b.values))) <= tol)

    @classmethod
    def from_expanded(cls, vec, model="E", tol=BLOCK_TOL):
        """Group a non-increasing vector into blocks of (near) equal values."""
        vec = np.asarray(vec, dtype=float)
        if np.any(np.diff(vec) > tol * max(1.0, float(np.max(np.abs(vec))))):
            raise InputError("expanded velocity must be non-increasing")
        scale = max(1.0, float(np.max(np.abs(vec), initial=0.0)))
        groups = [[vec[0]]]
        for v in vec[1:]:
            if abs(groups[-1][0] - v) <= tol * scale:
                groups[-1].append(v)
            else:
                groups.append([v])
        return cls(tuple(len(g) for g in groups), tuple(float(np.mean(g)) for g in groups), model)


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Directed geodesic ``t -> frame diag(exp(expanded * t)) frame^T``."""

    frame: np.ndarray
    velocity: Velocity

    def __post_init__(self):
        frame = _frozen(self.frame)
        n = self.velocity.n
        if frame.shape != (n, n):
            raise DimensionMismatch(f"frame shape {frame.shape} does not match velocity size {n}")
        if not np.isfinite(np.linalg.cond(frame)):
            raise InputError("frame must be invertible")
        if self.velocity.is_degenerate():
            raise CoincidentPoints("zero velocity is not a directed geodesic")
        object.__setattr__(self, "frame", frame)

    @property
    def n(self):
        return self.velocity.n

    @property
    def model(self):
        return self.velocity.model

    def block_columns(self):
        """Frame columns split by velocity block."""
        edges = np.concatenate([[0], np.cumsum(self.velocity.block_sizes)])
        return [self.frame[:, edges[k]:edges[k + 1]] for k in range(self.velocity.m)]

    def shifted(self, s):
        """Same geodesic with origin moved to parameter ``s``."""
        scale = np.exp(0.5 * self.velocity.expanded() * s)
        return Geodesic(self.frame * scale[None, :], self.velocity)

    def conjugated(self, h):
        """The geodesic ``t -> h gamma(t) h^T``."""
        return Geodesic(np.asarray(h, dtype=float) @ self.frame, self.velocity)

    def __repr__(self):
        return f"Geodesic(velocity={self.velocity!r}, frame={self.frame.tolist()!r})"


def make_geodesic(frame, block_sizes, values, model="E"):
    return Geodesic(np.asarray(frame, dtype=float), Velocity(tuple(block_sizes), tuple(values), model))


def geodesic_eval(gamma, t):
    scale = np.exp(gamma.velocity.expanded() * t)
    m = (gamma.frame * scale[None, :]) @ gamma.frame.T
    return _spd_by_construction(m, gamma.model)


def geodesic_through(x, y):
    """Geodesic with ``gamma(0) = X`` and ``gamma(1) = Y``.

    The frame comes from simultaneous congruence reduction of the pair:
    ``X = g g^T`` and ``Y = g diag(lam) g^T``; the literal velocity is
    ``log(lam)``, i.e. ``complex_distance(Y, X)``.
    """
    _same_space(x, y)
    lam, g = linalg.pencil_eig(y.entries, x.entries)
    psis = np.log(lam)
    if x.model == "PE":
        psis = psis - psis.mean()
    velocity = Velocity.from_expanded(psis, x.model)
    if velocity.is_degenerate():
        raise CoincidentPoints("X and Y coincide")
    return Geodesic(g, velocity)


@dataclass(frozen=True, eq=False)
class CartanFrame:
    frame: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frame", _frozen(self.frame))

    def point(self, t, model="E"):
        """The flat point ``L(t_1, ..., t_n)``."""
        scale = np.exp(np.asarray(t, dtype=float))
        _check_model(model)
        return _spd_by_construction((self.frame * scale[None, :]) @ self.frame.T, model)


def cartan_contains(frame, x, tol=1e-9):
    """True iff ``g^{-1} X g^{-T}`` is diagonal (relative tolerance ``tol``)."""
    g = frame.frame if isinstance(frame, CartanFrame) else np.asarray(frame, dtype=float)
    if g.shape[0] != x.n:
        raise DimensionMismatch("frame and matrix dimensions differ")
    half = np.linalg.solve(g, x.entries)
    m = np.linalg.solve(g, half.T)
    d = np.diag(m)
    if np.any(d <= 0):
        return False
    bound = tol * np.sqrt(np.outer(d, d))
    off = np.abs(m - np.diag(d))
    return bool(np.all(off <= bound + 0.0))
