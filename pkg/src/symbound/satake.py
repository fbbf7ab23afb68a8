"""Points of the Satake space of flags with subquotient forms, and their limits.

A point is a flag ``R^n = W_0 > W_1 > ... > W_p > 0`` with prescribed
codimensions together with a positive form on every subquotient
``W_{k-1} / W_k``.  The flag is stored through one orthonormal basis whose
trailing ``n - i_k`` columns span ``W_k``; the form on the ``k``-th subquotient
is expressed in the basis columns ``i_{k-1} .. i_k - 1`` (which span
``W_{k-1}`` intersected with the orthogonal complement of ``W_k``).
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadCodims, DimensionMismatch, NotStabilized
from .spd import SPDMatrix

UP_TO_SCALE = "upToScale"
LITERAL = "literal"
FLAG_TOL = 1e-10
DEFAULT_TOL = 1e-6
DEFAULT_LOG_GAP = float(np.log(10.0))
DEFAULT_TREND = 0.25


def check_codims(n, codims):
    codims = tuple(int(c) for c in codims)
    if any(c < 1 or c > n - 1 for c in codims):
        raise BadCodims(f"codimensions must lie in 1..{n - 1}: {codims}")
    if any(codims[i] >= codims[i + 1] for i in range(len(codims) - 1)):
        raise BadCodims(f"codimensions must be strictly increasing: {codims}")
    return codims


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Flag:
    """Decreasing chain of subspaces, represented by an orthonormal basis."""

    n: int
    codims: tuple
    basis: np.ndarray

    def __post_init__(self):
        codims = check_codims(self.n, self.codims)
        basis = _frozen(self.basis)
        if basis.shape != (self.n, self.n):
            raise DimensionMismatch(f"basis must be {self.n}x{self.n}")
        if np.max(np.abs(basis.T @ basis - np.eye(self.n))) > 1e-8:
            raise DimensionMismatch("flag basis is not orthonormal")
        object.__setattr__(self, "codims", codims)
        object.__setattr__(self, "basis", basis)

    @property
    def edges(self):
        return (0,) + self.codims + (self.n,)

    def subspace(self, k):
        """Orthonormal basis of ``W_k`` for ``k = 0 .. p + 1``."""
        start = self.edges[k]
        return self.basis[:, start:]

    def block(self, k):
        """Columns spanning the ``k``-th subquotient, ``k = 1 .. p + 1``."""
        return self.basis[:, self.edges[k - 1]:self.edges[k]]

    def projectors(self):
        """Orthogonal projectors onto ``W_1, ..., W_p``."""
        return [linalg.projector(self.subspace(k)) for k in range(1, len(self.codims) + 1)]

    def equals(self, other, tol=1e-7):
        if self.n != other.n or self.codims != other.codims:
            return False
        return all(np.max(np.abs(a - b)) <= tol for a, b in zip(self.projectors(), other.projectors()))


def coordinate_flag(n, codims):
    return Flag(n, tuple(codims), np.eye(n))


def flag_from_spans(n, codims, basis):
    """Flag whose ``W_k`` is spanned by the trailing ``n - i_k`` columns of ``basis``.

    ``basis`` need not be orthonormal; it is orthonormalized from the right so
    that every trailing span is preserved.
    """
    rev = np.asarray(basis, dtype=float)[:, ::-1]
    q = linalg.orthonormal_columns(rev)
    return Flag(n, tuple(codims), q[:, ::-1])


@dataclass(frozen=True, eq=False)
class SubquotientForm:
    matrix: np.ndarray
    mode: str = UP_TO_SCALE

    def __post_init__(self):
        m = linalg.symmetrize(self.matrix)
        if self.mode not in (UP_TO_SCALE, LITERAL):
            raise ValueError(f"unknown form mode {self.mode!r}")
        if self.mode == UP_TO_SCALE:
            top = float(np.max(np.linalg.eigvalsh(m)))
            m = m / top
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class SatakePoint:
    flag: Flag
    forms: tuple

    def __post_init__(self):
        forms = tuple(self.forms)
        edges = self.flag.edges
        if len(forms) != len(edges) - 1:
            raise DimensionMismatch("one form per subquotient is required")
        for k, f in enumerate(forms):
            if f.dim != edges[k + 1] - edges[k]:
                raise DimensionMismatch(f"form {k + 1} has dimension {f.dim}, expected {edges[k + 1] - edges[k]}")
        object.__setattr__(self, "forms", forms)

    @property
    def n(self):
        return self.flag.n

    @property
    def codims(self):
        return self.flag.codims

    def is_interior(self):
        return not self.flag.codims

    def embedded_forms(self):
        """Each form pushed to an ``n x n`` matrix through its block columns."""
        out = []
        for k, f in enumerate(self.forms, start=1):
            b = self.flag.block(k)
            out.append(b @ f.matrix @ b.T)
        return out

    def with_mode(self, mode):
        return SatakePoint(self.flag, tuple(SubquotientForm(f.matrix, mode) for f in self.forms))

    def __repr__(self):
        return f"SatakePoint(n={self.n}, codims={self.codims})"


def interior_point(x):
    """Interior point of the Satake space given by one positive matrix."""
    m = x.entries if isinstance(x, SPDMatrix) else np.asarray(x, dtype=float)
    n = m.shape[0]
    return SatakePoint(Flag(n, (), np.eye(n)), (SubquotientForm(m),))


def _normalized_embedded(point):
    out = []
    for e, f in zip(point.embedded_forms(), point.forms):
        if f.mode == UP_TO_SCALE:
            top = float(np.max(np.abs(np.linalg.eigvalsh(e))))
            e = e / top
        out.append(e)
    return out


def satake_point_equal(a, b, tol=1e-7):
    """Equality of flags as projector families and of forms after normalization."""
    if a.n != b.n:
        raise DimensionMismatch(f"dimensions differ: {a.n} vs {b.n}")
    if not a.flag.equals(b.flag, tol):
        return False
    if any(fa.mode != fb.mode for fa, fb in zip(a.forms, b.forms)):
        return False
    for ea, eb in zip(_normalized_embedded(a), _normalized_embedded(b)):
        scale = max(1.0, float(np.max(np.abs(ea))))
        if np.max(np.abs(ea - eb)) > tol * scale:
            return False
    return True


def satake_act(point, g):
    """Image of a point under the action induced by ``X -> g X g^T``."""
    g = np.asarray(g, dtype=float)
    g_inv_t = np.linalg.inv(g).T
    new_flag = flag_from_spans(point.n, point.codims, g_inv_t @ point.flag.basis)
    forms = []
    for k, f in enumerate(point.forms, start=1):
        c = point.flag.block(k).T @ g.T @ new_flag.block(k)
        forms.append(SubquotientForm(c.T @ f.matrix @ c, f.mode))
    return SatakePoint(new_flag, tuple(forms))


def geodesic_satake_limit(gamma):
    """Limit of a geodesic as ``t -> +inf``.

    With the frame factored as ``g = Q R`` (columns ordered by decreasing
    velocity), the limit flag has basis ``Q`` and the form on the ``k``-th
    subquotient is ``R_kk R_kk^T``.
    """
    sizes = gamma.velocity.block_sizes
    n = gamma.n
    if len(sizes) == 1:
        return interior_point(gamma.frame @ gamma.frame.T)
    q, r = np.linalg.qr(gamma.frame)
    flag = Flag(n, gamma.velocity.partial_sums(), q)
    edges = flag.edges
    forms = []
    for k in range(len(sizes)):
        rkk = r[edges[k]:edges[k + 1], edges[k]:edges[k + 1]]
        forms.append(SubquotientForm(rkk @ rkk.T))
    return SatakePoint(flag, tuple(forms))


def _entries(samples):
    mats = [s.entries if isinstance(s, SPDMatrix) else np.asarray(s, dtype=float) for s in samples]
    if len(mats) < 3:
        raise NotStabilized("at least three samples are required")
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise DimensionMismatch("samples must share one dimension")
    return mats


def _normalize_top(m):
    top = float(np.max(np.linalg.eigvalsh(m)))
    return m / top


def _check_tail(mats, tol, what):
    tail = mats[-3:]
    for i in range(3):
        for j in range(i + 1, 3):
            if np.max(np.abs(tail[i] - tail[j])) > tol:
                raise NotStabilized(f"{what}: tail samples differ by more than {tol:g}")


def _inductive(mats, basis, tol):
    mats = [_normalize_top(m) for m in mats]
    _check_tail(mats, tol, "normalized samples")
    vals, vecs = linalg.jacobi_eigh(mats[-1])
    rank = int(np.sum(vals >= tol))
    if rank == len(vals):
        return [(basis, mats[-1])]
    head = vecs[:, :rank]
    kern = vecs[:, rank:]
    restricted = [kern.T @ m @ kern for m in mats]
    return [(basis @ head, np.diag(vals[:rank]))] + _inductive(restricted, basis @ kern, tol)


def _assemble(pieces, n):
    basis = np.hstack([b for b, _ in pieces])
    codims = tuple(int(c) for c in np.cumsum([b.shape[1] for b, _ in pieces])[:-1])
    flag = Flag(n, codims, basis)
    return SatakePoint(flag, tuple(SubquotientForm(m) for _, m in pieces))


def sequence_limit_inductive(samples, tol=DEFAULT_TOL):
    """Limit of a convergent sequence by repeated kernel extraction.

    Each sample is scaled to largest eigenvalue 1; the last three samples
    must agree within ``tol`` (max-norm), the final one is taken as the
    limit ``Y``, the form on the complement of ``ker Y`` is recorded, and the
    procedure recurses on the samples restricted to ``ker Y`` (eigenvalues
    below ``tol`` count as zero).

    Raises
    ------
    NotStabilized
        If some tail comparison fails.
    """
    mats = _entries(samples)
    n = mats[0].shape[0]
    return _assemble(_inductive(mats, np.eye(n), tol), n)


def _packet_cuts(tail_logs, log_gap, trend):
    last = tail_logs[-1]
    first = tail_logs[0]
    cuts = []
    for i in range(len(last) - 1):
        gap = last[i] - last[i + 1]
        growth = gap - (first[i] - first[i + 1])
        if gap >= log_gap and growth > trend:
            cuts.append(i + 1)
    return cuts


def sequence_limit_packets(samples, tol=DEFAULT_TOL, log_gap=DEFAULT_LOG_GAP, trend=DEFAULT_TREND):
    """Limit of a convergent sequence by eigenvalue packets.

    Log-eigenvalues of the final sample are cut between consecutive
    positions whose gap is at least ``log_gap`` and has grown by more than
    ``trend`` over the last three samples.  Every packet spans one
    subquotient; the subspaces ``W_q`` are spanned by the later packets.
    For each of the last three samples the packet bases are transported onto
    the final ones through the orthogonal polar factor of their overlap, and
    the transported forms (largest eigenvalue 1) and subspace projectors must
    agree within ``tol``.
    """
    mats = [_normalize_top(m) for m in _entries(samples)]
    n = mats[0].shape[0]
    decomps = [linalg.jacobi_eigh(m) for m in mats[-3:]]
    logs = [np.log(np.clip(vals, 1e-300, None)) for vals, _ in decomps]
    edges = [0] + _packet_cuts(logs, log_gap, trend) + [n]
    final_vals, final_vecs = decomps[-1]
    blocks = [final_vecs[:, edges[k]:edges[k + 1]] for k in range(len(edges) - 1)]
    for vals, vecs in decomps[:-1]:
        for k, target in enumerate(blocks):
            own = vecs[:, edges[k]:edges[k + 1]]
            if np.max(np.abs(linalg.projector(own) - linalg.projector(target))) > tol:
                raise NotStabilized(f"packet {k + 1} subspace has not stabilized")
            align = linalg.polar_orthogonal(target.T @ own)
            moved = align @ np.diag(vals[edges[k]:edges[k + 1]]) @ align.T
            ref = np.diag(final_vals[edges[k]:edges[k + 1]])
            if np.max(np.abs(_normalize_top(moved) - _normalize_top(ref))) > tol:
                raise NotStabilized(f"packet {k + 1} form has not stabilized")
    pieces = [(blocks[k], np.diag(final_vals[edges[k]:edges[k + 1]])) for k in range(len(blocks))]
    return _assemble(pieces, n)


def satake_stratum_dim(n, codims):
    """Dimension of the stratum with codimension set ``codims``: ``n^2 - 1 - p``."""
    codims = check_codims(n, codims)
    return n * n - 1 - len(codims)


def flag_manifold_dim(n, codims):
    """Dimension of the real flag manifold of the given codimension type."""
    codims = check_codims(n, codims)
    edges = (0,) + codims + (n,)
    sizes = [edges[k + 1] - edges[k] for k in range(len(edges) - 1)]
    return (n * n - sum(a * a for a in sizes)) // 2


def stratum_bundle_dim(n, codims):
    """Stratum dimension recomputed as flag manifold plus one projective cone per subquotient."""
    codims = check_codims(n, codims)
    edges = (0,) + codims + (n,)
    fibers = sum((a * (a + 1)) // 2 - 1 for a in (edges[k + 1] - edges[k] for k in range(len(edges) - 1)))
    return flag_manifold_dim(n, codims) + fibers


def satake_closure_contains(i_set, j_set):
    """True iff the stratum ``j_set`` lies in the closure of the stratum ``i_set``."""
    return set(i_set) <= set(j_set)
