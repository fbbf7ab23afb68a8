"""Finite, solvable and null pencils of directed geodesics.

Geodesics are compared through their boundary data rather than by solving
for a conjugating matrix:

* finite pencil: velocity and limit flag;
* solvable pencil: velocity and Satake limit (forms up to scale);
* null pencil (E model): velocity, flag and literal subquotient forms modulo
  the one-parameter action ``R_k -> exp(psi_k s) R_k`` coming from shifting
  the time origin.  Representatives are put on the slice where the block
  with the largest ``|psi_k|`` (first such) has a form of determinant 1,
  which keeps every rescaling factor below ``exp(|log det|)``.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InputError, NotInPencil
from .satake import LITERAL, Flag, SubquotientForm, geodesic_satake_limit, satake_point_equal, satake_stratum_dim
from .spd import Geodesic, make_spd, riemannian_distance

FLAG_TOL = 1e-7
FORM_TOL = 1e-7
TRIANGULAR_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class FinitePencilData:
    velocity: object
    flag: Flag


@dataclass(frozen=True, eq=False)
class SolvablePencilData:
    velocity: object
    satake: object


@dataclass(frozen=True, eq=False)
class NullPencilData:
    """Velocity with literal values, limit flag and sliced literal forms."""

    velocity: object
    flag: Flag
    forms: tuple

    def embedded_forms(self):
        return [self.flag.block(k) @ f.matrix @ self.flag.block(k).T for k, f in enumerate(self.forms, start=1)]


def _check_pair(a, b):
    if a.n != b.n:
        raise DimensionMismatch(f"dimensions differ: {a.n} vs {b.n}")
    if a.model != b.model:
        raise DimensionMismatch(f"models differ: {a.model} vs {b.model}")


def finite_pencil_data(gamma):
    return FinitePencilData(gamma.velocity, geodesic_satake_limit(gamma).flag)


def solvable_pencil_data(gamma):
    return SolvablePencilData(gamma.velocity, geodesic_satake_limit(gamma))


def same_finite_pencil(a, b, tol=FLAG_TOL):
    _check_pair(a, b)
    if not a.velocity.same_as(b.velocity):
        return False
    return finite_pencil_data(a).flag.equals(finite_pencil_data(b).flag, tol)


def same_solvable_pencil(a, b, tol=FORM_TOL):
    _check_pair(a, b)
    if not a.velocity.same_as(b.velocity):
        return False
    return satake_point_equal(geodesic_satake_limit(a), geodesic_satake_limit(b), tol)


def slice_forms(values, forms):
    """Move literal forms onto the canonical slice of the time-shift action.

    ``values[k]`` is the velocity of block ``k`` and ``forms[k]`` a square
    matrix.  With ``p`` the first block of largest ``|values[p]|``, every form
    is multiplied by ``det(forms[p]) ** (-values[k] / (values[p] * dim_p))``.
    """
    forms = [np.asarray(f, dtype=float) for f in forms]
    mags = np.abs(np.asarray(values, dtype=float))
    if not np.any(mags > 0):
        return forms
    p = int(np.argmax(mags))
    _, logdet = np.linalg.slogdet(forms[p])
    s = -logdet / (values[p] * forms[p].shape[0])
    return [f * np.exp(v * s) for v, f in zip(values, forms)]


def null_pencil_data(gamma, origin_shift=0.0):
    """Null-pencil data of an E-model geodesic whose origin is moved to ``origin_shift``."""
    if gamma.model != "E":
        raise InputError("null pencil data requires the E model")
    g = gamma.shifted(origin_shift).frame
    q, r = np.linalg.qr(g)
    flag = Flag(gamma.n, gamma.velocity.partial_sums(), q)
    edges = flag.edges
    raw = []
    for k in range(gamma.velocity.m):
        rkk = r[edges[k]:edges[k + 1], edges[k]:edges[k + 1]]
        raw.append(rkk @ rkk.T)
    sliced = slice_forms(gamma.velocity.values, raw)
    return NullPencilData(gamma.velocity, flag, tuple(SubquotientForm(f, LITERAL) for f in sliced))


def null_data_equal(a, b, flag_tol=FLAG_TOL, form_tol=FORM_TOL):
    """Equality of two sliced null-pencil records."""
    va, vb = a.velocity, b.velocity
    if va.block_sizes != vb.block_sizes:
        return False
    scale = max(1.0, float(np.max(np.abs(va.values))))
    if np.max(np.abs(np.subtract(va.values, vb.values))) > 1e-9 * scale:
        return False
    if not a.flag.equals(b.flag, flag_tol):
        return False
    for ea, eb in zip(a.embedded_forms(), b.embedded_forms()):
        ref = max(1.0, float(np.max(np.abs(ea))))
        if not np.max(np.abs(ea - eb)) <= form_tol * ref:
            return False
    return True


def same_null_pencil(a, b):
    _check_pair(a, b)
    return null_data_equal(null_pencil_data(a), null_pencil_data(b))


def _block_upper_part_ok(h, sizes, tol):
    edges = np.concatenate([[0], np.cumsum(sizes)])
    scale = max(1.0, float(np.max(np.abs(h))))
    for i in range(len(sizes)):
        for j in range(i):
            blk = h[edges[i]:edges[i + 1], edges[j]:edges[j + 1]]
            if blk.size and np.max(np.abs(blk)) > tol * scale:
                return False
    return True


def finite_pencil_project(gamma, mu, tol=TRIANGULAR_TOL):
    """Diagonal-block Gram matrices of ``mu`` relative to the frame of ``gamma``.

    Writes ``g_gamma^{-1} g_mu = h``; ``h`` must be block upper triangular
    (otherwise :class:`NotInPencil`) and the result is ``[H_kk H_kk^T]``.
    """
    _check_pair(gamma, mu)
    if not gamma.velocity.same_as(mu.velocity):
        raise NotInPencil("velocities differ")
    h = np.linalg.solve(gamma.frame, mu.frame)
    sizes = gamma.velocity.block_sizes
    if not _block_upper_part_ok(h, sizes, tol):
        raise NotInPencil("the geodesics do not lie in one finite pencil")
    edges = np.concatenate([[0], np.cumsum(sizes)])
    out = []
    for k in range(len(sizes)):
        hkk = h[edges[k]:edges[k + 1], edges[k]:edges[k + 1]]
        out.append(make_spd(linalg.symmetrize(hkk @ hkk.T), "E"))
    return out


def distance_at_infinity(nu1, nu2):
    """Product-space distance between the block projections of two pencil members."""
    parts = finite_pencil_project(nu1, nu2)
    total = 0.0
    for p in parts:
        total += riemannian_distance(make_spd(np.eye(p.n)), p) ** 2
    return float(np.sqrt(total))


def pencil_through_point(gamma, x):
    """The member of the finite pencil of ``gamma`` passing through ``x`` at time 0."""
    if x.n != gamma.n:
        raise DimensionMismatch("point and geodesic dimensions differ")
    g = gamma.frame
    half = np.linalg.solve(g, x.entries)
    y = linalg.symmetrize(np.linalg.solve(g, half.T))
    h = linalg.upper_cholesky(y)
    return Geodesic(g @ h, gamma.velocity)


def sphere_cell_closure_contains(w, w_sub, tol=FLAG_TOL):
    """True iff every subspace of ``w_sub`` occurs among the subspaces of ``w``."""
    if w.n != w_sub.n:
        raise DimensionMismatch("flags live in different dimensions")
    mine = dict(zip(w.codims, w.projectors()))
    for c, proj in zip(w_sub.codims, w_sub.projectors()):
        if c not in mine or np.max(np.abs(mine[c] - proj)) > tol:
            return False
    return True


def velocity_cell_dim(n, codims, model="PE"):
    """Dimension of the open cell of normalized velocities with given block type."""
    m = len(codims) + 1
    return m - 2 if model == "PE" else m - 1


def pencil_stratum_dim(n, codims):
    """Velocity cell plus Satake stratum, for solvable pencils of a given type."""
    return velocity_cell_dim(n, codims, "PE") + satake_stratum_dim(n, codims)
