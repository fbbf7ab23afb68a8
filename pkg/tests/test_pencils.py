import itertools

import numpy as np
import pytest

from helpers import (finite_shape, null_shape, random_frame, random_geodesic, random_orthogonal, random_spd,
                     solvable_shape)
from symbound.errors import DimensionMismatch, InputError, NotInPencil
from symbound.pencils import (distance_at_infinity, finite_pencil_data, finite_pencil_project, null_data_equal,
                              null_pencil_data, pencil_stratum_dim, pencil_through_point, same_finite_pencil,
                              same_null_pencil, same_solvable_pencil, sphere_cell_closure_contains)
from symbound.satake import coordinate_flag, flag_from_spans
from symbound.spd import Geodesic, complex_distance, geodesic_eval, make_geodesic, make_spd


def moved(gamma, h):
    """The geodesic whose frame is ``g h``: ``h`` acts in the canonical coordinates of ``gamma``."""
    return Geodesic(gamma.frame @ h, gamma.velocity)


def relations(a, b):
    return same_null_pencil(a, b), same_solvable_pencil(a, b), same_finite_pencil(a, b)


# finite pencils

def test_finite_data_diagonal_example():
    data = finite_pencil_data(make_geodesic(np.eye(3), (1, 2), (1.0, 0.0)))
    assert data.flag.codims == (1,)
    np.testing.assert_allclose(data.flag.projectors()[0], np.diag([0, 1, 1]), atol=1e-12)


def test_finite_pencil_examples(rng):
    a = make_geodesic(random_frame(rng, 3), (1, 2), (1.0, -0.5))
    assert same_finite_pencil(a, moved(a, finite_shape(rng, (1, 2))))
    assert same_finite_pencil(a, a.shifted(5.0))
    rot = make_geodesic(np.eye(3), (1, 2), (1.0, -0.5))
    assert not same_finite_pencil(rot, rot.conjugated(random_orthogonal(rng, 3)))
    block_rot = np.eye(3)
    block_rot[1:, 1:] = random_orthogonal(rng, 2)
    assert same_finite_pencil(rot, rot.conjugated(block_rot))


def test_dimension_mismatch():
    a = make_geodesic(np.eye(2), (1, 1), (1.0, 0.0))
    b = make_geodesic(np.eye(3), (1, 2), (1.0, 0.0))
    with pytest.raises(DimensionMismatch):
        same_finite_pencil(a, b)
    with pytest.raises(DimensionMismatch):
        same_null_pencil(a, make_geodesic(np.eye(2), (1, 1), (1.0, -1.0), "PE"))


# solvable and null pencils

def test_solvable_examples(rng):
    a = make_geodesic(np.eye(3), (2, 1), (1.0, 0.0))
    assert same_solvable_pencil(a, a)
    assert same_solvable_pencil(a, moved(a, solvable_shape(rng, (2, 1))))
    h = finite_shape(rng, (2, 1))
    h[:2, :2] = np.diag([1.0, 3.0])
    assert same_finite_pencil(a, moved(a, h))
    assert not same_solvable_pencil(a, moved(a, h))


def test_null_diagonal_example():
    data = null_pencil_data(make_geodesic(np.eye(2), (1, 1), (1.0, 0.0)))
    assert [f.matrix.tolist() for f in data.forms] == [[[1.0]], [[1.0]]]


def test_null_examples(rng):
    gamma = make_geodesic(np.eye(2), (1, 1), (1.0, 0.0))
    four = make_geodesic(2 * np.eye(2), (1, 1), (1.0, 0.0))
    assert not same_null_pencil(gamma, four)
    assert same_solvable_pencil(gamma, four)
    assert np.allclose(null_pencil_data(four).forms[1].matrix, [[4.0]])
    a = random_geodesic(rng, 4)
    assert same_null_pencil(a, moved(a, null_shape(rng, a.velocity.block_sizes)))
    tau = solvable_shape(rng, a.velocity.block_sizes)
    edges = np.concatenate([[0], np.cumsum(a.velocity.block_sizes)])
    for k, scale in enumerate(np.linspace(1.5, 2.5, a.velocity.m)):
        tau[edges[k]:edges[k + 1], edges[k]:edges[k + 1]] = scale * np.eye(edges[k + 1] - edges[k])
    assert same_solvable_pencil(a, moved(a, tau))
    assert not same_null_pencil(a, moved(a, tau))


def test_null_data_origin_shift_invariance(rng):
    for _ in range(20):
        gamma = random_geodesic(rng, int(rng.integers(2, 5)))
        s = rng.uniform(-3, 3)
        assert null_data_equal(null_pencil_data(gamma), null_pencil_data(gamma, s))
        assert same_null_pencil(gamma, gamma.shifted(s))


def test_null_pencil_rotations_inside_blocks(rng):
    gamma = random_geodesic(rng, 4)
    blocks = gamma.velocity.block_sizes
    diag = np.zeros((4, 4))
    start = 0
    for a in blocks:
        diag[start:start + a, start:start + a] = random_orthogonal(rng, a)
        start += a
    assert same_null_pencil(gamma, moved(gamma, diag))


def test_null_requires_e_model():
    with pytest.raises(InputError):
        null_pencil_data(make_geodesic(np.eye(2), (1, 1), (1.0, -1.0), "PE"))


# canonical-form soundness, nesting and equivalence laws

SHAPES = {"null": null_shape, "solvable": solvable_shape, "finite": finite_shape}


def test_shapes_land_in_predicted_class(rng):
    for _ in range(60):
        gamma = random_geodesic(rng, int(rng.integers(2, 5)))
        for kind, shape in SHAPES.items():
            mu = moved(gamma, shape(rng, gamma.velocity.block_sizes))
            null, solv, fin = relations(gamma, mu)
            assert fin
            assert solv or kind == "finite"
            assert null or kind != "null"


def random_partner(rng, gamma):
    kind = rng.integers(0, 6)
    if kind < 3:
        return moved(gamma, SHAPES[("null", "solvable", "finite")[kind]](rng, gamma.velocity.block_sizes))
    if kind == 3:
        return gamma.shifted(rng.uniform(-2, 2))
    if kind == 4:
        return gamma.conjugated(random_frame(rng, gamma.n, cond=3.0))
    return Geodesic(gamma.frame, gamma.velocity.__class__(gamma.velocity.block_sizes,
                                                         tuple(2 * v for v in gamma.velocity.values)))


def test_nesting_on_random_pairs(rng):
    for _ in range(200):
        gamma = random_geodesic(rng, int(rng.integers(2, 5)))
        null, solv, fin = relations(gamma, random_partner(rng, gamma))
        assert (not null or solv) and (not solv or fin)


def test_equivalence_laws(rng):
    for _ in range(15):
        gamma = random_geodesic(rng, int(rng.integers(2, 5)))
        family = [gamma] + [random_partner(rng, gamma) for _ in range(4)]
        for pred in (same_null_pencil, same_solvable_pencil, same_finite_pencil):
            table = {(i, j): pred(family[i], family[j]) for i in range(5) for j in range(5)}
            assert all(table[i, i] for i in range(5))
            assert all(table[i, j] == table[j, i] for i in range(5) for j in range(5))
            for i, j, k in itertools.permutations(range(5), 3):
                assert not (table[i, j] and table[j, k]) or table[i, k]


# projections onto the factors at infinity

def test_finite_pencil_project_examples(rng):
    gamma = make_geodesic(np.eye(2), (1, 1), (1.0, 0.0))
    parts = finite_pencil_project(gamma, gamma)
    assert all(p.equals(make_spd(np.eye(1))) for p in parts)
    mu = moved(gamma, np.array([[2.0, 5.0], [0.0, 3.0]]))
    assert [float(p.entries[0, 0]) for p in finite_pencil_project(gamma, mu)] == pytest.approx([4.0, 9.0])
    with pytest.raises(NotInPencil):
        finite_pencil_project(gamma, moved(gamma, np.array([[1.0, 0.0], [1.0, 1.0]])))
    g3 = random_geodesic(rng, 4)
    h = finite_shape(rng, g3.velocity.block_sizes)
    d = np.zeros_like(h)
    start = 0
    for a in g3.velocity.block_sizes:
        d[start:start + a, start:start + a] = h[start:start + a, start:start + a]
        start += a
    for p, q in zip(finite_pencil_project(g3, moved(g3, h)), finite_pencil_project(g3, moved(g3, d))):
        assert p.equals(q, 1e-9)


def test_distance_at_infinity_examples(rng):
    gamma = make_geodesic(np.eye(2), (1, 1), (1.0, 0.0))
    assert distance_at_infinity(gamma, gamma) == 0
    mu = moved(gamma, np.diag([2.0, 3.0]))
    assert distance_at_infinity(gamma, mu) == pytest.approx(np.hypot(np.log(4), np.log(9)), abs=1e-12)
    a = random_geodesic(rng, 4)
    b = moved(a, finite_shape(rng, a.velocity.block_sizes))
    u = null_shape(rng, a.velocity.block_sizes)
    assert distance_at_infinity(moved(a, u), moved(b, u)) == pytest.approx(distance_at_infinity(a, b), abs=1e-8)


def test_pencil_through_point(rng):
    gamma = random_geodesic(rng, 3)
    mu = pencil_through_point(gamma, geodesic_eval(gamma, 0))
    assert same_null_pencil(gamma, mu)
    for _ in range(10):
        x = make_spd(random_spd(rng, 3))
        mu = pencil_through_point(gamma, x)
        assert geodesic_eval(mu, 0).equals(x, 1e-8)
        assert same_finite_pencil(gamma, mu)
    diag = make_geodesic(np.eye(3), (1, 2), (1.0, 0.0))
    h = finite_shape(rng, (1, 2))
    mu = pencil_through_point(diag, make_spd(h @ h.T))
    assert same_null_pencil(mu, moved(diag, h))


def test_distance_grows_like_velocity(rng):
    # complex_distance(A, mu(t)) - t*phi is bounded by twice the log-distortion of L^{-1} g, A = L L^T.
    for _ in range(20):
        gamma = random_geodesic(rng, int(rng.integers(2, 5)), cond=3.0)
        a = random_spd(rng, gamma.n, cond=3.0)
        m = np.linalg.solve(np.linalg.cholesky(a), gamma.frame)
        sig = np.linalg.svd(m, compute_uv=False)
        bound = 2 * max(abs(np.log(sig.max())), abs(np.log(sig.min())))
        t = 8.0
        psi = complex_distance(geodesic_eval(gamma, t), make_spd(a)).psis
        assert np.max(np.abs(psi - t * gamma.velocity.expanded())) <= bound + 1e-8


# visibility sphere tiling and dimensions

def test_sphere_cell_closure(rng):
    full = coordinate_flag(3, (1, 2))
    assert sphere_cell_closure_contains(full, full)
    assert sphere_cell_closure_contains(full, coordinate_flag(3, (1,)))
    assert sphere_cell_closure_contains(full, coordinate_flag(3, (2,)))
    other = flag_from_spans(3, (1,), random_orthogonal(rng, 3))
    assert not sphere_cell_closure_contains(coordinate_flag(3, (1,)), other)


def test_pencil_strata_have_codim_one():
    for n in range(1, 7):
        for k in range(n):
            for codims in itertools.combinations(range(1, n), k):
                assert pencil_stratum_dim(n, codims) == n * n - 2
