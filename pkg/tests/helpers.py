"""Random generators shared by the test modules."""

import numpy as np
from symbound.spd import geodesic_eval, make_geodesic


def random_spd(rng, n, cond=None):
    """Random positive definite matrix, optionally with a prescribed condition number."""
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    if cond is None:
        eig = np.exp(rng.uniform(-2, 2, size=n))
    else:
        eig = np.exp(rng.uniform(0, np.log(cond), size=n))
        eig[0], eig[-1] = 1.0, cond
    return q @ np.diag(eig) @ q.T


def random_frame(rng, n, cond=10.0):
    """Invertible matrix with condition number at most ``cond``."""
    q1, _ = np.linalg.qr(rng.normal(size=(n, n)))
    q2, _ = np.linalg.qr(rng.normal(size=(n, n)))
    s = np.exp(rng.uniform(0, np.log(cond), size=n))
    s[0], s[-1] = 1.0, cond
    return q1 @ np.diag(s) @ q2


def random_blocks(rng, n):
    """Random composition of ``n``."""
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, n), size=rng.integers(0, n), replace=False)) if n > 1 else []
    edges = [0] + cuts + [n]
    return tuple(b - a for a, b in zip(edges, edges[1:]))


def random_values(rng, m, low_gap=0.5):
    gaps = rng.uniform(low_gap, 2.0, size=m - 1)
    top = rng.uniform(-1, 1)
    return tuple(float(v) for v in top - np.concatenate([[0.0], np.cumsum(gaps)]))


def random_geodesic(rng, n, model="E", min_blocks=2, cond=10.0):
    while True:
        blocks = random_blocks(rng, n)
        if len(blocks) >= min_blocks:
            break
    return make_geodesic(random_frame(rng, n, cond), blocks, random_values(rng, len(blocks)), model)


# Float64 resolves g D g^T only while the eigenvalue spread stays below about e^24.
RESOLVABLE_SPREAD = 24.0
# Adjacent blocks are sampled until their eigenvalue ratio is below 2e-3 even after
# the frame distorts it by up to cond^2.
SEPARATION = np.log(500.0)


def resolvable_sampled_geodesic(rng, max_n=4, max_cond=10.0, count=8):
    """Random geodesic with a sample sequence whose Satake limit float64 can represent.

    The frame has condition number at most ``max_cond``; the sampling horizon is
    chosen so that every block gap times ``t`` exceeds ``log(500 cond^2)``.
    Draws whose total spread would exceed ``RESOLVABLE_SPREAD`` are rejected.
    """
    while True:
        n = int(rng.integers(2, max_n + 1))
        cond = float(np.exp(rng.uniform(0, np.log(max_cond))))
        frame = random_frame(rng, n, cond)
        blocks = random_blocks(rng, n)
        if len(blocks) < 2:
            continue
        values = random_values(rng, len(blocks))
        gaps = -np.diff(values)
        t_last = (SEPARATION + 2 * np.log(cond)) / gaps.min()
        if (values[0] - values[-1]) * t_last > RESOLVABLE_SPREAD:
            continue
        gamma = make_geodesic(frame, blocks, values)
        ts = t_last * np.linspace(0.65, 1.0, count)
        return gamma, [geodesic_eval(gamma, t).entries for t in ts]


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def block_upper(rng, blocks, diagonal):
    """Block upper triangular matrix with random off-diagonal blocks and given diagonal blocks."""
    n = sum(blocks)
    edges = np.concatenate([[0], np.cumsum(blocks)])
    h = np.triu(rng.normal(size=(n, n)))
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            h[edges[i]:edges[i + 1], edges[j]:edges[j + 1]] = rng.normal(size=(blocks[i], blocks[j]))
    for k, d in enumerate(diagonal):
        h[edges[k]:edges[k + 1], edges[k]:edges[k + 1]] = d
    return h


def finite_shape(rng, blocks):
    """Shape keeping the finite pencil: invertible diagonal blocks."""
    return block_upper(rng, blocks, [random_frame(rng, a, cond=3.0) * rng.uniform(0.5, 2.0) for a in blocks])


def solvable_shape(rng, blocks):
    """Shape keeping the solvable pencil: diagonal blocks are positive multiples of rotations."""
    return block_upper(rng, blocks, [rng.uniform(0.5, 2.0) * random_orthogonal(rng, a) for a in blocks])


def null_shape(rng, blocks):
    """Unipotent shape keeping the null pencil."""
    return block_upper(rng, blocks, [np.eye(a) for a in blocks])


def random_growth(rng, n=None, max_n=6, max_degree=4):
    """Random polynomial growth vector with small rational coefficients.

    Coordinates often copy the high-degree part of an earlier coordinate, so
    leading coefficients tie and the limit trees have several levels.
    """
    from fractions import Fraction

    from symbound.growth import GrowthVector

    n = int(rng.integers(1, max_n + 1)) if n is None else n
    coords = []
    for i in range(n):
        deg = int(rng.integers(0, max_degree + 1))
        poly = [Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3))) for _ in range(deg + 1)]
        if coords and rng.random() < 0.6:
            src = coords[int(rng.integers(0, len(coords)))]
            cut = int(rng.integers(0, max_degree + 1))
            size = max(len(src), len(poly))
            poly = poly + [Fraction(0)] * (size - len(poly))
            for k in range(cut, len(src)):
                poly[k] = src[k]
        coords.append(poly)
    return GrowthVector(tuple(tuple(p) for p in coords))


def random_curve(rng, n=None, max_n=4, degree=2):
    """Random meromorphic curve ``h diag(c_i z^{-k_i}) h^T`` with its known factorization.

    ``h`` has small integer polynomial entries with ``h(0)`` unimodular lower
    triangular times a permutation, exponents lie in ``[-3, 3]`` (repeats are
    common, so pivot ties occur) and the ``c_i`` are positive rationals.
    """
    from fractions import Fraction

    from symbound.laurent import LaurentSeries
    from symbound.urchin import CurveFactorization, MeromorphicCurve, _mat_mul, _transpose

    n = int(rng.integers(1, max_n + 1)) if n is None else n
    exps = sorted((int(k) for k in rng.integers(-3, 4, size=n)), reverse=True)
    scales = [Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 4))) for _ in range(n)]
    h0 = np.tril(rng.integers(-2, 3, size=(n, n)), -1) + np.eye(n, dtype=int)
    h0 = h0[rng.permutation(n)]
    h = []
    for i in range(n):
        row = []
        for j in range(n):
            coeffs = [int(h0[i, j])] + [int(c) for c in rng.integers(-2, 3, size=degree)]
            row.append(LaurentSeries(0, tuple(coeffs)))
        h.append(row)
    d = [[LaurentSeries.monomial(scales[i], -exps[i]) if i == j else LaurentSeries.zero() for j in range(n)]
         for i in range(n)]
    x = _mat_mul(_mat_mul(h, d), _transpose(h))
    curve = MeromorphicCurve(tuple(tuple(r) for r in x))
    return curve, CurveFactorization(tuple(tuple(r) for r in h), tuple(exps), tuple(scales))


def random_unit_series(rng, degree=2):
    """Power series with positive rational constant term, for reparametrizations."""
    from fractions import Fraction

    from symbound.laurent import LaurentSeries

    c0 = Fraction(int(rng.integers(1, 4)), int(rng.integers(1, 3)))
    return LaurentSeries(0, (c0,) + tuple(Fraction(int(c), 2) for c in rng.integers(-3, 4, size=degree)))
