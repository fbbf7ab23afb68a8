"""Meromorphic curves of positive matrices and their limits at ``z -> 0+``.

A curve ``X(z)`` is a symmetric matrix of Laurent series.  Symmetric
elimination over the Laurent field writes

    X(z) = G(z) diag(c_i z^{-k_i} u_i(z)) G(z)^T,   u_i(0) = 1,  c_i > 0,

with ``G`` a matrix of power series and ``G(0)`` invertible.  Folding
``sqrt(u_i)`` (a rational series, since ``u_i(0) = 1``) into ``G`` gives a
factorization ``g diag(c_i z^{-k_i}) g^T``.  With ``z = exp(-t)`` the curve is
asymptotic to the geodesic ``g(0) diag(c_i exp(k_i t)) g(0)^T``, whose
null-pencil data is the limit.  Everything stays over the rationals.
"""

import random
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError, NotPositive, WindowExhausted
from .laurent import DEFAULT_TERMS, LaurentSeries, rational, series_from_json

MAX_TERMS = 256


@dataclass(frozen=True, eq=False)
class MeromorphicCurve:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("curve entries must form a square matrix")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise InputError(f"curve is not symmetric at ({i + 1}, {j + 1})")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self):
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def scaled(self, c):
        return MeromorphicCurve(tuple(tuple(x.scale(c) for x in r) for r in self.entries))

    def congruent(self, h, terms=DEFAULT_TERMS):
        """The curve ``h X h^T`` for a matrix ``h`` of series."""
        return MeromorphicCurve(_mat_mul(_mat_mul(h, self.entries), _transpose(h)))

    def to_json(self, truncation=DEFAULT_TERMS):
        return {"n": self.n, "T": truncation,
                "entries": [[x.to_json() for x in r] for r in self.entries]}


def curve_from_rows(rows):
    """Build a curve from nested lists of LaurentSeries (or numbers)."""
    conv = [[x if isinstance(x, LaurentSeries) else LaurentSeries.const(x) for x in r] for r in rows]
    return MeromorphicCurve(tuple(tuple(r) for r in conv))


def curve_from_json(obj):
    """Parse curve JSON; an upper triangle is mirrored into the lower one."""
    n = int(obj["n"])
    raw = obj["entries"]
    if len(raw) != n:
        raise DimensionMismatch("entries must have n rows")
    rows = [[None] * n for _ in range(n)]
    for i, r in enumerate(raw):
        if len(r) == n:
            cells = list(enumerate(r))
        elif len(r) == n - i:
            cells = [(i + k, x) for k, x in enumerate(r)]
        else:
            raise DimensionMismatch(f"row {i + 1} has {len(r)} entries")
        for j, x in cells:
            if j >= i:
                rows[i][j] = series_from_json(x)
    for i in range(n):
        for j in range(i):
            if len(raw[i]) == n and raw[i][j] is not None:
                lower = series_from_json(raw[i][j])
                if lower != rows[j][i]:
                    raise InputError(f"curve is not symmetric at ({i + 1}, {j + 1})")
            rows[i][j] = rows[j][i]
    return MeromorphicCurve(tuple(tuple(r) for r in rows))


def _transpose(m):
    return [list(col) for col in zip(*m)]


def _mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            total = LaurentSeries.zero()
            for t in range(k):
                total = total + _as_series(a[i][t]) * _as_series(b[t][j])
            row.append(total)
        out.append(row)
    return out


def _as_series(x):
    return x if isinstance(x, LaurentSeries) else LaurentSeries.const(x)


@dataclass(frozen=True, eq=False)
class CurveFactorization:
    """``X = g diag(c_i z^{-k_i}) g^T`` with exponents sorted non-increasing.

    ``g`` is a list of rows of power series; ``g0`` is its exact value at 0.
    """

    g: tuple
    exponents: tuple
    scales: tuple

    @property
    def n(self):
        return len(self.exponents)

    def g0(self):
        return [[x.coeff(0) for x in row] for row in self.g]

    def residual(self, curve):
        """Entrywise ``g D g^T - X``; every known coefficient is zero for a valid factorization."""
        n = self.n
        d = [[LaurentSeries.monomial(self.scales[i], -self.exponents[i]) if i == j else LaurentSeries.zero()
              for j in range(n)] for i in range(n)]
        prod = _mat_mul(_mat_mul(list(map(list, self.g)), d), _transpose(self.g))
        return [[prod[i][j] - curve[i, j] for j in range(n)] for i in range(n)]

    def residual_is_zero(self, curve):
        return all(not r.coeffs for row in self.residual(curve) for r in row)


def _pick_pivot(m, active, rng):
    """Active diagonal index of least valuation; ties by index or by ``rng``."""
    bounds = {i: m[i][i].valuation_bound() for i in active}
    known = {i: b for i, b in bounds.items() if m[i][i].has_value()}
    if not known:
        if all(m[i][i].is_zero() for i in active):
            return None
        raise WindowExhausted("no diagonal pivot is determined inside the window")
    best = min(known.values())
    if any(b <= best and i not in known for i, b in bounds.items() if b != float("inf")):
        raise WindowExhausted("a diagonal valuation is not determined inside the window")
    ties = sorted(i for i, b in known.items() if b == best)
    return ties[0] if rng is None else rng.choice(ties)


def _offdiag_min(m, active):
    best = None
    for a, i in enumerate(active):
        for j in active[a + 1:]:
            x = m[i][j]
            if x.has_value() and (best is None or x.low < best[0]):
                best = (x.low, i, j)
    return best


def factor_curve(curve, terms=DEFAULT_TERMS, seed=None):
    """Symmetric congruence factorization of a positive meromorphic curve.

    Parameters
    ----------
    terms : int
        Relative precision used when inverting pivots.
    seed : int or None
        ``None`` breaks valuation ties by the smallest index; an integer
        breaks them with a seeded random choice.

    Raises
    ------
    WindowExhausted
        If ``terms`` is too small to decide a pivot.
    NotPositive
        If some leading pivot coefficient is not positive.
    """
    n = curve.n
    rng = None if seed is None else random.Random(seed)
    m = [[curve[i, j] for j in range(n)] for i in range(n)]
    # back[i][j]: exact rational matrix undoing the congruence moves.
    back = [[rational(int(i == j)) for j in range(n)] for i in range(n)]
    active = list(range(n))
    cols, pivots = [], []
    while active:
        p = _pick_pivot(m, active, rng)
        low_off = _offdiag_min(m, active)
        diag_best = m[p][p].low if p is not None else None
        if low_off is not None and (p is None or low_off[0] < diag_best):
            _, i, j = low_off
            # Rows and columns i <- i + j; the leading term of m[i][i] becomes 2 m[i][j].
            for t in range(n):
                m[i][t] = m[i][t] + m[j][t]
            for t in range(n):
                m[t][i] = m[t][i] + m[t][j]
            for t in range(n):
                back[t][j] -= back[t][i]
            continue
        if p is None:
            raise NotPositive("the curve is degenerate: all remaining pivots vanish")
        d = m[p][p]
        if d.lead() <= 0:
            raise NotPositive(f"pivot leading coefficient {d.lead()} is not positive")
        inv = d.inverse(terms)
        col = [LaurentSeries.zero() for _ in range(n)]
        for i in active:
            col[i] = LaurentSeries.const(1) if i == p else m[i][p] * inv
        rest = [i for i in active if i != p]
        for a, i in enumerate(rest):
            for j in rest[a:]:
                upd = m[i][j] - col[i] * m[p][j]
                m[i][j] = upd
                m[j][i] = upd
        cols.append(col)
        pivots.append(d)
        active = rest
    # Undo the congruence moves: X = back (sum l d l^T) back^T.
    g_cols, exps, scales = [], [], []
    for col, d in zip(cols, pivots):
        v = d.valuation()
        c = d.lead()
        unit = d.shift(-v).scale(1 / c)
        root = unit.sqrt_unit(terms)
        g_col = []
        for r in range(n):
            total = LaurentSeries.zero()
            for t in range(n):
                if back[r][t] != 0 and col[t].coeffs:
                    total = total + col[t].scale(back[r][t])
            g_col.append(total * root)
        g_cols.append(g_col)
        exps.append(-v)
        scales.append(c)
    order = sorted(range(n), key=lambda k: -exps[k])
    g_rows = tuple(tuple(g_cols[k][r] for k in order) for r in range(n))
    return CurveFactorization(g_rows, tuple(exps[k] for k in order), tuple(scales[k] for k in order))


def factor_with_retry(curve, seed=None, start=DEFAULT_TERMS):
    terms = start
    while True:
        try:
            return factor_curve(curve, terms, seed)
        except WindowExhausted:
            if terms >= MAX_TERMS:
                raise
            terms *= 2


# Exact linear algebra over the rationals.

def _rref(rows):
    """Reduced row echelon form of a list of rational rows; returns (rows, pivot columns)."""
    a = [list(r) for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots, r = [], 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        lead = a[r][c]
        a[r] = [x / lead for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def null_space(rows, n):
    """Canonical basis (as columns) of ``{v : row . v = 0 for every row}``."""
    red, pivots = _rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [rational(0)] * n
        v[f] = rational(1)
        for r, pc in zip(red, pivots):
            v[pc] = -r[f]
        basis.append(v)
    return basis


def _quad_restrict(cols, vectors, weights):
    """Matrix of ``v -> sum_i w_i (col_i . v)^2`` on the span of ``vectors``."""
    images = [[sum(c[t] * v[t] for t in range(len(v))) for v in vectors] for c in cols]
    k = len(vectors)
    return tuple(tuple(sum(w * im[a] * im[b] for w, im in zip(weights, images)) for b in range(k))
                 for a in range(k))


@dataclass(frozen=True, eq=False)
class UrchinLimit:
    """Exact limit data: integer velocity, flag and forms.

    ``subspaces[k]`` is the canonical basis of ``W_k`` (``k = 0 .. m``) and
    ``forms[k]`` the form of block ``k + 1`` restricted to ``W_k``; it
    vanishes on ``W_{k+1}`` and is taken modulo ``A_k -> r^{psi_k} A_k``
    for one common ``r > 0``.
    """

    values: tuple
    block_sizes: tuple
    subspaces: tuple
    forms: tuple
    representative: object = None

    def same_as(self, other):
        return urchin_limits_equal(self, other)

    def null_pencil_data(self):
        """Floating-point null-pencil record of the representing geodesic."""
        from .pencils import null_pencil_data
        from .spd import Geodesic, Velocity

        if len(self.values) == 1 and self.values[0] == 0:
            raise InputError("a constant limit has no directed geodesic")
        return null_pencil_data(Geodesic(self.frame(), Velocity(self.block_sizes, self.values, "E")))

    def frame(self):
        """A float frame whose geodesic has this limit."""
        return np.asarray(self.representative, dtype=float)


def urchin_limit(curve, seed=None, terms=DEFAULT_TERMS):
    """Exact limit of a meromorphic curve at ``z -> 0+``."""
    fac = factor_with_retry(curve, seed, terms)
    return limit_from_factorization(fac)


def limit_from_factorization(fac, g0=None):
    n = fac.n
    g0 = fac.g0() if g0 is None else [list(r) for r in g0]
    values, sizes = [], []
    for k in fac.exponents:
        if values and values[-1] == k:
            sizes[-1] += 1
        else:
            values.append(k)
            sizes.append(1)
    cols = [[g0[r][i] for r in range(n)] for i in range(n)]
    subspaces, forms = [], []
    seen, start = [], 0
    for a in sizes:
        w_prev = null_space(seen, n)
        block = cols[start:start + a]
        weights = fac.scales[start:start + a]
        subspaces.append(tuple(tuple(v) for v in w_prev))
        forms.append(_quad_restrict(block, w_prev, weights))
        seen = seen + block
        start += a
    frame = np.array([[float(g0[r][i]) * float(fac.scales[i]) ** 0.5 for i in range(n)] for r in range(n)])
    return UrchinLimit(tuple(values), tuple(sizes), tuple(subspaces), tuple(forms), frame)


def _ratio(a, b):
    """``r`` with ``b = r a`` for nonzero rational matrices, or ``None``."""
    r = None
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            if x == 0 and y == 0:
                continue
            if x == 0 or y == 0:
                return None
            q = y / x
            if r is None:
                r = q
            elif q != r:
                return None
    return r


def _rpow(r, k):
    return r ** k if k >= 0 else 1 / (r ** (-k))


def urchin_limits_equal(a, b):
    """Exact equality of limits modulo the time-shift action."""
    if a.values != b.values or a.block_sizes != b.block_sizes:
        return False
    if a.subspaces != b.subspaces:
        return False
    ratios = []
    for fa, fb in zip(a.forms, b.forms):
        r = _ratio(fa, fb)
        if r is None or r <= 0:
            return False
        ratios.append(r)
    nonzero = [k for k, v in enumerate(a.values) if v != 0]
    if not nonzero:
        return all(r == 1 for r in ratios)
    p = nonzero[0]
    return all(_rpow(ratios[k], a.values[p]) == _rpow(ratios[p], a.values[k]) for k in range(len(ratios)))


def reparametrize(curve, u, terms=DEFAULT_TERMS):
    """Substitute ``z = w u(w)`` entrywise; ``u`` is a power series with ``u(0) > 0``."""
    u = u if isinstance(u, LaurentSeries) else LaurentSeries.const(u)
    if u.valuation() != 0 or u.lead() <= 0:
        raise InputError("u must be a power series with positive constant term")
    inner = u.shift(1)
    rows = [[curve[i, j].compose(inner, terms) for j in range(curve.n)] for i in range(curve.n)]
    return MeromorphicCurve(tuple(tuple(r) for r in rows))


def series_matrix_inverse(h, terms=DEFAULT_TERMS):
    """Inverse of a matrix of power series with invertible constant term, to ``terms`` orders."""
    n = len(h)
    h = [[_as_series(x) for x in row] for row in h]
    h0 = [[x.coeff(0) for x in row] for row in h]
    h0_inv = _rational_inverse(h0)
    inv0 = [[LaurentSeries.const(x) for x in row] for row in h0_inv]
    # h = h0 (I + E) with E = h0^{-1} (h - h0) of valuation >= 1.
    rest = [[h[i][j] - LaurentSeries.const(h0[i][j]) for j in range(n)] for i in range(n)]
    e = _mat_mul(inv0, rest)
    e = [[x.truncate(terms) for x in row] for row in e]
    neg_e = [[-x for x in row] for row in e]
    total = [[LaurentSeries.const(int(i == j)).truncate(terms) for j in range(n)] for i in range(n)]
    power = [row[:] for row in total]
    for _ in range(terms):
        power = _mat_mul(power, neg_e)
        power = [[x.truncate(terms) for x in row] for row in power]
        total = [[total[i][j] + power[i][j] for j in range(n)] for i in range(n)]
    return _mat_mul(total, inv0)


def _rational_inverse(a):
    n = len(a)
    aug = [[rational(x) for x in a[i]] + [rational(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise InputError("constant term is not invertible")
    return [row[n:] for row in red]


def refactor_invariance_check(curve, seed, h=None, terms=DEFAULT_TERMS):
    """Compare the default limit with one computed along another factorization path.

    The alternative path factors ``h^{-1} X h^{-T}`` with seeded pivot ties
    and maps the frame back by ``h`` (so ``g' = h g''`` represents ``X``).
    """
    reference = urchin_limit(curve, None, terms)
    if h is None:
        other = urchin_limit(curve, seed, terms)
        return urchin_limits_equal(reference, other)
    h_inv = series_matrix_inverse(h, terms)
    moved = MeromorphicCurve(tuple(tuple(r) for r in
                                   _mat_mul(_mat_mul(h_inv, [list(r) for r in curve.entries]), _transpose(h_inv))))
    fac = factor_with_retry(moved, seed, terms)
    h0 = [[_as_series(x).coeff(0) for x in row] for row in h]
    g0 = fac.g0()
    n = curve.n
    back = [[sum(h0[i][t] * g0[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
    return urchin_limits_equal(reference, limit_from_factorization(fac, back))
