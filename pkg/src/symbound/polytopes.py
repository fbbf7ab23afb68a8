"""Tree-partitions, leveled tree-partitions and the face posets they index.

Conventions
-----------
A *partition* of ``{1..n}`` is a tuple of sorted tuples ordered by minimum
element.  A *tree-partition* is a laminar family of subsets containing the
ground set in which every set with a proper subset in the family is the
disjoint union of its maximal proper subsets (its children); sets without
children are *irreducible*.  A *leveled* tree-partition is a chain of
partitions that starts at the one-block partition and strictly refines at
every step.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import factorial, prod

from .errors import InputError, TooLarge

TREE_LIMIT = 9
LEVELED_LIMIT = 7
LATTICE_LIMIT = 7
KINDS = ("Pass", "Karp", "Ass")


def _guard(n, limit, what):
    if n < 1:
        raise InputError("n must be positive")
    if n > limit:
        raise TooLarge(f"{what} enumeration is limited to n <= {limit}, got {n}")


def _is_interval(block):
    return block[-1] - block[0] + 1 == len(block)


def _fmt_block(block, n):
    if n <= 9:
        return "(" + "".join(str(i) for i in block) + ")"
    return "(" + ",".join(str(i) for i in block) + ")"


def make_partition(blocks, n=None):
    """Canonical partition from an iterable of blocks; validates the cover."""
    out = tuple(sorted((tuple(sorted(int(i) for i in b)) for b in blocks), key=lambda b: b[0] if b else 0))
    elems = [i for b in out for i in b]
    if any(not b for b in out) or len(elems) != len(set(elems)):
        raise InputError("partition blocks must be nonempty and disjoint")
    if n is not None and sorted(elems) != list(range(1, n + 1)):
        raise InputError(f"partition must cover 1..{n}")
    return out


def format_partition(part, n):
    return "".join(_fmt_block(b, n) for b in part)


def refines(fine, coarse):
    """True iff every block of ``fine`` lies inside a block of ``coarse``."""
    owner = {i: k for k, b in enumerate(coarse) for i in b}
    return all(len({owner[i] for i in b}) == 1 for b in fine)


def _set_key(s):
    return (-len(s), s)


@dataclass(frozen=True)
class TreePartition:
    """Laminar family of subsets of ``{1..n}``, stored in canonical order."""

    n: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(sorted({tuple(sorted(int(i) for i in s)) for s in self.sets}, key=_set_key))
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "_kids", self._child_map(sets))
        object.__setattr__(self, "_family", frozenset(sets))
        full = tuple(range(1, self.n + 1))
        if not sets or sets[0] != full:
            raise InputError("the ground set must belong to the family")
        as_sets = [frozenset(s) for s in sets]
        for i, a in enumerate(as_sets):
            for b in as_sets[i + 1:]:
                if not (a <= b or b <= a or not (a & b)):
                    raise InputError("sets of a tree-partition must be nested or disjoint")
        for s in sets:
            kids = self.children(s)
            if kids and sorted(i for k in kids for i in k) != list(s):
                raise InputError(f"children of {s} do not partition it")
            if len(kids) == 1:
                raise InputError(f"set {s} has a single child")

    @property
    def set_family(self):
        return self._family

    @staticmethod
    def _child_map(sets):
        # Sets are sorted by decreasing size, so the first strict superset met
        # walking backwards from a set is its smallest one, i.e. its parent.
        kids = {s: [] for s in sets}
        for i, s in enumerate(sets):
            fs = set(s)
            for t in reversed(sets[:i]):
                if len(t) > len(s) and fs <= set(t):
                    kids[t].append(s)
                    break
        return {s: tuple(sorted(v, key=lambda t: t[0])) for s, v in kids.items()}

    def children(self, s):
        """Maximal proper subsets of ``s`` in the family."""
        return self._kids[tuple(s)]

    def reducible(self):
        return [s for s in self.sets if self.children(s)]

    def irreducible(self):
        return [s for s in self.sets if not self.children(s)]

    def h(self, s):
        return len(self.children(s))

    @property
    def is_segmental(self):
        return all(_is_interval(s) for s in self.sets)

    @property
    def is_perfect(self):
        return all(len(s) == 1 for s in self.irreducible())

    def label(self):
        return ", ".join(_fmt_block(s, self.n) for s in self.sets)

    def to_json(self):
        return [list(s) for s in self.sets]


def tree_partition(n, sets):
    sets = list(sets)
    full = tuple(range(1, n + 1))
    if full not in {tuple(sorted(s)) for s in sets}:
        sets.append(full)
    return TreePartition(n, tuple(tuple(s) for s in sets))


@dataclass(frozen=True)
class LeveledTreePartition:
    """Strictly refining chain of partitions starting at the trivial one."""

    n: int
    levels: tuple

    def __post_init__(self):
        levels = tuple(make_partition(p, self.n) for p in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels or levels[0] != (tuple(range(1, self.n + 1)),):
            raise InputError("the first level must be the one-block partition")
        for a, b in zip(levels, levels[1:]):
            if a == b or not refines(b, a):
                raise InputError("each level must strictly refine the previous one")

    @property
    def tau(self):
        return len(self.levels) - 1

    @property
    def is_segmental(self):
        return all(_is_interval(b) for p in self.levels for b in p)

    def label(self):
        return "; ".join(format_partition(p, self.n) for p in self.levels)

    def to_json(self):
        return [[list(b) for b in p] for p in self.levels]


def leveled(n, levels):
    levels = [make_partition(p, n) for p in levels]
    trivial = (tuple(range(1, n + 1)),)
    if not levels or levels[0] != trivial:
        levels.insert(0, trivial)
    return LeveledTreePartition(n, tuple(levels))


def _set_partitions_rec(items):
    if len(items) == 1:
        yield ((items[0],),)
        return
    first = items[0]
    for part in _set_partitions_rec(items[1:]):
        yield ((first,),) + part
        for k in range(len(part)):
            yield part[:k] + ((first,) + part[k],) + part[k + 1:]


def _compositions(items):
    """Splits of a sequence into consecutive nonempty runs."""
    m = len(items)
    for mask in range(1 << (m - 1)):
        out, start = [], 0
        for i in range(m - 1):
            if mask >> i & 1:
                out.append(items[start:i + 1])
                start = i + 1
        out.append(items[start:])
        yield tuple(out)


def _splits(block, segmental):
    gen = _compositions(block) if segmental else _set_partitions_rec(block)
    return [tuple(sorted(p, key=lambda b: b[0])) for p in gen]


@lru_cache(maxsize=None)
def _subtrees(block, segmental, perfect):
    out = []
    if not perfect or len(block) == 1:
        out.append(frozenset([block]))
    if len(block) > 1:
        for part in _splits(block, segmental):
            if len(part) < 2:
                continue
            for combo in product(*(_subtrees(b, segmental, perfect) for b in part)):
                out.append(frozenset([block]).union(*combo))
    return tuple(out)


def enumerate_tree_partitions(n, segmental_only=False, perfect_only=False):
    """All tree-partitions of ``{1..n}`` in canonical order."""
    _guard(n, TREE_LIMIT, "tree-partition")
    fams = _subtrees(tuple(range(1, n + 1)), bool(segmental_only), bool(perfect_only))
    trees = [TreePartition(n, tuple(f)) for f in fams]
    return sorted(trees, key=lambda t: t.sets)


def _refinements(part, segmental):
    options = [_splits(b, segmental) for b in part]
    for choice in product(*options):
        new = make_partition([blk for p in choice for blk in p])
        if new != part:
            yield new


def enumerate_leveled(n, segmental_only=False):
    """All leveled tree-partitions of ``{1..n}`` in canonical order."""
    _guard(n, LEVELED_LIMIT, "leveled tree-partition")
    out = []

    def grow(chain):
        out.append(chain)
        for nxt in _refinements(chain[-1], segmental_only):
            grow(chain + (nxt,))

    grow(((tuple(range(1, n + 1)),),))
    return sorted((LeveledTreePartition(n, c) for c in out), key=lambda a: (a.tau, a.levels))


@dataclass(frozen=True)
class Stratum:
    index: object
    kind: str
    dim: int
    components: int

    def label(self):
        return f"dim={self.dim}; index={self.index.label()}"


def pass_dim(a):
    return (sum(len(s) - 1 for s in a.irreducible())
            + sum(a.h(s) - 2 for s in a.reducible()))


def stratum_pass(a, n=None):
    """Dimension and component count of the stratum indexed by a tree-partition."""
    if n is not None and n != a.n:
        raise InputError("n does not match the tree-partition")
    comps = prod(factorial(a.h(s)) for s in a.reducible())
    return Stratum(a, "Pass", pass_dim(a), comps)


def churn_staffs(a):
    """For each level ``j < tau``: the blocks of level ``j`` with their children at ``j + 1``."""
    out = []
    for coarse, fine in zip(a.levels, a.levels[1:]):
        staffs = []
        for b in coarse:
            kids = tuple(c for c in fine if set(c) <= set(b))
            staffs.append((b, kids))
        out.append(staffs)
    return out


def karp_factor_dims(a):
    """Dimensions of the product factors: one generic-ray factor per level, then the point factor."""
    dims = []
    for staffs in churn_staffs(a):
        dims.append(sum(len(kids) - 1 for _, kids in staffs) - 1)
    dims.append(a.n - len(a.levels[-1]))
    return dims


def stratum_karp(a, n=None):
    if n is not None and n != a.n:
        raise InputError("n does not match the leveled tree-partition")
    comps = prod(factorial(len(kids)) for staffs in churn_staffs(a) for _, kids in staffs)
    return Stratum(a, "Karp", a.n - 1 - a.tau, comps)


def pass_closure_leq(a, b):
    """True iff the stratum of ``b`` lies in the closure of the stratum of ``a``."""
    if a.n != b.n:
        raise InputError("tree-partitions on different ground sets")
    return a.set_family <= b.set_family


def karp_closure_leq(a, b):
    if a.n != b.n:
        raise InputError("leveled tree-partitions on different ground sets")
    return set(a.levels) <= set(b.levels)


def karp_to_pass(a):
    """Tree-partition formed by all blocks of all levels."""
    return TreePartition(a.n, tuple({blk for p in a.levels for blk in p}))


@dataclass(frozen=True)
class FaceLattice:
    """Strata with the Hasse covers of the closure order.

    ``covers`` holds index pairs ``(i, j)`` meaning node ``j`` is a facet of
    the closure of node ``i``.
    """

    n: int
    kind: str
    nodes: tuple
    covers: tuple
    top: tuple = field(default=())
    bottom: tuple = field(default=())

    def f_vector(self):
        return f_vector(self)

    def to_json(self):
        return {
            "n": self.n,
            "kind": self.kind,
            "nodes": [{"kind": s.kind, "dim": s.dim, "components": s.components, "index": s.index.to_json()}
                      for s in self.nodes],
            "covers": [list(c) for c in self.covers],
            "top": list(self.top),
            "bottom": list(self.bottom),
            "fVector": list(self.f_vector()),
        }

    def to_dot(self):
        lines = [f'digraph "{self.kind.lower()}_{self.n}" {{']
        for i, s in enumerate(self.nodes):
            lines.append(f'  n{i} [label="{s.label()}"];')
        for i, j in self.covers:
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def f_vector(lattice):
    if not lattice.nodes:
        return ()
    top = max(s.dim for s in lattice.nodes)
    counts = [0] * (top + 1)
    for s in lattice.nodes:
        counts[s.dim] += 1
    return tuple(counts)


def _pass_covers(nodes):
    by_dim = {}
    for i, s in enumerate(nodes):
        by_dim.setdefault(s.dim, []).append(i)
    fams = [s.index.set_family for s in nodes]
    covers = []
    for i, s in enumerate(nodes):
        for j in by_dim.get(s.dim - 1, []):
            if fams[i] <= fams[j]:
                covers.append((i, j))
    return covers


def _karp_covers(nodes):
    where = {s.index.levels: i for i, s in enumerate(nodes)}
    covers = []
    for i, s in enumerate(nodes):
        levels = s.index.levels
        for pos in range(1, len(levels) + 1):
            coarse = levels[pos - 1]
            finer = levels[pos] if pos < len(levels) else None
            for mid in _refinements(coarse, True):
                if finer is not None and (mid == finer or not refines(finer, mid)):
                    continue
                key = levels[:pos] + (mid,) + levels[pos:]
                if key in where:
                    covers.append((i, where[key]))
    return covers


def _finish(n, kind, nodes, covers):
    dims = [s.dim for s in nodes]
    top = tuple(i for i, d in enumerate(dims) if d == max(dims))
    bottom = tuple(i for i, d in enumerate(dims) if d == min(dims))
    return FaceLattice(n, kind, tuple(nodes), tuple(sorted(covers)), top, bottom)


def weyl_face_lattice(n, kind):
    """Face poset of the closure of one Weyl chamber.

    ``Karp`` nodes are segmental leveled tree-partitions, ``Pass`` nodes the
    images of those under :func:`karp_to_pass`, ``Ass`` nodes the perfect
    segmental tree-partitions.  Every stratum is a single chamber piece, so
    all component counts are 1.
    """
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}")
    _guard(n, LATTICE_LIMIT, "face lattice")
    if kind == "Karp":
        idx = enumerate_leveled(n, segmental_only=True)
        nodes = [Stratum(a, "WeylKarp", n - 1 - a.tau, 1) for a in idx]
        return _finish(n, kind, nodes, _karp_covers(nodes))
    if kind == "Pass":
        images = {karp_to_pass(a) for a in enumerate_leveled(n, segmental_only=True)}
        idx = sorted(images, key=lambda t: t.sets)
        nodes = [Stratum(a, "WeylPass", pass_dim(a), 1) for a in idx]
    else:
        idx = enumerate_tree_partitions(n, segmental_only=True, perfect_only=True)
        nodes = [Stratum(a, "AssFace", pass_dim(a), 1) for a in idx]
    return _finish(n, kind, nodes, _pass_covers(nodes))


def full_face_lattice(n, kind):
    """All Pass or Karp strata (no chamber restriction), with component counts."""
    if kind == "Karp":
        _guard(n, min(LEVELED_LIMIT, 5), "full Karp")
        nodes = [stratum_karp(a) for a in enumerate_leveled(n)]
        covers = [(i, j) for i, s in enumerate(nodes) for j, t in enumerate(nodes)
                  if t.dim == s.dim - 1 and karp_closure_leq(s.index, t.index)]
    elif kind == "Pass":
        _guard(n, min(TREE_LIMIT, 5), "full Pass")
        nodes = [stratum_pass(a) for a in enumerate_tree_partitions(n)]
        covers = _pass_covers(nodes)
    else:
        raise InputError("full lattices exist for Pass and Karp only")
    return _finish(n, kind, nodes, covers)


def euler_characteristic(lattice, weighted=False):
    """Alternating sum of node (or component) counts by dimension."""
    return sum((-1) ** s.dim * (s.components if weighted else 1) for s in lattice.nodes)
