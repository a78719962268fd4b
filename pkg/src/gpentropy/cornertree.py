"""Corner trees: data model, fast counting and their pattern expansions.

A corner tree is a rooted tree whose non-root vertices carry a direction
relative to their parent: ``NE`` (later, larger), ``NW`` (earlier, larger),
``SE`` (later, smaller), ``SW`` (earlier, smaller). Its count in a sequence
is the number of vertex maps into ``1..n`` satisfying every edge, with no
injectivity requirement across branches. Each count is a non-negative
integer combination of pattern counts of orders ``1..v``; collecting enough
independent trees lets the full profile be recovered by a linear solve.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InternalConsistencyError, ValidationError
from .patterns import all_patterns, encode

__all__ = [
    "LABELS",
    "CornerTree",
    "CoefficientVector",
    "Basis",
    "parse_tree",
    "enumerate_corner_trees",
    "count_tree",
    "count_trees",
    "coefficient_vector",
    "independent_trees",
    "select_basis",
    "fits_int64",
]

LABELS = ("NE", "NW", "SE", "SW")
_LABEL_CODE = {lab: i for i, lab in enumerate(LABELS)}
MAX_VERTICES = 6
_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class CornerTree:
    """Rooted unordered tree with direction-labelled edges.

    `children` holds ``(label, subtree)`` pairs, kept sorted by their
    encoding so that isomorphic trees compare (and hash) equal.
    """

    children: tuple[tuple[str, "CornerTree"], ...] = ()
    _encoding: str = field(default="", init=False, repr=False, compare=False)
    _size: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        for label, _ in self.children:
            if label not in _LABEL_CODE:
                raise ValidationError(f"unknown edge label {label!r}")
        kids = tuple(sorted(self.children, key=lambda c: _child_encoding(*c)))
        object.__setattr__(self, "children", kids)
        object.__setattr__(self, "_size", 1 + sum(t.size for _, t in kids))
        object.__setattr__(self, "_encoding", "(root" + _inner(kids) + ")")

    @property
    def size(self) -> int:
        return self._size

    def encode(self) -> str:
        """Canonical text form, e.g. ``(root (NE) (NE (SW)))``."""
        return self._encoding

    def __str__(self):
        return self._encoding

    def edges(self) -> list[tuple[int, int, str]]:
        """``(child, parent, label)`` triples with vertices in post-order.

        The root is the last vertex, ``size - 1``.
        """
        out: list[tuple[int, int, str]] = []

        def visit(node: CornerTree) -> int:
            pending = [(label, visit(child)) for label, child in node.children]
            me = counter[0]
            counter[0] += 1
            out.extend((c, me, label) for label, c in pending)
            return me

        counter = [0]
        visit(self)
        out.sort()
        return out

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Parent indices and label codes per vertex (root gets -1, -1)."""
        v = self.size
        parents = np.full(v, -1, dtype=np.int64)
        labels = np.full(v, -1, dtype=np.int64)
        for c, p, label in self.edges():
            parents[c] = p
            labels[c] = _LABEL_CODE[label]
        return parents, labels


def _inner(children) -> str:
    return "".join(" " + _child_encoding(label, t) for label, t in children)


def _child_encoding(label: str, tree: CornerTree) -> str:
    return "(" + label + _inner(tree.children) + ")"


_TOKEN = re.compile(r"\(|\)|[A-Za-z]+")


def parse_tree(text: str) -> CornerTree:
    """Parse the nested-parentheses tree format."""
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != re.sub(r"\s+", "", text):
        raise ValidationError(f"malformed tree text: {text!r}")
    pos = 0

    def node() -> tuple[str, CornerTree]:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise ValidationError(f"malformed tree text: {text!r}")
        head = tokens[pos + 1] if pos + 1 < len(tokens) else ""
        pos += 2
        kids = []
        while pos < len(tokens) and tokens[pos] == "(":
            kids.append(node())
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValidationError(f"malformed tree text: {text!r}")
        pos += 1
        return head, CornerTree(tuple(kids))

    head, tree = node()
    if head != "root" or pos != len(tokens):
        raise ValidationError(f"malformed tree text: {text!r}")
    return tree


def single_vertex() -> CornerTree:
    return CornerTree()


@lru_cache(maxsize=None)
def _trees_of_size(v: int) -> tuple[CornerTree, ...]:
    if v == 1:
        return (CornerTree(),)
    items = [
        (s, label, t)
        for s in range(1, v)
        for t in _trees_of_size(s)
        for label in LABELS
    ]
    # items are grouped by subtree size; end[s] bounds those of size <= s
    end = [sum(1 for it in items if it[0] <= s) for s in range(v)]
    found: set[CornerTree] = set()

    def extend(start: int, remaining: int, chosen: list):
        if remaining == 0:
            found.add(CornerTree(tuple((label, t) for _, label, t in chosen)))
            return
        for i in range(start, end[remaining]):
            chosen.append(items[i])
            extend(i, remaining - items[i][0], chosen)
            chosen.pop()

    extend(0, v - 1, [])
    return tuple(sorted(found, key=CornerTree.encode))


def enumerate_corner_trees(v: int) -> list[CornerTree]:
    """All corner trees with `v` vertices, sorted by canonical encoding."""
    if not isinstance(v, (int, np.integer)) or not 1 <= v <= MAX_VERTICES:
        raise ValidationError(f"vertex count must be in 1..{MAX_VERTICES}, got {v!r}")
    return list(_trees_of_size(int(v)))


def fits_int64(n: int, v: int) -> bool:
    """True when every intermediate of a v-vertex count on n points fits int64."""
    return n ** v <= _INT64_MAX


def _zero_based(ranks) -> np.ndarray:
    r = np.asarray(ranks, dtype=np.int64)
    if r.size and r.min() == 1:
        r = r - 1
    return r


def pack_trees(trees: Sequence[CornerTree]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten trees into the (parents, labels, offsets) arrays the kernels take."""
    parents, labels, offsets = [], [], [0]
    for t in trees:
        p, lab = t.arrays()
        parents.append(p)
        labels.append(lab)
        offsets.append(offsets[-1] + t.size)
    if not trees:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(1, np.int64)
    return np.concatenate(parents), np.concatenate(labels), np.asarray(offsets, dtype=np.int64)


def _count_tree_py(r: Sequence[int], tree: CornerTree) -> int:
    # Arbitrary-precision twin of the compiled kernel, for n**v beyond int64.
    n = len(r)
    edges = tree.edges()
    A = [[1] * n for _ in range(tree.size)]
    for c, p, label in edges:
        later = label[1] == "E"
        larger = label[0] == "N"
        fen = [0] * (n + 1)
        total = 0
        B = [0] * n
        for i in (range(n - 1, -1, -1) if later else range(n)):
            val = r[i]
            pos, below = val, 0
            while pos > 0:
                below += fen[pos]
                pos -= pos & -pos
            B[i] = total - below if larger else below
            a = A[c][i]
            pos = val + 1
            while pos <= n:
                fen[pos] += a
                pos += pos & -pos
            total += a
        A[p] = [x * y for x, y in zip(A[p], B)]
    return sum(A[tree.size - 1])


def count_trees(trees: Sequence[CornerTree], ranks) -> list[int]:
    """Counts of several trees on one rank sequence."""
    r = _zero_based(ranks)
    n = r.size
    if n == 0:
        return [0] * len(trees)
    out: list[int] = [0] * len(trees)
    small = [i for i, t in enumerate(trees) if fits_int64(n, t.size)]
    if small:
        p, lab, off = pack_trees([trees[i] for i in small])
        res = _kernels.count_trees(r, p, lab, off)
        for i, c in zip(small, res):
            out[i] = int(c)
    big = [i for i in range(len(trees)) if not fits_int64(n, trees[i].size)]
    if big:
        rl = r.tolist()
        for i in big:
            out[i] = _count_tree_py(rl, trees[i])
    return out


def count_tree(tree: CornerTree, ranks) -> int:
    """Number of (not necessarily injective) embeddings of `tree` in `ranks`.

    Runs in O(v n log n) using one Fenwick-tree sweep per edge.
    """
    return count_trees([tree], ranks)[0]


@dataclass(frozen=True)
class CoefficientVector:
    """Pattern expansion of a tree count: ``coeffs[m][i]`` multiplies the
    count of the order-``m`` pattern with Lehmer rank ``i``."""

    tree: CornerTree
    coeffs: dict[int, tuple[int, ...]]

    def component(self, m: int) -> tuple[int, ...]:
        return self.coeffs.get(m, (0,) * math.factorial(m))

    def nonzero(self) -> dict[str, int]:
        out = {}
        for m in sorted(self.coeffs):
            for perm, c in zip(all_patterns(m), self.coeffs[m]):
                if c:
                    out["".join(map(str, perm))] = c
        return out

    def evaluate(self, profiles: dict[int, Sequence[int]]) -> int:
        """Tree count implied by the given profiles (orders 1..v)."""
        return sum(
            c * x
            for m, comp in self.coeffs.items()
            for c, x in zip(comp, profiles[m])
        )


@lru_cache(maxsize=None)
def _surjections(v: int, m: int) -> np.ndarray:
    maps = np.array(list(itertools.product(range(m), repeat=v)), dtype=np.int64).reshape(-1, v)
    hit = np.zeros((maps.shape[0], m), dtype=bool)
    for j in range(v):
        hit[np.arange(maps.shape[0]), maps[:, j]] = True
    return maps[hit.all(axis=1)]


@lru_cache(maxsize=None)
def _perm_array(m: int) -> np.ndarray:
    return np.array(all_patterns(m), dtype=np.int64).reshape(-1, m)


def _component(tree: CornerTree, m: int) -> tuple[int, ...]:
    maps = _surjections(tree.size, m)
    perms = _perm_array(m)
    ok = np.ones((perms.shape[0], maps.shape[0]), dtype=bool)
    for c, p, label in tree.edges():
        tc, tp = maps[:, c], maps[:, p]
        time_ok = tc > tp if label[1] == "E" else tc < tp
        vc, vp = perms[:, tc], perms[:, tp]
        val_ok = vc > vp if label[0] == "N" else vc < vp
        ok &= time_ok[None, :] & val_ok
    return tuple(int(x) for x in ok.sum(axis=1))


@lru_cache(maxsize=None)
def coefficient_vector(tree: CornerTree, max_order: int | None = None) -> CoefficientVector:
    """Pattern expansion of `tree` for orders ``1..min(v, max_order)``.

    ``coeffs[pi]`` is the number of maps from the tree's vertices onto all
    positions of `pi` that satisfy every edge, found by enumerating maps.
    """
    top = tree.size if max_order is None else min(tree.size, max_order)
    return CoefficientVector(tree, {m: _component(tree, m) for m in range(1, top + 1)})


@lru_cache(maxsize=None)
def top_component(tree: CornerTree) -> tuple[int, ...]:
    """Order-v component only (bijective maps), cheap even for v = 6."""
    return _component(tree, tree.size)


class _Echelon:
    """Incremental exact rank tracker over the integers (fraction-free)."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[tuple[int, list[int]]] = []

    def reduce(self, vec: Sequence[int]) -> list[int]:
        v = list(vec)
        for col, row in self.rows:
            if v[col]:
                a, b = row[col], v[col]
                v = [a * x - b * y for x, y in zip(v, row)]
                g = math.gcd(*v)
                if g > 1:
                    v = [x // g for x in v]
        return v

    def add(self, vec: Sequence[int]) -> bool:
        v = self.reduce(vec)
        for col, x in enumerate(v):
            if x:
                self.rows.append((col, v))
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)


class _ModEchelon:
    """Rank tracker modulo a prime. Independence mod p implies independence
    over the rationals, so accepted vectors are always truly independent."""

    P = 2_147_483_647

    def __init__(self, dim: int):
        self.dim = dim
        self.pivots: list[int] = []
        self.rows = np.zeros((dim, dim), dtype=np.int64)

    def add(self, vec: Sequence[int]) -> bool:
        P = self.P
        v = np.asarray(vec, dtype=np.int64) % P
        for i, col in enumerate(self.pivots):
            if v[col]:
                v = (v - v[col] * self.rows[i] % P) % P
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        col = int(nz[0])
        inv = pow(int(v[col]), P - 2, P)
        self.rows[len(self.pivots)] = v * inv % P
        self.pivots.append(col)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


BASIS_VERSION = "corner-trees-1"


@lru_cache(maxsize=None)
def independent_trees(k: int) -> tuple[CornerTree, ...]:
    """Maximal set of k-vertex trees with independent order-k components.

    Trees are scanned in canonical order and the first independent one wins.
    Orders up to 4 use exact integer elimination; orders 5 and 6 use
    elimination modulo a large prime (accepted trees are certainly
    independent; maximality could only fail if the prime divides a minor).
    Selections for k >= 5 are kept in the on-disk cache.
    """
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_VERTICES:
        raise ValidationError(f"tree size must be in 1..{MAX_VERTICES}, got {k!r}")
    k = int(k)
    if k <= 4:
        return _select_independent(k)
    from . import cache

    def valid(enc) -> bool:
        return (isinstance(enc, list) and 0 < len(enc) <= math.factorial(k)
                and all(isinstance(e, str) for e in enc))

    enc = cache.memo(f"independent-trees-{BASIS_VERSION}-k{k}",
                     lambda: [t.encode() for t in _select_independent(k)], valid)
    try:
        trees = tuple(parse_tree(e) for e in enc)
    except ValidationError:
        trees = ()
    if not trees or any(t.size != k for t in trees):
        trees = _select_independent(k)
    return trees


def _select_independent(k: int) -> tuple[CornerTree, ...]:
    dim = math.factorial(k)
    ech = _Echelon(dim) if k <= 4 else _ModEchelon(dim)
    chosen = []
    for t in enumerate_corner_trees(k):
        if ech.add(top_component(t)):
            chosen.append(t)
            if ech.rank == dim:
                break
    return tuple(chosen)


def _invert(matrix: list[list[int]]) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Exact inverse as (integer numerator matrix, positive denominator)."""
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise InternalConsistencyError("basis matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    inv = [row[n:] for row in aug]
    den = 1
    for row in inv:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    num = tuple(tuple(int(x * den) for x in row) for row in inv)
    return num, den


@dataclass(frozen=True)
class Basis:
    """Count functionals spanning the order-k pattern space.

    `trees` are the selected k-vertex corner trees; for k = 4 the direct
    3214 counter supplies the one missing direction. Recovering the order-k
    profile from functional values `c` (and lower-order profiles) is

        profile_k = inv_num @ (c - lower contributions) / inv_den

    Extension point: orders 5 and 6 need further non-tree functionals
    (tree double posets, marked patterns, pattern trees); they would enter
    as extra rows here exactly like the 3214 counter.
    """

    order: int
    trees: tuple[CornerTree, ...]
    extra_patterns: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]
    lower: tuple[dict[int, tuple[int, ...]], ...]
    inv_num: tuple[tuple[int, ...], ...]
    inv_den: int

    @property
    def size(self) -> int:
        return len(self.trees) + len(self.extra_patterns)

    def residual(self, tree_counts: Sequence[int], extra_counts: Sequence[int],
                 profiles: dict[int, Sequence[int]]) -> list[int]:
        out = []
        for c, low in zip(tree_counts, self.lower):
            out.append(c - sum(a * x for m, comp in low.items() for a, x in zip(comp, profiles[m])))
        out.extend(extra_counts)
        return out

    def solve(self, residual: Sequence[int]) -> tuple[int, ...]:
        out = []
        for row in self.inv_num:
            num = sum(a * b for a, b in zip(row, residual))
            q, rem = divmod(num, self.inv_den)
            if rem:
                raise InternalConsistencyError(
                    f"order-{self.order} profile solve is not integral"
                )
            out.append(q)
        return tuple(out)


@lru_cache(maxsize=None)
def select_basis(k: int) -> Basis:
    """Basis for recovering the order-k profile, k in {2, 3, 4}."""
    if k not in (2, 3, 4):
        raise ValidationError(f"select_basis supports orders 2..4, got {k}")
    dim = math.factorial(k)
    trees = independent_trees(k)
    rows = [list(top_component(t)) for t in trees]
    extra: tuple[int, ...] = ()
    if k == 4:
        e = [0] * dim
        e[encode((3, 2, 1, 4))] = 1
        rows.append(e)
        extra = (encode((3, 2, 1, 4)),)
    ech = _Echelon(dim)
    for row in rows:
        ech.add(row)
    if ech.rank != dim:
        raise InternalConsistencyError(
            f"order-{k} basis has rank {ech.rank}, expected {dim}"
        )
    lower = tuple(
        {m: comp for m, comp in coefficient_vector(t).coeffs.items() if m < k}
        for t in trees
    )
    num, den = _invert(rows)
    return Basis(k, tuple(trees), extra, tuple(tuple(r) for r in rows), lower, num, den)
