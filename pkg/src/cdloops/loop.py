"""Finite loops stored as dense Cayley tables.

Elements are the integers ``0..n-1`` and the identity is always ``0``.
Every exhaustive scan here is vectorised with numpy fancy indexing, so
``L.mul(a, b)`` works equally on scalars and on broadcastable arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class LoopError(ValueError):
    """Raised for tables that are not loops with identity at 0."""


class NotAPermutationRow(LoopError):
    def __init__(self, row: int):
        super().__init__(f"row {row} is not a permutation")
        self.row = row


class NotAPermutationCol(LoopError):
    def __init__(self, col: int):
        super().__init__(f"column {col} is not a permutation")
        self.col = col


class IdentityNotAtZero(LoopError):
    def __init__(self):
        super().__init__("element 0 is not a two-sided identity")


class NotNormal(LoopError):
    def __init__(self, witness: tuple, detail: str):
        super().__init__(f"subloop is not normal: {detail} {witness}")
        self.witness = witness


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class LoopTable:
    """A certified finite loop. Build through :func:`validate_loop`."""

    def __init__(self, table: np.ndarray, names: Sequence[str]):
        self.table = _readonly(np.asarray(table, dtype=np.int32))
        self.names = tuple(names)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"LoopTable(order={self.order})"

    def __eq__(self, other):
        return (
            isinstance(other, LoopTable)
            and self.names == other.names
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.names, self.table.tobytes()))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no element named {name!r}") from None

    def name(self, a) -> str:
        return self.names[int(a)]

    @cached_property
    def ldiv_table(self) -> np.ndarray:
        # row a of ldiv is the inverse permutation of row a of the table
        n = self.order
        out = np.empty_like(self.table)
        rows = np.arange(n)[:, None]
        out[rows, self.table] = np.arange(n, dtype=np.int32)[None, :]
        return _readonly(out)

    @cached_property
    def rdiv_table(self) -> np.ndarray:
        # rdiv[x, a] = x / a, i.e. the z with z.a = x
        n = self.order
        out = np.empty_like(self.table)
        cols = np.arange(n)[None, :]
        out[self.table, cols] = np.arange(n, dtype=np.int32)[:, None]
        return _readonly(out)

    def mul(self, a, b):
        return self.table[a, b]

    def ldiv(self, a, b):
        """``a \\ b``: the element c with a.c = b."""
        return self.ldiv_table[a, b]

    def rdiv(self, b, a):
        """``b / a``: the element c with c.a = b."""
        return self.rdiv_table[b, a]

    def left_inverse(self, a):
        return self.rdiv_table[0, a]

    def right_inverse(self, a):
        return self.ldiv_table[a, 0]

    def commutator(self, a, b):
        return self.ldiv_table[self.table[b, a], self.table[a, b]]

    def associator(self, a, b, c):
        t = self.table
        return self.ldiv_table[t[a, t[b, c]], t[t[a, b], c]]

    def inv(self, a):
        """Two-sided inverse; only meaningful for invertible elements."""
        return self.ldiv_table[a, 0]

    @cached_property
    def structure(self) -> "StructureReport":
        return structure_sets(self)

    @property
    def center(self) -> frozenset[int]:
        return self.structure.center

    @cached_property
    def center_mask(self) -> np.ndarray:
        mask = np.zeros(self.order, dtype=bool)
        mask[list(self.structure.center)] = True
        return _readonly(mask)


def default_names(n: int) -> list[str]:
    return ["1"] + [f"e{i}" for i in range(1, n)]


def validate_loop(raw, names: Sequence[str] | None = None) -> LoopTable:
    t = np.asarray(raw)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise LoopError("table must be a non-empty square array")
    if not np.issubdtype(t.dtype, np.integer):
        raise LoopError("table entries must be integers")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise LoopError(f"table entries must lie in [0, {n})")
    full = np.arange(n)
    for i in range(n):
        if not np.array_equal(np.sort(t[i]), full):
            raise NotAPermutationRow(i)
    for j in range(n):
        if not np.array_equal(np.sort(t[:, j]), full):
            raise NotAPermutationCol(j)
    if not (np.array_equal(t[0], full) and np.array_equal(t[:, 0], full)):
        raise IdentityNotAtZero()
    if names is None:
        names = default_names(n)
    names = [str(s) for s in names]
    if len(names) != n:
        raise LoopError(f"expected {n} names, got {len(names)}")
    if len(set(names)) != n:
        raise LoopError("element names must be distinct")
    return LoopTable(t, names)


def multiply(L: LoopTable, a: int, b: int) -> int:
    return int(L.table[a, b])


def divide(L: LoopTable, a: int, b: int, side: str = "left") -> int:
    """Left: ``a \\ b`` (so a.(a\\b) = b). Right: ``b / a`` (so (b/a).a = b)."""
    if side == "left":
        return int(L.ldiv_table[a, b])
    if side == "right":
        return int(L.rdiv_table[b, a])
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def one_sided_inverses(L: LoopTable, a: int) -> tuple[int, int, bool]:
    lam = int(L.left_inverse(a))
    rho = int(L.right_inverse(a))
    return lam, rho, lam == rho


def commutator(L: LoopTable, a: int, b: int) -> int:
    return int(L.commutator(a, b))


def associator(L: LoopTable, a: int, b: int, c: int) -> int:
    return int(L.associator(a, b, c))


def commutator_table(L: LoopTable) -> np.ndarray:
    return L.ldiv_table[L.table.T, L.table]


def associator_block(L: LoopTable, a) -> np.ndarray:
    """``[a, b, c]`` for all b, c (or for each a in an index array)."""
    t = L.table
    a = np.asarray(a)[..., None, None]
    return L.ldiv_table[t[a, t[None, :, :]], t[t[a, np.arange(L.order)[:, None]], np.arange(L.order)[None, :]]]


def iter_triples(n: int, budget: int = 1 << 22):
    """Yield index arrays ``(a, b, c)`` covering [0,n)^3 in lexicographic chunks."""
    step = max(1, budget // (n * n))
    b = np.arange(n)[None, :, None]
    c = np.arange(n)[None, None, :]
    for lo in range(0, n, step):
        a = np.arange(lo, min(n, lo + step))[:, None, None]
        yield a, b, c


def first_failure(ok: np.ndarray, offset: Sequence[int] = ()) -> tuple[int, ...] | None:
    """Lexicographically first index where ``ok`` is False, or None."""
    bad = np.argwhere(~ok)
    if bad.size == 0:
        return None
    w = [int(v) for v in bad[0]]
    for i, off in enumerate(offset):
        w[i] += off
    return tuple(w)


def check_triples(L: LoopTable, predicate) -> tuple[int, int, int] | None:
    """First (a, b, c) with ``predicate(a, b, c)`` False, scanning all triples."""
    for a, b, c in iter_triples(L.order):
        ok = np.broadcast_to(predicate(a, b, c), (a.shape[0], L.order, L.order))
        w = first_failure(ok)
        if w is not None:
            return (w[0] + int(a[0, 0, 0]), w[1], w[2])
    return None


def check_pairs(L: LoopTable, predicate) -> tuple[int, int] | None:
    n = L.order
    a = np.arange(n)[:, None]
    b = np.arange(n)[None, :]
    return first_failure(np.broadcast_to(predicate(a, b), (n, n)))


def check_singles(L: LoopTable, predicate) -> tuple[int] | None:
    return first_failure(np.broadcast_to(predicate(np.arange(L.order)), (L.order,)))


@dataclass(frozen=True)
class SubloopHandle:
    parent: LoopTable
    members: tuple[int, ...]

    def __contains__(self, x) -> bool:
        return int(x) in self._set

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.members)

    def as_loop(self) -> LoopTable:
        """The subloop as a standalone table, re-indexed in member order."""
        idx = np.array(self.members)
        pos = np.full(self.parent.order, -1)
        pos[idx] = np.arange(len(idx))
        sub = pos[self.parent.table[np.ix_(idx, idx)]]
        return LoopTable(sub, [self.parent.names[i] for i in self.members])

    def __repr__(self):
        return f"SubloopHandle(order={self.order}, members={list(self.members)})"


def _closure(L: LoopTable, start: Iterable[int], perm: np.ndarray | None) -> np.ndarray:
    inside = np.zeros(L.order, dtype=bool)
    inside[0] = True
    inside[list(start)] = True
    while True:
        s = np.flatnonzero(inside)
        ix = np.ix_(s, s)
        grown = inside.copy()
        grown[L.table[ix]] = True
        grown[L.ldiv_table[ix]] = True
        grown[L.rdiv_table[ix]] = True
        if perm is not None:
            grown[perm[s]] = True
        if np.array_equal(grown, inside):
            return s
        inside = grown


def generate_subloop(L: LoopTable, gens: Iterable[int] = (), close_under_involution=None) -> SubloopHandle:
    perm = None if close_under_involution is None else np.asarray(close_under_involution.perm)
    members = _closure(L, [int(g) for g in gens], perm)
    return SubloopHandle(L, tuple(int(x) for x in members))


def subloop_from_members(L: LoopTable, members: Iterable[int]) -> SubloopHandle:
    """Wrap a known closed subset; closure is checked."""
    m = tuple(sorted({0, *(int(x) for x in members)}))
    if len(_closure(L, m, None)) != len(m):
        raise LoopError("member set is not closed under the loop operations")
    return SubloopHandle(L, m)


def coset_classes(L: LoopTable, N: SubloopHandle) -> np.ndarray:
    """Class index of every element under the left-coset partition xN.

    Raises NotNormal when the left cosets do not partition L.
    """
    n = L.order
    cls = np.full(n, -1)
    members = np.array(N.members)
    k = 0
    for x in range(n):
        if cls[x] >= 0:
            continue
        coset = L.table[x, members]
        if (cls[coset] >= 0).any():
            y = int(coset[np.argmax(cls[coset] >= 0)])
            raise NotNormal((x, y), "overlapping cosets")
        cls[coset] = k
        k += 1
    return cls


def normal_quotient_map(L: LoopTable, N: SubloopHandle) -> tuple[LoopTable, np.ndarray]:
    """Quotient L/N together with the class index of every element."""
    cls = coset_classes(L, N)
    members = np.array(N.members)
    n = L.order
    x = np.arange(n)[:, None, None]
    y = np.arange(n)[None, :, None]
    m = members[None, None, :]
    base = cls[L.table][:, :, None]
    # (xm)y and x(ym) must stay in the class of xy
    for side, prod in (("(x.n).y", L.table[L.table[x, m], y]), ("x.(y.n)", L.table[x, L.table[y, m]])):
        w = first_failure(cls[prod] == base)
        if w is not None:
            raise NotNormal((w[0], w[1], int(members[w[2]])), f"{side} leaves the class of x.y for (x, y, n) =")
    k = int(cls.max()) + 1
    reps = np.array([int(np.argmax(cls == c)) for c in range(k)])
    q = cls[L.table[np.ix_(reps, reps)]]
    names = [L.names[r] for r in reps]
    return LoopTable(q, names), cls


def normal_quotient(L: LoopTable, N: SubloopHandle) -> LoopTable:
    return normal_quotient_map(L, N)[0]


@dataclass(frozen=True)
class StructureReport:
    nuc_left: frozenset[int]
    nuc_mid: frozenset[int]
    nuc_right: frozenset[int]
    nucleus: frozenset[int]
    commutant: frozenset[int]
    center: frozenset[int]
    derived: SubloopHandle
    central_by_abelian: bool
    exp2: bool
    dim: int | None  # None when L/Z(L) is not an elementary abelian 2-group


def _nuclei(L: LoopTable):
    n = L.order
    t = L.table
    left = np.zeros(n, dtype=bool)
    mid = np.zeros(n, dtype=bool)
    right = np.zeros(n, dtype=bool)
    r = np.arange(n)
    for a in range(n):
        # (ax)y = a(xy);  (xa)y = x(ay);  (xy)a = x(ya)
        left[a] = np.array_equal(t[t[a][:, None], r[None, :]], t[a][t])
        mid[a] = np.array_equal(t[t[:, a][:, None], r[None, :]], t[r[:, None], t[a][None, :]])
        right[a] = np.array_equal(t[:, a][t], t[r[:, None], t[:, a][None, :]])
    return left, mid, right


def structure_sets(L: LoopTable) -> StructureReport:
    left, mid, right = _nuclei(L)
    comm = (L.table == L.table.T).all(axis=1)
    nuc = left & mid & right
    center = comm & nuc
    fs = lambda m: frozenset(int(i) for i in np.flatnonzero(m))
    ctab = commutator_table(L)
    values = set(np.unique(ctab).tolist())
    all_central = bool(center[ctab].all())
    for a in range(L.order):
        block = associator_block(L, a)
        values.update(np.unique(block).tolist())
        all_central = all_central and bool(center[block].all())
    derived = generate_subloop(L, values)
    squares = L.table[np.arange(L.order), np.arange(L.order)]
    exp2 = bool(center[squares].all())
    dim = None
    if all_central and exp2:
        dim = int(round(math.log2(L.order // int(center.sum()))))
    return StructureReport(
        nuc_left=fs(left),
        nuc_mid=fs(mid),
        nuc_right=fs(right),
        nucleus=fs(nuc),
        commutant=fs(comm),
        center=fs(center),
        derived=derived,
        central_by_abelian=all_central,
        exp2=exp2,
        dim=dim,
    )


def is_associative(L: LoopTable) -> bool:
    return check_triples(L, lambda a, b, c: L.mul(L.mul(a, b), c) == L.mul(a, L.mul(b, c))) is None


def direct_product(A: LoopTable, B: LoopTable) -> LoopTable:
    """A x B with element (a, b) at index a*|B| + b."""
    na, nb = A.order, B.order
    a = np.repeat(np.arange(na), nb)
    b = np.tile(np.arange(nb), na)
    t = A.table[a[:, None], a[None, :]] * nb + B.table[b[:, None], b[None, :]]
    names = []
    for i, j in zip(a, b):
        x, y = A.names[i], B.names[j]
        names.append(x if y == "1" else y if x == "1" else f"({x},{y})")
    if len(set(names)) != len(names):
        names = [f"({A.names[i]},{B.names[j]})" for i, j in zip(a, b)]
    return LoopTable(t, names)
