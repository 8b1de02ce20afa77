"""Automorphism groups of finite loops by generator-image backtracking."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import NotInZAE2, central_quotient
from .doubling import DoubleResult
from .involution import Involution, validate_involution
from .loop import LoopError, LoopTable, associator_block

MAX_ORDER = 256
STORE_LIMIT = 10_000
FLAVORS = ("plain", "star", "star_fixing")


class OrderCapExceeded(LoopError):
    pass


class QuotientNotElementaryAbelian(LoopError):
    pass


@dataclass
class AutGroup:
    n: int
    order: int
    generators: list[tuple[int, ...]]
    elements: list[tuple[int, ...]] | None  # None above STORE_LIMIT
    flavor: str = "plain"
    epsilon: int | None = None

    def __len__(self):
        return self.order

    def __contains__(self, perm) -> bool:
        if self.elements is None:
            raise LoopError("group too large to hold its elements")
        return tuple(int(x) for x in perm) in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_cache")
        if s is None:
            s = self.__dict__["_cache"] = frozenset(self.elements)
        return s

    def array(self) -> np.ndarray:
        if self.elements is None:
            raise LoopError("group too large to hold its elements")
        return np.array(self.elements, dtype=np.int64).reshape(-1, self.n)


def compose(s, t) -> tuple[int, ...]:
    """(s t)(x) = s(t(x))."""
    s = np.asarray(s)
    return tuple(int(v) for v in s[np.asarray(t)])


def is_automorphism(L: LoopTable, perm) -> bool:
    p = np.asarray(perm)
    if p.shape != (L.order,) or len(np.unique(p)) != L.order:
        return False
    return bool((p[L.table] == L.table[p[:, None], p[None, :]]).all())


# --- invariants ---------------------------------------------------------


def _cycle_to_identity(L: LoopTable) -> np.ndarray:
    """Length of the orbit of 1 under right multiplication by x."""
    n = L.order
    cur = np.arange(n)
    out = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    x = np.arange(n)
    for k in range(1, n + 1):
        cur = L.table[cur, x] if k > 1 else x.copy()
        hit = alive & (cur == 0)
        out[hit] = k
        alive &= ~hit
        if not alive.any():
            break
    return out


def _base_colours(L: LoopTable, inv: Involution | None, flavor: str, epsilon: int | None, extra) -> np.ndarray:
    n = L.order
    s = L.structure
    t = L.table
    cols = [_cycle_to_identity(L)]
    for S in (s.center, s.nuc_left, s.nuc_mid, s.nuc_right, s.commutant):
        m = np.zeros(n, dtype=np.int64)
        m[list(S)] = 1
        cols.append(m)
    cols.append((t == t.T).sum(axis=1))
    left = np.zeros(n, dtype=np.int64)
    mid = np.zeros(n, dtype=np.int64)
    right = np.zeros(n, dtype=np.int64)
    r = np.arange(n)
    for a in range(n):
        # counts of pairs (y, z) with [a,y,z], [y,a,z], [y,z,a] trivial
        left[a] = (t[t[a][:, None], r[None, :]] == t[a][t]).sum()
        mid[a] = (t[t[:, a][:, None], r[None, :]] == t[r[:, None], t[a][None, :]]).sum()
        right[a] = (t[:, a][t] == t[r[:, None], t[:, a][None, :]]).sum()
    cols += [left, mid, right]
    if flavor != "plain":
        cols.append((inv.perm == r).astype(np.int64))
    if flavor == "star_fixing" and epsilon is not None:
        e = np.zeros(n, dtype=np.int64)
        e[epsilon] = 1
        cols.append(e)
    if extra is not None:
        cols.append(np.asarray(extra, dtype=np.int64))
    _, c = np.unique(np.stack(cols, axis=1), axis=0, return_inverse=True)
    return c.reshape(-1)


def pair_invariant(L: LoopTable) -> np.ndarray:
    """P[x, y] encodes #{z : [x,y,z] = 1} and #{z : [x,z,y] = 1}."""
    n = L.order
    P = np.zeros((n, n), dtype=np.int64)
    for x in range(n):
        A = associator_block(L, x).reshape(n, n) == 0
        P[x] = A.sum(axis=1) * (n + 1) + A.sum(axis=0)
    _, P = np.unique(P, return_inverse=True)
    return P.reshape(n, n)


def _refine(L: LoopTable, c: np.ndarray, inv: Involution | None, P: np.ndarray | None = None) -> np.ndarray:
    t = L.table
    if P is None:
        P = _pairs_of(L)
    kp = int(P.max()) + 1
    while True:
        k = int(c.max()) + 1
        code = ((c[None, :] * k + c[t]) * k + c[t.T]) * kp + P
        code = np.sort(code, axis=1)
        cols = [c[:, None], code]
        if inv is not None:
            cols.insert(1, c[inv.perm][:, None])
        _, new = np.unique(np.concatenate(cols, axis=1), axis=0, return_inverse=True)
        new = new.reshape(-1)
        if new.max() == c.max():
            return new
        c = new


_PAIR_CACHE: dict[int, tuple[LoopTable, np.ndarray]] = {}


def _pairs_of(L: LoopTable) -> np.ndarray:
    hit = _PAIR_CACHE.get(id(L))
    if hit is None or hit[0] is not L:
        if len(_PAIR_CACHE) > 8:
            _PAIR_CACHE.clear()
        hit = _PAIR_CACHE[id(L)] = (L, pair_invariant(L))
    return hit[1]


def colour_classes(L: LoopTable, inv: Involution | None = None, flavor: str = "plain",
                   epsilon: int | None = None, extra=None) -> np.ndarray:
    """An automorphism-invariant colouring of the elements (stable refinement)."""
    if flavor != "plain" and inv is None:
        raise LoopError(f"flavor {flavor!r} needs an involution")
    c = _base_colours(L, inv, flavor, epsilon, extra)
    return _refine(L, c, inv if flavor != "plain" else None)


# --- search ---------------------------------------------------------------


def _individualize(c: np.ndarray, x: int) -> np.ndarray:
    mark = np.zeros_like(c)
    mark[x] = 1
    _, out = np.unique(np.stack([c, mark], axis=1), axis=0, return_inverse=True)
    return out.reshape(-1)


@dataclass
class _Level:
    gen: int
    rounds: list[tuple[np.ndarray, np.ndarray, np.ndarray]]  # (new, x, y): new = x y
    members: np.ndarray  # closure of the generators up to and including this one
    before: np.ndarray  # source colouring with earlier generators individualized
    after: np.ndarray  # ... and this one too


def _plan(L: LoopTable, c: np.ndarray, inv) -> list[_Level]:
    t = L.table
    n = L.order
    inside = np.zeros(n, dtype=bool)
    inside[0] = True
    levels = []
    while not inside.all():
        rest = np.flatnonzero(~inside)
        size = np.bincount(c)
        g = int(rest[np.lexsort((rest, size[c[rest]]))[0]])
        inside[g] = True
        known = np.flatnonzero(inside)
        rounds = []
        while True:
            prod = t[known[:, None], known[None, :]]
            fresh = ~inside[prod]
            if not fresh.any():
                break
            ii, jj = np.nonzero(fresh)
            vals, first = np.unique(prod[ii, jj], return_index=True)
            rounds.append((vals, known[ii[first]], known[jj[first]]))
            inside[vals] = True
            known = np.flatnonzero(inside)
        after = _refine(L, _individualize(c, g), inv)
        levels.append(_Level(g, rounds, known, c, after))
        c = after
    return levels


class _Searcher:
    """Individualization-refinement search for colour-preserving automorphisms."""

    def __init__(self, L: LoopTable, c: np.ndarray, inv: Involution | None):
        self.L = L
        self.t = L.table
        self.inv = inv
        self.p = None if inv is None else inv.perm
        self.levels = _plan(L, c, inv)
        self.hist = [np.bincount(lv.after) for lv in self.levels]

    def _assign(self, k: int, phi: np.ndarray, h: int) -> bool:
        lv = self.levels[k]
        t = self.t
        phi[lv.gen] = h
        for new, x, y in lv.rounds:
            phi[new] = t[phi[x], phi[y]]
        m = lv.members
        img = phi[m]
        if len(np.unique(img)) != len(img):
            return False
        if not (phi[t[m[:, None], m[None, :]]] == t[img[:, None], img[None, :]]).all():
            return False
        if self.p is not None:
            sel = m[phi[self.p[m]] >= 0]
            if not (phi[self.p[sel]] == self.p[phi[sel]]).all():
                return False
        return True

    def _undo(self, k: int, phi: np.ndarray):
        lv = self.levels[k]
        phi[lv.gen] = -1
        for new, _, _ in lv.rounds:
            phi[new] = -1

    def extend(self, k: int, phi: np.ndarray, cR: np.ndarray, h: int):
        """Map generator k to h and complete to an automorphism, or return None."""
        lv = self.levels[k]
        if (phi == h).any() or cR[h] != lv.before[lv.gen]:
            return None
        found = None
        if self._assign(k, phi, h):
            c2 = _refine(self.L, _individualize(cR, h), self.inv)
            h2 = np.bincount(c2)
            if len(h2) == len(self.hist[k]) and (h2 == self.hist[k]).all() and (
                c2[phi[lv.members]] == lv.after[lv.members]
            ).all():
                if k + 1 == len(self.levels):
                    found = phi.copy()
                else:
                    nxt = self.levels[k + 1]
                    for h3 in np.flatnonzero(c2 == nxt.before[nxt.gen]):
                        found = self.extend(k + 1, phi, c2, int(h3))
                        if found is not None:
                            break
        if found is None:
            self._undo(k, phi)
        return found

    def run(self) -> tuple[int, list[np.ndarray]]:
        n = self.L.order
        gens: list[np.ndarray] = []
        order = 1
        for k in range(len(self.levels) - 1, -1, -1):
            lv = self.levels[k]
            orbit = _orbit(lv.gen, gens)
            for h in np.flatnonzero(lv.before == lv.before[lv.gen]):
                h = int(h)
                if h in orbit:
                    continue
                phi = np.full(n, -1, dtype=np.int64)
                phi[0] = 0
                for prev in self.levels[:k]:
                    phi[prev.members] = prev.members
                res = self.extend(k, phi, lv.before, h)
                if res is not None:
                    gens.append(res)
                    orbit = _orbit(lv.gen, gens)
            order *= len(orbit)
        return order, gens


def _orbit(x: int, gens) -> set[int]:
    orbit = {x}
    todo = [x]
    while todo:
        y = todo.pop()
        for g in gens:
            z = int(g[y])
            if z not in orbit:
                orbit.add(z)
                todo.append(z)
    return orbit


def _closure(gens: list[np.ndarray], n: int, limit: int) -> list[tuple[int, ...]] | None:
    ident = np.arange(n)
    seen = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for f in frontier:
            for g in gens:
                h = g[f]
                key = h.tobytes()
                if key not in seen:
                    seen[key] = h
                    nxt.append(h)
                    if len(seen) > limit:
                        return None
        frontier = nxt
    return sorted(tuple(int(v) for v in a) for a in seen.values())


def automorphism_group(L: LoopTable, inv: Involution | None = None, flavor: str = "plain",
                       epsilon: int | None = None, *, _extra=None) -> AutGroup:
    """Aut(L), Aut(L,*) or Aut(L,*,epsilon) as an explicit permutation group."""
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    if L.order > MAX_ORDER:
        raise OrderCapExceeded(f"order {L.order} > {MAX_ORDER}")
    if flavor == "star_fixing" and epsilon is None:
        raise ValueError("star_fixing needs epsilon")
    c = colour_classes(L, inv, flavor, epsilon, _extra)
    star = inv if flavor != "plain" else None
    order, gens = _Searcher(L, c, star).run()
    gens = [g.astype(np.int64) for g in gens]
    elements = _closure(gens, L.order, STORE_LIMIT) if order <= STORE_LIMIT else None
    if elements is not None and len(elements) != order:
        raise AssertionError("orbit product and closure disagree")
    generators = sorted(tuple(int(v) for v in g) for g in gens)
    return AutGroup(L.order, order, generators, elements, flavor, epsilon)


# --- doubles ----------------------------------------------------------------


def _star_of(D: DoubleResult) -> Involution:
    if D.star is not None:
        return D.star
    # without epsilon the involution on M is taken with epsilon = 1
    n = D.n
    perm = np.concatenate([D.base_star.perm, n + np.arange(n)])
    return validate_involution(D.M, perm)


def _epsilon_of(D: DoubleResult) -> int:
    return 0 if D.params.epsilon is None else int(D.params.epsilon)


def aut_preserving(D: DoubleResult, flavor: str = "plain") -> AutGroup:
    """Automorphisms of the double that stabilize L and Z(L) j setwise."""
    n = D.n
    mark = np.zeros(2 * n, dtype=np.int64)
    mark[:n] = 1
    mark[n + np.array(sorted(D.base.center))] = 2
    inv = _star_of(D) if flavor != "plain" else None
    eps = _epsilon_of(D) if flavor == "star_fixing" else None
    return automorphism_group(D.M, inv, flavor, eps, _extra=mark)


@dataclass
class CorrespondenceReport:
    lhs_order: int
    rhs_order: int
    lhs_star_order: int
    rhs_star_order: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _pairs(D: DoubleResult, fixing: bool) -> set[tuple[tuple[int, ...], int]]:
    L, s = D.base, D.base_star
    g = D.params.gamma
    if fixing:
        A = automorphism_group(L, s, "star_fixing", _epsilon_of(D))
    else:
        A = automorphism_group(L, s, "star")
    out = set()
    for sig in A.elements:
        lhs = int(L.rdiv(sig[g], g))
        for p in sorted(L.center):
            if lhs == int(L.mul(s.perm[p], p)):
                out.add((sig, p))
    return out


def pair_correspondence_check(D: DoubleResult) -> CorrespondenceReport:
    """Match Aut(M; L, Zj) with admissible pairs (sigma, p), sigma(j) = p j."""
    n = D.n
    L = D.base
    rep = CorrespondenceReport(0, 0, 0, 0)
    for flavor, fixing in (("plain", False), ("star", True)):
        A = aut_preserving(D, flavor)
        rhs = _pairs(D, fixing)
        image = {}
        for phi in A.elements:
            p = phi[n] - n
            key = (phi[:n], p)
            if not 0 <= p < n or p not in L.center:
                rep.violations.append(f"{flavor}: sigma(j) j^-1 not central for {phi}")
                continue
            if key in image:
                rep.violations.append(f"{flavor}: map not injective at {key}")
            image[key] = phi
            if key not in rhs:
                rep.violations.append(f"{flavor}: pair {key} fails the condition")
        for key in sorted(rhs - set(image)):
            rep.violations.append(f"{flavor}: pair {key} has no automorphism")
        # multiplicativity: (sigma, p)(tau, q) = (sigma tau, p sigma(q))
        els = A.elements
        step = max(1, len(els) // 40)
        for a in els[::step]:
            for b in els[::step]:
                ab = compose(a, b)
                want = int(L.mul(a[n] - n, a[b[n] - n]))
                if ab[n] - n != want:
                    rep.violations.append(f"{flavor}: product rule fails for {a}, {b}")
        if flavor == "plain":
            rep.lhs_order, rep.rhs_order = A.order, len(rhs)
        else:
            rep.lhs_star_order, rep.rhs_star_order = A.order, len(rhs)
    return rep


def is_characteristic(M: LoopTable, S, flavor: str = "plain", inv: Involution | None = None,
                      aut: AutGroup | None = None) -> bool:
    members = np.array(sorted(S), dtype=np.int64)
    if aut is None:
        aut = automorphism_group(M, inv, flavor)
    for g in aut.generators:
        if not np.isin(np.asarray(g)[members], members).all():
            return False
    return True


def moving_automorphism(M: LoopTable, S, aut: AutGroup) -> tuple[int, ...] | None:
    members = np.array(sorted(S), dtype=np.int64)
    for g in aut.generators:
        if not np.isin(np.asarray(g)[members], members).all():
            return g
    return None


# --- linear action on M/Z ---------------------------------------------------


@dataclass
class LinearAction:
    matrices: dict[int, np.ndarray]
    faithful: bool
    image_order: int
    kernel: list[int]
    basis: tuple[int, ...]


def _matrix(q, phi) -> np.ndarray:
    k = q.dim
    m = np.zeros((k, k), dtype=np.uint8)
    for col, b in enumerate(q.basis):
        v = int(q.masks[phi[b]])
        for row in range(k):
            m[row, col] = (v >> row) & 1
    return m


def induced_linear_action(M: LoopTable, aut: AutGroup) -> LinearAction:
    """Bit-matrices (columns = images of basis classes) of each automorphism on M/Z(M)."""
    try:
        q = central_quotient(M)
    except NotInZAE2 as exc:
        raise QuotientNotElementaryAbelian(str(exc)) from None
    els = aut.elements if aut.elements is not None else aut.generators
    mats = {i: _matrix(q, phi) for i, phi in enumerate(els)}
    ident = np.eye(q.dim, dtype=np.uint8)
    kernel = [i for i, m in mats.items() if np.array_equal(m, ident)]
    images = {m.tobytes() for m in mats.values()}
    return LinearAction(
        matrices=mats,
        faithful=len(kernel) == 1,
        image_order=len(images),
        kernel=kernel,
        basis=q.basis,
    )


def gl_order(k: int) -> int:
    out = 1
    for i in range(k):
        out *= (1 << k) - (1 << i)
    return out
