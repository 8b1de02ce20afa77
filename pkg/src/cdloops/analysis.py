"""Property predicates and structural criteria for loops and their doubles."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .doubling import DoubleResult, DoublingParams, double
from .involution import Involution, symmetric_center
from .loop import (
    LoopError,
    LoopTable,
    SubloopHandle,
    check_pairs,
    check_singles,
    check_triples,
    generate_subloop,
    normal_quotient_map,
)


class NotInZAE2(LoopError):
    """The loop is not central-by-(elementary abelian 2-group)."""


class DimTooSmall(LoopError):
    pass


class JInU(LoopError):
    pass


class GammaNotSymmetricCentral(LoopError):
    pass


def is_moufang(L: LoopTable) -> bool:
    return moufang_witness(L) is None


def moufang_witness(L: LoopTable):
    # (zx)(yz) = (z(xy))z, quantified as (x, y, z)
    m = L.mul
    return check_triples(L, lambda x, y, z: m(m(z, x), m(y, z)) == m(m(z, m(x, y)), z))


def _subloop_associative(L: LoopTable, members) -> bool:
    idx = np.asarray(members)
    a = idx[:, None, None]
    b = idx[None, :, None]
    c = idx[None, None, :]
    return bool((L.mul(L.mul(a, b), c) == L.mul(a, L.mul(b, c))).all())


def power_associative_witness(L: LoopTable):
    for x in range(L.order):
        if not _subloop_associative(L, generate_subloop(L, [x]).members):
            return (x,)
    return None


def diassociative_witness(L: LoopTable):
    """First pair (a, b), a <= b, whose generated subloop is not a group."""
    seen: dict[tuple[int, ...], bool] = {}
    covered = []
    for a in range(L.order):
        for b in range(a, L.order):
            if any(m[a] and m[b] for m in covered):
                continue
            members = generate_subloop(L, [a, b]).members
            ok = seen.get(members)
            if ok is None:
                ok = seen[members] = _subloop_associative(L, members)
                if ok:
                    mask = np.zeros(L.order, dtype=bool)
                    mask[list(members)] = True
                    covered.append(mask)
            if not ok:
                return (a, b)
    return None


def is_diassociative(L: LoopTable) -> bool:
    return diassociative_witness(L) is None


FLAGS = (
    "commutative",
    "associative",
    "flexible",
    "left_alternative",
    "right_alternative",
    "alternative",
    "moufang",
    "power_associative",
    "diassociative",
    "central_by_abelian",
    "exp2",
    "inverse_property",
    "weak_inverse",
    "anti_automorphic_inverse",
    "well_defined_inverse",
    "anti_commutative",
    "anti_symmetric",
)


@dataclass
class PropertyReport:
    commutative: bool
    associative: bool
    flexible: bool
    left_alternative: bool
    right_alternative: bool
    alternative: bool
    moufang: bool
    power_associative: bool
    diassociative: bool
    central_by_abelian: bool
    exp2: bool
    inverse_property: bool
    weak_inverse: bool
    anti_automorphic_inverse: bool
    well_defined_inverse: bool
    anti_commutative: bool
    anti_symmetric: bool | None  # None without an involution
    witness: dict[str, tuple] = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in FLAGS}
        out["witness"] = {k: list(v) for k, v in self.witness.items()}
        return out


def property_report(L: LoopTable, inv: Involution | None = None) -> PropertyReport:
    m, ld, rd = L.mul, L.ldiv, L.rdiv
    lam = lambda x: rd(0, x)
    rho = lambda x: ld(x, 0)
    s = L.structure
    zmask = L.center_mask
    w: dict[str, tuple | None] = {}
    w["commutative"] = check_pairs(L, lambda x, y: m(x, y) == m(y, x))
    w["associative"] = check_triples(L, lambda x, y, z: m(m(x, y), z) == m(x, m(y, z)))
    w["flexible"] = check_pairs(L, lambda x, y: m(m(x, y), x) == m(x, m(y, x)))
    w["left_alternative"] = check_pairs(L, lambda x, y: m(x, m(x, y)) == m(m(x, x), y))
    w["right_alternative"] = check_pairs(L, lambda x, y: m(m(y, x), x) == m(y, m(x, x)))
    w["alternative"] = w["left_alternative"] or w["right_alternative"]
    w["moufang"] = moufang_witness(L)
    w["power_associative"] = power_associative_witness(L)
    w["diassociative"] = diassociative_witness(L)
    w["central_by_abelian"] = check_pairs(L, lambda x, y: zmask[L.commutator(x, y)])
    if w["central_by_abelian"] is not None:
        pass
    elif not s.central_by_abelian:
        w["central_by_abelian"] = check_triples(L, lambda x, y, z: zmask[L.associator(x, y, z)])
    w["exp2"] = check_singles(L, lambda x: zmask[m(x, x)])
    w["inverse_property"] = check_pairs(
        L, lambda x, y: (m(lam(x), m(x, y)) == y) & (m(m(x, y), rho(y)) == x)
    )
    w["weak_inverse"] = check_pairs(L, lambda x, y: m(x, m(y, rho(m(x, y)))) == 0)
    w["anti_automorphic_inverse"] = check_pairs(L, lambda x, y: lam(m(x, y)) == m(lam(y), lam(x)))
    w["well_defined_inverse"] = check_singles(L, lambda x: lam(x) == rho(x))
    w["anti_commutative"] = check_pairs(
        L, lambda x, y: zmask[x] | zmask[y] | zmask[m(x, y)] | (L.commutator(x, y) != 0)
    )
    anti_sym = None
    if inv is not None:
        p = inv.perm
        w["anti_symmetric"] = check_singles(L, lambda x: zmask[x] | (p[x] != x))
        anti_sym = w["anti_symmetric"] is None
    flags = {k: w[k] is None for k in FLAGS if k != "anti_symmetric"}
    return PropertyReport(
        **flags,
        anti_symmetric=anti_sym,
        witness={k: v for k, v in w.items() if v is not None},
    )


# --- central quotients over F_2 -------------------------------------------


@dataclass(frozen=True)
class CentralQuotient:
    """L/Z(L) as an F_2 vector space; ``masks[x]`` are the coordinates of x."""

    loop: LoopTable
    masks: np.ndarray
    basis: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def preimage(self, space) -> SubloopHandle:
        space = set(space)
        members = tuple(int(x) for x in np.flatnonzero(np.isin(self.masks, list(space))))
        return SubloopHandle(self.loop, members)

    def image(self, S) -> frozenset[int]:
        return frozenset(int(self.masks[x]) for x in S)


def central_quotient(L: LoopTable) -> CentralQuotient:
    s = L.structure
    if s.dim is None:
        raise NotInZAE2("L/Z(L) is not an elementary abelian 2-group")
    Z = SubloopHandle(L, tuple(sorted(s.center)))
    Q, cls = normal_quotient_map(L, Z)
    span = {0: 0}
    basis = []
    for c in range(Q.order):
        if c in span:
            continue
        bit = 1 << len(basis)
        basis.append(c)
        span.update({int(Q.mul(x, c)): v | bit for x, v in list(span.items())})
    reps = [int(np.argmax(cls == c)) for c in basis]
    masks = np.array([span[int(c)] for c in cls])
    return CentralQuotient(L, masks, tuple(reps))


def span_of(vectors) -> frozenset[int]:
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return frozenset(out)


def subspaces(vectors, d: int) -> list[frozenset[int]]:
    """All d-dimensional subspaces spanned by elements of ``vectors`` (sorted)."""
    found = set()
    for combo in itertools.combinations(sorted(set(vectors) - {0}), d):
        sp = span_of(combo)
        if len(sp) == 1 << d:
            found.add(sp)
    return sorted(found, key=lambda sp: sorted(sp))


MAX_DIM = 8


def locally_moufang_elements(M: LoopTable, inv: Involution | None = None) -> frozenset[int]:
    """Elements all of whose 3-dimensional subloops (taken modulo Z(M)) are Moufang."""
    q = central_quotient(M)
    if q.dim < 3:
        raise DimTooSmall(f"dim = {q.dim} < 3")
    if q.dim > MAX_DIM:
        raise DimTooSmall(f"dim = {q.dim} exceeds the enumeration cap {MAX_DIM}")
    bad = set()
    for sp in subspaces(range(1 << q.dim), 3):
        if not is_moufang(q.preimage(sp).as_loop()):
            bad |= sp
    return frozenset(x for x in range(M.order) if int(q.masks[x]) not in bad)


def j_partners(M: LoopTable, base: SubloopHandle | None, U: SubloopHandle, j: int) -> list[SubloopHandle]:
    """All j-partners of U, lifted to full preimages in M."""
    q = central_quotient(M)
    u = q.image(U)
    if len(u) & (len(u) - 1):
        raise LoopError("U does not project to a subspace of M/Z")
    jm = int(q.masks[j])
    if jm in u:
        raise JInU("the class of j lies in U")
    d = len(u).bit_length() - 1
    W = span_of(u | {jm})
    parts = [sp for sp in subspaces(W, d) if jm not in sp and sp != u]
    lifted = [q.preimage(sp) for sp in parts]
    if base is not None:
        inside = lambda S: all(x in base for x in S)
        lifted.sort(key=lambda S: not inside(S))
    return lifted


def diassociative_fast(L: LoopTable, inv: Involution | None = None, with_witness: bool = False):
    """Diassociativity via the 4^3 associators on {1, x, y, xy} per pair."""
    if L.structure.dim is None:
        raise NotInZAE2("finite-basis test needs L in ZA and E2")
    n = L.order
    x = np.arange(n)[:, None]
    y = np.arange(n)[None, :]
    x, y = np.broadcast_arrays(x, y)
    U = np.stack([np.zeros_like(x), x, y, L.mul(x, y)])  # (4, n, n)
    A = L.associator(U[:, None, None], U[None, :, None], U[None, None, :])  # (4,4,4,n,n)
    bad = np.argwhere(A != 0)
    witness = None
    if bad.size:
        # first by (x, y), then by (u, v, w)
        k = min(bad.tolist(), key=lambda r: (r[3], r[4], r[0], r[1], r[2]))
        xi, yi = k[3], k[4]
        witness = (xi, yi, int(U[k[0], xi, yi]), int(U[k[1], xi, yi]), int(U[k[2], xi, yi]))
    ok = witness is None
    return (ok, witness) if with_witness else ok


@dataclass
class MoufangDoubleReport:
    conditions: dict[str, bool]
    witness: dict[str, tuple]
    predicted: bool
    actual: bool


def moufang_double_report(L: LoopTable, inv: Involution, gamma: int) -> MoufangDoubleReport:
    if gamma not in symmetric_center(L, inv):
        raise GammaNotSymmetricCentral(f"gamma = {L.name(gamma)} is not a symmetric central element")
    m = L.mul
    s = inv.perm
    nuc = np.zeros(L.order, dtype=bool)
    nuc[list(L.structure.nucleus)] = True
    w = {
        "1 L is Moufang": moufang_witness(L),
        "2 [a,cc*] = 1": check_pairs(L, lambda a, c: L.commutator(a, m(c, s[c])) == 0),
        "3 [c,c*] = 1": check_singles(L, lambda c: L.commutator(c, s[c]) == 0),
        "4 [a,c,c*] = 1": check_pairs(L, lambda a, c: L.associator(a, c, s[c]) == 0),
        "5 cc*c in Nuc": check_singles(L, lambda c: nuc[m(m(c, s[c]), c)]),
    }
    conditions = {k: v is None for k, v in w.items()}
    D = double(L, inv, DoublingParams(int(gamma)))
    return MoufangDoubleReport(
        conditions=conditions,
        witness={k: v for k, v in w.items() if v is not None},
        predicted=all(conditions.values()),
        actual=is_moufang(D.M),
    )


@dataclass
class OctonionResult:
    is_octonion: bool
    alpha: int | None
    dim: int | None
    moufang: bool
    basis_associators: frozenset[int]


def octonion_check(O: LoopTable, inv: Involution | None = None) -> OctonionResult:
    dim = O.structure.dim
    moufang = is_moufang(O)
    values: frozenset[int] = frozenset()
    if dim is not None and dim >= 3:
        q = central_quotient(O)
        reps = {}
        for x in range(O.order):
            reps.setdefault(int(q.masks[x]), x)
        vecs = sorted(v for v in reps if v)
        vals = set()
        for u, v, t in itertools.permutations(vecs, 3):
            if len(span_of((u, v, t))) == 8:
                vals.add(int(O.associator(reps[u], reps[v], reps[t])))
        values = frozenset(vals)
    is_oct = dim == 3 and moufang
    alpha = next(iter(values)) if is_oct and len(values) == 1 else None
    if is_oct and alpha is None:
        raise AssertionError("octonion loop with non-constant basis associator")
    return OctonionResult(is_oct, alpha, dim, moufang, values)


@dataclass
class KirshReport:
    x: int
    y: int
    z: int
    assoc_xyz: int
    octonion_xyz: OctonionResult
    triple: tuple[int, int, int]
    triple_in_subloop: bool
    triple_is_basis: bool
    assoc_triple: int
    assoc_triple_formula: int
    subloop: SubloopHandle
    octonion_subloop: OctonionResult
    refuted: bool

    def lines(self, L3: LoopTable, L4: LoopTable) -> list[str]:
        nm = L4.name
        a, b, c = self.triple
        return [
            f"x, y, z = {L3.name(self.x)}, {L3.name(self.y)}, {L3.name(self.z)}",
            f"[x,y,z] = {L3.name(self.assoc_xyz)}",
            f"<x,y,z>: octonion = {self.octonion_xyz.is_octonion}, alpha = "
            f"{None if self.octonion_xyz.alpha is None else L3.name(self.octonion_xyz.alpha)}",
            f"<xj,yj,zj>: order = {self.subloop.order}, dim = {self.octonion_subloop.dim}, "
            f"moufang = {self.octonion_subloop.moufang}",
            f"(xz, yz, zj) = ({nm(a)}, {nm(b)}, {nm(c)}), in subloop = {self.triple_in_subloop}, "
            f"basis = {self.triple_is_basis}",
            f"[xz,yz,zj] = {nm(self.assoc_triple)} (direct), {nm(self.assoc_triple_formula)} (formula)",
            f"basis associators of <xj,yj,zj>: {sorted(nm(v) for v in self.octonion_subloop.basis_associators)}",
            f"claim refuted: {self.refuted}",
        ]


def _first_octonion_triple(L: LoopTable):
    q = central_quotient(L)
    for x, y, z in itertools.combinations(range(L.order), 3):
        if len(span_of(int(q.masks[v]) for v in (x, y, z))) != 8:
            continue
        sub = generate_subloop(L, [x, y, z])
        res = octonion_check(sub.as_loop())
        if res.is_octonion and res.alpha is not None and res.alpha != 0:
            return x, y, z, res
    raise AssertionError("no nonassociative octonion subloop found")


def kirsh_refutation(Q3: DoubleResult, Q4: DoubleResult, xyz: tuple[int, int, int] | None = None) -> KirshReport:
    L, M = Q3.M, Q4.M
    if Q4.base is not L and Q4.base != L:
        raise LoopError("Q4 must be the double of Q3")
    if xyz is None:
        x, y, z, oct_xyz = _first_octonion_triple(L)
    else:
        x, y, z = xyz
        oct_xyz = octonion_check(generate_subloop(L, [x, y, z]).as_loop())
    n = L.order
    J = lambda v: v + n
    P = generate_subloop(M, [J(x), J(y), J(z)])
    a, b, c = int(L.mul(x, z)), int(L.mul(y, z)), J(z)
    assoc = int(M.associator(a, b, c))
    # [a,b,cj] = [a*,b*,c*][b*,a*] computed in Q3
    s = Q3.star.perm
    formula = int(L.mul(L.associator(s[a], s[b], s[z]), L.commutator(s[b], s[a])))
    qm = central_quotient(M)
    is_basis = len(span_of(int(qm.masks[v]) for v in (a, b, c))) == 8
    sub_oct = octonion_check(P.as_loop())
    in_sub = all(v in P for v in (a, b, c))
    refuted = (
        oct_xyz.alpha is not None
        and oct_xyz.alpha != 0
        and in_sub
        and is_basis
        and assoc == 0
        and not (sub_oct.is_octonion and sub_oct.alpha not in (None, 0))
    )
    return KirshReport(
        x=x,
        y=y,
        z=z,
        assoc_xyz=int(L.associator(x, y, z)),
        octonion_xyz=oct_xyz,
        triple=(a, b, c),
        triple_in_subloop=in_sub,
        triple_is_basis=is_basis,
        assoc_triple=assoc,
        assoc_triple_formula=formula,
        subloop=P,
        octonion_subloop=sub_oct,
        refuted=refuted,
    )
