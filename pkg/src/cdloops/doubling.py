"""Cayley-Dickson doubling of loops with involution.

The double of an order-n loop L has order 2n. Element ``a`` of L keeps its
index and ``a.j`` sits at index ``n + a``, so ``j`` itself is element ``n``.
The multiplication is

    a(bj) = (ba)j,    (aj)b = (ab*)j,    (aj)(bj) = gamma b* a,

and, when epsilon is given, the involution extends by ``(aj)* = (epsilon a)j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .involution import Involution, identity_involution, inverse_involution, validate_involution
from .loop import LoopError, LoopTable, is_associative, validate_loop


class ParamError(LoopError):
    pass


class GammaNotCentral(ParamError):
    pass


class EpsilonNotCentral(ParamError):
    pass


class EpsilonNotOrderTwo(ParamError):
    pass


class EpsilonGammaNotSymmetric(ParamError):
    pass


class NotAssociative(LoopError):
    pass


class OddCenter(LoopError):
    pass


class DoublingStepError(ParamError):
    """A parameter failure inside an iterated doubling."""

    def __init__(self, step: int, cause: ParamError):
        super().__init__(f"step {step}: {cause}")
        self.step = step
        self.cause = cause


@dataclass(frozen=True)
class DoublingParams:
    gamma: int
    epsilon: int | None = None


@dataclass(frozen=True)
class DoubleResult:
    M: LoopTable
    star: Involution | None
    base: LoopTable
    base_star: Involution
    params: DoublingParams
    j: int
    embed: tuple[int, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.order


def validate_params(L: LoopTable, inv: Involution, gamma: int, epsilon: int | None = None) -> DoublingParams:
    center = L.center
    if gamma not in center:
        raise GammaNotCentral(f"gamma = {L.name(gamma)} is not central")
    if epsilon is not None:
        if epsilon not in center:
            raise EpsilonNotCentral(f"epsilon = {L.name(epsilon)} is not central")
        if L.mul(epsilon, epsilon) != 0:
            raise EpsilonNotOrderTwo(f"epsilon = {L.name(epsilon)} does not square to 1")
        eg = int(L.mul(epsilon, gamma))
        if int(inv.perm[eg]) != eg:
            raise EpsilonGammaNotSymmetric(
                f"(epsilon gamma)* = {L.name(inv.perm[eg])} differs from epsilon gamma = {L.name(eg)}"
            )
    return DoublingParams(int(gamma), None if epsilon is None else int(epsilon))


def _double_names(names: Sequence[str], gen: str) -> list[str]:
    def tag(s: str) -> str:
        if s == "1":
            return gen
        if s == "-1":
            return "-" + gen
        return s + gen

    out = list(names) + [tag(s) for s in names]
    if len(set(out)) != len(out):
        out = list(names) + [f"({s}){gen}" for s in names]
    return out


def double_table(L: LoopTable, star: np.ndarray, gamma: int) -> np.ndarray:
    n = L.order
    t = L.table
    a = np.arange(n)[:, None]
    b = np.arange(n)[None, :]
    out = np.empty((2 * n, 2 * n), dtype=np.int32)
    out[:n, :n] = t
    out[:n, n:] = n + t[b, a]  # a(bj) = (ba)j
    out[n:, :n] = n + t[a, star[b]]  # (aj)b = (ab*)j
    out[n:, n:] = t[gamma, t[star[b], a]]  # (aj)(bj) = gamma b* a
    return out


def double(L: LoopTable, inv: Involution, params: DoublingParams, gen: str = "j") -> DoubleResult:
    n = L.order
    table = double_table(L, inv.perm, params.gamma)
    M = validate_loop(table, _double_names(L.names, gen))
    star = None
    if params.epsilon is not None:
        a = np.arange(n)
        perm = np.concatenate([inv.perm, n + L.mul(params.epsilon, a)])
        star = validate_involution(M, perm)
    return DoubleResult(M=M, star=star, base=L, base_star=inv, params=params, j=n, embed=tuple(range(n)))


def double_iterate(
    L: LoopTable,
    inv: Involution,
    gammas: Sequence[int],
    epsilons: Sequence[int | None],
    gens: Sequence[str] | None = None,
) -> list[DoubleResult]:
    """Left-to-right iterated doubling; ids of L stay valid in every step."""
    if len(gammas) != len(epsilons):
        raise ValueError("gammas and epsilons must have equal length")
    if gens is None:
        gens = ["j" + "'" * i for i in range(len(gammas))]
    chain = []
    cur, cur_inv = L, inv
    for step, (g, e) in enumerate(zip(gammas, epsilons)):
        if cur_inv is None:
            raise DoublingStepError(step, ParamError("previous step carried no involution"))
        try:
            params = validate_params(cur, cur_inv, g, e)
        except ParamError as exc:
            raise DoublingStepError(step, exc) from exc
        d = double(cur, cur_inv, params, gens[step])
        chain.append(d)
        cur, cur_inv = d.M, d.star
    return chain


def q0() -> tuple[LoopTable, Involution]:
    L = validate_loop([[0, 1], [1, 0]], ["1", "-1"])
    return L, identity_involution(L)


MAX_QN = 8


def build_Qn(n: int) -> list[DoubleResult]:
    """The chain Q_1, ..., Q_n with Q_k = D(Q_{k-1}, *, -1, -1); chain[k-1] is Q_k."""
    if not 0 <= n <= MAX_QN:
        raise ValueError(f"n must lie in [0, {MAX_QN}]")
    L, inv = q0()
    return double_iterate(L, inv, [1] * n, [1] * n, [f"e{k}" for k in range(1, n + 1)])


def Qn(n: int) -> tuple[LoopTable, Involution]:
    if n == 0:
        return q0()
    d = build_Qn(n)[-1]
    return d.M, d.star


def build_chein(G: LoopTable) -> DoubleResult:
    """Chein's M(G, 2) = D(G, inverse, 1, 1)."""
    if not is_associative(G):
        raise NotAssociative("Chein doubling needs a group")
    inv = inverse_involution(G)
    return double(G, inv, DoublingParams(0, 0), "u")


def cyclic_center(m: int) -> LoopTable:
    a = np.arange(m)
    names = ["1"] + [f"w^{k}" if k > 1 else "w" for k in range(1, m)]
    if m % 2 == 0:
        names[m // 2] = "-1"
    return validate_loop((a[:, None] + a[None, :]) % m, names)


def build_general(m: int, gamma_exponents: Sequence[int]) -> list[DoubleResult]:
    """Iterated doubles of Z_m (identity involution) with gamma_i = w^e_i, epsilon = -1."""
    if m <= 0 or m % 2:
        raise OddCenter(f"center order m = {m} must be even and positive")
    L = cyclic_center(m)
    k = len(gamma_exponents)
    return double_iterate(
        L,
        identity_involution(L),
        [int(e) % m for e in gamma_exponents],
        [m // 2] * k,
        [f"j{i}" for i in range(k)],
    )


@dataclass
class OracleReport:
    checks: int = 0
    mismatches: list[tuple] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def record(self, label: str, ok: np.ndarray, coords: Sequence[np.ndarray]):
        ok = np.asarray(ok)
        self.checks += ok.size
        for idx in np.argwhere(~ok):
            self.mismatches.append((label,) + tuple(int(c[tuple(idx)]) for c in coords))


def _abc(n: int):
    a = np.arange(n)[:, None, None]
    b = np.arange(n)[None, :, None]
    c = np.arange(n)[None, None, :]
    return np.broadcast_arrays(a, b, c)


def verify_triple_table(D: DoubleResult) -> OracleReport:
    """Compare all 8 rows of the triple-product table directly in M against L."""
    L, M, n = D.base, D.M, D.n
    s = D.base_star.perm
    g = D.params.gamma
    gs = int(s[g])
    m, l = M.mul, L.mul
    a, b, c = _abc(n)
    J = lambda x: x + n
    report = OracleReport()
    rows = {
        "a b c": ((m(m(a, b), c), m(a, m(b, c))), (l(l(a, b), c), l(a, l(b, c)))),
        "a b cj": ((m(m(a, b), J(c)), m(a, m(b, J(c)))), (J(l(c, l(a, b))), J(l(l(c, b), a)))),
        "a bj c": ((m(m(a, J(b)), c), m(a, m(J(b), c))), (J(l(l(b, a), s[c])), J(l(l(b, s[c]), a)))),
        "a bj cj": (
            (m(m(a, J(b)), J(c)), m(a, m(J(b), J(c)))),
            (l(g, l(s[c], l(b, a))), l(g, l(a, l(s[c], b)))),
        ),
        "aj b c": ((m(m(J(a), b), c), m(J(a), m(b, c))), (J(l(l(a, s[b]), s[c])), J(l(a, l(s[c], s[b]))))),
        "aj b cj": (
            (m(m(J(a), b), J(c)), m(J(a), m(b, J(c)))),
            (l(g, l(s[c], l(a, s[b]))), l(g, l(l(s[b], s[c]), a))),
        ),
        "aj bj c": (
            (m(m(J(a), J(b)), c), m(J(a), m(J(b), c))),
            (l(g, l(l(s[b], a), c)), l(g, l(l(c, s[b]), a))),
        ),
        "aj bj cj": (
            (m(m(J(a), J(b)), J(c)), m(J(a), m(J(b), J(c)))),
            (J(l(g, l(c, l(s[b], a)))), J(l(gs, l(a, l(s[b], c))))),
        ),
    }
    for label, ((lhs_m, rhs_m), (lhs_f, rhs_f)) in rows.items():
        report.record(f"({label}) (xy)z", lhs_m == lhs_f, (a, b, c))
        report.record(f"({label}) x(yz)", rhs_m == rhs_f, (a, b, c))
    return report


def verify_double_formulas(D: DoubleResult) -> OracleReport:
    """Commutator and associator formulas of the double, evaluated both ways."""
    L, M, n = D.base, D.M, D.n
    s = D.base_star.perm
    g = D.params.gamma
    gs = int(s[g])
    l = L.mul
    J = lambda x: x + n
    report = OracleReport()

    a2 = np.arange(n)[:, None] * np.ones((1, n), dtype=int)
    b2 = np.ones((n, 1), dtype=int) * np.arange(n)[None, :]
    c_abj = M.commutator(a2, J(b2))
    c_ajb = M.commutator(J(a2), b2)
    c_ajbj = M.commutator(J(a2), J(b2))
    report.record("[M,M] in L: [a,bj]", c_abj < n, (a2, b2))
    report.record("[M,M] in L: [aj,b]", c_ajb < n, (a2, b2))
    report.record("[M,M] in L: [aj,bj]", c_ajbj < n, (a2, b2))
    # [a,bj] . ab* = a*b*;  [aj,b] . b*a* = ba*;  b*a = a*b . [aj,bj]
    report.record("[a,bj].ab* = a*b*", l(c_abj, l(a2, s[b2])) == l(s[a2], s[b2]), (a2, b2))
    report.record("[aj,b].b*a* = ba*", l(c_ajb, l(s[b2], s[a2])) == l(b2, s[a2]), (a2, b2))
    report.record("b*a = a*b.[aj,bj]", l(s[b2], a2) == l(l(s[a2], b2), c_ajbj), (a2, b2))
    report.record("[bj,a*] = [a,bj]", M.commutator(J(b2), s[a2]) == c_abj, (a2, b2))

    a, b, c = _abc(n)
    direct = {
        "[a,b,c]": M.associator(a, b, c),
        "[a,b,cj]": M.associator(a, b, J(c)),
        "[a,bj,c]": M.associator(a, J(b), c),
        "[a,bj,cj]": M.associator(a, J(b), J(c)),
        "[aj,b,c]": M.associator(J(a), b, c),
        "[aj,b,cj]": M.associator(J(a), b, J(c)),
        "[aj,bj,c]": M.associator(J(a), J(b), c),
        "[aj,bj,cj]": M.associator(J(a), J(b), J(c)),
    }
    for label, val in direct.items():
        report.record(f"[M,M,M] in L: {label}", val < n, (a, b, c))

    if not L.structure.central_by_abelian:
        report.skipped.append("associator formulas: base loop is not central-by-abelian")
        return report

    A = L.associator
    C = L.commutator
    inv = L.inv
    p = lambda *xs: _prod(L, xs)
    formulas = {
        "[a,b,c]": A(a, b, c),
        "[a,b,cj]": p(A(s[a], s[b], s[c]), C(s[b], s[a])),
        "[a,bj,c]": p(inv(A(c, s[a], s[b])), A(s[a], c, s[b]), C(c, s[a])),
        "[a,bj,cj]": p(inv(A(s[c], a, b)), A(a, s[c], b), C(s[c], a), C(b, a)),
        "[aj,b,c]": p(inv(A(c, b, s[a])), C(c, b)),
        "[aj,b,cj]": p(inv(A(s[c], s[b], a)), C(a, s[b]), C(s[c], s[b])),
        "[aj,bj,c]": p(A(s[b], a, c), inv(A(s[b], c, a)), C(s[b], c), C(a, c)),
        "[aj,bj,cj]": p(gs, inv(g), inv(A(s[c], b, s[a])), C(l(s[a], b), s[c]), C(s[a], b)),
    }
    for label, val in formulas.items():
        report.record(label, direct[label] == val, (a, b, c))
    return report


def _prod(L: LoopTable, xs):
    out = xs[0]
    for x in xs[1:]:
        out = L.mul(out, x)
    return out
