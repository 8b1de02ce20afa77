"""Small named loops used by the tests, the CLI and the reproduction suite."""
from __future__ import annotations

import itertools

import numpy as np

from .involution import Involution, identity_involution, inverse_involution, validate_involution
from .loop import LoopTable, direct_product, validate_loop


def cyclic(m: int) -> LoopTable:
    a = np.arange(m)
    names = ["1"] + [f"g^{k}" if k > 1 else "g" for k in range(1, m)]
    return validate_loop((a[:, None] + a[None, :]) % m, names)


def elementary_abelian(k: int) -> LoopTable:
    n = 1 << k
    a = np.arange(n)
    names = ["1"] + ["".join(f"v{i + 1}" for i in range(k) if x >> i & 1) for x in range(1, n)]
    return validate_loop(a[:, None] ^ a[None, :], names)


def symmetric_group(k: int) -> LoopTable:
    perms = sorted(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    # composition (p q)(x) = p(q(x))
    t = [[index[tuple(p[q[x]] for x in range(k))] for q in perms] for p in perms]
    names = ["1" if p == tuple(range(k)) else "".join(map(str, p)) for p in perms]
    return validate_loop(t, names)


def dihedral(m: int) -> LoopTable:
    """Dihedral group of order 2m: r^a s^e with s r s = r^-1."""
    els = [(a, e) for e in (0, 1) for a in range(m)]
    index = {x: i for i, x in enumerate(els)}

    def mul(x, y):
        a, e = x
        b, f = y
        return ((a + (-b if e else b)) % m, e ^ f)

    t = [[index[mul(x, y)] for y in els] for x in els]
    names = [("1" if a == 0 else f"r{a}") if e == 0 else (f"r{a}s" if a else "s") for a, e in els]
    return validate_loop(t, names)


def order6_loop() -> LoopTable:
    """The nonassociative central extension of Z_3 by {+-1}.

    Elements 1, -1, s, -s, s2, -s2 with s.s = s2, s.s2 = 1, s2.s = -1,
    s2.s2 = s and -1 central of order 2.
    """
    base = {(0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (1, 0): (1, 0), (2, 0): (2, 0),
            (1, 1): (2, 0), (1, 2): (0, 0), (2, 1): (0, 1), (2, 2): (1, 0)}
    els = [(k, sgn) for k in range(3) for sgn in (0, 1)]
    index = {x: i for i, x in enumerate(els)}
    t = []
    for k1, s1 in els:
        row = []
        for k2, s2 in els:
            k, s = base[(k1, k2)]
            row.append(index[(k, s ^ s1 ^ s2)])
        t.append(row)
    return validate_loop(t, ["1", "-1", "s", "-s", "s2", "-s2"])


def order6_involution(L: LoopTable) -> Involution:
    """s* = s2, (s2)* = s, (-x)* = -(x*)."""
    return validate_involution(L, [0, 1, 4, 5, 2, 3])


def commutative_dim2_loop() -> LoopTable:
    """{+-1, +-a1, +-a2, +-a3}, a_i^2 = -1 and a_i a_j = a_k for distinct i, j, k."""
    els = [(k, sgn) for k in range(4) for sgn in (0, 1)]
    index = {x: i for i, x in enumerate(els)}
    t = []
    for k1, s1 in els:
        row = []
        for k2, s2 in els:
            if k1 == 0 or k2 == 0:
                k, s = k1 + k2, 0
            elif k1 == k2:
                k, s = 0, 1
            else:
                k, s = 6 - k1 - k2, 0
            row.append(index[(k, s ^ s1 ^ s2)])
        t.append(row)
    names = ["1", "-1", "a1", "-a1", "a2", "-a2", "a3", "-a3"]
    return validate_loop(t, names)


def class2_group_dim3() -> LoopTable:
    """Order-32 group with center Z_2^2 and quotient Z_2^3.

    Elements (v, c) in F_2^3 x F_2^2 with (v, c)(w, d) = (v + w, c + d + beta(v, w)),
    beta(v, w) = (v1 w2, v2 w3). Associative, dimension 3.
    """
    els = [(v, c) for v in range(8) for c in range(4)]
    index = {x: i for i, x in enumerate(sorted(els, key=lambda x: (x[0], x[1])))}
    bit = lambda v, i: (v >> i) & 1

    def beta(v, w):
        return (bit(v, 0) & bit(w, 1)) | ((bit(v, 1) & bit(w, 2)) << 1)

    order = sorted(els, key=lambda x: (x[0], x[1]))
    t = [[index[(v ^ w, c ^ d ^ beta(v, w))] for (w, d) in order] for (v, c) in order]
    names = ["1" if x == (0, 0) else f"x{x[0]}z{x[1]}" for x in order]
    return validate_loop(t, names)


def klein() -> LoopTable:
    return elementary_abelian(2)


def loops_with_involution() -> list[tuple[str, LoopTable, Involution]]:
    """The default corpus of small loops with involution (orders <= 16)."""
    from .doubling import Qn, build_chein

    out = []

    def add(name, L, inv):
        out.append((name, L, inv))

    for m in (2, 3, 4):
        Z = cyclic(m)
        add(f"Z{m}/id", Z, identity_involution(Z))
    Z4 = cyclic(4)
    add("Z4/inv", Z4, inverse_involution(Z4))
    V = klein()
    add("Z2^2/id", V, identity_involution(V))
    add("Z2^2/swap", V, validate_involution(V, [0, 2, 1, 3]))
    E3 = elementary_abelian(3)
    add("Z2^3/id", E3, identity_involution(E3))
    Z42 = direct_product(cyclic(4), cyclic(2))
    add("Z4xZ2/inv", Z42, inverse_involution(Z42))
    add("Z4xZ2/id", Z42, identity_involution(Z42))
    S3 = symmetric_group(3)
    add("S3/inv", S3, inverse_involution(S3))
    D4 = dihedral(4)
    add("D4/inv", D4, inverse_involution(D4))
    for k in (1, 2, 3):
        L, inv = Qn(k)
        add(f"Q{k}", L, inv)
    O6 = order6_loop()
    add("order6", O6, order6_involution(O6))
    C8 = commutative_dim2_loop()
    add("dim2comm/id", C8, identity_involution(C8))
    ch = build_chein(S3)
    add("M(S3,2)", ch.M, inverse_involution(ch.M))
    return out
