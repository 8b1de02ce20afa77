"""Involutions (anti-automorphisms of order at most 2) and their taxonomy."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .loop import LoopError, LoopTable, check_pairs, check_singles


class InvolutionError(LoopError):
    pass


class NotAntiHom(InvolutionError):
    def __init__(self, a: int, b: int):
        super().__init__(f"(ab)* != b*a* for (a, b) = ({a}, {b})")
        self.witness = (a, b)


class NotOrderTwo(InvolutionError):
    def __init__(self, a: int):
        super().__init__(f"a** != a for a = {a}")
        self.witness = (a,)


class MovesIdentity(InvolutionError):
    def __init__(self):
        super().__init__("1* != 1")


class Involution:
    """A certified involution; ``perm[x]`` is x*."""

    def __init__(self, perm):
        p = np.asarray(perm, dtype=np.int32)
        p.setflags(write=False)
        self.perm = p

    def __call__(self, x):
        return self.perm[x]

    def __len__(self):
        return len(self.perm)

    def __eq__(self, other):
        return isinstance(other, Involution) and np.array_equal(self.perm, other.perm)

    def __hash__(self):
        return hash(self.perm.tobytes())

    def __repr__(self):
        return f"Involution({self.perm.tolist()})"

    @cached_property
    def is_identity(self) -> bool:
        return bool((self.perm == np.arange(len(self.perm))).all())


def validate_involution(L: LoopTable, perm) -> Involution:
    p = np.asarray(perm)
    n = L.order
    if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
        raise InvolutionError("involution must be a permutation of the elements")
    if p[0] != 0:
        raise MovesIdentity()
    w = check_singles(L, lambda a: p[p[a]] == a)
    if w is not None:
        raise NotOrderTwo(*w)
    w = check_pairs(L, lambda a, b: p[L.mul(a, b)] == L.mul(p[b], p[a]))
    if w is not None:
        raise NotAntiHom(*w)
    return Involution(p)


def identity_involution(L: LoopTable) -> Involution:
    return validate_involution(L, np.arange(L.order))


def inverse_involution(L: LoopTable) -> Involution:
    """x -> x^-1; valid when inverses are two-sided and anti-automorphic."""
    lam = L.left_inverse(np.arange(L.order))
    rho = L.right_inverse(np.arange(L.order))
    if not np.array_equal(lam, rho):
        raise InvolutionError("inverses are not two-sided")
    return validate_involution(L, rho)


@dataclass(frozen=True)
class InvolutionReport:
    is_identity: bool
    is_central: bool
    is_super_central: bool
    is_normal: bool
    is_anti_symmetric: bool
    mu: dict[int, int] | None
    nu: dict[int, int] | None
    symmetric_center: frozenset[int]


def symmetric_center(L: LoopTable, inv: Involution) -> frozenset[int]:
    return frozenset(z for z in L.center if int(inv.perm[z]) == z)


def mu_map(L: LoopTable, inv: Involution) -> np.ndarray | None:
    """``mu(a) = a* . a^rho`` if every value is central, else None."""
    a = np.arange(L.order)
    mu = L.mul(inv.perm, L.right_inverse(a))
    if not L.center_mask[mu].all():
        return None
    # a* = mu(a) a must hold too (it does once mu(a) is central, but check)
    if not np.array_equal(L.mul(mu, a), inv.perm):
        return None
    return mu


def nu_map(L: LoopTable, inv: Involution) -> np.ndarray | None:
    nu = L.mul(inv.perm, np.arange(L.order))
    return nu if L.center_mask[nu].all() else None


def classify_involution(L: LoopTable, inv: Involution) -> InvolutionReport:
    mu = mu_map(L, inv)
    nu = nu_map(L, inv)
    central = mu is not None
    super_central = central and bool((L.mul(mu, mu) == 0).all())
    p = inv.perm
    noncentral = ~L.center_mask
    anti_symmetric = not bool((p == np.arange(L.order))[noncentral].any())
    return InvolutionReport(
        is_identity=inv.is_identity,
        is_central=central,
        is_super_central=super_central,
        is_normal=nu is not None,
        is_anti_symmetric=anti_symmetric,
        mu=None if mu is None else {i: int(v) for i, v in enumerate(mu)},
        nu=None if nu is None else {i: int(v) for i, v in enumerate(nu)},
        symmetric_center=symmetric_center(L, inv),
    )
