import numpy as np
import pytest

from cdloops.analysis import is_moufang
from cdloops.corpus import cyclic, klein, loops_with_involution, order6_involution, order6_loop, symmetric_group
from cdloops.doubling import (
    DoublingParams,
    DoublingStepError,
    EpsilonGammaNotSymmetric,
    EpsilonNotCentral,
    EpsilonNotOrderTwo,
    GammaNotCentral,
    NotAssociative,
    OddCenter,
    build_chein,
    build_general,
    build_Qn,
    double,
    double_iterate,
    q0,
    validate_params,
    verify_double_formulas,
    verify_triple_table,
)
from cdloops.involution import classify_involution, identity_involution, inverse_involution, symmetric_center
from cdloops.loop import (
    associator,
    direct_product,
    is_associative,
    one_sided_inverses,
    structure_sets,
)
from cdloops.paper_check import main1_check


def _instances(max_order=16, need_epsilon=True):
    """Every corpus (L, *, gamma, epsilon) with admissible central parameters."""
    out = []
    for name, L, inv in loops_with_involution():
        if L.order > max_order:
            continue
        Z = sorted(L.center)
        for g in Z:
            for e in Z if need_epsilon else [None]:
                try:
                    validate_params(L, inv, g, e)
                except Exception:
                    continue
                out.append((f"{name}|g={L.name(g)}|e={None if e is None else L.name(e)}", L, inv, g, e))
    return out


INSTANCES = _instances()
IDS = [i[0] for i in INSTANCES]
BARE = _instances(need_epsilon=False)
BARE_IDS = [i[0] for i in BARE]


def _double(L, inv, g, e):
    return double(L, inv, DoublingParams(g, e))


def test_instance_corpus_size():
    assert len(INSTANCES) >= 40


# --- parameters ---------------------------------------------------------------


def test_qn_params_valid():
    L, inv = q0()
    assert validate_params(L, inv, 1, 1) == DoublingParams(1, 1)


def test_epsilon_gamma_not_symmetric():
    Q1, inv = build_Qn(1)[0].M, build_Qn(1)[0].star
    i = Q1.index("e1")
    with pytest.raises(EpsilonGammaNotSymmetric):
        validate_params(Q1, inv, i, 1)


def test_param_errors():
    G = symmetric_group(3)
    inv = inverse_involution(G)
    r = next(x for x in range(6) if G.mul(x, x) != 0)
    with pytest.raises(GammaNotCentral):
        validate_params(G, inv, r, None)
    with pytest.raises(EpsilonNotCentral):
        validate_params(G, inv, 0, r)
    Z4 = cyclic(4)
    with pytest.raises(EpsilonNotOrderTwo):
        validate_params(Z4, identity_involution(Z4), 0, 1)


def test_trivial_params_on_abelian():
    K = klein()
    assert validate_params(K, identity_involution(K), 0, 0).epsilon == 0


# --- the double ---------------------------------------------------------------


@pytest.mark.parametrize("name,L,inv,g,e", INSTANCES, ids=IDS)
def test_double_layout(name, L, inv, g, e):
    D = _double(L, inv, g, e)
    M, n = D.M, L.order
    assert M.order == 2 * n and D.j == n
    assert (M.table[:n, :n] == L.table).all()
    assert M.mul(D.j, D.j) == g
    a = np.arange(n)
    b = np.arange(n)
    A, B = np.meshgrid(a, b, indexing="ij")
    star = inv.perm
    assert (M.mul(A, n + B) == n + L.mul(B, A)).all()
    assert (M.mul(n + A, B) == n + L.mul(A, star[B])).all()
    assert (M.mul(n + A, n + B) == L.mul(g, L.mul(star[B], A))).all()
    # (aj)* = (eps a)j
    assert (D.star.perm[n + a] == n + L.mul(e, a)).all()


def test_q1_is_z4_with_inverse():
    D = build_Qn(1)[0]
    M = D.M
    assert M.order == 4 and is_associative(M)
    assert M.mul(D.j, D.j) == 1  # i^2 = -1
    assert D.star == inverse_involution(M)


def test_q2_is_quaternion_with_inverse():
    D = build_Qn(2)[-1]
    M = D.M
    assert is_associative(M) and not (M.table == M.table.T).all()
    assert D.star == inverse_involution(M)
    assert sum(int(M.mul(x, x) == 1) for x in range(8)) == 6  # six square roots of -1


def test_q3_moufang_nonassociative():
    D = build_Qn(3)[-1]
    assert D.M.order == 16 and is_moufang(D.M) and not is_associative(D.M)
    assert structure_sets(D.M).center == {0, 1}


def test_trivial_double_is_direct_product():
    for L in (cyclic(3), klein(), cyclic(4)):
        D = _double(L, identity_involution(L), 0, 0)
        P = direct_product(L, cyclic(2))
        n = L.order
        # a -> (a,0), aj -> (a,1); direct_product orders pairs as a*2 + t
        phi = np.array([2 * a for a in range(n)] + [2 * a + 1 for a in range(n)])
        assert (phi[D.M.table] == P.table[phi[:, None], phi[None, :]]).all()


@pytest.mark.parametrize("name,L,inv,g,e", BARE, ids=BARE_IDS)
def test_inverse_formulas(name, L, inv, g, e):
    D = _double(L, inv, g, e)
    M, n, star = D.M, L.order, inv.perm
    g_inv = int(L.ldiv(g, 0))
    gs_inv = int(L.ldiv(star[g], 0))
    for a in range(n):
        lam, _, _ = one_sided_inverses(L, a)
        Mlam, Mrho, _ = one_sided_inverses(M, n + a)
        assert Mlam == n + L.mul(g_inv, star[lam])
        assert Mrho == n + L.mul(gs_inv, star[lam])


def test_jjj_with_nonsymmetric_gamma():
    D1 = build_Qn(1)[0]
    L, inv = D1.M, D1.star
    i = L.index("e1")
    D = double(L, inv, validate_params(L, inv, i, None))
    assert D.star is None
    j = D.j
    expected = L.mul(inv.perm[i], L.ldiv(i, 0))  # i* i^-1 = -1
    assert associator(D.M, j, j, j) == expected
    assert L.name(expected) == "-1"


@pytest.mark.parametrize("name,L,inv,g,e", BARE, ids=BARE_IDS)
def test_inv_perfect(name, L, inv, g, e):
    def perfect(X):
        return all(one_sided_inverses(X, a)[2] for a in range(X.order))

    M = _double(L, inv, g, e).M
    assert perfect(M) == (perfect(L) and int(inv.perm[g]) == g)


@pytest.mark.parametrize("name,L,inv,g,e", INSTANCES, ids=IDS)
def test_center_of_double(name, L, inv, g, e):
    D = _double(L, inv, g, e)
    n = L.order
    ZM = structure_sets(D.M).center
    if inv.is_identity:
        Z = structure_sets(L).center
        assert ZM == Z | {n + z for z in Z}
    else:
        assert ZM == symmetric_center(L, inv)


@pytest.mark.parametrize("name,L,inv,g,e", INSTANCES, ids=IDS)
def test_nucleus_of_double(name, L, inv, g, e):
    D = _double(L, inv, g, e)
    n = L.order
    Z = structure_sets(L).center
    commutative = bool((L.table == L.table.T).all())
    expected = Z | {n + z for z in Z} if commutative and int(inv.perm[g]) == g else Z
    assert structure_sets(D.M).nucleus == expected


@pytest.mark.parametrize("name,L,inv,g,e", [i for i in INSTANCES if i[1].structure.central_by_abelian],
                         ids=[i[0] for i in INSTANCES if i[1].structure.central_by_abelian])
def test_main1_equivalences(name, L, inv, g, e):
    lhs, rhs = main1_check(L, inv, g, e)
    assert lhs == rhs


@pytest.mark.parametrize("name,L,inv,g,e", INSTANCES, ids=IDS)
def test_star_central_iff(name, L, inv, g, e):
    D = _double(L, inv, g, e)
    lhs = classify_involution(D.M, D.star).is_central
    rhs = classify_involution(L, inv).is_super_central and int(inv.perm[g]) == g
    assert lhs == rhs


@pytest.mark.parametrize("name,L,inv,g,e", INSTANCES, ids=IDS)
def test_square_of_aj(name, L, inv, g, e):
    D = _double(L, inv, g, e)
    n = L.order
    a = np.arange(n)
    # (aj)^2 = gamma a* a
    assert (D.M.mul(n + a, n + a) == L.mul(g, L.mul(inv.perm, a))).all()


def test_e2_iff_normal_e2():
    # with gamma symmetric central, (aj)^2 = gamma a* a is central iff a* a is
    for name, L, inv, g, e in INSTANCES:
        if g not in symmetric_center(L, inv):
            continue
        M = _double(L, inv, g, e).M
        lhs = structure_sets(M).exp2
        rhs = structure_sets(L).exp2 and classify_involution(L, inv).is_normal
        assert lhs == rhs, name


def test_dim_grows_unless_identity():
    for name, L, inv, g, e in INSTANCES:
        dL = structure_sets(L).dim
        dM = structure_sets(_double(L, inv, g, e).M).dim
        if dL is None or dM is None:
            continue
        assert dM >= dL, name
        assert (dM == dL) == inv.is_identity, name


# --- iteration and builders -------------------------------------------------------


def test_iterate_over_abelian_group():
    A = cyclic(2)
    chain = double_iterate(A, identity_involution(A), [0, 0, 0], [0, 1, 1])
    assert [d.M.order for d in chain] == [4, 8, 16]


def test_iterate_reports_failing_step():
    L, inv = q0()
    with pytest.raises(DoublingStepError) as exc:
        # step 1: Q1 center is all of Z4 but epsilon = i does not square to 1
        double_iterate(L, inv, [1, 1], [1, 2])
    assert exc.value.step == 1


def test_d2_of_q2():
    D = build_Qn(2)[-1]
    chain = double_iterate(D.M, D.star, [1, 1], [1, 1])
    assert chain[-1].M.order == 32


def test_build_qn_orders_and_cap():
    assert [d.M.order for d in build_Qn(5)] == [4, 8, 16, 32, 64]
    with pytest.raises(ValueError):
        build_Qn(9)


def test_chein_examples():
    assert is_associative(build_chein(cyclic(2)).M)
    M = build_chein(symmetric_group(3)).M
    assert M.order == 12 and is_moufang(M) and not is_associative(M)
    Q2 = build_Qn(2)[-1].M
    M16 = build_chein(Q2).M
    assert M16.order == 16 and is_moufang(M16)
    with pytest.raises(NotAssociative):
        build_chein(order6_loop())


def test_general_reduces_to_qn():
    for a, b in zip(build_general(2, [1, 1, 1]), build_Qn(3)):
        assert (a.M.table == b.M.table).all()
        assert (a.star.perm == b.star.perm).all()


def test_general_m4():
    M = build_general(4, [1, 1, 1])[-1].M
    assert M.order == 32
    assert len(structure_sets(M).center) == 4


def test_general_trivial_gammas():
    step1 = build_general(2, [0, 0, 0])[0].M
    assert step1.order == 4 and is_associative(step1)
    assert all(step1.mul(x, x) == 0 for x in range(4))


def test_general_odd_center():
    with pytest.raises(OddCenter):
        build_general(3, [1])


# --- oracles ---------------------------------------------------------------------


@pytest.mark.parametrize("name,L,inv,g,e", INSTANCES, ids=IDS)
def test_triple_table_oracle(name, L, inv, g, e):
    r = verify_triple_table(_double(L, inv, g, e))
    assert r.ok and r.checks > 0


@pytest.mark.parametrize("name,L,inv,g,e", BARE, ids=BARE_IDS)
def test_formula_oracle(name, L, inv, g, e):
    r = verify_double_formulas(_double(L, inv, g, e))
    assert r.ok
    assert bool(r.skipped) == (not L.structure.central_by_abelian)


def test_oracles_on_order6():
    L = order6_loop()
    D = double(L, order6_involution(L), DoublingParams(1, 1))
    assert verify_triple_table(D).ok
