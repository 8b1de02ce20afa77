import pytest

from cdloops import analysis as an
from cdloops.corpus import (
    class2_group_dim3,
    commutative_dim2_loop,
    cyclic,
    elementary_abelian,
    klein,
    loops_with_involution,
)
from cdloops.doubling import DoublingParams, build_Qn, double, double_iterate, validate_params
from cdloops.involution import classify_involution, identity_involution, inverse_involution, symmetric_center
from cdloops.loop import generate_subloop, is_associative

CORPUS = loops_with_involution()
CORPUS_IDS = [c[0] for c in CORPUS]


@pytest.fixture(scope="module")
def chain():
    return build_Qn(5)


# --- property flags ------------------------------------------------------------------


def test_q3_flags(chain):
    r = an.property_report(chain[2].M, chain[2].star)
    assert r.moufang and r.diassociative and r.exp2 and r.central_by_abelian
    assert not r.associative
    assert r.witness["associative"] is not None


def test_q4_flags(chain):
    r = an.property_report(chain[3].M)
    assert not r.moufang and r.diassociative


def test_abelian_group_flags():
    G = cyclic(6)
    r = an.property_report(G, identity_involution(G))
    for flag in ("commutative", "associative", "moufang", "diassociative", "power_associative", "anti_commutative"):
        assert getattr(r, flag), flag
    assert r.witness == {}


@pytest.mark.parametrize("name,L,inv", CORPUS, ids=CORPUS_IDS)
def test_flag_implications(name, L, inv):
    r = an.property_report(L, inv)
    assert (not r.moufang) or r.diassociative
    assert (not r.diassociative) or r.power_associative
    assert r.alternative == (r.left_alternative and r.right_alternative)
    # one-sided alternativity suffices for loops carrying an involution
    assert r.left_alternative == r.alternative == r.right_alternative


@pytest.mark.parametrize("name,L,inv", CORPUS, ids=CORPUS_IDS)
def test_witnesses_are_counterexamples(name, L, inv):
    r = an.property_report(L, inv)
    w = r.witness
    if "commutative" in w:
        x, y = w["commutative"]
        assert L.mul(x, y) != L.mul(y, x)
    if "associative" in w:
        x, y, z = w["associative"]
        assert L.associator(x, y, z) != 0
    if "moufang" in w:
        x, y, z = w["moufang"]
        assert L.mul(L.mul(z, x), L.mul(y, z)) != L.mul(L.mul(z, L.mul(x, y)), z)


def test_alternativity_of_doubles():
    # left alternative implies alternative also on doubles (with their involutions)
    for name, L, inv in CORPUS:
        for g in sorted(symmetric_center(L, inv)):
            D = double(L, inv, validate_params(L, inv, g, 0))
            r = an.property_report(D.M, D.star)
            assert r.left_alternative == r.alternative == r.right_alternative, name


# --- derivative facts ------------------------------------------------------------------


def _derivative(L, inv):
    return double(L, inv, DoublingParams(0, 0)).M


@pytest.mark.parametrize("name,L,inv", CORPUS, ids=CORPUS_IDS)
def test_derivative_commutative_iff_identity(name, L, inv):
    M = _derivative(L, inv)
    assert bool((M.table == M.table.T).all()) == inv.is_identity


@pytest.mark.parametrize("name,L,inv", CORPUS, ids=CORPUS_IDS)
def test_derivative_associative(name, L, inv):
    M = _derivative(L, inv)
    commutative = bool((L.table == L.table.T).all())
    assert is_associative(M) == (is_associative(L) and commutative)


@pytest.mark.parametrize("name,L,inv", CORPUS, ids=CORPUS_IDS)
def test_normal_involution_moufang_double(name, L, inv):
    if not classify_involution(L, inv).is_normal:
        pytest.skip("involution not normal")
    for g in sorted(symmetric_center(L, inv)):
        M = double(L, inv, DoublingParams(g)).M
        assert an.is_moufang(M) == is_associative(L)


@pytest.mark.parametrize("L", [cyclic(2), cyclic(3), klein(), cyclic(4)], ids=["Z2", "Z3", "Z2^2", "Z4"])
def test_triple_double_moufang_positive(L):
    # commutative Moufang with identity involution: D^3 is Moufang
    chain = double_iterate(L, identity_involution(L), [0, 0, 0], [0, 0, 0])
    assert an.is_moufang(chain[-1].M)


def test_triple_double_moufang_negative():
    # nonidentity involution: D^3 fails
    Z4 = cyclic(4)
    chain = double_iterate(Z4, inverse_involution(Z4), [0, 0, 0], [0, 0, 0])
    assert not an.is_moufang(chain[-1].M)
    Q1 = build_Qn(1)[0]
    chain = double_iterate(Q1.M, Q1.star, [0, 0, 0], [0, 0, 0])
    assert not an.is_moufang(chain[-1].M)


# --- Moufang doubles ------------------------------------------------------------------


def test_moufang_double_positive(chain):
    r = an.moufang_double_report(chain[1].M, chain[1].star, 1)
    assert all(r.conditions.values()) and r.predicted and r.actual


def test_moufang_double_negative(chain):
    Q3 = chain[2]
    r = an.moufang_double_report(Q3.M, Q3.star, 1)
    assert not r.predicted and not r.actual
    assert not r.conditions["5 cc*c in Nuc"]
    assert r.conditions["1 L is Moufang"]


def test_moufang_double_abelian():
    G = klein()
    r = an.moufang_double_report(G, identity_involution(G), 0)
    assert r.predicted and r.actual


def test_moufang_double_needs_symmetric_gamma(chain):
    Q1 = chain[0]
    with pytest.raises(an.GammaNotSymmetricCentral):
        an.moufang_double_report(Q1.M, Q1.star, Q1.M.index("e1"))


@pytest.mark.parametrize("name,L,inv", CORPUS, ids=CORPUS_IDS)
def test_moufang_double_theorem(name, L, inv):
    for g in sorted(symmetric_center(L, inv)):
        r = an.moufang_double_report(L, inv, g)
        assert r.predicted == r.actual


# --- central quotient and subspaces ----------------------------------------------------


def test_central_quotient_q4(chain):
    q = an.central_quotient(chain[3].M)
    assert q.dim == 4
    assert sorted(set(q.masks.tolist())) == list(range(16))


def test_central_quotient_rejects():
    from cdloops.corpus import order6_loop

    with pytest.raises(an.NotInZAE2):
        an.central_quotient(order6_loop())


@pytest.mark.parametrize("k,d,count", [(3, 1, 7), (3, 2, 7), (4, 2, 35), (4, 3, 15)])
def test_subspace_counts(k, d, count):
    # Gaussian binomial coefficients over F_2
    assert len(an.subspaces(range(1 << k), d)) == count


# --- diassociativity ------------------------------------------------------------------


def _zae2_loops(chain):
    out = [(n, L) for n, L, _ in CORPUS if L.structure.dim is not None]
    out += [("Q4", chain[3].M), ("Q5", chain[4].M), ("dim2comm", commutative_dim2_loop()),
            ("class2", class2_group_dim3()), ("Z2^4", elementary_abelian(4))]
    return out


def test_fast_dias_agrees(chain):
    for name, L in _zae2_loops(chain):
        assert an.diassociative_fast(L) == an.is_diassociative(L), name


def test_fast_dias_q5(chain):
    assert an.diassociative_fast(chain[4].M)


def test_fast_dias_witness():
    C = commutative_dim2_loop()
    ok, (x, y, u, v, w) = an.diassociative_fast(C, with_witness=True)
    assert not ok
    assert u == v == x and w == y
    assert C.name(int(C.associator(u, v, w))) == "-1"


def test_fast_dias_requires_zae2():
    from cdloops.corpus import order6_loop

    with pytest.raises(an.NotInZAE2):
        an.diassociative_fast(order6_loop())


def test_diassociative_witness_generates_nonassociative():
    C = commutative_dim2_loop()
    x, y = an.diassociative_witness(C)
    assert not is_associative(generate_subloop(C, [x, y]).as_loop())


# --- j-partners and local Moufang ------------------------------------------------------


def _three_dim_subloops(M, avoid):
    q = an.central_quotient(M)
    jm = int(q.masks[avoid])
    return q, [sp for sp in an.subspaces(range(1 << q.dim), 3) if jm not in sp]


def test_j_partner_counts(chain):
    D = chain[3]
    M, j = D.M, D.j
    q, spaces = _three_dim_subloops(M, j)
    for sp in spaces[:12]:
        U = q.preimage(sp)
        parts = an.j_partners(M, None, U, j)
        assert len(parts) == 2 ** 3 - 1
        # brute force: 3-dim subspaces of <U, j> avoiding j, other than U
        jm = int(q.masks[j])
        W = an.span_of(set(sp) | {jm})
        brute = [s for s in an.subspaces(W, 3) if jm not in s and s != sp]
        assert sorted(sorted(q.image(P)) for P in parts) == sorted(sorted(s) for s in brute)


def test_j_partner_contains_abcj(chain):
    D = chain[3]
    M, j = D.M, D.j
    e = [M.index(f"e{k}") for k in (1, 2, 3)]
    U = generate_subloop(M, e)
    cj = M.mul(e[2], j)
    target = set(generate_subloop(M, [e[0], e[1], cj]))
    parts = an.j_partners(M, None, U, j)
    assert any(set(P) == target for P in parts)


def test_j_partners_one_dim(chain):
    D = chain[3]
    M, j = D.M, D.j
    U = generate_subloop(M, [M.index("e1")])
    parts = an.j_partners(M, None, U, j)
    assert len(parts) == 1
    assert M.mul(M.index("e1"), j) in parts[0]


def test_j_in_u_rejected(chain):
    D = chain[3]
    with pytest.raises(an.JInU):
        an.j_partners(D.M, None, generate_subloop(D.M, [D.j]), D.j)


def test_partners_inside_base_first(chain):
    D = chain[3]
    M, j = D.M, D.j
    base = generate_subloop(M, [M.index("e1"), M.index("e2"), j])
    U = generate_subloop(M, [M.index("e1")])
    parts = an.j_partners(M, base, generate_subloop(M, [M.index("e1"), M.index("e2")]), j)
    assert all(x in base for x in parts[0])
    assert U.order == 4


@pytest.mark.parametrize("which", ["Q3", "class2"])
def test_full1_moufang_pair_is_associative(chain, which):
    # 3-dim subloops O of the base with a Moufang j-partner are associative
    if which == "Q3":
        L, inv = chain[2].M, chain[2].star
    else:
        L = class2_group_dim3()
        inv = inverse_involution(L)
    assert classify_involution(L, inv).is_central
    seen = 0
    for g in sorted(symmetric_center(L, inv)):
        D = double(L, inv, DoublingParams(g))
        M, j = D.M, D.j
        q = an.central_quotient(M)
        base = {int(q.masks[x]) for x in range(L.order)}
        for sp in an.subspaces(sorted(base), 3):
            O = q.preimage(sp).as_loop()
            if not an.is_moufang(O):
                continue
            for P in an.j_partners(M, None, q.preimage(sp), j):
                if an.is_moufang(P.as_loop()):
                    seen += 1
                    assert is_associative(O)
    # Q4 has no Moufang partner pairs; the class-2 group double has several
    assert (seen > 0) == (which == "class2")


def test_full2_diassociative_iff_partner_moufang(chain):
    # Q3 is diassociative: every <Q, j> with Q 2-dimensional is Moufang inside Q4
    D = chain[3]
    M, j = D.M, D.j
    q = an.central_quotient(M)
    base = {int(q.masks[x]) for x in D.embed}
    for sp in an.subspaces(sorted(base), 2):
        assert an.is_moufang(generate_subloop(M, list(q.preimage(sp)) + [j]).as_loop())
    # the commutative dim-2 loop is not diassociative and <L, j> fails
    C = commutative_dim2_loop()
    inv = identity_involution(C)
    DC = double(C, inv, DoublingParams(0, 0))
    assert not an.is_diassociative(C)
    assert not an.is_moufang(DC.M)


def test_locally_moufang_q4(chain):
    D = chain[3]
    lm = an.locally_moufang_elements(D.M)
    assert D.j in lm


def test_locally_moufang_q5(chain):
    D = chain[4]
    M, jp = D.M, D.j
    lm = an.locally_moufang_elements(M)
    allowed = {int(M.mul(z, x)) for z in M.center for x in (0, jp)}
    assert jp in lm and lm <= allowed


def test_locally_moufang_all_in_octonion(chain):
    Q3 = chain[2].M
    assert an.locally_moufang_elements(Q3) == frozenset(range(16))


def test_locally_moufang_dim_too_small(chain):
    with pytest.raises(an.DimTooSmall):
        an.locally_moufang_elements(chain[1].M)


# --- octonion loops and the Kirsh example ------------------------------------------------


def test_octonion_q3(chain):
    r = an.octonion_check(chain[2].M)
    assert r.is_octonion and chain[2].M.name(r.alpha) == "-1"
    assert r.basis_associators == {1}


def test_octonion_q2_dim_two(chain):
    r = an.octonion_check(chain[1].M)
    assert not r.is_octonion and r.dim == 2


def test_octonion_associative_alpha_one():
    r = an.octonion_check(class2_group_dim3())
    assert r.is_octonion and r.alpha == 0


def test_kirsh(chain):
    Q3, Q4 = chain[2], chain[3]
    e = tuple(Q3.M.index(f"e{k}") for k in (1, 2, 3))
    rep = an.kirsh_refutation(Q3, Q4, e)
    assert Q3.M.name(rep.assoc_xyz) == "-1"
    assert rep.octonion_xyz.alpha == 1
    assert rep.assoc_triple == 0 and rep.assoc_triple_formula == 0
    assert rep.triple_in_subloop and rep.triple_is_basis
    assert rep.refuted
    assert len(rep.lines(Q3.M, Q4.M)) == 8


def test_kirsh_search_finds_witness(chain):
    rep = an.kirsh_refutation(chain[2], chain[3])
    assert rep.refuted
