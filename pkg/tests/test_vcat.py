import random
from itertools import product

import pytest

from laxrel.errors import MismatchError, NotFullyFaithful
from laxrel.quantale import boolean, free_on_monoid, godel, lukasiewicz
from laxrel.vcat import (VCat, VFunctor, canonical, check_fully_faithful, check_vcat,
                         check_vfunctor, closure, dual, extend_along_embedding,
                         identity_functor, is_dense_map, is_dense_subset, is_separated,
                         natural_order, power_dual_structure, power_vcat, tensor_with)
from laxrel.vrel import (FinMap, FinSet, VRel, all_maps, arity, converse, identity,
                         random_relation, top_rel)

B = boolean()
G2 = godel(2)
FREE = free_on_monoid(["e", "a"], [["e", "a"], ["a", "e"]], "e")


def chain(q, n):
    X = FinSet(f"C{n}", [f"c{i}" for i in range(n)])
    return VCat(X, VRel(q, X, X, [[q.top if i <= j else q.bottom for j in range(n)]
                                  for i in range(n)]))


@pytest.mark.parametrize("q", [B, G2, lukasiewicz(4), FREE], ids=lambda q: q.name)
def test_canonical_structure_is_a_vcategory(q):
    V = canonical(q)
    assert check_vcat(V.obj, V.a).ok


def test_identity_map_is_a_vfunctor():
    A = canonical(G2)
    assert check_vfunctor(identity_functor(A).f, A, A).ok


def test_non_transitive_structure_fails_with_triple():
    X = FinSet("X", ["a", "b", "c"])
    a = VRel(B, X, X, [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    rep = check_vcat(X, a)
    assert rep["reflexive"].passed
    assert not rep["transitive"].passed
    assert rep["transitive"].witness == ("a", "b", "c")


def test_natural_order_of_canonical_godel_is_carrier_order():
    V = canonical(G2)
    le = natural_order(V)
    assert le == tuple(tuple(G2.leq(u, v) for v in G2.carrier) for u in G2.carrier)
    assert is_separated(V)


def test_indiscrete_is_not_separated_and_dual_reverses_order():
    X = FinSet("X", ["a", "b"])
    assert not is_separated(VCat(X, top_rel(B, X, X)))
    C = chain(G2, 3)
    assert natural_order(dual(C)) == tuple(zip(*natural_order(C)))


def test_power_vcat_structure_and_tensors():
    S = arity(2)
    P = power_vcat(G2, S)
    assert check_vcat(P.obj, P.a).ok
    for h, l in product(P.obj, repeat=2):
        assert P(h, l) == G2.meet(G2.hom(a, b) for a, b in zip(h, l))
    u = G2.parse("1/2")
    assert tensor_with(G2, u, (2, 0)) == (1, 0)
    assert power_dual_structure(G2, S) == converse(P.a)


def test_closure_and_density_basics():
    C = chain(B, 3)
    assert closure(C, list(C.obj)) == list(C.obj)
    assert is_dense_map(FinMap(C.obj, C.obj, list(C.obj)), C)
    X = FinSet("X", ["a", "b", "c"])
    ind = VCat(X, top_rel(B, X, X))
    for k in range(1, 4):
        for M in product(X, repeat=k):
            assert is_dense_subset(ind, sorted(set(M)))
    assert not is_dense_subset(C, ["c0"])


def test_dense_map_rejects_wrong_target():
    C = chain(B, 2)
    with pytest.raises(MismatchError):
        is_dense_map(FinMap(C.obj, FinSet("Y", ["y"]), ["y", "y"]), C)


def test_extend_along_identity_is_phi():
    A = chain(G2, 3)
    V = canonical(G2)
    phi = VFunctor(FinMap(A.obj, V.obj, [0, 1, 2]), A, V)
    psi = extend_along_embedding(identity_functor(A), phi)
    assert psi.f == phi.f


def test_extend_from_subchain_is_least_monotone_extension():
    C = chain(B, 2)
    A = VCat(FinSet("A", ["c1"]), VRel(B, FinSet("A", ["c1"]), FinSet("A", ["c1"]), [[1]]))
    i = VFunctor(FinMap(A.obj, C.obj, ["c1"]), A, C)
    V = canonical(B)
    phi = VFunctor(FinMap(A.obj, V.obj, [B.top]), A, V)
    psi = extend_along_embedding(i, phi)
    assert check_vfunctor(psi.f, C, V).ok
    assert psi.f(i.f("c1")) == B.top
    candidates = [g for g in all_maps(C.obj, V.obj)
                  if check_vfunctor(g, C, V).ok and g("c1") == B.top]
    assert psi.f in candidates
    assert all(all(B.leq(a, b) for a, b in zip(psi.f.images(), g.images())) for g in candidates)


def test_extend_from_empty_category():
    C = chain(G2, 2)
    E = FinSet("E", [])
    A = VCat(E, VRel(G2, E, E, []))
    V = canonical(G2)
    psi = extend_along_embedding(VFunctor(FinMap(E, C.obj, []), A, C),
                                 VFunctor(FinMap(E, V.obj, []), A, V))
    assert psi.f.images() == [G2.bottom, G2.bottom]


def test_not_fully_faithful_embedding_is_rejected():
    C = chain(B, 2)
    X = FinSet("D", ["d0", "d1"])
    D = VCat(X, identity(B, X))
    i = VFunctor(FinMap(X, C.obj, ["c0", "c1"]), D, C)
    with pytest.raises(NotFullyFaithful) as exc:
        check_fully_faithful(i)
    assert exc.value.pair == ("d0", "d1")


def test_phi_must_be_a_vfunctor():
    C = chain(B, 2)
    V = canonical(B)
    phi = VFunctor(FinMap(C.obj, V.obj, [1, 0]), C, V)
    with pytest.raises(MismatchError):
        extend_along_embedding(identity_functor(C), phi)


def test_random_embeddings_extend():
    rng = random.Random(11)
    for _ in range(15):
        q = rng.choice([B, G2, lukasiewicz(3)])
        V = canonical(q)
        vals = sorted(rng.sample(list(q.carrier), rng.randint(1, q.size)))
        X = FinSet("X", [f"v{v}" for v in vals])
        Xc = VCat(X, VRel(q, X, X, [[q.hom(u, v) for v in vals] for u in vals]))
        sub = sorted(rng.sample(range(len(vals)), rng.randint(0, len(vals))))
        Aobj = FinSet("A", [X[k] for k in sub])
        Ac = VCat(Aobj, VRel(q, Aobj, Aobj, [[Xc.a[a, b] for b in sub] for a in sub]))
        i = VFunctor(FinMap(Aobj, X, list(Aobj)), Ac, Xc)
        phi = None
        for _ in range(50):
            f = FinMap(Aobj, V.obj, [rng.choice(list(q.carrier)) for _ in Aobj])
            if check_vfunctor(f, Ac, V).ok:
                phi = VFunctor(f, Ac, V)
                break
        if phi is None:
            phi = VFunctor(FinMap(Aobj, V.obj, [q.top] * len(Aobj)), Ac, V)
        psi = extend_along_embedding(i, phi)
        assert check_vfunctor(psi.f, Xc, V).ok
        assert [psi.f(i.f(a)) for a in Aobj] == phi.f.images()


def test_random_structure_is_usually_not_a_vcat():
    rng = random.Random(3)
    X = FinSet("X", ["a", "b", "c"])
    fails = sum(not check_vcat(X, random_relation(G2, X, X, rng)).ok for _ in range(20))
    assert fails > 0
