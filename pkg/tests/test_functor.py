import pytest

import oracles
from laxrel.errors import CapExceeded
from laxrel.functor import (Comp, Const, Coprod, Id, NatTrans, Neigh, Pow, Prod, VPow,
                            apply_map, apply_obj, check_functoriality, check_naturality,
                            check_taut_sample, functor_from_json, identity_nat, neigh_obj,
                            singleton)
from laxrel.limits import size_cap
from laxrel.quantale import boolean, godel
from laxrel.vrel import FinMap, FinSet, all_relations, arity

B = boolean()
SETS = [FinSet(f"X{n}", [f"x{i}" for i in range(n)]) for n in range(3)]
C = FinSet("C", ["p", "q"])


def test_object_sizes():
    X3 = FinSet("X", ["a", "b", "c"])
    assert len(apply_obj(Pow(), X3)) == 8
    assert len(apply_obj(Prod(Id(), Id()), SETS[2])) == 4
    assert len(apply_obj(Coprod(Id(), Const(C)), SETS[2])) == 4
    assert len(apply_obj(Comp(Pow(), Pow()), SETS[1])) == 4


def test_pow_direct_image():
    X = FinSet("X", ["a", "b"])
    Y = FinSet("Y", ["c"])
    Pf = apply_map(Pow(), FinMap(X, Y, ["c", "c"]))
    assert [Pf(A) for A in Pow().obj(X)] == [frozenset(), frozenset("c"), frozenset("c"),
                                            frozenset("c")]


@pytest.mark.parametrize("F", [Id(), Const(C), Pow(), Prod(Id(), Pow()), Coprod(Id(), Const(C)),
                               Comp(Pow(), Prod(Id(), Id())), VPow(godel(2)),
                               Neigh(1, B)], ids=lambda F: F.name)
def test_functoriality(F):
    assert check_functoriality(F, SETS).ok


def test_const_maps_are_identities():
    F = Const(C)
    for f in [FinMap(SETS[2], SETS[1], ["x0", "x0"])]:
        assert F.fmap(f).images() == list(C)


class Broken(Pow):
    def map_elem(self, f, e):
        return frozenset(list(super().map_elem(f, e))[:1])


def test_corrupted_action_fails():
    rep = check_functoriality(Broken(), SETS)
    assert not rep.ok


def test_pow_is_taut_on_samples():
    assert check_taut_sample(Pow(), SETS).ok


def _bool_rel_leq(r, s):
    return all(B.leq(a, b) for a, b in zip(r.flat(), s.flat()))


@pytest.mark.parametrize("n,expected", [(0, 2), (1, 3), (2, 6)])
def test_neigh_counts_match_brute_force(n, expected):
    X = SETS[n]
    dom = list(all_relations(B, X, arity(1)))
    brute = oracles.monotone_map_count(dom, _bool_rel_leq, list(B.carrier), B.leq)
    assert brute == expected
    assert len(neigh_obj(1, X, B)) == expected


def test_enriched_neigh_is_a_subset():
    G = godel(1)
    for X in SETS:
        assert set(neigh_obj(1, X, G, enriched=True)) <= set(neigh_obj(1, X, G))


def test_neigh_cap():
    with size_cap(10):
        with pytest.raises(CapExceeded):
            neigh_obj(1, FinSet("X", list("abcd")), B)


def test_naturality_of_singleton_and_identity():
    assert check_naturality(singleton(), SETS).ok
    assert check_naturality(identity_nat(Pow()), SETS).ok
    bad = NatTrans(Id(), Pow(), lambda X, x: frozenset([x, X[0]]), name="bad")
    assert not check_naturality(bad, SETS + [FinSet("Y", ["y0", "y1", "y2"])]).ok


def test_encode_decode_round_trip():
    X = SETS[2]
    for F in (Pow(), Prod(Id(), Pow()), Coprod(Id(), Const(C)), Comp(Pow(), Pow()), Neigh(1, B)):
        for e in F.obj(X):
            assert F.decode(X, F.encode(X, e)) == e


def test_json_round_trip():
    for F in (Id(), Pow(), Const(C), Prod(Id(), Pow()), Coprod(Pow(), Id()),
              Comp(Pow(), Pow()), Neigh(1, B), VPow(B)):
        assert functor_from_json(F.to_json(), B) == F
