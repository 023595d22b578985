"""Finite Set-endofunctors built from a small grammar.

    F ::= Id | Const(C) | Pow | F x F | F + F | F . F | Neigh(kappa) | VPow

Element encodings are canonical and hashable: Pow X elements are frozensets
listed in bitmask order, products are pairs, coproducts are ``(tag, value)``
pairs, and Neigh / VPow elements are tuples of quantale elements (value
tables over an enumerated domain).
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .errors import MismatchError
from .limits import check_size
from .report import LawReport
from .vrel import (FinMap, FinSet, all_maps, all_relations, arity, compose_maps,
                   identity_map, power, relation_count)


class FinFunctor:
    """Base class; subclasses define ``_obj`` and ``map_elem``."""

    def obj(self, X):
        out = _obj_cached(self, X)
        check_size(f"{self.name}({X.name})", len(out))
        return out

    def fmap(self, f):
        FX = self.obj(f.src)
        FY = self.obj(f.tgt)
        return FinMap.from_indices(FX, FY, [FY.index(self.map_elem(f, e)) for e in FX])

    def map_elem(self, f, e):
        raise NotImplementedError

    def encode(self, X, e, enc=lambda x: x):
        raise NotImplementedError

    def decode(self, X, data, dec=lambda d: d):
        raise NotImplementedError

    def show(self, X, e):
        import json
        return json.dumps(self.encode(X, e, _plain), separators=(",", ":"))

    def __str__(self):
        return self.name


def _plain(x):
    if isinstance(x, tuple):
        return [_plain(v) for v in x]
    return x


@lru_cache(maxsize=4096)
def _obj_cached(F, X):
    return F._obj(X)


def _atom(X, x):
    if x not in X:
        raise MismatchError(f"{x!r} is not an element of {X.name}")
    return x


@dataclass(frozen=True)
class Id(FinFunctor):
    name: str = field(default="Id", init=False)

    def _obj(self, X):
        return X

    def map_elem(self, f, e):
        return f(e)

    def encode(self, X, e, enc=lambda x: x):
        return enc(e)

    def decode(self, X, data, dec=lambda d: d):
        return _atom(X, dec(data))

    def to_json(self):
        return {"op": "id"}


@dataclass(frozen=True)
class Const(FinFunctor):
    C: FinSet

    @property
    def name(self):
        return f"Const({self.C.name})"

    def _obj(self, X):
        return self.C

    def map_elem(self, f, e):
        return e

    def encode(self, X, e, enc=lambda x: x):
        return e

    def decode(self, X, data, dec=lambda d: d):
        return _atom(self.C, data)

    def to_json(self):
        return {"op": "const", "set": list(self.C.elements), "name": self.C.name}


@dataclass(frozen=True)
class Pow(FinFunctor):
    name: str = field(default="Pow", init=False)

    def _obj(self, X):
        n = len(X)
        check_size(f"Pow({X.name})", 2 ** n)
        elems = X.elements
        return FinSet(f"P{X.name}", (frozenset(elems[i] for i in range(n) if m >> i & 1)
                                     for m in range(1 << n)))

    def map_elem(self, f, e):
        return frozenset(f(x) for x in e)

    def encode(self, X, e, enc=lambda x: x):
        return [enc(x) for x in X if x in e]

    def decode(self, X, data, dec=lambda d: d):
        return frozenset(_atom(X, dec(d)) for d in data)

    def to_json(self):
        return {"op": "pow"}


@dataclass(frozen=True)
class Prod(FinFunctor):
    left: FinFunctor
    right: FinFunctor

    @property
    def name(self):
        return f"({self.left.name} x {self.right.name})"

    def _obj(self, X):
        L, R = self.left.obj(X), self.right.obj(X)
        check_size(f"{self.name}({X.name})", len(L) * len(R))
        return FinSet(f"{L.name}x{R.name}", product(L, R))

    def map_elem(self, f, e):
        return (self.left.map_elem(f, e[0]), self.right.map_elem(f, e[1]))

    def encode(self, X, e, enc=lambda x: x):
        return [self.left.encode(X, e[0], enc), self.right.encode(X, e[1], enc)]

    def decode(self, X, data, dec=lambda d: d):
        return (self.left.decode(X, data[0], dec), self.right.decode(X, data[1], dec))

    def to_json(self):
        return {"op": "prod", "args": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True)
class Coprod(FinFunctor):
    left: FinFunctor
    right: FinFunctor

    @property
    def name(self):
        return f"({self.left.name} + {self.right.name})"

    def _obj(self, X):
        L, R = self.left.obj(X), self.right.obj(X)
        return FinSet(f"{L.name}+{R.name}", [(0, e) for e in L] + [(1, e) for e in R])

    def map_elem(self, f, e):
        side = self.left if e[0] == 0 else self.right
        return (e[0], side.map_elem(f, e[1]))

    def encode(self, X, e, enc=lambda x: x):
        side = self.left if e[0] == 0 else self.right
        return {"tag": e[0], "value": side.encode(X, e[1], enc)}

    def decode(self, X, data, dec=lambda d: d):
        tag = data["tag"]
        side = self.left if tag == 0 else self.right
        return (tag, side.decode(X, data["value"], dec))

    def to_json(self):
        return {"op": "coprod", "args": [self.left.to_json(), self.right.to_json()]}


@dataclass(frozen=True)
class Comp(FinFunctor):
    """``outer . inner``."""

    outer: FinFunctor
    inner: FinFunctor

    @property
    def name(self):
        return f"{self.outer.name}.{self.inner.name}"

    def _obj(self, X):
        return self.outer.obj(self.inner.obj(X))

    def map_elem(self, f, e):
        return self.outer.map_elem(self.inner.fmap(f), e)

    def encode(self, X, e, enc=lambda x: x):
        return self.outer.encode(self.inner.obj(X), e, lambda ie: self.inner.encode(X, ie, enc))

    def decode(self, X, data, dec=lambda d: d):
        return self.outer.decode(self.inner.obj(X), data, lambda d: self.inner.decode(X, d, dec))

    def to_json(self):
        return {"op": "comp", "args": [self.outer.to_json(), self.inner.to_json()]}


def _relation_domain(q, X, k):
    return tuple(all_relations(q, X, arity(k)))


def _rel_index(q, flat):
    n = q.size
    idx = 0
    for v in flat:
        idx = idx * n + v
    return idx


@dataclass(frozen=True)
class Neigh(FinFunctor):
    """Generalised monotone neighbourhood functor ``Pos(P_{V^kappa} -, V)``.

    ``Neigh(k) X`` consists of the monotone maps from ``V-Rel(X, k)`` (pointwise
    order) to ``V``, stored as value tuples over ``all_relations(q, X, k)``.
    With ``enriched=True`` only the V-functorial maps are kept.
    """

    kappa: int
    q: object
    enriched: bool = False

    @property
    def name(self):
        return f"Neigh{self.kappa}" + ("e" if self.enriched else "")

    def domain(self, X):
        self.q.require_finite("Neigh")
        check_size(f"V-Rel({X.name},{self.kappa})", relation_count(self.q, X, arity(self.kappa)))
        return _relation_domain(self.q, X, self.kappa)

    def _obj(self, X):
        q = self.q
        dom = self.domain(X)
        flats = [r.flat() for r in dom]
        m = len(dom)
        below = [[j for j in range(i) if all(q.leq(a, b) for a, b in zip(flats[j], flats[i]))]
                 for i in range(m)]
        dist = None
        if self.enriched:
            dist = [[q.meet(q.hom(a, b) for a, b in zip(flats[i], flats[j])) for j in range(m)]
                    for i in range(m)]
        cap_name = f"{self.name}({X.name})"
        out = []
        vals = [None] * m

        def extend(i):
            if i == m:
                out.append(tuple(vals))
                check_size(cap_name, len(out))
                return
            for v in q.carrier:
                if not all(q.leq(vals[j], v) for j in below[i]):
                    continue
                if dist is not None and not all(
                        q.leq(dist[j][i], q.hom(vals[j], v)) and q.leq(dist[i][j], q.hom(v, vals[j]))
                        for j in range(i)):
                    continue
                vals[i] = v
                extend(i + 1)
            vals[i] = None

        extend(0)
        return FinSet(f"{self.name}({X.name})", out)

    def map_elem(self, f, e):
        q = self.q
        pos = [f.assignment[i] for i in range(len(f.src))]
        out = []
        for g in self.domain(f.tgt):
            rows = g.entries
            out.append(e[_rel_index(q, [v for i in pos for v in rows[i]])])
        return tuple(out)

    def encode(self, X, e, enc=lambda x: x):
        return [self.q.fmt(v) for v in e]

    def decode(self, X, data, dec=lambda d: d):
        return tuple(self.q.parse(v) for v in data)

    def to_json(self):
        return {"op": "neigh", "kappa": self.kappa, "enriched": self.enriched}


@dataclass(frozen=True)
class VPow(FinFunctor):
    """The V-valued powerset ``X -> V^X`` with ``(Pf phi)(y) = join_{f(x)=y} phi(x)``."""

    q: object
    name: str = field(default="VPow", init=False)

    def _obj(self, X):
        P = power(self.q, X)
        return FinSet(f"V^{X.name}", P.elements)

    def map_elem(self, f, e):
        q = self.q
        acc = [q.bottom] * len(f.tgt)
        for v, j in zip(e, f.assignment):
            acc[j] = q.join2(acc[j], v)
        return tuple(acc)

    def encode(self, X, e, enc=lambda x: x):
        return [self.q.fmt(v) for v in e]

    def decode(self, X, data, dec=lambda d: d):
        return tuple(self.q.parse(v) for v in data)

    def to_json(self):
        return {"op": "vpow"}


def apply_obj(F, X):
    return F.obj(X)


def apply_map(F, f):
    return F.fmap(f)


def check_functoriality(F, sets):
    """Identity and composition laws on every map between the sample sets."""
    rep = LawReport(f"functor {F.name}")
    bad = None
    for X in sets:
        if F.fmap(identity_map(X)) != identity_map(F.obj(X)):
            bad = X.name
            break
    rep.add("F(id) = id", bad is None, len(sets), bad)
    bad = None
    count = 0
    for X, Y, Z in product(sets, repeat=3):
        gs = list(all_maps(Y, Z))
        for f in all_maps(X, Y):
            Ff = F.fmap(f)
            for g in gs:
                count += 1
                if F.fmap(compose_maps(g, f)) != compose_maps(F.fmap(g), Ff):
                    bad = (f, g)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("F(g.f) = Fg.Ff", bad is None, count, bad)
    return rep


def check_taut_sample(F, sets):
    """Preservation of inverse images along injections (sanity check for Pow)."""
    rep = LawReport(f"tautness sample {F.name}")
    bad = None
    count = 0
    for X, Y in product(sets, repeat=2):
        for m in all_maps(X, Y):
            if not m.is_injective():
                continue
            Fm = F.fmap(m)
            for f in all_maps(Y, Y):
                count += 1
                # pullback of the mono m along f, computed in Set and after F
                pre = [x for x in Y if f(x) in set(m.images())]
                P = FinSet("pre", pre)
                img = set(Fm.images())
                lhs = {e for e in F.obj(Y) if F.map_elem(f, e) in img}
                rhs = set(F.fmap(FinMap(P, Y, pre)).images())
                if lhs != rhs:
                    bad = (m, f)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("preserves inverse images of monos", bad is None, count, bad)
    return rep


class NatTrans:
    """A natural transformation given by an element-level rule ``(X, e) -> e'``."""

    def __init__(self, src, tgt, rule, name="alpha"):
        self.src = src
        self.tgt = tgt
        self.rule = rule
        self.name = name

    def component(self, X):
        S, T = self.src.obj(X), self.tgt.obj(X)
        return FinMap.from_indices(S, T, [T.index(self.rule(X, e)) for e in S])

    def __call__(self, X, e):
        return self.rule(X, e)

    def __repr__(self):
        return f"NatTrans({self.name}: {self.src.name} -> {self.tgt.name})"


def identity_nat(F):
    return NatTrans(F, F, lambda X, e: e, name=f"1_{F.name}")


def singleton():
    """``Id -> Pow``, ``x -> {x}``."""
    return NatTrans(Id(), Pow(), lambda X, x: frozenset([x]), name="singleton")


def check_naturality(alpha, sets):
    rep = LawReport(f"naturality of {alpha.name}")
    bad = None
    count = 0
    for X, Y in product(sets, repeat=2):
        aX, aY = alpha.component(X), alpha.component(Y)
        for f in all_maps(X, Y):
            count += 1
            if compose_maps(aY, alpha.src.fmap(f)) != compose_maps(alpha.tgt.fmap(f), aX):
                bad = f
                break
        if bad:
            break
    rep.add("alpha_Y . Gf = Ff . alpha_X", bad is None, count, bad)
    return rep


def neigh_obj(kappa, X, q, enriched=False):
    return Neigh(kappa, q, enriched).obj(X)


def functor_from_json(data, q=None):
    op = data["op"] if isinstance(data, dict) else data
    if op == "id":
        return Id()
    if op == "pow":
        return Pow()
    if op == "const":
        return Const(FinSet(data.get("name", "C"), data["set"]))
    if op in ("prod", "coprod", "comp"):
        args = [functor_from_json(a, q) for a in data["args"]]
        if len(args) < 2:
            raise MismatchError(f"{op} needs two arguments")
        cls = {"prod": Prod, "coprod": Coprod, "comp": Comp}[op]
        out = args[-1]
        for a in reversed(args[:-1]):
            out = cls(a, out)
        return out
    if op == "neigh":
        return Neigh(int(data["kappa"]), q, bool(data.get("enriched", False)))
    if op == "vpow":
        return VPow(q)
    raise MismatchError(f"unknown functor op {op!r}")
