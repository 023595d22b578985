"""V-categories (reflexive, transitive V-relations) and V-functors."""

from dataclasses import dataclass
from itertools import product

from .errors import MismatchError, NotFullyFaithful
from .report import LawReport
from .vrel import (FinMap, FinSet, VRel, compose_all, converse, graph, identity_map,
                   power)


@dataclass(frozen=True)
class VCat:
    obj: FinSet
    a: VRel

    def __post_init__(self):
        if self.a.src != self.obj or self.a.tgt != self.obj:
            raise MismatchError("structure must be an endo-relation on the objects")

    @property
    def q(self):
        return self.a.q

    def __call__(self, x, y):
        return self.a.at(x, y)


@dataclass(frozen=True)
class VFunctor:
    f: FinMap
    dom: VCat
    cod: VCat

    def __post_init__(self):
        if self.f.src != self.dom.obj or self.f.tgt != self.cod.obj:
            raise MismatchError("map does not fit the given V-categories")

    def __call__(self, x):
        return self.f(x)


def check_vcat(X, a):
    q = a.q
    rep = LawReport(f"V-category on {X.name}")
    n = len(X)
    e = a.entries
    bad = next((X[i] for i in range(n) if not q.leq(q.unit, e[i][i])), None)
    rep.add("reflexive", bad is None, n, bad)
    bad = next(((X[i], X[j], X[l]) for i, j, l in product(range(n), repeat=3)
                if not q.leq(q.tensor(e[i][j], e[j][l]), e[i][l])), None)
    rep.add("transitive", bad is None, n ** 3, bad)
    return rep


def check_vfunctor(f, A, B):
    q = A.q
    rep = LawReport(f"V-functor {A.obj.name} -> {B.obj.name}")
    n = len(A.obj)
    fa = f.assignment
    bad = next(((A.obj[i], A.obj[j]) for i, j in product(range(n), repeat=2)
                if not q.leq(A.a[i, j], B.a[fa[i], fa[j]])), None)
    rep.add("a(x,y) <= b(fx,fy)", bad is None, n * n, bad)
    return rep


def dual(A):
    return VCat(A.obj, converse(A.a))


def natural_order(A):
    q = A.q
    return tuple(tuple(q.leq(q.unit, v) for v in row) for row in A.a.entries)


def is_separated(A):
    le = natural_order(A)
    n = len(A.obj)
    return all(i == j or not (le[i][j] and le[j][i]) for i in range(n) for j in range(n))


def canonical(q):
    """``(V, hom)`` on the finite carrier."""
    q.require_finite("(V, hom)")
    V = FinSet("V", q.carrier)
    return VCat(V, VRel.from_function(q, V, V, q.hom))


def power_distance(q, h, l):
    return q.meet(q.hom(a, b) for a, b in zip(h, l))


def power_vcat(q, S):
    """``V^S`` with ``[h, l] = meet_s hom(h(s), l(s))``."""
    P = power(q, S)
    return VCat(P, VRel.from_function(q, P, P, lambda h, l: power_distance(q, h, l)))


def power_dual_structure(q, S):
    """Structure of ``(V^S)^op``, i.e. ``h(l, m) = [m, l]``."""
    return converse(power_vcat(q, S).a)


def tensor_with(q, u, h):
    """Tensor ``u (x) h`` in ``V^S``."""
    return tuple(q.tensor(u, v) for v in h)


def closure(A, M):
    """``x`` is in the closure iff ``k <= join_{z in M} a(x,z) (x) a(z,x)``."""
    q = A.q
    idx = [A.obj.index(z) for z in M]
    e = A.a.entries
    out = []
    for i, x in enumerate(A.obj):
        v = q.join(q.tensor(e[i][j], e[j][i]) for j in idx)
        if q.leq(q.unit, v):
            out.append(x)
    return out


def is_dense_map(i, A):
    """Exact test of ``a = a . i . i° . a``."""
    if i.tgt != A.obj:
        raise MismatchError("map does not land in the V-category")
    g = graph(A.q, i)
    return compose_all(A.a, g, converse(g), A.a) == A.a


def is_dense_subset(A, M):
    sub = FinSet("M", M)
    return is_dense_map(FinMap(sub, A.obj, list(M)), A)


def check_fully_faithful(i):
    """Raise :class:`NotFullyFaithful` unless ``a = i° . b . i``."""
    A, X = i.dom, i.cod
    g = graph(A.q, i.f)
    pulled = compose_all(converse(g), X.a, g)
    for x, row, prow in zip(A.obj, A.a.entries, pulled.entries):
        for y, u, v in zip(A.obj, row, prow):
            if u != v:
                raise NotFullyFaithful((x, y), A.q.fmt(u), A.q.fmt(v))


def extend_along_embedding(i, phi):
    """Extend ``phi: A -> (V, hom)`` along a fully faithful ``i: A -> X``.

    Returns ``psi = i_* . phi``, i.e. ``psi(x) = join_z phi(z) (x) b(i(z), x)``,
    which satisfies ``psi . i = phi``.
    """
    check_fully_faithful(i)
    A, X = i.dom, i.cod
    q = A.q
    Vc = phi.cod
    if phi.dom != A:
        raise MismatchError("phi must be defined on the domain of the embedding")
    rep = check_vfunctor(phi.f, A, Vc)
    if not rep.ok:
        raise MismatchError(f"phi is not a V-functor: {rep.failures()[0].witness}")
    b = X.a.entries
    vals = [phi.f.assignment[k] for k in range(len(A.obj))]
    vals = [Vc.obj[v] for v in vals]
    imgs = i.f.assignment
    psi = [q.join(q.tensor(vals[k], b[imgs[k]][x]) for k in range(len(A.obj)))
           for x in range(len(X.obj))]
    return VFunctor(FinMap(X.obj, Vc.obj, psi), X, Vc)


def identity_functor(A):
    return VFunctor(identity_map(A.obj), A, A)
