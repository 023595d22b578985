"""Predicate liftings stored as Yoneda elements ``F(V^k) -> V``.

A ``k``-ary lifting ``mu`` sends ``f: X -|-> k`` to ``mu(f): FX -|-> 1``.  The
canonical data is the table on ``F(V^k)``; the component at ``X`` is
``mu(f)(x) = yoneda(F(f#)(x))``, so naturality holds by construction.
Liftings extracted from a lax extension (Moss / induced liftings) also
evaluate directly through the extension, and both routes can be compared.
"""

import threading
from dataclasses import dataclass

from .errors import LibraryBug, MismatchError
from .functor import Id, NatTrans, Neigh, Pow, VPow
from .report import LawReport
from .vcat import power_dual_structure
from .vrel import (ONE, FinMap, FinSet, VRel, all_relations, arity, bottom_rel, compose,
                   compose_all, converse, curry, ext, graph, identity, power, rel_dist,
                   relation_count, top_rel)


def _positional(F):
    """Functors whose element encoding depends on an enumerated carrier power."""
    if isinstance(F, (Neigh, VPow)):
        return True
    return any(_positional(getattr(F, a)) for a in ("left", "right", "outer", "inner")
               if hasattr(F, a))


def sharp(f):
    """``f#: X -> S`` with ``S`` the rows of ``f`` (a subset of ``V^k``).

    For functors whose elements are value tables over ``V^k`` the full power
    is used instead, so images land in ``F(V^k)`` itself.
    """
    rows = f.entries
    return FinMap.from_indices(f.src, _image_set(rows), [_row_pos(rows, r) for r in rows])


def _image_set(rows):
    seen = []
    for r in rows:
        if r not in seen:
            seen.append(r)
    return FinSet("img", seen)


def _row_pos(rows, r):
    seen = []
    for x in rows:
        if x not in seen:
            seen.append(x)
    return seen.index(r)


class PredicateLifting:
    """Base class: subclasses provide ``yoneda_value`` and may override ``_eval``."""

    def __init__(self, functor, kappa, q, name="mu"):
        self.functor = functor
        self.kappa = kappa
        self.q = q
        self.name = name
        self._cache = {}
        self._lock = threading.Lock()

    @property
    def arity_set(self):
        return arity(self.kappa)

    def __call__(self, f):
        if len(f.tgt) != self.kappa:
            raise MismatchError(f"{self.name} is {self.kappa}-ary, got a relation into {f.tgt.name}")
        with self._lock:
            hit = self._cache.get(f)
        if hit is not None:
            return hit
        out = self._eval(f)
        with self._lock:
            self._cache[f] = out
        return out

    def _eval(self, f):
        return self.eval_via_yoneda(f)

    def eval_via_yoneda(self, f):
        F, q = self.functor, self.q
        FX = F.obj(f.src)
        if _positional(F):
            P = power(q, f.tgt)
            fs = FinMap.from_indices(f.src, P, [P.index(row) for row in f.entries])
        else:
            fs = sharp(f)
        return VRel._raw(q, FX, ONE, tuple((self.yoneda_value(F.map_elem(fs, e)),) for e in FX))

    def yoneda_value(self, e):
        raise NotImplementedError

    def yoneda_domain(self):
        return self.functor.obj(power(self.q, self.arity_set))

    def yoneda_table(self):
        return {e: self.yoneda_value(e) for e in self.yoneda_domain()}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}: {self.kappa}-ary lifting of {self.functor.name}>"


class TableLifting(PredicateLifting):
    """Lifting given by its Yoneda element, as a dict or a callable."""

    def __init__(self, functor, kappa, q, yoneda, name="mu"):
        super().__init__(functor, kappa, q, name)
        self.yoneda = yoneda

    def yoneda_value(self, e):
        if callable(self.yoneda):
            return self.yoneda(e)
        try:
            return self.yoneda[e]
        except KeyError:
            raise MismatchError(f"yoneda table of {self.name} has no entry for {e!r}") from None


def make_lifting(functor, kappa, q, yoneda, name="mu"):
    return TableLifting(functor, kappa, q, yoneda, name)


def eval_lifting(mu, f):
    return mu(f)


# -- named built-ins ---------------------------------------------------------

def identity_lifting(q):
    return TableLifting(Id(), 1, q, lambda t: t[0], name="identity")


def const_lifting(functor, kappa, q, value, name=None):
    return TableLifting(functor, kappa, q, lambda e: value, name=name or f"const_{q.fmt(value)}")


def top_lifting(functor, kappa, q):
    return const_lifting(functor, kappa, q, q.top, "top")


def bottom_lifting(functor, kappa, q):
    return const_lifting(functor, kappa, q, q.bottom, "bottom")


def diamond(q):
    """``<>(phi)(B) = join_{x in B} phi(x)`` on the crisp powerset."""
    return TableLifting(Pow(), 1, q, lambda B: q.join(t[0] for t in B), name="diamond")


def box(q):
    """``[](phi)(B) = meet_{x in B} phi(x)``."""
    return TableLifting(Pow(), 1, q, lambda B: q.meet(t[0] for t in B), name="box")


def vdiamond(q):
    """Diamond for the V-valued powerset: ``psi -> join_x psi(x) (x) phi(x)``."""
    P = power(q, arity(1))
    vals = [t[0] for t in P]
    return TableLifting(VPow(q), 1, q,
                        lambda psi: q.join(q.tensor(a, v) for a, v in zip(psi, vals)),
                        name="vdiamond")


# -- liftings extracted from a lax extension ---------------------------------

class InducedLifting(PredicateLifting):
    """``mu(f) = r . E f`` for a relation ``r: F k -|-> 1``."""

    def __init__(self, E, kappa, r, name="induced"):
        super().__init__(E.functor, kappa, E.q, name)
        Fk = E.functor.obj(arity(kappa))
        if r.src != Fk or len(r.tgt) != 1:
            raise MismatchError("inducing relation must be F(kappa) -|-> 1")
        self.extension = E
        self.r = r
        self._ev = None

    def _eval(self, f):
        return compose(self.r, self.extension(f))

    def _ev_image(self):
        if self._ev is None:
            from .vrel import eval_rel
            self._ev = compose(self.r, self.extension(eval_rel(self.q, self.arity_set)))
        return self._ev

    def yoneda_value(self, e):
        ev = self._ev_image()
        return ev.entries[ev.src.index(e)][0]


class MossLifting(InducedLifting):
    """``mu^k(f) = k° . E f`` for an element ``k`` of ``F(kappa)``."""

    def __init__(self, E, element, kappa):
        Fk = E.functor.obj(arity(kappa))
        col = Fk.index(element)
        q = E.q
        r = VRel._raw(q, Fk, ONE, tuple((q.unit if i == col else q.bottom,) for i in range(len(Fk))))
        label = E.functor.show(arity(kappa), element)
        super().__init__(E, kappa, r, name=f"moss[{label}]")
        self.element = element
        self._col = col

    def _eval(self, f):
        Ef = self.extension(f)
        return VRel._raw(self.q, Ef.src, ONE, tuple((row[self._col],) for row in Ef.entries))


def moss_lifting(E, element, kappa):
    return MossLifting(E, element, kappa)


def moss_liftings(E, kappa):
    """All Moss liftings ``{mu^k | k in F(kappa)}``."""
    return [MossLifting(E, k, kappa) for k in E.functor.obj(arity(kappa))]


def least_induced(E, kappa):
    Fk = E.functor.obj(arity(kappa))
    return InducedLifting(E, kappa, bottom_rel(E.q, Fk, ONE), name="least-induced")


def greatest_induced(E, kappa):
    Fk = E.functor.obj(arity(kappa))
    return InducedLifting(E, kappa, top_rel(E.q, Fk, ONE), name="greatest-induced")


def routes_agree(mu, X):
    """Compare direct evaluation with the Yoneda route on every ``f: X -|-> k``."""
    for f in all_relations(mu.q, X, mu.arity_set):
        if mu(f) != mu.eval_via_yoneda(f):
            return f
    return None


@dataclass
class InducedVerdict:
    induced: bool
    relation: VRel
    condition_iii: bool
    condition_iv: bool
    witness: object = None
    lhs: VRel = None
    rhs: VRel = None

    def __bool__(self):
        return self.induced


def is_induced_by(mu, E, domain=None):
    """Decide whether ``mu`` is induced by ``E``.

    Uses ``mu(ev) = mu(1_k) . E ev`` and the fixpoint form with
    ``r = mu(ev) o- E ev``; both must agree.  ``domain`` restricts ``ev`` to a
    finite set of ``k``-tuples, which is how infinite carriers are handled;
    the verdict is then relative to that restriction.
    """
    q = mu.q
    K = mu.arity_set
    if domain is None:
        D = power(q, K)
    else:
        D = domain if isinstance(domain, FinSet) else FinSet("D", domain)
    ev = VRel._raw(q, D, K, tuple(tuple(t) for t in D))
    lhs = mu(ev)
    Eev = E(ev)
    rhs = compose(mu(identity(q, K)), Eev)
    iii = lhs == rhs
    r = ext(lhs, Eev)
    iv = lhs == compose(r, Eev)
    witness = None
    if not iii:
        for e, a, b in zip(lhs.src, lhs.entries, rhs.entries):
            if a[0] != b[0]:
                witness = (e, q.fmt(a[0]), q.fmt(b[0]))
                break
    if domain is None and iii != iv:
        raise LibraryBug(f"inducedness conditions disagree for {mu.name}: iii={iii}, iv={iv}")
    return InducedVerdict(iii and iv, r, iii, iv, witness, lhs, rhs)


# -- order, monotonicity, enrichment -----------------------------------------

def _covers(q):
    """Upper covers in the carrier order."""
    up = {}
    for u in q.carrier:
        above = [v for v in q.carrier if v != u and q.leq(u, v)]
        up[u] = [v for v in above if not any(w != v and q.leq(w, v) for w in above)]
    return up


def _sample_sets(bound):
    return [FinSet(f"X{n}", [f"x{i}" for i in range(n)]) for n in range(bound + 1)]


def is_monotone(mu, bound=2, pairs=None):
    """Check ``f <= f'  =>  mu(f) <= mu(f')``.

    Finite carriers: exhaustive on every ``X`` with ``|X| <= bound``; it is
    enough to test covering pairs (one entry raised to an upper cover).
    Infinite carriers need explicit ``pairs``.
    """
    rep = LawReport(f"monotonicity of {mu.name}")
    if pairs is None:
        mu.q.require_finite("exhaustive monotonicity check")
        pairs = _cover_pairs(mu.q, _sample_sets(bound), mu.arity_set)
        note = f"|X| <= {bound}, covering pairs"
    else:
        note = "given pairs"
    count = 0
    bad = None
    for f, g in pairs:
        count += 1
        a, b = mu(f), mu(g)
        if not all(mu.q.leq(x[0], y[0]) for x, y in zip(a.entries, b.entries)):
            bad = (f, g)
            break
    rep.add("monotone", bad is None, count, bad, note=note)
    return rep


def _cover_pairs(q, sets, K):
    up = _covers(q)
    for X in sets:
        for f in all_relations(q, X, K):
            rows = [list(r) for r in f.entries]
            for i in range(len(X)):
                for j in range(len(K)):
                    for v in up[rows[i][j]]:
                        new = [list(r) for r in rows]
                        new[i][j] = v
                        yield f, VRel._raw(q, X, K, tuple(map(tuple, new)))


def is_enriched(mu, bound=2, pairs=None):
    """Check ``[f, f'] <= [mu f, mu f']`` (every component a V-functor)."""
    q = mu.q
    rep = LawReport(f"enrichment of {mu.name}")
    if pairs is None:
        q.require_finite("exhaustive enrichment check")
        pairs = ((f, g) for X in _sample_sets(bound)
                 for f in all_relations(q, X, mu.arity_set)
                 for g in all_relations(q, X, mu.arity_set))
        note = f"|X| <= {bound}, all pairs"
    else:
        note = "given pairs"
    count = 0
    bad = None
    for f, g in pairs:
        count += 1
        if not q.leq(rel_dist(f, g), rel_dist(mu(f), mu(g))):
            bad = (f, g, q.fmt(rel_dist(f, g)), q.fmt(rel_dist(mu(f), mu(g))))
            break
    rep.add("V-enriched", bad is None, count, bad, note=note)
    return rep


def lifting_leq(mu, nu, sets):
    """Pointwise order of liftings, checked on every ``f`` over the given sets."""
    q = mu.q
    for X in sets:
        for f in all_relations(q, X, mu.arity_set):
            a, b = mu(f), nu(f)
            if not all(q.leq(x[0], y[0]) for x, y in zip(a.entries, b.entries)):
                return False
    return True


# -- transposes and separation -----------------------------------------------

class TransposedLifting:
    """``mu-bar_X: FX -> Neigh(k) X`` with ``mu-bar(x)(g) = mu(g)(x)``."""

    def __init__(self, mu, enriched=False):
        self.mu = mu
        self.target = Neigh(mu.kappa, mu.q, enriched)

    def elem(self, X, e):
        FX = self.mu.functor.obj(X)
        i = FX.index(e)
        return tuple(self.mu(g).entries[i][0] for g in self.target.domain(X))

    def component(self, X):
        FX = self.mu.functor.obj(X)
        NX = self.target.obj(X)
        tables = [self.mu(g) for g in self.target.domain(X)]
        return FinMap.from_indices(
            FX, NX, [NX.index(tuple(t.entries[i][0] for t in tables)) for i in range(len(FX))])

    def as_nat(self):
        return NatTrans(self.mu.functor, self.target, self.elem, name=f"{self.mu.name}-bar")


def transpose(mu, enriched=False):
    return TransposedLifting(mu, enriched)


def _signatures(M, X):
    FX = None
    cols = []
    for mu in M:
        FX = mu.functor.obj(X)
        for g in all_relations(mu.q, X, mu.arity_set):
            cols.append([row[0] for row in mu(g).entries])
    return FX, cols


def non_separated_pair(M, X, functor=None):
    """Two distinct elements of FX that no lifting in M tells apart, or None."""
    M = list(M)
    if not M:
        if functor is None:
            raise MismatchError("an empty family needs the functor")
        FX = functor.obj(X)
        return (FX[0], FX[1]) if len(FX) >= 2 else None
    FX, cols = _signatures(M, X)
    seen = {}
    for i, e in enumerate(FX):
        sig = tuple(c[i] for c in cols)
        if sig in seen:
            return (seen[sig], e)
        seen[sig] = e
    return None


def is_separating(M, X, functor=None):
    """Joint injectivity of the transposes on FX, checked without building Neigh."""
    return non_separated_pair(M, X, functor) is None


# -- pushforward along natural transformations -------------------------------

class PushforwardLifting(PredicateLifting):
    """``P_V i . mu`` for ``i: G -> F``: ``mu_G(f) = mu(f) . i_X``."""

    def __init__(self, nat, mu):
        if nat.tgt != mu.functor:
            raise MismatchError("natural transformation must land in the lifting's functor")
        super().__init__(nat.src, mu.kappa, mu.q, name=f"{mu.name}.{nat.name}")
        self.nat = nat
        self.base = mu

    def _eval(self, f):
        return compose(self.base(f), graph(self.q, self.nat.component(f.src)))

    def yoneda_value(self, e):
        P = power(self.q, self.arity_set)
        return self.base.yoneda_value(self.nat(P, e))


def pushforward(nat, mu):
    return PushforwardLifting(nat, mu)


# -- cross-module consistency ------------------------------------------------

def prop69_check(E, mu, kappa=None):
    """``mu(ev) = mu(1_k) . (F 1_k#)° . E h`` with ``h`` the structure of ``(V^k)^op``."""
    q = E.q
    kappa = mu.kappa if kappa is None else kappa
    K = arity(kappa)
    from .vrel import eval_rel
    lhs = mu(eval_rel(q, K))
    h = power_dual_structure(q, K)
    one_sharp = curry(identity(q, K))
    F1 = E.functor.fmap(one_sharp)
    rhs = compose_all(mu(identity(q, K)), converse(graph(q, F1)), E(h))
    return lhs == rhs


def homset_size(q, X, kappa):
    return relation_count(q, X, arity(kappa))


__all__ = [
    "PredicateLifting", "TableLifting", "InducedLifting", "MossLifting", "PushforwardLifting",
    "TransposedLifting", "InducedVerdict", "make_lifting", "eval_lifting", "identity_lifting",
    "const_lifting", "top_lifting", "bottom_lifting", "diamond", "box", "vdiamond",
    "moss_lifting", "moss_liftings", "least_induced", "greatest_induced", "is_induced_by",
    "is_monotone", "is_enriched", "lifting_leq", "transpose", "is_separating",
    "non_separated_pair", "pushforward", "prop69_check", "routes_agree", "sharp",
]
