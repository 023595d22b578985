"""Lax extensions of finite Set-functors to V-relations.

An extension is a closed term (identity, top, Barr, Hausdorff, Kantorovich,
dual, meet, initial, neighbourhood, or a user rule) evaluated on demand and
memoised per relation.
"""

import random
import threading
from concurrent.futures import ThreadPoolExecutor
from itertools import product

from .errors import IterationBoundExceeded, LibraryBug, MismatchError
from .functor import Id, Neigh, Pow, VPow, _rel_index
from .plift import is_monotone
from .report import LawReport
from .vcat import VCat, check_vcat
from .vrel import (FinMap, FinSet, VRel, all_maps, all_relations, arity, compose,
                   compose_all, converse, first_violation, graph, identity, leq,
                   meet, random_relation, rel_dist, relation_count, scalar_tensor,
                   top_rel)


class LaxExtension:
    """Base term.  Subclasses implement ``_apply(r) -> VRel(FX, FY)``."""

    kind = "abstract"

    def __init__(self, functor, q, name=None):
        self.functor = functor
        self.q = q
        self.name = name or self.kind
        self._cache = {}
        self._lock = threading.Lock()

    def __call__(self, r):
        if r.q != self.q:
            raise MismatchError(f"{self.name} works over {self.q.name}, got {r.q.name}")
        with self._lock:
            hit = self._cache.get(r)
        if hit is not None:
            return hit
        out = self._apply(r)
        with self._lock:
            self._cache[r] = out
        return out

    def _apply(self, r):
        raise NotImplementedError

    def to_json(self):
        return {"op": self.kind}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} of {self.functor.name}>"


class IdentityExtension(LaxExtension):
    kind = "identity"

    def __init__(self, q):
        super().__init__(Id(), q)

    def _apply(self, r):
        return r


class TopExtension(LaxExtension):
    """The largest extension: every entry is top."""

    kind = "top"

    def _apply(self, r):
        F = self.functor
        return top_rel(self.q, F.obj(r.src), F.obj(r.tgt))

    def to_json(self):
        return {"op": "top", "functor": self.functor.to_json()}


class FunctionExtension(LaxExtension):
    """User rule ``r -> VRel(FX, FY)`` given as a Python callable."""

    kind = "function"

    def __init__(self, functor, q, rule, name="user"):
        super().__init__(functor, q, name)
        self.rule = rule

    def _apply(self, r):
        out = self.rule(r)
        F = self.functor
        if out.src != F.obj(r.src) or out.tgt != F.obj(r.tgt):
            raise MismatchError(f"rule {self.name} returned a relation of the wrong shape")
        return out


class TableExtension(LaxExtension):
    """User table on explicitly listed hom-sets."""

    kind = "table"

    def __init__(self, functor, q, table, name="table"):
        super().__init__(functor, q, name)
        self.table = dict(table)

    def _apply(self, r):
        try:
            return self.table[r]
        except KeyError:
            raise MismatchError(f"table {self.name} has no entry for {r!r}") from None


class Barr(LaxExtension):
    """``F p2 . (F p1)°`` over the span of top entries; boolean quantale only."""

    kind = "barr"

    def __init__(self, functor, q):
        if not (q.finite and q.size == 2):
            raise MismatchError("the Barr extension is only available over the boolean quantale")
        super().__init__(functor, q, f"barr({functor.name})")

    def _apply(self, r):
        q = self.q
        pairs = [(x, y) for i, x in enumerate(r.src) for j, y in enumerate(r.tgt)
                 if r.entries[i][j] == q.top]
        R = FinSet("R", pairs)
        p1 = FinMap(R, r.src, [x for x, _ in pairs])
        p2 = FinMap(R, r.tgt, [y for _, y in pairs])
        F = self.functor
        return compose(graph(q, F.fmap(p2)), converse(graph(q, F.fmap(p1))))

    def to_json(self):
        return {"op": "barr", "functor": self.functor.to_json()}


class Hausdorff(LaxExtension):
    """Closed-form diamond extension of the powerset.

    ``w="two"``: crisp subsets, ``E r(A, B) = meet_{b in B} join_{a in A} r(a, b)``.
    ``w="full"``: V-valued subsets,
    ``E r(phi, psi) = meet_y hom(psi(y), join_x r(x, y) (x) phi(x))``.
    """

    kind = "hausdorff"

    def __init__(self, q, w="two"):
        if w not in ("two", "full"):
            raise MismatchError(f"unknown Hausdorff selector {w!r}")
        super().__init__(Pow() if w == "two" else VPow(q), q, f"hausdorff-{w}")
        self.w = w

    def _apply(self, r):
        q = self.q
        F = self.functor
        FX, FY = F.obj(r.src), F.obj(r.tgt)
        e = r.entries
        if self.w == "two":
            ia = [[r.src.index(a) for a in A] for A in FX]
            ib = [[r.tgt.index(b) for b in B] for B in FY]
            return VRel._raw(q, FX, FY, tuple(
                tuple(q.meet(q.join(e[a][b] for a in A) for b in B) for B in ib) for A in ia))
        cols = list(zip(*e)) if e else [() for _ in r.tgt]
        rows = []
        for phi in FX:
            img = [q.join(q.tensor(v, p) for v, p in zip(col, phi)) for col in cols]
            rows.append(tuple(q.meet(q.hom(s, t) for s, t in zip(psi, img)) for psi in FY))
        return VRel._raw(q, FX, FY, tuple(rows))

    def to_json(self):
        return {"op": "hausdorff", "w": self.w}


def powerset_hausdorff(q, w="two"):
    return Hausdorff(q, w)


class Kantorovich(LaxExtension):
    """``E^M r = meet_{mu in M} meet_{g: Y -|-> k} mu(g) -o mu(g . r)``.

    The ``g`` are enumerated in lexicographic matrix order and folded with
    early exit once every entry is bottom.  ``threads > 1`` splits the
    enumeration into contiguous chunks; the meet makes the result
    independent of the split.  ``g_candidates(Y, kappa)`` replaces the full
    enumeration, which is how infinite carriers are handled (the result is
    then an upper bound of the true extension).
    """

    kind = "kantorovich"

    def __init__(self, functor, liftings, q, threads=1, g_candidates=None, check=True,
                 name=None):
        liftings = list(liftings)
        for mu in liftings:
            if mu.functor != functor:
                raise MismatchError(f"lifting {mu.name} is for {mu.functor.name}, not {functor.name}")
        if check and q.finite:
            for mu in liftings:
                rep = is_monotone(mu, bound=1 if mu.kappa > 1 else 2)
                if not rep.ok:
                    raise MismatchError(f"lifting {mu.name} is not monotone: "
                                        f"{rep.failures()[0].witness}")
        super().__init__(functor, q, name or "kantorovich[" + ",".join(m.name for m in liftings) + "]")
        self.liftings = liftings
        self.threads = max(1, int(threads))
        self.g_candidates = g_candidates

    def _gs(self, Y, kappa):
        if self.g_candidates is not None:
            return list(self.g_candidates(Y, kappa))
        return list(all_relations(self.q, Y, arity(kappa)))

    def _fold(self, mu, r, gs, acc):
        q = self.q
        hom, m2, bot = q.hom, q.meet2, q.bottom
        for g in gs:
            a = [row[0] for row in mu(g).entries]
            b = [row[0] for row in mu(compose(g, r)).entries]
            alive = False
            for i, bx in enumerate(b):
                row = acc[i]
                for j, ay in enumerate(a):
                    if row[j] != bot:
                        row[j] = m2(row[j], hom(ay, bx))
                        if row[j] != bot:
                            alive = True
            if not alive:
                break
        return acc

    def _apply(self, r):
        q = self.q
        F = self.functor
        FX, FY = F.obj(r.src), F.obj(r.tgt)
        acc = [[q.top] * len(FY) for _ in FX]
        for mu in self.liftings:
            gs = self._gs(r.tgt, mu.kappa)
            if self.threads == 1 or len(gs) < 2 * self.threads:
                acc = self._fold(mu, r, gs, acc)
                continue
            size = -(-len(gs) // self.threads)
            chunks = [gs[i:i + size] for i in range(0, len(gs), size)]
            with ThreadPoolExecutor(self.threads) as pool:
                parts = list(pool.map(
                    lambda c: self._fold(mu, r, c, [[q.top] * len(FY) for _ in FX]), chunks))
            for part in parts:
                acc = [[q.meet2(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(acc, part)]
        return VRel._raw(q, FX, FY, tuple(tuple(row) for row in acc))

    def to_json(self):
        from .serialize import lifting_to_json
        return {"op": "kantorovich", "functor": self.functor.to_json(),
                "liftings": [lifting_to_json(m) for m in self.liftings]}


def kantorovich(functor, liftings, q=None, **kw):
    liftings = list(liftings)
    q = q if q is not None else liftings[0].q
    return Kantorovich(functor, liftings, q, **kw)


class Dual(LaxExtension):
    """``r -> E(r°)°``."""

    kind = "dual"

    def __init__(self, base):
        super().__init__(base.functor, base.q, f"dual({base.name})")
        self.base = base

    def _apply(self, r):
        return converse(self.base(converse(r)))

    def to_json(self):
        return {"op": "dual", "arg": self.base.to_json()}


def dual(E):
    return E.base if isinstance(E, Dual) else Dual(E)


class Meet(LaxExtension):
    kind = "meet"

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise MismatchError("meet of extensions needs at least one argument")
        F = parts[0].functor
        if any(p.functor != F for p in parts):
            raise MismatchError("meet of extensions of different functors")
        super().__init__(F, parts[0].q, "meet(" + ",".join(p.name for p in parts) + ")")
        self.parts = parts

    def _apply(self, r):
        return meet([p(r) for p in self.parts])

    def to_json(self):
        return {"op": "meet", "args": [p.to_json() for p in self.parts]}


def symmetrise(E):
    return Meet([E, Dual(E)])


class Initial(LaxExtension):
    """``meet_i alpha_i_Y° . E_i r . alpha_i_X`` for ``alpha_i: G -> F_i``."""

    kind = "initial"

    def __init__(self, G, alphas, extensions, name="initial"):
        alphas, extensions = list(alphas), list(extensions)
        if len(alphas) != len(extensions) or not alphas:
            raise MismatchError("need one extension per natural transformation")
        for a, E in zip(alphas, extensions):
            if a.src != G or a.tgt != E.functor:
                raise MismatchError(f"{a.name} does not connect {G.name} to {E.functor.name}")
        super().__init__(G, extensions[0].q, name)
        self.alphas = alphas
        self.extensions = extensions

    def _apply(self, r):
        q = self.q
        return meet([compose_all(converse(graph(q, a.component(r.tgt))), E(r),
                                 graph(q, a.component(r.src)))
                     for a, E in zip(self.alphas, self.extensions)])


def initial_extension(G, alphas, extensions):
    return Initial(G, alphas, extensions)


class NeighExtension(LaxExtension):
    """``E r(Phi, Psi) = meet_{g: Y -|-> k} hom(Psi(g), Phi(g . r))``."""

    kind = "neigh"

    def __init__(self, kappa, q, enriched=False):
        super().__init__(Neigh(kappa, q, enriched), q, f"neigh{kappa}")
        self.kappa = kappa

    def _apply(self, r):
        q = self.q
        F = self.functor
        FX, FY = F.obj(r.src), F.obj(r.tgt)
        gs = F.domain(r.tgt)
        pairs = [(j, _rel_index(q, compose(g, r).flat())) for j, g in enumerate(gs)]
        return VRel._raw(q, FX, FY, tuple(
            tuple(q.meet(q.hom(psi[j], phi[i]) for j, i in pairs) for psi in FY) for phi in FX))

    def to_json(self):
        return {"op": "neigh", "kappa": self.kappa}


def neigh_extension(kappa, q, enriched=False):
    return NeighExtension(kappa, q, enriched)


# -- law checking ------------------------------------------------------------

def _sets(sizes):
    return [FinSet(f"X{n}", [f"x{i}" for i in range(n)]) for n in sizes]


def _relations(q, X, Y, exhaustive, rng, n):
    if exhaustive:
        return list(all_relations(q, X, Y))
    values = list(q.carrier) if q.finite else q.sample_grid()
    return [random_relation(q, X, Y, rng, values) for _ in range(n)]


def _default_exhaustive(q, sets, budget=81):
    return q.finite and all(relation_count(q, X, Y) <= budget for X in sets for Y in sets)


def _covers(q, r):
    """Relations obtained from ``r`` by raising one entry to an upper cover."""
    up = {}
    for u in q.carrier:
        above = [v for v in q.carrier if v != u and q.leq(u, v)]
        up[u] = [v for v in above if not any(w != v and q.leq(w, v) for w in above)]
    rows = r.entries
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            for w in up[v]:
                new = list(rows)
                new[i] = row[:j] + (w,) + row[j + 1:]
                yield VRel._raw(q, r.src, r.tgt, tuple(new))


def check_lax_laws(E, sets=None, exhaustive=None, samples=40, seed=0):
    """L1-L3 and the strictness equalities; L1' and identity preservation as INFO.

    Exhaustive over all relations between the sample sets when the hom-sets
    are small (or ``exhaustive=True``), otherwise ``samples`` random
    relations per hom-set (seeded).
    """
    q, F = E.q, E.functor
    sets = _sets(range(3)) if sets is None else list(sets)
    if exhaustive is None:
        exhaustive = _default_exhaustive(q, sets)
    rng = random.Random(seed)
    mode = "exhaustive" if exhaustive else f"sampled x{samples}, seed {seed}"
    rep = LawReport(f"lax extension {E.name}")
    rels = {(X, Y): _relations(q, X, Y, exhaustive, rng, samples) for X in sets for Y in sets}

    bad, n = None, 0
    for (X, Y), rs in rels.items():
        for r in rs:
            if q.finite:
                bigger = list(_covers(q, r))
            else:
                bigger = [VRel._raw(q, X, Y, tuple(tuple(q.join2(a, b) for a, b in zip(ra, rb))
                                                   for ra, rb in zip(r.entries, s.entries)))
                          for s in rs[:3]]
            for s in bigger:
                n += 1
                w = first_violation(E(r), E(s))
                if w:
                    bad = (r, s, w)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("L1 monotone", bad is None, n, bad, note=mode + ", covering pairs" if q.finite else mode)

    bad, n = None, 0
    for X, Y, Z in product(sets, repeat=3):
        rs, ss = rels[X, Y], rels[Y, Z]
        if not exhaustive:
            pairs = list(zip(rs, ss))
        else:
            pairs = product(rs, ss)
        for r, s in pairs:
            n += 1
            w = first_violation(compose(E(s), E(r)), E(compose(s, r)))
            if w:
                bad = (r, s, w)
                break
        if bad:
            break
    rep.add("L2 Es.Er <= E(s.r)", bad is None, n, bad, note=mode)

    bad, n = None, 0
    for X, Y in product(sets, repeat=2):
        for f in all_maps(X, Y):
            n += 1
            Ff = graph(q, F.fmap(f))
            fo = graph(q, f)
            if not leq(Ff, E(fo)):
                bad = ("Ff <= Ef", f)
            elif not leq(converse(Ff), E(converse(fo))):
                bad = ("(Ff)° <= E(f°)", f)
            if bad:
                break
        if bad:
            break
    rep.add("L3 Ff <= Ef and (Ff)° <= E(f°)", bad is None, n, bad)

    bad, n = None, 0
    for X, Y, Z in product(sets, repeat=3):
        for f in all_maps(X, Y):
            Ff = graph(q, F.fmap(f))
            fo = graph(q, f)
            for s in rels[Y, Z]:
                n += 1
                if E(compose(s, fo)) != compose(E(s), Ff):
                    bad = ("E(s.f) = Es.Ff", f, s)
                    break
            if bad:
                break
        if bad:
            break
        for g in all_maps(Z, Y):
            Fg = converse(graph(q, F.fmap(g)))
            go = converse(graph(q, g))
            for s in rels[X, Y]:
                n += 1
                if E(compose(go, s)) != compose(Fg, E(s)):
                    bad = ("E(g°.s) = (Fg)°.Es", g, s)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("strictness on maps", bad is None, n, bad, note=mode)

    ok, n, bad = _l1_prime(E, sets, rels, exhaustive)
    rep.add("L1' [r,r'] <= [Er,Er']", ok, n, bad, required=False, note=mode)

    bad = next((X.name for X in sets if E(identity(q, X)) != identity(q, F.obj(X))), None)
    rep.add("identity-preserving", bad is None, len(sets), bad, required=False)
    return rep


def _l1_prime(E, sets, rels, exhaustive):
    q = E.q
    n = 0
    for X, Y in product(sets, repeat=2):
        rs = rels[X, Y]
        pairs = product(rs, rs) if exhaustive else zip(rs, rs[1:] + rs[:1])
        for r, s in pairs:
            n += 1
            if not q.leq(rel_dist(r, s), rel_dist(E(r), E(s))):
                return False, n, (r, s)
    return True, n, None


def check_enrichment(E, sets=None, exhaustive=None, samples=40, seed=0, scalars=None):
    """Conditions (i), (iii), (iv) for V-enrichment and their agreement.

    (i)   ``[r, r'] <= [Er, Er']``
    (iii) ``u (x) 1_FX <= E(u (x) 1_X)``
    (iv)  ``u (x) Er <= E(u (x) r)``
    (ii) is (iii) read through the adjunction ``u <= [1_FX, E(u (x) 1_X)]`` and
    is reported alongside.  On exhaustive instances disagreement raises
    :class:`LibraryBug`.
    """
    q = E.q
    sets = _sets(range(3)) if sets is None else list(sets)
    if exhaustive is None:
        exhaustive = _default_exhaustive(q, sets)
    rng = random.Random(seed)
    us = list(q.carrier) if q.finite else list(scalars or q.sample_grid())
    rels = {(X, Y): _relations(q, X, Y, exhaustive, rng, samples) for X in sets for Y in sets}
    mode = "exhaustive" if exhaustive else f"sampled x{samples}, seed {seed}"
    rep = LawReport(f"enrichment of {E.name}")
    F = E.functor

    ok1, n1, w1 = _l1_prime(E, sets, rels, exhaustive)
    rep.add("(i) [r,r'] <= [Er,Er']", ok1, n1, w1, note=mode)

    w2 = w3 = None
    n3 = 0
    for X in sets:
        one = identity(q, X)
        oneF = identity(q, F.obj(X))
        for u in us:
            n3 += 1
            target = E(scalar_tensor(u, one))
            if w2 is None and not q.leq(u, rel_dist(oneF, target)):
                w2 = (X.name, q.fmt(u))
            if w3 is None and not leq(scalar_tensor(u, oneF), target):
                w3 = (X.name, q.fmt(u))
    rep.add("(ii) u <= [1_FX, E(u (x) 1_X)]", w2 is None, n3, w2)
    rep.add("(iii) u (x) 1_FX <= E(u (x) 1_X)", w3 is None, n3, w3)

    w4 = None
    n4 = 0
    for (X, Y), rs in rels.items():
        for r in rs:
            for u in us:
                n4 += 1
                if not leq(scalar_tensor(u, E(r)), E(scalar_tensor(u, r))):
                    w4 = (r, q.fmt(u))
                    break
            if w4:
                break
        if w4:
            break
    rep.add("(iv) u (x) Er <= E(u (x) r)", w4 is None, n4, w4, note=mode)

    verdicts = {ok1, w2 is None, w3 is None, w4 is None}
    agree = len(verdicts) == 1
    if exhaustive and q.finite and not agree:
        raise LibraryBug(f"enrichment conditions disagree for {E.name}: {rep}")
    rep.add("verdicts agree", agree, 4)
    rep.enriched = ok1 and agree
    return rep


# -- derived constructions ---------------------------------------------------

def lift_to_vcat(E, A):
    """``(FX, E a)``; raises if the result is not a V-category."""
    out = VCat(E.functor.obj(A.obj), E(A.a))
    rep = check_vcat(out.obj, out.a)
    if not rep.ok:
        raise MismatchError(f"{E.name} did not produce a V-category: {rep.failures()[0].witness}")
    return out


def sim_distance(E, c, max_iter=None, trace=None):
    """Greatest fixpoint of ``r -> c° . E r . c`` by descent from top.

    ``c: X -> FX`` is a coalgebra.  Each step is asserted to descend; finite
    carriers terminate within the lattice height, exact rationals stop at
    ``max_iter`` (default 1000) with :class:`IterationBoundExceeded`.
    """
    q = E.q
    X = c.src
    if c.tgt != E.functor.obj(X):
        raise MismatchError("coalgebra must land in F applied to its carrier")
    co = graph(q, c)
    cc = converse(co)
    if max_iter is None:
        max_iter = len(X) ** 2 * (q.size if q.finite else 1000) + 1
    r = top_rel(q, X, X)
    for step in range(max_iter + 1):
        if trace is not None:
            trace.append(r)
        nxt = compose_all(cc, E(r), co)
        if not leq(nxt, r):
            raise LibraryBug(f"simulation iteration is not descending at step {step}")
        if nxt == r:
            return r
        r = nxt
    raise IterationBoundExceeded(f"no fixpoint after {max_iter} steps")


def extensionally_equal(E1, E2, sets):
    """First relation where the two extensions differ on the listed hom-sets, else None."""
    q = E1.q
    for X, Y in product(sets, repeat=2):
        for r in all_relations(q, X, Y):
            if E1(r) != E2(r):
                return r
    return None


def extension_leq(E1, E2, sets):
    q = E1.q
    for X, Y in product(sets, repeat=2):
        for r in all_relations(q, X, Y):
            if not leq(E1(r), E2(r)):
                return r
    return None


__all__ = [
    "LaxExtension", "IdentityExtension", "TopExtension", "FunctionExtension", "TableExtension",
    "Barr", "Hausdorff", "Kantorovich", "Dual", "Meet", "Initial", "NeighExtension",
    "powerset_hausdorff", "kantorovich", "dual", "symmetrise", "initial_extension",
    "neigh_extension", "check_lax_laws", "check_enrichment", "lift_to_vcat", "sim_distance",
    "extensionally_equal", "extension_leq",
]
