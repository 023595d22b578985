"""V-relations between finite sets as dense matrices of quantale elements.

A relation ``r: X -|-> Y`` is stored row-major: ``r.entries[i][j]`` is the value
at ``(X[i], Y[j])``.  Composition follows the usual diagrammatic reading of
``s . r``: first ``r``, then ``s``.
"""

import random
from itertools import product

from .errors import MismatchError
from .limits import check_size


class FinSet:
    """A finite set with a fixed element order.

    Equality and hashing only look at the elements, so sets produced by
    different functor applications compare equal when they coincide.
    """

    __slots__ = ("name", "elements", "_index", "_hash")

    def __init__(self, name, elements):
        self.name = name
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError(f"FinSet {name!r} has repeated elements")
        self._hash = hash(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e):
        return e in self._index

    def __getitem__(self, i):
        return self.elements[i]

    def index(self, e):
        try:
            return self._index[e]
        except KeyError:
            raise MismatchError(f"{e!r} is not an element of {self.name}") from None

    def __eq__(self, other):
        return isinstance(other, FinSet) and self.elements == other.elements

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FinSet({self.name!r}, {list(self.elements)!r})"


def arity(k):
    """The cardinal ``k`` as the set ``{0, ..., k-1}``."""
    return FinSet(str(k), range(k))


ONE = arity(1)


class FinMap:
    """A total function between finite sets, stored as target indices."""

    __slots__ = ("src", "tgt", "assignment", "_hash")

    def __init__(self, src, tgt, images):
        self.src = src
        self.tgt = tgt
        images = tuple(images)
        if len(images) != len(src):
            raise MismatchError(f"map from {src.name} needs {len(src)} images, got {len(images)}")
        self.assignment = tuple(tgt.index(y) for y in images)
        self._hash = hash((src, tgt, self.assignment))

    @classmethod
    def from_function(cls, src, tgt, fn):
        return cls(src, tgt, [fn(x) for x in src])

    @classmethod
    def from_indices(cls, src, tgt, idx):
        f = cls.__new__(cls)
        f.src, f.tgt, f.assignment = src, tgt, tuple(idx)
        f._hash = hash((src, tgt, f.assignment))
        return f

    def __call__(self, x):
        return self.tgt.elements[self.assignment[self.src.index(x)]]

    def images(self):
        return [self.tgt.elements[j] for j in self.assignment]

    def is_injective(self):
        return len(set(self.assignment)) == len(self.assignment)

    def __eq__(self, other):
        return (isinstance(other, FinMap) and self.src == other.src
                and self.tgt == other.tgt and self.assignment == other.assignment)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        pairs = ", ".join(f"{x!r}->{y!r}" for x, y in zip(self.src, self.images()))
        return f"FinMap({self.src.name}->{self.tgt.name}: {pairs})"


def identity_map(X):
    return FinMap.from_indices(X, X, range(len(X)))


def compose_maps(g, f):
    """``g . f`` (apply ``f`` first)."""
    if f.tgt != g.src:
        raise MismatchError(f"cannot compose {g!r} after {f!r}")
    return FinMap.from_indices(f.src, g.tgt, [g.assignment[j] for j in f.assignment])


def point(A, a):
    """The map ``1 -> A`` selecting ``a``."""
    return FinMap(ONE, A, [a])


def inclusion(sub, X):
    return FinMap(sub, X, list(sub))


def all_maps(X, Y):
    for idx in product(range(len(Y)), repeat=len(X)):
        yield FinMap.from_indices(X, Y, idx)


def same_quantale(p, q):
    return p is q or p == q


class VRel:
    __slots__ = ("q", "src", "tgt", "entries", "_hash")

    def __init__(self, q, src, tgt, entries):
        rows = tuple(tuple(row) for row in entries)
        if len(rows) != len(src) or any(len(row) != len(tgt) for row in rows):
            raise MismatchError(
                f"relation {src.name} -> {tgt.name} needs a {len(src)}x{len(tgt)} matrix"
            )
        self.q = q
        self.src = src
        self.tgt = tgt
        self.entries = rows
        self._hash = hash((src, tgt, rows))

    @classmethod
    def _raw(cls, q, src, tgt, rows):
        r = cls.__new__(cls)
        r.q, r.src, r.tgt, r.entries = q, src, tgt, rows
        r._hash = hash((src, tgt, rows))
        return r

    @classmethod
    def from_function(cls, q, src, tgt, fn):
        return cls._raw(q, src, tgt, tuple(tuple(fn(x, y) for y in tgt) for x in src))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def at(self, x, y):
        return self.entries[self.src.index(x)][self.tgt.index(y)]

    def flat(self):
        return tuple(v for row in self.entries for v in row)

    def __eq__(self, other):
        return (isinstance(other, VRel) and self.src == other.src and self.tgt == other.tgt
                and self.entries == other.entries and same_quantale(self.q, other.q))

    def __hash__(self):
        return self._hash

    def __le__(self, other):
        return leq(self, other)

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        rows = "; ".join(" ".join(self.q.fmt(v) for v in row) for row in self.entries)
        return f"VRel({self.src.name}->{self.tgt.name}: [{rows}])"


def _check_parallel(r, s):
    if r.src != s.src or r.tgt != s.tgt:
        raise MismatchError(
            f"relations are not parallel: {r.src.name}->{r.tgt.name} vs {s.src.name}->{s.tgt.name}"
        )
    if not same_quantale(r.q, s.q):
        raise MismatchError("relations live over different quantales")


def const_rel(q, X, Y, v):
    row = (v,) * len(Y)
    return VRel._raw(q, X, Y, (row,) * len(X))


def top_rel(q, X, Y):
    return const_rel(q, X, Y, q.top)


def bottom_rel(q, X, Y):
    return const_rel(q, X, Y, q.bottom)


def identity(q, X):
    """``1_X``: ``k`` on the diagonal, bottom elsewhere."""
    n = len(X)
    return VRel._raw(q, X, X, tuple(
        tuple(q.unit if i == j else q.bottom for j in range(n)) for i in range(n)))


id_rel = identity


def compose(s, r):
    """``s . r`` with ``(s . r)(x, z) = join_y r(x, y) (x) s(y, z)``."""
    if r.tgt != s.src:
        raise MismatchError(f"cannot compose: {r.tgt.name} != {s.src.name}")
    if not same_quantale(r.q, s.q):
        raise MismatchError("relations live over different quantales")
    q = r.q
    t = q.tensor
    bot = q.bottom
    join2 = q.join2
    cols = list(zip(*s.entries)) if s.entries else [() for _ in s.tgt]
    rows = []
    for rrow in r.entries:
        out = []
        for col in cols:
            acc = bot
            for a, b in zip(rrow, col):
                if a != bot and b != bot:
                    acc = join2(acc, t(a, b))
            out.append(acc)
        rows.append(tuple(out))
    return VRel._raw(q, r.src, s.tgt, tuple(rows))


def compose_all(*rels):
    """``compose_all(c, b, a) == c . b . a``."""
    out = rels[-1]
    for s in reversed(rels[:-1]):
        out = compose(s, out)
    return out


def converse(r):
    cols = tuple(zip(*r.entries)) if r.entries else tuple(() for _ in r.tgt)
    return VRel._raw(r.q, r.tgt, r.src, cols)


def graph(q, f):
    """``f_o``: ``k`` on the graph of ``f``, bottom elsewhere."""
    n = len(f.tgt)
    return VRel._raw(q, f.src, f.tgt, tuple(
        tuple(q.unit if j == fj else q.bottom for j in range(n)) for fj in f.assignment))


def cograph(q, f):
    return converse(graph(q, f))


def lift(r, s):
    """``r -o s: Z -|-> X`` for ``r: X -|-> Y`` and ``s: Z -|-> Y``.

    Right adjoint to ``r . -``: ``r . t <= s`` iff ``t <= r -o s``.
    """
    if r.tgt != s.tgt:
        raise MismatchError(f"lift needs a shared target, got {r.tgt.name} and {s.tgt.name}")
    q = r.q
    hom = q.hom
    return VRel._raw(q, s.src, r.src, tuple(
        tuple(q.meet(hom(a, b) for a, b in zip(rrow, srow)) for rrow in r.entries)
        for srow in s.entries))


def ext(s, r):
    """``s o- r: X -|-> Z`` for ``s: Y -|-> Z`` and ``r: Y -|-> X``.

    Right adjoint to ``- . r``: ``t . r <= s`` iff ``t <= s o- r``.
    """
    if r.src != s.src:
        raise MismatchError(f"ext needs a shared source, got {s.src.name} and {r.src.name}")
    q = r.q
    hom = q.hom
    rcols = list(zip(*r.entries)) if r.entries else [() for _ in r.tgt]
    scols = list(zip(*s.entries)) if s.entries else [() for _ in s.tgt]
    return VRel._raw(q, r.tgt, s.tgt, tuple(
        tuple(q.meet(hom(a, b) for a, b in zip(rc, sc)) for sc in scols) for rc in rcols))


def rel_dist(r, s):
    """The canonical distance ``[r, s] = meet hom(r(x,y), s(x,y))``."""
    _check_parallel(r, s)
    q = r.q
    return q.meet(q.hom(a, b) for a, b in zip(r.flat(), s.flat()))


def scalar_tensor(u, r):
    t = r.q.tensor
    return VRel._raw(r.q, r.src, r.tgt, tuple(tuple(t(u, v) for v in row) for row in r.entries))


def meet(rels, q=None, src=None, tgt=None):
    """Entrywise meet; the empty meet needs ``q``, ``src``, ``tgt`` and is all-top."""
    rels = list(rels)
    if not rels:
        return top_rel(q, src, tgt)
    first = rels[0]
    for r in rels[1:]:
        _check_parallel(first, r)
    m2 = first.q.meet2
    rows = first.entries
    for r in rels[1:]:
        rows = tuple(tuple(m2(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(rows, r.entries))
    return VRel._raw(first.q, first.src, first.tgt, rows)


def join(rels, q=None, src=None, tgt=None):
    rels = list(rels)
    if not rels:
        return bottom_rel(q, src, tgt)
    first = rels[0]
    for r in rels[1:]:
        _check_parallel(first, r)
    j2 = first.q.join2
    rows = first.entries
    for r in rels[1:]:
        rows = tuple(tuple(j2(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(rows, r.entries))
    return VRel._raw(first.q, first.src, first.tgt, rows)


def leq(r, s):
    _check_parallel(r, s)
    le = r.q.leq
    return all(le(a, b) for a, b in zip(r.flat(), s.flat()))


def first_violation(r, s):
    """First ``(x, y, r(x,y), s(x,y))`` with ``r(x,y) </= s(x,y)``, else None."""
    _check_parallel(r, s)
    le = r.q.leq
    for i, (ra, sa) in enumerate(zip(r.entries, s.entries)):
        for j, (a, b) in enumerate(zip(ra, sa)):
            if not le(a, b):
                return (r.src[i], r.tgt[j], r.q.fmt(a), r.q.fmt(b))
    return None


def is_map(r):
    """True when ``r`` is the graph of a function."""
    q = r.q
    return all(
        row.count(q.unit) == 1 and all(v in (q.unit, q.bottom) for v in row)
        for row in r.entries
    )


# -- powers of V and (un)currying ------------------------------------------

def power(q, S):
    """``V^S`` as a FinSet of tuples in lexicographic carrier order."""
    q.require_finite("V^S")
    check_size(f"V^{S.name}", q.size ** len(S))
    return FinSet(f"V^{S.name}", product(q.carrier, repeat=len(S)))


def curry(r):
    """``r: X -|-> S`` as the function ``r#: X -> V^S``."""
    P = power(r.q, r.tgt)
    return FinMap.from_indices(r.src, P, [P.index(row) for row in r.entries])


def uncurry(q, f, S=None):
    """``f: X -> V^S`` back to the relation ``X -|-> S``."""
    if S is None:
        k = len(f.tgt[0]) if len(f.tgt) else 0
        S = arity(k)
    return VRel._raw(q, f.src, S, tuple(f.tgt[j] for j in f.assignment))


def eval_rel(q, S):
    """``ev_S: V^S -|-> S`` with ``ev(h, s) = h(s)``."""
    P = power(q, S)
    return VRel._raw(q, P, S, tuple(P.elements))


# -- enumeration helpers -----------------------------------------------------

def relation_count(q, X, Y):
    return q.size ** (len(X) * len(Y))


def all_relations(q, X, Y):
    """Every relation ``X -|-> Y`` in lexicographic matrix order."""
    q.require_finite("enumerating relations")
    check_size(f"V-Rel({X.name},{Y.name})", relation_count(q, X, Y))
    m = len(Y)
    for flat in product(q.carrier, repeat=len(X) * m):
        yield VRel._raw(q, X, Y, tuple(flat[i * m:(i + 1) * m] for i in range(len(X))))


def relation_index(r):
    """Position of ``r`` in :func:`all_relations` order."""
    n = r.q.size
    idx = 0
    for v in r.flat():
        idx = idx * n + v
    return idx


def random_relation(q, X, Y, rng=random, values=None):
    values = list(q.carrier) if values is None else list(values)
    return VRel._raw(q, X, Y, tuple(tuple(rng.choice(values) for _ in Y) for _ in X))


def from_labels(q, X, Y, rows):
    """Build a relation from nested lists of parseable labels."""
    return VRel(q, X, Y, [[q.parse(v) for v in row] for row in rows])
