"""Commutative unital quantales over finite carriers or exact rationals.

Finite quantales identify carrier elements with indices ``0 .. n-1`` and
keep order, tensor, hom, join and meet as lookup tables.  Element labels
(``Fraction`` for the unit-interval grids, ``frozenset`` for free quantales)
are only used for parsing and printing.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product

from .errors import InfiniteCarrier, QuantaleError
from .report import LawReport

KINDS = ("boolean", "godel-grid", "lukasiewicz-grid", "product-rational", "free-on-monoid")


@dataclass(frozen=True)
class QuantaleSpec:
    kind: str
    n: int = None
    elements: tuple = None
    table: tuple = None
    unit: str = None

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = {"kind": data}
        kind = data.get("kind")
        if kind not in KINDS:
            raise QuantaleError(f"unknown quantale kind {kind!r}")
        if kind == "free-on-monoid":
            try:
                elements = tuple(data["elements"])
                table = tuple(tuple(row) for row in data["table"])
                unit = data["unit"]
            except KeyError as exc:
                raise QuantaleError(f"free-on-monoid needs {exc.args[0]!r}") from None
            return cls(kind, elements=elements, table=table, unit=unit)
        return cls(kind, n=data.get("n"))

    def to_json(self):
        if self.kind == "free-on-monoid":
            return {
                "kind": self.kind,
                "elements": list(self.elements),
                "table": [list(row) for row in self.table],
                "unit": self.unit,
            }
        if self.kind in ("godel-grid", "lukasiewicz-grid"):
            return {"kind": self.kind, "n": self.n}
        return {"kind": self.kind}


def _format_label(label):
    if isinstance(label, frozenset):
        return "{" + ",".join(sorted(map(str, label))) + "}"
    return str(label)


class Quantale:
    """A finite commutative unital quantale.

    Use :func:`make_quantale` for the built-in kinds or
    :meth:`from_tables` for hand-made (possibly broken) tables; the latter is
    what :func:`check_quantale_laws` is meant to audit.
    """

    finite = True

    def __init__(self, name, labels, order, tensor, unit, hom=None, spec=None, monoid_order=None):
        n = len(labels)
        if n == 0:
            raise QuantaleError("empty carrier")
        self.name = name
        self.spec = spec
        self.labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != n:
            raise QuantaleError("duplicate carrier labels")
        self.order = tuple(tuple(bool(order[i][j]) for j in range(n)) for i in range(n))
        self._tensor = tuple(tuple(tensor[i][j] for j in range(n)) for i in range(n))
        self.unit = unit
        self.carrier = tuple(range(n))
        self._monoid_order = monoid_order
        self.bottom = self._extreme(lambda i, j: self.order[i][j])
        self.top = self._extreme(lambda i, j: self.order[j][i])
        self._join = tuple(tuple(self._bound(i, j, upper=True) for j in range(n)) for i in range(n))
        self._meet = tuple(tuple(self._bound(i, j, upper=False) for j in range(n)) for i in range(n))
        if hom is None:
            hom = [[self._residual(u, w) for w in range(n)] for u in range(n)]
        self._hom = tuple(tuple(hom[i][j] for j in range(n)) for i in range(n))

    @classmethod
    def from_tables(cls, labels, order, tensor, unit, hom=None, name="custom"):
        return cls(name, labels, order, tensor, unit, hom)

    def _extreme(self, below):
        for i in self.carrier:
            if all(below(i, j) for j in self.carrier):
                return i
        raise QuantaleError(f"{self.name}: order has no least/greatest element")

    def _bound(self, i, j, upper):
        if upper:
            cands = [c for c in self.carrier if self.order[i][c] and self.order[j][c]]
            best = [c for c in cands if all(self.order[c][d] for d in cands)]
        else:
            cands = [c for c in self.carrier if self.order[c][i] and self.order[c][j]]
            best = [c for c in cands if all(self.order[d][c] for d in cands)]
        return best[0] if best else None

    def _residual(self, u, w):
        return self.join(v for v in self.carrier if self.order[self._tensor[u][v]][w])

    # -- element algebra -------------------------------------------------
    def leq(self, u, v):
        return self.order[u][v]

    def tensor(self, u, v):
        return self._tensor[u][v]

    def hom(self, u, v):
        return self._hom[u][v]

    def join2(self, u, v):
        return self._join[u][v]

    def meet2(self, u, v):
        return self._meet[u][v]

    def join(self, elems):
        return reduce(self._join2_checked, elems, self.bottom)

    def meet(self, elems):
        return reduce(self._meet2_checked, elems, self.top)

    def _join2_checked(self, u, v):
        j = self._join[u][v]
        if j is None:
            raise QuantaleError(f"{self.name}: no join of {self.fmt(u)} and {self.fmt(v)}")
        return j

    def _meet2_checked(self, u, v):
        m = self._meet[u][v]
        if m is None:
            raise QuantaleError(f"{self.name}: no meet of {self.fmt(u)} and {self.fmt(v)}")
        return m

    @property
    def size(self):
        return len(self.labels)

    @property
    def integral(self):
        return self.unit == self.top

    def require_finite(self, what="this operation"):
        return self

    def label(self, u):
        return self.labels[u]

    def fmt(self, u):
        return _format_label(self.labels[u])

    def parse(self, value):
        """Accept an index (int), a rational string or a list of monoid elements."""
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            if 0 <= value < self.size:
                return value
            raise QuantaleError(f"{self.name}: element index {value} out of range")
        if isinstance(value, (list, tuple, set, frozenset)):
            key = frozenset(value)
        elif isinstance(value, str) and value.startswith("{"):
            body = value.strip("{} ")
            key = frozenset(p.strip() for p in body.split(",") if p.strip())
        else:
            try:
                key = Fraction(value)
            except (TypeError, ValueError):
                raise QuantaleError(f"{self.name}: cannot parse element {value!r}") from None
        if key not in self._index:
            raise QuantaleError(f"{self.name}: {value!r} is not in the carrier")
        return self._index[key]

    def element(self, label):
        return self._index[label]

    def __eq__(self, other):
        return self is other or (isinstance(other, Quantale) and self.spec is not None
                                 and self.spec == other.spec)

    def __hash__(self):
        return hash(self.spec) if self.spec is not None else id(self)

    def __repr__(self):
        return f"<Quantale {self.name} |V|={self.size}>"


class RationalQuantale:
    """The product t-norm quantale on [0,1] with exact rationals.

    Elements are ``Fraction`` values.  Anything that enumerates the carrier
    raises :class:`InfiniteCarrier`.
    """

    finite = False
    name = "product-rational"

    def __init__(self):
        self.spec = QuantaleSpec("product-rational")
        self.bottom = Fraction(0)
        self.top = Fraction(1)
        self.unit = Fraction(1)

    @property
    def carrier(self):
        raise InfiniteCarrier("product-rational has an infinite carrier")

    @property
    def size(self):
        raise InfiniteCarrier("product-rational has an infinite carrier")

    def require_finite(self, what="this operation"):
        raise InfiniteCarrier(f"{what} enumerates the carrier; product-rational is infinite")

    def leq(self, u, v):
        return u <= v

    def tensor(self, u, v):
        return u * v

    def hom(self, u, v):
        if u == 0:
            return Fraction(1)
        return min(v / u, Fraction(1))

    def join2(self, u, v):
        return max(u, v)

    def meet2(self, u, v):
        return min(u, v)

    def join(self, elems):
        return max(elems, default=self.bottom)

    def meet(self, elems):
        return min(elems, default=self.top)

    @property
    def integral(self):
        return True

    def label(self, u):
        return u

    def fmt(self, u):
        return str(u)

    def parse(self, value):
        try:
            u = Fraction(value)
        except (TypeError, ValueError):
            raise QuantaleError(f"cannot parse rational {value!r}") from None
        if not 0 <= u <= 1:
            raise QuantaleError(f"{value!r} is outside [0,1]")
        return u

    def element(self, label):
        return self.parse(label)

    def sample_grid(self, n=6):
        return [Fraction(i, n) for i in range(n + 1)]

    def __eq__(self, other):
        return isinstance(other, RationalQuantale)

    def __hash__(self):
        return hash("product-rational")

    def __repr__(self):
        return "<Quantale product-rational>"


def _grid(kind, n):
    if not isinstance(n, int) or n < 1:
        raise QuantaleError(f"{kind} needs an integer n >= 1, got {n!r}")
    labels = [Fraction(i, n) for i in range(n + 1)]
    order = [[i <= j for j in range(n + 1)] for i in range(n + 1)]
    if kind == "godel-grid":
        tensor = [[min(i, j) for j in range(n + 1)] for i in range(n + 1)]
        hom = [[n if i <= j else j for j in range(n + 1)] for i in range(n + 1)]
    else:
        tensor = [[max(0, i + j - n) for j in range(n + 1)] for i in range(n + 1)]
        hom = [[min(n, n - i + j) for j in range(n + 1)] for i in range(n + 1)]
    return labels, order, tensor, hom


def _free_on_monoid(spec):
    elems = list(spec.elements)
    m = len(elems)
    if m == 0:
        raise QuantaleError("free-on-monoid needs a non-empty monoid")
    if spec.unit not in elems:
        raise QuantaleError(f"unit {spec.unit!r} is not a monoid element")
    idx = {e: i for i, e in enumerate(elems)}
    if len(idx) != m:
        raise QuantaleError("duplicate monoid elements")
    table = spec.table
    if len(table) != m or any(len(row) != m for row in table):
        raise QuantaleError("monoid table has the wrong shape")
    try:
        mul = [[idx[table[a][b]] for b in range(m)] for a in range(m)]
    except KeyError as exc:
        raise QuantaleError(f"monoid table mentions unknown element {exc.args[0]!r}") from None
    e = idx[spec.unit]
    for a in range(m):
        if mul[e][a] != a or mul[a][e] != a:
            raise QuantaleError(f"{spec.unit!r} is not a unit for {elems[a]!r}")
        for b in range(m):
            if mul[a][b] != mul[b][a]:
                raise QuantaleError(f"monoid is not commutative at ({elems[a]!r}, {elems[b]!r})")
            for c in range(m):
                if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                    raise QuantaleError(
                        f"monoid is not associative at ({elems[a]!r}, {elems[b]!r}, {elems[c]!r})"
                    )
    size = 1 << m
    labels = [frozenset(elems[i] for i in range(m) if mask >> i & 1) for mask in range(size)]
    order = [[a & b == a for b in range(size)] for a in range(size)]

    def members(mask):
        return [i for i in range(m) if mask >> i & 1]

    tensor = [[0] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            out = 0
            for x in members(a):
                for y in members(b):
                    out |= 1 << mul[x][y]
            tensor[a][b] = out
    hom = [[0] * size for _ in range(size)]
    for a in range(size):
        for c in range(size):
            out = 0
            for z in range(m):
                if all(c >> mul[x][z] & 1 for x in members(a)):
                    out |= 1 << z
            hom[a][c] = out
    return labels, order, tensor, 1 << e, hom


def make_quantale(spec):
    """Build a quantale from a :class:`QuantaleSpec`, a JSON dict or a kind name."""
    if not isinstance(spec, QuantaleSpec):
        spec = QuantaleSpec.from_json(spec)
    kind = spec.kind
    if kind == "boolean":
        labels = [Fraction(0), Fraction(1)]
        order = [[True, True], [False, True]]
        tensor = [[0, 0], [0, 1]]
        hom = [[1, 1], [0, 1]]
        return Quantale("boolean", labels, order, tensor, 1, hom, spec=spec)
    if kind in ("godel-grid", "lukasiewicz-grid"):
        labels, order, tensor, hom = _grid(kind, spec.n)
        return Quantale(f"{kind}({spec.n})", labels, order, tensor, spec.n, hom, spec=spec)
    if kind == "product-rational":
        return RationalQuantale()
    if kind == "free-on-monoid":
        labels, order, tensor, unit, hom = _free_on_monoid(spec)
        name = "free(" + ",".join(map(str, spec.elements)) + ")"
        return Quantale(name, labels, order, tensor, unit, hom, spec=spec)
    raise QuantaleError(f"unknown quantale kind {kind!r}")


def boolean():
    return make_quantale(QuantaleSpec("boolean"))


def godel(n):
    return make_quantale(QuantaleSpec("godel-grid", n=n))


def lukasiewicz(n):
    return make_quantale(QuantaleSpec("lukasiewicz-grid", n=n))


def product_rational():
    return make_quantale(QuantaleSpec("product-rational"))


def free_on_monoid(elements, table, unit):
    return make_quantale(
        QuantaleSpec("free-on-monoid", elements=tuple(elements),
                     table=tuple(tuple(r) for r in table), unit=unit)
    )


def _first(it):
    for item in it:
        return item
    return None


def check_quantale_laws(Q, samples=None):
    """Exhaustively check the quantale axioms (sampled for infinite carriers)."""
    if Q.finite:
        elems = list(Q.carrier)
        note = "exhaustive"
    else:
        elems = list(samples) if samples is not None else Q.sample_grid(6)
        note = "sampled"
    fmt = Q.fmt
    rep = LawReport(f"quantale {Q.name}")
    pairs = list(product(elems, repeat=2))
    triples = list(product(elems, repeat=3))

    def law(name, cases, pred, required=True):
        bad = _first(c for c in cases if not pred(*c))
        witness = None if bad is None else tuple(fmt(x) for x in bad)
        rep.add(name, bad is None, len(cases), witness, required, note)

    law("order reflexive", [(u,) for u in elems], lambda u: Q.leq(u, u))
    law("order antisymmetric", pairs, lambda u, v: not (Q.leq(u, v) and Q.leq(v, u)) or u == v)
    law("order transitive", triples,
        lambda u, v, w: not (Q.leq(u, v) and Q.leq(v, w)) or Q.leq(u, w))
    law("bottom/top", [(u,) for u in elems], lambda u: Q.leq(Q.bottom, u) and Q.leq(u, Q.top))

    if Q.finite and len(elems) <= 10:
        subsets = [
            (tuple(e for i, e in enumerate(elems) if mask >> i & 1),)
            for mask in range(1 << len(elems))
        ]
        sub_note = "all subsets"
    else:
        subsets = [((u, v),) for u, v in pairs] + [((),)]
        sub_note = "pairs"

    def is_join(s):
        try:
            j = Q.join(s)
        except QuantaleError:
            return False
        ub = [c for c in elems if all(Q.leq(x, c) for x in s)]
        return all(Q.leq(x, j) for x in s) and all(Q.leq(j, c) for c in ub)

    def is_meet(s):
        try:
            m = Q.meet(s)
        except QuantaleError:
            return False
        lb = [c for c in elems if all(Q.leq(c, x) for x in s)]
        return all(Q.leq(m, x) for x in s) and all(Q.leq(c, m) for c in lb)

    for name, pred in (("joins", is_join), ("meets", is_meet)):
        bad = _first(s for (s,) in subsets if not pred(s))
        rep.add(name, bad is None, len(subsets),
                None if bad is None else tuple(fmt(x) for x in bad), True, sub_note)

    t = Q.tensor
    law("tensor associative", triples, lambda u, v, w: t(t(u, v), w) == t(u, t(v, w)))
    law("tensor commutative", pairs, lambda u, v: t(u, v) == t(v, u))
    law("unit", [(u,) for u in elems], lambda u: t(Q.unit, u) == u and t(u, Q.unit) == u)
    law("tensor preserves binary joins", triples,
        lambda u, v, w: t(u, Q.join2(v, w)) == Q.join2(t(u, v), t(u, w)))
    law("tensor preserves empty join", [(u,) for u in elems], lambda u: t(u, Q.bottom) == Q.bottom)
    law("adjunction", triples, lambda u, v, w: Q.leq(t(u, v), w) == Q.leq(v, Q.hom(u, w)))
    law("hom(k, v) = v", [(v,) for v in elems], lambda v: Q.hom(Q.unit, v) == v)
    law("u (x) hom(u, v) <= v", pairs, lambda u, v: Q.leq(t(u, Q.hom(u, v)), v))
    rep.add("non-trivial", Q.bottom != Q.top, 1, None if Q.bottom != Q.top else "bottom == top",
            True, note)
    rep.add("integral", Q.integral, 1, None, required=False)
    return rep
