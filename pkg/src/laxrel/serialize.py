"""JSON encodings and the workspace used by the command line."""

import json

from .errors import LaxRelError, MismatchError
from .functor import Pow, functor_from_json
from .laxext import (Barr, Dual, Hausdorff, IdentityExtension, Kantorovich, Meet,
                     NeighExtension, TopExtension, symmetrise)
from .plift import (TableLifting, bottom_lifting, box, diamond,
                    identity_lifting, top_lifting, vdiamond)
from .quantale import make_quantale
from .vcat import VCat
from .vrel import FinMap, FinSet, VRel, power, arity


class InputError(LaxRelError):
    """Malformed or unresolvable workspace content."""


def dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# -- relations, maps, categories ----------------------------------------------

def relation_to_json(r):
    return {"src": r.src.name, "tgt": r.tgt.name,
            "entries": [[r.q.fmt(v) for v in row] for row in r.entries]}


def relation_from_json(data, q, sets):
    try:
        X, Y = sets[data["src"]], sets[data["tgt"]]
        return VRel(q, X, Y, [[q.parse(v) for v in row] for row in data["entries"]])
    except KeyError as e:
        raise InputError(f"unknown set or missing field {e}") from None


def set_to_json(X):
    return list(X.elements)


def map_to_json(f):
    return {"src": f.src.name, "tgt": f.tgt.name, "assignment": list(f.images())}


def map_from_json(data, sets):
    try:
        X, Y = sets[data["src"]], sets[data["tgt"]]
    except KeyError as e:
        raise InputError(f"unknown set {e}") from None
    a = data["assignment"]
    if isinstance(a, dict):
        a = [a[x] for x in X]
    return FinMap(X, Y, a)


# -- liftings ------------------------------------------------------------------

def _key(F, P, e, q):
    return dumps(F.encode(P, e, lambda t: [q.fmt(v) for v in t]))


def lifting_to_json(mu):
    q = mu.q
    P = power(q, arity(mu.kappa))
    F = mu.functor
    return {"functor": F.to_json(), "kappa": mu.kappa, "name": mu.name,
            "yoneda": {_key(F, P, e, q): q.fmt(v) for e, v in mu.yoneda_table().items()}}


_BUILTIN = {"diamond": diamond, "box": box, "identity": identity_lifting, "vdiamond": vdiamond}


def lifting_from_json(data, q, functors=None):
    functors = functors or {}
    if isinstance(data, str):
        if data in _BUILTIN:
            return _BUILTIN[data](q)
        raise InputError(f"unknown lifting {data!r}")
    F = _functor(data.get("functor", "pow"), q, functors)
    kappa = int(data.get("kappa", 1))
    builtin = data.get("builtin")
    if builtin in ("top", "bottom"):
        return (top_lifting if builtin == "top" else bottom_lifting)(F, kappa, q)
    if builtin:
        return lifting_from_json(builtin, q)
    P = power(q, arity(kappa))
    raw = data["yoneda"]
    table = {}
    for e in F.obj(P):
        k = _key(F, P, e, q)
        if k not in raw:
            raise InputError(f"yoneda table misses {k}")
        table[e] = q.parse(raw[k])
    return TableLifting(F, kappa, q, table, name=data.get("name", "mu"))


def _functor(data, q, functors):
    if isinstance(data, str) and data in functors:
        return functors[data]
    try:
        return functor_from_json(data if isinstance(data, dict) else {"op": data}, q)
    except (KeyError, TypeError) as e:
        raise InputError(f"bad functor term: {e}") from None


# -- extension terms -----------------------------------------------------------

def extension_from_json(data, q, ws=None):
    """Build an extension from its JSON term; string terms resolve through ``ws``."""
    if isinstance(data, str):
        if ws is not None and data in ws.extensions:
            return ws.extension(data)
        if data == "egli-milner":
            return Barr(Pow(), q) if q.finite and q.size == 2 else symmetrise(Hausdorff(q))
        data = {"op": data}
    functors = ws.functors if ws is not None else {}
    op = data.get("op")
    try:
        if op == "identity":
            return IdentityExtension(q)
        if op == "top":
            return TopExtension(_functor(data.get("functor", "id"), q, functors), q)
        if op == "barr":
            return Barr(_functor(data.get("functor", "pow"), q, functors), q)
        if op in ("hausdorff", "diamond"):
            return Hausdorff(q, data.get("w", "two"))
        if op == "kantorovich":
            F = _functor(data.get("functor", "pow"), q, functors)
            mus = [ws.lifting(m) if ws is not None and isinstance(m, str) and m in ws.liftings
                   else lifting_from_json(m, q, functors) for m in data["liftings"]]
            return Kantorovich(F, mus, q, threads=int(data.get("threads", 1)))
        if op == "dual":
            return Dual(extension_from_json(data["arg"], q, ws))
        if op == "symmetrise":
            return symmetrise(extension_from_json(data["arg"], q, ws))
        if op == "meet":
            return Meet([extension_from_json(a, q, ws) for a in data["args"]])
        if op == "neigh":
            return NeighExtension(int(data["kappa"]), q, bool(data.get("enriched", False)))
        if op == "egli-milner":
            return extension_from_json("egli-milner", q, ws)
    except KeyError as e:
        raise InputError(f"extension term {op!r} misses field {e}") from None
    raise InputError(f"unknown extension op {op!r}")


# -- workspace -----------------------------------------------------------------

class Workspace:
    """Named objects sharing one quantale, loaded from a single JSON document."""

    def __init__(self, data):
        self.data = data
        try:
            self.q = make_quantale(data.get("quantale", {"kind": "boolean"}))
        except LaxRelError as e:
            raise InputError(str(e)) from None
        self.sets = {n: FinSet(n, els) for n, els in data.get("sets", {}).items()}
        self.functors = {n: _functor(t, self.q, {}) for n, t in data.get("functors", {}).items()}
        self.liftings = data.get("liftings", {})
        self.extensions = data.get("extensions", {})
        self._ext_cache = {}
        self.relations = {n: relation_from_json(r, self.q, self.sets)
                          for n, r in data.get("relations", {}).items()}
        self.maps = {n: map_from_json(m, self.sets) for n, m in data.get("maps", {}).items()}
        self.vcats = {}
        for n, c in data.get("vcats", {}).items():
            a = c["a"]
            a = self.relation(a) if isinstance(a, str) else relation_from_json(a, self.q, self.sets)
            try:
                self.vcats[n] = VCat(self.sets[c["obj"]], a)
            except (KeyError, MismatchError) as e:
                raise InputError(f"bad V-category {n}: {e}") from None
        self.coalgebras = data.get("coalgebras", {})
        self.functionals = data.get("functionals", {})

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                return cls(json.load(fh))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read workspace {path}: {e}") from None

    def _get(self, table, name, what):
        try:
            return table[name]
        except KeyError:
            raise InputError(f"unknown {what} {name!r}") from None

    def set(self, name):
        return self._get(self.sets, name, "set")

    def relation(self, name):
        return self._get(self.relations, name, "relation")

    def map(self, name):
        return self._get(self.maps, name, "map")

    def vcat(self, name):
        return self._get(self.vcats, name, "V-category")

    def functor(self, name):
        return _functor(name, self.q, self.functors)

    def lifting(self, name):
        if name in self.liftings:
            return lifting_from_json(self.liftings[name], self.q, self.functors)
        return lifting_from_json(name, self.q, self.functors)

    def extension(self, name):
        if name not in self._ext_cache:
            term = self.extensions.get(name, name)
            self._ext_cache[name] = extension_from_json(term, self.q, self if term != name else None)
        return self._ext_cache[name]

    def coalgebra(self, name, F):
        """``{"carrier": X, "next": {x: encoded FX element}}`` as a FinMap ``X -> FX``."""
        c = self._get(self.coalgebras, name, "coalgebra")
        X = self.set(c["carrier"])
        FX = F.obj(X)
        try:
            imgs = [F.decode(X, c["next"][x]) for x in X]
        except (KeyError, MismatchError) as e:
            raise InputError(f"bad coalgebra {name}: {e}") from None
        return FinMap(X, FX, imgs)


def workspace_to_json(ws):
    out = dict(ws.data)
    out["sets"] = {n: set_to_json(X) for n, X in ws.sets.items()}
    out["relations"] = {n: relation_to_json(r) for n, r in ws.relations.items()}
    out["maps"] = {n: map_to_json(f) for n, f in ws.maps.items()}
    return out


__all__ = ["InputError", "Workspace", "dumps", "relation_to_json", "relation_from_json",
           "map_to_json", "map_from_json", "lifting_to_json", "lifting_from_json",
           "extension_from_json", "workspace_to_json"]
