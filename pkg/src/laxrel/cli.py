"""Command line front end: ``laxrel <command> --workspace FILE ...``.

Exit codes: 0 success, 1 law failure or mismatch, 2 input error, 3 cap exceeded.
"""

import argparse
import json
import os
import sys

from .errors import CapExceeded, IterationBoundExceeded, LaxRelError, MismatchError, NotFullyFaithful
from .laxext import Kantorovich, check_enrichment, check_lax_laws, lift_to_vcat, sim_distance
from .limits import size_cap
from .plift import is_enriched, is_monotone, moss_liftings
from .quantale import check_quantale_laws
from .serialize import (InputError, Workspace, dumps, extension_from_json, lifting_to_json,
                        relation_to_json)
from .vcat import (VFunctor, canonical, check_vcat, closure, extend_along_embedding,
                   is_dense_subset)
from .vrel import FinMap, arity, meet

OK, FAIL, INPUT, CAP = 0, 1, 2, 3


def format_matrix(r, row_label=str, col_label=str):
    """Matrix with row and column labels, entries as fractions or set literals."""
    q = r.q
    cols = [col_label(y) for y in r.tgt]
    rows = [row_label(x) for x in r.src]
    cells = [[q.fmt(v) for v in row] for row in r.entries]
    w0 = max([len(s) for s in rows] + [1])
    widths = [max([len(c)] + [len(row[j]) for row in cells]) for j, c in enumerate(cols)]
    lines = [" " * w0 + " | " + " ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines.append("-" * len(lines[0]))
    for lab, row in zip(rows, cells):
        lines.append(lab.ljust(w0) + " | " + " ".join(v.rjust(w) for v, w in zip(row, widths)))
    return "\n".join(lines)


def _labeller(F, X):
    return lambda e: F.show(X, e)


def _emit(args, payload, text):
    if args.json:
        print(dumps(payload))
    else:
        print(text)


def _workspace(args):
    if args.workspace is None:
        return Workspace({})
    return Workspace.load(args.workspace)


def _extension(ws, ref):
    """A workspace name, a built-in name, or a path to a JSON term/workspace file."""
    if ref.endswith(".json") and os.path.exists(ref):
        with open(ref) as fh:
            data = json.load(fh)
        if isinstance(data, dict) and "quantale" in data:
            inner = Workspace(data)
            term = data.get("extension") or next(iter(inner.extensions), None)
            if term is None:
                raise InputError(f"{ref} defines no extension")
            return extension_from_json(term, inner.q, inner), inner
        return extension_from_json(data, ws.q, ws), ws
    return ws.extension(ref), ws


def cmd_laws(args):
    ws = _workspace(args)
    reports = []
    if args.extension:
        E, ws = _extension(ws, args.extension)
        reports.append(check_lax_laws(E, exhaustive=args.exhaustive, samples=args.samples,
                                      seed=args.seed))
        if not args.skip_enrichment:
            reports.append(check_enrichment(E, exhaustive=args.exhaustive, samples=args.samples,
                                            seed=args.seed))
    if args.vcat:
        A = ws.vcat(args.vcat)
        reports.append(check_vcat(A.obj, A.a))
    if args.lifting:
        mu = ws.lifting(args.lifting)
        reports.append(is_monotone(mu))
        if mu.q.finite:
            reports.append(is_enriched(mu))
    if not reports or args.quantale:
        reports.insert(0, check_quantale_laws(ws.q))
    ok = all(r.ok for r in reports)
    _emit(args, {"ok": ok, "reports": [r.to_dict() for r in reports]},
          "\n".join(str(r) for r in reports))
    return OK if ok else FAIL


def _show_fx(args, E, base, out):
    F = E.functor
    payload = relation_to_json(out)
    payload["src_elements"] = [F.show(base.src, e) for e in out.src]
    payload["tgt_elements"] = [F.show(base.tgt, e) for e in out.tgt]
    _emit(args, payload, format_matrix(out, _labeller(F, base.src), _labeller(F, base.tgt)))


def cmd_extend(args):
    ws = _workspace(args)
    E, ws = _extension(ws, args.extension)
    r = ws.relation(args.relation)
    _show_fx(args, E, r, E(r))
    return OK


def cmd_kantorovich(args):
    ws = _workspace(args)
    F = ws.functor(args.functor)
    mus = [ws.lifting(m) for m in args.liftings.split(",")]
    E = Kantorovich(F, mus, ws.q, threads=args.threads)
    r = ws.relation(args.relation)
    _show_fx(args, E, r, E(r))
    return OK


def cmd_moss(args):
    ws = _workspace(args)
    E, ws = _extension(ws, args.extension)
    K = arity(args.kappa)
    mus = moss_liftings(E, args.kappa)
    payload = {"kappa": args.kappa,
               "liftings": [dict(lifting_to_json(m), element=E.functor.show(K, m.element))
                            for m in mus]}
    lines = [f"{len(mus)} Moss liftings of {E.name} with arity {args.kappa}"]
    for m, js in zip(mus, payload["liftings"]):
        lines.append(f"{m.name}:")
        lines.extend(f"  {k} -> {v}" for k, v in js["yoneda"].items())
    _emit(args, payload, "\n".join(lines))
    return OK


def cmd_represent(args):
    ws = _workspace(args)
    E, ws = _extension(ws, args.extension)
    r = ws.relation(args.relation)
    kappa = len(r.tgt)
    mus = moss_liftings(E, kappa)
    if args.drop is not None:
        mus = [m for i, m in enumerate(mus) if i != args.drop]
    lhs = E(r)
    F = E.functor
    rhs = meet([Kantorovich(F, [m], E.q, threads=args.threads, check=False)(r) for m in mus],
               E.q, F.obj(r.src), F.obj(r.tgt))
    equal = lhs == rhs
    payload = {"equal": equal, "kappa": kappa, "liftings": len(mus),
               "extension": relation_to_json(lhs), "moss_meet": relation_to_json(rhs)}
    text = f"E r = meet of Moss-Kantorovich extensions ({len(mus)} liftings, kappa={kappa}): {equal}"
    if not equal:
        lab_x, lab_y = _labeller(F, r.src), _labeller(F, r.tgt)
        text += "\nE r:\n" + format_matrix(lhs, lab_x, lab_y)
        text += "\nmeet:\n" + format_matrix(rhs, lab_x, lab_y)
    _emit(args, payload, text)
    return OK if equal else FAIL


def cmd_distance(args):
    ws = _workspace(args)
    E, ws = _extension(ws, args.extension)
    c = ws.coalgebra(args.coalgebra, E.functor)
    trace = [] if args.steps else None
    r = sim_distance(E, c, max_iter=args.max_iter, trace=trace)
    payload = relation_to_json(r)
    text = format_matrix(r)
    if trace is not None:
        payload["trace"] = [relation_to_json(t) for t in trace]
        text = "\n\n".join(f"step {i}:\n{format_matrix(t)}" for i, t in enumerate(trace))
        text += f"\n\nfixpoint after {len(trace) - 1} steps:\n{format_matrix(r)}"
    _emit(args, payload, text)
    return OK


def cmd_closure(args):
    ws = _workspace(args)
    A = ws.vcat(args.vcat)
    M = [m for m in args.subset.split(",") if m] if args.subset else []
    for m in M:
        if m not in A.obj:
            raise InputError(f"{m!r} is not an object of {args.vcat}")
    cl = closure(A, M)
    dense = is_dense_subset(A, M)
    _emit(args, {"closure": cl, "dense": dense},
          f"closure: {{{', '.join(map(str, cl))}}}\ndense: {dense}")
    return OK


def cmd_extend_functor(args):
    ws = _workspace(args)
    A, X = ws.vcat(args.dom), ws.vcat(args.cod)
    i = VFunctor(ws.map(args.embedding), A, X)
    Vc = canonical(ws.q)
    vals = ws._get(ws.functionals, args.phi, "functional")
    if isinstance(vals, dict):
        vals = [vals[a] for a in A.obj]
    phi = VFunctor(FinMap(A.obj, Vc.obj, [ws.q.parse(v) for v in vals]), A, Vc)
    psi = extend_along_embedding(i, phi)
    out = {str(x): ws.q.fmt(v) for x, v in zip(X.obj, psi.f.images())}
    _emit(args, {"psi": out}, "\n".join(f"{x} -> {v}" for x, v in out.items()))
    return OK


def cmd_lift(args):
    ws = _workspace(args)
    E, ws = _extension(ws, args.extension)
    B = lift_to_vcat(E, ws.vcat(args.vcat))
    lab = _labeller(E.functor, ws.vcat(args.vcat).obj)
    _emit(args, relation_to_json(B.a), format_matrix(B.a, lab, lab))
    return OK


def build_parser():
    p = argparse.ArgumentParser(prog="laxrel", description="Quantale-enriched relations and lax extensions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workspace", "-w", help="JSON workspace file")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--cap", type=int, default=None, help="size cap on materialised sets")
    common.add_argument("--threads", type=int, default=1, help="worker threads for enumeration")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("laws", parents=[common], help="run law suites")
    s.add_argument("--extension")
    s.add_argument("--vcat")
    s.add_argument("--lifting")
    s.add_argument("--quantale", action="store_true")
    s.add_argument("--exhaustive", action="store_true", default=None)
    s.add_argument("--samples", type=int, default=40)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--skip-enrichment", action="store_true")
    s.set_defaults(func=cmd_laws)

    s = sub.add_parser("extend", parents=[common], help="apply an extension to a relation")
    s.add_argument("--extension", required=True)
    s.add_argument("--relation", required=True)
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("kantorovich", parents=[common], help="Kantorovich extension of liftings")
    s.add_argument("--functor", default="pow")
    s.add_argument("--liftings", required=True, help="comma-separated lifting names")
    s.add_argument("--relation", required=True)
    s.set_defaults(func=cmd_kantorovich)

    s = sub.add_parser("moss", parents=[common], help="list Moss liftings")
    s.add_argument("--extension", required=True)
    s.add_argument("--kappa", type=int, default=1)
    s.set_defaults(func=cmd_moss)

    s = sub.add_parser("represent", parents=[common], help="compare E r with its Moss representation")
    s.add_argument("--extension", required=True)
    s.add_argument("--relation", required=True)
    s.add_argument("--drop", type=int, default=None, help="omit one Moss lifting by index")
    s.set_defaults(func=cmd_represent)

    s = sub.add_parser("distance", parents=[common], help="simulation distance of a coalgebra")
    s.add_argument("--extension", required=True)
    s.add_argument("--coalgebra", required=True)
    s.add_argument("--steps", action="store_true", help="print the iteration trace")
    s.add_argument("--max-iter", type=int, default=None)
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("closure", parents=[common], help="closure and density of a subset")
    s.add_argument("--vcat", required=True)
    s.add_argument("--subset", default="")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("extend-functor", parents=[common], help="extend phi along a full embedding")
    s.add_argument("--embedding", required=True)
    s.add_argument("--dom", required=True)
    s.add_argument("--cod", required=True)
    s.add_argument("--phi", required=True)
    s.set_defaults(func=cmd_extend_functor)

    s = sub.add_parser("lift", parents=[common], help="lift a V-category along an extension")
    s.add_argument("--extension", required=True)
    s.add_argument("--vcat", required=True)
    s.set_defaults(func=cmd_lift)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cap is not None:
            with size_cap(args.cap):
                return args.func(args)
        return args.func(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return CAP
    except (InputError, KeyError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return INPUT
    except (MismatchError, NotFullyFaithful, IterationBoundExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return FAIL
    except LaxRelError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT


if __name__ == "__main__":
    sys.exit(main())
