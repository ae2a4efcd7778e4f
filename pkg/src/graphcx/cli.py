"""Command-line entry point: ``graphcx <command> [options]``.

Every command builds a report document (tool version, configuration,
content hashes of the inputs, result) and prints it as JSON or as a
table.  With ``--out DIR`` the JSON document, a tab-separated table and a
figure (PNG) are written there.  Results are cached under ``--cache`` (or
``$GRAPHCX_CACHE``) keyed by the content hash of the configuration and
inputs; cache files carry their own hash and are rejected on mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Callable, Dict, List, Optional

from graphcx import __version__
from graphcx.exact import PrimeField, field_from_spec

SOFT_LIMITS = {"contractible_edges": 8, "arity": 6, "algebra_dim": 6}


class CLIError(Exception):
    pass


# -- helpers -------------------------------------------------------------------------

def _hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()


def _degrees(spec: Optional[str]):
    """'0..4' -> (0, 4); '3' -> (3, 3); None -> None."""
    if spec is None:
        return None
    if ".." in spec:
        a, b = spec.split("..")
        return int(a or 0), int(b)
    return int(spec), int(spec)


def _operad(name, need_arity: int, field):
    from graphcx.operad.core import load_operad

    if str(name).lower() in ("ass", "comm"):
        return load_operad(name, max_arity=max(6, need_arity), field=field)
    P = load_operad(name, field=field)
    if P.max_arity < need_arity:
        raise CLIError(f"{P.name} is truncated at arity {P.max_arity}; this job needs {need_arity}")
    return P


def _check_prime(field, orders):
    if isinstance(field, PrimeField):
        bad = sorted({o for o in orders if o % field.p == 0})
        if bad:
            raise CLIError(f"prime {field.p} divides automorphism orders {bad}; choose a larger prime")


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


class Cache:
    """Content-addressed JSON cache with atomic writes."""

    def __init__(self, root: Optional[str]):
        self.root = Path(root) if root else None

    def get(self, key: str):
        if self.root is None:
            return None
        path = self.root / f"{key}.json"
        if not path.exists():
            return None
        doc = json.loads(path.read_text())
        if doc.get("key") != key or doc.get("digest") != _hash(doc.get("result")):
            raise CLIError(f"cache entry {path} is corrupt (hash mismatch)")
        return doc["result"]

    def put(self, key: str, result):
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        doc = {"key": key, "digest": _hash(result), "result": result}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
        os.replace(tmp, self.root / f"{key}.json")


# -- commands ---------------------------------------------------------------------------
# Each command returns (config, inputs, result, table rows, plot spec).

def cmd_enumerate(a, field):
    from graphcx.graphs import enumerate_graphs
    from graphcx.trees import encode, enumerate_trees

    if a.kind == "trees":
        flavor = {"ribbon": "nonsymmetric", "plain": "symmetric"}.get(a.flavor, a.flavor)
        rows = []
        for i in range(0, a.n - 1) if a.inner is None else [a.inner]:
            for t in enumerate_trees(a.n, i, flavor):
                rows.append({"inner_edges": i, "tree": encode(t)})
        result = {"count": len(rows), "trees": rows}
        counts = {}
        for r in rows:
            counts[r["inner_edges"]] = counts.get(r["inner_edges"], 0) + 1
        plot = ("bar", "trees by inner edges", sorted(counts.items()), "inner edges", "count")
        return {"kind": "trees", "n": a.n, "inner": a.inner, "flavor": flavor}, {}, result, rows, plot
    flavor = {"nonsymmetric": "ribbon", "symmetric": "plain"}.get(a.flavor, a.flavor)
    classes = enumerate_graphs(flavor, a.legs, b1=a.b1, vertices=a.vertices, edges=a.edges)
    if a.contractible is not None:
        classes = [c for c in classes if len(c.graph.contractible_edges()) == a.contractible]
    rows = []
    for c in classes:
        d = c.describe()
        d["contractible"] = len(c.graph.contractible_edges())
        d["graph"] = json.dumps(c.graph.to_document(), sort_keys=True)
        rows.append(d)
    result = {"count": len(rows), "classes": rows}
    orders = {}
    for r in rows:
        orders[r["aut_order"]] = orders.get(r["aut_order"], 0) + 1
    plot = ("bar", "automorphism orders", sorted(orders.items()), "|Aut|", "classes")
    cfg = {"kind": "graphs", "flavor": flavor, "legs": a.legs, "b1": a.b1, "vertices": a.vertices,
           "edges": a.edges, "contractible": a.contractible}
    return cfg, {}, result, rows, plot


def _complex_rows(cx):
    rows = []
    for i, h in cx.homology_dims():
        rows.append({"degree": i, "dim_C": cx.dim(i), "rank_d": cx.rank(i), "dim_H": h})
    return rows


def cmd_tree_homology(a, field):
    from graphcx.trees import build_tree_complex

    P = _operad(a.operad, a.n, field)
    cx = build_tree_complex(P, a.n, a.orientation)
    rows = _complex_rows(cx)
    top = a.n - 2
    result = {"homology": rows, "euler": cx.euler_characteristic(),
              "concentrated": all(r["dim_H"] == 0 for r in rows if r["degree"] != top),
              "d_squared_zero": cx.d_squared_is_zero()}
    plot = ("homology", f"tree complex {P.name}, n={a.n}", rows)
    return ({"operad": P.name, "n": a.n, "orientation": a.orientation},
            {"operad": _hash(P.to_document())}, result, rows, plot)


def cmd_graph_homology(a, field):
    from graphcx.graphcomplex import build_graph_complex

    if a.max_contractible is not None and a.max_contractible > SOFT_LIMITS["contractible_edges"]:
        _warn(f"more than {SOFT_LIMITS['contractible_edges']} contractible edges may be slow")
    P = _operad(a.operad, 2 * a.b1 + a.legs - 1, field)
    cx = build_graph_complex(P, a.b1, a.legs, a.orientation, max_degree=a.max_degree,
                             max_contractible=a.max_contractible)
    _check_prime(field, [cc.iso.aut_order for cc in cx.classes.values()])
    rows = _complex_rows(cx)
    result = {"homology": rows, "euler": cx.euler_characteristic(),
              "d_squared_zero": cx.d_squared_is_zero(),
              "vanishing_classes": len(cx.zero_classes()), "classes": len(cx.classes)}
    plot = ("homology", f"graph complex {P.name}, b1={a.b1}, legs={a.legs}", rows)
    cfg = {"operad": P.name, "b1": a.b1, "legs": a.legs, "orientation": a.orientation,
           "max_degree": a.max_degree, "max_contractible": a.max_contractible}
    return cfg, {"operad": _hash(P.to_document())}, result, rows, plot


def cmd_quotient_operad(a, field):
    from graphcx.operad.cobar import DualCollection, build_quotient_operad, check_ideal_closure

    P = _operad(a.operad, a.max_arity, field)
    Q = build_quotient_operad(DualCollection(P), a.max_arity, a.orientation)
    summary = Q.summary()
    rows = [dict(arity=n, **v) for n, v in sorted(summary.items())]
    result = {"dims": rows, "ideal_closure_failures": check_ideal_closure(Q)}
    plot = ("lines", f"Q({P.name})", rows, "arity", ["free", "ideal", "quotient"])
    return ({"operad": P.name, "max_arity": a.max_arity, "orientation": a.orientation},
            {"operad": _hash(P.to_document())}, result, rows, plot)


def _algebra(a, P, field):
    from graphcx.statesum import BUILTIN_ALGEBRAS, load_algebra

    ref = a.algebra
    if ref in BUILTIN_ALGEBRAS and P.symmetric and not ref.startswith("lie-"):
        ref = "lie-" + ref
    B = load_algebra(ref, P, field)
    if B.dim > SOFT_LIMITS["algebra_dim"]:
        _warn(f"algebra dimension {B.dim} exceeds the soft limit {SOFT_LIMITS['algebra_dim']}")
    return B


def _fmt(x):
    if isinstance(x, dict):
        return {",".join(map(str, k)): str(v) for k, v in sorted(x.items())}
    return str(x)


def cmd_statesum(a, field):
    from graphcx.graphcomplex import build_graph_complex
    from graphcx.statesum import homology_class_of, universal_chain, verify_cycle

    lo_hi = _degrees(a.degrees)
    P = _operad(a.operad, 2 * a.b1 + a.legs - 1, field)
    B = _algebra(a, P, field)
    cx = build_graph_complex(P, a.b1, a.legs, "koszul",
                             max_degree=lo_hi[1] if lo_hi else None)
    _check_prime(field, [cc.iso.aut_order for cc in cx.classes.values()])
    rows, per_degree = [], []
    for i in cx.degrees():
        if lo_hi and not lo_hi[0] <= i <= lo_hi[1]:
            continue
        ch = universal_chain(cx, B, i)
        ok, res = verify_cycle(ch, cx)
        entry = {"degree": i, "dim_C": cx.dim(i), "nonzero": sum(1 for x in ch.coefficients if x),
                 "cycle": ok}
        detail = {"degree": i, "cycle": ok,
                  "coefficients": [{"graph": cx.classes[code].iso.describe(), "coloring": list(alpha),
                                    "value": _fmt(x)}
                                   for (code, alpha), x in zip(cx.bases[i], ch.coefficients) if x]}
        if not ok:
            detail["residual"] = [_fmt(x) for x in res]
        if ok and not a.legs:
            cls = homology_class_of(ch, cx)
            detail["homology_class"] = {"zero": cls["zero"],
                                        "coordinates": [str(x) for x in cls.get("coordinates") or []]}
            entry["class_zero"] = cls["zero"]
        rows.append(entry)
        per_degree.append(detail)
    result = {"algebra": B.name, "all_cycles": all(r["cycle"] for r in rows), "degrees": per_degree}
    plot = ("statesum", f"{B.name} on {P.name} graphs, b1={a.b1}", rows)
    cfg = {"operad": P.name, "algebra": a.algebra, "b1": a.b1, "legs": a.legs, "degrees": a.degrees}
    inputs = {"operad": _hash(P.to_document()), "algebra": _hash(B.to_document())}
    return cfg, inputs, result, rows, plot


def cmd_deform(a, field):
    from graphcx.graphcomplex import build_graph_complex
    from graphcx.lacunar import (build_lacunar_complex, deformation_constraints,
                                 evaluate_lacunar_cycle, perturb_off_kernel)

    P = _operad(a.operad, max(a.k, 2 * a.b1 + a.legs - 1), field)
    B = _algebra(a, P, field)
    system = deformation_constraints(P, a.k, B)
    kernel = system.kernel()
    if a.perturb:
        lam = perturb_off_kernel(system)
        label = "perturbed"
    elif kernel:
        lam = kernel[min(a.index, len(kernel) - 1)]
        label = f"kernel[{min(a.index, len(kernel) - 1)}]"
    else:
        lam, label = {}, "zero"
    lac = build_lacunar_complex(P, a.k, a.b1, a.legs)
    cx = lac.ambient
    _check_prime(field, [cc.iso.aut_order for cc in cx.classes.values()])
    rows = []
    for i in cx.degrees():
        ev = evaluate_lacunar_cycle(cx, B, a.k, lam or {}, i)
        rows.append({"degree": i, "dim_C": cx.dim(i), "lacunar_basis": lac.complex.dim(i),
                     "lacunar_support": ev.lacunar_support(), "cycle_mod_t2": ev.cycle_mod_t2})
    result = {"unknowns": system.n_unknowns, "invariant_dim": len(system.invariant_basis),
              "kernel_dim": len(kernel), "lambda": label,
              "all_cycles_mod_t2": all(r["cycle_mod_t2"] for r in rows), "audit": lac.audit()}
    plot = ("deform", f"deformations of {B.name}, k={a.k}, b1={a.b1}", rows)
    cfg = {"operad": P.name, "algebra": a.algebra, "k": a.k, "b1": a.b1, "legs": a.legs,
           "index": a.index, "perturb": a.perturb}
    inputs = {"operad": _hash(P.to_document()), "algebra": _hash(B.to_document())}
    return cfg, inputs, result, rows, plot


def cmd_check(a, field):
    from graphcx.graphcomplex import build_graph_complex
    from graphcx.operad.core import check_axioms, load_operad
    from graphcx.trees import build_tree_complex

    rows = []
    for name in ("ass", "comm", "lie"):
        P = load_operad(name, field=field, validate=False)
        bad = check_axioms(P)
        rows.append({"suite": f"axioms {name}", "ok": not bad, "detail": len(bad)})
    for name in ("ass", "comm"):
        P = load_operad(name, field=field)
        for n in range(2, a.max_n + 1):
            cx = build_tree_complex(P, n, check=False)
            rows.append({"suite": f"trees {name} n={n} d^2=0", "ok": cx.d_squared_is_zero(), "detail": n})
        for b1 in range(1, a.max_b1 + 1):
            cx = build_graph_complex(load_operad(name, max_arity=max(6, 2 * b1 - 1), field=field),
                                     b1, 0, check=False)
            rows.append({"suite": f"graphs {name} b1={b1} d^2=0", "ok": cx.d_squared_is_zero(), "detail": b1})
    result = {"all_ok": all(r["ok"] for r in rows), "suites": rows}
    counts = [("ok", sum(r["ok"] for r in rows)), ("failed", sum(not r["ok"] for r in rows))]
    plot = ("bar", "check suites", counts, "status", "suites")
    return {"max_n": a.max_n, "max_b1": a.max_b1}, {}, result, rows, plot


COMMANDS: Dict[str, Callable] = {
    "enumerate": cmd_enumerate,
    "tree-homology": cmd_tree_homology,
    "graph-homology": cmd_graph_homology,
    "quotient-operad": cmd_quotient_operad,
    "statesum": cmd_statesum,
    "deform": cmd_deform,
    "check": cmd_check,
}


# -- rendering -----------------------------------------------------------------------------

def render_table(rows: List[dict], sep: str = "\t") -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        cols.extend(c for c in r if c not in cols)
    lines = [sep.join(cols)]
    for r in rows:
        lines.append(sep.join(str(r.get(c, "")) for c in cols))
    return "\n".join(lines) + "\n"


def render_figure(plot, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    kind, title = plot[0], plot[1]
    fig, ax = plt.subplots(figsize=(6, 4))
    if kind == "bar":
        _, _, items, xl, yl = plot
        ax.bar([str(k) for k, _ in items], [v for _, v in items], color="tab:blue")
        ax.set_xlabel(xl)
        ax.set_ylabel(yl)
    elif kind == "homology":
        rows = plot[2]
        xs = [r["degree"] for r in rows]
        ax.bar([x - 0.2 for x in xs], [r["dim_C"] for r in rows], width=0.4, label="dim C")
        ax.bar([x + 0.2 for x in xs], [r["dim_H"] for r in rows], width=0.4, label="dim H")
        ax.set_xlabel("degree")
        ax.set_xticks(xs)
        ax.legend()
    elif kind == "lines":
        _, _, rows, xkey, ykeys = plot
        for k in ykeys:
            ax.plot([r[xkey] for r in rows], [r[k] for r in rows], marker="o", label=k)
        ax.set_xlabel(xkey)
        ax.set_yscale("log")
        ax.legend()
    elif kind in ("statesum", "deform"):
        rows = plot[2]
        xs = [r["degree"] for r in rows]
        key = "nonzero" if kind == "statesum" else "lacunar_support"
        flag = "cycle" if kind == "statesum" else "cycle_mod_t2"
        ax.bar([x - 0.2 for x in xs], [r["dim_C"] for r in rows], width=0.4, label="dim C")
        ax.bar([x + 0.2 for x in xs], [r[key] for r in rows], width=0.4,
               color=["tab:green" if r[flag] else "tab:red" for r in rows], label=key)
        ax.set_xlabel("degree")
        ax.set_xticks(xs)
        ax.legend()
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def build_report(command: str, args, field) -> tuple:
    fn = COMMANDS[command]
    cfg, inputs, result, rows, plot = fn(args, field)
    doc = {"tool": "graphcx", "version": __version__, "command": command,
           "field": repr(field), "config": cfg, "inputs": inputs, "result": result, "table": rows}
    return doc, plot


def run(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    a = parser.parse_args(argv)
    if not a.command:
        parser.print_help()
        return 2
    try:
        field = field_from_spec(a.field)
        cache = Cache(a.cache or os.environ.get("GRAPHCX_CACHE"))
        key = _hash({"command": a.command, "field": a.field, "version": __version__,
                     "args": {k: v for k, v in vars(a).items() if k not in ("out", "cache", "format")}})
        cached = cache.get(key)
        if cached is not None:
            doc, plot = cached["doc"], cached["plot"]
        else:
            doc, plot = build_report(a.command, a, field)
            doc = json.loads(json.dumps(doc, sort_keys=True, default=str))
            plot = json.loads(json.dumps(plot, default=str))
            cache.put(key, {"doc": doc, "plot": plot})
    except (CLIError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if a.format == "json":
        sys.stdout.write(text)
    else:
        sys.stdout.write(render_table(doc["table"], sep="  "))
    if a.out:
        out = Path(a.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = a.command
        (out / f"{stem}.json").write_text(text)
        (out / f"{stem}.tsv").write_text(render_table(doc["table"]))
        render_figure(plot, out / f"{stem}.png")
    ok = doc["result"]
    failed = any(ok.get(k) is False for k in ("all_cycles", "all_cycles_mod_t2", "all_ok", "d_squared_zero"))
    return 3 if failed else 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphcx", description="Graph complexes of cyclic operads.")
    p.add_argument("--version", action="version", version=f"graphcx {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="QQ", help="QQ (default) or a prime p")
    common.add_argument("--out", help="directory for <command>.json/.tsv/.png")
    common.add_argument("--cache", help="cache directory (default $GRAPHCX_CACHE, unset = no cache)")
    common.add_argument("--format", choices=["json", "table"], default="json")
    sub = p.add_subparsers(dest="command")

    e = sub.add_parser("enumerate", parents=[common], help="enumerate graphs or trees")
    e.add_argument("--kind", choices=["graphs", "trees"], default="graphs")
    e.add_argument("--flavor", default="plain", help="plain|ribbon (trees: symmetric|nonsymmetric)")
    e.add_argument("--legs", type=int, default=0)
    e.add_argument("--b1", type=int)
    e.add_argument("--vertices", type=int)
    e.add_argument("--edges", type=int, help="internal edges, loops included")
    e.add_argument("--contractible", type=int, help="keep graphs with exactly this many non-loop edges")
    e.add_argument("--n", type=int, default=3, help="leaves (trees)")
    e.add_argument("--inner", type=int, help="inner edges (trees)")

    t = sub.add_parser("tree-homology", parents=[common], help="homology of the tree complex")
    t.add_argument("--operad", default="ass")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--orientation", choices=["koszul", "edges"], default="koszul")

    g = sub.add_parser("graph-homology", parents=[common], help="homology of the graph complex")
    g.add_argument("--operad", default="comm")
    g.add_argument("--b1", type=int, required=True)
    g.add_argument("--legs", type=int, default=0)
    g.add_argument("--max-degree", type=int)
    g.add_argument("--max-contractible", type=int)
    g.add_argument("--orientation", choices=["koszul", "edges"], default="koszul")

    q = sub.add_parser("quotient-operad", parents=[common], help="dimensions of Q(n)")
    q.add_argument("--operad", default="ass")
    q.add_argument("--max-arity", type=int, default=4)
    q.add_argument("--orientation", choices=["koszul", "edges"], default="koszul")

    s = sub.add_parser("statesum", parents=[common], help="evaluate and verify the universal chain")
    s.add_argument("--operad", default="ass")
    s.add_argument("--algebra", default="m2", help="builtin name or JSON/YAML file")
    s.add_argument("--b1", type=int, default=2)
    s.add_argument("--legs", type=int, default=0)
    s.add_argument("--degrees", help="range like 0..5")

    d = sub.add_parser("deform", parents=[common], help="first-order deformations and lacunar cycles")
    d.add_argument("--operad", default="ass")
    d.add_argument("--algebra", default="m2")
    d.add_argument("--k", type=int, default=3)
    d.add_argument("--b1", type=int, default=2)
    d.add_argument("--legs", type=int, default=1)
    d.add_argument("--index", type=int, default=0, help="which kernel vector to evaluate")
    d.add_argument("--perturb", action="store_true", help="use an invariant lambda off the kernel")

    c = sub.add_parser("check", parents=[common], help="axiom and d^2=0 suites")
    c.add_argument("--max-n", type=int, default=5)
    c.add_argument("--max-b1", type=int, default=3)
    return p


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
