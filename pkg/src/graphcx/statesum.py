"""Cyclic algebras, state sums and the evaluated universal chain.

A cyclic algebra over a cyclic operad P is a vector space V with a
symmetric nondegenerate form h and, for every basis element e_a of P(k),
an operation A(e_a^) : V^k -> V.  The vertex tensor of e_a is

    T_a[i0, i1, ..., ik] = h(A(e_a^)(v_i1, ..., v_ik), v_i0),

with slot 0 the output.  A vertex of a graph, anchored by f and colored by
the vector p in P(k), contributes sum_a p_a T_a with slot j sitting on the
half-edge f(j); every internal edge (loops included) contributes the
propagator nu = h^{-1}.  The state sum Z is the contraction of this network.

Anchor independence means (f o s^-1, s.p) and (f, p) give the same tensor,
where s.p is the color action used by the graph complex (twisted by the
sign of s in the Koszul convention).  The Q-relations are checked with the
graph complex itself: on trees with labelled legs, the evaluated universal
chain in degree 1 must have zero boundary.  This makes the algebra axioms
and the cycle test share one sign convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from graphcx.chains import color_action
from graphcx.exact import QQ, Field, SparseMatrix, field_from_spec, solve
from graphcx.graphs import HalfEdgeGraph, canonical_anchor
from graphcx.operad.core import OperadSpec, load_operad

Tensor = Dict[Tuple[int, ...], object]


class AlgebraError(ValueError):
    """An algebra axiom fails; ``violations`` lists the failing instances."""

    def __init__(self, message, violations=()):
        super().__init__(message if not violations else f"{message}: {violations[:5]}")
        self.violations = list(violations)


# -- small dense helpers ----------------------------------------------------------

def _invert(M, F: Field):
    n = len(M)
    A = SparseMatrix.from_dense(M, F)
    cols = []
    for j in range(n):
        e = [F.one() if r == j else F.zero() for r in range(n)]
        x = solve(A, e)
        if x is None:
            return None
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _indices(d: int, m: int):
    return itertools.product(range(d), repeat=m)


# -- the algebra -------------------------------------------------------------------

@dataclass
class CyclicAlgebra:
    """(V, A, h, nu) with structure tensors stored sparsely.

    ``operations[k][a]`` maps (j, i1, ..., ik) to the coefficient of v_j in
    A(e_a^)(v_i1, ..., v_ik); ``tensors[k][a]`` holds the vertex tensors.
    """

    name: str
    operad: OperadSpec
    dim: int
    form: List[List]
    propagator: List[List]
    operations: Dict[int, Dict[int, Tensor]]
    tensors: Dict[int, Dict[int, Tensor]]
    labels: List[str] = dc_field(default_factory=list)

    @property
    def field(self) -> Field:
        return self.operad.field

    @property
    def arities(self) -> List[int]:
        return sorted(k for k, ops in self.tensors.items() if any(ops.values()))

    def vertex_tensor(self, k: int, color) -> Tensor:
        """sum_a p_a T_a for a color vector p of P(k), or T_a for a basis index a."""
        F = self.field
        ops = self.tensors.get(k, {})
        if isinstance(color, int):
            return dict(ops.get(color, {}))
        out: Tensor = {}
        for a, x in enumerate(color):
            if not x or a not in ops:
                continue
            for idx, y in ops[a].items():
                out[idx] = F.add(out.get(idx, F.zero()), F.mul(x, y))
        return {i: v for i, v in out.items() if v}

    def to_document(self) -> dict:
        ops = []
        for k in sorted(self.operations):
            for a in sorted(self.operations[k]):
                dense = _dense(self.operations[k][a], self.dim, k + 1, self.field)
                ops.append({"arity": k, "label": self.operad.labels[k][a], "tensor": dense})
        return {"name": self.name, "operad": self.operad.name, "dimension": self.dim,
                "basis_labels": list(self.labels),
                "form_h": [[str(x) for x in row] for row in self.form],
                "operations": ops}


def _dense(t: Tensor, d: int, m: int, F: Field):
    def go(prefix):
        if len(prefix) == m:
            return str(t.get(tuple(prefix), F.zero()))
        return [go(prefix + [j]) for j in range(d)]
    return go([])


def _vertex_tensors(ops: Dict[int, Dict[int, Tensor]], form, F: Field):
    out = {}
    for k, per in ops.items():
        out[k] = {}
        for a, A in per.items():
            T: Tensor = {}
            for (j, *ins), x in A.items():
                for i0, hv in enumerate(form[j]):
                    if hv:
                        key = (i0, *ins)
                        T[key] = F.add(T.get(key, F.zero()), F.mul(x, hv))
            out[k][a] = {i: v for i, v in T.items() if v}
    return out


def cyclic_algebra(P: OperadSpec, form, operations: Dict[int, Dict[int, Tensor]], name: str = "",
                   labels: Sequence[str] = (), check: bool = True,
                   relation_arities: Optional[Sequence[int]] = None) -> CyclicAlgebra:
    """Assemble and (by default) verify a cyclic algebra."""
    F = P.field
    form = [[F.convert(x) for x in row] for row in form]
    d = len(form)
    ops = {k: {a: {tuple(i): F.convert(x) for i, x in t.items() if F.convert(x)}
               for a, t in per.items()} for k, per in operations.items()}
    for k in ops:
        if k > P.max_arity:
            raise AlgebraError(f"operation arity {k} exceeds the truncation of {P.name}")
    nu = _invert(form, F) if all(len(r) == d for r in form) else None
    B = CyclicAlgebra(name or "algebra", P, d, form, nu, ops,
                      _vertex_tensors(ops, form, F), list(labels) or [f"v{j}" for j in range(d)])
    if check:
        bad = check_algebra(B, relation_arities=relation_arities)
        if bad:
            raise AlgebraError(f"{B.name} is not a cyclic {P.name}-algebra", bad)
    return B


# -- axiom checks ----------------------------------------------------------------------

def check_form(B: CyclicAlgebra) -> List[str]:
    F, d, h = B.field, B.dim, B.form
    bad = []
    if any(len(r) != d for r in h):
        return ["form is not square"]
    for i in range(d):
        for j in range(i + 1, d):
            if h[i][j] != h[j][i]:
                bad.append(f"form not symmetric at ({i},{j})")
    if B.propagator is None:
        bad.append("form is degenerate")
        return bad
    for i in range(d):
        for j in range(d):
            s = F.zero()
            for m in range(d):
                s = F.add(s, F.mul(h[i][m], B.propagator[m][j]))
            if s != (F.one() if i == j else F.zero()):
                bad.append(f"zig-zag identity fails at ({i},{j})")
    return bad


def check_cyclic_invariance(B: CyclicAlgebra, orientation: str = "koszul") -> List[str]:
    """Anchor invariance of sum_a e_a (x) T_a under the local group generators."""
    P, F, d = B.operad, B.field, B.dim
    bad = []
    for k in sorted(B.tensors):
        for gname, s in P.generator_perms(k).items():
            for b in range(P.dim(k)):
                moved = color_action(P, k, s, P.basis_vector(k, b), orientation)
                target = B.tensors[k].get(b, {})
                lhs: Tensor = {}
                for a, x in enumerate(moved):
                    if not x:
                        continue
                    for idx, y in B.tensors[k].get(a, {}).items():
                        # idx = j o s^-1, i.e. j[t] = idx[s(t)]
                        j = tuple(idx[s[t]] for t in range(k + 1))
                        lhs[j] = F.add(lhs.get(j, F.zero()), F.mul(x, y))
                lhs = {i: v for i, v in lhs.items() if v}
                if lhs != target:
                    diff = sorted(i for i in set(lhs) | set(target) if lhs.get(i) != target.get(i))
                    bad.append(f"arity {k}, color {P.labels[k][b]}, generator {gname}: "
                               f"invariance fails at {diff[0]}")
    return bad


def relation_complex(P: OperadSpec, n: int, orientation: str = "koszul"):
    """Trees with n+1 labelled legs and at most two vertices.

    For ribbon flavor only trees whose legs read 0..n in boundary order are
    kept (the others differ by relabelling).  Degree 1 -> degree 0 carries
    the arity-n relations.
    """
    from graphcx.graphcomplex import build_graph_complex, flavor_for

    flt = None
    if flavor_for(P) == "ribbon":
        flt = lambda g: leg_boundary_order(g) == tuple(range(1, n + 2))
    return build_graph_complex(P, 0, n + 1, orientation, max_degree=1, graph_filter=flt)


def leg_boundary_order(g: HalfEdgeGraph) -> Tuple[int, ...]:
    """Leg labels met along the boundary of a ribbon tree, starting from leg 1."""
    phi = [g.rot[g.inv[h]] for h in range(g.n_half)]
    start = g.leg_half_edge(1)
    out, h = [], start
    while True:
        if g.leg_labels[h]:
            out.append(g.leg_labels[h])
        h = phi[h]
        if h == start:
            break
    return tuple(out)


def relation_residual(B: CyclicAlgebra, n: int, orientation: str = "koszul", complex=None):
    """Boundary of the evaluated degree-1 tree chain with n+1 legs (zero iff the arity-n relations hold)."""
    cx = complex if complex is not None else relation_complex(B.operad, n, orientation)
    if not cx.dim(1):
        return []
    chain = universal_chain(cx, B, 1)
    ok, residual = verify_cycle(chain, cx)
    return [] if ok else residual


def check_relations(B: CyclicAlgebra, orientation: str = "koszul",
                    arities: Optional[Sequence[int]] = None) -> List[str]:
    """Q-relations in every arity reachable by composing two nonzero operations."""
    ks = B.arities
    if arities is None:
        arities = sorted({k + l - 1 for k in ks for l in ks if k + l - 1 <= B.operad.max_arity})
    bad = []
    for n in arities:
        res = relation_residual(B, n, orientation)
        for j, t in enumerate(res):
            if t:
                comp = sorted(t)[0]
                bad.append(f"arity {n} relation {j} fails at leg indices {comp}")
                break
    return bad


def check_algebra(B: CyclicAlgebra, orientation: str = "koszul",
                  relation_arities: Optional[Sequence[int]] = None) -> List[str]:
    bad = check_form(B)
    if bad:
        return bad
    bad = check_cyclic_invariance(B, orientation)
    if bad:
        return bad
    return check_relations(B, orientation, relation_arities)


# -- constructors ----------------------------------------------------------------------

def _mult_tensor(mult, d: int, F: Field) -> Tensor:
    """mult[i][j] is {k: c} (or a dense list) with v_i v_j = sum c v_k; returns A[(k, i, j)]."""
    A: Tensor = {}
    for i in range(d):
        for j in range(d):
            entry = mult[i][j]
            items = entry.items() if isinstance(entry, dict) else enumerate(entry)
            for k, c in items:
                c = F.convert(c)
                if c:
                    A[(int(k), i, j)] = c
    return A


def _product(A: Tensor, d: int, F: Field):
    table = [[[F.zero()] * d for _ in range(d)] for _ in range(d)]
    for (k, i, j), c in A.items():
        table[i][j][k] = c
    return table


def frobenius_from_multiplication(mult, trace: Sequence, field: Field = QQ, name: str = "",
                                  labels: Sequence[str] = (), operad: Optional[OperadSpec] = None,
                                  check: bool = True) -> CyclicAlgebra:
    """Strict cyclic Ass-algebra from an associative multiplication and a trace.

    h(x, y) = trace(xy).  Raises on associativity failure or a degenerate form.
    """
    F = field
    d = len(mult)
    A = _mult_tensor(mult, d, F)
    table = _product(A, d, F)
    tr = [F.convert(x) for x in trace]
    for i, j, k in _indices(d, 3):
        left = [F.zero()] * d
        right = [F.zero()] * d
        for m in range(d):
            a, b = table[i][j][m], table[j][k][m]
            for r in range(d):
                if a:
                    left[r] = F.add(left[r], F.mul(a, table[m][k][r]))
                if b:
                    right[r] = F.add(right[r], F.mul(b, table[i][m][r]))
        if left != right:
            raise AlgebraError(f"{name or 'algebra'}: multiplication is not associative at ({i},{j},{k})")
    form = [[F.zero()] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            s = F.zero()
            for m in range(d):
                s = F.add(s, F.mul(table[i][j][m], tr[m]))
            form[i][j] = s
    P = operad or load_operad("ass", field=F)
    return cyclic_algebra(P, form, {2: {0: A}}, name, labels, check)


def commutator_algebra(B: CyclicAlgebra, operad: Optional[OperadSpec] = None,
                       check: bool = True) -> CyclicAlgebra:
    """The Lie algebra [x, y] = xy - yx with the same invariant form, as a Comm-type algebra."""
    F = B.field
    A = B.operations[2][0]
    L: Tensor = {}
    for (k, i, j), c in A.items():
        L[(k, i, j)] = F.add(L.get((k, i, j), F.zero()), c)
        L[(k, j, i)] = F.add(L.get((k, j, i), F.zero()), F.neg(c))
    P = operad or load_operad("comm", field=F)
    return cyclic_algebra(P, B.form, {2: {0: L}}, f"[{B.name}]", B.labels, check)


def _group_algebra(n: int, F: Field):
    mult = [[{(i + j) % n: 1} for j in range(n)] for i in range(n)]
    return mult


def builtin_algebra(name: str, field: Field = QQ, operad: Optional[OperadSpec] = None) -> CyclicAlgebra:
    """``field``, ``kz2``, ``kz3``, ``m2`` (Ass-type) or ``lie-m2`` etc. (commutators, Comm-type)."""
    if name.startswith("lie-"):
        return commutator_algebra(builtin_algebra(name[4:], field), operad)
    if name == "field":
        return frobenius_from_multiplication([[{0: 1}]], [1], field, "field", ["1"], operad)
    if name in ("kz2", "kz3"):
        n = int(name[-1])
        # h(a, b) = trace of left multiplication by ab
        return frobenius_from_multiplication(_group_algebra(n, field), [n] + [0] * (n - 1), field, name,
                                             [f"g{j}" for j in range(n)], operad)
    if name == "m2":
        idx = [(0, 0), (0, 1), (1, 0), (1, 1)]
        mult = [[({idx.index((a, d)): 1} if b == c else {}) for (c, d) in idx] for (a, b) in idx]
        trace = [1 if a == b else 0 for a, b in idx]
        return frobenius_from_multiplication(mult, trace, field, "m2",
                                             [f"E{a + 1}{b + 1}" for a, b in idx], operad)
    raise AlgebraError(f"unknown builtin algebra {name!r}")


BUILTIN_ALGEBRAS = ("field", "kz2", "kz3", "m2", "lie-field", "lie-kz2", "lie-kz3", "lie-m2")


def _parse_dense(t, m: int, F: Field) -> Tensor:
    out: Tensor = {}

    def go(x, prefix):
        if len(prefix) == m:
            v = F.convert(Fraction(x) if isinstance(x, str) else x)
            if v:
                out[tuple(prefix)] = v
            return
        for j, y in enumerate(x):
            go(y, prefix + [j])
    go(t, [])
    return out


def load_algebra(document, P: Optional[OperadSpec] = None, field: Optional[Field] = None,
                 check: bool = True) -> CyclicAlgebra:
    """Load an algebra document (dict or JSON/YAML path) or a builtin name.

    Document keys: ``dimension``, ``operad``, ``form_h`` (matrix of rational
    strings), ``operations``: list of {arity, label, tensor} where
    tensor[j][i1]...[ik] is the v_j coefficient of A(label^)(v_i1, ..., v_ik).
    ``multiplication``/``trace`` may replace ``operations``/``form_h`` for
    strict Frobenius algebras.  All axioms are verified unless ``check`` is off.
    """
    import json
    from pathlib import Path

    F = field or (P.field if P is not None else QQ)
    if isinstance(document, str) and document in BUILTIN_ALGEBRAS:
        return builtin_algebra(document, F, P)
    if isinstance(document, (str, Path)):
        text = Path(document).read_text()
        if str(document).endswith((".yaml", ".yml")):
            import yaml
            document = yaml.safe_load(text)
        else:
            document = json.loads(text)
    doc = dict(document)
    if "field" in doc and field is None and P is None:
        F = field_from_spec(doc["field"])
    if P is None:
        P = load_operad(doc.get("operad", "ass"), field=F)
    name = doc.get("name", "algebra")
    labels = doc.get("basis_labels", ())
    if "multiplication" in doc:
        B = frobenius_from_multiplication(doc["multiplication"], doc["trace"], F, name, labels,
                                          P if not P.symmetric else None, check=check)
        if doc.get("commutator") or P.symmetric:
            B = commutator_algebra(B, P, check)
        return B
    d = int(doc["dimension"])
    form = [[F.convert(Fraction(x) if isinstance(x, str) else x) for x in row] for row in doc["form_h"]]
    if len(form) != d:
        raise AlgebraError("form_h has the wrong size")
    ops: Dict[int, Dict[int, Tensor]] = {}
    for op in doc.get("operations", []):
        k = int(op["arity"])
        if k > P.max_arity:
            raise AlgebraError(f"operation arity {k} exceeds the truncation of {P.name}")
        lab = op["label"]
        if lab not in P.labels[k]:
            raise AlgebraError(f"{lab!r} is not a basis label of {P.name}({k})")
        ops.setdefault(k, {})[P.labels[k].index(lab)] = _parse_dense(op["tensor"], k + 1, F)
    return cyclic_algebra(P, form, ops, name, labels, check)


# -- tensor networks ---------------------------------------------------------------------

def _merge(F, A, B):
    """Contract two sparse tensors (axes, data) over their common axes."""
    (ax, da), (bx, db) = A, B
    shared = [x for x in ax if x in bx]
    ia = [ax.index(x) for x in shared]
    ib = [bx.index(x) for x in shared]
    keep_b = [j for j, x in enumerate(bx) if x not in shared]
    out_axes = tuple(ax) + tuple(bx[j] for j in keep_b)
    groups: Dict[tuple, list] = {}
    for idx, y in db.items():
        groups.setdefault(tuple(idx[j] for j in ib), []).append((tuple(idx[j] for j in keep_b), y))
    out: Dict[tuple, object] = {}
    for idx, x in da.items():
        for rest, y in groups.get(tuple(idx[j] for j in ia), ()):
            key = idx + rest
            out[key] = F.add(out.get(key, F.zero()), F.mul(x, y))
    # shared axes are summed: drop them from the result
    drop = [j for j, x in enumerate(out_axes) if x in shared]
    final_axes = tuple(x for j, x in enumerate(out_axes) if j not in drop)
    summed: Dict[tuple, object] = {}
    for key, v in out.items():
        k2 = tuple(x for j, x in enumerate(key) if j not in drop)
        summed[k2] = F.add(summed.get(k2, F.zero()), v)
    return final_axes, {k: v for k, v in summed.items() if v}


def _contract_network(F, factors, open_axes):
    """Greedy pairwise contraction; returns data over ``open_axes``."""
    factors = [f for f in factors]
    if any(not data for _, data in factors):
        return {}
    while len(factors) > 1:
        best = None
        for a in range(len(factors)):
            for b in range(a + 1, len(factors)):
                sa, sb = set(factors[a][0]), set(factors[b][0])
                if not sa & sb:
                    continue
                cost = len(factors[a][1]) * len(factors[b][1])
                if best is None or cost < best[0]:
                    best = (cost, a, b)
        if best is None:
            best = (0, 0, 1)  # disconnected pieces: outer product
        _, a, b = best
        merged = _merge(F, factors[a], factors[b])
        factors = [f for j, f in enumerate(factors) if j not in (a, b)] + [merged]
        if not merged[1]:
            return {}
    axes, data = factors[0]
    perm = [axes.index(x) for x in open_axes]
    if len(perm) != len(axes):
        raise ValueError("uncontracted internal axes remain")
    return {tuple(idx[j] for j in perm): v for idx, v in data.items()}


def _network(B: CyclicAlgebra, g: HalfEdgeGraph, colors, anchors):
    F = B.field
    if anchors is None:
        anchors = [canonical_anchor(g, v) for v in range(g.n_vertices)]
    factors = []
    for v in range(g.n_vertices):
        f = tuple(anchors[v])
        k = len(f) - 1
        T = B.vertex_tensor(k, colors[v])
        factors.append((f, T))
    nu = {(i, j): x for i, row in enumerate(B.propagator) for j, x in enumerate(row) if x}
    for a, b in g.edges():
        factors.append(((a, b), nu))
    legs = sorted((g.leg_labels[h], h) for h in range(g.n_half) if g.leg_labels[h])
    return factors, tuple(h for _, h in legs)


def evaluate_graph(B: CyclicAlgebra, g: HalfEdgeGraph, colors: Sequence, anchors=None):
    """State sum of a colored graph.

    ``colors`` holds, per vertex, a basis index or a color vector of P(k);
    ``anchors`` default to the canonical anchors.  Returns a scalar for
    closed graphs, else {leg indices (legs in label order): value}.
    """
    factors, legs = _network(B, g, colors, anchors)
    data = _contract_network(B.field, factors, legs)
    if not legs:
        return data.get((), B.field.zero())
    return data


def brute_force_evaluate(B: CyclicAlgebra, g: HalfEdgeGraph, colors: Sequence, anchors=None):
    """Independent oracle: explicit sum over the support of nu on every edge."""
    F = B.field
    if anchors is None:
        anchors = [canonical_anchor(g, v) for v in range(g.n_vertices)]
    tensors = [B.vertex_tensor(len(f) - 1, c) for f, c in zip(anchors, colors)]
    leg_half = [h for _, h in sorted((g.leg_labels[h], h) for h in range(g.n_half) if g.leg_labels[h])]
    if any(not T for T in tensors):
        return {} if leg_half else F.zero()
    nu_support = [((i, j), x) for i, row in enumerate(B.propagator) for j, x in enumerate(row) if x]
    edges = g.edges()
    out = {}
    for leg_idx in _indices(B.dim, len(leg_half)):
        total = F.zero()
        for choice in itertools.product(nu_support, repeat=len(edges)):
            lab = dict(zip(leg_half, leg_idx))
            w = F.one()
            for (a, b), ((i, j), x) in zip(edges, choice):
                lab[a], lab[b] = i, j
                w = F.mul(w, x)
            for f, T in zip(anchors, tensors):
                w = F.mul(w, T.get(tuple(lab[h] for h in f), F.zero()))
                if not w:
                    break
            total = F.add(total, w)
        if total:
            out[leg_idx] = total
    if not leg_half:
        return out.get((), F.zero())
    return out


# -- universal chains ---------------------------------------------------------------------

@dataclass
class StateSumChain:
    """Evaluated universal chain in one degree: scalars (closed graphs) or leg tensors."""

    degree: int
    legs: int
    coefficients: List
    algebra: str = ""

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def components(self):
        if not self.legs:
            return [None]
        return sorted({c for t in self.coefficients for c in t})

    def component(self, comp, F: Field) -> List:
        if comp is None:
            return list(self.coefficients)
        return [t.get(comp, F.zero()) for t in self.coefficients]


def class_value(B: CyclicAlgebra, cc, weight=None):
    """Coinvariant coordinates of sum_alpha Z_alpha(G) e_alpha / |Aut G| (tensor-valued with legs)."""
    F = B.field
    g = cc.graph
    scale = F.inv(F.convert(cc.iso.aut_order)) if weight is None else F.convert(weight)
    legs = g.n_legs
    per_comp: Dict = {}
    for alpha in cc.colorings:
        val = evaluate_graph(B, g, list(alpha))
        if legs:
            for comp, x in val.items():
                per_comp.setdefault(comp, {})[alpha] = F.mul(x, scale)
        elif val:
            per_comp.setdefault(None, {})[alpha] = F.mul(val, scale)
    coords = {comp: cc.coordinates(vec) for comp, vec in per_comp.items()}
    return coords


def universal_chain(cx, B: CyclicAlgebra, i: int, weight=None) -> StateSumChain:
    """B(xi_i): the evaluated universal chain of a graph complex in degree i."""
    if cx.operad is not None and cx.operad.name != B.operad.name:
        raise AlgebraError(f"complex over {cx.operad.name} but algebra over {B.operad.name}")
    F = B.field
    legs = cx.meta.get("legs", 0)
    basis = cx.bases.get(i, [])
    index = {lab: j for j, lab in enumerate(basis)}
    coeffs = [({} if legs else F.zero()) for _ in basis]
    seen = set()
    for code, _ in basis:
        if code in seen:
            continue
        seen.add(code)
        cc = cx.classes[code]
        for comp, vec in class_value(B, cc, weight).items():
            for r, x in zip(cc.reps, vec):
                if not x:
                    continue
                j = index[(code, cc.colorings[r])]
                if legs:
                    coeffs[j][comp] = x
                else:
                    coeffs[j] = x
    return StateSumChain(i, legs, coeffs, B.name)


def universal_chains(cx, B: CyclicAlgebra, degrees=None) -> Dict[int, StateSumChain]:
    return {i: universal_chain(cx, B, i) for i in (degrees or cx.degrees())}


def verify_cycle(chain: StateSumChain, cx):
    """(True, []) if the boundary vanishes exactly, else (False, residual).

    The residual is a list over the basis in degree i-1 (tensors for legs).
    """
    F = cx.field
    i = chain.degree
    if not cx.dim(i - 1):
        return True, []
    D = cx.differential(i)
    if not chain.legs:
        res = D.apply(chain.coefficients)
        return (not any(res)), ([] if not any(res) else res)
    res = [{} for _ in range(cx.dim(i - 1))]
    for comp in chain.components():
        vec = D.apply(chain.component(comp, F))
        for r, x in enumerate(vec):
            if x:
                res[r][comp] = x
    ok = not any(res)
    return ok, ([] if ok else res)


def homology_class_of(chain: StateSumChain, cx) -> dict:
    """Coordinates of a closed-graph cycle in a basis of H_i, or a boundary witness."""
    if chain.legs:
        raise AlgebraError("homology classes are reported for closed graphs only")
    ok, _ = verify_cycle(chain, cx)
    if not ok:
        raise AlgebraError("chain is not a cycle")
    return cx.homology_class(chain.degree, chain.coefficients)


# -- trees -----------------------------------------------------------------------------------

def evaluate_tree(B: CyclicAlgebra, tree, colors: Sequence) -> Tensor:
    """The composite operation of a colored tree: {(out, i_1..i_n): coef}, i_m at leaf m."""
    from graphcx.trees import vertices

    F = B.field
    color_of = {id(v): c for v, c in zip(vertices(tree), colors)}

    def go(t):
        if isinstance(t, int):
            return {(j, ((t, j),)): F.one() for j in range(B.dim)}
        op = B.operations.get(len(t), {}).get(color_of[id(t)], {})
        acc = {((), ()): F.one()}  # (child outputs, leaf assignment)
        for child in t:
            sub = go(child)
            nxt = {}
            for (outs, lv), x in acc.items():
                for (o, lv2), y in sub.items():
                    key = (outs + (o,), lv + lv2)
                    nxt[key] = F.add(nxt.get(key, F.zero()), F.mul(x, y))
            acc = nxt
        res = {}
        for (outs, lv), x in acc.items():
            for j in range(B.dim):
                c = op.get((j,) + outs)
                if c:
                    key = (j, tuple(sorted(lv)))
                    res[key] = F.add(res.get(key, F.zero()), F.mul(c, x))
        return {k: v for k, v in res.items() if v}

    out = {}
    for (j, lv), x in go(tree).items():
        out[(j,) + tuple(i for _, i in lv)] = x
    return out


def evaluate_tree_cycle(xi, B: CyclicAlgebra) -> Dict:
    """Image of xi_i(n) in C_i ⊗ Hom(V^n, V): each class of Q(n) acts through B.

    A class is evaluated on its representative monomial; this is well defined
    because B satisfies the Q-relations.  Returns {ColoredTree: tensor}.
    """
    Q, n, F = xi.quotient, xi.n, B.field
    reps = [evaluate_tree(B, m.tree, m.colors) for m in (Q.representative(n, j) for j in range(Q.dim(n)))]
    out = {}
    for ct, q in xi.terms.items():
        acc: Tensor = {}
        for x, T in zip(q, reps):
            if not x:
                continue
            for idx, y in T.items():
                acc[idx] = F.add(acc.get(idx, F.zero()), F.mul(x, y))
        acc = {k: v for k, v in acc.items() if v}
        if acc:
            out[ct] = acc
    return out


def tree_chain_boundary(P: OperadSpec, chain: Dict, orientation: str = "koszul") -> Dict:
    """∂ of a tensor-valued tree chain {ColoredTree: tensor}."""
    from graphcx.trees import tree_boundary

    F = P.field
    out: Dict = {}
    for ct, T in chain.items():
        for target, c in tree_boundary(P, ct, orientation).items():
            acc = out.setdefault(target, {})
            for idx, x in T.items():
                acc[idx] = F.add(acc.get(idx, F.zero()), F.mul(c, x))
    return {t: {k: v for k, v in T.items() if v} for t, T in out.items() if any(T.values())}
