"""The P-graph complex: colored graphs, coinvariant bases and the contraction differential.

For an isomorphism class G (canonical representative, canonical anchors,
canonical orientation) the colorings form W_G = ⊗_v P(k_v) with basis the
tuples of basis indices.  Aut(G) acts on W_G (colors moved along the
automorphism and re-anchored, times the orientation sign); the chain group
of G is the space of coinvariants W_G / span{(g - 1)w}, computed exactly
with ``quotient_basis``.  Basis elements of the complex are pairs
(class code, representative coloring), graded by the number of internal
edges (loops included).  For fixed loop order b1 this is V - 1 + b1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from graphcx.chains import GradedComplex, check_orientation, color_action, koszul_sign, reorder_sign
from graphcx.exact import SparseMatrix, quotient_basis
from graphcx.graphs import (GraphError, GraphIsoClass, HalfEdgeGraph, canonical_anchor,
                            canonical_form, contract_graph, enumerate_graphs, rotate_to)
from graphcx.operad.core import OperadSpec


def flavor_for(P: OperadSpec) -> str:
    if not P.cyclic:
        raise GraphError(f"{P.name} is not cyclic; graph complexes need a cyclic operad")
    return "plain" if P.symmetric else "ribbon"


def _edge_key(a, b):
    return (a, b) if a < b else (b, a)


@dataclass
class ColoredGraph:
    """A colored graph with explicit anchors, colors and orientation data."""

    graph: HalfEdgeGraph
    anchors: List[Tuple[int, ...]]
    colors: List[list]
    order: list  # vertex order (koszul) or edge order (edges)


def canonical_order(g: HalfEdgeGraph, orientation: str) -> list:
    if orientation == "koszul":
        return list(range(g.n_vertices))
    return list(g.edges())


def _parity(g: HalfEdgeGraph):
    """Block parity of a vertex: its odd vertex line plus its odd half-edges."""
    return {v: (g.valence(v) + 1) & 1 for v in range(g.n_vertices)}


def transport(P: OperadSpec, pg: ColoredGraph, orientation: str):
    """Move a presented colored graph onto its canonical representative.

    Returns ``(canonical form, sign, colors)`` where colors are vectors with
    respect to the canonical anchors of the canonical graph.
    """
    c = canonical_form(pg.graph)
    cg = c.graph
    iso, vmap = c.iso, c.vmap
    colors = [None] * cg.n_vertices
    for v, (f, vec) in enumerate(zip(pg.anchors, pg.colors)):
        w = vmap[v]
        F = canonical_anchor(cg, w)
        sigma = tuple(F.index(iso[h]) for h in f)
        colors[w] = color_action(P, len(f) - 1, sigma, vec, orientation)
    if orientation == "koszul":
        sign = koszul_sign([vmap[v] for v in pg.order], list(range(cg.n_vertices)), _parity(cg))
    else:
        moved = [_edge_key(iso[a], iso[b]) for a, b in pg.order]
        sign = reorder_sign(moved, cg.edges())
    return c, sign, colors


def contract_edge(P: OperadSpec, pg: ColoredGraph, edge: Tuple[int, int], orientation: str) -> ColoredGraph:
    """Contract one edge of a presented colored graph, following the composite rule.

    The colors r' at v' (anchored with f'(0) = h1) and r'' at v''
    (anchored with f''(1) = h2) are combined into r'' o_1 r', anchored at
    (f''(0), f'(1..k), f''(2..l)).
    """
    g = pg.graph
    h1, h2 = edge
    v1, v2 = g.vert[h1], g.vert[h2]
    f1 = rotate_to(g, v1, h1, 0)
    f2 = rotate_to(g, v2, h2, 1)
    k, l = len(f1) - 1, len(f2) - 1
    s1 = tuple(f1.index(h) for h in pg.anchors[v1])
    s2 = tuple(f2.index(h) for h in pg.anchors[v2])
    r1 = color_action(P, k, s1, pg.colors[v1], orientation)
    r2 = color_action(P, l, s2, pg.colors[v2], orientation)
    merged = P.compose(r2, l, r1, k, 1)
    cg, anchor, hmap = contract_graph(g, h1)

    def new_vertex(v):
        h = next(x for x in g.half_edges_at(v) if x not in (h1, h2))
        return cg.vert[hmap[h]]

    m = new_vertex(v1)
    anchors = [None] * cg.n_vertices
    colors = [None] * cg.n_vertices
    anchors[m], colors[m] = anchor, merged
    for v in range(g.n_vertices):
        if v in (v1, v2):
            continue
        w = new_vertex(v)
        anchors[w] = tuple(hmap[h] for h in pg.anchors[v])
        colors[w] = pg.colors[v]
    F = P.field
    if orientation == "koszul":
        front = [v1, v2] + [v for v in pg.order if v not in (v1, v2)]
        sign = -koszul_sign(pg.order, front, _parity(g))
        # the vertex line of v'' passes the half-edges of v'
        if g.valence(v1) & 1:
            sign = -sign
        order = [m] + [new_vertex(v) for v in front[2:]]
    else:
        key = _edge_key(h1, h2)
        pos = pg.order.index(key)
        sign = -1 if pos % 2 else 1
        order = [_edge_key(hmap[a], hmap[b]) for a, b in pg.order if (a, b) != key]
    if sign < 0:
        colors[m] = [F.neg(x) for x in merged]
    return ColoredGraph(cg, anchors, colors, order)


# -- per-class coloring data --------------------------------------------------

@dataclass
class ColoredClass:
    """Coloring space W_G of one isomorphism class and its coinvariants."""

    iso: GraphIsoClass
    arities: List[int]
    colorings: List[Tuple[int, ...]]
    reps: List[int]
    projection: SparseMatrix
    index: Dict[Tuple[int, ...], int] = dc_field(default_factory=dict)

    @property
    def graph(self) -> HalfEdgeGraph:
        return self.iso.graph

    @property
    def code(self):
        return self.iso.code

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinates(self, vec: Dict[Tuple[int, ...], object]) -> List:
        """Coinvariant coordinates of a vector on W_G given as {coloring: coef}."""
        F = self.projection.field
        dense = [F.zero()] * len(self.colorings)
        for a, x in vec.items():
            j = self.index[a]
            dense[j] = F.add(dense[j], F.convert(x))
        return self.projection.apply(dense)

    def presented(self, P: OperadSpec, alpha: Sequence[int], orientation: str) -> ColoredGraph:
        g = self.graph
        return ColoredGraph(g, [canonical_anchor(g, v) for v in range(g.n_vertices)],
                         [P.basis_vector(k, a) for k, a in zip(self.arities, alpha)],
                         canonical_order(g, orientation))


def expand_colors(F, colors: Sequence[Sequence], scale=1) -> Dict[Tuple[int, ...], object]:
    per = [[(a, x) for a, x in enumerate(vec) if x] for vec in colors]
    out = {}
    for combo in itertools.product(*per):
        c = F.convert(scale)
        for _, x in combo:
            c = F.mul(c, x)
        if c:
            key = tuple(a for a, _ in combo)
            out[key] = F.add(out.get(key, F.zero()), c)
    return out


def automorphism_action(P: OperadSpec, cc: ColoredClass, perm, orientation: str, alpha):
    """Image of the basis coloring alpha under an automorphism, as {coloring: coef}."""
    g = cc.graph
    pg = cc.presented(P, alpha, orientation)
    vmap = [g.vert[perm[g.half_edges_at(v)[0]]] for v in range(g.n_vertices)]
    colors = [None] * g.n_vertices
    for v in range(g.n_vertices):
        w = vmap[v]
        F = canonical_anchor(g, w)
        sigma = tuple(F.index(perm[h]) for h in pg.anchors[v])
        colors[w] = color_action(P, len(sigma) - 1, sigma, pg.colors[v], orientation)
    if orientation == "koszul":
        sign = koszul_sign([vmap[v] for v in pg.order], list(range(g.n_vertices)), _parity(g))
    else:
        sign = reorder_sign([_edge_key(perm[a], perm[b]) for a, b in pg.order], g.edges())
    return expand_colors(P.field, colors, sign)


def colored_class(P: OperadSpec, iso: GraphIsoClass, orientation: str) -> ColoredClass:
    g = iso.graph
    arities = [g.valence(v) - 1 for v in range(g.n_vertices)]
    if max(arities) > P.max_arity:
        raise GraphError(f"vertex arity {max(arities)} exceeds truncation {P.max_arity} of {P.name}")
    colorings = list(itertools.product(*[range(P.dim(k)) for k in arities]))
    index = {a: j for j, a in enumerate(colorings)}
    F = P.field
    relations = []
    for perm in iso.aut_generators:
        for a in colorings:
            img = automorphism_action(P, ColoredClass(iso, arities, colorings, [], None, index),
                                      perm, orientation, a)
            rel = [F.zero()] * len(colorings)
            for b, x in img.items():
                rel[index[b]] = F.add(rel[index[b]], x)
            rel[index[a]] = F.add(rel[index[a]], F.neg(F.one()))
            if any(rel):
                relations.append(rel)
    reps, proj = quotient_basis(len(colorings), relations, F)
    return ColoredClass(iso, arities, colorings, reps, proj, index)


# -- the complex ----------------------------------------------------------------

@dataclass
class GraphComplex(GradedComplex):
    classes: Dict[tuple, ColoredClass] = dc_field(default_factory=dict)
    operad: Optional[OperadSpec] = None
    orientation: str = "koszul"

    def basis_graph(self, i: int, j: int) -> Tuple[ColoredClass, Tuple[int, ...]]:
        code, alpha = self.bases[i][j]
        return self.classes[code], alpha

    def zero_classes(self) -> List[GraphIsoClass]:
        """Isomorphism classes whose coinvariant space vanishes."""
        return [cc.iso for cc in self.classes.values() if cc.dim == 0]

    def basis_index(self, i: int):
        return {lab: j for j, lab in enumerate(self.bases[i])}


def graph_boundary(P: OperadSpec, cc: ColoredClass, alpha, orientation: str, classes: Dict):
    """∂ of a basis element as {(code, rep coloring): coef}."""
    F = P.field
    pg = cc.presented(P, alpha, orientation)
    out: Dict = {}
    for e in cc.graph.contractible_edges():
        res = contract_edge(P, pg, e, orientation)
        c, sign, colors = transport(P, res, orientation)
        target = classes.get(c.code)
        if target is None:
            raise GraphError("contraction left the enumerated set of graphs")
        coords = target.coordinates(expand_colors(F, colors, sign))
        for j, x in enumerate(coords):
            if x:
                key = (c.code, target.colorings[target.reps[j]])
                out[key] = F.add(out.get(key, F.zero()), x)
    return {k: v for k, v in out.items() if v}


def build_graph_complex(P: OperadSpec, b1: int, n_legs: int = 0, orientation: str = "koszul",
                        max_degree: Optional[int] = None, max_contractible: Optional[int] = None,
                        graph_filter=None, check: bool = True) -> GraphComplex:
    """The P-graph complex of connected graphs with loop order b1 and n_legs legs.

    Ribbon graphs for nonsymmetric P, plain graphs for symmetric P.  Degree =
    number of internal edges.  ``max_degree`` truncates from above (the
    truncated complex is a quotient complex; homology in the top kept
    degree is then not that of the full complex).  ``max_contractible``
    keeps graphs with at most that many non-loop edges; contraction never
    creates new contractible edges, so this is a subcomplex.  ``graph_filter``
    must select a union of direct summands (it is not checked).
    """
    check_orientation(orientation)
    flavor = flavor_for(P)
    isos = enumerate_graphs(flavor, n_legs, b1=b1)
    if max_degree is not None:
        isos = [c for c in isos if c.graph.n_edges() <= max_degree]
    if graph_filter is not None:
        isos = [c for c in isos if graph_filter(c.graph)]
    if max_contractible is not None:
        isos = [c for c in isos if len(c.graph.contractible_edges()) <= max_contractible]
    classes = {c.code: colored_class(P, c, orientation) for c in isos}
    degrees = sorted({c.graph.n_edges() for c in isos})
    bases = {d: [] for d in degrees}
    for code, cc in classes.items():
        for r in cc.reps:
            bases[cc.graph.n_edges()].append((code, cc.colorings[r]))
    F = P.field
    index = {d: {lab: j for j, lab in enumerate(b)} for d, b in bases.items()}
    diffs = {}
    for d in degrees:
        if d - 1 not in bases:
            continue
        ent = {}
        for j, (code, alpha) in enumerate(bases[d]):
            for key, x in graph_boundary(P, classes[code], alpha, orientation, classes).items():
                ent[(index[d - 1][key], j)] = x
        diffs[d] = SparseMatrix(len(bases[d - 1]), len(bases[d]), ent, F)
    cx = GraphComplex(bases, diffs, F, name=f"graphs({P.name}, {flavor}, b1={b1}, legs={n_legs}, {orientation})",
                      meta={"operad": P.name, "flavor": flavor, "b1": b1, "legs": n_legs,
                            "orientation": orientation, "max_degree": max_degree,
                            "max_contractible": max_contractible},
                      classes=classes, operad=P, orientation=orientation)
    if check:
        bad = cx.d_squared_failures()
        if bad:
            raise ArithmeticError(f"{cx.name}: d^2 != 0 in degrees {bad}")
    return cx


# -- conveniences on colored graphs ---------------------------------------------------

def colored_graph(P: OperadSpec, g: HalfEdgeGraph, colors: Sequence, anchors=None,
                  orientation: str = "koszul") -> ColoredGraph:
    """A colored graph with the canonical orientation of ``g``; colors are basis indices or vectors."""
    if anchors is None:
        anchors = [canonical_anchor(g, v) for v in range(g.n_vertices)]
    vecs = []
    for f, c in zip(anchors, colors):
        k = len(f) - 1
        vecs.append(P.basis_vector(k, c) if isinstance(c, int) else list(c))
    return ColoredGraph(g, [tuple(f) for f in anchors], vecs, canonical_order(g, orientation))


def canonical_value(P: OperadSpec, cg: ColoredGraph, orientation: str = "koszul"):
    """(code, coinvariant coordinates) of a colored graph: equal iff the colored graphs are equal."""
    c, sign, colors = transport(P, cg, orientation)
    cc = colored_class(P, iso_class_of(c), orientation)
    return c.code, cc.coordinates(expand_colors(P.field, colors, sign))


def iso_class_of(c) -> GraphIsoClass:
    from graphcx.graphs import automorphisms
    gens, order = automorphisms(c.graph)
    return GraphIsoClass(c.graph, c.code, gens, order)


def colored_equal(P: OperadSpec, a: ColoredGraph, b: ColoredGraph, orientation: str = "koszul") -> bool:
    return canonical_value(P, a, orientation) == canonical_value(P, b, orientation)


def coloring_basis(P: OperadSpec, g, orientation: str = "koszul") -> List[Tuple[int, ...]]:
    """Basis colorings of the coinvariant space of a graph (HalfEdgeGraph or GraphIsoClass)."""
    iso = g if isinstance(g, GraphIsoClass) else iso_class_of(canonical_form(g))
    cc = colored_class(P, iso, orientation)
    return [cc.colorings[r] for r in cc.reps]


def odd_automorphism(iso: GraphIsoClass) -> bool:
    """True if some automorphism permutes the internal edges oddly."""
    g = iso.graph
    edges = g.edges()
    for perm in iso.aut_generators:
        if reorder_sign([_edge_key(perm[a], perm[b]) for a, b in edges], edges) < 0:
            return True
    return False
