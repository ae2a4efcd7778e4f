"""Graphs and ribbon graphs in the half-edge model.

A graph is a set of half-edges ``0..H-1`` with a vertex map ``vert``, an
involution ``inv`` whose fixed points are the legs (labelled 1..n), and for
ribbon graphs a successor permutation ``rot`` whose orbits are the vertices
(the cyclic order of half-edges around each vertex).  Loops and multiple
edges are allowed.

Canonical forms:

* ribbon graphs are traversed from every start dart (breadth first along
  ``rot`` then ``inv``); the smallest resulting code wins and every start
  achieving it is an automorphism.
* plain graphs are multigraphs: vertices are ordered by a refined
  invariant, the lexicographically smallest adjacency code over orderings
  compatible with the refinement wins, and automorphisms are generated by
  the optimal vertex orderings, swaps of parallel edges, and flips and
  swaps of loops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from graphcx.operad.core import perm_compose, perm_inverse


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class HalfEdgeGraph:
    vert: Tuple[int, ...]
    inv: Tuple[int, ...]
    leg_labels: Tuple[int, ...]
    rot: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        H = len(self.vert)
        if len(self.inv) != H or len(self.leg_labels) != H or (self.rot is not None and len(self.rot) != H):
            raise GraphError("half-edge arrays have different lengths")
        for h in range(H):
            if self.inv[self.inv[h]] != h:
                raise GraphError("inv is not an involution")
            if (self.inv[h] == h) != (self.leg_labels[h] > 0):
                raise GraphError("legs must be exactly the fixed points of inv and carry labels")
        labels = sorted(x for x in self.leg_labels if x)
        if labels != list(range(1, len(labels) + 1)):
            raise GraphError("legs must be labelled 1..n bijectively")
        if self.rot is not None:
            if sorted(self.rot) != list(range(H)):
                raise GraphError("rot is not a permutation")
            for h in range(H):
                if self.vert[self.rot[h]] != self.vert[h]:
                    raise GraphError("rot must preserve vertices")
            seen = set()
            for v in range(self.n_vertices):
                hs = self.half_edges_at(v)
                orbit = _orbit(self.rot, hs[0])
                if sorted(orbit) != sorted(hs):
                    raise GraphError("rot orbits must be the vertex half-edge sets")
                seen.update(orbit)

    @property
    def ribbon(self) -> bool:
        return self.rot is not None

    @property
    def n_half(self) -> int:
        return len(self.vert)

    @property
    def n_vertices(self) -> int:
        return (max(self.vert) + 1) if self.vert else 0

    @property
    def n_legs(self) -> int:
        return sum(1 for x in self.leg_labels if x)

    def half_edges_at(self, v: int) -> List[int]:
        return [h for h, w in enumerate(self.vert) if w == v]

    def valence(self, v: int) -> int:
        return sum(1 for w in self.vert if w == v)

    def edges(self) -> List[Tuple[int, int]]:
        """Internal edges as pairs (h, inv h) with h < inv h, sorted."""
        return [(h, self.inv[h]) for h in range(self.n_half) if h < self.inv[h]]

    def loops(self) -> List[Tuple[int, int]]:
        return [e for e in self.edges() if self.vert[e[0]] == self.vert[e[1]]]

    def contractible_edges(self) -> List[Tuple[int, int]]:
        return [e for e in self.edges() if self.vert[e[0]] != self.vert[e[1]]]

    def n_edges(self) -> int:
        return len(self.edges())

    def b1(self) -> int:
        return self.n_edges() - self.n_vertices + 1

    def leg_half_edge(self, label: int) -> int:
        return self.leg_labels.index(label)

    def is_connected(self) -> bool:
        if not self.vert:
            return True
        adj = {v: set() for v in range(self.n_vertices)}
        for a, b in self.edges():
            adj[self.vert[a]].add(self.vert[b])
            adj[self.vert[b]].add(self.vert[a])
        seen, stack = {0}, [0]
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == self.n_vertices

    def cyclic_order(self, v: int) -> List[int]:
        """Half-edges at v in cyclic order starting from the smallest."""
        hs = self.half_edges_at(v)
        if self.rot is None:
            return hs
        return _orbit(self.rot, min(hs))

    def boundary_components(self) -> int:
        if self.rot is None:
            raise GraphError("boundary components need a ribbon structure")
        phi = [self.rot[self.inv[h]] for h in range(self.n_half)]
        seen, count = set(), 0
        for h in range(self.n_half):
            if h not in seen:
                count += 1
                seen.update(_orbit(phi, h))
        return count

    def genus(self) -> int:
        """Genus of the surface: 2 - 2g = V - E - (legs) + (boundary cycles) with legs counted as edges."""
        chi = self.n_vertices - self.n_edges() - self.n_legs
        F = self.boundary_components()
        # legs are treated as half-edges of edges ending on the boundary
        twice = 2 - chi - F - self.n_legs
        if twice % 2:
            raise GraphError("inconsistent ribbon structure")
        return twice // 2

    def min_valence(self) -> int:
        return min((self.valence(v) for v in range(self.n_vertices)), default=0)

    # -- interchange format

    def to_document(self) -> dict:
        doc = {
            "half_edges": self.n_half,
            "involution": list(self.inv),
            "vertices": list(self.vert),
            "legs": {str(h): lab for h, lab in enumerate(self.leg_labels) if lab},
        }
        if self.rot is not None:
            doc["rotation"] = list(self.rot)
        return doc

    @classmethod
    def from_document(cls, doc: dict) -> "HalfEdgeGraph":
        H = int(doc["half_edges"])
        legs = [0] * H
        for h, lab in (doc.get("legs") or {}).items():
            legs[int(h)] = int(lab)
        rot = doc.get("rotation")
        return cls(tuple(int(x) for x in doc["vertices"]), tuple(int(x) for x in doc["involution"]),
                   tuple(legs), tuple(int(x) for x in rot) if rot is not None else None)


def _orbit(perm, h):
    out = [h]
    x = perm[h]
    while x != h:
        out.append(x)
        x = perm[x]
    return out


def relabel(g: HalfEdgeGraph, perm: Sequence[int], vperm: Optional[Sequence[int]] = None) -> HalfEdgeGraph:
    """Image of g under the half-edge bijection h -> perm[h] (and vertex map vperm)."""
    H = g.n_half
    pinv = perm_inverse(tuple(perm))
    vperm = vperm or list(range(g.n_vertices))
    vert = tuple(vperm[g.vert[pinv[h]]] for h in range(H))
    inv = tuple(perm[g.inv[pinv[h]]] for h in range(H))
    legs = tuple(g.leg_labels[pinv[h]] for h in range(H))
    rot = tuple(perm[g.rot[pinv[h]]] for h in range(H)) if g.rot is not None else None
    return HalfEdgeGraph(vert, inv, legs, rot)


def normalize_vertices(vert: Sequence[int]) -> Tuple[int, ...]:
    """Renumber vertex ids by first appearance."""
    ids = {}
    out = []
    for v in vert:
        if v not in ids:
            ids[v] = len(ids)
        out.append(ids[v])
    return tuple(out)


# -- canonical forms ----------------------------------------------------------

@dataclass
class Canonical:
    """Canonical form of a graph.

    ``graph`` is the canonical representative, ``iso`` maps half-edges of
    the input graph to half-edges of ``graph`` (an isomorphism), ``vmap``
    maps vertices likewise.
    """

    code: tuple
    graph: HalfEdgeGraph
    iso: Tuple[int, ...]
    vmap: Tuple[int, ...]


def _ribbon_labels(g: HalfEdgeGraph, start: int):
    labels = {start: 0}
    order = [start]
    j = 0
    while j < len(order):
        d = order[j]
        j += 1
        for nb in (g.rot[d], g.inv[d]):
            if nb not in labels:
                labels[nb] = len(order)
                order.append(nb)
    if len(order) != g.n_half:
        raise GraphError("ribbon graph is not connected")
    code = tuple((labels[g.rot[d]], labels[g.inv[d]], g.leg_labels[d]) for d in order)
    return code, labels


def _canonical_ribbon(g: HalfEdgeGraph) -> Canonical:
    best = None
    for s in range(g.n_half):
        code, labels = _ribbon_labels(g, s)
        if best is None or code < best[0]:
            best = (code, labels)
    code, labels = best
    perm = tuple(labels[h] for h in range(g.n_half))
    rg = relabel(g, perm)
    # vertex ids ordered by smallest dart
    cg = HalfEdgeGraph(normalize_vertices(rg.vert), rg.inv, rg.leg_labels, rg.rot)
    vmap = tuple(cg.vert[perm[g.half_edges_at(v)[0]]] for v in range(g.n_vertices))
    return Canonical(("ribbon",) + code, cg, perm, vmap)


def _plain_data(g: HalfEdgeGraph):
    V = g.n_vertices
    mult = {}
    loops = [0] * V
    legs = [[] for _ in range(V)]
    for h, lab in enumerate(g.leg_labels):
        if lab:
            legs[g.vert[h]].append(lab)
    for a, b in g.edges():
        u, w = g.vert[a], g.vert[b]
        if u == w:
            loops[u] += 1
        else:
            key = (min(u, w), max(u, w))
            mult[key] = mult.get(key, 0) + 1
    return mult, loops, [tuple(sorted(x)) for x in legs]


def _refined_cells(g: HalfEdgeGraph, mult, loops, legs):
    V = g.n_vertices
    nbrs = [[] for _ in range(V)]
    for (u, w), m in mult.items():
        nbrs[u].append((w, m))
        nbrs[w].append((u, m))
    color = [(g.valence(v), loops[v], legs[v]) for v in range(V)]
    while True:
        sig = [(color[v], tuple(sorted((color[w], m) for w, m in nbrs[v]))) for v in range(V)]
        ranks = {s: j for j, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        old_classes = len(set(color))
        color = new
        if len(set(new)) == old_classes:
            break
    cells = {}
    for v in range(V):
        cells.setdefault(color[v], []).append(v)
    return [cells[c] for c in sorted(cells)]


def _plain_code(order, mult, loops, legs, valence):
    V = len(order)
    per = tuple((valence[v], loops[v], legs[v]) for v in order)
    adj = tuple(mult.get((min(order[i], order[j]), max(order[i], order[j])), 0)
                for i in range(V) for j in range(i + 1, V))
    return per + adj


def _plain_orderings(cells):
    for combo in itertools.product(*[itertools.permutations(c) for c in cells]):
        yield [v for block in combo for v in block]


def _plain_optimal(g: HalfEdgeGraph):
    mult, loops, legs = _plain_data(g)
    valence = [g.valence(v) for v in range(g.n_vertices)]
    cells = _refined_cells(g, mult, loops, legs)
    best, winners = None, []
    for order in _plain_orderings(cells):
        code = _plain_code(order, mult, loops, legs, valence)
        if best is None or code < best:
            best, winners = code, [order]
        elif code == best:
            winners.append(order)
    return best, winners, (mult, loops, legs)


def _plain_slots(V, mult, loops, legs):
    """Deterministic half-edge numbering of the canonical plain graph."""
    slots = []
    for i in range(V):
        for lab in legs[i]:
            slots.append(("leg", lab))
        for t in range(loops[i]):
            slots.append(("loop", i, t, 0))
            slots.append(("loop", i, t, 1))
        for j in range(V):
            if j == i:
                continue
            for t in range(mult.get((min(i, j), max(i, j)), 0)):
                slots.append(("edge", min(i, j), max(i, j), t, 0 if i < j else 1))
    return slots


def _plain_build(V, mult, loops, legs):
    slots = _plain_slots(V, mult, loops, legs)
    index = {s: h for h, s in enumerate(slots)}
    vert, inv, lab = [], [], []
    for s in slots:
        if s[0] == "leg":
            inv.append(index[s])
            lab.append(s[1])
            vert.append(next(i for i in range(V) if s[1] in legs[i]))
        elif s[0] == "loop":
            inv.append(index[s[:3] + (1 - s[3],)])
            lab.append(0)
            vert.append(s[1])
        else:
            inv.append(index[s[:4] + (1 - s[4],)])
            lab.append(0)
            vert.append(s[1] if s[4] == 0 else s[2])
    return HalfEdgeGraph(tuple(vert), tuple(inv), tuple(lab)), index


def _plain_iso(g: HalfEdgeGraph, order, index):
    """Half-edge map from g to the canonical graph given the optimal vertex order."""
    newid = {v: i for i, v in enumerate(order)}
    perm = [None] * g.n_half
    loop_count, edge_count = {}, {}
    for h in range(g.n_half):
        if g.leg_labels[h]:
            perm[h] = index[("leg", g.leg_labels[h])]
    for a, b in g.edges():
        u, w = newid[g.vert[a]], newid[g.vert[b]]
        if u == w:
            t = loop_count.get(u, 0)
            loop_count[u] = t + 1
            perm[a] = index[("loop", u, t, 0)]
            perm[b] = index[("loop", u, t, 1)]
        else:
            key = (min(u, w), max(u, w))
            t = edge_count.get(key, 0)
            edge_count[key] = t + 1
            ha, hb = (a, b) if u < w else (b, a)
            perm[ha] = index[("edge",) + key + (t, 0)]
            perm[hb] = index[("edge",) + key + (t, 1)]
    return tuple(perm), tuple(newid[v] for v in range(g.n_vertices))


def _canonical_plain(g: HalfEdgeGraph) -> Canonical:
    best, winners, (mult, loops, legs) = _plain_optimal(g)
    order = winners[0]
    newid = {v: i for i, v in enumerate(order)}
    V = g.n_vertices
    cmult = {}
    for (u, w), m in mult.items():
        a, b = newid[u], newid[w]
        cmult[(min(a, b), max(a, b))] = m
    cloops = [loops[order[i]] for i in range(V)]
    clegs = [legs[order[i]] for i in range(V)]
    cg, index = _plain_build(V, cmult, cloops, clegs)
    iso, vmap = _plain_iso(g, order, index)
    return Canonical(("plain",) + best, cg, iso, vmap)


def canonical_form(g: HalfEdgeGraph) -> Canonical:
    if not g.is_connected():
        raise GraphError("canonical forms are implemented for connected graphs")
    return _canonical_ribbon(g) if g.ribbon else _canonical_plain(g)


def is_isomorphic(g1: HalfEdgeGraph, g2: HalfEdgeGraph) -> bool:
    return canonical_form(g1).code == canonical_form(g2).code


def automorphisms(g: HalfEdgeGraph):
    """``(generators, order)`` of the automorphism group, as half-edge permutations.

    Automorphisms fix legs pointwise and, for ribbon graphs, commute with rot.
    """
    if g.ribbon:
        best = min(_ribbon_labels(g, s)[0] for s in range(g.n_half))
        # automorphisms of g: maps sending the labelling from one optimal start to another
        starts = [s for s in range(g.n_half) if _ribbon_labels(g, s)[0] == best]
        L0 = _ribbon_labels(g, starts[0])[1]
        inv0 = {lab: d for d, lab in L0.items()}
        gens = []
        for s in starts:
            Ls = _ribbon_labels(g, s)[1]
            gens.append(tuple(inv0[Ls[h]] for h in range(g.n_half)))
        return gens, len(starts)
    best, winners, (mult, loops, legs) = _plain_optimal(g)
    V = g.n_vertices
    # lift vertex automorphisms: compose iso(order_w) with inverse of iso(order_0)
    newid0 = {v: i for i, v in enumerate(winners[0])}
    cmult = {}
    for (u, w), m in mult.items():
        a, b = newid0[u], newid0[w]
        cmult[(min(a, b), max(a, b))] = m
    cl = [loops[winners[0][i]] for i in range(V)]
    cleg = [legs[winners[0][i]] for i in range(V)]
    _, index = _plain_build(V, cmult, cl, cleg)
    iso0, _ = _plain_iso(g, winners[0], index)
    iso0_inv = perm_inverse(iso0)
    gens = []
    for order in winners:
        iso, _ = _plain_iso(g, order, index)
        gens.append(perm_compose(iso0_inv, iso))
    # parallel edge swaps, loop flips and loop swaps
    by_pair, by_vertex = {}, {}
    for a, b in g.edges():
        u, w = g.vert[a], g.vert[b]
        if u == w:
            by_vertex.setdefault(u, []).append((a, b))
        else:
            ha, hb = (a, b) if u < w else (b, a)
            by_pair.setdefault((min(u, w), max(u, w)), []).append((ha, hb))
    ident = list(range(g.n_half))

    def swap(pairs):
        p = list(ident)
        for x, y in pairs:
            p[x], p[y] = y, x
        return tuple(p)

    for es in by_pair.values():
        for (a1, b1), (a2, b2) in zip(es, es[1:]):
            gens.append(swap([(a1, a2), (b1, b2)]))
    for ls in by_vertex.values():
        for a, b in ls:
            gens.append(swap([(a, b)]))
        for (a1, b1), (a2, b2) in zip(ls, ls[1:]):
            gens.append(swap([(a1, a2), (b1, b2)]))
    order = len(winners)
    for es in by_pair.values():
        order *= factorial(len(es))
    for ls in by_vertex.values():
        order *= factorial(len(ls)) * 2 ** len(ls)
    gens = sorted(set(gens))
    return gens, order


def all_automorphisms(g: HalfEdgeGraph) -> List[Tuple[int, ...]]:
    """The whole automorphism group by closure of the generators (small graphs only)."""
    gens, order = automorphisms(g)
    ident = tuple(range(g.n_half))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = perm_compose(s, x)
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    if len(group) != order:
        raise GraphError(f"automorphism closure has {len(group)} elements, expected {order}")
    return sorted(group)


def vertex_image(g: HalfEdgeGraph, perm, v: int) -> int:
    return g.vert[perm[g.half_edges_at(v)[0]]]


# -- isomorphism classes and enumeration --------------------------------------

@dataclass
class GraphIsoClass:
    graph: HalfEdgeGraph
    code: tuple
    aut_generators: List[Tuple[int, ...]]
    aut_order: int
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def degree(self) -> int:
        return self.graph.n_edges()

    def describe(self) -> dict:
        g = self.graph
        out = {"vertices": g.n_vertices, "edges": g.n_edges(), "loops": len(g.loops()),
               "legs": g.n_legs, "b1": g.b1(), "aut_order": self.aut_order,
               "valences": sorted(g.valence(v) for v in range(g.n_vertices))}
        if g.ribbon:
            out["genus"] = g.genus()
            out["boundaries"] = g.boundary_components()
        return out


def iso_class(g: HalfEdgeGraph) -> GraphIsoClass:
    c = canonical_form(g)
    gens, order = automorphisms(c.graph)
    return GraphIsoClass(c.graph, c.code, gens, order)


def _roses(b1: int, n_legs: int, ribbon: bool) -> List[HalfEdgeGraph]:
    m = 2 * b1 + n_legs
    if m < 3:
        return []
    if not ribbon:
        vert = tuple([0] * m)
        inv = tuple(list(range(n_legs)) + [n_legs + (j ^ 1) for j in range(2 * b1)])
        legs = tuple(list(range(1, n_legs + 1)) + [0] * (2 * b1))
        return [HalfEdgeGraph(vert, inv, legs)]
    out = {}
    rot = tuple((j + 1) % m for j in range(m))
    for leg_pos in itertools.permutations(range(m), n_legs):
        rest = [j for j in range(m) if j not in leg_pos]
        for matching in _matchings(rest):
            inv = list(range(m))
            for a, b in matching:
                inv[a], inv[b] = b, a
            legs = [0] * m
            for lab, pos in enumerate(leg_pos, 1):
                legs[pos] = lab
            g = HalfEdgeGraph(tuple([0] * m), tuple(inv), tuple(legs), rot)
            c = canonical_form(g)
            out.setdefault(c.code, c.graph)
    return [out[k] for k in sorted(out)]


def _matchings(items):
    if not items:
        yield []
        return
    a = items[0]
    for j in range(1, len(items)):
        b = items[j]
        rest = items[1:j] + items[j + 1:]
        for m in _matchings(rest):
            yield [(a, b)] + m


def splits(g: HalfEdgeGraph, v: int):
    """All graphs obtained by splitting vertex v into two vertices joined by a new edge.

    Both new vertices are at least trivalent.  For ribbon graphs the part
    moved away is a cyclic interval, so contracting the new edge gives g
    back with its cyclic order.
    """
    hs = g.cyclic_order(v)
    m = len(hs)
    H = g.n_half
    new_v = g.n_vertices
    x, y = H, H + 1  # new half-edges: x stays at v, y at new_v
    if g.ribbon:
        parts = []
        for start in range(m):
            for size in range(2, m - 1):
                parts.append([hs[(start + j) % m] for j in range(size)])
    else:
        parts = [list(c) for size in range(2, m - 1) for c in itertools.combinations(hs, size)]
    for B in parts:
        Bset = set(B)
        vert = [new_v if h in Bset else g.vert[h] for h in range(H)] + [v, new_v]
        inv = list(g.inv) + [y, x]
        legs = list(g.leg_labels) + [0, 0]
        rot = None
        if g.ribbon:
            A = [h for h in hs if h not in Bset]
            # keep A in cyclic order starting right after the interval B
            start = hs.index(B[-1])
            A = [hs[(start + 1 + j) % m] for j in range(m - len(B))]
            rot = list(g.rot) + [0, 0]
            cyc_v = A + [x]
            cyc_w = [y] + B
            for cyc in (cyc_v, cyc_w):
                for j, h in enumerate(cyc):
                    rot[h] = cyc[(j + 1) % len(cyc)]
            rot = tuple(rot)
        yield HalfEdgeGraph(tuple(vert), tuple(inv), tuple(legs), rot)


@lru_cache(maxsize=None)
def _enumerate(b1: int, n_legs: int, ribbon: bool, max_vertices: int) -> Tuple[GraphIsoClass, ...]:
    level = {}
    for r in _roses(b1, n_legs, ribbon):
        c = canonical_form(r)
        level[c.code] = c.graph
    found = dict(level)
    limit = 2 * b1 - 2 + n_legs
    for _ in range(1, min(limit, max_vertices)):
        nxt = {}
        for g in level.values():
            for v in range(g.n_vertices):
                for s in splits(g, v):
                    c = canonical_form(s)
                    if c.code not in found and c.code not in nxt:
                        nxt[c.code] = c.graph
        found.update(nxt)
        level = nxt
        if not level:
            break
    out = []
    for code in found:
        g = found[code]
        gens, order = automorphisms(g)
        out.append(GraphIsoClass(g, code, gens, order))
    out.sort(key=lambda c: (c.graph.n_edges(), c.graph.n_vertices, c.code))
    return tuple(out)


def enumerate_graphs(flavor: str, n_legs: int = 0, b1: Optional[int] = None,
                     vertices: Optional[int] = None, edges: Optional[int] = None,
                     max_edges: Optional[int] = None) -> List[GraphIsoClass]:
    """Connected graphs with all vertices at least trivalent.

    ``flavor`` is "ribbon" or "plain".  Give the loop order ``b1`` directly
    or through ``vertices`` and ``edges`` (b1 = edges - vertices + 1).
    """
    if flavor not in ("ribbon", "plain"):
        raise GraphError(f"unknown flavor {flavor!r}")
    if b1 is None:
        if vertices is None or edges is None:
            raise GraphError("give b1, or both vertices and edges")
        b1 = edges - vertices + 1
    if b1 < 0 or n_legs < 0:
        raise GraphError("b1 and n_legs must be non-negative")
    if b1 > 6 or 2 * b1 + n_legs > 14:
        raise GraphError(f"b1={b1}, legs={n_legs} exceeds the soft enumeration limit")
    maxv = vertices if vertices is not None else 10 ** 6
    classes = _enumerate(b1, n_legs, flavor == "ribbon", maxv)
    out = []
    for c in classes:
        if vertices is not None and c.graph.n_vertices != vertices:
            continue
        if edges is not None and c.graph.n_edges() != edges:
            continue
        if max_edges is not None and c.graph.n_edges() > max_edges:
            continue
        out.append(c)
    return out


def internal_edges(g: HalfEdgeGraph) -> List[Tuple[int, int]]:
    """Contractible edges (distinct endpoints), canonical order."""
    return g.contractible_edges()


# -- contraction ---------------------------------------------------------------

def contract_graph(g: HalfEdgeGraph, h1: int):
    """Collapse the edge containing half-edge h1.

    Returns ``(graph, anchor, hmap)``: the contracted graph (the other
    half-edges keep their relative order, renumbered consecutively, and
    ``hmap`` sends old names to new ones), and the merged vertex's anchor
    (new names) following the composite rule: with h1 at v' and h2 = inv h1
    at v'', f'(0) = h1, f''(1) = h2, and the merged anchor is
    (f''(0), f'(1..k), f''(2..l)).
    """
    h2 = g.inv[h1]
    v1, v2 = g.vert[h1], g.vert[h2]
    if h1 == h2:
        raise GraphError("cannot contract a leg")
    if v1 == v2:
        raise GraphError("loops are never contracted")
    f1 = rotate_to(g, v1, h1, 0)
    f2 = rotate_to(g, v2, h2, 1)
    anchor = (f2[0],) + tuple(f1[1:]) + tuple(f2[2:])
    keep = [h for h in range(g.n_half) if h not in (h1, h2)]
    new = {h: j for j, h in enumerate(keep)}
    vert_raw = [v1 if g.vert[h] == v2 else g.vert[h] for h in keep]
    vert = normalize_vertices(vert_raw)
    inv = tuple(new[g.inv[h]] for h in keep)
    legs = tuple(g.leg_labels[h] for h in keep)
    rot = None
    if g.ribbon:
        succ = {}
        for j, h in enumerate(anchor):
            succ[h] = anchor[(j + 1) % len(anchor)]
        rot = tuple(new[succ[h]] if h in succ else new[g.rot[h]] for h in keep)
    cg = HalfEdgeGraph(vert, inv, legs, rot)
    return cg, tuple(new[h] for h in anchor), new


def rotate_to(g: HalfEdgeGraph, v: int, h: int, slot: int) -> Tuple[int, ...]:
    """An anchor of v (cyclic order for ribbon graphs) with h in position ``slot``."""
    hs = g.cyclic_order(v)
    j = hs.index(h)
    m = len(hs)
    return tuple(hs[(j - slot + t) % m] for t in range(m))


def canonical_anchor(g: HalfEdgeGraph, v: int) -> Tuple[int, ...]:
    """Canonical anchor: the cyclic order starting at the smallest half-edge (sorted for plain graphs)."""
    return tuple(g.cyclic_order(v))
