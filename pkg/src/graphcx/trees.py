"""Colored rooted trees and the bar-type tree complex.

A tree with n leaves is a nested tuple: a leaf is an int in 1..n, an
internal vertex is the tuple of its children (at least two).  Planar trees
(nonsymmetric operads) have leaves 1..n from left to right; abstract trees
(symmetric operads) list children by increasing smallest leaf, which makes
the nested tuple a canonical form.

An internal vertex is identified by the sorted tuple of leaves above it
(its *key*); distinct vertices of one tree have distinct keys.  Vertices
are ordered by depth-first preorder, children in slot order.  A colored
tree is a tree plus one basis index of P(k) per vertex, listed in that
order.  Degree = number of inner edges = number of vertices - 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from graphcx.chains import (GradedComplex, assemble_complex, check_orientation,
                            color_action, koszul_sign, reorder_sign)
from graphcx.operad.core import OperadSpec

Tree = object  # int | tuple


# -- combinatorics ------------------------------------------------------------

def leaves(t) -> Tuple[int, ...]:
    if isinstance(t, int):
        return (t,)
    return tuple(sorted(x for c in t for x in leaves(c)))


def vertices(t) -> List[tuple]:
    """Internal vertices (subtrees) in preorder."""
    if isinstance(t, int):
        return []
    out = [t]
    for c in t:
        out.extend(vertices(c))
    return out


def vertex_key(v) -> Tuple[int, ...]:
    return leaves(v)


def inner_edge_count(t) -> int:
    return len(vertices(t)) - 1


def _compositions(n, parts_min=2):
    """Ordered compositions of n into at least ``parts_min`` positive parts."""
    def go(rest):
        if rest == 0:
            yield ()
            return
        for first in range(1, rest + 1):
            for tail in go(rest - first):
                yield (first,) + tail
    for comp in go(n):
        if len(comp) >= parts_min:
            yield comp


@lru_cache(maxsize=None)
def _planar(a: int, b: int) -> Tuple:
    """All planar trees on the leaf interval a..b (a tree needs b > a)."""
    out = []
    for comp in _compositions(b - a + 1):
        options = []
        start = a
        for size in comp:
            end = start + size - 1
            options.append((start,) if size == 1 else _planar(start, end))
            start = end + 1
        out.extend(itertools.product(*options))
    return tuple(out)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for j in range(len(part)):
            yield part[:j] + [(first,) + part[j]] + part[j + 1:]
        yield [(first,)] + part


@lru_cache(maxsize=None)
def _abstract(labels: Tuple[int, ...]) -> Tuple:
    out = []
    for part in _set_partitions(list(labels)):
        if len(part) < 2:
            continue
        blocks = sorted(part, key=min)
        options = [(blk[0],) if len(blk) == 1 else _abstract(tuple(sorted(blk))) for blk in blocks]
        out.extend(itertools.product(*options))
    return tuple(out)


def encode(t, colors: Sequence[int] = None, labels=None) -> str:
    """Nested parenthesis string, e.g. ``(mu2 (mu2 1 2) 3)``.

    Without colors every vertex is written ``v``; with colors and a
    ``labels`` function (arity, index) -> str the basis label is used.
    """
    it = iter(colors) if colors is not None else None

    def go(x):
        if isinstance(x, int):
            return str(x)
        if it is None:
            head = "v"
        else:
            c = next(it)
            head = labels(len(x), c) if labels else f"{len(x)}:{c}"
        return "(" + " ".join([head] + [go(ch) for ch in x]) + ")"
    return go(t)


def _sort_key(t):
    return (inner_edge_count(t), encode(t))


@lru_cache(maxsize=None)
def all_trees(n: int, flavor: str) -> Tuple:
    if n < 2:
        raise ValueError("trees need at least two leaves")
    if flavor == "nonsymmetric":
        trees = _planar(1, n)
    elif flavor == "symmetric":
        trees = _abstract(tuple(range(1, n + 1)))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return tuple(sorted(trees, key=_sort_key))


def enumerate_trees(n: int, i: int, flavor: str) -> List:
    """Trees with n leaves and i inner edges, deterministic order."""
    if n < 2 or not 0 <= i <= n - 2:
        raise ValueError(f"inner edge count {i} out of range 0..{n - 2} for n={n}")
    return [t for t in all_trees(n, flavor) if inner_edge_count(t) == i]


def _corolla_of(n: int):
    return tuple(range(1, n + 1))


# -- colored trees --------------------------------------------------------------

@dataclass(frozen=True)
class ColoredTree:
    tree: object
    colors: Tuple[int, ...]

    def encode(self, P: OperadSpec = None) -> str:
        lab = (lambda k, c: P.labels[k][c]) if P is not None else None
        return encode(self.tree, self.colors, lab)


def colorings(P: OperadSpec, t) -> List[Tuple[int, ...]]:
    arities = [len(v) for v in vertices(t)]
    return list(itertools.product(*[range(P.dim(k)) for k in arities]))


def inner_edges(t) -> List[Tuple[int, ...]]:
    """Inner edges, named by the key of their lower (child) vertex, in preorder."""
    return [vertex_key(v) for v in vertices(t)[1:]]


def contract_tree_edge(P: OperadSpec, t, color_vecs: Sequence[Sequence], edge,
                       orientation: str = "koszul"):
    """Collapse the inner edge ``edge`` (key of the child vertex).

    ``color_vecs`` are the vertex colors in preorder, as vectors.  Returns
    ``(new_tree, new_color_vecs, sign)``: the merged vertex is colored by
    ``c' o_s c''`` (s = slot of the child in its parent), re-sorted for
    abstract trees, and ``sign`` compares the induced orientation with the
    canonical orientation of the new tree.
    """
    check_orientation(orientation)
    vs = vertices(t)
    keys = [vertex_key(v) for v in vs]
    edge = tuple(edge)
    if edge not in keys[1:]:
        raise ValueError(f"{edge} is not an inner edge of {encode(t)}")
    wi = keys.index(edge)
    w = vs[wi]
    vi = next(j for j, v in enumerate(vs) if any(not isinstance(c, int) and vertex_key(c) == edge for c in v))
    v = vs[vi]
    k, l = len(v), len(w)
    s = next(j for j, c in enumerate(v, 1) if not isinstance(c, int) and vertex_key(c) == edge)

    merged_children = v[:s - 1] + w + v[s:]
    color = P.compose(color_vecs[vi], k, color_vecs[wi], l, s)
    m = k + l - 1
    if P.symmetric:
        order = sorted(range(m), key=lambda j: leaves(merged_children[j])[0])
        newpos = [0] * m
        for new, old in enumerate(order):
            newpos[old] = new
        perm = (0,) + tuple(p + 1 for p in newpos)
        color = color_action(P, m, perm, color, orientation)
        merged_children = tuple(merged_children[j] for j in order)

    new_tree = _replace(t, keys[vi], merged_children)
    new_vs = vertices(new_tree)
    new_keys = [vertex_key(x) for x in new_vs]
    colors_by_key = {kk: color_vecs[j] for j, kk in enumerate(keys) if j not in (vi, wi)}
    colors_by_key[keys[vi]] = color
    new_colors = [colors_by_key[kk] for kk in new_keys]

    if orientation == "edges":
        old_edges = keys[1:]
        sign = -1 if old_edges.index(edge) % 2 else 1
        induced = [e for e in old_edges if e != edge]
        sign *= reorder_sign(induced, new_keys[1:])
    else:
        # a vertex of arity k is a block of parity k: one odd vertex line
        # followed by its k+1 odd half-edges
        parity = {kk: len(x) & 1 for kk, x in zip(keys, vs)}
        front = [keys[vi], edge] + [kk for kk in keys if kk not in (keys[vi], edge)]
        sign = koszul_sign(keys, front, parity)
        # the child's vertex line passes the parent's k+1 half-edges
        sign *= -1 if ((k + 1) + (k - s) * (l + 1)) % 2 else 1
        new_parity = {kk: len(x) & 1 for kk, x in zip(new_keys, new_vs)}
        after = [keys[vi]] + front[2:]
        sign *= koszul_sign(after, new_keys, new_parity)
    return new_tree, new_colors, sign


def _replace(t, key, children):
    if isinstance(t, int):
        return t
    if vertex_key(t) == key:
        return tuple(children)
    return tuple(_replace(c, key, children) for c in t)


def _expand(P, t, color_vecs, coef):
    """Expand vertex color vectors into basis colorings: {colors: coef}."""
    F = P.field
    out = {}
    per_vertex = [[(a, x) for a, x in enumerate(vec) if x] for vec in color_vecs]
    for combo in itertools.product(*per_vertex):
        c = coef
        for _, x in combo:
            c = F.mul(c, x)
        if c:
            key = tuple(a for a, _ in combo)
            out[key] = F.add(out.get(key, F.zero()), c)
    return {k: v for k, v in out.items() if v}


def tree_boundary(P: OperadSpec, ct: ColoredTree, orientation: str = "koszul",
                  by_vertex: bool = False):
    """∂ of a colored basis tree as {ColoredTree: coef}.

    With ``by_vertex`` the result is keyed by (ColoredTree, merged vertex key)
    so that the contributions landing on each vertex stay separate.
    """
    F = P.field
    vs = vertices(ct.tree)
    vecs = [P.basis_vector(len(v), c) for v, c in zip(vs, ct.colors)]
    out: Dict = {}
    for e in inner_edges(ct.tree):
        new_tree, new_vecs, sign = contract_tree_edge(P, ct.tree, vecs, e, orientation)
        parent_key = next(vertex_key(v) for v in vs
                          if any(not isinstance(c, int) and vertex_key(c) == e for c in v))
        for cols, c in _expand(P, new_tree, new_vecs, F.convert(sign)).items():
            key = ColoredTree(new_tree, cols)
            if by_vertex:
                key = (key, parent_key)
            out[key] = F.add(out.get(key, F.zero()), c)
    return {k: v for k, v in out.items() if v}


# -- the complex ----------------------------------------------------------------

def tree_basis(P: OperadSpec, n: int, i: int) -> List[ColoredTree]:
    return [ColoredTree(t, c) for t in enumerate_trees(n, i, P.flavor) for c in colorings(P, t)]


def build_tree_complex(P: OperadSpec, n: int, orientation: str = "koszul",
                       check: bool = True) -> GradedComplex:
    """The complex of P-colored trees with n leaves graded by inner edges."""
    check_orientation(orientation)
    if n > P.max_arity:
        raise ValueError(f"n={n} exceeds the truncation A={P.max_arity} of {P.name}")
    bases = {i: tree_basis(P, n, i) for i in range(0, n - 1)}
    return assemble_complex(
        bases, lambda i, ct: tree_boundary(P, ct, orientation), P.field,
        name=f"trees({P.name}, n={n}, {orientation})", check=check,
        meta={"operad": P.name, "n": n, "orientation": orientation})


def tree_homology_dims(P: OperadSpec, n: int, orientation: str = "koszul") -> List[Tuple[int, int]]:
    return build_tree_complex(P, n, orientation).homology_dims()


def koszul_concentration_check(P: OperadSpec, n: int, orientation: str = "koszul") -> dict:
    dims = tree_homology_dims(P, n, orientation)
    top = n - 2
    return {
        "operad": P.name,
        "n": n,
        "homology": dims,
        "concentrated": all(h == 0 for i, h in dims if i != top),
        "top_dim": dict(dims).get(top, 0),
    }


def catalan(m: int) -> int:
    from math import comb
    return comb(2 * m, m) // (m + 1)


# -- the universal tree cycle ---------------------------------------------------

@dataclass
class TreeCycle:
    """ξ_i(n) in C_i ⊗ Q(n): colored basis tree -> coordinates in Q(n)."""

    operad: OperadSpec
    quotient: object
    n: int
    degree: int
    terms: Dict[ColoredTree, List]

    def boundary(self) -> Dict[ColoredTree, List]:
        """∂ξ in C_{i-1} ⊗ Q(n), dropping zero coordinates."""
        F = self.operad.field
        out: Dict[ColoredTree, List] = {}
        for ct, q in self.terms.items():
            for target, c in tree_boundary(self.operad, ct, self.quotient.orientation).items():
                acc = out.setdefault(target, [F.zero()] * len(q))
                for j, x in enumerate(q):
                    if x:
                        acc[j] = F.add(acc[j], F.mul(c, x))
        return {t: v for t, v in out.items() if any(v)}

    def is_cycle(self) -> bool:
        return self.degree == 0 or not self.boundary()

    def nonzero_terms(self) -> int:
        return sum(1 for q in self.terms.values() if any(q))


def universal_tree_cycle(P: OperadSpec, Q, n: int, i: int) -> TreeCycle:
    """ξ_i(n) = Σ_T T ⊗ [T∨] over colored basis trees with i inner edges.

    T∨ is the free-operad monomial on the same tree decorated with the dual
    basis; it carries the same orientation line, so the pairing is the
    identity on monomials.  ∂ξ = Σ_T' T' ⊗ [∂_Ω T'] and ∂_Ω T' lies in the
    ideal, hence ξ is a cycle.
    """
    if n > Q.max_arity:
        raise ValueError(f"n={n} exceeds the truncation {Q.max_arity} of the quotient")
    if Q.dual.operad.name != P.name:
        raise ValueError("the quotient operad was built from a different operad")
    terms = {ct: Q.project(n, {ct: P.field.one()}) for ct in tree_basis(P, n, i)}
    return TreeCycle(P, Q, n, i, terms)
