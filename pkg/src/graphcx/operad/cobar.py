"""Dual collection, cobar differential, free operad F(P∨) and the quotient Q.

Free-operad monomials are colored trees (see :mod:`graphcx.trees`) whose
vertex colors are read as dual basis elements of P∨(k).  The free operad
uses the same orientation lines as the tree complex, so the derivation
∂_Ω on F(P∨) is the transpose of the tree differential and ∂_Ω² = 0 is the
transpose of ∂² = 0.

Q(n) = F(P∨)(n) / I(n), where I(n) is spanned by the monomials with one
vertex replaced by a relator ∂_Ω(φ).  Concretely, for a monomial T' and a
vertex w of T', the relator grafted at w is the sum over all trees T with
an inner edge e such that T/e = T' (merged at w) of the coefficient of T'
in ∂_e(T), times T.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Sequence, Tuple

from graphcx.exact import SparseMatrix, _echelon, quotient_basis, rank
from graphcx.operad.core import OperadError, OperadSpec, perm_inverse, rotation


@dataclass
class DualCollection:
    """P∨(n) = Hom(P(n), k) with the dual bases and transposed structure maps."""

    operad: OperadSpec

    @property
    def field(self):
        return self.operad.field

    def dim(self, n: int) -> int:
        return self.operad.dim(n)

    def label(self, n: int, a: int) -> str:
        return self.operad.labels[n][a] + "^"

    def pairing(self, n: int, phi: Sequence, p: Sequence):
        F = self.field
        acc = F.zero()
        for x, y in zip(phi, p):
            if x and y:
                acc = F.add(acc, F.mul(x, y))
        return acc

    def cocomposition(self, k: int, l: int, i: int):
        """Δ[c][a][b] = coefficient of e_a^ ⊗ e_b^ in the cocomposition of e_c^."""
        C = self.operad.compositions[(k, l, i)]
        return [[[C[c][a][b] for b in range(self.dim(l))] for a in range(self.dim(k))]
                for c in range(self.dim(k + l - 1))]

    def action_matrix(self, n: int, perm):
        """Contragredient action: the transpose of the action of perm^-1."""
        M = self.operad.action_matrix(n, perm_inverse(tuple(perm)))
        return [list(col) for col in zip(*M)]


def free_operad_basis(d: DualCollection, n: int):
    """All monomials of F(P∨)(n): decorated trees of every degree."""
    from graphcx.trees import tree_basis

    P = d.operad
    if n > P.max_arity:
        raise OperadError(f"arity {n} exceeds truncation {P.max_arity}")
    return [ct for i in range(n - 1) for ct in tree_basis(P, n, i)]


def cobar_differential(d: DualCollection, n: int, c: int, orientation: str = "koszul"):
    """∂_Ω(e_c^) for e_c^ in P∨(n): a combination of two-vertex monomials."""
    from graphcx.trees import ColoredTree, _corolla_of, tree_basis, tree_boundary

    P = d.operad
    if n < 3:
        return {}
    corolla = ColoredTree(_corolla_of(n), (c,))
    out = {}
    for ct in tree_basis(P, n, 1):
        coef = tree_boundary(P, ct, orientation).get(corolla)
        if coef:
            out[ct] = coef
    return out


def cobar_derivation_matrix(d: DualCollection, n: int, i: int, orientation: str = "koszul"):
    """∂_Ω : F(P∨)(n)_i -> F(P∨)(n)_{i+1} on monomials, the transposed tree differential."""
    from graphcx.trees import build_tree_complex

    cx = build_tree_complex(d.operad, n, orientation, check=False)
    return cx.differential(i + 1).transpose()


@dataclass
class QuotientOperad:
    """Q = F(P∨)/(∂_Ω P∨) truncated at ``max_arity``."""

    dual: DualCollection
    max_arity: int
    orientation: str
    monomials: Dict[int, list]
    index: Dict[int, dict]
    ideal: Dict[int, dict]
    reps: Dict[int, List[int]]
    projection: Dict[int, SparseMatrix]
    inclusion: Dict[int, SparseMatrix] = dc_field(default_factory=dict)

    @property
    def field(self):
        return self.dual.field

    def dim(self, n: int) -> int:
        return len(self.reps[n])

    def ideal_dim(self, n: int) -> int:
        return len(self.ideal[n])

    def free_dim(self, n: int) -> int:
        return len(self.monomials[n])

    def project(self, n: int, vec: Dict) -> List:
        """Class in Q(n) of a combination {monomial: coef} of free monomials."""
        F = self.field
        dense = [F.zero()] * self.free_dim(n)
        for m, c in vec.items():
            j = self.index[n][m]
            dense[j] = F.add(dense[j], F.convert(c))
        return self.projection[n].apply(dense)

    def is_zero(self, n: int, vec: Dict) -> bool:
        return not any(self.project(n, vec))

    def inclusion_rank(self, n: int) -> int:
        return rank(self.inclusion[n])

    def representative(self, n: int, j: int):
        return self.monomials[n][self.reps[n][j]]

    def compose(self, x: Sequence, k: int, y: Sequence, l: int, i: int) -> List:
        """Induced composition Q(k) ⊗ Q(l) -> Q(k+l-1) through representatives."""
        F = self.field
        out = {}
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                m, sign = graft(self.dual.operad, self.representative(k, a),
                                self.representative(l, b), i, self.orientation)
                out[m] = F.add(out.get(m, F.zero()), F.mul(F.convert(sign), F.mul(xa, yb)))
        return self.project(k + l - 1, out)

    def summary(self) -> dict:
        return {n: {"free": self.free_dim(n), "ideal": self.ideal_dim(n), "quotient": self.dim(n),
                    "inclusion_rank": self.inclusion_rank(n)} for n in sorted(self.reps)}


def graft(P: OperadSpec, m1, m2, i: int, orientation: str = "koszul"):
    """Free-operad composition m1 o_i m2 of monomials, with its orientation sign."""
    from graphcx.chains import koszul_sign, reorder_sign
    from graphcx.trees import ColoredTree, vertex_key, vertices

    t1, t2 = m1.tree, m2.tree
    n2 = len(_leaves(t2))
    shift1 = lambda x: x if x < i else x + n2 - 1
    shift2 = lambda x: x + i - 1

    def relabel(t, fn):
        if isinstance(t, int):
            return fn(t)
        return tuple(relabel(c, fn) for c in t)

    t2s = relabel(t2, shift2)

    def plug(t):
        if isinstance(t, int):
            return t2s if t == i else shift1(t)
        return tuple(plug(c) for c in t)

    t = plug(t1)
    vs1 = [vertex_key(v) for v in vertices(t1)]
    vs2 = [vertex_key(v) for v in vertices(t2)]
    # keys after relabelling
    k1 = [tuple(sorted(x for y in key for x in ((shift1(y),) if y != i else
                                                   tuple(range(i, i + n2)))))
          for key in vs1]
    k2 = [tuple(shift2(y) for y in key) for key in vs2]
    colors_by_key = dict(zip(k1, m1.colors))
    colors_by_key.update(zip(k2, m2.colors))
    new_vs = vertices(t)
    new_keys = [vertex_key(v) for v in new_vs]
    colors = tuple(colors_by_key[kk] for kk in new_keys)
    if orientation == "edges":
        sign = reorder_sign(k1[1:] + [k2[0]] + k2[1:], new_keys[1:])
    else:
        parity = {kk: len(v) & 1 for kk, v in zip(new_keys, new_vs)}
        sign = koszul_sign(k1 + k2, new_keys, parity)
    return ColoredTree(t, colors), sign


def _leaves(t):
    if isinstance(t, int):
        return (t,)
    return tuple(x for c in t for x in _leaves(c))


def build_quotient_operad(d: DualCollection, up_to_arity: int,
                          orientation: str = "koszul") -> QuotientOperad:
    """Quotient of the free operad on P∨ by the ideal generated by ∂_Ω(P∨)."""
    from graphcx.trees import ColoredTree, tree_boundary, _corolla_of

    P = d.operad
    F = P.field
    if up_to_arity > P.max_arity:
        raise OperadError(f"arity {up_to_arity} exceeds truncation {P.max_arity}")
    monomials, index, ideal, reps, proj, incl = {}, {}, {}, {}, {}, {}
    for n in range(2, up_to_arity + 1):
        mons = free_operad_basis(d, n)
        idx = {m: j for j, m in enumerate(mons)}
        gens: Dict[Tuple, Dict[int, object]] = {}
        for m in mons:
            for (target, wkey), c in tree_boundary(P, m, orientation, by_vertex=True).items():
                g = gens.setdefault((target, wkey), {})
                j = idx[m]
                g[j] = F.add(g.get(j, F.zero()), c)
        vecs = [{j: x for j, x in g.items() if x} for _, g in sorted(gens.items(), key=lambda kv: _gen_key(kv[0]))]
        piv = _echelon([v for v in vecs if v], F, len(mons))
        dense = [[row.get(j, F.zero()) for j in range(len(mons))] for row in piv.values()]
        r, pr = quotient_basis(len(mons), dense, F)
        monomials[n], index[n], reps[n], proj[n] = mons, idx, r, pr
        ideal[n] = piv
        cor = _corolla_of(n)
        cols = []
        for c in range(P.dim(n)):
            dense_c = [F.zero()] * len(mons)
            dense_c[idx[ColoredTree(cor, (c,))]] = F.one()
            cols.append({a: x for a, x in enumerate(pr.apply(dense_c)) if x})
        incl[n] = SparseMatrix.from_columns(len(r), cols, F)
    return QuotientOperad(d, up_to_arity, orientation, monomials, index, ideal, reps, proj, incl)


def _gen_key(key):
    target, wkey = key
    return (target.tree.__repr__(), target.colors, wkey)


def check_ideal_closure(Q: QuotientOperad) -> List[str]:
    """Grafting any monomial onto an ideal element stays in the ideal (both sides)."""
    from graphcx.exact import _reduce

    P = Q.dual.operad
    F = Q.field
    bad = []
    for n1 in range(2, Q.max_arity + 1):
        for n2 in range(2, Q.max_arity + 2 - n1):
            n = n1 + n2 - 1
            for side in ("left", "right"):
                # ideal elements of arity n1 (resp. n2) grafted with monomials of the other arity
                ideal_n = n1 if side == "left" else n2
                other_n = n2 if side == "left" else n1
                for row in Q.ideal[ideal_n].values():
                    for other in Q.monomials[other_n]:
                        for i in range(1, n1 + 1):
                            acc = {}
                            for j, c in row.items():
                                m = Q.monomials[ideal_n][j]
                                a, b = (m, other) if side == "left" else (other, m)
                                g, s = graft(P, a, b, i, Q.orientation)
                                jj = Q.index[n][g]
                                acc[jj] = F.add(acc.get(jj, F.zero()), F.mul(F.convert(s), c))
                            acc = {k: v for k, v in acc.items() if v}
                            if _reduce(acc, Q.ideal[n], F):
                                bad.append(f"{side} grafting into arity {n} slot {i} leaves the ideal")
    return bad


@dataclass(frozen=True)
class CyclicMarker:
    """Bookkeeping for q -> h(q, 1): a (k+1)-input operation invariant under C_{k+1}."""

    arity: int
    inputs: int
    vector: Tuple
    orbit_size: int

    @property
    def is_zero(self) -> bool:
        return not any(self.vector)


def theory_inclusion(d: DualCollection, n: int, phi: Sequence) -> CyclicMarker:
    """Tag an element of P∨(n) as an (n+1)-input invariant operation.

    The orbit size is that of ``phi`` under the contragredient rotation.
    """
    from graphcx.operad.core import mat_vec

    P = d.operad
    if not P.cyclic:
        raise OperadError(f"{P.name} is not cyclic")
    F = d.field
    vec = tuple(F.convert(x) for x in phi)
    if not any(vec):
        return CyclicMarker(n, n + 1, vec, 1)
    R = d.action_matrix(n, rotation(n))
    orbit = {vec}
    cur = vec
    for _ in range(n):
        cur = tuple(mat_vec(R, list(cur), F))
        orbit.add(cur)
    return CyclicMarker(n, n + 1, vec, len(orbit))
