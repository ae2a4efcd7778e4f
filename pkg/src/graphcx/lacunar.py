"""Lacunar graphs and first-order deformations of strict cyclic algebras.

A lacunar graph has every vertex trivalent except one (k+1)-valent vertex.
Coloring trivalent vertices by P(2) t^0 and the exceptional vertex by
P(k) t^1, the evaluated chain of a deformation mu + t lambda is

    z = z0 + t z1    (mod t^2),

with z0 supported on trivalent graphs (evaluated with mu) and z1 on
lacunar graphs (mu at trivalent vertices, lambda at the exceptional one).
Graphs with two or more exceptional vertices carry t^2 and drop out.  The
deformation constraints on lambda are linear: invariance of its vertex
tensor under the local group, and the mixed relations (one lambda, one
mu) read off the tree complex with k+2 legs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from graphcx.chains import GradedComplex, color_action
from graphcx.exact import Field, SparseMatrix, kernel_basis
from graphcx.graphcomplex import GraphComplex, build_graph_complex, graph_boundary
from graphcx.operad.core import OperadSpec
from graphcx.statesum import (AlgebraError, CyclicAlgebra, StateSumChain, _indices,
                              _vertex_tensors, check_algebra, class_value,
                              relation_complex, relation_residual, verify_cycle)


class LacunarError(ValueError):
    pass


# -- dual numbers -------------------------------------------------------------------

@dataclass(frozen=True)
class Dual:
    """a + b t with t^2 = 0."""

    a: object
    b: object

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __str__(self):
        return f"{self.a} + {self.b} t"


class DualNumbers:
    """k[t]/(t^2) over a base field, with the field interface used by the tensor code."""

    def __init__(self, F: Field):
        self.base = F

    def convert(self, x):
        if isinstance(x, Dual):
            return x
        return Dual(self.base.convert(x), self.base.zero())

    def zero(self):
        return Dual(self.base.zero(), self.base.zero())

    def one(self):
        return Dual(self.base.one(), self.base.zero())

    def t(self):
        return Dual(self.base.zero(), self.base.one())

    def add(self, x, y):
        F = self.base
        return Dual(F.add(x.a, y.a), F.add(x.b, y.b))

    def mul(self, x, y):
        F = self.base
        return Dual(F.mul(x.a, y.a), F.add(F.mul(x.a, y.b), F.mul(x.b, y.a)))

    def neg(self, x):
        return Dual(self.base.neg(x.a), self.base.neg(x.b))


# -- lacunar graphs -----------------------------------------------------------------

def is_lacunar(g, k: int) -> bool:
    vals = sorted(g.valence(v) for v in range(g.n_vertices))
    return vals.count(k + 1) == 1 and all(x == 3 for x in vals if x != k + 1)


def t_degree(g, k: int) -> int:
    """Number of exceptional (k+1)-valent vertices; -1 if some vertex is neither."""
    vals = [g.valence(v) for v in range(g.n_vertices)]
    if any(x not in (3, k + 1) for x in vals):
        return -1
    return vals.count(k + 1)


@dataclass
class LacunarComplex:
    """Lacunar basis inside an ambient graph complex.

    ``complex`` is the restricted complex (ambient differential followed by
    projection onto lacunar basis elements); ``ambient`` is the full one.
    """

    k: int
    ambient: GraphComplex
    complex: GradedComplex
    positions: Dict[int, List[int]]

    def audit(self) -> dict:
        """t-degree bookkeeping of the ambient boundary of every lacunar basis element.

        Trivalent vertices carry t^0 and the exceptional vertex t^1; a
        contraction merges two vertices and adds their t-degrees.  Counts the
        boundary terms by total t-degree; the chain-level form of "at most
        linear in t" is that only t^1 terms occur.
        """
        counts = {0: 0, 1: 0, 2: 0}
        nonzero = 0
        cx = self.ambient
        for i, pos in self.positions.items():
            for j in pos:
                cc, alpha = cx.basis_graph(i, j)
                g = cc.graph
                tdeg = [1 if g.valence(v) == self.k + 1 else 0 for v in range(g.n_vertices)]
                nonzero += len(graph_boundary(cx.operad, cc, alpha, cx.orientation, cx.classes))
                for a, b in g.contractible_edges():
                    va, vb = g.vert[a], g.vert[b]
                    total = tdeg[va] + tdeg[vb] + sum(t for v, t in enumerate(tdeg) if v not in (va, vb))
                    counts[min(total, 2)] += 1
        return {"t0_terms": counts[0], "t1_terms": counts[1], "t2_terms": counts[2],
                "nonzero_boundary_entries": nonzero,
                "at_most_linear": counts[0] == 0 and counts[2] == 0}


def build_lacunar_complex(P: OperadSpec, k: int, b1: int, n_legs: int = 0,
                          orientation: str = "koszul", max_degree: Optional[int] = None) -> LacunarComplex:
    """Lacunar graphs with one (k+1)-valent vertex, loop order b1 and n_legs legs."""
    if k < 3:
        raise LacunarError("the exceptional vertex needs arity k >= 3")
    amb = build_graph_complex(P, b1, n_legs, orientation, max_degree=max_degree)
    positions = {}
    bases = {}
    for i in amb.degrees():
        pos = [j for j, (code, _) in enumerate(amb.bases[i]) if is_lacunar(amb.classes[code].graph, k)]
        positions[i] = pos
        bases[i] = [amb.bases[i][j] for j in pos]
    diffs = {}
    for i in bases:
        if i - 1 not in bases:
            continue
        D = amb.differential(i)
        rowmap = {r: j for j, r in enumerate(positions[i - 1])}
        colmap = {c: j for j, c in enumerate(positions[i])}
        ent = {(rowmap[r], colmap[c]): x for r, c, x in D.entries() if r in rowmap and c in colmap}
        diffs[i] = SparseMatrix(len(bases[i - 1]), len(bases[i]), ent, amb.field)
    sub = GradedComplex(bases, diffs, amb.field, name=f"lacunar(k={k}, {amb.name})",
                        meta=dict(amb.meta, k=k))
    return LacunarComplex(k, amb, sub, positions)


# -- deformation constraints ---------------------------------------------------------

def _with_ops(base: CyclicAlgebra, k: int, lam: Dict[int, Dict[Tuple[int, ...], object]], name="") -> CyclicAlgebra:
    """Copy of the base algebra whose arity-k vertex tensors are ``lam`` (given directly as tensors)."""
    F, nu = base.field, base.propagator
    tensors = {kk: dict(v) for kk, v in base.tensors.items() if kk != k}
    tensors[k] = lam
    # raise the output index with nu: A(..)_j = sum_i0 nu[j][i0] T[i0, ..]
    ops = {kk: v for kk, v in base.operations.items() if kk != k}
    ops[k] = {}
    for a, T in lam.items():
        out = {}
        for idx, x in T.items():
            for j in range(base.dim):
                if nu[j][idx[0]]:
                    key = (j,) + tuple(idx[1:])
                    out[key] = F.add(out.get(key, F.zero()), F.mul(nu[j][idx[0]], x))
        ops[k][a] = {key: v for key, v in out.items() if v}
    return CyclicAlgebra(name or f"{base.name}+t*lambda", base.operad, base.dim, base.form,
                         base.propagator, ops, tensors, list(base.labels))


def deformed_algebra(base: CyclicAlgebra, k: int, lam) -> CyclicAlgebra:
    """The base algebra with arity-k vertex tensors ``lam`` (the t-coefficient of mu + t*lambda)."""
    return _with_ops(base, k, lam)


@dataclass
class DeformationSystem:
    """Exact linear constraints on the arity-k vertex tensors lambda_a.

    Unknowns are indexed by (a, i0, ..., ik).  ``invariance`` is the matrix
    of the local-group invariance equations; ``invariant_basis`` spans its
    kernel; ``relation`` maps coordinates on that basis to the residual of
    the mixed relations.  ``kernel()`` returns the solutions as tensors.
    """

    k: int
    base: CyclicAlgebra
    unknowns: List[Tuple[int, ...]]
    invariance: SparseMatrix
    invariant_basis: List[List]
    relation: SparseMatrix
    _kernel: Optional[List] = dc_field(default=None, repr=False)

    @property
    def n_unknowns(self) -> int:
        return len(self.unknowns)

    def to_tensors(self, vec) -> Dict[int, Dict[Tuple[int, ...], object]]:
        out: Dict[int, Dict] = {}
        for (a, *idx), x in zip(self.unknowns, vec):
            if x:
                out.setdefault(a, {})[tuple(idx)] = x
        return out

    def from_tensors(self, lam) -> List:
        F = self.base.field
        return [lam.get(a, {}).get(tuple(idx), F.zero()) for (a, *idx) in self.unknowns]

    def kernel(self) -> List[Dict[int, Dict[Tuple[int, ...], object]]]:
        if self._kernel is None:
            F = self.base.field
            coords = kernel_basis(self.relation)
            vecs = []
            for c in coords:
                v = [F.zero()] * self.n_unknowns
                for x, b in zip(c, self.invariant_basis):
                    if x:
                        v = [F.add(p, F.mul(x, q)) for p, q in zip(v, b)]
                vecs.append(v)
            self._kernel = vecs
        return [self.to_tensors(v) for v in self._kernel]

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel())

    def residual(self, lam, orientation: str = "koszul") -> dict:
        """Violations of both blocks for a candidate lambda."""
        vec = self.from_tensors(lam)
        inv = [x for x in self.invariance.apply(vec) if x]
        rel = relation_residual(_with_ops(self.base, self.k, lam), self.k + 1, orientation)
        return {"invariance": len(inv), "relations": sum(1 for t in rel if t)}

    def satisfied(self, lam, orientation: str = "koszul") -> bool:
        r = self.residual(lam, orientation)
        return r["invariance"] == 0 and r["relations"] == 0


def _invariance_rows(P: OperadSpec, k: int, d: int, index, F, orientation: str):
    rows = []
    for s in P.generator_perms(k).values():
        for b in range(P.dim(k)):
            moved = color_action(P, k, s, P.basis_vector(k, b), orientation)
            for j in _indices(d, k + 1):
                # sum_a moved_a lambda_a[j o s^-1] - lambda_b[j] = 0
                row: Dict[int, object] = {}
                idx = tuple(j[perm_pos] for perm_pos in _inverse(s))
                for a, x in enumerate(moved):
                    if x:
                        c = index[(a,) + idx]
                        row[c] = F.add(row.get(c, F.zero()), x)
                c = index[(b,) + tuple(j)]
                row[c] = F.add(row.get(c, F.zero()), F.neg(F.one()))
                row = {c: x for c, x in row.items() if x}
                if row:
                    rows.append(row)
    return rows


def _inverse(s):
    inv = [0] * len(s)
    for i, x in enumerate(s):
        inv[x] = i
    return inv


def deformation_constraints(P: OperadSpec, k: int, base: CyclicAlgebra,
                            orientation: str = "koszul") -> DeformationSystem:
    """Linear system for first-order deformations lambda of arity k."""
    if k < 3:
        raise LacunarError("deformations are taken in arity k >= 3")
    if base.operad.name != P.name:
        raise LacunarError("base algebra is over a different operad")
    bad = check_algebra(base, orientation)
    if bad:
        raise AlgebraError("base algebra fails the strict relations", bad)
    F, d = base.field, base.dim
    unknowns = [(a,) + j for a in range(P.dim(k)) for j in _indices(d, k + 1)]
    index = {u: c for c, u in enumerate(unknowns)}
    rows = _invariance_rows(P, k, d, index, F, orientation)
    inv = SparseMatrix(len(rows), len(unknowns), {(r, c): x for r, row in enumerate(rows) for c, x in row.items()}, F)
    basis = kernel_basis(inv)
    rcx = relation_complex(P, k + 1, orientation)
    columns = []
    comps = {}
    for b in basis:
        lam = {}
        for (a, *idx), x in zip(unknowns, b):
            if x:
                lam.setdefault(a, {})[tuple(idx)] = x
        res = relation_residual(_with_ops(base, k, lam), k + 1, orientation, complex=rcx)
        col = {}
        for r, t in enumerate(res):
            for comp, x in t.items():
                key = comps.setdefault((r, comp), len(comps))
                col[key] = x
        columns.append(col)
    rel = SparseMatrix(len(comps), len(basis), {(r, c): x for c, col in enumerate(columns) for r, x in col.items()}, F)
    return DeformationSystem(k, base, unknowns, inv, basis, rel)


# -- evaluation mod t^2 ------------------------------------------------------------------

@dataclass
class LacunarEvaluation:
    """Evaluated chain z0 + t z1 in one degree, with boundaries of both parts."""

    degree: int
    legs: int
    coefficients: List  # Dual numbers (scalars) or {component: Dual}
    boundary_t0: List
    boundary_t1: List

    @property
    def cycle_mod_t2(self) -> bool:
        return not any(self.boundary_t0) and not any(self.boundary_t1)

    def lacunar_support(self) -> int:
        if self.legs:
            return sum(1 for t in self.coefficients if any(x.b for x in t.values()))
        return sum(1 for x in self.coefficients if x.b)


def evaluate_lacunar_cycle(cx: GraphComplex, base: CyclicAlgebra, k: int, lam,
                           i: int) -> LacunarEvaluation:
    """Evaluate mu + t*lambda on degree i of the ambient complex, mod t^2."""
    F = base.field
    DN = DualNumbers(F)
    B = _with_ops(base, k, lam)
    legs = cx.meta.get("legs", 0)
    basis = cx.bases.get(i, [])
    index = {lab: j for j, lab in enumerate(basis)}
    parts = {0: [({} if legs else F.zero()) for _ in basis], 1: [({} if legs else F.zero()) for _ in basis]}
    for code in dict.fromkeys(c for c, _ in basis):
        cc = cx.classes[code]
        td = t_degree(cc.graph, k)
        if td not in (0, 1):
            continue
        for comp, vec in class_value(B if td else base, cc).items():
            for r, x in zip(cc.reps, vec):
                if x:
                    j = index[(code, cc.colorings[r])]
                    if legs:
                        parts[td][j][comp] = x
                    else:
                        parts[td][j] = x
    bounds = {}
    for td in (0, 1):
        chain = StateSumChain(i, legs, parts[td], B.name)
        ok, res = verify_cycle(chain, cx)
        bounds[td] = res
    coeffs = []
    for x0, x1 in zip(parts[0], parts[1]):
        if legs:
            comps = set(x0) | set(x1)
            coeffs.append({c: Dual(x0.get(c, F.zero()), x1.get(c, F.zero())) for c in sorted(comps)})
        else:
            coeffs.append(Dual(x0, x1))
    return LacunarEvaluation(i, legs, coeffs, bounds[0], bounds[1])


def perturb_off_kernel(system: DeformationSystem):
    """An invariant lambda violating the mixed relations (None if every invariant lambda solves them)."""
    cols = system.relation.columns()
    for c, col in enumerate(cols):
        if col:
            return system.to_tensors(system.invariant_basis[c])
    return None
