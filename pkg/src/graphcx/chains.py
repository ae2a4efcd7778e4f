"""Graded chain complexes with exact sparse differentials, plus the sign kernel.

Two orientation conventions are supported by the tree, graph and lacunar
builders; both are computed with the helpers below.

``"koszul"`` (default)
    Every vertex contributes an odd vertex line followed by its half-edges,
    each half-edge odd, in anchor order.  A vertex block of valence m thus
    has parity m + 1, the parity of the dual generator of arity m - 1 in
    the cobar construction.  Reordering vertices costs the Koszul sign of
    the blocks, re-anchoring a vertex by ``s`` multiplies its color by
    ``sign(s)`` in addition to the operad action, and contracting an edge
    costs -1 for the vertex line of the second endpoint passing the
    half-edges of the first.

``"edges"``
    The orientation is an ordering of the internal edges, and vertex
    colors transform by the plain operad action.

With ``"koszul"`` the relations of Q(Ass) are the A-infinity relations
with their standard signs (associativity in arity 3, the Hochschild
cocycle condition for the first-order part in arity 4) and those of
Q(Comm) are the Jacobi identity.  With ``"edges"`` the arity-3 relations
come out anti-associative, which is why it is not the default.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from graphcx.exact import QQ, Field, SparseMatrix, _echelon, kernel_basis, rank, solve

ORIENTATIONS = ("koszul", "edges")


def check_orientation(orientation: str) -> str:
    if orientation not in ORIENTATIONS:
        raise ValueError(f"unknown orientation {orientation!r}; expected one of {ORIENTATIONS}")
    return orientation


def reorder_sign(order_from: Sequence[Hashable], order_to: Sequence[Hashable],
                 parity: Optional[Dict[Hashable, int]] = None) -> int:
    """Sign of moving the items of ``order_from`` into the order ``order_to``.

    Every crossing pair contributes -1 (the permutation sign); when
    ``parity`` is given a crossing of two odd items contributes an extra -1
    (the Koszul sign).  Items of even parity thus behave like plain
    permutation letters and pairs of odd items commute.
    """
    pos = {x: j for j, x in enumerate(order_to)}
    if len(pos) != len(order_from) or any(x not in pos for x in order_from):
        raise ValueError("orders are not permutations of each other")
    seq = [pos[x] for x in order_from]
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                if parity is None or not (parity[order_from[a]] & parity[order_from[b]] & 1):
                    sign = -sign
    return sign


def koszul_sign(order_from: Sequence[Hashable], order_to: Sequence[Hashable],
                parity: Dict[Hashable, int]) -> int:
    """Koszul sign of moving graded items: a crossing costs -1 iff both items are odd."""
    pos = {x: j for j, x in enumerate(order_to)}
    if len(pos) != len(order_from) or any(x not in pos for x in order_from):
        raise ValueError("orders are not permutations of each other")
    odd = [pos[x] for x in order_from if parity[x] & 1]
    sign = 1
    for a in range(len(odd)):
        for b in range(a + 1, len(odd)):
            if odd[a] > odd[b]:
                sign = -sign
    return sign


def sequence_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation that sorts a sequence of distinct integers."""
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


@dataclass
class GradedComplex:
    """Chain complex C_i with differentials ∂_i : C_i -> C_{i-1}.

    ``bases[i]`` lists hashable labels of the basis of C_i (deterministic
    order); ``differentials[i]`` is a ``dim C_{i-1} x dim C_i`` matrix.
    Missing degrees are zero.
    """

    bases: Dict[int, list]
    differentials: Dict[int, SparseMatrix]
    field: Field = QQ
    name: str = ""
    meta: dict = dc_field(default_factory=dict)
    _ranks: Dict[int, int] = dc_field(default_factory=dict, repr=False)

    def degrees(self) -> List[int]:
        return sorted(self.bases)

    def dim(self, i: int) -> int:
        return len(self.bases.get(i, ()))

    def differential(self, i: int) -> SparseMatrix:
        if i in self.differentials:
            return self.differentials[i]
        return SparseMatrix.zeros(self.dim(i - 1), self.dim(i), self.field)

    def rank(self, i: int) -> int:
        if i not in self._ranks:
            self._ranks[i] = rank(self.differential(i))
        return self._ranks[i]

    def d_squared_is_zero(self) -> bool:
        return not self.d_squared_failures()

    def d_squared_failures(self) -> List[int]:
        """Degrees i where ∂_{i-1} ∂_i is not exactly zero."""
        bad = []
        for i in self.degrees():
            if self.dim(i) and self.dim(i - 1) and self.dim(i - 2):
                if not (self.differential(i - 1) @ self.differential(i)).is_zero():
                    bad.append(i)
        return bad

    def homology_dims(self) -> List[Tuple[int, int]]:
        return [(i, self.dim(i) - self.rank(i) - self.rank(i + 1)) for i in self.degrees()]

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * self.dim(i) for i in self.degrees())

    def homology_euler_characteristic(self) -> int:
        return sum((-1) ** i * h for i, h in self.homology_dims())

    # -- chains

    def _check(self, i, chain):
        if len(chain) != self.dim(i):
            raise ValueError(f"chain of length {len(chain)} in degree {i} of dimension {self.dim(i)}")

    def boundary_of_chain(self, i: int, chain: Sequence) -> List:
        self._check(i, chain)
        return self.differential(i).apply([self.field.convert(x) for x in chain])

    def is_cycle(self, i: int, chain: Sequence) -> bool:
        return not any(self.boundary_of_chain(i, chain))

    def is_boundary(self, i: int, chain: Sequence):
        """``(True, witness)`` with ∂_{i+1} witness = chain, or ``(False, None)``."""
        self._check(i, chain)
        d = self.differential(i + 1)
        x = solve(d, [self.field.convert(c) for c in chain])
        return (x is not None), x

    def cycle_basis(self, i: int) -> List[List]:
        return kernel_basis(self.differential(i))

    def homology_representatives(self, i: int) -> List[List]:
        """Cycles whose classes form a basis of H_i."""
        F = self.field
        pivots = _echelon(self.differential(i + 1).columns(), F, self.dim(i))
        reps = []
        for z in self.cycle_basis(i):
            vec = {j: x for j, x in enumerate(z) if x}
            before = len(pivots)
            pivots = _extend(pivots, vec, F)
            if len(pivots) > before:
                reps.append(z)
        return reps

    def homology_class(self, i: int, chain: Sequence) -> dict:
        """Coordinates of a cycle in the basis of ``homology_representatives``."""
        if not self.is_cycle(i, chain):
            raise ValueError("chain is not a cycle")
        F = self.field
        reps = self.homology_representatives(i)
        bcols = self.differential(i + 1).columns()
        cols = bcols + [{j: x for j, x in enumerate(z) if x} for z in reps]
        m = SparseMatrix.from_columns(self.dim(i), cols, F)
        x = solve(m, [F.convert(c) for c in chain])
        coords = x[len(bcols):]
        return {"zero": not any(coords), "coordinates": coords,
                "witness": x[:len(bcols)] if not any(coords) else None}

    def report(self) -> dict:
        hom = dict(self.homology_dims())
        return {
            "name": self.name,
            "field": str(self.field),
            "degrees": [{"degree": i, "dim": self.dim(i), "rank": self.rank(i),
                         "homology": hom[i]} for i in self.degrees()],
            "euler_characteristic": self.euler_characteristic(),
        }


def _extend(pivots, vec, F):
    from graphcx.exact import _reduce
    row = _reduce(vec, pivots, F)
    if not row:
        return pivots
    return _echelon(list(pivots.values()) + [row], F, 0)


def assemble_complex(bases: Dict[int, list], boundary, field: Field = QQ, name: str = "",
                     check: bool = True, meta: Optional[dict] = None) -> GradedComplex:
    """Build a complex from a boundary function.

    ``boundary(i, label)`` returns ``{target_label: coefficient}`` with
    targets in degree i-1; labels not in the basis (zero elements) must not
    be returned.
    """
    index = {i: {lab: j for j, lab in enumerate(b)} for i, b in bases.items()}
    diffs = {}
    for i, basis in bases.items():
        if i - 1 not in bases:
            continue
        tgt = index[i - 1]
        ent = {}
        for j, lab in enumerate(basis):
            for t, c in boundary(i, lab).items():
                if c:
                    key = (tgt[t], j)
                    ent[key] = field.add(ent[key], c) if key in ent else c
        diffs[i] = SparseMatrix(len(bases[i - 1]), len(basis), ent, field)
    cx = GradedComplex(bases, diffs, field, name, dict(meta or {}))
    if check:
        bad = cx.d_squared_failures()
        if bad:
            raise ArithmeticError(f"{name}: d^2 != 0 in degrees {bad}")
    return cx


def color_action(P, n: int, perm, vec, orientation: str):
    """Move a vertex color along a re-anchoring ``perm`` of its slots.

    Under the Koszul convention the half-edge order follows the anchor, so
    the operad action is twisted by the sign of ``perm``.
    """
    from graphcx.operad.core import perm_sign

    out = P.act(n, tuple(perm), vec)
    if orientation == "koszul" and perm_sign(perm) < 0:
        F = P.field
        out = [F.neg(x) for x in out]
    return out
