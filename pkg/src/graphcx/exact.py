"""Exact scalars and sparse linear algebra.

Everything is done over either the rationals (``fractions.Fraction``) or a
prime field GF(p) with elements stored as plain ints in ``range(p)``.  No
floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class Field:
    """Base class for the two scalar fields."""

    name = "field"

    def convert(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def zero(self):
        return self.convert(0)

    def one(self):
        return self.convert(1)

    def __eq__(self, other):
        return type(self) is type(other) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class Rationals(Field):
    name = "QQ"

    def convert(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, str):
            return Fraction(x.strip())
        return Fraction(x)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a


class PrimeField(Field):
    """GF(p) for a single machine-word prime p."""

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not a prime")
        self.p = p
        self.name = f"GF({p})"

    def convert(self, x):
        p = self.p
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            den = x.denominator % p
            if den == 0:
                raise ZeroDivisionError(f"denominator {x.denominator} vanishes mod {p}")
            return (x.numerator % p) * pow(den, -1, p) % p
        return int(x) % p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p


QQ = Rationals()


def field_from_spec(spec: Optional[str]) -> Field:
    """``None``/"QQ"/"rational" -> QQ, "p:101" or "101" -> GF(101)."""
    if spec is None or str(spec).lower() in ("qq", "rational", "rationals"):
        return QQ
    s = str(spec)
    if s.lower().startswith("p:"):
        s = s[2:]
    return PrimeField(int(s))


class SparseMatrix:
    """Immutable sparse matrix; entries keyed by (row, col), zeros never stored."""

    __slots__ = ("nrows", "ncols", "_entries", "field")

    def __init__(self, nrows: int, ncols: int, entries=(), field: Field = QQ):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        acc: Dict[Tuple[int, int], object] = {}
        items = entries.items() if isinstance(entries, dict) else entries
        for (r, c), v in ((rc, val) for rc, val in _pairs(items)):
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            v = field.convert(v)
            key = (r, c)
            acc[key] = field.add(acc[key], v) if key in acc else v
        self._entries = {k: v for k, v in acc.items() if v != 0}

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)}, field)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: Field = QQ) -> "SparseMatrix":
        return cls(nrows, ncols, {}, field)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], field: Field = QQ) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        ent = {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if v != 0}
        return cls(nrows, ncols, ent, field)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Dict[int, object]],
                     field: Field = QQ) -> "SparseMatrix":
        ent = {(r, j): v for j, col in enumerate(columns) for r, v in col.items()}
        return cls(nrows, len(columns), ent, field)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entries(self) -> List[Tuple[int, int, object]]:
        return [(r, c, v) for (r, c), v in sorted(self._entries.items())]

    def __getitem__(self, rc):
        return self._entries.get(tuple(rc), self.field.zero())

    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def to_dense(self) -> List[List]:
        z = self.field.zero()
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def rows(self) -> List[Dict[int, object]]:
        out: List[Dict[int, object]] = [dict() for _ in range(self.nrows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def columns(self) -> List[Dict[int, object]]:
        out: List[Dict[int, object]] = [dict() for _ in range(self.ncols)]
        for (r, c), v in self._entries.items():
            out[c][r] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows,
                            {(c, r): v for (r, c), v in self._entries.items()}, self.field)

    def to_field(self, field: Field) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, self._entries, field)

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            F = self.field
            orows = other.rows()
            acc: Dict[Tuple[int, int], object] = {}
            for (r, k), v in self._entries.items():
                for c, w in orows[k].items():
                    key = (r, c)
                    prod = F.mul(v, w)
                    acc[key] = F.add(acc[key], prod) if key in acc else prod
            return SparseMatrix(self.nrows, other.ncols, acc, F)
        return self.apply(other)

    def apply(self, vec: Sequence) -> List:
        """Exact matrix-vector product."""
        if len(vec) != self.ncols:
            raise ValueError(f"vector of length {len(vec)} for matrix with {self.ncols} columns")
        F = self.field
        out = [F.zero()] * self.nrows
        for (r, c), v in self._entries.items():
            x = vec[c]
            if x:
                out[r] = F.add(out[r], F.mul(v, F.convert(x)))
        return out

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.shape == other.shape
                and self._entries == other._entries)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()}, {self.field})"


def _pairs(items):
    for item in items:
        if len(item) == 3:
            r, c, v = item
            yield (r, c), v
        else:
            yield item


def _echelon(rows: List[Dict[int, object]], field: Field, ncols: int):
    """Gauss-Jordan elimination on sparse rows.

    Returns ``pivots``: a dict pivot_col -> reduced row (pivot entry 1) in
    fully reduced form.  Pivot rows are picked greedily with the fewest
    nonzeros (Markowitz-style) to limit fill-in.
    """
    F = field
    pending = [dict(r) for r in rows if r]
    pivots: Dict[int, Dict[int, object]] = {}
    while pending:
        pending.sort(key=len)
        row = pending.pop(0)
        row = _reduce(row, pivots, F)
        if not row:
            continue
        col = min(row)
        inv = F.inv(row[col])
        row = {c: F.mul(v, inv) for c, v in row.items()}
        for prow in pivots.values():
            if col in prow:
                f = prow[col]
                for c, v in row.items():
                    nv = F.add(prow.get(c, F.zero()), F.neg(F.mul(f, v)))
                    if nv:
                        prow[c] = nv
                    else:
                        prow.pop(c, None)
        pivots[col] = row
    return pivots


def _reduce(row, pivots, F):
    # pivot rows are fully reduced, so one pass clears every pivot column
    row = dict(row)
    for col in [c for c in row if c in pivots]:
        f = row.get(col)
        if not f:
            continue
        for c, v in pivots[col].items():
            nv = F.add(row.get(c, F.zero()), F.neg(F.mul(f, v)))
            if nv:
                row[c] = nv
            else:
                row.pop(c, None)
    return row


def rank(m: SparseMatrix) -> int:
    """Rank over ``m.field`` by exact elimination."""
    if m.is_zero():
        return 0
    # eliminate along the shorter side
    rows = m.rows() if m.nrows <= m.ncols else m.columns()
    return len(_echelon(rows, m.field, max(m.shape)))


def row_space_basis(vectors: Sequence[Dict[int, object]], field: Field = QQ):
    """Reduced echelon basis of the span of sparse vectors, as {pivot: row}."""
    return _echelon([{k: field.convert(v) for k, v in vec.items() if v}
                     for vec in vectors], field, 0)


def kernel_basis(m: SparseMatrix) -> List[List]:
    """Dense vectors spanning the null space of ``m``."""
    F = m.field
    pivots = _echelon(m.rows(), F, m.ncols)
    free = [c for c in range(m.ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero()] * m.ncols
        v[fc] = F.one()
        for pc, row in pivots.items():
            if fc in row:
                v[pc] = F.neg(row[fc])
        basis.append(v)
    return basis


def solve(m: SparseMatrix, b: Sequence) -> Optional[List]:
    """Some exact solution x of m x = b, or None when b is not in the image."""
    F = m.field
    if len(b) != m.nrows:
        raise ValueError("right-hand side has wrong length")
    # augmented rows; column ncols carries b
    aug = m.rows()
    for r, val in enumerate(b):
        val = F.convert(val)
        if val:
            aug[r] = dict(aug[r])
            aug[r][m.ncols] = val
    pivots = _echelon(aug, F, m.ncols + 1)
    if m.ncols in pivots:
        return None
    x = [F.zero()] * m.ncols
    for pc, row in pivots.items():
        x[pc] = row.get(m.ncols, F.zero())
    return x


def quotient_basis(ambient_dim: int, subspace: Sequence[Sequence], field: Field = QQ):
    """Complement a subspace of ``field^ambient_dim`` by coordinate vectors.

    Returns ``(representatives, projection)``: ``representatives`` are the
    ambient coordinate indices whose unit vectors project to a basis of the
    quotient, and ``projection`` is a (dim quotient) x ambient_dim matrix
    killing the subspace.
    """
    F = field
    vecs = []
    for v in subspace:
        if len(v) != ambient_dim:
            raise ValueError("subspace vector has wrong length")
        vecs.append({i: F.convert(x) for i, x in enumerate(v) if x})
    pivots = _echelon(vecs, F, ambient_dim)
    reps = [c for c in range(ambient_dim) if c not in pivots]
    index = {c: j for j, c in enumerate(reps)}
    ent = {}
    for c in range(ambient_dim):
        if c in index:
            ent[(index[c], c)] = F.one()
        else:
            # e_c = row - (rest of row); row is in the subspace
            for cc, v in pivots[c].items():
                if cc != c:
                    ent[(index[cc], c)] = F.neg(v)
    return reps, SparseMatrix(len(reps), ambient_dim, ent, F)


def reduce_vector(vec: Dict[int, object], pivots, field: Field = QQ) -> Dict[int, object]:
    """Reduce a sparse vector modulo an echelon basis returned by row_space_basis."""
    return _reduce({k: field.convert(v) for k, v in vec.items() if v}, pivots, field)
