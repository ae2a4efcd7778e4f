"""Finite-dimensional truncated (cyclic) operads given by structure constants.

Conventions
-----------
An element of ``P(n)`` is a coefficient vector on the chosen basis of
``P(n)``.  Slots of an n-ary operation are numbered ``0..n``; slot 0 is the
output.  A permutation ``s`` of ``{0..n}`` is a tuple with ``s[j]`` the image
of ``j``; it acts on the left so that slot ``s(j)`` of ``s.p`` plays the
role of slot ``j`` of ``p``.  A vertex colored by ``p`` through an anchor
``f: {0..n} -> half-edges`` is therefore the same as ``s.p`` through the
anchor ``f o s^-1``.

``p o_i q`` plugs the output of ``q`` into input ``i`` of ``p``; the inputs of
the result are ``p_1..p_{i-1}, q_1..q_l, p_{i+1}..p_k``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import yaml

from graphcx.exact import QQ, Field

Perm = Tuple[int, ...]


class OperadError(ValueError):
    """Malformed operad document or violated operad axioms."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


# -- permutations -----------------------------------------------------------

def perm_compose(s: Perm, t: Perm) -> Perm:
    """(s t)(j) = s(t(j))."""
    return tuple(s[t[j]] for j in range(len(t)))


def perm_inverse(s: Perm) -> Perm:
    inv = [0] * len(s)
    for j, x in enumerate(s):
        inv[x] = j
    return tuple(inv)


def perm_sign(s: Sequence[int]) -> int:
    seen = [False] * len(s)
    sign = 1
    for j in range(len(s)):
        if seen[j]:
            continue
        length = 0
        while not seen[j]:
            seen[j] = True
            j = s[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def rotation(n: int, shift: int = 1) -> Perm:
    """j -> j + shift mod n+1 on {0..n}."""
    return tuple((j + shift) % (n + 1) for j in range(n + 1))


def transposition(n: int, j: int) -> Perm:
    s = list(range(n + 1))
    s[j], s[j + 1] = s[j + 1], s[j]
    return tuple(s)


def is_rotation(s: Perm) -> bool:
    m = len(s)
    return all(s[j] == (s[0] + j) % m for j in range(m))


# -- small dense linear algebra on lists ------------------------------------

def mat_vec(M, v, F: Field):
    out = []
    for row in M:
        acc = F.zero()
        for a, x in zip(row, v):
            if a and x:
                acc = F.add(acc, F.mul(a, x))
        out.append(acc)
    return out


def mat_mul(A, B, F: Field):
    if not A:
        return []
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for c in range(cols):
            acc = F.zero()
            for k, a in enumerate(row):
                if a:
                    b = B[k][c]
                    if b:
                        acc = F.add(acc, F.mul(a, b))
            new.append(acc)
        out.append(new)
    return out


def identity_matrix(d: int, F: Field):
    return [[F.one() if i == j else F.zero() for j in range(d)] for i in range(d)]


# -- the operad ---------------------------------------------------------------

@dataclass
class OperadSpec:
    """A truncated operad ``P(2..A)`` presented by structure constants.

    ``compositions[(k, l, i)][c][a][b]`` is the coefficient of basis element
    ``c`` of ``P(k+l-1)`` in ``e_a o_i e_b``.  ``generators[n]`` maps a
    generator name (``"rotation"`` or ``"s1".."s{n-1}"``) to its matrix on
    ``P(n)``.
    """

    name: str
    flavor: str
    cyclic: bool
    max_arity: int
    dims: Dict[int, int]
    labels: Dict[int, List[str]]
    compositions: Dict[Tuple[int, int, int], list]
    generators: Dict[int, Dict[str, list]]
    field: Field = QQ
    _actions: Dict[int, Dict[Perm, list]] = dc_field(default_factory=dict, repr=False)

    @property
    def symmetric(self) -> bool:
        return self.flavor == "symmetric"

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def arities(self):
        return range(2, self.max_arity + 1)

    def basis_vector(self, n: int, a: int):
        F = self.field
        return [F.one() if j == a else F.zero() for j in range(self.dim(n))]

    def zero(self, n: int):
        return [self.field.zero()] * self.dim(n)

    # -- composition

    def compose(self, p: Sequence, k: int, q: Sequence, l: int, i: int):
        """``p o_i q`` for ``p`` in P(k), ``q`` in P(l)."""
        if not 1 <= i <= k:
            raise ValueError(f"slot {i} out of range for arity {k}")
        if k + l - 1 > self.max_arity:
            raise OperadError(f"arity {k + l - 1} exceeds truncation {self.max_arity}")
        F = self.field
        C = self.compositions[(k, l, i)]
        out = [F.zero()] * self.dim(k + l - 1)
        for a, x in enumerate(p):
            if not x:
                continue
            for b, y in enumerate(q):
                if not y:
                    continue
                xy = F.mul(x, y)
                for c in range(len(out)):
                    coef = C[c][a][b]
                    if coef:
                        out[c] = F.add(out[c], F.mul(coef, xy))
        return out

    # -- group actions

    def local_group(self, n: int) -> List[Perm]:
        """Permutations of {0..n} acting on P(n) (the local symmetry of a vertex)."""
        if self.cyclic and self.symmetric:
            return [tuple(p) for p in itertools.permutations(range(n + 1))]
        if self.cyclic:
            return [rotation(n, s) for s in range(n + 1)]
        if self.symmetric:
            return [(0,) + tuple(p) for p in itertools.permutations(range(1, n + 1))]
        return [tuple(range(n + 1))]

    def generator_perms(self, n: int) -> Dict[str, Perm]:
        gens = {}
        if self.symmetric:
            for j in range(1, n):
                gens[f"s{j}"] = transposition(n, j)
        if self.cyclic:
            gens["rotation"] = rotation(n)
        return gens

    def _action_table(self, n: int) -> Dict[Perm, list]:
        if n in self._actions:
            return self._actions[n]
        F = self.field
        d = self.dim(n)
        table = {tuple(range(n + 1)): identity_matrix(d, F)}
        gens = [(self.generator_perms(n)[name], M)
                for name, M in sorted(self.generators.get(n, {}).items())]
        frontier = list(table)
        while frontier:
            nxt = []
            for g in frontier:
                for s, M in gens:
                    h = perm_compose(s, g)
                    if h not in table:
                        table[h] = _mul(M, table[g], F)
                        nxt.append(h)
            frontier = nxt
        self._actions[n] = table
        return table

    def action_matrix(self, n: int, perm: Perm):
        table = self._action_table(n)
        perm = tuple(perm)
        if perm not in table:
            raise OperadError(f"{self.name}: permutation {perm} does not act on P({n})")
        return table[perm]

    def act(self, n: int, perm: Perm, p: Sequence):
        if all(perm[j] == j for j in range(len(perm))):
            return list(p)
        return mat_vec(self.action_matrix(n, perm), p, self.field)

    def cyclic_rotate(self, p: Sequence, n: int):
        """Apply the generator (0 1 ... n) of the cyclic group."""
        if not self.cyclic:
            raise OperadError(f"{self.name} is not cyclic")
        return self.act(n, rotation(n), p)

    # -- gluing two labelled operations along one slot each

    def glue(self, p, plabels, a, q, qlabels, b):
        """Glue slot ``a`` of ``p`` to slot ``b`` of ``q``.

        ``plabels``/``qlabels`` name the slots of the operands; the result is
        ``(vector, labels)`` with the labels of the remaining slots.  For
        cyclic operads any pair of slots can be glued; otherwise exactly one
        of ``a``, ``b`` must be an output slot.
        """
        k, l = len(plabels) - 1, len(qlabels) - 1
        if a == 0:
            if b != 0:
                return self.glue(q, qlabels, b, p, plabels, a)
            if not self.cyclic:
                raise OperadError("cannot glue two outputs in a non-cyclic operad")
            r = rotation(k)
            p, plabels, a = self.act(k, r, p), _relabel(plabels, r), 1
        if b != 0:
            if not self.cyclic:
                raise OperadError("cannot glue two inputs in a non-cyclic operad")
            r = rotation(l, -b)
            q, qlabels, b = self.act(l, r, q), _relabel(qlabels, r), 0
        vec = self.compose(p, k, q, l, a)
        labels = list(plabels[:a]) + list(qlabels[1:]) + list(plabels[a + 1:])
        return vec, labels

    def align(self, vec, labels, target_labels):
        """Re-express a labelled operation with slots ordered as ``target_labels``."""
        pos = {lab: j for j, lab in enumerate(target_labels)}
        perm = tuple(pos[lab] for lab in labels)
        return self.act(len(labels) - 1, perm, vec)

    def to_field(self, F: Field) -> "OperadSpec":
        conv = _map_nested(F.convert)
        return OperadSpec(
            name=self.name, flavor=self.flavor, cyclic=self.cyclic,
            max_arity=self.max_arity, dims=dict(self.dims),
            labels={n: list(v) for n, v in self.labels.items()},
            compositions={key: conv(C) for key, C in self.compositions.items()},
            generators={n: {g: conv(M) for g, M in gs.items()} for n, gs in self.generators.items()},
            field=F)

    def truncate(self, max_arity: int) -> "OperadSpec":
        A = min(max_arity, self.max_arity)
        return OperadSpec(
            name=self.name, flavor=self.flavor, cyclic=self.cyclic, max_arity=A,
            dims={n: d for n, d in self.dims.items() if n <= A},
            labels={n: v for n, v in self.labels.items() if n <= A},
            compositions={key: C for key, C in self.compositions.items() if key[0] + key[1] - 1 <= A},
            generators={n: g for n, g in self.generators.items() if n <= A},
            field=self.field)

    def change_basis(self, mats: Dict[int, list]) -> "OperadSpec":
        """The same operad in the basis e'_a = Σ_b G[b][a] e_b of each P(n).

        ``mats[n]`` is the invertible matrix G for P(n); missing arities keep
        their basis.
        """
        from graphcx.exact import SparseMatrix, solve

        F = self.field
        G, Ginv = {}, {}
        for n, d in self.dims.items():
            M = [[F.convert(x) for x in row] for row in mats.get(n, identity_matrix(d, F))]
            A = SparseMatrix.from_dense(M, F)
            cols = []
            for j in range(d):
                x = solve(A, [F.one() if r == j else F.zero() for r in range(d)])
                if x is None:
                    raise OperadError(f"basis change on arity {n} is not invertible")
                cols.append(x)
            G[n], Ginv[n] = M, [list(r) for r in zip(*cols)]
        comps = {}
        for (k, l, i), C in self.compositions.items():
            m = k + l - 1
            out = []
            for c in range(self.dim(m)):
                out.append([[F.zero()] * self.dim(l) for _ in range(self.dim(k))])
            for a in range(self.dim(k)):
                for b in range(self.dim(l)):
                    old = self.compose([G[k][x][a] for x in range(self.dim(k))], k,
                                       [G[l][y][b] for y in range(self.dim(l))], l, i)
                    new = mat_vec(Ginv[m], old, F)
                    for c in range(self.dim(m)):
                        out[c][a][b] = new[c]
            comps[(k, l, i)] = out
        gens = {n: {g: mat_mul(Ginv[n], mat_mul(M, G[n], F), F) for g, M in gs.items()}
                for n, gs in self.generators.items()}
        return OperadSpec(self.name, self.flavor, self.cyclic, self.max_arity, dict(self.dims),
                          {n: list(v) for n, v in self.labels.items()}, comps, gens, F)

    def to_document(self) -> dict:
        def s(x):
            return str(x)
        comps = []
        for (k, l, i), C in sorted(self.compositions.items()):
            dk, dl = self.dim(k), self.dim(l)
            comps.append({"k": k, "l": l, "i": i,
                          "matrix": [[s(C[c][a][b]) for a in range(dk) for b in range(dl)]
                                     for c in range(self.dim(k + l - 1))]})
        return {
            "name": self.name,
            "flavor": self.flavor,
            "cyclic": self.cyclic,
            "max_arity": self.max_arity,
            "components": {str(n): {"dim": self.dims[n], "basis_labels": self.labels[n]}
                           for n in sorted(self.dims)},
            "compositions": comps,
            "actions": {str(n): {g: [[s(x) for x in row] for row in M] for g, M in sorted(gs.items())}
                        for n, gs in sorted(self.generators.items())},
        }


def _relabel(labels, perm):
    out = [None] * len(labels)
    for j, lab in enumerate(labels):
        out[perm[j]] = lab
    return out


def _map_nested(fn):
    def go(x):
        if isinstance(x, list):
            return [go(y) for y in x]
        return fn(x)
    return go


# -- axiom checking -----------------------------------------------------------

def check_axioms(P: OperadSpec) -> List[str]:
    """Every violated axiom instance, as human-readable strings."""
    out: List[str] = []
    out += _check_shapes(P)
    if out:
        return out
    out += _check_representations(P)
    out += _check_associativity(P)
    out += _check_gluing(P)
    return out


def _check_shapes(P):
    out = []
    for n in P.arities():
        if n not in P.dims:
            out.append(f"missing component P({n})")
            continue
        if len(P.labels.get(n, [])) != P.dims[n]:
            out.append(f"P({n}): {len(P.labels.get(n, []))} labels for dimension {P.dims[n]}")
    for k in P.arities():
        for l in P.arities():
            if k + l - 1 > P.max_arity:
                continue
            for i in range(1, k + 1):
                C = P.compositions.get((k, l, i))
                if C is None:
                    out.append(f"missing composition (k={k}, l={l}, i={i})")
                    continue
                if (len(C) != P.dim(k + l - 1)
                        or any(len(row) != P.dim(k) for row in C)
                        or any(len(col) != P.dim(l) for row in C for col in row)):
                    out.append(f"composition (k={k}, l={l}, i={i}) has wrong shape")
    for n in P.arities():
        expected = set(P.generator_perms(n))
        given = set(P.generators.get(n, {}))
        if P.dim(n) and expected != given:
            out.append(f"P({n}): action generators {sorted(given)} != expected {sorted(expected)}")
        for g, M in P.generators.get(n, {}).items():
            if len(M) != P.dim(n) or any(len(r) != P.dim(n) for r in M):
                out.append(f"P({n}): generator {g} has wrong shape")
    return out


def _mul(A, B, F):
    # 1x1 components are common (Ass, Comm) and dominate the large local groups
    if len(A) == 1:
        return [[F.mul(A[0][0], B[0][0])]]
    return mat_mul(A, B, F)


def _check_representations(P):
    """The generator matrices must define a group action (Cayley-graph consistency)."""
    out = []
    F = P.field
    for n in P.arities():
        if not P.dim(n):
            continue
        table = P._action_table(n)
        perms = P.generator_perms(n)
        expected_order = len(P.local_group(n))
        if len(table) != expected_order:
            out.append(f"P({n}): generators produce {len(table)} elements, expected {expected_order}")
        for g, Mg in table.items():
            for name, M in P.generators.get(n, {}).items():
                h = perm_compose(perms[name], g)
                if _mul(M, Mg, F) != table[h]:
                    out.append(f"P({n}): action not a representation at generator {name}, element {g}")
                    break
    return out


def _check_associativity(P):
    out = []
    A = P.max_arity
    ar = list(P.arities())
    for k, l, m in itertools.product(ar, ar, ar):
        if k + l + m - 2 > A:
            continue
        for a, b, c in itertools.product(range(P.dim(k)), range(P.dim(l)), range(P.dim(m))):
            p, q, r = P.basis_vector(k, a), P.basis_vector(l, b), P.basis_vector(m, c)
            for i in range(1, k + 1):
                pq = P.compose(p, k, q, l, i)
                # sequential: (p o_i q) o_{i+j-1} r = p o_i (q o_j r)
                for j in range(1, l + 1):
                    lhs = P.compose(pq, k + l - 1, r, m, i + j - 1)
                    rhs = P.compose(p, k, P.compose(q, l, r, m, j), l + m - 1, i)
                    if lhs != rhs:
                        out.append(f"sequential associativity fails: (k,l,i)=({k},{l},{i}), "
                                   f"j={j}, m={m}, basis ({a},{b},{c})")
                # parallel: (p o_i q) o_{j+l-1} r = (p o_j r) o_i q for i < j
                for j in range(i + 1, k + 1):
                    lhs = P.compose(pq, k + l - 1, r, m, j + l - 1)
                    rhs = P.compose(P.compose(p, k, r, m, j), k + m - 1, q, l, i)
                    if lhs != rhs:
                        out.append(f"parallel associativity fails: (k,l,i)=({k},{l},{i}), "
                                   f"j={j}, m={m}, basis ({a},{b},{c})")
    return out


def _check_gluing(P):
    """Equivariance and cyclic compatibility.

    Gluing two labelled operations must not depend on how they are presented:
    acting on either operand by a generator of its local group (and moving
    the glued slot accordingly), or swapping the roles of the operands,
    yields the same labelled result.
    """
    out = []
    for k in P.arities():
        for l in P.arities():
            if k + l - 1 > P.max_arity:
                continue
            slot_pairs = ([(a, b) for a in range(k + 1) for b in range(l + 1)] if P.cyclic
                          else [(a, 0) for a in range(1, k + 1)])
            gk = P.generator_perms(k)
            gl = P.generator_perms(l)
            pl = [("p", j) for j in range(k + 1)]
            ql = [("q", j) for j in range(l + 1)]
            for x, y in itertools.product(range(P.dim(k)), range(P.dim(l))):
                p, q = P.basis_vector(k, x), P.basis_vector(l, y)
                for a, b in slot_pairs:
                    ref, ref_labels = P.glue(p, pl, a, q, ql, b)
                    variants = []
                    for name, g in gk.items():
                        if not P.cyclic and g[a] == 0:
                            continue
                        variants.append((f"{name} on P({k})",
                                         (P.act(k, g, p), _relabel(pl, g), g[a], q, ql, b)))
                    for name, g in gl.items():
                        variants.append((f"{name} on P({l})",
                                         (p, pl, a, P.act(l, g, q), _relabel(ql, g), g[b])))
                    if P.cyclic:
                        variants.append(("operand swap", (q, ql, b, p, pl, a)))
                    for what, args in variants:
                        vec, labels = P.glue(*args)
                        try:
                            aligned = P.align(vec, labels, ref_labels)
                        except OperadError:
                            out.append(f"gluing (k,l)=({k},{l}) slots ({a},{b}) basis ({x},{y}): "
                                       f"{what} permutes slots outside the local group")
                            continue
                        if aligned != ref:
                            out.append(f"gluing (k,l)=({k},{l}) slots ({a},{b}) basis ({x},{y}): "
                                       f"not invariant under {what}")
    return out


# -- documents ----------------------------------------------------------------

def _parse_scalar(x, F: Field):
    if isinstance(x, (int, Fraction)):
        return F.convert(x)
    return F.convert(str(x))


def operad_from_document(doc: dict, field: Field = QQ, validate: bool = True) -> OperadSpec:
    """Build an operad from its structured document and check every axiom."""
    try:
        name = str(doc["name"])
        flavor = str(doc["flavor"])
        cyclic = bool(doc["cyclic"])
        A = int(doc["max_arity"])
        comps_doc = doc["components"]
    except (KeyError, TypeError) as exc:
        raise OperadError(f"malformed operad document: missing {exc}") from exc
    if flavor not in ("symmetric", "nonsymmetric"):
        raise OperadError(f"malformed operad document: flavor {flavor!r}")
    if A < 2:
        raise OperadError("malformed operad document: max_arity must be >= 2")
    dims, labels = {}, {}
    for key, comp in comps_doc.items():
        n = int(key)
        if n < 2 or n > A:
            continue
        dims[n] = int(comp["dim"])
        labels[n] = [str(s) for s in comp.get("basis_labels", [f"e{n}_{j}" for j in range(dims[n])])]
    compositions = {}
    for entry in doc.get("compositions", []):
        k, l, i = int(entry["k"]), int(entry["l"]), int(entry["i"])
        if k + l - 1 > A or k > A or l > A:
            continue
        rows = entry["matrix"]
        dk, dl = dims.get(k, 0), dims.get(l, 0)
        if len(rows) != dims.get(k + l - 1, 0) or any(len(r) != dk * dl for r in rows):
            raise OperadError(f"malformed operad document: composition ({k},{l},{i}) shape")
        compositions[(k, l, i)] = [[[_parse_scalar(row[a * dl + b], field) for b in range(dl)]
                                    for a in range(dk)] for row in rows]
    generators = {}
    for key, gens in (doc.get("actions") or {}).items():
        n = int(key)
        if n > A:
            continue
        generators[n] = {str(g): [[_parse_scalar(x, field) for x in row] for row in M]
                         for g, M in gens.items()}
    P = OperadSpec(name, flavor, cyclic, A, dims, labels, compositions, generators, field)
    if validate:
        bad = check_axioms(P)
        if bad:
            raise OperadError(f"operad {name!r} violates {len(bad)} axiom instance(s): {bad[0]}", bad)
    return P


def load_operad(ref, max_arity: Optional[int] = None, field: Field = QQ,
                validate: bool = True) -> OperadSpec:
    """Load a built-in operad by name ("ass", "comm", "lie") or from a file path."""
    from graphcx.operad import builtins

    if isinstance(ref, OperadSpec):
        P = ref
        if max_arity is not None:
            P = P.truncate(max_arity)
        return P if P.field == field else P.to_field(field)
    if isinstance(ref, dict):
        doc = ref
    elif str(ref).lower() in builtins.BUILTIN:
        doc = builtins.BUILTIN[str(ref).lower()](max_arity or builtins.DEFAULT_MAX_ARITY)
    else:
        path = Path(ref)
        if not path.exists():
            raise OperadError(f"no built-in operad or file named {ref!r}")
        text = path.read_text()
        doc = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    if max_arity is not None:
        doc = dict(doc)
        doc["max_arity"] = min(int(doc["max_arity"]), max_arity)
    return operad_from_document(doc, field=field, validate=validate)
