"""Free-Lie-algebra oracle producing the structure constants of cyclic Lie.

Lie(n) is realized inside the free associative algebra on x_1..x_n as the
span of multilinear Lie polynomials, with basis the right-normed brackets
[x_s1, [x_s2, ..., [x_s(n-1), x_n]]] for s a permutation of 1..n-1.
Compositions substitute one polynomial into a letter of another.  The
cyclic action comes from reading a polynomial p as the cyclic word
polynomial x_0 p (the trace pairing), relabelling letters and rotating 0
back to the front.

Running ``python -m graphcx.operad.lie`` rewrites ``data/lie.json``.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Tuple

from graphcx.exact import QQ, SparseMatrix, solve
from graphcx.operad.core import rotation, transposition

Poly = Dict[Tuple[int, ...], Fraction]


def bracket(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for u, x in a.items():
        for v, y in b.items():
            out[u + v] = out.get(u + v, 0) + x * y
            out[v + u] = out.get(v + u, 0) - x * y
    return {w: c for w, c in out.items() if c}


def letter(j: int) -> Poly:
    return {(j,): Fraction(1)}


def right_normed(seq) -> Poly:
    p = letter(seq[-1])
    for j in reversed(seq[:-1]):
        p = bracket(letter(j), p)
    return p


def basis(n: int) -> List[Tuple[Tuple[int, ...], Poly]]:
    """(label sequence, polynomial) for the right-normed basis of Lie(n)."""
    return [(s + (n,), right_normed(s + (n,))) for s in itertools.permutations(range(1, n))]


def label(seq) -> str:
    s = str(seq[-1])
    for j in reversed(seq[:-1]):
        s = f"[{j},{s}]"
    return s


class _Coordinates:
    """Exact coordinates of multilinear Lie polynomials in the basis of Lie(n)."""

    def __init__(self, n: int):
        self.n = n
        self.basis = basis(n)
        self.words = sorted({w for _, p in self.basis for w in p})
        self.windex = {w: j for j, w in enumerate(self.words)}
        ent = {(self.windex[w], b): c for b, (_, p) in enumerate(self.basis) for w, c in p.items()}
        self.matrix = SparseMatrix(len(self.words), len(self.basis), ent, QQ)

    def __call__(self, p: Poly) -> List[Fraction]:
        rhs = [Fraction(0)] * len(self.words)
        for w, c in p.items():
            if w not in self.windex:
                raise ValueError(f"word {w} is not in the span of Lie({self.n})")
            rhs[self.windex[w]] += c
        x = solve(self.matrix, rhs)
        if x is None:
            raise ValueError("polynomial is not a Lie polynomial")
        return x


def substitute(p: Poly, i: int, q: Poly, l: int) -> Poly:
    """p o_i q on polynomials."""
    out: Poly = {}
    for u, x in p.items():
        for v, y in q.items():
            w = []
            for a in u:
                if a < i:
                    w.append(a)
                elif a == i:
                    w.extend(b + i - 1 for b in v)
                else:
                    w.append(a + l - 1)
            w = tuple(w)
            out[w] = out.get(w, 0) + x * y
    return {w: c for w, c in out.items() if c}


def act(p: Poly, perm) -> Poly:
    """Slot perm(j) of the result plays the role of slot j of p (slot 0 = output)."""
    out: Poly = {}
    for w, c in p.items():
        cyc = [perm[0]] + [perm[a] for a in w]
        r = cyc.index(0)
        lin = tuple(cyc[r + 1:] + cyc[:r])
        out[lin] = out.get(lin, 0) + c
    return {w: c for w, c in out.items() if c}


def lie_document(max_arity: int = 4) -> dict:
    coords = {n: _Coordinates(n) for n in range(2, max_arity + 1)}
    polys = {n: [p for _, p in coords[n].basis] for n in coords}
    comps = []
    for k in range(2, max_arity + 1):
        for l in range(2, max_arity + 2 - k):
            for i in range(1, k + 1):
                cols = [coords[k + l - 1](substitute(p, i, q, l)) for p in polys[k] for q in polys[l]]
                rows = [[str(col[c]) for col in cols] for c in range(len(polys[k + l - 1]))]
                comps.append({"k": k, "l": l, "i": i, "matrix": rows})
    actions = {}
    for n in range(2, max_arity + 1):
        gens = {f"s{j}": transposition(n, j) for j in range(1, n)}
        gens["rotation"] = rotation(n)
        mats = {}
        for g, perm in gens.items():
            cols = [coords[n](act(p, perm)) for p in polys[n]]
            mats[g] = [[str(col[r]) for col in cols] for r in range(len(polys[n]))]
        actions[str(n)] = mats
    return {
        "name": "lie",
        "flavor": "symmetric",
        "cyclic": True,
        "max_arity": max_arity,
        "components": {str(n): {"dim": len(polys[n]),
                                "basis_labels": [label(s) for s, _ in coords[n].basis]}
                       for n in range(2, max_arity + 1)},
        "compositions": comps,
        "actions": actions,
    }


def write_data_file(path: Path = None, max_arity: int = 4) -> Path:
    path = path or Path(__file__).parent / "data" / "lie.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(lie_document(max_arity), indent=1, sort_keys=True) + "\n")
    return path


if __name__ == "__main__":
    print(write_data_file())
