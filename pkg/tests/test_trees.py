import itertools
import random
from fractions import Fraction

import pytest

from graphcx.exact import PrimeField, SparseMatrix, solve
from graphcx.operad import load_operad
from graphcx.operad.cobar import DualCollection, build_quotient_operad
from graphcx.trees import (ColoredTree, all_trees, build_tree_complex, catalan, encode,
                           enumerate_trees, inner_edge_count, koszul_concentration_check,
                           tree_boundary, universal_tree_cycle, vertices)


def double_factorial(m):
    out = 1
    while m > 1:
        out, m = out * m, m - 2
    return out


def schroeder(n):
    """Planar trees with n leaves, all vertices at least binary (little Schroeder numbers)."""
    s = [0, 1, 1]
    for m in range(3, n + 1):
        s.append(((6 * m - 9) * s[m - 1] - (m - 3) * s[m - 2]) // m)
    return s[n]


@pytest.mark.parametrize("n", range(2, 7))
def test_tree_counts(n):
    assert len(all_trees(n, "nonsymmetric")) == schroeder(n)
    # binary trees: Catalan (planar) and (2n-3)!! (abstract)
    assert len(enumerate_trees(n, n - 2, "nonsymmetric")) == catalan(n - 1)
    assert len(enumerate_trees(n, n - 2, "symmetric")) == double_factorial(2 * n - 3)


def test_encoding_and_degree():
    t = enumerate_trees(3, 1, "nonsymmetric")[0]
    assert encode(t) == "(v (v 1 2) 3)"
    assert inner_edge_count(t) == 1 and len(vertices(t)) == 2


def test_enumeration_range():
    with pytest.raises(ValueError):
        enumerate_trees(3, 2, "symmetric")


@pytest.mark.parametrize("name", ["ass", "comm", "lie"])
def test_d_squared(name):
    P = load_operad(name)
    for n in range(2, min(P.max_arity, 5) + 1):
        for orientation in ("koszul", "edges"):
            assert build_tree_complex(P, n, orientation).d_squared_is_zero()


def test_concentration():
    ass, comm, lie_ = load_operad("ass"), load_operad("comm"), load_operad("lie")
    for n in range(2, 6):
        r = koszul_concentration_check(ass, n)
        assert r["concentrated"] and r["top_dim"] == 1
    for n, top in zip(range(2, 5), [1, 2, 6]):
        r = koszul_concentration_check(comm, n)
        assert r["concentrated"] and r["top_dim"] == top
    for n in range(2, 5):
        r = koszul_concentration_check(lie_, n)
        assert r["concentrated"] and r["top_dim"] == 1


def test_edge_contraction_signs_ass_n3():
    P = load_operad("ass")
    t = ColoredTree(((1, 2), 3), (0, 0))
    u = ColoredTree((1, (2, 3)), (0, 0))
    corolla = ColoredTree((1, 2, 3), (0,))
    assert tree_boundary(P, t) == {corolla: 1}
    assert tree_boundary(P, u) == {corolla: -1}


# -- universal tree cycle ----------------------------------------------------------------

@pytest.fixture(scope="module")
def quotients():
    out = {}
    for name in ("ass", "comm", "lie"):
        P = load_operad(name, max_arity=4)
        out[name] = (P, build_quotient_operad(DualCollection(P), 4))
    return out


@pytest.mark.parametrize("name", ["ass", "comm", "lie"])
def test_universal_tree_cycle(quotients, name):
    P, Q = quotients[name]
    for n in range(2, 5):
        for i in range(n - 1):
            xi = universal_tree_cycle(P, Q, n, i)
            assert xi.is_cycle()
            assert xi.nonzero_terms() > 0


def test_free_operad_control(quotients):
    """Without the quotient the same sum is not a cycle."""
    P, Q = quotients["ass"]
    xi = universal_tree_cycle(P, Q, 3, 1)
    # in the free operad distinct trees are independent, so a nonzero
    # contraction coefficient survives
    coefs = [c for ct in xi.terms for c in tree_boundary(P, ct).values()]
    assert coefs and all(coefs)


def test_universal_tree_cycle_ass_n3(quotients):
    """Both binary trees map to the same class in Q(3); the corolla terms cancel."""
    P, Q = quotients["ass"]
    xi = universal_tree_cycle(P, Q, 3, 1)
    vals = list(xi.terms.values())
    assert len(vals) == 2 and vals[0] == vals[1] and any(vals[0])


def _inverse(M):
    d = len(M)
    A = SparseMatrix.from_dense(M)
    cols = [solve(A, [Fraction(int(r == j)) for r in range(d)]) for j in range(d)]
    return [list(r) for r in zip(*cols)]


def _to_reference(P, Q, xi_new, G, Ginv):
    """Express xi computed in a changed basis in the reference bases of C_i and Q(n)."""
    n, Qn = xi_new.n, xi_new.quotient
    img = []
    for j in range(Qn.dim(n)):
        m = Qn.representative(n, j)
        ar = [len(v) for v in vertices(m.tree)]
        vec = {}
        for beta in itertools.product(*[range(P.dim(k)) for k in ar]):
            c = Fraction(1)
            for k, a, b in zip(ar, m.colors, beta):
                c *= Ginv[k][a][b]  # dual basis transforms contragrediently
            if c:
                vec[ColoredTree(m.tree, beta)] = c
        img.append(Q.project(n, vec))
    out = {}
    for ct, q in xi_new.terms.items():
        qq = [sum(x * img[j][r] for j, x in enumerate(q)) for r in range(Q.dim(n))]
        ar = [len(v) for v in vertices(ct.tree)]
        for beta in itertools.product(*[range(P.dim(k)) for k in ar]):
            c = Fraction(1)
            for k, a, b in zip(ar, ct.colors, beta):
                c *= G[k][b][a]
            if c:
                acc = out.setdefault(ColoredTree(ct.tree, beta), [Fraction(0)] * Q.dim(n))
                for r in range(Q.dim(n)):
                    acc[r] += c * qq[r]
    return {k: v for k, v in out.items() if any(v)}


@pytest.mark.parametrize("name,seed", [("ass", 1), ("comm", 2), ("lie", 3), ("lie", 4)])
def test_universal_tree_cycle_basis_independent(quotients, name, seed):
    P, Q = quotients[name]
    rnd = random.Random(seed)
    G = {}
    for k in range(2, 5):
        d = P.dim(k)
        M = [[Fraction(rnd.randint(-2, 2)) for _ in range(d)] for _ in range(d)]
        for j in range(d):
            M[j][j] += 5
        G[k] = M
    Ginv = {k: _inverse(M) for k, M in G.items()}
    Pn = P.change_basis(G)
    Qn = build_quotient_operad(DualCollection(Pn), 4)
    for n in (3, 4):
        for i in range(n - 1):
            ref = {k: v for k, v in universal_tree_cycle(P, Q, n, i).terms.items() if any(v)}
            assert _to_reference(P, Q, universal_tree_cycle(Pn, Qn, n, i), G, Ginv) == ref


def test_truncation_errors(quotients):
    P, Q = quotients["ass"]
    with pytest.raises(ValueError):
        universal_tree_cycle(P, Q, 5, 0)
    with pytest.raises(ValueError):
        build_tree_complex(load_operad("ass", max_arity=3), 4)


def test_prime_field_tree_homology():
    for name in ("ass", "comm"):
        for n in range(2, 5):
            a = build_tree_complex(load_operad(name), n).homology_dims()
            b = build_tree_complex(load_operad(name, field=PrimeField(101)), n).homology_dims()
            assert a == b
