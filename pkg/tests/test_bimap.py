"""Hom pairs of matrix systems: identities, brute-force counts, nuclei."""

import itertools
import random
from collections import Counter

import pytest

from kinderlab import bimap as bm
from kinderlab.errors import InvalidConfigError
from kinderlab.gf import make_field
from kinderlab.linalg import Matrix, Subspace

F2 = make_field(2, 1)
F3 = make_field(3, 1)
F4 = make_field(2, 2)


def test_end_of_identity_system():
    E = bm.end_space(bm.MatrixSystem.from_matrices([Matrix.identity(F2, 2)]))
    assert E.dim_k == 4 and E.dim_fp == 4


def test_empty_system():
    empty = bm.MatrixSystem(F2, (1, 1), [])
    assert bm.hom_space(empty, empty).dim_k == 2


def test_witness_frozen_shape():
    W12 = bm.witness_system(1, 2, F2)
    assert [m.rows for m in W12] == [((1, 0),), ((0, 1),), ((0, 1),)]
    assert bm.end_space(W12).dim_k == 1
    W23 = bm.witness_system(2, 3, F2)
    assert len(W23) == 3 and W23.shape == (2, 3)


@pytest.mark.parametrize("K", [F2, F3, F4], ids=["F2", "F3", "F4"])
def test_witness_end_scalar(K):
    for n in range(1, 4):
        for m in range(1, n + 1):
            W = bm.witness_system(m, n, K)
            assert bm.end_space(W).dim_k == 1
            assert bm.hom_dim(W, W) == 1


def test_witness_no_pm_transpose_homs():
    for K in (F2, F3):
        for m, n in ((1, 2), (1, 3), (3, 3)):
            W = bm.witness_system(m, n, K)
            for sign in (1, -1):
                assert bm.hom_space(W, W.transpose(), sign).dim_k == 0


def test_hom_basis_satisfies_equations():
    rng = random.Random(12)
    for K in (F2, F3, F4):
        phi = bm.MatrixSystem.random(K, (2, 3), 3, rng)
        ups = bm.MatrixSystem.random(K, (2, 2), 3, rng)
        for sign in (1, -1):
            H = bm.hom_space(phi, ups, sign)
            for A, B in H.basis:
                for P, U in zip(phi.mats, ups.mats):
                    left = A.mul(P)
                    right = U.mul(B.transpose())
                    if sign == -1:
                        right = right.neg()
                    assert left == right


def _brute_hom_count(phi, ups, sign):
    ctx = phi.ctx
    q = ctx.order
    s, b = phi.shape
    a, t = ups.shape
    cnt = Counter()
    for entries in itertools.product(range(q), repeat=a * s):
        A = Matrix(ctx, [entries[i * s:(i + 1) * s] for i in range(a)])
        key = tuple(x for P in phi.mats for row in A.mul(P).rows for x in row)
        cnt[key] += 1
    total = 0
    for entries in itertools.product(range(q), repeat=b * t):
        B = Matrix(ctx, [entries[i * t:(i + 1) * t] for i in range(b)])
        out = []
        for U in ups.mats:
            M = U.mul(B.transpose())
            if sign == -1:
                M = M.neg()
            out.extend(x for row in M.rows for x in row)
        total += cnt.get(tuple(out), 0)
    return total


@pytest.mark.parametrize("q,shapes", [(2, ((1, 2, 1, 2), (2, 2, 2, 2))), (3, ((1, 2, 1, 2),))])
def test_hom_dim_vs_bruteforce(q, shapes):
    K = make_field(q, 1)
    rng = random.Random(q)
    for a, s, b, t in shapes:
        for sign in (1, -1):
            phi = bm.MatrixSystem.random(K, (s, b), 2, rng)
            ups = bm.MatrixSystem.random(K, (a, t), 2, rng)
            d = bm.hom_space(phi, ups, sign).dim_fp
            assert _brute_hom_count(phi, ups, sign) == q**d


def test_scalar_pairs_in_end():
    rng = random.Random(3)
    for K in (F2, F3, F4):
        phi = bm.MatrixSystem.random(K, (2, 2), 3, rng)
        E = bm.end_space(phi)
        lam = K.random_nonzero(rng)
        A = Matrix.identity(K, 2).scale(lam)
        assert E.contains(A, A)


def test_hom_functoriality():
    rng = random.Random(6)
    P = bm.MatrixSystem.random(F2, (2, 2), 2, rng)
    U = bm.MatrixSystem.random(F2, (2, 2), 2, rng)
    X = bm.MatrixSystem.random(F2, (2, 2), 2, rng)
    h1, h2, h3 = bm.hom_space(P, U), bm.hom_space(U, X), bm.hom_space(P, X)
    for A1, B1 in h1.basis:
        for A2, B2 in h2.basis:
            assert h3.contains(A2.mul(A1), B1.mul(B2))


def test_dim_fp_scaling_extension_field():
    rng = random.Random(14)
    phi = bm.MatrixSystem.random(F4, (2, 2), 2, rng)
    E = bm.end_space(phi)
    assert E.dim_fp == 2 * E.dim_k


def test_hom_dim_fast_matches():
    rng = random.Random(21)
    for _ in range(10):
        phi = bm.MatrixSystem.random(F3, (2, 2), 2, rng)
        ups = bm.MatrixSystem.random(F3, (2, 2), 2, rng)
        assert bm.hom_dim(phi, ups, fast=True) == bm.hom_space(phi, ups).dim_k


def test_lambda_build_antisymmetric():
    rng = random.Random(7)
    phi = bm.MatrixSystem.random(F3, (2, 3), 4, rng)
    lam = bm.lambda_build(phi)
    assert lam.shape == (5, 5)
    for L in lam:
        assert L.transpose() == L.neg()


def test_matrix_multiplication_bimap():
    mm = bm.matrix_multiplication_bimap(F2, 2, 2, 1)
    rng = random.Random(1)

    def direct(u, v):
        Xm = Matrix(F2, [u[0:2], u[2:4]])
        Ym = Matrix(F2, [v[0:1], v[1:2]])
        return tuple(x for row in Xm.mul(Ym).rows for x in row)

    for _ in range(50):
        u = tuple(rng.randrange(2) for _ in range(4))
        v = tuple(rng.randrange(2) for _ in range(2))
        assert mm.evaluate(u, v) == direct(u, v)


def test_right_nucleus():
    mm = bm.matrix_multiplication_bimap(F2, 2, 2, 1)
    nuc = bm.right_nucleus(mm, Subspace.full(F2, mm.left_dim))
    assert nuc.dim_k == 1
    nuc0 = bm.right_nucleus(mm, Subspace.zero(F2, mm.left_dim))
    assert nuc0.dim_k == mm.right_dim**2 + mm.target_dim**2


def test_system_validation():
    with pytest.raises(InvalidConfigError):
        bm.MatrixSystem(F2, (2, 2), [Matrix.identity(F2, 3)])
    with pytest.raises(InvalidConfigError):
        bm.MatrixSystem.from_matrices([])
    rng = random.Random(0)
    phi2 = bm.MatrixSystem.random(F2, (2, 2), 2, rng)
    phi3 = bm.MatrixSystem.random(F3, (2, 2), 2, rng)
    with pytest.raises(InvalidConfigError):
        bm.hom_space(phi2, phi3)
