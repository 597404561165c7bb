import random

import pytest

from modinv.field import make_field
from modinv.linalg import LinSolver, Mat, SparseEchelon, quotient_basis, rank, reduce_mat, solve

F2 = make_field(2)
F3 = make_field(3)
F4 = make_field(2, 2)


def random_mat(rng, field, n, m):
    return Mat.from_rows(field, m, [[rng.randrange(field.q) for _ in range(m)] for _ in range(n)])


def test_identity_and_mul():
    for f in (F2, F3, F4):
        i3 = Mat.identity(f, 3)
        m = Mat.from_rows(f, 3, [[1, 0, 1], [0, 1, 1], [1, 1, 0]])
        assert i3.mul(m) == m
        assert m.mul(i3) == m


def test_reduce_known_rank_f2():
    m = Mat.from_rows(F2, 3, [[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    red = reduce_mat(m)
    assert red.rank == 2
    assert red.pivots == (0, 1)
    # kernel column must be (1,1,1)
    assert red.kernel.ncols == 1
    assert red.kernel.col_list(0) == [1, 1, 1]


def test_reduce_kernel_and_image_properties():
    rng = random.Random(99)
    for f in (F2, F3, F4):
        for _ in range(60):
            n, m = rng.randrange(1, 7), rng.randrange(1, 7)
            M = random_mat(rng, f, n, m)
            red = reduce_mat(M)
            assert red.rank + red.kernel.ncols == m
            assert red.image.ncols == red.rank
            for j in range(red.kernel.ncols):
                assert all(v == 0 for v in M.apply(red.kernel.col_list(j)))
            # rref rank equals rank of original
            assert rank(red.rref) == red.rank
            assert rank(M.transpose()) == red.rank


def test_kernel_basis_is_canonical_for_the_subspace():
    # two different matrices with the same kernel produce the same kernel basis
    m1 = Mat.from_rows(F3, 3, [[1, 2, 0], [0, 0, 1]])
    m2 = Mat.from_rows(F3, 3, [[2, 4, 0], [1, 2, 1], [1, 2, 2]])
    k1 = reduce_mat(m1).kernel
    k2 = reduce_mat(m2).kernel
    assert k1.to_rows() == k2.to_rows()


def test_solve_and_linsolver():
    rng = random.Random(4242)
    for f in (F2, F3, F4):
        for _ in range(40):
            n, m = rng.randrange(1, 7), rng.randrange(1, 7)
            M = random_mat(rng, f, n, m)
            x = [rng.randrange(f.q) for _ in range(m)]
            b = M.apply(x)
            got = solve(M, b)
            assert got is not None
            assert M.apply(got) == b
            ls = LinSolver(M)
            assert ls.solve(b) is not None
            assert M.apply(ls.solve(b)) == b


def test_solve_reports_no_solution():
    M = Mat.from_rows(F2, 2, [[1, 0], [1, 0], [0, 0]])
    assert solve(M, [1, 1, 1]) is None
    assert solve(M, [1, 1, 0]) == [1, 0]


def test_quotient_basis_projection():
    rng = random.Random(5)
    for f in (F2, F3):
        for _ in range(40):
            n = rng.randrange(1, 8)
            k = rng.randrange(0, n + 1)
            # build k independent columns by taking a random matrix of rank k
            while True:
                cand = random_mat(rng, f, n, k)
                if rank(cand) == k:
                    break
            reps, project = quotient_basis(cand, n)
            assert reps.ncols == n - k
            # projection kills the subspace
            for j in range(k):
                assert all(v == 0 for v in project(cand.col_list(j)))
            # projection is the identity on the representatives
            for j in range(reps.ncols):
                coords = project(reps.col_list(j))
                expect = [0] * reps.ncols
                expect[j] = 1
                assert coords == expect
            # v - reps*project(v) always lands in the subspace
            if k:
                ls = LinSolver(cand)
                for _ in range(5):
                    v = [rng.randrange(f.q) for _ in range(n)]
                    coords = project(v)
                    lift = reps.apply(coords) if reps.ncols else [0] * n
                    diff = [f.sub(a, b) for a, b in zip(v, lift)]
                    assert ls.solve(diff) is not None


def test_quotient_basis_rejects_dependent_columns():
    m = Mat.from_rows(F2, 2, [[1, 1], [1, 1], [0, 0]])
    with pytest.raises(ValueError):
        quotient_basis(m, 3)


def test_sparse_echelon_matches_dense_rank():
    rng = random.Random(31)
    for f in (F2, F3, F4):
        for _ in range(30):
            n, m = rng.randrange(1, 8), rng.randrange(1, 8)
            M = random_mat(rng, f, n, m)
            ech = SparseEchelon(f)
            for i in range(n):
                ech.insert(list(enumerate(M.row_list(i))))
            assert ech.dim == rank(M)
            # every row of M is contained in its own row space
            for i in range(n):
                assert ech.contains(list(enumerate(M.row_list(i))))


def test_sparse_echelon_membership():
    ech = SparseEchelon(F3)
    ech.insert([(0, 1), (2, 2)])
    ech.insert([(1, 1)])
    assert ech.contains([(0, 2), (1, 1), (2, 1)])
    assert not ech.contains([(2, 1)])
    assert ech.dim == 2


def test_mat_apply_and_transpose_consistency():
    rng = random.Random(77)
    for f in (F2, F3, F4):
        M = random_mat(rng, f, 4, 5)
        v = [rng.randrange(f.q) for _ in range(5)]
        direct = M.apply(v)
        via_cols = [0, 0, 0, 0]
        for j, c in enumerate(v):
            if c:
                for i, e in enumerate(M.col_list(j)):
                    via_cols[i] = f.add(via_cols[i], f.mul(e, c))
        assert direct == via_cols
        assert M.transpose().transpose() == M
