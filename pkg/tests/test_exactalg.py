import random

import pytest

from toric_cobordism.exactalg import (
    DimensionMismatch,
    Gf2Matrix,
    as_matrix,
    det_sign,
    determinant,
    gf2_rank,
    identity_matrix,
    invariant_factors,
    is_direct_summand,
    mat_mul,
    permutation_sign,
    rational_inverse,
    smith_normal_form,
    solve_gf2,
    solve_rational,
)


def reversal(m):
    return [[1 if i + j == m - 1 else 0 for j in range(m)] for i in range(m)]


class TestSmith:
    def test_identity(self):
        s = smith_normal_form(identity_matrix(3))
        assert s.rank == 3
        assert s.d == identity_matrix(3)

    def test_dependent_rows_rank_two(self):
        # the first three table vectors for n=4: row0 + row2 == row1
        s = smith_normal_form([(1, 0, 0), (1, 1, 0), (0, 1, 0)])
        assert s.rank == 2
        assert s.invariant_factors == (1, 1)

    def test_recomposition_random(self):
        rng = random.Random(12345)
        for _ in range(200):
            nr, nc = rng.randint(1, 5), rng.randint(1, 5)
            m = as_matrix(
                [[rng.randint(-9, 9) for _ in range(nc)] for _ in range(nr)]
            )
            s = smith_normal_form(m)
            assert mat_mul(mat_mul(s.u, m), s.v) == s.d
            assert abs(determinant(s.u)) == 1
            assert abs(determinant(s.v)) == 1
            diag = [s.d[i][i] for i in range(min(nr, nc))]
            assert all(x >= 0 for x in diag)
            for a, b in zip(diag, diag[1:]):
                if b != 0:
                    assert a != 0 and b % a == 0
            assert tuple(x for x in diag if x) == invariant_factors(m)

    def test_sparse_matches_dense(self):
        rng = random.Random(99)
        for _ in range(50):
            nr, nc = rng.randint(1, 6), rng.randint(1, 6)
            rows = [
                {j: rng.randint(-4, 4) for j in range(nc) if rng.random() < 0.5}
                for _ in range(nr)
            ]
            dense = [[rows[i].get(j, 0) for j in range(nc)] for i in range(nr)]
            want = smith_normal_form(dense).invariant_factors if any(
                any(r) for r in dense
            ) else ()
            assert invariant_factors(rows, ncols=nc) == want

    def test_torsion_example(self):
        s = smith_normal_form([[2, 0], [0, 3]])
        assert s.invariant_factors == (1, 6)

    def test_empty_rejected(self):
        with pytest.raises(DimensionMismatch):
            smith_normal_form([])


class TestDirectSummand:
    def test_unimodular_triple(self):
        assert is_direct_summand([(1, 0, 0), (1, 1, 0), (0, 0, 1)], 3)

    def test_index_two_sublattice(self):
        assert not is_direct_summand([(2, 0), (0, 1)], 2)

    def test_dependent_triple(self):
        assert not is_direct_summand([(1, 0, 0), (1, 1, 0), (0, 1, 0)], 3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            is_direct_summand([(1, 0)], 3)

    def test_invariance_under_reordering_and_negation(self):
        rng = random.Random(7)
        vectors = [(1, 2, 0), (0, 1, 1)]
        assert is_direct_summand(vectors, 3)
        for _ in range(20):
            perm = vectors[:]
            rng.shuffle(perm)
            flipped = [
                tuple(-x for x in v) if rng.random() < 0.5 else v for v in perm
            ]
            assert is_direct_summand(flipped, 3)

    def test_invariance_under_unimodular_change(self):
        u = ((1, 1, 0), (0, 1, 0), (1, 0, 1))
        assert abs(determinant(u)) == 1
        vectors = [(1, 0, 0), (0, 0, 1)]
        moved = [tuple(sum(u[i][j] * v[j] for j in range(3)) for i in range(3)) for v in vectors]
        assert is_direct_summand(vectors, 3) == is_direct_summand(moved, 3)


class TestGf2:
    def test_identity_all_ones(self):
        assert solve_gf2(identity_matrix(4), [1, 1, 1, 1]) == (1, 1, 1, 1)

    def test_no_solution(self):
        rows = [(1, 0), (0, 1), (1, 1)]
        assert solve_gf2(rows, [1, 1, 1]) is None
        # exhaustive confirmation over GF(2)^2
        for x0 in (0, 1):
            for x1 in (0, 1):
                images = [(x0), (x1), (x0 + x1) % 2]
                assert images != [1, 1, 1]

    def test_repeated_rows(self):
        rows = [(1, 0), (0, 1), (1, 0), (0, 1)]
        assert solve_gf2(rows, [1, 1, 1, 1]) == (1, 1)

    def test_solution_always_verifies(self):
        rng = random.Random(3)
        for _ in range(100):
            nr, nc = rng.randint(1, 6), rng.randint(1, 6)
            rows = [
                tuple(rng.randint(0, 1) for _ in range(nc)) for _ in range(nr)
            ]
            b = [rng.randint(0, 1) for _ in range(nr)]
            x = solve_gf2(rows, b)
            if x is not None:
                for row, bv in zip(rows, b):
                    assert sum(r * v for r, v in zip(row, x)) % 2 == bv
            elif nc <= 10:
                for cand in range(1 << nc):
                    xs = [(cand >> j) & 1 for j in range(nc)]
                    assert any(
                        sum(r * v for r, v in zip(row, xs)) % 2 != bv
                        for row, bv in zip(rows, b)
                    )

    def test_rank_and_inverse(self):
        m = Gf2Matrix.from_vectors([(1, 1, 0), (0, 1, 1), (0, 0, 1)])
        assert m.rank() == 3
        inv = m.inverse()
        assert inv is not None
        assert m.mul(inv).row_tuples() == tuple(
            tuple(1 if i == j else 0 for j in range(3)) for i in range(3)
        )
        assert gf2_rank([(1, 1), (1, 1)]) == 1


class TestPermutationSign:
    def test_identity(self):
        assert permutation_sign((0, 1, 2, 3)) == 1

    def test_rho_like_double_swap(self):
        # (0 3)(1 4) fixing 2
        assert permutation_sign((3, 4, 2, 0, 1)) == 1

    def test_single_swap(self):
        assert permutation_sign((1, 0, 2)) == -1

    def test_not_bijection(self):
        with pytest.raises(ValueError):
            permutation_sign((0, 0, 1))

    def test_multiplicative(self):
        rng = random.Random(11)
        for _ in range(50):
            m = rng.randint(1, 8)
            p = list(range(m))
            q = list(range(m))
            rng.shuffle(p)
            rng.shuffle(q)
            comp = [p[q[i]] for i in range(m)]
            assert permutation_sign(comp) == permutation_sign(p) * permutation_sign(q)


class TestDeterminant:
    def test_reversal_3x3(self):
        assert det_sign(reversal(3)) == -1

    def test_reversal_5x5(self):
        assert det_sign(reversal(5)) == 1

    def test_identity(self):
        assert det_sign(identity_matrix(4)) == 1

    def test_singular(self):
        assert det_sign([[1, 2], [2, 4]]) == 0

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            det_sign([[1, 2, 3], [4, 5, 6]])

    def test_matches_cofactor_small(self):
        rng = random.Random(5)
        for _ in range(100):
            m = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
            cof = (
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            )
            assert determinant(m) == cof


class TestRational:
    def test_solve_unique(self):
        assert solve_rational([[2, 0], [0, 4]], [1, 1]) == (
            pytest.approx(0.5),
            pytest.approx(0.25),
        )

    def test_solve_singular(self):
        assert solve_rational([[1, 1], [2, 2]], [1, 2]) is None

    def test_inverse_roundtrip(self):
        inv = rational_inverse([[1, 1], [0, 1]])
        assert inv == [[1, -1], [0, 1]]
