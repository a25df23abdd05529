"""Exact integer, rational and GF(2) linear algebra.

All arithmetic is done over arbitrary precision integers,
``fractions.Fraction`` or bit packed GF(2) rows.  No floating point
appears anywhere in the package; every result of this module is exact
and deterministic, and all functions are pure (safe to call
concurrently).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Matrix = tuple[tuple[int, ...], ...]


class DimensionMismatch(ValueError):
    """Vector or matrix dimensions are incompatible."""


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    if m:
        width = len(m[0])
        if any(len(r) != width for r in m):
            raise DimensionMismatch("ragged rows")
    return m


def identity_matrix(k: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return ()
    if len(a[0]) != len(b):
        raise DimensionMismatch(f"{len(a[0])} columns times {len(b)} rows")
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, x: Sequence[int]) -> tuple[int, ...]:
    if a and len(a[0]) != len(x):
        raise DimensionMismatch("matrix/vector size")
    return tuple(sum(c * v for c, v in zip(row, x)) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def determinant(m: Iterable[Iterable[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    a = [list(map(int, row)) for row in m]
    k = len(a)
    if any(len(row) != k for row in a):
        raise DimensionMismatch("non-square matrix")
    if k == 0:
        return 1
    sign = 1
    prev = 1
    for t in range(k - 1):
        if a[t][t] == 0:
            for i in range(t + 1, k):
                if a[i][t] != 0:
                    a[t], a[i] = a[i], a[t]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[t][t]
        for i in range(t + 1, k):
            for j in range(t + 1, k):
                a[i][j] = (a[i][j] * piv - a[i][t] * a[t][j]) // prev
            a[i][t] = 0
        prev = piv
    return sign * a[k - 1][k - 1]


def det_sign(m: Iterable[Iterable[int]]) -> int:
    """Sign of the exact determinant: +1, 0 or -1."""
    d = determinant(m)
    return (d > 0) - (d < 0)


def is_unimodular(m: Iterable[Iterable[int]]) -> bool:
    try:
        return abs(determinant(m)) == 1
    except DimensionMismatch:
        return False


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------

def permutation_sign(p: Sequence[int]) -> int:
    """Sign of a permutation given in one line notation on {0..m-1}.

    Raises ValueError if ``p`` is not a bijection.
    """
    m = len(p)
    seen = [False] * m
    for x in p:
        if not isinstance(x, int) or not 0 <= x < m or seen[x]:
            raise ValueError("not a bijection on 0..m-1")
        seen[x] = True
    sign = 1
    visited = [False] * m
    for start in range(m):
        if visited[start]:
            continue
        length = 0
        j = start
        while not visited[j]:
            visited[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmithDecomposition:
    """U @ M @ V == D with U, V unimodular and D diagonal.

    The diagonal of ``d`` is nonnegative and each entry divides the next;
    ``rank`` is the number of nonzero diagonal entries.
    """

    d: Matrix
    u: Matrix
    v: Matrix
    rank: int

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(
            self.d[i][i] for i in range(min(len(self.d), len(self.d[0]) if self.d else 0))
            if self.d[i][i] != 0
        )


def smith_normal_form(m: Iterable[Iterable[int]]) -> SmithDecomposition:
    """Full Smith decomposition of a nonempty integer matrix.

    Pivots are chosen with smallest nonzero absolute value, which keeps
    intermediate entries small on the dense matrices this package
    produces.
    """
    a = [list(map(int, row)) for row in m]
    if not a or not a[0]:
        raise DimensionMismatch("empty matrix")
    nr, nc = len(a), len(a[0])
    if any(len(row) != nc for row in a):
        raise DimensionMismatch("ragged rows")
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        arow, srow = a[dst], a[src]
        for j in range(nc):
            arow[j] += q * srow[j]
        urow, usrc = u[dst], u[src]
        for j in range(nr):
            urow[j] += q * usrc[j]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    t = 0
    limit = min(nr, nc)
    while t < limit:
        # locate pivot: smallest nonzero absolute value in the submatrix
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x != 0 and (piv is None or abs(x) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        if piv[0] != t:
            swap_rows(t, piv[0])
        if piv[1] != t:
            swap_cols(t, piv[1])

        while True:
            # clear the pivot column
            restart = False
            for i in range(t + 1, nr):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t] != 0:
                        # remainder is strictly smaller: promote it
                        swap_rows(t, i)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, nc):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        restart = True
                        break
            if restart:
                continue
            # enforce divisibility: pivot must divide every remaining entry
            done = True
            for i in range(t + 1, nr):
                row = a[i]
                for j in range(t + 1, nc):
                    if row[j] % a[t][t] != 0:
                        add_row(t, i, 1)
                        done = False
                        break
                if not done:
                    break
            if done:
                break
        if a[t][t] < 0:
            for j in range(nc):
                a[t][j] = -a[t][j]
            for j in range(nr):
                u[t][j] = -u[t][j]
        t += 1

    rank = sum(1 for i in range(limit) if a[i][i] != 0)
    return SmithDecomposition(
        d=as_matrix(a), u=as_matrix(u), v=as_matrix(v), rank=rank
    )


def invariant_factors(m: Iterable[Iterable[int]], ncols: int | None = None) -> tuple[int, ...]:
    """Nonzero invariant factors of an integer matrix, without transforms.

    Accepts dense rows or sparse rows (dicts mapping column -> value, in
    which case ``ncols`` is required).  Unit pivots are eliminated first
    with a Markowitz fill heuristic; whatever nonunit core remains is
    finished by the dense routine.  Suitable for the large sparse
    boundary matrices of chain complexes.
    """
    rows: dict[int, dict[int, int]] = {}
    width = 0
    dense_input = True
    for i, row in enumerate(m):
        if isinstance(row, dict):
            dense_input = False
            r = {j: int(x) for j, x in row.items() if x != 0}
        else:
            seq = list(row)
            width = max(width, len(seq))
            r = {j: int(x) for j, x in enumerate(seq) if x != 0}
        if r:
            rows[i] = r
    if not dense_input:
        if ncols is None:
            raise DimensionMismatch("sparse input requires ncols")
        width = ncols
    if not rows:
        return ()

    cols: dict[int, set[int]] = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)

    units = 0
    while True:
        best = None
        best_score = None
        for i, r in rows.items():
            rlen = len(r) - 1
            for j, x in r.items():
                if x in (1, -1):
                    score = rlen * (len(cols[j]) - 1)
                    if best_score is None or score < best_score:
                        best, best_score = (i, j), score
                        if score == 0:
                            break
            if best_score == 0:
                break
        if best is None:
            break
        pi, pj = best
        pval = rows[pi][pj]
        prow = rows.pop(pi)
        for j in prow:
            cols[j].discard(pi)
            if not cols[j]:
                del cols[j]
        targets = list(cols.get(pj, ()))
        for i in targets:
            r = rows[i]
            factor = r[pj] * pval  # pval is +-1 so this is r[pj]/pval
            for j, x in prow.items():
                if j == pj:
                    continue
                new = r.get(j, 0) - factor * x
                if new == 0:
                    if j in r:
                        del r[j]
                        cols[j].discard(i)
                        if not cols[j]:
                            del cols[j]
                else:
                    if j not in r:
                        cols.setdefault(j, set()).add(i)
                    r[j] = new
            del r[pj]
            cols[pj].discard(i)
            if not rows[i]:
                del rows[i]
        if pj in cols and not cols[pj]:
            del cols[pj]
        units += 1

    factors = [1] * units
    if rows:
        # dense finish on the (small) nonunit core
        live_cols = sorted({j for r in rows.values() for j in r})
        index = {j: k for k, j in enumerate(live_cols)}
        dense = [
            [0] * len(live_cols) for _ in range(len(rows))
        ]
        for k, (_, r) in enumerate(sorted(rows.items())):
            for j, x in r.items():
                dense[k][index[j]] = x
        core = smith_normal_form(dense)
        factors.extend(core.invariant_factors)
    return tuple(factors)


def integer_rank(m: Iterable[Iterable[int]], ncols: int | None = None) -> int:
    return len(invariant_factors(m, ncols=ncols))


def is_direct_summand(vectors: Sequence[Sequence[int]], ambient_rank: int) -> bool:
    """True iff the vectors span a direct summand of Z^ambient_rank of
    rank equal to the number of vectors (all invariant factors 1)."""
    vecs = [tuple(int(x) for x in v) for v in vectors]
    for v in vecs:
        if len(v) != ambient_rank:
            raise DimensionMismatch(
                f"vector length {len(v)} != ambient rank {ambient_rank}"
            )
    if not vecs:
        return True
    if len(vecs) > ambient_rank:
        return False
    fs = invariant_factors(vecs)
    return len(fs) == len(vecs) and all(f == 1 for f in fs)


# ---------------------------------------------------------------------------
# GF(2)
# ---------------------------------------------------------------------------

class Gf2Matrix:
    """Dense GF(2) matrix with bit packed rows (bit j = column j)."""

    __slots__ = ("ncols", "rows")

    def __init__(self, ncols: int, rows: Iterable[int]):
        self.ncols = ncols
        mask = (1 << ncols) - 1
        self.rows = [int(r) & mask for r in rows]

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence[int]], ncols: int | None = None) -> "Gf2Matrix":
        vecs = [tuple(int(x) % 2 for x in v) for v in vectors]
        if ncols is None:
            if not vecs:
                raise DimensionMismatch("cannot infer width of empty matrix")
            ncols = len(vecs[0])
        for v in vecs:
            if len(v) != ncols:
                raise DimensionMismatch("ragged GF(2) rows")
        rows = [sum(bit << j for j, bit in enumerate(v)) for v in vecs]
        return cls(ncols, rows)

    def row_tuples(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple((r >> j) & 1 for j in range(self.ncols)) for r in self.rows
        )

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def rank(self) -> int:
        rows = [r for r in self.rows if r]
        rank = 0
        for col in range(self.ncols):
            bit = 1 << col
            piv = next((k for k in range(rank, len(rows)) if rows[k] & bit), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            for k in range(len(rows)):
                if k != rank and rows[k] & bit:
                    rows[k] ^= rows[rank]
            rank += 1
            if rank == len(rows):
                break
        return rank

    def solve(self, b: Sequence[int]) -> Optional[tuple[int, ...]]:
        """One solution x of A x = b over GF(2), or None.

        Free variables are set to zero; the returned solution is
        re-checked by multiplication before being returned.
        """
        if len(b) != self.nrows:
            raise DimensionMismatch("rhs length != number of rows")
        bbit = 1 << self.ncols
        aug = [r | (bbit if int(bv) % 2 else 0) for r, bv in zip(self.rows, b)]
        pivots: list[int] = []
        rank = 0
        for col in range(self.ncols):
            bit = 1 << col
            piv = next((k for k in range(rank, len(aug)) if aug[k] & bit), None)
            if piv is None:
                continue
            aug[rank], aug[piv] = aug[piv], aug[rank]
            for k in range(len(aug)):
                if k != rank and aug[k] & bit:
                    aug[k] ^= aug[rank]
            pivots.append(col)
            rank += 1
        if any(row == bbit for row in aug):
            return None
        x = [0] * self.ncols
        for k, col in enumerate(pivots):
            if aug[k] & bbit:
                x[col] = 1
        xbits = sum(bit << j for j, bit in enumerate(x))
        for r, bv in zip(self.rows, b):
            if bin(r & xbits).count("1") % 2 != int(bv) % 2:
                raise AssertionError("GF(2) solver produced a bad solution")
        return tuple(x)

    def inverse(self) -> Optional["Gf2Matrix"]:
        if self.nrows != self.ncols:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.ncols
        aug = [r | (1 << (n + i)) for i, r in enumerate(self.rows)]
        rank = 0
        for col in range(n):
            bit = 1 << col
            piv = next((k for k in range(rank, n) if aug[k] & bit), None)
            if piv is None:
                return None
            aug[rank], aug[piv] = aug[piv], aug[rank]
            for k in range(n):
                if k != rank and aug[k] & bit:
                    aug[k] ^= aug[rank]
            rank += 1
        inv_rows = [row >> n for row in aug]
        return Gf2Matrix(n, inv_rows)

    def mul(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch("GF(2) product size mismatch")
        out = []
        for r in self.rows:
            acc = 0
            rr = r
            while rr:
                low = rr & -rr
                acc ^= other.rows[low.bit_length() - 1]
                rr ^= low
            out.append(acc)
        return Gf2Matrix(other.ncols, out)

    def matvec(self, x: Sequence[int]) -> tuple[int, ...]:
        xbits = sum((int(v) % 2) << j for j, v in enumerate(x))
        return tuple(bin(r & xbits).count("1") % 2 for r in self.rows)


def solve_gf2(a: Iterable[Sequence[int]] | Gf2Matrix, b: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Solve A x = b over GF(2); returns a solution tuple or None."""
    mat = a if isinstance(a, Gf2Matrix) else Gf2Matrix.from_vectors(a)
    return mat.solve(b)


def gf2_rank(vectors: Iterable[Sequence[int]]) -> int:
    return Gf2Matrix.from_vectors(vectors).rank()


# ---------------------------------------------------------------------------
# rational elimination
# ---------------------------------------------------------------------------

def _rref(a: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    nr = len(a)
    nc = len(a[0]) if nr else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def solve_rational(
    a: Sequence[Sequence[Fraction | int]], b: Sequence[Fraction | int]
) -> Optional[tuple[Fraction, ...]]:
    """Unique solution of A x = b over the rationals, or None.

    None is returned both for inconsistent and for underdetermined
    systems; the caller only ever needs the uniquely-solvable case.
    """
    nr = len(a)
    if nr == 0:
        return None
    nc = len(a[0])
    aug = [
        [Fraction(x) for x in row] + [Fraction(bv)] for row, bv in zip(a, b)
    ]
    reduced, pivots = _rref(aug)
    if any(p == nc for p in pivots):
        return None  # inconsistent
    if len(pivots) < nc:
        return None  # underdetermined
    x = [Fraction(0)] * nc
    for r, c in enumerate(pivots):
        x[c] = reduced[r][nc]
    return tuple(x)


def rational_inverse(
    a: Sequence[Sequence[Fraction | int]],
) -> Optional[list[list[Fraction]]]:
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionMismatch("non-square matrix")
    aug = [
        [Fraction(x) for x in row]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i, row in enumerate(a)
    ]
    reduced, pivots = _rref(aug)
    if len(pivots) != n or pivots != list(range(n)):
        return None
    return [row[n:] for row in reduced]


def rational_rank(a: Sequence[Sequence[Fraction | int]]) -> int:
    if not a:
        return 0
    rows = [[Fraction(x) for x in row] for row in a]
    _, pivots = _rref(rows)
    return len(pivots)
