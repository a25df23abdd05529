"""Homology machinery: index counting and a brute-force cell oracle.

Two independent routes are provided.  The torus-side relative homology
table comes from counting vertex indices of a generic linear functional
on the truncated simplex.  The involution-side spaces are built
outright as finite regular CW complexes (one cell per coset and face)
whose chain complexes are handed to exact Smith normal form or GF(2)
rank computations.  The two routes cross-check each other wherever both
apply.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .charpair import RING_GF2, RING_Z, CharacteristicFunction, CharacteristicPair
from .exactalg import Gf2Matrix, invariant_factors, rational_rank, solve_rational
from .polytope import Face, SimplePolytope


class CellularError(ValueError):
    pass


class TieError(CellularError):
    """The functional fails to distinguish two vertices."""


class StrictModeViolation(CellularError):
    pass


class ConsistencyError(CellularError):
    """Two independent computations of the same quantity disagree."""


# ---------------------------------------------------------------------------
# linear functionals and vertex indices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearFunctional:
    """Rational coefficients on the ambient coordinates, with its seed."""

    coeffs: tuple[Fraction, ...]
    seed: Optional[int] = None

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return sum(c * x for c, x in zip(self.coeffs, point))


def draw_functional(
    poly: SimplePolytope, seed: int = 0, *, bound: int = 10**6
) -> LinearFunctional:
    """Seeded integer functional distinguishing all vertices.

    Coefficients are drawn uniformly from [-bound, bound]; draws with a
    tie are rejected and redrawn from the same stream, so the result is
    deterministic in the seed.
    """
    if not poly.has_coords():
        raise CellularError("polytope has no rational realization")
    ambient = len(poly.vertex_coords[0])
    rng = random.Random(seed)
    while True:
        coeffs = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(ambient))
        func = LinearFunctional(coeffs, seed)
        values = [func.value(c) for c in poly.vertex_coords]
        if len(set(values)) == len(values):
            return func


def distinguished_functional(poly: SimplePolytope, n: int, seed: int = 0) -> LinearFunctional:
    """Deterministic functional whose maximum sits on the distinguished edge.

    The maximizing vertex is the p2-endpoint of the trimmed edge between
    the vertices A_0 and A_{n/2 + 1} of the parent simplex, the
    normalization used for the explicit top boundary computation.
    """
    target_facets = frozenset(
        f"d{i}" for i in range(n + 1) if i not in (0, n // 2 + 1)
    ) | {"p2"}
    target = next(
        (
            i
            for i, fs in enumerate(poly.vertex_facets)
            if fs == target_facets
        ),
        None,
    )
    if target is None:
        raise CellularError("distinguished edge endpoint not found")
    for attempt in range(10_000):
        func = draw_functional(poly, seed * 10_007 + attempt)
        values = [func.value(c) for c in poly.vertex_coords]
        if max(range(len(values)), key=values.__getitem__) == target:
            return func
    raise CellularError("no functional found with the distinguished maximum")


@dataclass(frozen=True)
class IndexProfile:
    """Vertex indices and the old-edge pairs of one functional."""

    functional: LinearFunctional
    ind: tuple[int, ...]
    pairs: dict[int, tuple[tuple[int, frozenset[int]], ...]]  # j -> ((v, edge), ...)
    old_edges: tuple[frozenset[int], ...]
    new_edges: tuple[frozenset[int], ...]

    def index_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for i in self.ind:
            counts[i] = counts.get(i, 0) + 1
        return counts

    def pair_counts(self) -> dict[int, int]:
        return {j: len(ps) for j, ps in self.pairs.items() if ps}

    def to_json_dict(self) -> dict:
        return {
            "seed": self.functional.seed,
            "indices": list(self.ind),
            "pairs": {
                str(j): [[v, sorted(e)] for v, e in ps]
                for j, ps in sorted(self.pairs.items())
                if ps
            },
            "old_edges": [sorted(e) for e in self.old_edges],
        }


def vertex_indices(
    poly: SimplePolytope, functional: LinearFunctional, *, strict: bool = True
) -> IndexProfile:
    """Directed 1-skeleton data of a generic functional.

    Each edge is oriented toward the larger functional value; ind(v)
    counts inward edges.  An edge is old when it lies on dim-1 facets
    tagged original, i.e. it is the trimmed edge of a parent simplex
    edge.  For j >= 1 the pairs (v, e) collect vertices of index j whose
    inward edge e is old.  Strict mode insists every vertex lies on
    exactly one old edge, which holds for the truncated family.
    """
    values = [functional.value(c) for c in poly.vertex_coords]
    if len(set(values)) != len(values):
        raise TieError("functional does not distinguish the vertices")
    edges = poly.edges()
    nv = poly.n_vertices
    indegree = [0] * nv
    inward: list[list[Face]] = [[] for _ in range(nv)]
    for e in edges:
        a, b = sorted(e.vertices)
        head = a if values[a] > values[b] else b
        indegree[head] += 1
        inward[head].append(e)

    def is_old(e: Face) -> bool:
        originals = sum(
            1 for f in e.facets if poly.facet_tags.get(f) == "original"
        )
        return originals == poly.dim - 1

    old_edges = tuple(frozenset(e.vertices) for e in edges if is_old(e))
    new_edges = tuple(frozenset(e.vertices) for e in edges if not is_old(e))

    if strict:
        per_vertex = [0] * nv
        for e in edges:
            if is_old(e):
                for v in e.vertices:
                    per_vertex[v] += 1
        bad = [v for v, c in enumerate(per_vertex) if c != 1]
        if bad:
            raise StrictModeViolation(
                f"vertices {bad} do not lie on exactly one old edge"
            )

    pairs: dict[int, list[tuple[int, frozenset[int]]]] = {
        j: [] for j in range(1, poly.dim + 1)
    }
    for v in range(nv):
        j = indegree[v]
        if j == 0:
            continue
        for e in inward[v]:
            if is_old(e):
                pairs[j].append((v, frozenset(e.vertices)))
    if strict:
        seen_vertices = [v for ps in pairs.values() for v, _ in ps]
        if len(seen_vertices) != len(set(seen_vertices)):
            raise StrictModeViolation("a vertex contributes two index pairs")

    return IndexProfile(
        functional=functional,
        ind=tuple(indegree),
        pairs={j: tuple(ps) for j, ps in pairs.items()},
        old_edges=old_edges,
        new_edges=new_edges,
    )


HomologyTable = dict[int, tuple[int, tuple[int, ...]]]


def homology_w_rel_boundary(fam, functional: LinearFunctional) -> HomologyTable:
    """Relative homology table of the torus-side total space.

    Degree 0 carries the basepoint class; degree 2j-1 is free of rank
    the number of index-j old-edge pairs; every other degree vanishes.
    The table runs over degrees 0 .. 2n-1.
    """
    if fam.ring != RING_Z:
        raise CellularError("the index-count table applies to the Z family")
    profile = vertex_indices(fam.polytope, functional)
    n = fam.n
    counts = profile.pair_counts()
    if counts.get(n, 0) != 1:
        raise ConsistencyError("top index count is not 1")
    table: HomologyTable = {d: (0, ()) for d in range(2 * n)}
    table[0] = (1, ())
    for j, c in counts.items():
        table[2 * j - 1] = (c, ())
    return table


def table_to_json(table: HomologyTable) -> list[dict]:
    return [
        {"degree": d, "betti": table[d][0], "torsion": list(table[d][1])}
        for d in sorted(table)
    ]


# ---------------------------------------------------------------------------
# quotient CW complexes
# ---------------------------------------------------------------------------

def _echelon(vectors: Iterable[int], width: int) -> tuple[int, ...]:
    """Reduced echelon basis of a GF(2) span, rows as bitmasks."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            low = b & -b
            if v & low:
                v ^= b
        if v:
            basis.append(v)
            # keep reduced: clear this pivot from earlier rows
            low = v & -v
            for i, b in enumerate(basis[:-1]):
                if b & low:
                    basis[i] = b ^ v
    return tuple(sorted(basis, reverse=True))


def _reduce_coset(g: int, basis: tuple[int, ...]) -> int:
    for b in basis:
        low = b & -b
        if g & low:
            g ^= b
    return g


@dataclass(frozen=True)
class QuotientCWComplex:
    """Cells (coset, face) of a quotient of group x polytope.

    Identifications act only on the group coordinate, so every closed
    cell embeds and the incidence numbers are the polytope's own.
    """

    polytope: SimplePolytope
    group_rank: int
    cells: tuple[tuple[tuple[int, int], ...], ...]  # per dim: (face_index, coset)
    face_list: tuple[Face, ...]
    face_basis: tuple[tuple[int, ...], ...]  # echelon basis of G_F per face
    relative_to: frozenset[str]

    def cell_counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * len(c) for d, c in enumerate(self.cells))


def build_quotient_complex(
    poly: SimplePolytope,
    beta: CharacteristicFunction,
    boundary_facets: Iterable[str] = (),
) -> QuotientCWComplex:
    """Cells of the GF(2) quotient space, optionally relative.

    The isotropy subgroup of a face is spanned by the vectors of its
    assigned facets.  With ``boundary_facets`` given, faces contained in
    any of them are dropped, which computes the pair relative to that
    part of the boundary.
    """
    if beta.ring != RING_GF2:
        raise CellularError("quotient complexes are built from GF(2) data")
    rank = beta.rank
    excluded = frozenset(boundary_facets)
    faces = [f for f in poly.faces if not (f.facets & excluded)]
    face_basis = []
    for f in faces:
        vecs = []
        for fid in sorted(f.facets):
            if fid in beta.vectors:
                vecs.append(
                    sum(bit << i for i, bit in enumerate(beta.vectors[fid]))
                )
        face_basis.append(_echelon(vecs, rank))

    by_dim: list[list[tuple[int, int]]] = [[] for _ in range(poly.dim + 1)]
    for idx, f in enumerate(faces):
        basis = face_basis[idx]
        reps = sorted({_reduce_coset(g, basis) for g in range(1 << rank)})
        expected = 1 << (rank - len(basis))
        if len(reps) != expected:
            raise ConsistencyError("coset count does not match isotropy rank")
        for g in reps:
            by_dim[f.dim].append((idx, g))
    for d in range(poly.dim + 1):
        by_dim[d].sort()
    return QuotientCWComplex(
        polytope=poly,
        group_rank=rank,
        cells=tuple(tuple(c) for c in by_dim),
        face_list=tuple(faces),
        face_basis=tuple(face_basis),
        relative_to=excluded,
    )


# -- geometric incidence -----------------------------------------------------

def _frame(poly: SimplePolytope, face: Face) -> tuple[int, tuple[int, ...]]:
    """Base vertex and a greedy affine frame from the sorted vertex list."""
    vs = sorted(face.vertices)
    base = vs[0]
    basis: list[int] = []
    rows: list[list[Fraction]] = []
    base_c = poly.vertex_coords[base]
    for v in vs[1:]:
        if len(basis) == face.dim:
            break
        d = [a - b for a, b in zip(poly.vertex_coords[v], base_c)]
        cand = rows + [d]
        if rational_rank(cand) == len(cand):
            rows.append(d)
            basis.append(v)
    if len(basis) != face.dim:
        raise CellularError("face frame has deficient rank")
    return base, tuple(basis)


def _det_fraction(m: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in m]
    k = len(a)
    det = Fraction(1)
    for t in range(k):
        piv = next((i for i in range(t, k) if a[i][t] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != t:
            a[t], a[piv] = a[piv], a[t]
            det = -det
        det *= a[t][t]
        inv = a[t][t]
        for i in range(t + 1, k):
            if a[i][t] != 0:
                factor = a[i][t] / inv
                a[i] = [x - factor * y for x, y in zip(a[i], a[t])]
    return det


def _incidence_sign(
    poly: SimplePolytope,
    face: Face,
    sub: Face,
    frames: dict[frozenset[int], tuple[int, tuple[int, ...]]],
) -> int:
    """Geometric incidence number of a face and one of its facets.

    The face's orientation frame is compared with (outward vector,
    facet frame); the sign of the change-of-basis determinant is the
    incidence number.
    """
    base, basis = frames[face.vertices]
    base_c = poly.vertex_coords[base]
    rows = [
        [a - b for a, b in zip(poly.vertex_coords[v], base_c)] for v in basis
    ]
    d = face.dim

    nverts = len(face.vertices)
    bary = [
        sum(poly.vertex_coords[v][i] for v in face.vertices) / nverts
        for i in range(len(base_c))
    ]
    sbase, sbasis = frames[sub.vertices]
    sbase_c = poly.vertex_coords[sbase]
    targets = [[a - b for a, b in zip(sbase_c, bary)]]
    for v in sbasis:
        targets.append([a - b for a, b in zip(poly.vertex_coords[v], sbase_c)])

    # Gram solve: express each target in the face frame
    gram = [[sum(x * y for x, y in zip(r1, r2)) for r2 in rows] for r1 in rows]
    cols = []
    for t in targets:
        rhs = [sum(x * y for x, y in zip(r, t)) for r in rows]
        sol = solve_rational(gram, rhs)
        if sol is None:
            raise CellularError("degenerate frame in incidence computation")
        cols.append(sol)
    det = _det_fraction([[cols[j][i] for j in range(d)] for i in range(d)])
    if det == 0:
        raise CellularError("incidence determinant vanished")
    return 1 if det > 0 else -1


SparseMatrix = list[dict[int, int]]


@dataclass(frozen=True)
class ChainComplex:
    """Graded boundary matrices: row r of ``boundaries[d]`` is the
    boundary of the r-th d-cell, as a sparse map into (d-1)-cells."""

    ring: str
    cell_counts: tuple[int, ...]
    boundaries: tuple[SparseMatrix, ...]  # index d: C_d -> C_{d-1}; entry 0 empty

    @property
    def dim(self) -> int:
        return len(self.cell_counts) - 1


def chain_complex(cw: QuotientCWComplex, ring: str = RING_Z) -> ChainComplex:
    """Boundary matrices of the quotient complex, with d o d == 0 verified.

    Cell boundaries carry the polytope's geometric incidence signs; the
    group coordinate is reduced into the smaller face's coset.
    """
    if not cw.polytope.has_coords():
        raise CellularError("incidence signs need a rational realization")
    if ring not in (RING_Z, RING_GF2):
        raise CellularError(f"unknown ring {ring!r}")
    poly = cw.polytope
    frames = {
        f.vertices: _frame(poly, f) for f in cw.face_list if f.dim >= 1
    }
    for f in cw.face_list:
        if f.dim == 0:
            frames[f.vertices] = (min(f.vertices), ())

    faces_by_dim: dict[int, list[int]] = {}
    for idx, f in enumerate(cw.face_list):
        faces_by_dim.setdefault(f.dim, []).append(idx)
    masks = {
        idx: sum(1 << v for v in f.vertices) for idx, f in enumerate(cw.face_list)
    }
    # face index -> list of (subface index, sign)
    face_boundary: dict[int, list[tuple[int, int]]] = {}
    for d in range(1, poly.dim + 1):
        for fi in faces_by_dim.get(d, ()):
            face = cw.face_list[fi]
            subs = []
            for gi in faces_by_dim.get(d - 1, ()):
                if masks[gi] & ~masks[fi]:
                    continue
                sign = _incidence_sign(poly, face, cw.face_list[gi], frames)
                subs.append((gi, sign))
            face_boundary[fi] = subs

    cell_index: list[dict[tuple[int, int], int]] = [
        {cell: i for i, cell in enumerate(cw.cells[d])}
        for d in range(poly.dim + 1)
    ]
    boundaries: list[SparseMatrix] = [[]]
    for d in range(1, poly.dim + 1):
        mat: SparseMatrix = []
        lower = cell_index[d - 1]
        for fi, g in cw.cells[d]:
            row: dict[int, int] = {}
            for gi, sign in face_boundary.get(fi, ()):
                gg = _reduce_coset(g, cw.face_basis[gi])
                col = lower.get((gi, gg))
                if col is None:
                    raise ConsistencyError("boundary cell missing from complex")
                row[col] = row.get(col, 0) + sign
            if ring == RING_GF2:
                row = {c: v % 2 for c, v in row.items() if v % 2}
            else:
                row = {c: v for c, v in row.items() if v}
            mat.append(row)
        boundaries.append(mat)

    cc = ChainComplex(
        ring=ring,
        cell_counts=cw.cell_counts(),
        boundaries=tuple(boundaries),
    )
    _verify_d_squared(cc)
    return cc


def _verify_d_squared(cc: ChainComplex) -> None:
    mod = 2 if cc.ring == RING_GF2 else 0
    for d in range(2, cc.dim + 1):
        lower = cc.boundaries[d - 1]
        for row in cc.boundaries[d]:
            acc: dict[int, int] = {}
            for mid, c1 in row.items():
                for low, c0 in lower[mid].items():
                    acc[low] = acc.get(low, 0) + c1 * c0
            for v in acc.values():
                if (v % mod if mod else v) != 0:
                    raise ConsistencyError("d o d != 0: incidence signs broken")


def _boundary_rank(cc: ChainComplex, d: int) -> int:
    if d <= 0 or d > cc.dim or cc.cell_counts[d] == 0 or cc.cell_counts[d - 1] == 0:
        return 0
    if cc.ring == RING_GF2:
        rows = [
            sum(1 << c for c, v in row.items() if v % 2)
            for row in cc.boundaries[d]
        ]
        return Gf2Matrix(cc.cell_counts[d - 1], rows).rank()
    return len(invariant_factors(cc.boundaries[d], ncols=cc.cell_counts[d - 1]))


def homology(
    cc: ChainComplex, degrees: Optional[Iterable[int]] = None
) -> HomologyTable:
    """Betti numbers (and torsion over Z) of the chain complex."""
    wanted = sorted(set(degrees)) if degrees is not None else list(range(cc.dim + 1))
    rank_cache: dict[int, int] = {}
    factor_cache: dict[int, tuple[int, ...]] = {}

    def factors(d: int) -> tuple[int, ...]:
        if d <= 0 or d > cc.dim:
            return ()
        if d not in factor_cache:
            factor_cache[d] = (
                invariant_factors(cc.boundaries[d], ncols=cc.cell_counts[d - 1])
                if cc.cell_counts[d] and cc.cell_counts[d - 1]
                else ()
            )
        return factor_cache[d]

    def rank(d: int) -> int:
        if d not in rank_cache:
            if cc.ring == RING_Z:
                rank_cache[d] = len(factors(d))
            else:
                rank_cache[d] = _boundary_rank(cc, d)
        return rank_cache[d]

    table: HomologyTable = {}
    for d in wanted:
        if d < 0 or d > cc.dim:
            table[d] = (0, ())
            continue
        betti = cc.cell_counts[d] - rank(d) - rank(d + 1) if d < cc.dim else (
            cc.cell_counts[d] - rank(d)
        )
        torsion: tuple[int, ...] = ()
        if cc.ring == RING_Z and d < cc.dim:
            torsion = tuple(f for f in factors(d + 1) if f > 1)
        table[d] = (betti, torsion)
    return table


def euler_characteristic(cc: ChainComplex) -> int:
    return sum((-1) ** d * c for d, c in enumerate(cc.cell_counts))


# ---------------------------------------------------------------------------
# family-level wrappers
# ---------------------------------------------------------------------------

def _family_mu(fam) -> CharacteristicFunction:
    chi = fam.pair.chi
    return chi if chi.ring == RING_GF2 else chi.mod2()


def relative_complex(fam, ring: str = RING_Z) -> ChainComplex:
    """Chain complex of the total space relative to its boundary."""
    cw = build_quotient_complex(fam.polytope, _family_mu(fam), fam.boundary.keys())
    return chain_complex(cw, ring)


def relative_homology_table(fam, degrees=None) -> HomologyTable:
    """Relative integral homology with the basepoint class in degree 0.

    The deleted-cell complex computes reduced homology of the quotient
    space; the table reports the unreduced groups, so degree 0 gains one
    free summand.
    """
    cc = relative_complex(fam, RING_Z)
    table = homology(cc, degrees)
    if 0 in table:
        betti, torsion = table[0]
        table[0] = (betti + 1, torsion)
    return table


def is_orientable_space(fam, *, use_oracle: Optional[bool] = None) -> bool:
    """Orientability of the involution-side total space.

    Three routes must agree: the parity rule (orientable iff n = 4l+2),
    the top boundary coefficient d_n from the reflection count, and for
    n small enough the brute-force top relative homology H_n = Z.
    """
    from .family import reflection_count

    if fam.ring != RING_GF2:
        raise CellularError("orientability applies to the GF(2) family")
    n = fam.n
    formula = n % 4 == 2
    _, d_n = reflection_count(n)
    if (d_n == 0) != formula:
        raise ConsistencyError("d_n parity disagrees with the mod-4 rule")
    if use_oracle is None:
        use_oracle = n <= 6
    if use_oracle:
        table = relative_homology_table(fam, degrees=[n])
        oracle = table[n] == (1, ())
        if oracle != formula:
            raise ConsistencyError(
                "oracle top homology disagrees with the parity rule"
            )
    return formula


def euler_cross_check(fam, functional: LinearFunctional) -> tuple[int, int]:
    """Both sides of the Euler identity for the quotient space.

    Left: basepoint plus alternating cell count of the relative coset
    complex.  Right: basepoint plus the alternating sum of index-pair
    counts.  They must be equal; a mismatch falsifies the bookkeeping.
    """
    cw = build_quotient_complex(fam.polytope, _family_mu(fam), fam.boundary.keys())
    lhs = 1 + cw.euler_characteristic()
    profile = vertex_indices(fam.polytope, functional)
    rhs = 1 + sum((-1) ** j * c for j, c in profile.pair_counts().items())
    return lhs, rhs


def closed_cover_complex(pair: CharacteristicPair, ring: str = RING_Z) -> ChainComplex:
    """Chain complex of the closed small cover of a GF(2) pair."""
    if pair.ring != RING_GF2:
        raise CellularError("small covers come from GF(2) pairs")
    cw = build_quotient_complex(pair.polytope, pair.chi, ())
    return chain_complex(cw, ring)


def small_cover_gf2_betti(pair: CharacteristicPair) -> tuple[int, ...]:
    cc = closed_cover_complex(pair, RING_GF2)
    table = homology(cc)
    return tuple(table[d][0] for d in range(cc.dim + 1))


def small_cover_orientable_oracle(pair: CharacteristicPair) -> bool:
    """Top integral homology H_dim = Z of the closed cover."""
    cc = closed_cover_complex(pair, RING_Z)
    table = homology(cc, degrees=[cc.dim])
    return table[cc.dim] == (1, ())
