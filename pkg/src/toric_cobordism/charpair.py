"""Characteristic functions over Z (sign classes) and GF(2).

A characteristic pair is a simple polytope together with an assignment
of group vectors to (some of) its facets.  Facets left unassigned are
free: they carry no isotropy and become boundary pieces of the quotient
construction.  Integer vectors are stored as sign-class representatives
(first nonzero entry positive); all comparisons are up to a global sign
per facet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Optional, Sequence

from . import exactalg
from .exactalg import (
    DimensionMismatch,
    Gf2Matrix,
    as_matrix,
    det_sign,
    is_direct_summand,
    mat_vec,
    permutation_sign,
    rational_inverse,
)
from .polytope import SimplePolytope, facet_polytope, simplex

RING_Z = "Z"
RING_GF2 = "GF2"


class PairError(ValueError):
    pass


class RingMismatch(PairError):
    pass


class MissingVector(PairError):
    pass


class InvalidPair(PairError):
    pass


class RestrictionInvalid(PairError):
    pass


class SearchCapExceeded(PairError):
    """The translation search hit its cap before finishing."""


class SingularDelta(PairError):
    pass


def normalize_sign_class(vec: Sequence[int]) -> tuple[int, ...]:
    v = tuple(int(x) for x in vec)
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


@dataclass(frozen=True)
class CharacteristicFunction:
    """Facet id -> group vector, over Z/± or GF(2).

    ``rank`` is the rank of the acting group; vectors all have this
    length.  The mapping may be partial (free facets omitted).
    """

    ring: str
    rank: int
    vectors: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.ring not in (RING_Z, RING_GF2):
            raise RingMismatch(f"unknown ring {self.ring!r}")
        canon = {}
        for fid, vec in self.vectors.items():
            v = tuple(int(x) for x in vec)
            if len(v) != self.rank:
                raise DimensionMismatch(
                    f"vector on {fid} has length {len(v)}, expected {self.rank}"
                )
            if self.ring == RING_GF2:
                v = tuple(x % 2 for x in v)
            else:
                v = normalize_sign_class(v)
            canon[fid] = v
        object.__setattr__(self, "vectors", canon)

    def vector(self, fid: str) -> tuple[int, ...]:
        try:
            return self.vectors[fid]
        except KeyError:
            raise MissingVector(fid) from None

    def assigned(self) -> frozenset[str]:
        return frozenset(self.vectors)

    def mod2(self) -> "CharacteristicFunction":
        return CharacteristicFunction(
            RING_GF2,
            self.rank,
            {fid: tuple(x % 2 for x in v) for fid, v in self.vectors.items()},
        )


@dataclass(frozen=True)
class CharacteristicPair:
    """A polytope with a characteristic function and orientation datum.

    ``vertex_order`` lists vertex indices in the order fixed as the
    pair's orientation datum; None means the polytope's canonical
    (lexicographic) order.  The group factor carries ``group_sign``.
    """

    polytope: SimplePolytope
    chi: CharacteristicFunction
    vertex_order: Optional[tuple[int, ...]] = None
    group_sign: int = 1

    def __post_init__(self):
        unknown = self.chi.assigned() - set(self.polytope.facet_ids)
        if unknown:
            raise MissingVector(
                f"vectors on unknown facets {sorted(unknown)}"
            )
        if self.vertex_order is not None:
            if sorted(self.vertex_order) != list(range(self.polytope.n_vertices)):
                raise PairError("vertex_order is not a permutation of the vertices")

    @property
    def ring(self) -> str:
        return self.chi.ring

    def is_closed(self) -> bool:
        return self.chi.assigned() == set(self.polytope.facet_ids)

    def order(self) -> tuple[int, ...]:
        if self.vertex_order is not None:
            return self.vertex_order
        return tuple(range(self.polytope.n_vertices))

    def to_json_dict(self) -> dict:
        return {
            "polytope": self.polytope.to_json_dict(),
            "ring": self.ring,
            "rank": self.chi.rank,
            "vectors": {fid: list(v) for fid, v in sorted(self.chi.vectors.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CharacteristicPair":
        poly = SimplePolytope.from_json_dict(data["polytope"])
        vectors = {fid: tuple(v) for fid, v in data["vectors"].items()}
        rank = data.get("rank")
        if rank is None:
            rank = len(next(iter(vectors.values())))
        chi = CharacteristicFunction(data["ring"], rank, vectors)
        return cls(poly, chi)


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    checked_vertices: int
    failures: tuple[tuple[int, str], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate(pair: CharacteristicPair) -> ValidityReport:
    """Check the basis condition at every vertex.

    At each vertex the vectors of its assigned facets must span a
    direct summand (over Z) or an independent subspace (over GF(2)) of
    rank equal to the number of assigned facets there.  Checking
    vertices suffices: every face contains a vertex, and a subset of a
    basis again spans a summand.
    """
    poly = pair.polytope
    chi = pair.chi
    failures = []
    for i, fs in enumerate(poly.vertex_facets):
        vecs = [chi.vectors[f] for f in sorted(fs) if f in chi.vectors]
        if not vecs:
            continue
        if len(vecs) > chi.rank:
            failures.append((i, f"{len(vecs)} assigned vectors exceed group rank"))
            continue
        if chi.ring == RING_Z:
            ok = is_direct_summand(vecs, chi.rank)
        else:
            ok = exactalg.gf2_rank(vecs) == len(vecs)
        if not ok:
            failures.append(
                (i, "facet vectors at this vertex do not span a direct summand")
            )
    return ValidityReport(
        ok=not failures,
        checked_vertices=poly.n_vertices,
        failures=tuple(failures),
    )


def orientable_small_cover(pair: CharacteristicPair) -> bool:
    """Orientability of the small cover of a GF(2) pair.

    True iff some y satisfies <y, beta(F)> = 1 for every assigned facet
    F, which is the basis criterion for orientability.
    """
    if pair.ring != RING_GF2:
        raise RingMismatch("orientability test needs a GF(2) pair")
    report = validate(pair)
    if not report:
        raise InvalidPair(f"pair invalid at vertices {[i for i, _ in report.failures]}")
    fids = sorted(pair.chi.vectors)
    rows = [pair.chi.vectors[f] for f in fids]
    return exactalg.solve_gf2(rows, [1] * len(rows)) is not None


def restrict(pair: CharacteristicPair, fid: str) -> CharacteristicPair:
    """Restrict a pair to one of its facets.

    Each facet g of the child polytope is an intersection g cap fid and
    receives the vector assigned to g in the parent.  The result is
    validated; a failure raises RestrictionInvalid.
    """
    child = facet_polytope(pair.polytope, fid)
    vectors = {}
    for g in child.facet_ids:
        if g not in pair.chi.vectors:
            raise MissingVector(f"parent facet {g} has no vector to inherit")
        vectors[g] = pair.chi.vectors[g]
    chi = CharacteristicFunction(pair.ring, pair.chi.rank, vectors)
    out = CharacteristicPair(child, chi)
    report = validate(out)
    if not report:
        raise RestrictionInvalid(
            f"restriction to {fid} fails at vertices"
            f" {[i for i, _ in report.failures]}"
        )
    return out


def standard_pair(name: str, m: int) -> CharacteristicPair:
    """Reference pair over the m-simplex.

    ``complex_projective``: vectors e_1..e_m and the all-ones class.
    ``real_projective``: the same data over GF(2).
    """
    if m < 1:
        raise PairError("dimension must be >= 1")
    ring = {"complex_projective": RING_Z, "real_projective": RING_GF2}.get(name)
    if ring is None:
        raise PairError(f"unknown standard pair {name!r}")
    poly = simplex(m)
    vectors = {
        f"d{j}": tuple(1 if i == j else 0 for i in range(m)) for j in range(m)
    }
    vectors[f"d{m}"] = tuple(1 for _ in range(m))
    return CharacteristicPair(poly, CharacteristicFunction(ring, m, vectors))


# ---------------------------------------------------------------------------
# delta translations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaTranslation:
    """A facet bijection together with a group automorphism.

    ``delta`` is a square integer matrix, unimodular over Z or
    invertible over GF(2) depending on ``ring``; it acts on column
    vectors, so the translation sends a vector v to delta @ v.
    """

    ring: str
    facet_map: dict[str, str]
    delta: tuple[tuple[int, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "ring": self.ring,
            "facet_map": dict(sorted(self.facet_map.items())),
            "delta": [list(r) for r in self.delta],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DeltaTranslation":
        return cls(
            data["ring"],
            dict(data["facet_map"]),
            tuple(tuple(r) for r in data["delta"]),
        )


def _apply_delta(ring: str, delta, vec: Sequence[int]) -> tuple[int, ...]:
    out = mat_vec(as_matrix(delta), vec)
    if ring == RING_GF2:
        return tuple(x % 2 for x in out)
    return normalize_sign_class(out)


def _is_invertible(ring: str, delta) -> bool:
    try:
        if ring == RING_Z:
            return abs(exactalg.determinant(delta)) == 1
        return Gf2Matrix.from_vectors(delta).inverse() is not None
    except DimensionMismatch:
        return False


def _facet_map_is_isomorphism(
    p: SimplePolytope, q: SimplePolytope, fmap: dict[str, str]
) -> bool:
    if set(fmap) != set(p.facet_ids) or set(fmap.values()) != set(q.facet_ids):
        return False
    if len(set(fmap.values())) != len(fmap):
        return False
    target_sets = set(q.vertex_facets)
    images = set()
    for fs in p.vertex_facets:
        image = frozenset(fmap[f] for f in fs)
        if image not in target_sets or image in images:
            return False
        images.add(image)
    return True


def verify_delta_translation(
    pair1: CharacteristicPair, pair2: CharacteristicPair, t: DeltaTranslation
) -> bool:
    """True iff t carries pair1 to pair2.

    The facet map must be a combinatorial isomorphism matching assigned
    facets to assigned facets, delta must be invertible over the common
    ring, and delta(chi1(F)) must equal chi2(map(F)) for every assigned
    facet (as sign classes over Z).
    """
    if pair1.ring != pair2.ring or t.ring != pair1.ring:
        raise RingMismatch("translation and pairs must share a ring")
    if not _facet_map_is_isomorphism(pair1.polytope, pair2.polytope, t.facet_map):
        return False
    assigned1, assigned2 = pair1.chi.assigned(), pair2.chi.assigned()
    if {t.facet_map[f] for f in assigned1} != set(assigned2):
        return False
    if not _is_invertible(t.ring, t.delta):
        return False
    for f in assigned1:
        image = _apply_delta(t.ring, t.delta, pair1.chi.vectors[f])
        if image != pair2.chi.vectors[t.facet_map[f]]:
            return False
    return True


def compose_translations(
    t1: DeltaTranslation, t2: DeltaTranslation
) -> DeltaTranslation:
    """The translation applying t1 first and then t2."""
    if t1.ring != t2.ring:
        raise RingMismatch("cannot compose translations over different rings")
    fmap = {f: t2.facet_map[g] for f, g in t1.facet_map.items()}
    delta = exactalg.mat_mul(as_matrix(t2.delta), as_matrix(t1.delta))
    if t1.ring == RING_GF2:
        delta = tuple(tuple(x % 2 for x in row) for row in delta)
    return DeltaTranslation(t1.ring, fmap, delta)


def identity_translation(pair: CharacteristicPair) -> DeltaTranslation:
    return DeltaTranslation(
        pair.ring,
        {f: f for f in pair.polytope.facet_ids},
        exactalg.identity_matrix(pair.chi.rank),
    )


def _independent_assigned_facets(pair: CharacteristicPair) -> Optional[list[str]]:
    """rank-many assigned facets with linearly independent vectors."""
    rank = pair.chi.rank
    chosen: list[str] = []
    rows: list[list[Fraction]] = []
    for fid in sorted(pair.chi.vectors):
        cand = rows + [[Fraction(x) for x in pair.chi.vectors[fid]]]
        if exactalg.rational_rank(cand) == len(cand):
            rows = cand
            chosen.append(fid)
            if len(chosen) == rank:
                return chosen
    return None


def _solve_delta_z(
    basis_vecs: Sequence[Sequence[int]], image_vecs: Sequence[Sequence[int]]
) -> Optional[tuple[tuple[int, ...], ...]]:
    """Integer matrix delta with delta @ b_i = w_i, if unimodular."""
    minv = rational_inverse([list(map(Fraction, v)) for v in zip(*basis_vecs)])
    if minv is None:
        return None
    w = [list(map(Fraction, v)) for v in zip(*image_vecs)]
    n = len(basis_vecs)
    delta = []
    for r in range(n):
        row = []
        for c in range(n):
            val = sum(w[r][k] * minv[k][c] for k in range(n))
            if val.denominator != 1:
                return None
            row.append(int(val))
        delta.append(tuple(row))
    delta = tuple(delta)
    if abs(exactalg.determinant(delta)) != 1:
        return None
    return delta


def _express_in_basis(
    basis_vecs: Sequence[Sequence[int]], vec: Sequence[int]
) -> Optional[tuple[Fraction, ...]]:
    """Coefficients of ``vec`` in the given basis, over the rationals."""
    rows = [list(map(Fraction, col)) for col in zip(*basis_vecs)]
    return exactalg.solve_rational(rows, [Fraction(x) for x in vec])


def _find_simplex_translation(
    pair1: CharacteristicPair, pair2: CharacteristicPair
) -> Optional[DeltaTranslation]:
    """Closed-form search when both pairs live over combinatorial simplices.

    Every facet bijection between simplices is an isomorphism, so the
    search reduces to choosing one leftover facet on each side; delta is
    solved from the basis columns, and in the Z case the per-column sign
    pattern is pinned by expressing both leftover vectors in their
    bases, so no sign enumeration is needed.
    """
    fids1, fids2 = sorted(pair1.polytope.facet_ids), sorted(pair2.polytope.facet_ids)
    for g1 in fids1:
        b1 = [f for f in fids1 if f != g1]
        v = [pair1.chi.vectors[f] for f in b1]
        c = _express_in_basis(v, pair1.chi.vectors[g1])
        if c is None:
            continue
        for g2 in fids2:
            b2 = [f for f in fids2 if f != g2]
            w = [pair2.chi.vectors[f] for f in b2]
            fmap = {f: g for f, g in zip(b1, b2)}
            fmap[g1] = g2
            if pair1.ring == RING_GF2:
                delta = _solve_delta_gf2(v, w)
                if delta is None:
                    continue
                t = DeltaTranslation(RING_GF2, fmap, delta)
            else:
                u = _express_in_basis(w, pair2.chi.vectors[g2])
                if u is None or any(abs(a) != abs(b) for a, b in zip(c, u)):
                    continue
                signs = [1 if a == b else -1 for a, b in zip(c, u)]
                delta = _solve_delta_z(
                    v, [tuple(s * x for x in wv) for s, wv in zip(signs, w)]
                )
                if delta is None:
                    continue
                t = DeltaTranslation(RING_Z, fmap, delta)
            if verify_delta_translation(pair1, pair2, t):
                return t
    return None


def _solve_delta_gf2(basis_vecs, image_vecs) -> Optional[tuple[tuple[int, ...], ...]]:
    # delta @ V = W where the columns of V are the basis vectors
    vmat = Gf2Matrix.from_vectors(list(zip(*basis_vecs)))
    vinv = vmat.inverse()
    if vinv is None:
        return None
    wmat = Gf2Matrix.from_vectors(list(zip(*image_vecs)))
    return wmat.mul(vinv).row_tuples()


def find_delta_translation(
    pair1: CharacteristicPair,
    pair2: CharacteristicPair,
    *,
    max_bijections: int = 200_000,
) -> Optional[DeltaTranslation]:
    """Search for a translation carrying pair1 to pair2.

    Backtracks over facet bijections (combinatorial isomorphisms); for
    each one delta is solved from rank-many independent facet vectors,
    with sign enumeration capped at 2^(rank+1) per bijection in the Z
    case.  Found translations are re-verified before being returned.
    Intended for small polytopes; raises SearchCapExceeded beyond the
    bijection cap.
    """
    if pair1.ring != pair2.ring:
        raise RingMismatch("pairs live over different rings")
    if (
        pair1.polytope.is_simplex_lattice()
        and pair2.polytope.is_simplex_lattice()
        and pair1.is_closed()
        and pair2.is_closed()
    ):
        return _find_simplex_translation(pair1, pair2)

    rank = pair1.chi.rank
    basis = _independent_assigned_facets(pair1)
    if basis is None:
        raise InvalidPair("pair1 has no independent spanning facet set")
    basis_vecs = [pair1.chi.vectors[f] for f in basis]
    assigned1 = pair1.chi.assigned()
    assigned2 = pair2.chi.assigned()

    tried = 0
    for fmap in pair1.polytope.iter_isomorphisms(pair2.polytope):
        tried += 1
        if tried > max_bijections:
            raise SearchCapExceeded(
                f"more than {max_bijections} facet bijections examined"
            )
        if {fmap[f] for f in assigned1} != set(assigned2):
            continue
        image_vecs = [pair2.chi.vectors[fmap[f]] for f in basis]
        if pair1.ring == RING_GF2:
            delta = _solve_delta_gf2(basis_vecs, image_vecs)
            if delta is None:
                continue
            t = DeltaTranslation(RING_GF2, fmap, delta)
            if verify_delta_translation(pair1, pair2, t):
                return t
        else:
            for signs in iproduct((1, -1), repeat=rank - 1):
                full = (1,) + signs
                delta = _solve_delta_z(
                    basis_vecs,
                    [tuple(s * x for x in w) for s, w in zip(full, image_vecs)],
                )
                if delta is None:
                    continue
                t = DeltaTranslation(RING_Z, fmap, delta)
                if verify_delta_translation(pair1, pair2, t):
                    return t
    return None


def orientation_effect(
    t: DeltaTranslation,
    source: CharacteristicPair,
    target: CharacteristicPair,
) -> int:
    """Orientation effect of a translation between Z pairs.

    The sign is det(delta) times the parity of the vertex permutation
    induced by the facet map, measured against the two pairs' declared
    vertex-order data, times the pairs' group signs.
    """
    if t.ring != RING_Z:
        raise RingMismatch("orientation effect is defined for Z translations")
    d = det_sign(t.delta)
    if d == 0:
        raise SingularDelta("delta is singular")

    p, q = source.polytope, target.polytope
    target_index = {fs: i for i, fs in enumerate(q.vertex_facets)}
    src_order = source.order()
    tgt_pos = {v: k for k, v in enumerate(target.order())}
    perm = []
    for i in src_order:
        image = frozenset(t.facet_map[f] for f in p.vertex_facets[i])
        j = target_index.get(image)
        if j is None:
            raise PairError("facet map does not induce a vertex bijection")
        perm.append(tgt_pos[j])
    return d * permutation_sign(perm) * source.group_sign * target.group_sign
