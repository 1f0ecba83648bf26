"""Nerves of multiplicity-2 covers, the partition-of-unity map into the
nerve, barycentric subdivision, stars, and the cover transforms linking the
five characterisations of complexity omega.

Geometry inside the standard simplex of l2 is exact: vertex ``u`` is the
basis vector ``e_u``, points are rational convex combinations of at most
two vertices, and only squared distances are ever formed.

Transform names follow the implication they realise: ``transform_T12``
turns two r-disjoint families into a cover of small d-multiplicity, and so on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .decomposition import DecompositionWitness, verify_witness
from .errors import CertificationError, PreconditionError
from .metric import (
    FiniteMetricSpace,
    closed_ball,
    covers,
    d_multiplicity,
    enlarge,
    family_diam,
    fits_all_sets,
    is_r_disjoint,
    lebesgue_exceeds,
    multiplicity,
)

QUARTER = Fraction(1, 4)
THREE_QUARTERS = Fraction(3, 4)


@dataclass(frozen=True)
class UniformComplex1:
    vertices: tuple
    edges: frozenset

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"edge {set(e)} is not a pair of distinct vertices")
            if not e <= vs:
                raise ValueError(f"edge {set(e)} has an endpoint outside the vertex set")

    def neighbours(self, u) -> list:
        return sorted(next(iter(e - {u})) for e in self.edges if u in e)


@dataclass(frozen=True)
class ComplexPoint:
    """A convex combination of at most two basis vectors, weights positive and summing to 1."""

    coords: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        coords = tuple(sorted((u, Fraction(w)) for u, w in self.coords if w != 0))
        if not 1 <= len(coords) <= 2:
            raise ValueError("a point of a 1-complex has one or two nonzero weights")
        if any(w < 0 for _, w in coords) or sum(w for _, w in coords) != 1:
            raise ValueError("weights must be non-negative and sum to 1")
        if len(coords) == 2 and coords[0][0] == coords[1][0]:
            raise ValueError("repeated vertex")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def vertex(cls, u) -> "ComplexPoint":
        return cls(((u, Fraction(1)),))

    @classmethod
    def on_edge(cls, u, v, alpha) -> "ComplexPoint":
        """``(1 - alpha) e_u + alpha e_v``; endpoints collapse to vertices."""
        alpha = Fraction(alpha)
        if not 0 <= alpha <= 1:
            raise ValueError("barycentric coordinate outside [0, 1]")
        return cls(((u, 1 - alpha), (v, alpha)))

    @property
    def carrier(self) -> frozenset:
        return frozenset(u for u, _ in self.coords)

    def weight(self, u) -> Fraction:
        for v, w in self.coords:
            if v == u:
                return w
        return Fraction(0)


def complex_distance_sq(p: ComplexPoint, q: ComplexPoint) -> Fraction:
    a, b = dict(p.coords), dict(q.coords)
    return sum(((a.get(u, 0) - b.get(u, 0)) ** 2 for u in a.keys() | b.keys()), Fraction(0))


def nerve(cover: Sequence[Iterable[int]]) -> UniformComplex1:
    """One vertex per piece, an edge per intersecting pair; needs multiplicity <= 2."""
    pieces = [frozenset(p) for p in cover]
    owners: dict[int, list[int]] = {}
    for k, p in enumerate(pieces):
        for x in p:
            owners.setdefault(x, []).append(k)
    edges = set()
    for x, ks in owners.items():
        if len(ks) > 2:
            raise PreconditionError(f"point {x} lies in {len(ks)} pieces; the nerve would need a 2-simplex")
        if len(ks) == 2:
            edges.add(frozenset(ks))
    return UniformComplex1(tuple(range(len(pieces))), frozenset(edges))


# -- partition of unity -----------------------------------------------------

@dataclass
class PartitionOfUnity:
    space: FiniteMetricSpace
    cover: tuple[frozenset, ...]
    values: tuple[ComplexPoint, ...]
    # sum over pieces of d(x, X - W), per point
    denominators: tuple = ()

    def __call__(self, x: int) -> ComplexPoint:
        return self.values[x]


def phi_map(space: FiniteMetricSpace, cover: Sequence[Iterable[int]]) -> PartitionOfUnity:
    """``phi_W(x) = d(x, X - W) / sum_V d(x, X - V)``."""
    pieces = tuple(frozenset(p) for p in cover)
    n = len(space)
    if not covers(space, pieces):
        raise PreconditionError("phi needs a cover")
    if any(len(p) == n for p in pieces):
        raise PreconditionError("a piece equals the whole space, so its complement is empty")
    if multiplicity(space, pieces) > 2:
        raise PreconditionError("phi needs multiplicity <= 2")
    comp_dist = []
    for p in pieces:
        outside = [j for j in range(n) if j not in p]
        comp_dist.append({x: min(space.dist[x][j] for j in outside) for x in p})
    values, denoms = [], []
    for x in range(n):
        terms = [(k, cd[x]) for k, cd in enumerate(comp_dist) if x in cd]
        total = sum(t for _, t in terms)
        values.append(ComplexPoint(tuple((k, Fraction(t) / total) for k, t in terms)))
        denoms.append(total)
    return PartitionOfUnity(space, pieces, tuple(values), tuple(denoms))


@dataclass
class LipschitzReport:
    lam: Fraction
    bound_sq: Fraction
    max_ratio_sq: Fraction = Fraction(0)
    worst_pair: tuple | None = None
    min_denominator: Fraction | None = None
    max_active: int = 0
    coordinate_failures: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (not self.failures and self.coordinate_failures == 0
                and self.max_active <= 4
                and (self.min_denominator is None or self.min_denominator >= self.lam / 2))


def realized_ratio_sq(pou: PartitionOfUnity) -> tuple[Fraction, tuple | None]:
    """Largest ``|phi(x) - phi(y)|^2 / d(x, y)^2`` over distinct pairs."""
    best, arg = Fraction(0), None
    dist = pou.space.dist
    vals = pou.values
    for x, y in itertools.combinations(range(len(vals)), 2):
        if vals[x] == vals[y]:
            continue
        r = complex_distance_sq(vals[x], vals[y]) / Fraction(dist[x][y]) ** 2
        if r > best:
            best, arg = r, (x, y)
    return best, arg


def lipschitz_bound_check(pou: PartitionOfUnity, lam) -> LipschitzReport:
    """Certify ``|phi(x) - phi(y)|^2 <= (400 / lam^2) d(x, y)^2`` on every pair,
    together with the intermediate facts the bound rests on: every
    denominator is at least ``lam / 2``, each coordinate moves by at most
    ``(10 / lam) d(x, y)``, and at most 4 pieces are active across a pair.
    """
    lam = Fraction(lam)
    space, cover = pou.space, pou.cover
    if multiplicity(space, cover) > 2:
        raise PreconditionError("multiplicity exceeds 2")
    if not lebesgue_exceeds(space, cover, lam):
        raise PreconditionError(f"Lebesgue number of the cover is not above {lam}")
    rep = LipschitzReport(lam, 400 / lam**2)
    rep.min_denominator = min(pou.denominators) if pou.denominators else None
    dist = space.dist
    vals = pou.values
    for x, y in itertools.combinations(range(len(vals)), 2):
        px, py = vals[x], vals[y]
        active = px.carrier | py.carrier
        rep.max_active = max(rep.max_active, len(active))
        if px == py:
            continue
        d = Fraction(dist[x][y])
        r = complex_distance_sq(px, py) / d**2
        if r > rep.max_ratio_sq:
            rep.max_ratio_sq, rep.worst_pair = r, (x, y)
        if r > rep.bound_sq:
            rep.failures.append((x, y, r))
        for u in active:
            if abs(px.weight(u) - py.weight(u)) * lam > 10 * d:
                rep.coordinate_failures += 1
    return rep


# -- barycentric subdivision and stars ---------------------------------------

@dataclass(frozen=True)
class DerivedVertex:
    """A vertex of a subdivision: an original vertex (step 0) or a barycenter
    created at subdivision ``step`` on the base simplex ``simplex``."""

    point: ComplexPoint
    step: int
    simplex: frozenset

    @property
    def kind(self) -> str:
        return "vertex" if self.step == 0 else "barycenter"


@dataclass(frozen=True)
class SubdividedComplex:
    base: UniformComplex1
    level: int
    vertices: tuple[DerivedVertex, ...]
    segments: tuple[tuple[ComplexPoint, ComplexPoint], ...]

    def vertex_at(self, p: ComplexPoint) -> DerivedVertex | None:
        for v in self.vertices:
            if v.point == p:
                return v
        return None


def _two_adic(j: int) -> int:
    return (j & -j).bit_length() - 1


def barycentric_subdivide(k: UniformComplex1, times: int) -> SubdividedComplex:
    """Split each edge into ``2**times`` equal segments (``times`` in {1, 2})."""
    if times not in (1, 2):
        raise ValueError("only the first and second barycentric subdivisions are supported")
    m = 2**times
    verts = [DerivedVertex(ComplexPoint.vertex(u), 0, frozenset({u})) for u in k.vertices]
    segs = []
    for e in sorted(k.edges, key=sorted):
        u, v = sorted(e)
        pts = [ComplexPoint.on_edge(u, v, Fraction(j, m)) for j in range(m + 1)]
        for j in range(1, m):
            verts.append(DerivedVertex(pts[j], times - _two_adic(j), e))
        segs.extend(zip(pts[:-1], pts[1:]))
    return SubdividedComplex(k, times, tuple(verts), tuple(segs))


def _edge_position(p: ComplexPoint) -> tuple[int, int, Fraction]:
    (u, _), (v, wv) = p.coords
    return u, v, wv


def star(v: DerivedVertex, s: SubdividedComplex, closed: bool = False) -> Callable[[ComplexPoint], bool]:
    """Membership test for the (open, or closed) star of ``v`` in ``s``.

    The open star is the set of points whose carrier simplex in ``s``
    contains ``v``; the closed star is its closure.
    """
    if v not in s.vertices:
        raise KeyError("vertex is not in the subdivided complex")
    m = 2**s.level
    edges = s.base.edges
    target = v.point

    def member(p: ComplexPoint) -> bool:
        if p == target:
            return True
        if len(p.coords) == 1:
            if not closed:
                return False
            # a vertex of K lies in the closed star iff it is a segment end
            # adjacent to target
            return any(p in seg and target in seg for seg in s.segments)
        u, w, alpha = _edge_position(p)
        if frozenset((u, w)) not in edges:
            return False
        if len(target.coords) == 1:
            (t, _), = target.coords
            if t not in (u, w):
                return False
            # distance from the target vertex measured in segments
            pos = alpha if t == u else 1 - alpha
            return pos <= Fraction(1, m) if closed else pos < Fraction(1, m)
        tu, tw, talpha = _edge_position(target)
        if (tu, tw) != (u, w):
            return False
        gap = abs(alpha - talpha)
        return gap <= Fraction(1, m) if closed else gap < Fraction(1, m)

    return member


def _barycenter_stars(k: UniformComplex1, dim: int) -> list[tuple[object, DerivedVertex]]:
    s = barycentric_subdivide(k, 2)
    out = []
    for v in s.vertices:
        if dim == 0 and v.step == 0:
            out.append((next(iter(v.simplex)), v))
        elif dim == 1 and v.step == 1:
            out.append((v.simplex, v))
    return out


# -- the separation constant -------------------------------------------------

def _sub(a: dict, b: dict) -> dict:
    return {u: a.get(u, 0) - b.get(u, 0) for u in a.keys() | b.keys()}


def _dot(a: dict, b: dict) -> Fraction:
    return sum((a[u] * b.get(u, 0) for u in a), Fraction(0))


def segment_distance_sq(p0: ComplexPoint, p1: ComplexPoint,
                        q0: ComplexPoint, q1: ComplexPoint) -> Fraction:
    """Exact min of ``|p(s) - q(t)|^2`` over both closed segments.

    The objective is a convex quadratic on the unit square; its minimum is
    at a corner, at a clamped critical point of an edge, or at the
    unconstrained critical point when that lies inside.
    """
    P0, Q0 = dict(p0.coords), dict(q0.coords)
    U = _sub(dict(p1.coords), P0)
    V = _sub(dict(q1.coords), Q0)
    D = _sub(P0, Q0)

    def f(s, t):
        vec = {u: D.get(u, 0) + s * U.get(u, 0) - t * V.get(u, 0) for u in D.keys() | U.keys() | V.keys()}
        return _dot(vec, vec)

    uu, vv, uv = _dot(U, U), _dot(V, V), _dot(U, V)
    du, dv = _dot(D, U), _dot(D, V)
    clamp = lambda z: min(max(z, Fraction(0)), Fraction(1))  # noqa: E731
    cands = [(Fraction(s), Fraction(t)) for s in (0, 1) for t in (0, 1)]
    for s in (Fraction(0), Fraction(1)):
        if vv:
            cands.append((s, clamp((dv + s * uv) / vv)))
    for t in (Fraction(0), Fraction(1)):
        if uu:
            cands.append((clamp((t * uv - du) / uu), t))
    det = uu * vv - uv * uv
    if det:
        # grad: s*uu - t*uv + du = 0 ; -s*uv + t*vv - dv = 0
        s = (-du * vv + uv * dv) / det
        t = (uu * dv - uv * du) / det
        if 0 <= s <= 1 and 0 <= t <= 1:
            cands.append((s, t))
    return min(f(s, t) for s, t in cands)


def _star_segments(dim: int, simplex: tuple) -> list[tuple[ComplexPoint, ComplexPoint]]:
    if dim == 0:
        u, x = simplex
        return [(ComplexPoint.vertex(u), ComplexPoint.on_edge(u, x, QUARTER))]
    u, v = simplex
    return [(ComplexPoint.on_edge(u, v, QUARTER), ComplexPoint.on_edge(u, v, THREE_QUARTERS))]


def star_pair_configurations(dim: int) -> list[tuple[tuple, tuple]]:
    """Every way two closed stars of distinct dim-``dim`` barycenters can sit
    in a uniform 1-complex, up to relabelling.

    For ``dim == 0`` a configuration is (``(u, x)``, ``(w, y)``): star of ``u``
    along edge ``ux`` against star of ``w`` along edge ``wy``.  For
    ``dim == 1`` it is a pair of distinct edges.
    """
    configs = []
    for w, y in itertools.permutations(range(4), 2):
        if dim == 0 and w == 0:
            continue
        if dim == 1 and {w, y} == {0, 1}:
            continue
        # canonical labels: fresh vertices are introduced in increasing order
        used = [0, 1]
        ok = True
        for z in (w, y):
            if z not in used:
                if z != max(used) + 1:
                    ok = False
                used.append(z)
        if ok:
            configs.append(((0, 1), (w, y)))
    return configs


def disjointness_constant_sq(dim: int) -> Fraction:
    """Squared l2 separation between closed stars, in the second barycentric
    subdivision of any uniform 1-complex, of distinct barycenters of
    ``dim``-simplices."""
    if dim not in (0, 1):
        raise ValueError("dim must be 0 or 1")
    best = None
    for a, b in star_pair_configurations(dim):
        for p0, p1 in _star_segments(dim, a):
            for q0, q1 in _star_segments(dim, b):
                d = segment_distance_sq(p0, p1, q0, q1)
                best = d if best is None else min(best, d)
    return best


def separation_sq() -> Fraction:
    """Squared separation valid for both families at once."""
    return min(disjointness_constant_sq(0), disjointness_constant_sq(1))


# -- transforms --------------------------------------------------------------

def _pieces(fam) -> tuple[frozenset, ...]:
    return tuple(frozenset(p) for p in fam if p)


def transform_T12(space: FiniteMetricSpace, family0, family1, r, d) -> tuple[frozenset, ...]:
    """Union of two r-disjoint families with ``r > 2d``; d-multiplicity <= 2."""
    r, d = Fraction(r), Fraction(d)
    f0, f1 = _pieces(family0), _pieces(family1)
    if not r > 2 * d:
        raise PreconditionError(f"need r > 2d, got r={r}, d={d}")
    if not (is_r_disjoint(space, f0, r) and is_r_disjoint(space, f1, r)):
        raise PreconditionError("families are not r-disjoint")
    cover = f0 + f1
    if not covers(space, cover):
        raise PreconditionError("families do not cover the space")
    if d_multiplicity(space, cover, d) > 2:
        raise CertificationError("d-multiplicity above 2")
    return cover


def transform_T23(space: FiniteMetricSpace, cover, lam) -> tuple[frozenset, ...]:
    """Open ``2 lam``-neighbourhoods of the pieces: multiplicity <= 2 and Lebesgue number > lam."""
    lam = Fraction(lam)
    cover = _pieces(cover)
    if not covers(space, cover):
        raise PreconditionError("input is not a cover")
    if d_multiplicity(space, cover, 2 * lam) > 2:
        raise PreconditionError(f"{2 * lam}-multiplicity exceeds 2")
    out = tuple(enlarge(space, v, 2 * lam, strict=True) for v in cover)
    if multiplicity(space, out) > 2:
        raise CertificationError("enlarged cover has multiplicity above 2")
    if not fits_all_sets(space, out, lam):
        raise CertificationError(f"some set of diameter <= {lam} fits in no enlarged piece")
    if not lebesgue_exceeds(space, out, lam):
        raise CertificationError(f"Lebesgue number of the enlarged cover is not above {lam}")
    return out


def transform_T34(space: FiniteMetricSpace, cover, lam) -> tuple[UniformComplex1, PartitionOfUnity]:
    """Nerve and partition of unity; certifies star preimages and the 20/lam bound."""
    lam = Fraction(lam)
    cover = _pieces(cover)
    if multiplicity(space, cover) > 2:
        raise PreconditionError("multiplicity exceeds 2")
    if not lebesgue_exceeds(space, cover, lam):
        raise PreconditionError(f"Lebesgue number is not above {lam}")
    k = nerve(cover)
    pou = phi_map(space, cover)
    for w, piece in enumerate(cover):
        pre = frozenset(x for x, p in enumerate(pou.values) if p.weight(w) > 0)
        if pre != piece:
            raise CertificationError(f"star preimage of vertex {w} differs from its piece")
    for p in pou.values:
        if len(p.coords) == 2 and p.carrier not in k.edges:
            raise CertificationError("phi leaves the nerve")
    rep = lipschitz_bound_check(pou, lam)
    if not rep.passed:
        raise CertificationError(f"Lipschitz bound fails: max ratio {rep.max_ratio_sq} > {rep.bound_sq}")
    return k, pou


def transform_T41(space: FiniteMetricSpace, pou: PartitionOfUnity, r,
                  check_premise: bool = True) -> DecompositionWitness:
    """Preimages of closed stars of the second-subdivision barycenters.

    ``family0`` holds ``{x : phi_u(x) >= 3/4}`` per vertex ``u``;
    ``family1`` holds ``{x : phi(x)`` on edge ``e`` with both weights in
    ``[1/4, 3/4]}`` per edge ``e``.  With ``phi`` ``(c/r)``-Lipschitz both
    families are r-disjoint.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    c_sq = separation_sq()
    if check_premise:
        ratio, pair = realized_ratio_sq(pou)
        if ratio * r * r > c_sq:
            raise PreconditionError(
                f"phi is not (c/r)-Lipschitz on the sample: ratio^2 {ratio} > c^2/r^2 {c_sq / r**2} at {pair}")
    fam0: dict = {}
    fam1: dict = {}
    for x, p in enumerate(pou.values):
        for u, w in p.coords:
            if w >= THREE_QUARTERS:
                fam0.setdefault(u, set()).add(x)
        if len(p.coords) == 2 and all(QUARTER <= w <= THREE_QUARTERS for _, w in p.coords):
            fam1.setdefault(p.carrier, set()).add(x)
    f0 = tuple(frozenset(fam0[u]) for u in sorted(fam0))
    f1 = tuple(frozenset(fam1[e]) for e in sorted(fam1, key=sorted))
    w = DecompositionWitness(r, f0, f1)
    if check_premise:
        rep = verify_witness(space, w)
        if not rep.verdict:
            raise CertificationError(f"preimage families fail: {rep.failures[0].detail}")
    return w


def transform_T15(space: FiniteMetricSpace, bounded_cover, family0, family1, r) -> tuple[frozenset, ...]:
    """Closed ``B``-neighbourhoods of r-disjoint pieces, ``B`` the cover's diameter bound."""
    r = Fraction(r)
    vcover = _pieces(bounded_cover)
    f0, f1 = _pieces(family0), _pieces(family1)
    bound = family_diam(space, vcover)
    if not r > 2 * bound:
        raise PreconditionError(f"need r > 2B, got r={r}, B={bound}")
    if not (is_r_disjoint(space, f0, r) and is_r_disjoint(space, f1, r)):
        raise PreconditionError("families are not r-disjoint")
    if not covers(space, f0 + f1):
        raise PreconditionError("families do not cover the space")
    u0 = tuple(enlarge(space, w, bound, strict=False) for w in f0)
    u1 = tuple(enlarge(space, w, bound, strict=False) for w in f1)
    out = u0 + u1
    for fam in (u0, u1):
        if multiplicity(space, fam) > 1:
            raise CertificationError("enlargements within one family overlap")
    if multiplicity(space, out) > 2:
        raise CertificationError("multiplicity above 2")
    unrefined = [v for v in vcover if not any(v <= u for u in out)]
    if unrefined:
        raise CertificationError(f"{len(unrefined)} pieces of the bounded cover fit in no enlargement")
    return out


def ball_cover(space: FiniteMetricSpace, lam) -> tuple[frozenset, ...]:
    """``{B_lam(x) : x in X}`` with closed balls."""
    return tuple(closed_ball(space, x, lam) for x in range(len(space)))


def transform_T53(space: FiniteMetricSpace, lam, refinement_oracle: Callable) -> tuple[frozenset, ...]:
    """Feed the ball cover to ``refinement_oracle`` and certify what comes back.

    The oracle must return a cover of multiplicity <= 2 refined by the
    balls; the result then holds every set of diameter <= lam in one piece.
    """
    lam = Fraction(lam)
    balls = ball_cover(space, lam)
    out = _pieces(refinement_oracle(space, balls))
    if not covers(space, out):
        raise CertificationError("oracle output is not a cover")
    if multiplicity(space, out) > 2:
        raise CertificationError("oracle output has multiplicity above 2")
    if not all(any(b <= u for u in out) for b in balls):
        raise CertificationError("ball cover does not refine the oracle output")
    if not fits_all_sets(space, out, lam):
        raise CertificationError(f"a set of diameter <= {lam} fits in no piece")
    return out


def t15_oracle(families_for: Callable) -> Callable:
    """Refinement oracle built from ``transform_T15``.

    ``families_for(space, r)`` must return two r-disjoint covering families.
    """
    def oracle(space: FiniteMetricSpace, bounded_cover):
        bound = family_diam(space, bounded_cover)
        r = 2 * Fraction(bound) + 1
        f0, f1 = families_for(space, r)
        return transform_T15(space, bounded_cover, f0, f1, r)
    return oracle


def largest_admissible_r(ratio_sq: Fraction, denominator: int = 1000) -> Fraction:
    """Largest ``k / denominator`` with ``ratio_sq * r^2 <= c^2``."""
    c_sq = separation_sq()
    if ratio_sq == 0:
        raise ValueError("phi is constant; every r is admissible")
    # r^2 <= c_sq / ratio_sq  <=>  k^2 <= denominator^2 * c_sq / ratio_sq
    q = denominator**2 * c_sq / ratio_sq
    k = math.isqrt(q.numerator // q.denominator)
    return Fraction(k, denominator)
