"""Finite metric spaces with exact rational distances, and cover statistics.

Pieces are ``frozenset`` objects of point indices into a ``FiniteMetricSpace``;
a cover (or any family) is a sequence of pieces over one space.

Conventions: the ball ``B_d(x)`` is closed (``d(x, y) <= d``), and the
neighbourhood ``N_r(V)`` used by ``enlarge(..., strict=True)`` is open
(``d(x, V) < r``).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionError, max_points
from .group import Group
from .serialize import (
    decode_element,
    encode_element,
    format_rational,
    normalize_rational,
    parse_rational,
)
from .wordmetric import bfs_oracle, word_length

Piece = frozenset
INF = math.inf


class FiniteMetricSpace:
    """Labelled points with an exact, symmetric distance table.

    Construction checks the cheap axioms (zero diagonal, symmetry,
    positivity off the diagonal).  The triangle inequality is checked on
    demand by :func:`metric_violations`.
    """

    def __init__(self, points: Sequence, dist: Sequence[Sequence], check: bool = True):
        n = len(points)
        if len(dist) != n or any(len(row) != n for row in dist):
            raise ValueError("distance table must be square with one row per point")
        self.points = tuple(points)
        self.dist = tuple(tuple(normalize_rational(v) for v in row) for row in dist)
        if check:
            for i in range(n):
                if self.dist[i][i] != 0:
                    raise ValueError(f"d(x, x) != 0 at point {i}")
                for j in range(i + 1, n):
                    if self.dist[i][j] != self.dist[j][i]:
                        raise ValueError(f"asymmetric distance at ({i}, {j})")
                    if self.dist[i][j] <= 0:
                        raise ValueError(f"non-positive distance between distinct points {i}, {j}")

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({len(self)} points)"

    @property
    def everything(self) -> frozenset:
        return frozenset(range(len(self.points)))

    def index(self, label) -> int:
        return self.points.index(label)

    def distances(self) -> list:
        """Distinct realised distances (including 0), ascending."""
        vals = {0}
        for row in self.dist:
            vals.update(row)
        return sorted(vals)

    def subspace(self, indices: Iterable[int]) -> "FiniteMetricSpace":
        idx = sorted(indices)
        return FiniteMetricSpace(
            [self.points[i] for i in idx],
            [[self.dist[i][j] for j in idx] for i in idx],
            check=False,
        )

    def to_json(self) -> dict:
        return {
            "points": [encode_label(p) for p in self.points],
            "dist": [[format_rational(v) for v in row] for row in self.dist],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteMetricSpace":
        if set(obj) - {"points", "dist"} or "points" not in obj or "dist" not in obj:
            raise ValueError("space JSON needs exactly 'points' and 'dist'")
        return cls([decode_label(p) for p in obj["points"]],
                   [[parse_rational(v) for v in row] for row in obj["dist"]])


def encode_label(label):
    try:
        return encode_element(label)
    except TypeError:
        if isinstance(label, str):
            return label
        raise


def decode_label(obj):
    if isinstance(obj, str):
        return obj
    return decode_element(obj)


def _scaled_integer_table(space: FiniteMetricSpace) -> np.ndarray:
    den = 1
    for row in space.dist:
        for v in row:
            if isinstance(v, Fraction):
                den = math.lcm(den, v.denominator)
    table = [[int(v * den) for v in row] for row in space.dist]
    big = max((abs(v) for row in table for v in row), default=0)
    dtype = np.int64 if 3 * big < 2**62 else object
    return np.array(table, dtype=dtype).reshape(len(space), len(space))


def metric_violations(space: FiniteMetricSpace, exhaustive_limit: int = 200,
                      samples: int = 200_000, seed: int = 0) -> list[tuple[int, int, int]]:
    """Triples ``(i, k, j)`` with ``d(i, j) > d(i, k) + d(k, j)``.

    Every triple is checked up to ``exhaustive_limit`` points (exactly, by
    scaling all distances to a common integer denominator); larger spaces
    are sampled.
    """
    n = len(space)
    bad: list[tuple[int, int, int]] = []
    if n == 0:
        return bad
    if n <= exhaustive_limit:
        d = _scaled_integer_table(space)
        for k in range(n):
            via = d[:, k][:, None] + d[k, :][None, :]
            hits = np.argwhere(d > via)
            bad.extend((int(i), k, int(j)) for i, j in hits)
        return bad
    rng = random.Random(seed)
    dist = space.dist
    for _ in range(samples):
        i, j, k = rng.randrange(n), rng.randrange(n), rng.randrange(n)
        if dist[i][j] > dist[i][k] + dist[k][j]:
            bad.append((i, k, j))
    return bad


# -- scalar statistics ------------------------------------------------------

def _nonempty(piece, what: str = "piece") -> None:
    if not piece:
        raise ValueError(f"empty {what}")


def diam(space: FiniteMetricSpace, piece: Iterable[int]):
    pts = list(piece)
    _nonempty(pts)
    dist = space.dist
    return max((dist[i][j] for i in pts for j in pts), default=0)


def family_diam(space: FiniteMetricSpace, family: Iterable[Iterable[int]]):
    """Supremum of the piece diameters (0 for an empty family)."""
    return max((diam(space, p) for p in family), default=0)


def set_distance(space: FiniteMetricSpace, u: Iterable[int], v: Iterable[int]):
    u, v = list(u), list(v)
    _nonempty(u)
    _nonempty(v)
    dist = space.dist
    return min(dist[i][j] for i in u for j in v)


def point_set_distance(space: FiniteMetricSpace, x: int, piece: Iterable[int]):
    row = space.dist[x]
    return min(row[j] for j in piece)


def closest_pair(space: FiniteMetricSpace, u, v) -> tuple[int, int]:
    dist = space.dist
    return min(((i, j) for i in u for j in v), key=lambda ij: dist[ij[0]][ij[1]])


def is_r_disjoint(space: FiniteMetricSpace, family: Sequence[Iterable[int]], r) -> bool:
    return first_close_pair(space, family, r) is None


def first_close_pair(space: FiniteMetricSpace, family: Sequence[Iterable[int]], r):
    """First ``(a, b)`` piece indices with ``d(family[a], family[b]) < r``, else ``None``."""
    pieces = [list(p) for p in family]
    for a, b in itertools.combinations(range(len(pieces)), 2):
        if set_distance(space, pieces[a], pieces[b]) < r:
            return a, b
    return None


def covers(space: FiniteMetricSpace, family: Iterable[Iterable[int]]) -> bool:
    return uncovered_points(space, family) == []


def uncovered_points(space: FiniteMetricSpace, family: Iterable[Iterable[int]]) -> list[int]:
    seen: set[int] = set()
    for p in family:
        seen.update(p)
    return [i for i in range(len(space)) if i not in seen]


def multiplicity(space: FiniteMetricSpace, cover: Sequence[Iterable[int]]) -> int:
    """Largest number of pieces sharing a point."""
    counts = [0] * len(space)
    for p in cover:
        for i in p:
            counts[i] += 1
    return max(counts, default=0)


def d_multiplicity(space: FiniteMetricSpace, cover: Sequence[Iterable[int]], d) -> int:
    """Largest number of pieces meeting a closed ball ``B_d(x)``."""
    pieces = [list(p) for p in cover if p]
    best = 0
    for x in range(len(space)):
        row = space.dist[x]
        n = sum(1 for p in pieces if min(row[j] for j in p) <= d)
        best = max(best, n)
    return best


def enlarge(space: FiniteMetricSpace, piece: Iterable[int], radius, strict: bool = True) -> frozenset:
    """``{x : d(x, piece) < radius}`` (strict) or ``<= radius``."""
    members = list(piece)
    _nonempty(members)
    out = []
    for x, row in enumerate(space.dist):
        dx = min(row[j] for j in members)
        if (dx < radius) if strict else (dx <= radius):
            out.append(x)
    # a point of the piece always has distance 0; keep it even when radius <= 0
    return frozenset(out) | frozenset(members)


def closed_ball(space: FiniteMetricSpace, x: int, radius) -> frozenset:
    return frozenset(j for j, v in enumerate(space.dist[x]) if v <= radius)


# -- Lebesgue number --------------------------------------------------------

def _threshold_graph(space: FiniteMetricSpace, lam) -> list[set[int]]:
    return [{j for j, v in enumerate(row) if v <= lam and j != i} for i, row in enumerate(space.dist)]


def unfit_clique(space: FiniteMetricSpace, cover: Sequence[Iterable[int]], lam) -> frozenset | None:
    """A set of diameter <= ``lam`` lying in no piece, or ``None`` if there is none.

    Such sets are exactly the cliques of the threshold graph ``d <= lam``,
    so it suffices to look at maximal cliques (Bron-Kerbosch with pivot).
    A branch is cut as soon as everything it could still produce sits
    inside one piece.
    """
    adj = _threshold_graph(space, lam)
    pieces = [frozenset(p) for p in cover]

    def search(R: frozenset, P: set, X: set, live: list[frozenset]) -> frozenset | None:
        cand = R | P
        if any(cand <= p for p in live):
            return None
        if not P:
            return R if not X else None
        pivot = max(P | X, key=lambda u: len(adj[u] & P))
        for v in list(P - adj[pivot]):
            R2 = R | {v}
            found = search(R2, P & adj[v], X & adj[v], [p for p in live if v in p])
            if found is not None:
                return found
            P = P - {v}
            X = X | {v}
        return None

    return search(frozenset(), set(range(len(space))), set(), pieces)


def fits_all_sets(space: FiniteMetricSpace, cover: Sequence[Iterable[int]], lam) -> bool:
    """True iff every subset of diameter <= ``lam`` lies inside a single piece."""
    return unfit_clique(space, cover, lam) is None


def lebesgue_number(space: FiniteMetricSpace, cover: Sequence[Iterable[int]]):
    """Largest realised distance ``lam`` such that every set of diameter
    <= ``lam`` fits in one piece; ``math.inf`` if some piece is the whole space.
    """
    n = len(space)
    pieces = [frozenset(p) for p in cover]
    if any(len(p) == n for p in pieces):
        return INF
    if not covers(space, pieces):
        raise PreconditionError("Lebesgue number needs a cover")
    best = 0
    for lam in space.distances():
        if lam == 0:
            continue
        if not fits_all_sets(space, pieces, lam):
            return best
        best = lam
    return best  # pragma: no cover - the whole space would fit in a piece


def lebesgue_exceeds(space: FiniteMetricSpace, cover: Sequence[Iterable[int]], lam) -> bool:
    """Whether ``lebesgue_number(space, cover) > lam``, testing one threshold only."""
    pieces = [frozenset(p) for p in cover]
    if any(len(p) == len(space) for p in pieces):
        return True
    above = [d for d in space.distances() if d > lam]
    if not above:
        return False
    return fits_all_sets(space, pieces, above[0])


# -- coarse maps ------------------------------------------------------------

@dataclass(frozen=True)
class Staircase:
    """Non-decreasing function given by breakpoints with an optional linear tail.

    ``f(t) = values[i]`` for ``steps[i] <= t < steps[i+1]`` and
    ``f(t) = values[-1] + slope * (t - steps[-1])`` past the last breakpoint.
    """

    steps: tuple = (0,)
    values: tuple = (0,)
    slope: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if len(self.steps) != len(self.values) or not self.steps:
            raise ValueError("steps and values must be non-empty and of equal length")
        if self.steps[0] != 0:
            raise ValueError("first breakpoint must be 0")
        if list(self.steps) != sorted(set(self.steps)):
            raise ValueError("breakpoints must be strictly increasing")
        if list(self.values) != sorted(self.values) or self.values[0] < 0:
            raise ValueError("values must be non-negative and non-decreasing")
        if self.slope < 0:
            raise ValueError("slope must be non-negative")

    @classmethod
    def linear(cls, slope=1, intercept=0) -> "Staircase":
        return cls((0,), (Fraction(intercept),), Fraction(slope))

    @property
    def proper(self) -> bool:
        return self.slope > 0

    def __call__(self, t):
        i = 0
        while i + 1 < len(self.steps) and self.steps[i + 1] <= t:
            i += 1
        if i == len(self.steps) - 1:
            return self.values[i] + self.slope * (t - self.steps[i])
        return self.values[i]


@dataclass(frozen=True)
class CoarseEnvelope:
    theta: Staircase
    delta: Staircase

    def __post_init__(self) -> None:
        if not self.delta.proper:
            raise ValueError("delta must be proper (positive final slope)")


@dataclass
class CoarseMapReport:
    checked: int = 0
    upper_failures: list = field(default_factory=list)
    lower_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.upper_failures and not self.lower_failures


def verify_coarse_map(pairs: Iterable[tuple], env: CoarseEnvelope) -> CoarseMapReport:
    """Check ``delta(d) <= d' <= theta(d)`` on sampled ``(d_source, d_target)`` pairs."""
    report = CoarseMapReport()
    for k, (ds, dt) in enumerate(pairs):
        report.checked += 1
        if dt > env.theta(ds):
            report.upper_failures.append((k, ds, dt))
        if dt < env.delta(ds):
            report.lower_failures.append((k, ds, dt))
    return report


def sample_map_pairs(points: Sequence, f: Callable, d_source: Callable, d_target: Callable,
                     pairs: Iterable[tuple[int, int]] | None = None) -> list[tuple]:
    """Distances before and after ``f`` for the given index pairs (default: all)."""
    if pairs is None:
        pairs = itertools.combinations(range(len(points)), 2)
    out = []
    for i, j in pairs:
        x, y = points[i], points[j]
        out.append((d_source(x, y), d_target(f(x), f(y))))
    return out


# -- constructions ----------------------------------------------------------

def _budget(n: int, cap: int | None) -> None:
    limit = max_points() if cap is None else cap
    if n > limit:
        raise BudgetExceeded(f"{n} points exceed the cap of {limit}")


def space_from_function(points: Sequence, d: Callable, max_size: int | None = None) -> FiniteMetricSpace:
    _budget(len(points), max_size)
    n = len(points)
    table = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            table[i][j] = table[j][i] = d(points[i], points[j])
    return FiniteMetricSpace(points, table)


def interval_space(lo: int, hi: int) -> FiniteMetricSpace:
    """``Z ∩ [lo, hi]`` with the usual metric; labels are the integers."""
    return space_from_function(list(range(lo, hi + 1)), lambda a, b: abs(a - b))


def grid_space(*sizes: int) -> FiniteMetricSpace:
    """``{0..n1-1} x ... x {0..nk-1}`` in Z^k with the word (l1) metric."""
    pts = list(itertools.product(*(range(n) for n in sizes)))
    return space_from_function(pts, lambda a, b: sum(abs(x - y) for x, y in zip(a, b)))


def weighted_direct_sum_space(max_index: int, value_bound: int,
                              max_size: int | None = None) -> FiniteMetricSpace:
    """Truncation of the direct sum of countably many Z with ``d(g, h) = sum n |g_n - h_n|``."""
    if max_index < 1 or value_bound < 1:
        raise ValueError("bounds must be positive")
    _budget((2 * value_bound + 1) ** max_index, max_size)
    pts = list(itertools.product(range(-value_bound, value_bound + 1), repeat=max_index))
    return space_from_function(pts, weighted_sum_distance)


def weighted_sum_distance(g: Sequence[int], h: Sequence[int]) -> int:
    return sum(n * abs(a - b) for n, (a, b) in enumerate(zip(g, h), start=1))


def ball_space(group: Group, radius: int, max_size: int | None = None) -> FiniteMetricSpace:
    """The word-metric ball with the induced metric ``d(g, h) = |g^-1 h|``."""
    table = bfs_oracle(group, radius, max_size)
    pts = table.elements()
    _budget(len(pts), max_size)
    inv, mul = group.invert, group.multiply
    inverses = [inv(g) for g in pts]
    n = len(pts)
    dist = [[0] * n for _ in range(n)]
    for i in range(n):
        gi = inverses[i]
        for j in range(i + 1, n):
            dist[i][j] = dist[j][i] = word_length(mul(gi, pts[j]))
    return FiniteMetricSpace(pts, dist)


def product_space(a: FiniteMetricSpace, b: FiniteMetricSpace) -> FiniteMetricSpace:
    """``A x B`` with the l1 metric; point ``(i, j)`` sits at index ``i * len(b) + j``."""
    _budget(len(a) * len(b), None)
    pts = [(p, q) for p in a.points for q in b.points]
    nb = len(b)
    n = len(pts)
    dist = [[0] * n for _ in range(n)]
    for u in range(n):
        i, j = divmod(u, nb)
        for v in range(u + 1, n):
            k, l = divmod(v, nb)
            dist[u][v] = dist[v][u] = a.dist[i][k] + b.dist[j][l]
    return FiniteMetricSpace(pts, dist, check=False)


def random_metric_space(n: int, rng: random.Random) -> FiniteMetricSpace:
    """One of three random families: lattice points (l1), rational distances
    in [1, 2], or shortest-path metrics of random weighted graphs."""
    kind = rng.randrange(3)
    if kind == 0:
        pts = set()
        while len(pts) < n:
            pts.add((rng.randint(-4, 4), rng.randint(-4, 4)))
        pts = sorted(pts)
        return space_from_function(pts, lambda a, b: abs(a[0] - b[0]) + abs(a[1] - b[1]))
    if kind == 1:
        dist = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                dist[i][j] = dist[j][i] = 1 + Fraction(rng.randint(0, 6), 6)
        return FiniteMetricSpace([f"p{i}" for i in range(n)], dist)
    # shortest paths of a random connected weighted graph (Floyd-Warshall)
    w = [[INF] * n for _ in range(n)]
    for i in range(n):
        w[i][i] = 0
    for i in range(1, n):
        j = rng.randrange(i)
        w[i][j] = w[j][i] = Fraction(rng.randint(1, 8), rng.choice([1, 2]))
    for _ in range(n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            w[i][j] = w[j][i] = Fraction(rng.randint(1, 8), rng.choice([1, 2]))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    return FiniteMetricSpace([f"v{i}" for i in range(n)], w)
