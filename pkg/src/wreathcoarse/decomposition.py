"""Scale-r decomposition witnesses and finite-depth witness trees.

A witness splits one member ``X`` of a metric family into two families of
pieces, each ``r``-disjoint, whose union is ``X``.  A tree applies witnesses
level by level to every piece produced so far and ends in a leaf asserting
a uniform diameter bound.  A verified tree of depth ``n`` at the declared
scales is a finite certificate for membership in ``D_n`` at those scales.

Children of a node are ordered member by member, ``family0`` pieces before
``family1`` pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .group import Group, WreathElement
from .metric import (
    FiniteMetricSpace,
    closest_pair,
    diam,
    product_space,
    set_distance,
)
from .serialize import format_rational, parse_rational
from .wordmetric import word_length


@dataclass(frozen=True)
class DecompositionWitness:
    scale: Fraction
    family0: tuple[frozenset, ...] = ()
    family1: tuple[frozenset, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "family0", tuple(frozenset(p) for p in self.family0))
        object.__setattr__(self, "family1", tuple(frozenset(p) for p in self.family1))

    @property
    def pieces(self) -> tuple[frozenset, ...]:
        return self.family0 + self.family1

    def at_scale(self, r) -> "DecompositionWitness":
        return DecompositionWitness(r, self.family0, self.family1)


@dataclass(frozen=True)
class Leaf:
    bound: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "bound", Fraction(self.bound))


@dataclass(frozen=True)
class Node:
    scale: Fraction
    witnesses: tuple[DecompositionWitness, ...]
    child: "WitnessTree"

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "witnesses", tuple(self.witnesses))


WitnessTree = Union[Leaf, Node]


def depth(tree: WitnessTree) -> int:
    n = 0
    while isinstance(tree, Node):
        n += 1
        tree = tree.child
    return n


def leaf_bound(tree: WitnessTree) -> Fraction:
    while isinstance(tree, Node):
        tree = tree.child
    return tree.bound


@dataclass(frozen=True)
class MetricFamily:
    """Subsets of one ambient space, each carrying the induced metric."""

    space: FiniteMetricSpace
    members: tuple[frozenset, ...]

    @classmethod
    def whole(cls, space: FiniteMetricSpace) -> "MetricFamily":
        return cls(space, (space.everything,))


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class WitnessReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, passed, detail))

    def extend(self, other: "WitnessReport") -> None:
        self.checks.extend(other.checks)

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.verdict else "fail",
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def verify_witness(space: FiniteMetricSpace, w: DecompositionWitness,
                   member: Iterable[int] | None = None, prefix: str = "") -> WitnessReport:
    """Check that ``w`` decomposes ``member`` (default: all of ``space``).

    Raises ``ValueError`` on indices outside the space.
    """
    n = len(space)
    for p in w.pieces:
        for i in p:
            if not 0 <= i < n:
                raise ValueError(f"piece references point {i} outside a space of {n} points")
    target = space.everything if member is None else frozenset(member)
    report = WitnessReport()

    empty = [k for k, p in enumerate(w.pieces) if not p]
    report.add(prefix + "nonempty", not empty, f"empty pieces {empty}" if empty else "")

    stray = sorted(set().union(*w.pieces) - target) if w.pieces else []
    report.add(prefix + "inside", not stray, f"points {stray[:5]} lie outside the member" if stray else "")

    covered = set().union(*w.pieces) if w.pieces else set()
    missing = sorted(target - covered)
    report.add(prefix + "covers", not missing, f"point {missing[0]} is uncovered" if missing else "")

    for name, fam in (("family0", w.family0), ("family1", w.family1)):
        detail = ""
        pieces = [p for p in fam if p]
        for a in range(len(pieces)):
            for b in range(a + 1, len(pieces)):
                if set_distance(space, pieces[a], pieces[b]) < w.scale:
                    x, y = closest_pair(space, pieces[a], pieces[b])
                    detail = (f"pieces {a} and {b} at distance "
                              f"{format_rational(space.dist[x][y])} < {format_rational(w.scale)} "
                              f"(points {x}, {y})")
                    break
            if detail:
                break
        report.add(f"{prefix}{name}-disjoint", not detail, detail)
    return report


def verify_tree(family: MetricFamily, tree: WitnessTree, min_scale=None) -> WitnessReport:
    """Verify every node's witnesses level by level, then the leaf bound.

    With ``min_scale`` set, every node must also be declared at a scale of
    at least ``min_scale``.
    """
    space = family.space
    members = list(family.members)
    report = WitnessReport()
    level = 0
    while isinstance(tree, Node):
        tag = f"level{level}/"
        if min_scale is not None:
            ok = tree.scale >= min_scale
            report.add(tag + "scale", ok, "" if ok else
                       f"scale {format_rational(tree.scale)} below {format_rational(min_scale)}")
        if len(tree.witnesses) != len(members):
            report.add(tag + "arity", False,
                       f"{len(tree.witnesses)} witnesses for {len(members)} members")
            return report
        nxt: list[frozenset] = []
        for k, (m, w) in enumerate(zip(members, tree.witnesses)):
            if w.scale != tree.scale:
                report.add(f"{tag}member{k}/scale", False, "witness scale differs from node scale")
            report.extend(verify_witness(space, w, m, prefix=f"{tag}member{k}/"))
            nxt.extend(w.pieces)
        members = nxt
        tree = tree.child
        level += 1
    over = [(k, diam(space, m)) for k, m in enumerate(members) if m and diam(space, m) > tree.bound]
    detail = ""
    if over:
        k, dm = over[0]
        detail = f"piece {k} has diameter {format_rational(dm)} > {format_rational(tree.bound)}"
    report.add(f"level{level}/bounded", not over, detail)
    return report


# -- strategies -------------------------------------------------------------

def coordinate(label, axis: int = 0) -> int:
    """Integer coordinate used by the interval strategy.

    Integers are their own coordinate, tuples use entry ``axis``, and
    wreath elements use their base shift.
    """
    if isinstance(label, bool):
        raise TypeError("booleans have no coordinate")
    if isinstance(label, int):
        return label
    if isinstance(label, WreathElement):
        return label.shift
    if isinstance(label, tuple):
        return coordinate(label[axis])
    raise TypeError(f"no integer coordinate for {label!r}")


def strategy_Z(space: FiniteMetricSpace, segment: Iterable[int], r,
               coord: Callable | None = None) -> DecompositionWitness:
    """Cut along an integer coordinate into blocks ``[2r k, 2r (k+1))``;
    even ``k`` go to family 0, odd ``k`` to family 1."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("scale must be positive")
    coord = coord or coordinate
    blocks: dict[int, list[int]] = {}
    for i in segment:
        k = math.floor(Fraction(coord(space.points[i])) / (2 * r))
        blocks.setdefault(k, []).append(i)
    fam: tuple[list, list] = ([], [])
    for k in sorted(blocks):
        fam[k % 2].append(frozenset(blocks[k]))
    return DecompositionWitness(r, tuple(fam[0]), tuple(fam[1]))


def strategy_Z_tree(space: FiniteMetricSpace, r, coord: Callable | None = None) -> WitnessTree:
    """Depth-one tree: ``strategy_Z`` at scale ``r`` then a leaf at ``2r``."""
    w = strategy_Z(space, space.everything, r, coord)
    return Node(w.scale, (w,), Leaf(2 * w.scale))


def strategy_axes_tree(space: FiniteMetricSpace, r, axes: int) -> WitnessTree:
    """Cut along coordinate 0, then cut every resulting piece along
    coordinate 1, and so on; the leaf bound is ``2r`` per axis (l1 metric)."""
    r = Fraction(r)
    levels = []
    members = [space.everything]
    for axis in range(axes):
        coord = lambda label, a=axis: coordinate(label, a)  # noqa: E731
        ws = [strategy_Z(space, m, r, coord) for m in members]
        levels.append(ws)
        members = [p for w in ws for p in w.pieces]
    tree: WitnessTree = Leaf(2 * r * axes)
    for ws in reversed(levels):
        tree = Node(r, tuple(ws), tree)
    return tree


def strategy_product(space_a: FiniteMetricSpace, tree_a: WitnessTree,
                     space_b: FiniteMetricSpace, tree_b: WitnessTree,
                     ) -> tuple[FiniteMetricSpace, WitnessTree]:
    """Tree for ``A x B`` (l1 metric) from trees for ``A`` and ``B``.

    The ``A``-levels cut slabs ``P x B``; once ``A`` is exhausted the
    ``B``-levels cut each slab into ``P x Q``.  Depths add and leaf bounds add.
    """
    prod = product_space(space_a, space_b)
    nb = len(space_b)
    all_b = range(nb)

    def times(p, q) -> frozenset:
        return frozenset(i * nb + j for i in p for j in q)

    levels: list[tuple[Fraction, list[DecompositionWitness]]] = []
    members_a: list[frozenset] = [space_a.everything]
    t = tree_a
    while isinstance(t, Node):
        ws = [DecompositionWitness(t.scale,
                                   tuple(times(p, all_b) for p in w.family0),
                                   tuple(times(p, all_b) for p in w.family1))
              for w in t.witnesses]
        levels.append((t.scale, ws))
        members_a = [p for w in t.witnesses for p in w.pieces]
        t = t.child
    bound_a = t.bound

    t = tree_b
    while isinstance(t, Node):
        ws = [DecompositionWitness(t.scale,
                                   tuple(times(p, q) for q in w.family0),
                                   tuple(times(p, q) for q in w.family1))
              for p in members_a for w in t.witnesses]
        levels.append((t.scale, ws))
        t = t.child
    tree: WitnessTree = Leaf(bound_a + t.bound)
    for scale, ws in reversed(levels):
        tree = Node(scale, tuple(ws), tree)
    return prod, tree


def translate_family(group: Group, g, members: Sequence[Sequence]) -> list[list]:
    """Left translates ``g X_i = {g h : h in X_i}``, member by member."""
    return [[group.multiply(g, h) for h in m] for m in members]


def translated_space(group: Group, g, space: FiniteMetricSpace) -> FiniteMetricSpace:
    """The points ``g h`` in the same order, with word distances recomputed from scratch."""
    pts = [group.multiply(g, h) for h in space.points]
    n = len(pts)
    inv = [group.invert(p) for p in pts]
    dist = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dist[i][j] = dist[j][i] = word_length(group.multiply(inv[i], pts[j]))
    return FiniteMetricSpace(pts, dist)


# -- JSON -------------------------------------------------------------------

def _pieces_json(fam) -> list[list[int]]:
    return [sorted(p) for p in fam]


def tree_to_json(tree: WitnessTree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": format_rational(tree.bound)}
    return {
        "scale": format_rational(tree.scale),
        "witnesses": [{"family0": _pieces_json(w.family0), "family1": _pieces_json(w.family1)}
                      for w in tree.witnesses],
        "child": tree_to_json(tree.child),
    }


def witness_to_json(w: DecompositionWitness, child: WitnessTree | None = None) -> dict:
    """Top-level witness file: one decomposition of the whole space plus its subtree."""
    out = {
        "scale": format_rational(w.scale),
        "family0": _pieces_json(w.family0),
        "family1": _pieces_json(w.family1),
    }
    if child is not None:
        out["child"] = tree_to_json(child)
    return out


def tree_from_json(obj: dict) -> WitnessTree:
    """Read a tree; a root in witness-file form (``family0``/``family1``
    at top level) is read as a single-witness node."""
    if "leaf" in obj:
        return Leaf(parse_rational(obj["leaf"]))
    if "scale" not in obj:
        raise ValueError("witness node needs an explicit 'scale'")
    if "child" not in obj:
        raise ValueError("witness node needs a 'child' (use {\"leaf\": \"B\"} to end the tree)")
    scale = parse_rational(obj["scale"])
    raw = obj["witnesses"] if "witnesses" in obj else [obj]
    ws = tuple(_witness_from_json(scale, x) for x in raw)
    return Node(scale, ws, tree_from_json(obj["child"]))


def _witness_from_json(scale, obj: dict) -> DecompositionWitness:
    return DecompositionWitness(scale,
                                tuple(frozenset(map(int, p)) for p in obj.get("family0", [])),
                                tuple(frozenset(map(int, p)) for p in obj.get("family1", [])))


def witness_from_json(obj: dict) -> tuple[DecompositionWitness, WitnessTree | None]:
    """Read a top-level witness file: the root decomposition and, if present, its subtree."""
    if "scale" not in obj:
        raise ValueError("witness JSON must carry its scale explicitly")
    scale = parse_rational(obj["scale"])
    child = tree_from_json(obj["child"]) if "child" in obj else None
    return _witness_from_json(scale, obj), child
