"""Word lengths via Parry's formula, and a breadth-first Cayley-graph oracle.

For ``x = (f, v)`` in G≀Z with the standard generators,

    |x| = (shortest walk on Z from 0 through supp(f) ending at v) + sum |f(k)|_G

The walk on the line is computed in closed form as the better of the two
extreme-first tours; the test suite checks it against exhaustive search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import BudgetExceeded, max_ball_size
from .group import (
    Group,
    ProductElement,
    WreathElement,
)


@dataclass(frozen=True)
class LineTour:
    """A walk on Z starting at 0 that must visit ``visit`` and stop at ``end``."""

    visit: frozenset[int] = frozenset()
    end: int = 0

    @property
    def length(self) -> int:
        return line_path_length(self.visit, self.end)


def line_path_length(visit: Iterable[int], end: int = 0) -> int:
    pts = list(visit)
    lo = min(pts + [0, end])
    hi = max(pts + [0, end])
    left_first = -lo + (hi - lo) + (hi - end)
    right_first = hi + (hi - lo) + (end - lo)
    return min(left_first, right_first)


def line_loop_length(visit: Iterable[int]) -> int:
    pts = list(visit)
    return 2 * (max(pts + [0]) - min(pts + [0]))


def word_length(x) -> int:
    """Word length of an element of Z^m, Z≀Z, (Z≀Z)^m or (Z≀Z)≀Z."""
    if isinstance(x, WreathElement):
        lamps = x.lamps.items
        total = line_path_length([p for p, _ in lamps], x.shift)
        for _, b in lamps:
            total += abs(b) if isinstance(b, int) else word_length(b)
        return total
    if isinstance(x, ProductElement):
        return word_length_product(x)
    if isinstance(x, int):
        return abs(x)
    if isinstance(x, tuple):
        return sum(abs(c) for c in x)
    raise TypeError(f"no word metric for {type(x).__name__}")


def word_length_product(x: ProductElement) -> int:
    return sum(word_length(c) for c in x.coordinates)


def word_distance(group: Group, g, h) -> int:
    """Left-invariant word metric ``d(g, h) = |g^-1 h|``."""
    return word_length(group.multiply(group.invert(g), h))


@dataclass
class BallTable:
    """Exact word lengths of every element within ``radius`` of the identity."""

    radius: int
    lengths: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.lengths)

    def sphere_sizes(self) -> list[int]:
        sizes = [0] * (self.radius + 1)
        for n in self.lengths.values():
            sizes[n] += 1
        return sizes

    def ball_sizes(self) -> list[int]:
        out, acc = [], 0
        for s in self.sphere_sizes():
            acc += s
            out.append(acc)
        return out

    def elements(self) -> list:
        """Elements ordered by length; ties keep discovery order."""
        return sorted(self.lengths, key=self.lengths.__getitem__)


def bfs_oracle(group: Group, radius: int, max_size: int | None = None) -> BallTable:
    """Breadth-first search of the Cayley graph out to ``radius``.

    Right-multiplies by every generator and inverse.  Raises
    ``BudgetExceeded`` once the ball holds more than ``max_size`` elements.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    cap = max_ball_size() if max_size is None else max_size
    gens = [g for _, g in group.generators().symmetric()]
    mul = group.multiply
    start = group.identity()
    lengths = {start: 0}
    frontier = [start]
    for n in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for s in gens:
                y = mul(x, s)
                if y not in lengths:
                    lengths[y] = n
                    nxt.append(y)
        if len(lengths) > cap:
            raise BudgetExceeded(f"ball of radius {n} in {group.name} exceeds {cap} elements")
        frontier = nxt
    return BallTable(radius, lengths)


def growth_series(group: Group, radius: int, max_size: int | None = None) -> list[int]:
    """Ball sizes ``|B(0)|, ..., |B(radius)|``."""
    return bfs_oracle(group, radius, max_size).ball_sizes()
