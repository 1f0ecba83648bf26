"""Exact arithmetic in Z, Z^m and the wreath products Z≀Z, (Z≀Z)^m, (Z≀Z)≀Z.

The base group of every wreath product here is Z, written additively.
A lamp configuration is a finitely supported map Z -> G where the lamp
group G is either Z (lamps are ``int``) or Z≀Z (lamps are
``WreathElement``).  Shifts act by right translation::

    act(a, g)(x) = g(x - a)

so that ``(f, a)(g, b) = (f * act(a, g), a + b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

Lamp = Union[int, "WreathElement"]


def _lamp_mul(a: Lamp, b: Lamp) -> Lamp:
    if isinstance(a, int):
        return a + b  # type: ignore[operator]
    return multiply(a, b)  # type: ignore[arg-type]


def _lamp_inv(a: Lamp) -> Lamp:
    if isinstance(a, int):
        return -a
    return invert(a)


def _lamp_is_identity(a: Lamp) -> bool:
    if isinstance(a, int):
        return a == 0
    return a.is_identity()


@dataclass(frozen=True)
class FinSuppMap:
    """A finitely supported map Z -> G, stored as sorted ``(position, value)`` pairs.

    Identity-valued lamps are never stored, so equality is structural.
    """

    items: tuple[tuple[int, Lamp], ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Lamp]]) -> "FinSuppMap":
        # repeated positions are multiplied together in the order given
        acc: dict[int, Lamp] = {}
        for pos, val in pairs:
            pos = int(pos)
            acc[pos] = _lamp_mul(acc[pos], val) if pos in acc else val
        return cls(tuple(sorted((p, v) for p, v in acc.items() if not _lamp_is_identity(v))))

    @classmethod
    def delta(cls, position: int, value: Lamp) -> "FinSuppMap":
        if _lamp_is_identity(value):
            return cls()
        return cls(((position, value),))

    def __post_init__(self) -> None:
        prev = None
        for pos, val in self.items:
            if prev is not None and pos <= prev:
                raise ValueError("lamp positions must be strictly increasing")
            if _lamp_is_identity(val):
                raise ValueError(f"identity lamp stored at position {pos}")
            prev = pos

    def __call__(self, position: int) -> Lamp | None:
        """Lamp value at ``position``; ``None`` stands for the identity."""
        for pos, val in self.items:
            if pos == position:
                return val
        return None

    def __iter__(self) -> Iterator[tuple[int, Lamp]]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.items)

    def as_dict(self) -> dict[int, Lamp]:
        return dict(self.items)

    def __mul__(self, other: "FinSuppMap") -> "FinSuppMap":
        if not other.items:
            return self
        if not self.items:
            return other
        out: dict[int, Lamp] = dict(self.items)
        for pos, val in other.items:
            if pos in out:
                prod = _lamp_mul(out[pos], val)
                if _lamp_is_identity(prod):
                    del out[pos]
                else:
                    out[pos] = prod
            else:
                out[pos] = val
        return FinSuppMap(tuple(sorted(out.items())))

    def inverse(self) -> "FinSuppMap":
        return FinSuppMap(tuple((p, _lamp_inv(v)) for p, v in self.items))


def act(a: int, g: FinSuppMap) -> FinSuppMap:
    """Shift action of the base: ``act(a, g)(x) = g(x - a)``."""
    if a == 0 or not g.items:
        return g
    return FinSuppMap(tuple((p + a, v) for p, v in g.items))


def decompose_deltas(f: FinSuppMap) -> list[tuple[int, Lamp]]:
    """Write ``f`` as a product of delta functions, positions increasing."""
    return list(f.items)


@dataclass(frozen=True)
class WreathElement:
    """The element ``(f, a)`` of G≀Z: lamp configuration ``f`` and base shift ``a``."""

    lamps: FinSuppMap = FinSuppMap()
    shift: int = 0

    @classmethod
    def make(cls, lamps: Mapping[int, Lamp] | Iterable[tuple[int, Lamp]] = (), shift: int = 0) -> "WreathElement":
        pairs = lamps.items() if isinstance(lamps, Mapping) else lamps
        return cls(FinSuppMap.from_pairs(pairs), int(shift))

    def is_identity(self) -> bool:
        return self.shift == 0 and not self.lamps.items

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        return multiply(self, other)

    def inverse(self) -> "WreathElement":
        return invert(self)

    def __repr__(self) -> str:
        lamps = ", ".join(f"{p}:{v!r}" for p, v in self.lamps.items)
        return f"W({{{lamps}}}, {self.shift})"


IDENTITY = WreathElement()


def multiply(x: WreathElement, y: WreathElement) -> WreathElement:
    return WreathElement(x.lamps * act(x.shift, y.lamps), x.shift + y.shift)


def invert(x: WreathElement) -> WreathElement:
    return WreathElement(act(-x.shift, x.lamps.inverse()), -x.shift)


def delta(position: int, value: Lamp, shift: int = 0) -> WreathElement:
    """Shorthand for ``(δ_position^value, shift)``."""
    return WreathElement(FinSuppMap.delta(position, value), shift)


def has_nested_lamps(x: WreathElement) -> bool:
    """True when some lamp of ``x`` is itself a wreath element."""
    return any(not isinstance(v, int) for _, v in x.lamps.items)


@dataclass(frozen=True)
class ProductElement:
    """An element of a direct power (Z≀Z)^m."""

    coordinates: tuple[WreathElement, ...]

    def __mul__(self, other: "ProductElement") -> "ProductElement":
        if len(self.coordinates) != len(other.coordinates):
            raise ValueError("product elements of different rank")
        return ProductElement(tuple(multiply(a, b) for a, b in zip(self.coordinates, other.coordinates)))

    def inverse(self) -> "ProductElement":
        return ProductElement(tuple(invert(a) for a in self.coordinates))

    def is_identity(self) -> bool:
        return all(a.is_identity() for a in self.coordinates)

    def __len__(self) -> int:
        return len(self.coordinates)


# ---------------------------------------------------------------------------
# Groups with a fixed finite generating set

@dataclass(frozen=True)
class GeneratorSet:
    """Labelled generators; each label ``s`` has a formal inverse ``s^-1``."""

    labels: tuple[str, ...]
    elements: tuple[object, ...]
    inverses: tuple[object, ...]

    def __post_init__(self) -> None:
        if not (len(self.labels) == len(self.elements) == len(self.inverses)):
            raise ValueError("generator labels and elements differ in length")

    def symmetric(self) -> list[tuple[str, object]]:
        """Generators together with their inverses, labelled."""
        out = list(zip(self.labels, self.elements))
        out += [(f"{s}^-1", g) for s, g in zip(self.labels, self.inverses)]
        return out


class IntegerLattice:
    """Z^rank with the standard basis; elements are integer tuples."""

    def __init__(self, rank: int = 1):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = rank
        self.name = "z" if rank == 1 else f"z^{rank}"

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def multiply(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def invert(self, x):
        return tuple(-a for a in x)

    def generators(self) -> GeneratorSet:
        basis = [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]
        labels = tuple(f"e{i}" for i in range(self.rank))
        return GeneratorSet(labels, tuple(basis), tuple(self.invert(b) for b in basis))


class Lamplighter:
    """Z≀Z with generators ``a = (δ_0^1, 0)`` and ``t = (e, 1)``."""

    name = "zwz"

    def identity(self) -> WreathElement:
        return IDENTITY

    def multiply(self, x, y):
        return multiply(x, y)

    def invert(self, x):
        return invert(x)

    def generators(self) -> GeneratorSet:
        a = delta(0, 1)
        t = WreathElement(shift=1)
        return GeneratorSet(("a", "t"), (a, t), (invert(a), invert(t)))


class NestedLamplighter:
    """(Z≀Z)≀Z: lamps take values in Z≀Z, generated by ``(δ_0^s, 0)`` for s in {a, t}, and ``(e, 1)``."""

    name = "zwz-wr-z"

    def identity(self) -> WreathElement:
        return IDENTITY

    def multiply(self, x, y):
        return multiply(x, y)

    def invert(self, x):
        return invert(x)

    def generators(self) -> GeneratorSet:
        inner = Lamplighter().generators()
        labels = tuple(f"[{s}]" for s in inner.labels) + ("T",)
        elems = tuple(delta(0, s) for s in inner.elements) + (WreathElement(shift=1),)
        return GeneratorSet(labels, elems, tuple(invert(g) for g in elems))


class LamplighterPower:
    """(Z≀Z)^m generated by the disjoint union of the factors' generators."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be positive")
        self.m = m
        self.name = f"zwz^{m}"

    def identity(self) -> ProductElement:
        return ProductElement((IDENTITY,) * self.m)

    def multiply(self, x, y):
        return x * y

    def invert(self, x):
        return x.inverse()

    def generators(self) -> GeneratorSet:
        base = Lamplighter().generators()
        labels, elems = [], []
        for i in range(self.m):
            for s, g in zip(base.labels, base.elements):
                coords = [IDENTITY] * self.m
                coords[i] = g
                labels.append(f"{s}{i}")
                elems.append(ProductElement(tuple(coords)))
        return GeneratorSet(tuple(labels), tuple(elems), tuple(e.inverse() for e in elems))


Group = Union[IntegerLattice, Lamplighter, NestedLamplighter, LamplighterPower]


def parse_group(text: str) -> Group:
    """Parse ``z``, ``z^m``, ``zwz``, ``zwz^m`` or ``zwz-wr-z``."""
    s = text.strip().lower()
    if s == "z":
        return IntegerLattice(1)
    if s == "zwz":
        return Lamplighter()
    if s in ("zwz-wr-z", "(zwz)wz"):
        return NestedLamplighter()
    for prefix, cls in (("zwz^", LamplighterPower), ("z^", IntegerLattice)):
        if s.startswith(prefix):
            try:
                m = int(s[len(prefix):])
            except ValueError:
                break
            if m == 1 and cls is LamplighterPower:
                return Lamplighter()
            return cls(m)
    raise ValueError(f"unknown group {text!r}")
