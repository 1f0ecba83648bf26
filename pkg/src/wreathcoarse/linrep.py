"""A faithful 2x2 representation of Z≀Z over the Laurent ring Z[t, 1/t].

``psi(f, n)`` is the lower-triangular matrix

    [ 1                    0  ]
    [ sum_k f(k) t^k      t^n ]

and ``psi_tilde`` stacks copies of ``psi`` block-diagonally for (Z≀Z)^m.
The formal variable ``t`` stands in for a transcendental real number; all
arithmetic is exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .group import (
    Lamplighter,
    LamplighterPower,
    ProductElement,
    WreathElement,
    has_nested_lamps,
)
from .wordmetric import bfs_oracle


@dataclass(frozen=True)
class LaurentPoly:
    """Integer Laurent polynomial; ``terms`` are ``(exponent, coefficient)``
    pairs sorted by exponent, with no zero coefficients."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, int]) -> "LaurentPoly":
        return cls(tuple(sorted((int(e), int(c)) for e, c in coeffs.items() if c)))

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> "LaurentPoly":
        return cls(((exponent, coefficient),) if coefficient else ())

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls.monomial(0, c)

    def __post_init__(self) -> None:
        exps = [e for e, _ in self.terms]
        if exps != sorted(set(exps)) or any(c == 0 for _, c in self.terms):
            raise ValueError("terms must be sorted by exponent with nonzero coefficients")

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        return laurent_add(self, other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return laurent_add(self, -other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        return laurent_mul(self, other)

    def is_unit(self) -> bool:
        """Units of Z[t, 1/t] are exactly ``±t^k``."""
        return len(self.terms) == 1 and abs(self.terms[0][1]) == 1

    def evaluate(self, t) -> Fraction:
        t = Fraction(t)
        return sum((c * t**e for e, c in self.terms), Fraction(0))

    def to_json(self) -> dict:
        return {"terms": [[e, c] for e, c in self.terms]}

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentPoly":
        return cls(tuple((int(e), int(c)) for e, c in obj["terms"]))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}t^{e}" for e, c in self.terms)


ZERO = LaurentPoly()
ONE = LaurentPoly.constant(1)


def laurent_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    out = dict(a.terms)
    for e, c in b.terms:
        out[e] = out.get(e, 0) + c
    return LaurentPoly.from_dict(out)


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    out: dict[int, int] = {}
    for e1, c1 in a.terms:
        for e2, c2 in b.terms:
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return LaurentPoly.from_dict(out)


@dataclass(frozen=True)
class RepMatrix:
    """2x2 matrix over the Laurent ring, row-major."""

    a: LaurentPoly
    b: LaurentPoly
    c: LaurentPoly
    d: LaurentPoly

    def __mul__(self, o: "RepMatrix") -> "RepMatrix":
        return RepMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                         self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def det(self) -> LaurentPoly:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "RepMatrix":
        det = self.det()
        if not det.is_unit():
            raise ValueError("determinant is not a unit of the Laurent ring")
        (e, c), = det.terms
        inv = LaurentPoly.monomial(-e, c)  # c is ±1, its own inverse
        return RepMatrix(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def specialize(self, t) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a.evaluate(t), self.b.evaluate(t), self.c.evaluate(t), self.d.evaluate(t))

    def to_json(self) -> list:
        return [[self.a.to_json(), self.b.to_json()], [self.c.to_json(), self.d.to_json()]]


IDENTITY_MATRIX = RepMatrix(ONE, ZERO, ZERO, ONE)


@dataclass(frozen=True)
class BlockMatrix:
    blocks: tuple[RepMatrix, ...]

    def __mul__(self, o: "BlockMatrix") -> "BlockMatrix":
        if len(self.blocks) != len(o.blocks):
            raise ValueError("block counts differ")
        return BlockMatrix(tuple(x * y for x, y in zip(self.blocks, o.blocks)))

    def det(self) -> LaurentPoly:
        out = ONE
        for b in self.blocks:
            out = out * b.det()
        return out

    def inverse(self) -> "BlockMatrix":
        return BlockMatrix(tuple(b.inverse() for b in self.blocks))

    def dense(self) -> list[list[LaurentPoly]]:
        """The full 2m x 2m matrix."""
        m = len(self.blocks)
        out = [[ZERO] * (2 * m) for _ in range(2 * m)]
        for k, b in enumerate(self.blocks):
            i = 2 * k
            out[i][i], out[i][i + 1], out[i + 1][i], out[i + 1][i + 1] = b.a, b.b, b.c, b.d
        return out


def psi(x: WreathElement) -> RepMatrix:
    if has_nested_lamps(x):
        raise TypeError("psi is only defined on Z≀Z (integer lamps)")
    lamps = LaurentPoly(tuple(x.lamps.items))
    return RepMatrix(ONE, ZERO, lamps, LaurentPoly.monomial(x.shift))


def psi_tilde(x: ProductElement) -> BlockMatrix:
    return BlockMatrix(tuple(psi(c) for c in x.coordinates))


# -- checks -------------------------------------------------------------------

@dataclass
class RepReport:
    mode: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def random_word_element(group, radius: int, rng: random.Random):
    """Product of a uniformly random number (<= radius) of random generators."""
    gens = [g for _, g in group.generators().symmetric()]
    x = group.identity()
    for _ in range(rng.randint(0, radius)):
        x = group.multiply(x, rng.choice(gens))
    return x


def ball_sampler(group, radius: int) -> Callable[[random.Random], tuple]:
    def sample(rng: random.Random):
        return random_word_element(group, radius, rng), random_word_element(group, radius, rng)
    return sample


def homomorphism_check(sampler: Callable[[random.Random], tuple] | Iterable[tuple],
                       count: int | None = None, seed: int = 0,
                       rep: Callable = psi) -> RepReport:
    """Compare ``rep(xy)`` with ``rep(x) rep(y)`` on sampled pairs.

    ``sampler`` is either a function of a ``random.Random`` returning one
    pair, or an explicit iterable of pairs.
    """
    report = RepReport("hom")
    if callable(sampler):
        rng = random.Random(seed)
        pairs: Iterable[tuple] = (sampler(rng) for _ in range(count or 0))
    else:
        pairs = sampler
    for x, y in pairs:
        report.checked += 1
        lhs, rhs = rep(x * y), rep(x) * rep(y)
        if lhs != rhs:
            report.failures.append({"x": x, "y": y, "psi(xy)": lhs, "psi(x)psi(y)": rhs})
    return report


def generator_pairs(group) -> list[tuple]:
    gens = [g for _, g in group.generators().symmetric()]
    return [(g, h) for g in gens for h in gens]


def injectivity_check(radius: int, group=None, specialize=None, max_size: int | None = None) -> RepReport:
    """Look for two distinct elements of the ball with the same image.

    With ``specialize`` set, ``t`` is replaced by that number first.
    """
    group = group or Lamplighter()
    rep = psi_tilde if isinstance(group, LamplighterPower) else psi
    report = RepReport("inj")
    seen: dict = {}
    for x in bfs_oracle(group, radius, max_size).lengths:
        m = rep(x)
        key = m if specialize is None else _specialized_key(m, specialize)
        report.checked += 1
        if key in seen and seen[key] != x:
            report.failures.append({"x": seen[key], "y": x})
        else:
            seen.setdefault(key, x)
    return report


def _specialized_key(m, t):
    if isinstance(m, BlockMatrix):
        return tuple(b.specialize(t) for b in m.blocks)
    return m.specialize(t)
