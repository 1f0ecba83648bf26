"""Chain the cover transforms on one finite space and collect certified statistics."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .decomposition import coordinate, strategy_Z, verify_witness
from .errors import PreconditionError
from .metric import FiniteMetricSpace, d_multiplicity, lebesgue_number, multiplicity
from .nerve import (
    largest_admissible_r,
    lipschitz_bound_check,
    realized_ratio_sq,
    separation_sq,
    transform_T12,
    transform_T23,
    transform_T34,
    transform_T41,
)
from .serialize import format_rational

STEP_ORDER = ("12", "23", "34", "41")


def parse_steps(text: str) -> tuple[str, ...]:
    steps = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = [s for s in steps if s not in STEP_ORDER]
    if unknown:
        raise ValueError(f"unknown steps {unknown}; choose from {','.join(STEP_ORDER)}")
    # each step consumes the previous one's output, so only prefixes make sense
    if steps != STEP_ORDER[:len(steps)]:
        raise ValueError("steps must be a prefix of 12,23,34,41")
    return steps


def _fmt(q) -> str:
    return format_rational(q)


def run_pipeline(space: FiniteMetricSpace, r, d, lam,
                 steps: Sequence[str] = STEP_ORDER,
                 coord: Callable | None = None) -> dict:
    """Cut ``space`` along an integer coordinate at scale ``r`` and push the
    two families through the transforms in ``steps``.

    Each transform certifies its own postconditions and raises on failure;
    the returned dict records the exact statistics that were checked.
    """
    r, d, lam = Fraction(r), Fraction(d), Fraction(lam)
    w0 = strategy_Z(space, space.everything, r, coord or coordinate)
    out: dict = {"r": _fmt(r), "d": _fmt(d), "lambda": _fmt(lam), "steps": {}}
    out["input_pieces"] = len(w0.pieces)
    cover = None
    pou = None
    if "12" in steps:
        cover = transform_T12(space, w0.family0, w0.family1, r, d)
        out["steps"]["12"] = {
            "pieces": len(cover),
            "d_multiplicity": d_multiplicity(space, cover, d),
        }
    if "23" in steps:
        cover = transform_T23(space, cover, lam)
        leb = lebesgue_number(space, cover)
        out["steps"]["23"] = {
            "pieces": len(cover),
            "multiplicity": multiplicity(space, cover),
            "lebesgue_number": _fmt(leb),
        }
    if "34" in steps:
        k, pou = transform_T34(space, cover, lam)
        rep = lipschitz_bound_check(pou, lam)
        exact_sum = all(sum(w for _, w in p.coords) == 1 for p in pou.values)
        if not exact_sum:
            raise PreconditionError("partition of unity does not sum to 1")
        out["steps"]["34"] = {
            "nerve_vertices": len(k.vertices),
            "nerve_edges": len(k.edges),
            "sum_is_one": exact_sum,
            "max_ratio_sq": _fmt(rep.max_ratio_sq),
            "bound_sq": _fmt(rep.bound_sq),
            "min_denominator": _fmt(rep.min_denominator),
            "max_active": rep.max_active,
        }
    if "41" in steps:
        ratio, _ = realized_ratio_sq(pou)
        r41 = largest_admissible_r(ratio)
        w = transform_T41(space, pou, r41)
        rep = verify_witness(space, w)
        out["steps"]["41"] = {
            "separation_sq": _fmt(separation_sq()),
            "scale": _fmt(r41),
            "family0": len(w.family0),
            "family1": len(w.family1),
            "verified": rep.verdict,
        }
    return out
