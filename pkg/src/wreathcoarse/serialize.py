"""JSON encodings: exact rationals, group elements, spaces, covers."""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Any

from .group import FinSuppMap, ProductElement, WreathElement

INF_TOKEN = "inf"


def format_rational(q) -> str:
    """``Fraction(7, 2) -> "7/2"``, integers without a denominator, infinity as ``"inf"``."""
    if isinstance(q, float):
        if math.isinf(q) and q > 0:
            return INF_TOKEN
        raise TypeError("floats are not exact; pass a Fraction or int")
    return str(Fraction(q))


def parse_rational(s) -> Fraction | float:
    if isinstance(s, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(s, Rational):
        return Fraction(s)
    if isinstance(s, str):
        if s.strip().lower() in (INF_TOKEN, "+inf", "infinity"):
            return math.inf
        return Fraction(s.strip())
    raise TypeError(f"cannot read a rational from {s!r}")


def normalize_rational(v):
    """Exact rational with integral values collapsed to ``int`` (faster comparisons)."""
    q = parse_rational(v) if not isinstance(v, int) else v
    if isinstance(q, Fraction) and q.denominator == 1:
        return q.numerator
    return q


# -- group elements ---------------------------------------------------------

def encode_element(x) -> Any:
    if isinstance(x, WreathElement):
        return {"lamps": [[p, encode_element(v)] for p, v in x.lamps.items], "shift": x.shift}
    if isinstance(x, ProductElement):
        return [encode_element(c) for c in x.coordinates]
    if isinstance(x, bool):
        raise TypeError("booleans are not group elements")
    if isinstance(x, int):
        return x
    if isinstance(x, tuple):
        return [encode_element(c) for c in x]
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode_element(obj) -> Any:
    if isinstance(obj, dict):
        if set(obj) != {"lamps", "shift"}:
            raise ValueError(f"element must have exactly 'lamps' and 'shift': {obj!r}")
        pairs = []
        for entry in obj["lamps"]:
            pos, val = entry
            pairs.append((int(pos), decode_element(val)))
        positions = [p for p, _ in pairs]
        if positions != sorted(set(positions)):
            raise ValueError("lamps must be sorted by position without repeats")
        lamps = FinSuppMap.from_pairs(pairs)
        if len(lamps) != len(pairs):
            raise ValueError("identity lamps are not allowed in canonical encoding")
        return WreathElement(lamps, int(obj["shift"]))
    if isinstance(obj, list):
        if obj and all(isinstance(c, dict) for c in obj):
            return ProductElement(tuple(decode_element(c) for c in obj))
        return tuple(decode_element(c) for c in obj)
    if isinstance(obj, bool):
        raise ValueError("booleans are not group elements")
    if isinstance(obj, int):
        return obj
    raise ValueError(f"cannot decode element from {obj!r}")


def canonical_key(x) -> str:
    return json.dumps(encode_element(x), separators=(",", ":"), sort_keys=True)


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename; no partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
