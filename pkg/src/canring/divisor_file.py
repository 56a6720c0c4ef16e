"""Reading and writing divisor-spec files.

A file is a JSON object::

    {"variety": {"type": "projective", "dim": 2},
     "components": [{"coeff": "1/2", "poly": "x0"}, {"coeff": "-1/3", "poly": "x1"}]}

Hirzebruch surfaces use ``{"type": "hirzebruch", "m": m}`` and the
variables ``u, v, z, w``.  Ghost completion is left to the engines.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .exact import format_polynomial, format_rational, parse_polynomial
from .geometry import DivisorError, QDivisor, Variety, divisor


def _parse_coeff(raw) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise DivisorError(f"coefficient {raw!r} must be an integer or a 'p/q' string")
    try:
        return Fraction(raw.strip() if isinstance(raw, str) else raw)
    except (ValueError, ZeroDivisionError):
        raise DivisorError(f"malformed rational {raw!r}") from None


def _parse_variety(raw) -> Variety:
    if not isinstance(raw, dict):
        raise DivisorError("'variety' must be an object")
    kind = raw.get("type")
    if kind == "projective":
        key = "dim"
    elif kind == "hirzebruch":
        key = "m"
    else:
        raise DivisorError(f"unknown variety type {kind!r}")
    m = raw.get(key)
    if isinstance(m, bool) or not isinstance(m, int):
        raise DivisorError(f"variety needs an integer {key!r}")
    return Variety.projective(m) if kind == "projective" else Variety.hirzebruch(m)


def divisor_from_dict(data) -> QDivisor:
    if not isinstance(data, dict):
        raise DivisorError("divisor spec must be a JSON object")
    variety = _parse_variety(data.get("variety"))
    comps = data.get("components", [])
    if not isinstance(comps, list):
        raise DivisorError("'components' must be a list")
    items = []
    for n, entry in enumerate(comps):
        if not isinstance(entry, dict) or "coeff" not in entry or "poly" not in entry:
            raise DivisorError(f"component {n} needs 'coeff' and 'poly'")
        if not isinstance(entry["poly"], str):
            raise DivisorError(f"component {n}: 'poly' must be a string")
        items.append((_parse_coeff(entry["coeff"]), parse_polynomial(entry["poly"], variety.variables)))
    return divisor(variety, items)


def parse_divisor_spec(text: str) -> QDivisor:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DivisorError(f"invalid JSON: {exc}") from None
    return divisor_from_dict(data)


def divisor_to_dict(D: QDivisor) -> dict:
    return {
        "variety": D.variety.to_json(),
        "components": [
            {"coeff": format_rational(c.coeff), "poly": format_polynomial(c.poly)} for c in D.components
        ],
    }


def serialize_divisor(D: QDivisor) -> str:
    return json.dumps(divisor_to_dict(D), indent=2) + "\n"


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()
