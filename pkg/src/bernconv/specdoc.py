"""JSON document form of a convolution spec (strict, lossless round-trip).

A document looks like::

    {
      "name": "cantor",
      "description": "middle-thirds benchmark",
      "scales": {"kind": "cantor-like", "coef": 2.0, "base": 3},
      "digits": {"kind": "constant", "p0": 0.5}
    }

Unknown fields are rejected everywhere.  Tail rules never carry a
start_index in documents; it is derived from the prefix length.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional

from .convspec import (
    CantorLike,
    ConstantDigits,
    ConstantDigitTail,
    ConvolutionSpec,
    ExactGeometricTail,
    ExplicitDigits,
    ExplicitScales,
    Geometric,
    GeometricApproachDigitTail,
    GeometricBoundTail,
    MixedGeometricTail,
    PerturbedDigits,
    PerturbedDigitTail,
    PowerLawTail,
    TwoTerm,
)
from .errors import SpecValidationError


def _take(obj: Mapping[str, Any], where: str, required: dict, optional: dict = {}) -> dict:
    if not isinstance(obj, Mapping):
        raise SpecValidationError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - set(required) - set(optional) - {"kind"}
    if unknown:
        raise SpecValidationError(f"{where}: unknown fields {sorted(unknown)}")
    out = {}
    for key, conv in required.items():
        if key not in obj:
            raise SpecValidationError(f"{where}: missing field {key!r}")
        out[key] = _convert(obj[key], conv, f"{where}.{key}")
    for key, (conv, default) in optional.items():
        out[key] = _convert(obj[key], conv, f"{where}.{key}") if key in obj else default
    return out


def _convert(value, conv, where: str):
    if conv is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SpecValidationError(f"{where}: expected a number")
        return float(value)
    if conv is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SpecValidationError(f"{where}: expected an integer")
        return value
    if conv is str:
        if not isinstance(value, str):
            raise SpecValidationError(f"{where}: expected a string")
        return value
    if conv == "floats":
        if not isinstance(value, list) or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in value
        ):
            raise SpecValidationError(f"{where}: expected a list of numbers")
        return tuple(float(x) for x in value)
    if conv is dict:
        if not isinstance(value, Mapping):
            raise SpecValidationError(f"{where}: expected an object")
        return value
    raise AssertionError(conv)


def _parse_scale_tail(obj: Mapping[str, Any], start_index: int, where: str):
    kind = obj.get("kind")
    if kind == "exact-geometric":
        f = _take(obj, where, {"ratio": float, "scale": float})
        return ExactGeometricTail(f["ratio"], f["scale"], start_index)
    if kind == "geometric-bound":
        f = _take(obj, where, {"ratio": float, "scale": float})
        return GeometricBoundTail(f["ratio"], f["scale"], start_index)
    if kind == "power-law":
        f = _take(obj, where, {"exponent": float, "scale": float})
        return PowerLawTail(f["exponent"], f["scale"], start_index)
    if kind == "mixed-geometric":
        f = _take(obj, where, {"scale": float, "ratio": float, "scale2": float, "ratio2": float})
        return MixedGeometricTail(f["scale"], f["ratio"], f["scale2"], f["ratio2"], start_index)
    raise SpecValidationError(f"{where}: unknown tail kind {kind!r}")


def _parse_scales(obj: Mapping[str, Any]):
    kind = obj.get("kind") if isinstance(obj, Mapping) else None
    if kind == "geometric":
        f = _take(obj, "scales", {"lambda": float}, {"coef": (float, 1.0)})
        return Geometric(f["lambda"], f["coef"])
    if kind == "cantor-like":
        f = _take(obj, "scales", {"coef": float, "base": int})
        return CantorLike(f["coef"], f["base"])
    if kind == "two-term":
        f = _take(obj, "scales", {"epsilon": float})
        return TwoTerm(f["epsilon"])
    if kind == "explicit":
        f = _take(obj, "scales", {"prefix": "floats", "tail": dict})
        tail = _parse_scale_tail(f["tail"], len(f["prefix"]) + 1, "scales.tail")
        return ExplicitScales(f["prefix"], tail)
    raise SpecValidationError(f"scales: unknown kind {kind!r}")


def _parse_digit_tail(obj: Mapping[str, Any], start_index: int, where: str):
    kind = obj.get("kind")
    if kind == "constant":
        f = _take(obj, where, {"p0": float})
        return ConstantDigitTail(f["p0"], start_index)
    if kind == "perturbed":
        f = _take(obj, where, {"p0": float, "c": float, "s": float})
        return PerturbedDigitTail(f["p0"], f["c"], f["s"], start_index)
    if kind == "geometric-approach":
        f = _take(obj, where, {"p0": float, "c": float, "ratio": float})
        return GeometricApproachDigitTail(f["p0"], f["c"], f["ratio"], start_index)
    raise SpecValidationError(f"{where}: unknown digit tail kind {kind!r}")


def _parse_digits(obj: Mapping[str, Any]):
    kind = obj.get("kind") if isinstance(obj, Mapping) else None
    if kind == "constant":
        f = _take(obj, "digits", {"p0": float})
        return ConstantDigits(f["p0"])
    if kind == "perturbed":
        f = _take(obj, "digits", {"p0": float, "c": float, "s": float})
        return PerturbedDigits(f["p0"], f["c"], f["s"])
    if kind == "explicit":
        f = _take(obj, "digits", {"prefix": "floats", "tail": dict})
        tail = _parse_digit_tail(f["tail"], len(f["prefix"]) + 1, "digits.tail")
        return ExplicitDigits(f["prefix"], tail)
    raise SpecValidationError(f"digits: unknown kind {kind!r}")


def parse_document(doc: Mapping[str, Any]) -> tuple[ConvolutionSpec, Optional[str], Optional[str]]:
    """(spec, name, description) from a document; strict validation."""
    if not isinstance(doc, Mapping):
        raise SpecValidationError("spec document must be a JSON object")
    unknown = set(doc) - {"name", "description", "scales", "digits"}
    if unknown:
        raise SpecValidationError(f"spec document: unknown fields {sorted(unknown)}")
    for key in ("scales", "digits"):
        if key not in doc:
            raise SpecValidationError(f"spec document: missing field {key!r}")
    name = doc.get("name")
    description = doc.get("description")
    if name is not None and not isinstance(name, str):
        raise SpecValidationError("spec document: name must be a string")
    if description is not None and not isinstance(description, str):
        raise SpecValidationError("spec document: description must be a string")
    spec = ConvolutionSpec(_parse_scales(doc["scales"]), _parse_digits(doc["digits"]))
    return spec, name, description


def _scale_tail_doc(tail) -> dict:
    if isinstance(tail, ExactGeometricTail):
        return {"kind": "exact-geometric", "ratio": tail.ratio, "scale": tail.scale}
    if isinstance(tail, GeometricBoundTail):
        return {"kind": "geometric-bound", "ratio": tail.ratio, "scale": tail.scale}
    if isinstance(tail, PowerLawTail):
        return {"kind": "power-law", "exponent": tail.exponent, "scale": tail.scale}
    return {
        "kind": "mixed-geometric",
        "scale": tail.scale,
        "ratio": tail.ratio,
        "scale2": tail.scale2,
        "ratio2": tail.ratio2,
    }


def _digit_tail_doc(tail) -> dict:
    if isinstance(tail, ConstantDigitTail):
        return {"kind": "constant", "p0": tail.p0_value}
    if isinstance(tail, PerturbedDigitTail):
        return {"kind": "perturbed", "p0": tail.p0_value, "c": tail.c, "s": tail.s}
    return {
        "kind": "geometric-approach",
        "p0": tail.p0_value,
        "c": tail.c,
        "ratio": tail.ratio,
    }


def to_document(
    spec: ConvolutionSpec, name: Optional[str] = None, description: Optional[str] = None
) -> dict:
    doc: dict[str, Any] = {}
    if name is not None:
        doc["name"] = name
    if description is not None:
        doc["description"] = description
    s = spec.scales
    if isinstance(s, Geometric):
        doc["scales"] = {"kind": "geometric", "lambda": s.lam, "coef": s.coef}
    elif isinstance(s, CantorLike):
        doc["scales"] = {"kind": "cantor-like", "coef": s.coef, "base": s.base}
    elif isinstance(s, TwoTerm):
        doc["scales"] = {"kind": "two-term", "epsilon": s.epsilon}
    elif isinstance(s, ExplicitScales):
        doc["scales"] = {
            "kind": "explicit",
            "prefix": list(s.prefix),
            "tail": _scale_tail_doc(s.tail),
        }
    else:  # pragma: no cover
        raise SpecValidationError(f"unserializable scales {s!r}")
    d = spec.digits
    if isinstance(d, ConstantDigits):
        doc["digits"] = {"kind": "constant", "p0": d.p0_value}
    elif isinstance(d, PerturbedDigits):
        doc["digits"] = {"kind": "perturbed", "p0": d.p0_value, "c": d.c, "s": d.s}
    elif isinstance(d, ExplicitDigits):
        doc["digits"] = {
            "kind": "explicit",
            "prefix": list(d.prefix),
            "tail": _digit_tail_doc(d.tail),
        }
    else:  # pragma: no cover
        raise SpecValidationError(f"unserializable digits {d!r}")
    return doc
