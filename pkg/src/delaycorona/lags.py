"""Exact lag values.

A lag is either a plain ``Fraction`` (a rational multiple of the unit label
``"1"``) or a :class:`LagExpr`, a finite combination ``sum c_l * label_l`` with
rational coefficients over labels that are declared rationally independent.
Arithmetic on the coefficients is exact; the float value of each label is only
used for ordering and numerics.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .errors import InvalidInput, InvalidLag

UNIT = "1"


@dataclass(frozen=True)
class LagExpr:
    terms: tuple[tuple[str, Fraction], ...]
    values: tuple[tuple[str, float], ...] = field(compare=False, hash=False, repr=False)

    def __float__(self) -> float:
        vals = dict(self.values)
        return math.fsum(float(c) * vals[label] for label, c in self.terms)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_expr(Fraction(other))
        if not isinstance(other, LagExpr):
            return NotImplemented
        return make_lag(_merge(self.terms, other.terms), {**dict(self.values), **dict(other.values)})

    __radd__ = __add__

    def __mul__(self, k):
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        k = Fraction(k)
        return make_lag({label: c * k for label, c in self.terms}, dict(self.values))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return format_lag(self)


Lag = Union[Fraction, LagExpr]


def _as_expr(q: Fraction) -> LagExpr:
    return LagExpr(((UNIT, q),) if q else (), ((UNIT, 1.0),))


def _merge(a, b) -> dict[str, Fraction]:
    out: dict[str, Fraction] = dict(a)
    for label, c in b:
        out[label] = out.get(label, Fraction(0)) + c
    return out


def make_lag(terms: Mapping[str, Fraction], values: Mapping[str, float]) -> Lag:
    """Build a canonical lag; collapses to ``Fraction`` when only the unit label remains."""
    clean = {label: Fraction(c) for label, c in terms.items() if c}
    if set(clean) <= {UNIT}:
        return clean.get(UNIT, Fraction(0))
    vals = {label: float(values[label]) for label in clean if label != UNIT}
    vals[UNIT] = 1.0
    return LagExpr(
        tuple(sorted(clean.items(), key=lambda kv: label_key(kv[0]))),
        tuple(sorted(vals.items())),
    )


def label_key(label: str):
    # unit label first, then alphabetical
    return (label != UNIT, label)


def lag_terms(lag: Lag) -> tuple[tuple[str, Fraction], ...]:
    if isinstance(lag, LagExpr):
        return lag.terms
    q = Fraction(lag)
    return ((UNIT, q),) if q else ()


def label_values(lag: Lag) -> dict[str, float]:
    if isinstance(lag, LagExpr):
        return dict(lag.values)
    return {UNIT: 1.0}


def lag_sort_key(lag: Lag):
    return (float(lag), tuple((label_key(l), c) for l, c in lag_terms(lag)))


def is_rational(lag: Lag) -> bool:
    return not isinstance(lag, LagExpr)


def format_lag(lag: Lag) -> str:
    parts = []
    for label, c in lag_terms(lag):
        parts.append(str(c) if label == UNIT else f"{c} * {label}")
    return " + ".join(parts) if parts else "0"


def parse_rational(text) -> Fraction:
    """Parse ``"3/2"``, ``"0.25"``, ``"-1e-3"`` or a number into an exact ``Fraction``.

    Floats are converted through their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(text, bool):
        raise InvalidInput(f"not a number: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        if not math.isfinite(text):
            raise InvalidInput(f"not a finite number: {text!r}")
        return Fraction(repr(text))
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational literal: {text!r}") from exc


_TERM = re.compile(
    r"^\s*(?:(?P<coef>[-+]?[0-9./eE+-]+)\s*(?:\*\s*(?P<label>[A-Za-z_]\w*))?"
    r"|(?P<bare>[A-Za-z_]\w*)(?:\s*\*\s*(?P<rcoef>[-+]?[0-9./eE+-]+))?)\s*$"
)


def parse_lag(text, generators: Mapping[str, float] | None = None) -> Lag:
    """Parse a lag expression such as ``"3/2"``, ``"sqrt2"`` or ``"1 + 3/2 * sqrt2"``.

    Labels must be declared in ``generators`` (label -> positive float value).
    Negative coefficients raise :class:`InvalidLag`.
    """
    generators = dict(generators or {})
    if not isinstance(text, str):
        q = parse_rational(text)
        if q < 0:
            raise InvalidLag(f"negative lag {text!r}")
        return q
    terms: dict[str, Fraction] = {}
    for chunk in re.split(r"(?<![eE])\+", text):
        if not chunk.strip():
            raise InvalidLag(f"malformed lag expression {text!r}")
        m = _TERM.match(chunk)
        if m is None:
            raise InvalidLag(f"malformed lag expression {text!r}")
        if m.group("bare"):
            label, coef = m.group("bare"), m.group("rcoef") or "1"
        else:
            label, coef = m.group("label") or UNIT, m.group("coef")
        if label != UNIT and label not in generators:
            raise InvalidLag(f"undeclared generator label {label!r} in {text!r}")
        c = parse_rational(coef)
        if c < 0:
            raise InvalidLag(f"negative coefficient in lag {text!r}")
        terms[label] = terms.get(label, Fraction(0)) + c
    return make_lag(terms, generators)
