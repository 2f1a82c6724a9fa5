"""Constructive Bezout identity ``sum_i f_i * g_i = delta_0`` for commensurable lags.

With a single lattice generator ``r`` every ``f_i`` is a polynomial ``P_i`` in
``x = e^{s r}``; extended Euclid over the rationals gives ``sum P_i G_i = 1`` and
each ``G_i = sum_n c_n x^n`` lifts back to ``g_i = sum_n c_n delta_{-n r}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corona_checker import CoronaInstance
from .errors import CoronaViolated, InvalidInput, NotCoprime, UnsupportedCase
from .measure_algebra import Atom, DiracSumMeasure, convolve, normalize
from .polynomial import RationalPolynomial, poly_xgcd


@dataclass(frozen=True)
class BezoutCertificate:
    cofactors: tuple[DiracSumMeasure, ...]
    residual: DiracSumMeasure

    @property
    def verified(self) -> bool:
        return self.residual == DiracSumMeasure.delta(0)


def poly_bezout(polys: Sequence[RationalPolynomial]) -> list[RationalPolynomial]:
    """Cofactors ``G_i`` with ``sum_i P_i G_i = 1`` by folding pairwise extended Euclid."""
    polys = list(polys)
    if not polys or all(p.is_zero for p in polys):
        raise InvalidInput("need at least one nonzero polynomial")
    g = RationalPolynomial()
    cof: list[RationalPolynomial] = []
    for p in polys:
        d, a, b = poly_xgcd(g, p)
        cof = [c * a for c in cof] + [b]
        g = d
    if g.degree != 0:
        raise NotCoprime(f"polynomials share the factor {g}", gcd=g)
    inv = 1 / g.leading
    return [c * inv for c in cof]


def lift(poly: RationalPolynomial, r) -> DiracSumMeasure:
    """``sum_n c_n x^n`` -> ``sum_n c_n delta_{-n r}``."""
    return normalize(Atom(n * r, c) for n, c in enumerate(poly.coefficients) if c)


def measure_bezout(inst: CoronaInstance) -> BezoutCertificate:
    if inst.q != 1:
        raise UnsupportedCase(
            "Bezout factors are only constructed for commensurable lags; "
            "the incommensurable case has an existence proof but no algorithm"
        )
    polys = inst.polynomials()
    try:
        cofs = poly_bezout(polys)
    except NotCoprime as exc:
        raise CoronaViolated(f"corona condition fails: common factor {exc.gcd}", gcd=exc.gcd) from None
    r = inst.decomposition.basis.generators[0].lag
    gs = tuple(lift(c, r) for c in cofs)
    residual = DiracSumMeasure.zero()
    for f, g in zip(inst.measures, gs):
        residual = residual + convolve(f, g)
    cert = BezoutCertificate(gs, residual)
    if not cert.verified:
        raise AssertionError(f"Bezout residual {residual} differs from delta_0")
    return cert


def bezout_from_measures(measures: Sequence[DiracSumMeasure]) -> BezoutCertificate:
    return measure_bezout(CoronaInstance.from_measures(measures))


__all__ = [
    "BezoutCertificate",
    "RationalPolynomial",
    "poly_bezout",
    "lift",
    "measure_bezout",
    "bezout_from_measures",
]
