"""Corona condition ``sum_i |f_i^(s)| >= alpha > 0`` for finite Dirac sums.

Three routes:

* :func:`corona_inf_estimate` scans ``G(sigma, z) = sum_k |sum_l f_kl e^{sigma lambda_kl} z^{m_kl}|``
  over a sigma window times the torus (the torus closure of the imaginary axis), plus the
  ``sigma -> -inf`` limit given by the lag-0 weights;
* :func:`corona_decide_commensurable` decides the single-generator case exactly through
  the gcd of the polynomials ``P_i(x)``, ``x = e^{s r}``;
* :func:`certify_violation` turns a common zero of a generalized character into an explicit
  sequence ``s_eps`` with ``sum |f^(s_eps)| -> 0`` through Kronecker approximation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .delay_lattice import (
    DelayDecomposition,
    ExpPolynomial,
    KroneckerResult,
    build_lattice,
    kronecker_approximate,
    monomial_rep,
)
from .errors import InvalidInput, NotACommonZero, UnsupportedCase
from .measure_algebra import DiracSumMeasure, char_eval, laplace_eval, tv_norm
from .polynomial import RationalPolynomial, poly_gcd
from .scan import ScanPoint, angles, torus_scan

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"


@dataclass(frozen=True)
class CoronaInstance:
    measures: tuple[DiracSumMeasure, ...]
    decomposition: DelayDecomposition

    def __post_init__(self):
        if not self.measures:
            raise InvalidInput("a corona instance needs at least one measure")
        if all(m.is_zero for m in self.measures):
            raise InvalidInput("all measures are zero")
        for m in self.measures:
            for lag in m.lags:
                self.decomposition.row(lag)

    @classmethod
    def from_measures(cls, measures: Sequence[DiracSumMeasure]) -> "CoronaInstance":
        measures = tuple(measures)
        lags = [lag for m in measures for lag in m.lags] or [Fraction(0)]
        return cls(measures, build_lattice(lags))

    @property
    def q(self) -> int:
        return self.decomposition.q

    def reps(self) -> list[ExpPolynomial]:
        return [monomial_rep(m, self.decomposition) for m in self.measures]

    def polynomials(self) -> list[RationalPolynomial]:
        return [rep.polynomial() for rep in self.reps()]

    def value(self, s: complex) -> float:
        """``sum_k |f_k^(s)|``."""
        return math.fsum(abs(laplace_eval(m, s)) for m in self.measures)

    def lag_zero_limit(self) -> float:
        """Limit of ``sum_k |f_k^(s)|`` as ``Re s -> -inf``."""
        return math.fsum(abs(float(m.weight_at(Fraction(0)))) for m in self.measures)

    def max_tv(self) -> Fraction:
        return max(tv_norm(m) for m in self.measures)


@dataclass(frozen=True)
class Witness:
    """Location of a scan minimum: finite ``(sigma, torus angles)`` or the ``sigma -> -inf`` end."""

    sigma: float
    angles: tuple[float, ...]
    value: float
    s: complex | None = None  # single-generator case: the complex frequency

    @property
    def at_minus_infinity(self) -> bool:
        return self.sigma == -math.inf


@dataclass(frozen=True)
class CertificateEntry:
    epsilon: float
    s: complex
    value: float
    bound: float
    kronecker: KroneckerResult | None = None


@dataclass
class CoronaReport:
    verdict: str
    alpha_hat: float
    witness: Witness
    certificate: list[CertificateEntry] | None = None
    gcd: RationalPolynomial | None = None
    threshold: float | None = None
    scan: object = field(default=None, repr=False)


def default_sigma_window(inst: CoronaInstance) -> tuple[float, float]:
    total = float(sum(tv_norm(m) for m in inst.measures))
    rmin = float(inst.decomposition.basis.values.min())
    S = max(5.0, math.log1p(total) / rmin)
    return (-S, S)


def _objective(reps: list[ExpPolynomial]):
    packs = [(rep.weights(), rep.lag_values(), rep.exponent_matrix()) for rep in reps]

    def G(sigma: np.ndarray, num: np.ndarray, den: int) -> np.ndarray:
        total = np.zeros(len(sigma))
        for w, lam, exps in packs:
            if len(w) == 0:
                continue
            ang = angles(num, exps, den)
            re = np.zeros(len(sigma))
            im = np.zeros(len(sigma))
            for l in range(len(w)):
                mag = w[l] * np.exp(sigma * lam[l])
                re += mag * np.cos(ang[:, l])
                im += mag * np.sin(ang[:, l])
            total += np.hypot(re, im)
        return total

    return G


def corona_inf_estimate(
    inst: CoronaInstance,
    sigma_window: tuple[float, float] | None = None,
    n_sigma: int = 64,
    n_torus: int = 64,
    refine: int = 1,
    halve: bool = False,
    workers: int = 1,
    keep_grid: bool = False,
):
    """Estimate ``inf_s sum_k |f_k^(s)|``; returns ``(alpha_hat, witness, scan_result)``."""
    window = sigma_window or default_sigma_window(inst)
    if not window[0] < window[1]:
        raise InvalidInput(f"empty sigma window {window}")
    res = torus_scan(
        _objective(inst.reps()), inst.q, window, n_sigma, n_torus,
        refine=refine, halve=halve, workers=workers, keep_grid=keep_grid,
    )
    limit = inst.lag_zero_limit()
    if limit < res.value:
        return limit, Witness(-math.inf, (), limit), res
    return res.value, _witness(inst, res.point), res


def _witness(inst: CoronaInstance, p: ScanPoint) -> Witness:
    s = None
    if inst.q == 1:
        r = float(inst.decomposition.basis.values[0])
        theta = p.angles[0]
        s = complex(p.sigma, theta / r)
    return Witness(p.sigma, p.angles, p.value, s)


def corona_gcd(inst: CoronaInstance) -> RationalPolynomial:
    if inst.q != 1:
        raise UnsupportedCase("exact decision needs a single-generator (commensurable) lattice")
    return poly_gcd(inst.polynomials())


def corona_decide_commensurable(inst: CoronaInstance) -> str:
    """``holds`` iff the polynomials ``P_i`` have a nonzero constant gcd over the rationals."""
    g = corona_gcd(inst)
    return HOLDS if g.degree == 0 else FAILS


def certificate_constants(inst: CoronaInstance, sigma: float = 0.0) -> tuple[float, float, float]:
    """``(C, C_tilde, C_sum)`` for bounding certificate values.

    ``C = 2 pi max_{k,l} sum_j m_klj`` comes from ``|1 - e^{i theta}| <= |theta|`` and
    ``C_tilde = max_k sum_l |f_kl|``; together they bound each ``|f_k^(s_eps)|`` by
    ``C * C_tilde * eps`` at ``sigma = 0``.  The reported value sums over ``k`` and picks up
    ``e^{sigma lambda}`` weights, so the bound we attach uses
    ``C_sum = sum_k sum_l |f_kl| e^{sigma lambda_kl}`` instead.
    """
    C = 2 * math.pi * inst.decomposition.max_exponent_sum()
    Ct = float(inst.max_tv())
    Cs = math.fsum(
        abs(float(a.weight)) * math.exp(sigma * float(a.lag)) for m in inst.measures for a in m.atoms
    )
    return C, Ct, Cs


def certify_violation(
    inst: CoronaInstance,
    sigma: float,
    phases: Sequence[float],
    epsilons: Sequence[float],
    tol: float = 1e-8,
) -> list[CertificateEntry]:
    """Explicit frequencies ``s_eps`` along which every ``f_k^`` tends to zero.

    Requires ``(sigma, phases)`` to be a common zero of the generalized characters
    (phases in cycles per lattice generator).  For each ``eps`` a Kronecker
    approximation ``beta r_j ~ gamma_j + p_j`` gives ``s_eps = sigma + 2 pi i beta``.
    """
    phases = [float(g) for g in phases]
    C, _, Cs = certificate_constants(inst, sigma)
    for m in inst.measures:
        z = char_eval(m, sigma, phases, inst.decomposition)
        if abs(z) > tol * max(1.0, Cs):
            raise NotACommonZero(f"character value {abs(z):.3e} at the proposed point is not zero")
    out = []
    for eps in epsilons:
        kr = kronecker_approximate(inst.decomposition.basis, phases, eps)
        s = complex(sigma, 2 * math.pi * kr.beta)
        out.append(CertificateEntry(float(eps), s, inst.value(s), C * Cs * float(eps), kr))
    return out


def certify_lag_zero_limit(inst: CoronaInstance, epsilons: Sequence[float]) -> list[CertificateEntry]:
    """Certificate for the ``sigma -> -inf`` homomorphism (no measure has a lag-0 atom).

    With ``lambda_min`` the smallest positive lag, ``|f_k^(sigma)| <= tv(f_k) e^{sigma lambda_min}``
    for ``sigma < 0``, so ``sigma_eps = ln(eps) / lambda_min`` gives value ``<= sum_k tv(f_k) * eps``.
    """
    if inst.lag_zero_limit() != 0:
        raise NotACommonZero("some measure has a nonzero lag-0 weight")
    lam = min(float(l) for m in inst.measures for l in m.lags)
    _, _, total = certificate_constants(inst)
    out = []
    for eps in epsilons:
        sig = math.log(eps) / lam
        out.append(CertificateEntry(float(eps), complex(sig, 0.0), inst.value(sig), total * float(eps)))
    return out


def common_character_zero(inst: CoronaInstance):
    """Single-generator case: a nonzero common root ``x*`` of the ``P_i`` as ``(sigma, [gamma])``.

    ``x* = e^{sigma r} e^{2 pi i gamma}``.  Returns ``None`` when the gcd only vanishes at 0.
    """
    g = corona_gcd(inst)
    if g.degree < 1:
        return None
    r = float(inst.decomposition.basis.values[0])
    roots = [z for z in g.roots() if abs(z) > 1e-12]
    if not roots:
        return None
    # deterministic choice: smallest modulus, then smallest argument
    z = min(roots, key=lambda z: (round(abs(z), 12), round(cmath.phase(z), 12)))
    sigma = math.log(abs(z)) / r
    gamma = cmath.phase(z) / (2 * math.pi)
    return sigma, [gamma]


DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4)


def corona_decide(
    inst: CoronaInstance,
    sigma_window=None,
    n_sigma: int = 64,
    n_torus: int = 64,
    refine: int = 1,
    threshold_factor: float = 1e-2,
    threshold: float | None = None,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    workers: int = 1,
    keep_grid: bool = False,
) -> CoronaReport:
    """Full report: exact verdict when commensurable, otherwise a scan verdict.

    Scans alone never produce ``fails``; they report ``holds`` when ``alpha_hat`` exceeds
    ``threshold_factor * max_k tv(f_k)`` (or the absolute ``threshold``) and ``inconclusive`` otherwise.
    """
    alpha, witness, res = corona_inf_estimate(
        inst, sigma_window, n_sigma, n_torus, refine=refine, workers=workers, keep_grid=keep_grid
    )
    if threshold is None:
        threshold = threshold_factor * float(inst.max_tv())
    if inst.q != 1:
        verdict = HOLDS if alpha > threshold else INCONCLUSIVE
        return CoronaReport(verdict, alpha, witness, threshold=threshold, scan=res)

    g = corona_gcd(inst)
    if g.degree == 0:
        return CoronaReport(HOLDS, alpha, witness, gcd=g, threshold=threshold, scan=res)
    zero = common_character_zero(inst)
    if zero is not None:
        cert = certify_violation(inst, zero[0], zero[1], epsilons)
    else:
        cert = certify_lag_zero_limit(inst, epsilons)
    return CoronaReport(FAILS, alpha, witness, cert, gcd=g, threshold=threshold, scan=res)
