"""Decomposition of lags over a rationally independent generator basis.

Every lag is written ``lambda = sum_j m_j r_j`` with nonnegative integers ``m_j``.
Each generator ``r_j`` is a rational multiple of one declared label (``"1"`` for
rational lags, or a symbolic label such as ``"sqrt2"``); labels are rationally
independent by declaration.  The rational scale per label is chosen so the
exponent columns have gcd 1, which makes the decomposition canonical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, DecompositionError, InvalidInput, InvalidLag
from .lags import UNIT, Lag, label_key, label_values, lag_sort_key, lag_terms, make_lag
from .measure_algebra import DiracSumMeasure
from .polynomial import RationalPolynomial


@dataclass(frozen=True)
class Generator:
    label: str
    value: float  # float value of r_j = rational_scale * label
    rational_scale: Fraction
    label_value: float | None = None

    @property
    def lag(self) -> Lag:
        """The generator as an exact lag."""
        lv = self.label_value if self.label_value is not None else self.value / float(self.rational_scale)
        return make_lag({self.label: self.rational_scale}, {self.label: lv})


@dataclass(frozen=True)
class GeneratorBasis:
    generators: tuple[Generator, ...]

    def __post_init__(self):
        if not self.generators:
            raise InvalidInput("a generator basis needs at least one generator")
        labels = [g.label for g in self.generators]
        if len(set(labels)) != len(labels):
            raise InvalidInput("generator labels must be distinct")
        if any(g.value <= 0 for g in self.generators):
            raise InvalidInput("generator values must be positive")

    @classmethod
    def from_values(cls, values: Sequence[float], labels: Sequence[str] | None = None) -> "GeneratorBasis":
        """Basis of plain floats, e.g. ``(1, sqrt(2))``; used for numeric Kronecker searches."""
        labels = labels or [f"r{j + 1}" for j in range(len(values))]
        return cls(tuple(Generator(l, float(v), Fraction(1)) for l, v in zip(labels, values)))

    @property
    def q(self) -> int:
        return len(self.generators)

    @property
    def values(self) -> np.ndarray:
        return np.array([g.value for g in self.generators])


@dataclass(frozen=True)
class DelayDecomposition:
    basis: GeneratorBasis
    lags: tuple[Lag, ...]
    exponents: tuple[tuple[int, ...], ...]

    @property
    def q(self) -> int:
        return self.basis.q

    def row(self, lag) -> tuple[int, ...]:
        i = self._index.get(lag)
        if i is not None:
            return self.exponents[i]
        # not listed: still decomposable if it is a nonnegative integer combination
        scales = {g.label: g.rational_scale for g in self.basis.generators}
        out = dict.fromkeys(scales, 0)
        for label, c in lag_terms(lag):
            m = c / scales[label] if label in scales else None
            if m is None or m.denominator != 1 or m < 0:
                raise DecompositionError(f"lag {lag} is not in the delay lattice")
            out[label] = int(m)
        return tuple(out[g.label] for g in self.basis.generators)

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {lag: i for i, lag in enumerate(self.lags)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def reconstruct(self, exponents: Sequence[int]) -> Lag:
        total: Lag = Fraction(0)
        for m, g in zip(exponents, self.basis.generators):
            total = total + m * g.lag
        return total

    def max_exponent_sum(self) -> int:
        return max((sum(r) for r in self.exponents), default=0)


def _fraction_gcd(values: Iterable[Fraction]) -> Fraction:
    num, den = 0, 1
    for v in values:
        num = math.gcd(num, v.numerator)
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Fraction(num, den)


def build_lattice(lags: Iterable[Lag]) -> DelayDecomposition:
    """Canonical decomposition of ``lags`` (duplicates allowed, order irrelevant)."""
    distinct = {}
    for lag in lags:
        for label, c in lag_terms(lag):
            if c < 0:
                raise InvalidLag(f"negative coefficient on {label!r}")
        distinct[lag] = None
    if not distinct:
        raise InvalidInput("cannot build a lattice from an empty lag list")
    ordered = sorted(distinct, key=lag_sort_key)

    coeffs: dict[str, list[Fraction]] = {}
    values: dict[str, float] = {}
    for lag in ordered:
        values.update(label_values(lag))
        for label, c in lag_terms(lag):
            coeffs.setdefault(label, []).append(c)

    labels = sorted(coeffs, key=label_key)
    scales = {label: _fraction_gcd(coeffs[label]) for label in labels}
    if not labels:
        # only the zero lag: keep a trivial unit generator
        basis = GeneratorBasis((Generator(UNIT, 1.0, Fraction(1)),))
        return DelayDecomposition(basis, tuple(ordered), tuple((0,) for _ in ordered))

    basis = GeneratorBasis(
        tuple(Generator(l, float(scales[l]) * values[l], scales[l], values[l]) for l in labels)
    )
    rows = []
    for lag in ordered:
        terms = dict(lag_terms(lag))
        row = []
        for label in labels:
            m = terms.get(label, Fraction(0)) / scales[label]
            assert m.denominator == 1
            row.append(int(m))
        rows.append(tuple(row))
    return DelayDecomposition(basis, tuple(ordered), tuple(rows))


@dataclass(frozen=True)
class KroneckerResult:
    beta: float
    offsets: tuple[int, ...]
    epsilon: float


def kronecker_errors(basis: GeneratorBasis, targets: Sequence[float], beta: float, offsets) -> np.ndarray:
    """``|beta r_j - gamma_j - p_j|`` for every generator."""
    r = basis.values
    return np.abs(beta * r - np.asarray(targets, dtype=float) - np.asarray(offsets, dtype=float))


def kronecker_approximate(
    basis: GeneratorBasis,
    targets: Sequence[float],
    epsilon: float,
    max_branches: int = 20_000_000,
    chunk: int = 200_000,
) -> KroneckerResult:
    """Find ``beta`` and integers ``p_j`` with ``|beta r_j - gamma_j - p_j| <= epsilon``.

    The largest generator ``r_0`` is used as pivot: ``beta = (gamma_0 + n + t) / r_0``
    with integer ``n`` and ``|t| <= eps'``, ``eps' = 0.9 * epsilon`` (capped at 0.45).
    For each branch ``n`` the remaining constraints are affine in ``t`` and give an
    interval; branches are visited by increasing ``|gamma_0 + n|`` (ties toward
    positive ``beta``) and the midpoint of the first nonempty interval is returned.
    """
    if not epsilon > 0:
        raise InvalidInput("epsilon must be positive")
    gammas = np.asarray(targets, dtype=float)
    if gammas.shape != (basis.q,) or not np.all(np.isfinite(gammas)):
        raise InvalidInput(f"need {basis.q} finite targets")
    r = basis.values
    piv = int(np.argmax(r))
    others = [j for j in range(basis.q) if j != piv]
    eps = min(0.9 * epsilon, 0.45)
    g0 = gammas[piv]
    base = math.floor(g0)
    frac0 = g0 - base  # gamma_0 + n = frac0 + (n + base)

    best = None
    visited = 0
    # candidate values v = frac0 + k for integer k, ordered by |v|
    k_pos, k_neg = 0, -1
    while visited < max_branches:
        size = min(chunk, max_branches - visited)
        ks = _next_branches(frac0, k_pos, k_neg, size)
        k_pos = max(k_pos, int(ks.max()) + 1) if (ks >= 0).any() else k_pos
        k_neg = min(k_neg, int(ks.min()) - 1) if (ks < 0).any() else k_neg
        visited += len(ks)
        v = frac0 + ks.astype(float)
        lo = np.full(len(ks), -eps)
        hi = np.full(len(ks), eps)
        for j in others:
            a = r[j] / r[piv]
            c = v * a - gammas[j]
            p = np.round(c)
            lo = np.maximum(lo, (p - eps - c) / a)
            hi = np.minimum(hi, (p + eps - c) / a)
        ok = np.nonzero(lo <= hi)[0]
        if len(ok):
            i = int(ok[0])
            t = 0.5 * (lo[i] + hi[i])
            beta = (v[i] + t) / r[piv]
            offsets = np.round(beta * r - gammas).astype(np.int64)
            err = float(kronecker_errors(basis, gammas, beta, offsets).max())
            return KroneckerResult(float(beta), tuple(int(o) for o in offsets), err)
        # track the least-bad branch for the budget report
        width = hi - lo
        i = int(np.argmax(width))
        cand = float(-width[i])
        if best is None or cand < best[0]:
            t = float(np.clip(0.5 * (lo[i] + hi[i]), -eps, eps))
            beta = (v[i] + t) / r[piv]
            offsets = np.round(beta * r - gammas).astype(np.int64)
            err = float(kronecker_errors(basis, gammas, beta, offsets).max())
            best = (cand, KroneckerResult(float(beta), tuple(int(o) for o in offsets), err))
    raise BudgetExceeded(
        f"no beta found within {max_branches} branches for epsilon={epsilon}",
        best=None if best is None else best[1],
    )


def _next_branches(frac0: float, k_pos: int, k_neg: int, size: int) -> np.ndarray:
    """Next ``size`` integers ``k`` in order of ``|frac0 + k|``, continuing from the frontier."""
    # positive side values: frac0 + k_pos, ...; negative side: frac0 + k_neg, ... (decreasing)
    pos = np.arange(k_pos, k_pos + size)
    neg = np.arange(k_neg, k_neg - size, -1)
    ks = np.concatenate([pos, neg])
    mag = np.abs(frac0 + ks.astype(float))
    # stable sort; positive side listed first so ties go to positive beta
    order = np.argsort(mag, kind="stable")[:size]
    return ks[order]


@dataclass(frozen=True)
class Monomial:
    weight: Fraction
    lag: Lag
    exponents: tuple[int, ...]


@dataclass(frozen=True)
class ExpPolynomial:
    """``f^(sigma + i tau) = sum_j h_j e^{sigma lambda_j} prod_k z_k^{m_jk}``, ``z_k = e^{i tau r_k}``."""

    monomials: tuple[Monomial, ...]
    decomposition: DelayDecomposition

    @property
    def q(self) -> int:
        return self.decomposition.q

    def weights(self) -> np.ndarray:
        return np.array([float(t.weight) for t in self.monomials])

    def lag_values(self) -> np.ndarray:
        return np.array([float(t.lag) for t in self.monomials])

    def exponent_matrix(self) -> np.ndarray:
        return np.array([t.exponents for t in self.monomials], dtype=np.int64).reshape(-1, self.q)

    def __call__(self, s: complex) -> complex:
        s = complex(s)
        r = self.decomposition.basis.values
        z = np.exp(s * r)
        return complex(sum(float(t.weight) * complex(np.prod(z ** np.array(t.exponents))) for t in self.monomials))

    def polynomial(self) -> RationalPolynomial:
        """Univariate polynomial in ``x = e^{s r}``; only for single-generator lattices."""
        if self.q != 1:
            raise InvalidInput("univariate polynomial form needs a single generator")
        deg = max((t.exponents[0] for t in self.monomials), default=0)
        coeffs = [Fraction(0)] * (deg + 1)
        for t in self.monomials:
            coeffs[t.exponents[0]] += t.weight
        return RationalPolynomial(coeffs)


def monomial_rep(m: DiracSumMeasure, dec: DelayDecomposition) -> ExpPolynomial:
    return ExpPolynomial(tuple(Monomial(a.weight, a.lag, dec.row(a.lag)) for a in m.atoms), dec)
