"""Convolution algebra of finite Dirac sums supported on the nonpositive half-line.

A measure ``sum_j h_j delta_{-lambda_j}`` is stored through its atoms
``(lambda_j, h_j)`` with ``lambda_j >= 0`` (the lag) and exact rational weights.
Convolution adds lags and multiplies weights; the Laplace transform of
``delta_{-lambda}`` is ``exp(s * lambda)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput, MeshMismatch
from .lags import Lag, format_lag, lag_sort_key, parse_lag, parse_rational


@dataclass(frozen=True)
class Atom:
    lag: Lag
    weight: Fraction


@dataclass(frozen=True)
class DiracSumMeasure:
    """Normalized atomic measure; build it with :func:`normalize` or the helpers below."""

    atoms: tuple[Atom, ...]
    support_bound: Lag

    @classmethod
    def zero(cls) -> "DiracSumMeasure":
        return cls((), Fraction(0))

    @classmethod
    def delta(cls, lag=0, weight=1) -> "DiracSumMeasure":
        return normalize([(lag, weight)])

    @classmethod
    def from_pairs(cls, pairs, generators=None) -> "DiracSumMeasure":
        """Parse ``[(lag, weight), ...]`` where entries may be strings like ``"3/2"``."""
        return normalize(
            [Atom(parse_lag(lag, generators), parse_rational(w)) for lag, w in pairs]
        )

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    @property
    def lags(self) -> tuple[Lag, ...]:
        return tuple(a.lag for a in self.atoms)

    def weight_at(self, lag) -> Fraction:
        for a in self.atoms:
            if a.lag == lag:
                return a.weight
        return Fraction(0)

    def __add__(self, other: "DiracSumMeasure") -> "DiracSumMeasure":
        return normalize(self.atoms + other.atoms)

    def __neg__(self) -> "DiracSumMeasure":
        return scale(self, -1)

    def __sub__(self, other: "DiracSumMeasure") -> "DiracSumMeasure":
        return self + (-other)

    def __mul__(self, other: "DiracSumMeasure") -> "DiracSumMeasure":
        return convolve(self, other)

    def __call__(self, s: complex) -> complex:
        return laplace_eval(self, s)

    def to_pairs(self) -> list[list[str]]:
        return [[format_lag(a.lag), str(a.weight)] for a in self.atoms]

    def __str__(self) -> str:
        if not self.atoms:
            return "0"
        return " + ".join(f"({a.weight})d[-{format_lag(a.lag)}]" for a in self.atoms)


def _coerce_atom(raw) -> Atom:
    if isinstance(raw, Atom):
        lag, weight = raw.lag, raw.weight
    else:
        lag, weight = raw
    if not hasattr(lag, "terms"):
        lag = parse_rational(lag)
    weight = parse_rational(weight)
    if float(lag) < 0:
        raise InvalidInput(f"negative lag {lag}")
    return Atom(lag, weight)


def normalize(raw: Iterable) -> DiracSumMeasure:
    """Merge duplicate lags, drop zero weights, sort by lag."""
    merged: dict = {}
    for item in raw:
        atom = _coerce_atom(item)
        merged[atom.lag] = merged.get(atom.lag, Fraction(0)) + atom.weight
    atoms = tuple(
        Atom(lag, w)
        for lag, w in sorted(merged.items(), key=lambda kv: lag_sort_key(kv[0]))
        if w != 0
    )
    bound = atoms[-1].lag if atoms else Fraction(0)
    return DiracSumMeasure(atoms, bound)


def scale(m: DiracSumMeasure, c) -> DiracSumMeasure:
    c = Fraction(c)
    return normalize([Atom(a.lag, a.weight * c) for a in m.atoms])


def convolve(a: DiracSumMeasure, b: DiracSumMeasure) -> DiracSumMeasure:
    return normalize(
        Atom(x.lag + y.lag, x.weight * y.weight) for x in a.atoms for y in b.atoms
    )


def _wide(x) -> np.longdouble:
    """Extended-precision value of a rational or a lag expression."""
    if isinstance(x, Fraction):
        return np.longdouble(x.numerator) / np.longdouble(x.denominator)
    if hasattr(x, "terms"):
        vals = dict(x.values)
        return sum((_wide(c) * np.longdouble(vals.get(label, 1.0)) for label, c in x.terms), np.longdouble(0))
    return np.longdouble(x)


def laplace_eval_many(m: DiracSumMeasure, s) -> np.ndarray:
    """Evaluate ``sum_j h_j exp(s * lambda_j)`` at every entry of ``s``.

    Phases ``Im(s) * lambda_j`` reach hundreds of radians; forming them, the exponentials and
    the sum in extended precision keeps the per-term rounding consistent, so algebraic
    identities such as ``L(a * b) = L(a) L(b)`` survive at the 1e-15 level.
    """
    s = np.asarray(s, dtype=complex)
    if not m.atoms:
        return np.zeros(s.shape, dtype=complex)
    lam = np.array([_wide(a.lag) for a in m.atoms], dtype=np.longdouble)
    w = np.array([_wide(a.weight) for a in m.atoms], dtype=np.longdouble)
    sr = s.real.astype(np.longdouble)[..., None]
    si = s.imag.astype(np.longdouble)[..., None]
    mag = w * np.exp(sr * lam)
    ph = si * lam
    re = (mag * np.cos(ph)).sum(axis=-1)
    im = (mag * np.sin(ph)).sum(axis=-1)
    return re.astype(float) + 1j * im.astype(float)


def laplace_eval(m: DiracSumMeasure, s: complex) -> complex:
    """``sum_j h_j exp(s * lambda_j)``; see :func:`laplace_eval_many` for the precision notes."""
    return complex(laplace_eval_many(m, np.array([complex(s)]))[0])


def tv_norm(m: DiracSumMeasure) -> Fraction:
    return sum((abs(a.weight) for a in m.atoms), Fraction(0))


def char_eval(m: DiracSumMeasure, sigma: float, phases: Sequence[float], lattice) -> complex:
    """Evaluate the homomorphism ``sum_j h_j e^{sigma lambda_j} chi(lambda_j)``.

    The character is fixed on the lattice generators by ``chi(r_k) = exp(2 pi i phases[k])``
    (phases in cycles); ``lattice`` is a :class:`~delaycorona.delay_lattice.DelayDecomposition`.
    """
    if len(phases) != lattice.q:
        raise InvalidInput(f"expected {lattice.q} phases, got {len(phases)}")
    re, im = [], []
    for a in m.atoms:
        row = lattice.row(a.lag)
        cycles = math.fsum(mk * g for mk, g in zip(row, phases))
        term = float(a.weight) * math.exp(sigma * float(a.lag)) * cmath.exp(2j * math.pi * cycles)
        re.append(term.real)
        im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im))


@dataclass(frozen=True)
class PiecewiseConstantFunction:
    """Vector-valued step function on ``[start, start + len(values) * mesh_step)``.

    ``values[k]`` is the (constant) value on cell ``[start + k rho, start + (k+1) rho)``.
    """

    mesh_step: Fraction
    start: Fraction
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.mesh_step <= 0:
            raise InvalidInput("mesh_step must be positive")
        if (self.start / self.mesh_step).denominator != 1:
            raise MeshMismatch("start must be a multiple of mesh_step")
        if self.values and len({len(v) for v in self.values}) != 1:
            raise InvalidInput("all cell values must have the same dimension")

    @classmethod
    def build(cls, mesh_step, start, values) -> "PiecewiseConstantFunction":
        """Lenient constructor: scalars become 1-vectors, literals become Fractions."""
        cells = []
        for v in values:
            if isinstance(v, (list, tuple)):
                cells.append(tuple(parse_rational(x) for x in v))
            else:
                cells.append((parse_rational(v),))
        return cls(parse_rational(mesh_step), parse_rational(start), tuple(cells))

    @classmethod
    def zeros(cls, mesh_step, start, n_cells: int, dim: int) -> "PiecewiseConstantFunction":
        zero = (Fraction(0),) * dim
        return cls(Fraction(mesh_step), Fraction(start), (zero,) * n_cells)

    @property
    def dim(self) -> int:
        return len(self.values[0]) if self.values else 0

    @property
    def n_cells(self) -> int:
        return len(self.values)

    @property
    def end(self) -> Fraction:
        return self.start + self.n_cells * self.mesh_step

    def cell_start(self, k: int) -> Fraction:
        return self.start + k * self.mesh_step

    def first_index(self) -> int:
        return int(self.start / self.mesh_step)

    def value_at_index(self, idx: int) -> tuple[Fraction, ...]:
        """Value on global cell ``[idx rho, (idx+1) rho)``; zero outside the domain."""
        k = idx - self.first_index()
        if 0 <= k < self.n_cells:
            return self.values[k]
        return (Fraction(0),) * self.dim

    def __call__(self, t) -> tuple[Fraction, ...]:
        t = Fraction(t)
        idx = math.floor(t / self.mesh_step)
        return self.value_at_index(idx)


def truncate(f: PiecewiseConstantFunction) -> PiecewiseConstantFunction:
    zero = (Fraction(0),) * f.dim
    return PiecewiseConstantFunction(
        f.mesh_step,
        f.start,
        tuple(zero if f.cell_start(k) < 0 else v for k, v in enumerate(f.values)),
    )


def convolve_measure_function(m: DiracSumMeasure, f: PiecewiseConstantFunction) -> PiecewiseConstantFunction:
    """Return ``t -> sum_j h_j f(t + lambda_j)`` on ``[f.start - T_m, f.end)``.

    ``f`` is taken as zero outside its domain.
    """
    shifts = []
    for a in m.atoms:
        if not isinstance(a.lag, Fraction):
            raise MeshMismatch(f"lag {format_lag(a.lag)} is not on a rational mesh")
        n = a.lag / f.mesh_step
        if n.denominator != 1:
            raise MeshMismatch(f"lag {a.lag} is not a multiple of mesh step {f.mesh_step}")
        shifts.append((int(n), a.weight))
    span = max((n for n, _ in shifts), default=0)
    first = f.first_index() - span
    cells = []
    for idx in range(first, f.first_index() + f.n_cells):
        acc = [Fraction(0)] * f.dim
        for n, w in shifts:
            v = f.value_at_index(idx + n)
            for i, x in enumerate(v):
                acc[i] += w * x
        cells.append(tuple(acc))
    return PiecewiseConstantFunction(f.mesh_step, first * f.mesh_step, tuple(cells))


__all__ = [
    "Atom",
    "DiracSumMeasure",
    "PiecewiseConstantFunction",
    "normalize",
    "scale",
    "convolve",
    "laplace_eval",
    "tv_norm",
    "char_eval",
    "truncate",
    "convolve_measure_function",
]
