"""Frequency-domain controllability test for ``x(t) = sum_j A_j x(t - Lambda_j) + B u(t)``.

Condition (i): ``rank [M, B] = d`` for every ``M`` in the closure of
``H(s) = I - sum_j e^{-s Lambda_j} A_j``.  At finite ``Re s = sigma`` the closure is
the torus completion ``H(sigma, z) = I - sum_j A_j e^{-sigma Lambda_j} z^{m_j}``
(Kronecker density of ``(e^{-i tau r_k})_k``); ``sigma -> +inf`` adds ``I``; the
``sigma -> -inf`` direction diverges and is tested on the renormalized family
``e^{sigma Lambda_N} H -> -phase * A_N``.
Condition (ii): ``rank [A_N, B] = d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .delay_lattice import DelayDecomposition, build_lattice
from .errors import InvalidInput
from .lags import Lag, format_lag, is_rational, lag_sort_key, parse_lag, parse_rational
from .scan import ScanPoint, angles, torus_scan

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

Matrix = tuple[tuple[Fraction, ...], ...]


def _as_matrix(rows, n_rows: int, n_cols: int, name: str) -> Matrix:
    rows = [list(r) for r in rows]
    if len(rows) != n_rows or any(len(r) != n_cols for r in rows):
        raise InvalidInput(f"{name} must be {n_rows}x{n_cols}")
    return tuple(tuple(parse_rational(x) for x in r) for r in rows)


@dataclass(frozen=True)
class SystemSpec:
    d: int
    m: int
    delays: tuple[Lag, ...]
    A: tuple[Matrix, ...]
    B: Matrix

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise InvalidInput("dimensions d and m must be positive")
        if not self.delays:
            raise InvalidInput("at least one delay is required")
        if len(self.A) != len(self.delays):
            raise InvalidInput("one matrix A_j per delay")
        keys = [lag_sort_key(l) for l in self.delays]
        if float(self.delays[0]) <= 0:
            raise InvalidInput("delays must be positive")
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise InvalidInput("delays must be strictly increasing")

    @classmethod
    def build(cls, A: Sequence, B, delays: Sequence, generators=None) -> "SystemSpec":
        """Convenience constructor from nested lists / strings / numbers."""
        B = [list(r) if isinstance(r, (list, tuple, np.ndarray)) else [r] for r in B]
        d, m = len(B), len(B[0]) if B else 0
        As = tuple(_as_matrix(a if np.ndim(a) == 2 else [[a]], d, d, f"A[{j}]") for j, a in enumerate(A))
        Bm = _as_matrix(B, d, m, "B")
        lags = tuple(parse_lag(x, generators) for x in delays)
        return cls(d, m, lags, As, Bm)

    @property
    def N(self) -> int:
        return len(self.delays)

    @property
    def A_float(self) -> np.ndarray:
        return np.array([[[float(x) for x in r] for r in a] for a in self.A]).reshape(self.N, self.d, self.d)

    @property
    def B_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.B]).reshape(self.d, self.m)

    @property
    def delay_values(self) -> np.ndarray:
        return np.array([float(l) for l in self.delays])

    @property
    def commensurable(self) -> bool:
        return all(is_rational(l) for l in self.delays)

    def lattice(self) -> DelayDecomposition:
        return build_lattice(self.delays)

    def similar(self, P) -> "SystemSpec":
        """``(P A_j P^-1, P B)`` for an invertible rational matrix ``P``."""
        from .exact_linalg import inverse, matmul

        P = [[parse_rational(x) for x in r] for r in P]
        Pi = inverse(P)
        A = tuple(tuple(map(tuple, matmul(matmul(P, a), Pi))) for a in self.A)
        B = tuple(map(tuple, matmul(P, self.B)))
        return SystemSpec(self.d, self.m, self.delays, A, B)

    def describe(self) -> dict:
        return {
            "d": self.d,
            "m": self.m,
            "delays": [format_lag(l) for l in self.delays],
            "A": [[[str(x) for x in r] for r in a] for a in self.A],
            "B": [[str(x) for x in r] for r in self.B],
        }


def h_eval(spec: SystemSpec, s: complex) -> np.ndarray:
    H = np.eye(spec.d, dtype=complex)
    for a, lam in zip(spec.A_float, spec.delay_values):
        H -= np.exp(-complex(s) * lam) * a
    return H


def sigma_min(M: np.ndarray, B: np.ndarray) -> float:
    """Smallest of the ``d`` singular values of ``[M, B]``."""
    return float(np.linalg.svd(np.hstack([M, B.astype(M.dtype)]), compute_uv=False)[-1])


def numerical_rank(M: np.ndarray, rtol: float = 1e-10) -> int:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def cond_ii_check(spec: SystemSpec) -> tuple[str, int]:
    rank = numerical_rank(np.hstack([spec.A_float[-1], spec.B_float]))
    return (PASS if rank == spec.d else FAIL), rank


@dataclass
class CondIResult:
    verdict: str
    min_sigma_min: float
    argmin: ScanPoint
    polished_min: float
    polished_argmin: ScanPoint
    endpoint_plus: float  # sigma_min([I, B])
    endpoint_minus: float  # sigma_min([A_N, B])
    window: tuple[float, float]
    witness_matrix: np.ndarray | None = None
    pass_tol: float = 0.0
    fail_tol: float = 0.0
    scan: object = field(default=None, repr=False)


@dataclass
class HautusReport:
    cond_i: CondIResult
    cond_ii: str
    cond_ii_rank: int
    overall: str


def default_window(spec: SystemSpec) -> tuple[float, float]:
    """Sigma window ``[-S_minus, S_plus]``.

    ``S_plus = ln(1 + 2 sum ||A_j||) / Lambda_1 + 2``: beyond it ``||sum A_j e^{-sigma Lambda_j}|| < 1/2``.
    ``S_minus`` is at least ``S_plus`` and large enough that the renormalized family is within
    ``sigma_min([A_N, B]) / 2`` of its limit, so no rank drop can hide below the window.
    """
    A = spec.A_float
    lam = spec.delay_values
    norms = [float(np.linalg.norm(a, 2)) for a in A]
    s_plus = math.log1p(2 * sum(norms)) / lam[0] + 2
    s_minus = s_plus
    sN = sigma_min(A[-1], spec.B_float)
    if sN > 0:
        N = spec.N
        s_minus = max(s_minus, math.log(2 * N / sN) / lam[-1])
        for j in range(N - 1):
            if norms[j] > 0:
                s_minus = max(s_minus, math.log(2 * N * norms[j] / sN) / (lam[-1] - lam[j]))
    return (-float(s_minus), float(s_plus))


def _objective(spec: SystemSpec, dec: DelayDecomposition):
    A = spec.A_float
    B = spec.B_float
    lam = spec.delay_values
    exps = np.array([dec.row(l) for l in spec.delays], dtype=np.int64).reshape(spec.N, dec.q)
    eye = np.eye(spec.d)

    def smin(sigma: np.ndarray, num: np.ndarray, den: int) -> np.ndarray:
        ang = angles(num, exps, den)  # (P, N)
        P = len(sigma)
        M = np.zeros((P, spec.d, spec.d + spec.m), dtype=complex)
        M[:, :, : spec.d] = eye
        M[:, :, spec.d:] = B
        for j in range(spec.N):
            c = np.exp(-sigma * lam[j]) * (np.cos(ang[:, j]) - 1j * np.sin(ang[:, j]))
            M[:, :, : spec.d] -= c[:, None, None] * A[j]
        return np.linalg.svd(M, compute_uv=False)[:, -1]

    return smin, exps


def _h_torus(spec: SystemSpec, exps: np.ndarray, sigma: float, theta: Sequence[float]) -> np.ndarray:
    H = np.eye(spec.d, dtype=complex)
    for j, a in enumerate(spec.A_float):
        ph = float(np.dot(exps[j], theta))
        H -= np.exp(-sigma * float(spec.delays[j])) * np.exp(-1j * ph) * a
    return H


def _polish(spec, exps, start: ScanPoint, rounds: int = 2) -> ScanPoint:
    B = spec.B_float

    def f(x):
        return sigma_min(_h_torus(spec, exps, x[0], x[1:]), B)

    x = np.array([start.sigma, *start.angles])
    best = ScanPoint(start.sigma, start.angles, f(x))
    for _ in range(rounds):
        res = minimize(f, x, method="Nelder-Mead",
                       options={"xatol": 1e-14, "fatol": 1e-16, "maxiter": 4000 * len(x), "adaptive": True})
        if res.fun < best.value:
            x = res.x
            best = ScanPoint(float(x[0]), tuple(float(t) for t in x[1:]), float(res.fun))
    return best


def cond_i_scan(
    spec: SystemSpec,
    window: tuple[float, float] | None = None,
    n_sigma: int = 64,
    n_torus: int = 64,
    refine: int = 2,
    pass_tol: float | None = None,
    fail_tol: float | None = None,
    halve: bool = False,
    workers: int = 1,
    keep_grid: bool = False,
) -> CondIResult:
    """Minimize ``sigma_min([H(sigma, z), B])`` over the window times the torus.

    ``fail`` needs a confirmed rank drop (polished minimum below ``fail_tol``, default
    ``1e-8 (1 + max ||A_j||)``); ``pass`` needs both the scan and the polished minimum above
    ``pass_tol`` (default ``1e-4 (1 + ||B||)``) and both endpoints of full rank.
    """
    dec = spec.lattice()
    window = window or default_window(spec)
    if not window[0] < window[1]:
        raise InvalidInput(f"empty sigma window {window}")
    A, B = spec.A_float, spec.B_float
    if pass_tol is None:
        pass_tol = 1e-4 * (1 + float(np.linalg.norm(B, 2)))
    if fail_tol is None:
        fail_tol = 1e-8 * (1 + max(float(np.linalg.norm(a, 2)) for a in A))
    obj, exps = _objective(spec, dec)
    res = torus_scan(obj, dec.q, window, n_sigma, n_torus, refine=refine, halve=halve,
                     workers=workers, keep_grid=keep_grid)
    polished = _polish(spec, exps, res.point)
    plus = sigma_min(np.eye(spec.d), B)
    minus = sigma_min(A[-1], B)
    # the renormalized sigma -> -inf limit is rank-tested exactly like condition (ii)
    endpoints_ok = plus > pass_tol and numerical_rank(np.hstack([A[-1], B])) == spec.d

    witness = None
    if polished.value < fail_tol:
        verdict = FAIL
        witness = _h_torus(spec, exps, polished.sigma, polished.angles)
    elif min(res.value, polished.value) > pass_tol and endpoints_ok:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    return CondIResult(verdict, res.value, res.point, polished.value, polished, plus, minus,
                       tuple(window), witness, pass_tol, fail_tol, res)


def hautus_decide(spec: SystemSpec, **scan_kwargs) -> HautusReport:
    ci = cond_i_scan(spec, **scan_kwargs)
    cii, rank = cond_ii_check(spec)
    if ci.verdict == FAIL or cii == FAIL:
        overall = FAIL
    elif ci.verdict == PASS and cii == PASS:
        overall = PASS
    else:
        overall = INCONCLUSIVE
    return HautusReport(ci, cii, rank, overall)
