"""Method-of-steps simulation of ``x(t) = sum_j A_j x(t - Lambda_j) + B u(t)`` on a mesh.

With delays ``Lambda_j = n_j rho`` and data constant on the cells
``[k rho, (k+1) rho)``, the solution is constant on the same cells and obeys the
recursion ``x_k = sum_j A_j x_{k - n_j} + B u_k``.  Within a cell every offset
``theta`` sees an identical copy of this recursion, so piecewise-constant data lose
no generality for exact controllability: the system is ``L^1`` exactly
controllable in time ``T`` iff the cell recursion maps the ``T / rho`` control
cells onto the last ``Lambda_N / rho`` state cells (for every initial window).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import exact_linalg as la
from .errors import InvalidInput, MeshMismatch, Unreachable, UnsupportedMesh
from .hautus_checker import SystemSpec, h_eval
from .measure_algebra import PiecewiseConstantFunction


def _frac_gcd(values: Sequence[Fraction]) -> Fraction:
    num, den = 0, 1
    for v in values:
        num = math.gcd(num, v.numerator)
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Fraction(num, den)


def delay_mesh(spec: SystemSpec) -> Fraction:
    """Coarsest mesh on which all delays are integer multiples."""
    if not spec.commensurable:
        raise UnsupportedMesh("simulation needs rational (commensurable) delays")
    return _frac_gcd(spec.delays)


def delay_steps(spec: SystemSpec, rho: Fraction) -> list[int]:
    if not spec.commensurable:
        raise UnsupportedMesh("simulation needs rational (commensurable) delays")
    steps = []
    for lam in spec.delays:
        n = Fraction(lam) / rho
        if n.denominator != 1:
            raise UnsupportedMesh(f"delay {lam} is not a multiple of mesh step {rho}")
        steps.append(int(n))
    return steps


def _mv(a, v):
    return tuple(sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a)


def _add(u, v):
    return tuple(x + y for x, y in zip(u, v))


@dataclass(frozen=True)
class Trajectory:
    mesh_step: Fraction
    x: PiecewiseConstantFunction  # on [-Lambda_N, t_end)
    u: PiecewiseConstantFunction  # on [0, t_end)

    def state(self, k: int) -> tuple[Fraction, ...]:
        """State on global cell ``k`` (negative ``k`` = initial window)."""
        return self.x.value_at_index(k)

    def window(self, end_cell: int, n_cells: int) -> list[tuple[Fraction, ...]]:
        return [self.state(k) for k in range(end_cell - n_cells, end_cell)]

    def rows(self) -> list[list]:
        """CSV rows ``(t_cell_start, x..., u...)`` for every cell of the state domain."""
        out = []
        u0 = self.u.first_index()
        for idx in range(self.x.first_index(), self.x.first_index() + self.x.n_cells):
            uval = self.u.value_at_index(idx) if idx >= u0 else (Fraction(0),) * self.u.dim
            out.append([idx * self.mesh_step, *self.x.value_at_index(idx), *uval])
        return out


def simulate(spec: SystemSpec, x0: PiecewiseConstantFunction, u: PiecewiseConstantFunction) -> Trajectory:
    rho = x0.mesh_step
    if u.mesh_step != rho:
        raise MeshMismatch("initial condition and control must share the mesh")
    steps = delay_steps(spec, rho)
    nN = steps[-1]
    if x0.start != -nN * rho or x0.n_cells != nN or x0.dim != spec.d:
        raise InvalidInput(f"x0 must cover [-{spec.delays[-1]}, 0) with {spec.d}-vectors")
    if u.start != 0 or (u.n_cells and u.dim != spec.m):
        raise InvalidInput(f"u must start at 0 with {spec.m}-vectors")
    cells = list(x0.values)  # cell k lives at index k + nN
    for k in range(u.n_cells):
        acc = _mv(spec.B, u.values[k])
        for a, n in zip(spec.A, steps):
            acc = _add(acc, _mv(a, cells[k - n + nN]))
        cells.append(acc)
    x = PiecewiseConstantFunction(rho, x0.start, tuple(cells))
    return Trajectory(rho, x, u)


@dataclass(frozen=True)
class ReachabilityOperator:
    """Linear maps from control cells / initial cells to the terminal state window.

    Row ``w * d + i`` is component ``i`` of window cell ``w`` (cell ``K - n_N + w``);
    column ``k * m + i`` of :attr:`matrix` is component ``i`` of control cell ``k``;
    column ``c * d + i`` of :attr:`free_response` is component ``i`` of initial cell ``c - n_N``.
    """

    matrix: list[list[Fraction]]
    free_response: list[list[Fraction]]
    mesh_step: Fraction
    horizon: Fraction
    n_window: int
    n_controls: int

    @property
    def rank(self) -> int:
        return la.rank(self.matrix)

    @property
    def full_row_rank(self) -> bool:
        return self.rank == len(self.matrix)


def build_reachability(spec: SystemSpec, horizon=None, mesh_step=None) -> ReachabilityOperator:
    """Assemble the reachability map by the impulse-response kernel ``K_n = sum_j A_j K_{n-n_j}``, ``K_0 = B``."""
    rho = Fraction(mesh_step) if mesh_step is not None else delay_mesh(spec)
    steps = delay_steps(spec, rho)
    nN = steps[-1]
    T = Fraction(horizon) if horizon is not None else spec.d * Fraction(spec.delays[-1])
    K = T / rho
    if K.denominator != 1 or K < 0:
        raise MeshMismatch(f"horizon {T} is not a nonnegative multiple of {rho}")
    K = int(K)
    d, m = spec.d, spec.m

    kernel = []  # kernel[n] is d x m
    for n in range(K):
        blk = [list(r) for r in spec.B] if n == 0 else la.zeros(d, m)
        for a, nj in zip(spec.A, steps):
            if n - nj >= 0:
                prod = la.matmul(a, kernel[n - nj])
                blk = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(blk, prod)]
        kernel.append(blk)

    rows = nN * d
    M = la.zeros(rows, K * m)
    for w in range(nN):
        t = K - nN + w
        for k in range(0, t + 1):
            blk = kernel[t - k]
            for i in range(d):
                for c in range(m):
                    M[w * d + i][k * m + c] = blk[i][c]

    F = la.zeros(rows, nN * d)
    zero_u = PiecewiseConstantFunction.zeros(rho, 0, K, m)
    for c in range(nN):
        for i in range(d):
            vals = [[Fraction(0)] * d for _ in range(nN)]
            vals[c][i] = Fraction(1)
            x0 = PiecewiseConstantFunction(rho, -nN * rho, tuple(map(tuple, vals)))
            traj = simulate(spec, x0, zero_u)
            for w, v in enumerate(traj.window(K, nN)):
                for r in range(d):
                    F[w * d + r][c * d + i] = v[r]
    return ReachabilityOperator(M, F, rho, T, nN, K)


@dataclass(frozen=True)
class UnreachableCertificate:
    """A left null vector ``w`` of the reachability matrix with ``w . (phi - free) != 0``."""

    w: list[Fraction]
    value: Fraction


def _stack(f: PiecewiseConstantFunction) -> list[Fraction]:
    return [x for v in f.values for x in v]


def steer(spec: SystemSpec, x0: PiecewiseConstantFunction, target: PiecewiseConstantFunction,
          horizon=None, operator: ReachabilityOperator | None = None) -> PiecewiseConstantFunction:
    """Minimum-norm control reaching ``x(T + theta) = target(theta)`` on ``[-Lambda_N, 0)``.

    Raises :class:`Unreachable` carrying an :class:`UnreachableCertificate` when no control exists.
    """
    rho = x0.mesh_step
    if target.mesh_step != rho:
        raise MeshMismatch("target and initial condition must share the mesh")
    op = operator or build_reachability(spec, horizon, rho)
    nN = op.n_window
    for name, f in (("x0", x0), ("target", target)):
        if f.start != -nN * rho or f.n_cells != nN or f.dim != spec.d:
            raise InvalidInput(f"{name} must cover [-{spec.delays[-1]}, 0) with {spec.d}-vectors")
    free = la.matvec(op.free_response, _stack(x0))
    rhs = [p - f for p, f in zip(_stack(target), free)]
    u = la.min_norm_solution(op.matrix, rhs)
    if u is None:
        for w in la.left_null_space(op.matrix):
            val = sum((a * b for a, b in zip(w, rhs)), Fraction(0))
            if val != 0:
                raise Unreachable("target is not reachable", UnreachableCertificate(w, val))
        raise AssertionError("inconsistent system without a separating left null vector")
    cells = tuple(tuple(u[k * spec.m:(k + 1) * spec.m]) for k in range(op.n_controls))
    return PiecewiseConstantFunction(rho, Fraction(0), cells)


def growth_bound(spec: SystemSpec) -> float:
    """Real ``alpha_0`` with ``sum_j ||A_j||_inf e^{-alpha_0 Lambda_j} = 1`` (``-inf`` if all ``A_j = 0``).

    The scalar majorant of every trajectory grows at most like ``e^{alpha_0 t}``.
    """
    norms = [float(np.abs(a).sum(axis=1).max()) for a in spec.A_float]
    lam = spec.delay_values
    if sum(norms) == 0:
        return -math.inf

    def f(w):
        return sum(n * math.exp(-w * l) for n, l in zip(norms, lam)) - 1

    lo, hi = -1.0, 1.0
    while f(lo) < 0:
        lo *= 2
    while f(hi) > 0:
        hi *= 2
    return brentq(f, lo, hi, xtol=1e-14)


def _cell_transform(n_cells: int, rho: float, s: complex) -> np.ndarray:
    """``int_{k rho}^{(k+1) rho} e^{-s t} dt`` for ``k = 0..n_cells-1``."""
    k = np.arange(n_cells)
    base = rho if s == 0 else (1 - cmath.exp(-s * rho)) / s
    return np.exp(-s * k * rho) * base


@dataclass
class FrequencyCheck:
    max_residual: float
    max_bound: float
    alpha0: float
    samples: list[tuple[complex, float, float]]  # (s, residual, bound)

    @property
    def ok(self) -> bool:
        return all(r <= b for _, r, b in self.samples)


def frequency_consistency_check(spec: SystemSpec, u: PiecewiseConstantFunction, horizon,
                                s_samples: Sequence[complex], x0: PiecewiseConstantFunction | None = None,
                                check_alpha: bool = True) -> FrequencyCheck:
    """Compare ``H(s) X_T(s)`` with ``B U_T(s)`` for truncated transforms over ``[0, horizon)``.

    From the dynamics, ``H X_T - B U_T = -sum_j A_j e^{-s Lambda_j} int_{T - Lambda_j}^T x e^{-st} dt``.
    The bound replaces ``x`` by the scalar majorant ``a_k = sum_j ||A_j|| a_{k-n_j} + ||B|| ||u_k||``
    (infinity norms), which never looks at the simulated trajectory.
    """
    rho = u.mesh_step
    steps = delay_steps(spec, rho)
    nN = steps[-1]
    if x0 is not None and any(x != 0 for v in x0.values for x in v):
        raise InvalidInput("the frequency identity is checked from a zero initial condition")
    K = Fraction(horizon) / rho
    if K.denominator != 1 or K < u.n_cells:
        raise InvalidInput("horizon must be a mesh multiple covering the control support")
    K = int(K)
    alpha0 = growth_bound(spec)
    zero0 = PiecewiseConstantFunction.zeros(rho, -nN * rho, nN, spec.d)
    upad = PiecewiseConstantFunction(rho, Fraction(0), u.values + ((Fraction(0),) * spec.m,) * (K - u.n_cells))
    traj = simulate(spec, zero0, upad)
    X = np.array([[float(c) for c in traj.state(k)] for k in range(K)]).reshape(K, spec.d)
    U = np.array([[float(c) for c in v] for v in upad.values]).reshape(K, spec.m)

    a_norms = [float(np.abs(a).sum(axis=1).max()) for a in spec.A_float]
    b_norm = float(np.abs(spec.B_float).sum(axis=1).max())
    maj = []
    for k in range(K):
        val = b_norm * float(np.abs(U[k]).max(initial=0.0))
        for an, n in zip(a_norms, steps):
            if k - n >= 0:
                val += an * maj[k - n]
        maj.append(val)
    maj = np.array(maj)

    rf = float(rho)
    B = spec.B_float
    out = []
    for s in s_samples:
        s = complex(s)
        if check_alpha and s.real < alpha0:
            raise InvalidInput(f"sample {s} lies left of the growth bound alpha0={alpha0:.6g}")
        w = _cell_transform(K, rf, s)
        XT = w @ X
        UT = w @ U
        resid = float(np.abs(h_eval(spec, s) @ XT - B @ UT).max())
        sig = s.real
        wabs = _cell_transform(K, rf, complex(sig, 0.0)).real
        bound = 0.0
        for an, lam, n in zip(a_norms, spec.delay_values, steps):
            lo = max(K - n, 0)
            bound += an * math.exp(-sig * lam) * float(np.dot(maj[lo:K], wabs[lo:K]))
        out.append((s, resid, bound))
    return FrequencyCheck(
        max(r for _, r, _ in out) if out else 0.0,
        max(b for _, _, b in out) if out else 0.0,
        alpha0,
        out,
    )
