"""Deterministic minimization over ``[sigma_lo, sigma_hi] x T^q``.

Points are addressed by integer numerators over a denominator: ``sigma = lo +
(hi - lo) * (i / n_sigma)`` and torus angles ``2 pi k / n_torus`` with ``k`` in the
centered range.  Objectives receive numerators and compute their phases with
:func:`angles`, so the same geometric point always yields bit-identical values
whatever grid it is reached from.  Two consequences the callers rely on:

* refining either axis by 2x never increases the reported minimum, because the
  local refinement is seeded from the argmin of every dyadic sub-grid;
* a conjugate-halved torus scan reproduces the full minimum exactly, because
  objectives are always evaluated at the canonical member of each ``{k, -k}`` pair
  (valid for real data, where ``G(sigma, z) = G(sigma, conj z)``).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInput

TWO_PI = 2.0 * math.pi

# objective(sigma_values, torus_numerators, torus_denominator) -> values
Objective = Callable[[np.ndarray, np.ndarray, int], np.ndarray]


def angles(num: np.ndarray, exponents: np.ndarray, den: int) -> np.ndarray:
    """Phases ``2 pi (m . k) / den`` for every point (rows of ``num``) and monomial (rows of ``exponents``)."""
    dot = num @ exponents.T
    return (TWO_PI * dot.astype(float)) / den


def sigma_values(num: np.ndarray, den: int, window: tuple[float, float]) -> np.ndarray:
    lo, hi = window
    return lo + (hi - lo) * (num / den)


@dataclass(frozen=True)
class ScanPoint:
    sigma: float
    angles: tuple[float, ...]
    value: float


@dataclass
class ScanResult:
    value: float
    point: ScanPoint
    grid_value: float
    grid_point: ScanPoint
    n_evaluations: int
    grid: dict | None = field(default=None, repr=False)


def _centered(n: int) -> np.ndarray:
    return np.arange(-(n // 2), n - n // 2, dtype=np.int64)


def _mirror_mod(k: np.ndarray, n: int) -> np.ndarray:
    h = n // 2
    return np.mod(-k + h, n) - h


def _lex_ge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise ``tuple(a) >= tuple(b)``."""
    out = np.ones(len(a), dtype=bool)
    decided = np.zeros(len(a), dtype=bool)
    for j in range(a.shape[1]):
        gt = (a[:, j] > b[:, j]) & ~decided
        lt = (a[:, j] < b[:, j]) & ~decided
        out[lt] = False
        decided |= gt | lt
    return out


def _canonical(k: np.ndarray, mirror: np.ndarray) -> np.ndarray:
    keep = _lex_ge(k, mirror)
    return np.where(keep[:, None], k, mirror)


def _pick(values: np.ndarray, i: np.ndarray, k: np.ndarray, canon: np.ndarray) -> int:
    """Index of the minimum; ties broken by ``(i, canon(k), k)`` lexicographically."""
    v = np.where(np.isnan(values), np.inf, values)
    m = v.min()
    cand = np.nonzero(v == m)[0]
    if len(cand) == 1:
        return int(cand[0])
    keys = [k[cand, j] for j in reversed(range(k.shape[1]))]
    keys += [canon[cand, j] for j in reversed(range(k.shape[1]))]
    keys.append(i[cand])
    return int(cand[np.lexsort(keys)[0]])


class _Evaluator:
    def __init__(self, objective: Objective, window, workers: int, chunk: int = 20000):
        self.objective = objective
        self.window = window
        self.workers = max(1, int(workers))
        self.chunk = chunk
        self.count = 0

    def __call__(self, i: np.ndarray, den_s: int, k: np.ndarray, den_t: int, canon: np.ndarray) -> np.ndarray:
        self.count += len(i)
        sig = sigma_values(i, den_s, self.window)
        pieces = [(sig[a:a + self.chunk], canon[a:a + self.chunk]) for a in range(0, len(i), self.chunk)]
        if self.workers > 1 and len(pieces) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                out = list(pool.map(lambda p: self.objective(p[0], p[1], den_t), pieces))
        else:
            out = [self.objective(s, c, den_t) for s, c in pieces]
        return np.concatenate(out) if out else np.zeros(0)


def _zoom(ev: _Evaluator, q: int, start_i: int, start_k, den_s: int, den_t: int, passes: int, factor: int):
    """Nested local grids around a start point; returns (value, i, k, den_s, den_t)."""
    best = None
    ci, ck = start_i, np.asarray(start_k, dtype=np.int64)
    offsets = np.array(list(itertools.product(range(-factor, factor + 1), repeat=q + 1)), dtype=np.int64)
    for _ in range(passes):
        den_s, den_t = den_s * factor, den_t * factor
        ci, ck = ci * factor, ck * factor
        pi = ci + offsets[:, 0]
        pk = ck[None, :] + offsets[:, 1:]
        inside = (pi >= 0) & (pi <= den_s)
        pi, pk = pi[inside], pk[inside]
        # reduce onto the centred range so conjugate seeds see identical canonical points
        pk = _mirror_mod(-pk, den_t)
        canon = _canonical(pk, _mirror_mod(pk, den_t))
        vals = ev(pi, den_s, pk, den_t, canon)
        j = _pick(vals, pi, pk, canon)
        ci, ck = int(pi[j]), pk[j]
        best = (float(vals[j]), ci, ck.copy(), den_s, den_t)
    return best


def torus_scan(
    objective: Objective,
    q: int,
    window: tuple[float, float],
    n_sigma: int,
    n_torus: int,
    refine: int = 1,
    zoom: int = 4,
    halve: bool = False,
    workers: int = 1,
    keep_grid: bool = False,
) -> ScanResult:
    """Grid search plus local refinement of ``objective`` over the window times the q-torus.

    ``n_sigma`` counts sigma intervals (``n_sigma + 1`` points, endpoints included);
    ``n_torus`` counts points per torus axis.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise InvalidInput(f"empty sigma window [{lo}, {hi}]")
    if n_sigma < 2 or n_torus < 2:
        raise InvalidInput("grid resolutions must be at least 2 per axis")
    if q < 1:
        raise InvalidInput("torus dimension must be positive")
    ev = _Evaluator(objective, (lo, hi), workers)

    ks = np.array(list(itertools.product(_centered(n_torus), repeat=q)), dtype=np.int64)
    canon_t = _canonical(ks, _mirror_mod(ks, n_torus))
    rep = _lex_ge(ks, _mirror_mod(ks, n_torus))
    n_pts = len(ks)
    i_all = np.repeat(np.arange(n_sigma + 1, dtype=np.int64), n_pts)
    k_all = np.tile(ks, (n_sigma + 1, 1))
    c_all = np.tile(canon_t, (n_sigma + 1, 1))
    values = np.full(len(i_all), np.inf)
    mask = np.tile(rep, n_sigma + 1) if halve else np.ones(len(i_all), dtype=bool)
    values[mask] = ev(i_all[mask], n_sigma, k_all[mask], n_torus, c_all[mask])

    g = _pick(values, i_all, k_all, c_all)
    grid_point = _point(i_all[g], n_sigma, k_all[g], n_torus, (lo, hi), values[g])

    # argmin of every dyadic sub-grid seeds one local refinement
    starts = []
    a = 0
    while n_sigma % (1 << a) == 0 and n_sigma >> a >= 1:
        b = 0
        while n_torus % (1 << b) == 0 and n_torus >> b >= 1:
            sel = (i_all % (1 << a) == 0) & np.all(k_all % (1 << b) == 0, axis=1)
            idx = np.nonzero(sel)[0]
            j = idx[_pick(values[idx], i_all[idx] >> a, k_all[idx] >> b, c_all[idx] >> b)]
            starts.append((int(i_all[j]) >> a, tuple(int(x) >> b for x in k_all[j]), n_sigma >> a, n_torus >> b))
            b += 1
        a += 1

    best_val, best_point = float(values[g]), grid_point
    if refine > 0:
        for si, sk, ds, dt in dict.fromkeys(starts):
            val, ri, rk, rds, rdt = _zoom(ev, q, si, sk, ds, dt, refine, zoom)
            if val < best_val:
                best_val = val
                best_point = _point(ri, rds, rk, rdt, (lo, hi), val)

    grid = None
    if keep_grid:
        order = np.nonzero(mask)[0]
        grid = {
            "sigma": sigma_values(i_all[order], n_sigma, (lo, hi)),
            "angles": (TWO_PI * k_all[order].astype(float)) / n_torus,
            "values": values[order],
        }
    return ScanResult(best_val, best_point, float(values[g]), grid_point, ev.count, grid)


def _point(i, den_s, k, den_t, window, value) -> ScanPoint:
    sig = float(sigma_values(np.array([i]), den_s, window)[0])
    ang = tuple(float(TWO_PI * float(x) / den_t) for x in k)
    return ScanPoint(sig, ang, float(value))
