"""Shared generators and the curated system suite used across test modules."""

from __future__ import annotations

import random
from fractions import Fraction as F

from delaycorona.hautus_checker import SystemSpec
from delaycorona.measure_algebra import DiracSumMeasure, PiecewiseConstantFunction, normalize
from delaycorona.polynomial import RationalPolynomial


def rand_fraction(rng: random.Random, num: int = 9, den: int = 6) -> F:
    return F(rng.randint(-num, num), rng.randint(1, den))


def rand_measure(rng: random.Random, max_atoms: int = 12, lag_max: int = 10, den: int = 4) -> DiracSumMeasure:
    n = rng.randint(0, max_atoms)
    return normalize((F(rng.randint(0, lag_max * den), den), rand_fraction(rng)) for _ in range(n))


def rand_poly(rng: random.Random, degree: int) -> RationalPolynomial:
    coeffs = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(degree)]
    coeffs.append(F(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)))
    return RationalPolynomial(coeffs)


def poly_to_measure(p: RationalPolynomial, r=F(1)) -> DiracSumMeasure:
    return normalize((n * r, c) for n, c in enumerate(p.coefficients) if c)


def rand_function(rng: random.Random, rho, start, n_cells: int, dim: int) -> PiecewiseConstantFunction:
    return PiecewiseConstantFunction(
        F(rho), F(start), tuple(tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(dim)) for _ in range(n_cells))
    )


def _S(A, B, delays):
    return SystemSpec.build(A, B, delays)


def _rand_matrix(rng, rows, cols, num=3, den=2):
    return [[F(rng.randint(-num, num), rng.randint(1, den)) for _ in range(cols)] for _ in range(rows)]


def curated_suite() -> list[tuple[str, SystemSpec]]:
    """Commensurable systems with d <= 4, N <= 3 and delay ratios <= 3.

    Names ending in ``fail_i`` / ``fail_ii`` plant a failure of the corresponding condition.
    """
    h = F(1, 2)
    out = [
        ("scalar_half", _S([[[h]]], [[1]], ["1"])),
        ("scalar_B0_fail_i", _S([[[h]]], [[0]], ["1"])),
        ("scalar_two_delays", _S([[[1]], [[h]]], [[1]], ["1", "2"])),
        ("scalar_two_delays_B0_fail_i", _S([[[1]], [[-h]]], [[0]], ["1", "2"])),
        ("zero_A_B_e1_fail_ii", _S([[[0, 0], [0, 0]]], [[1], [0]], ["1"])),
        ("upper_triangular_fail_i", _S([[[1, 1], [0, -2]]], [[1], [0]], ["1"])),
        ("nilpotent_shift", _S([[[0, 1], [0, 0]]], [[0], [1]], ["1"])),
        ("distinct_diag", _S([[[h, 0], [0, F(1, 3)]]], [[1], [1]], ["1"])),
        ("repeated_diag_fail_i", _S([[[h, 0], [0, h]]], [[1], [1]], ["1"])),
        ("chain_1_3", _S([[[0, 0], [1, 0]], [[0, 0], [0, 1]]], [[1], [0]], ["1", "3"])),
        ("identity_AN_fail_i", _S([[[1, 0], [0, 1]]], [[1], [1]], ["1"])),
        ("chain_half_delays", _S([[[0, 0], [1, 0]], [[h, 0], [0, 0]], [[0, 0], [0, 1]]],
                                 [[1], [0]], ["1/2", "1", "3/2"])),
        ("A_N_singular_fail_ii", _S([[[1, 0], [0, 1]], [[1, 0], [0, 0]]], [[1], [0]], ["1", "2"])),
        ("block_uncontrollable_fail_i",
         _S([[[1, 1, 0], [0, 1, 0], [0, 0, h]]], [[1], [1], [0]], ["1"])),
        ("d3_companion", _S([[[0, 1, 0], [0, 0, 1], [h, -1, F(1, 3)]]], [[0], [0], [1]], ["1"])),
        ("d4_two_inputs", _S([[[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]],
                              [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]],
                             [[0, 0], [1, 0], [0, 0], [0, 1]], ["1", "2"])),
        ("d4_single_input_fail_i", _S([[[h, 0, 0, 0], [0, h, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]]],
                                      [[1], [1], [1], [1]], ["1"])),
        ("delays_1_2_3", _S([[[0, 0], [1, 0]], [[h, 0], [0, h]], [[0, 1], [1, 0]]],
                            [[1], [0]], ["1", "2", "3"])),
    ]
    rng = random.Random(20240607)
    shapes = [(2, 1, ["1"]), (2, 1, ["1", "2"]), (3, 2, ["1", "3"]), (2, 1, ["1/2", "1", "3/2"]),
              (3, 1, ["1", "2"]), (4, 2, ["1"])]
    for n, (d, m, delays) in enumerate(shapes):
        A = [_rand_matrix(rng, d, d) for _ in delays]
        B = _rand_matrix(rng, d, m)
        out.append((f"random_{n}_d{d}_m{m}_N{len(delays)}", _S(A, B, delays)))
    return out
