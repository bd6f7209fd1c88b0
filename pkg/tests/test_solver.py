import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxreg import Besov, ConvolutionSymbol, Grid, GridFunction, Lp, OperatorPencil
from maxreg.banks import band_limited_noise, indicator, standard_bank
from maxreg.errors import NonInvertiblePencil, ZeroInput
from maxreg.frequency import constant_symbol, jump_symbol, operator_norm
from maxreg.grid import apply_multiplier, convolve_kernel, symbol_at_nodes
from maxreg.solver import (COMPONENTS, component_symbols, regularity_sweep, solve, solve_convolution,
                           strong_solution_check, weighted_consistency_check)
from maxreg.symbols import kernel_from_symbol, pencil_symbol, random_pencil

# T a multiple of pi so that tau = 1 is a grid node
G = Grid(16 * np.pi, 2048)
INNER = G.nyquist / 2


def scalar_demo():
    return OperatorPencil.scalar(A=1.0, B=1.0)


def mode(omega, v=None, grid=G):
    return GridFunction.from_callable(grid, lambda t: np.exp(1j * omega * t), vector=v)


def sup(x):
    return float(np.max(np.abs(x)))


# ---- solve --------------------------------------------------------------

def test_zero_forcing():
    res = solve(random_pencil(np.random.default_rng(0), 2), GridFunction.zeros(G, 2))
    assert np.all(res.u.samples == 0)
    assert all(np.all(c.samples == 0) for c in res.components.values())


def test_scalar_mode():
    res = solve(scalar_demo(), mode(1.0))
    assert np.allclose(res.u.samples[:, 0], np.exp(1j * G.t) / (1 + 1j), atol=1e-12)


@pytest.mark.parametrize("k", [0, 3, 40, 300])
def test_mode_matches_dense_solve(k):
    p = random_pencil(np.random.default_rng(k + 1), 3)
    omega = np.pi * k / G.T
    v = np.array([1.0, -1j, 0.5 + 2j])
    res = solve(p, mode(omega, v))
    x = np.linalg.solve(pencil_symbol(p)(np.array([omega]))[0], v)
    expected = np.exp(1j * omega * G.t)[:, None] * x
    assert sup(res.u.samples - expected) <= 1e-10 * max(1.0, sup(expected))
    assert strong_solution_check(res, p).residual <= 1e-10 * max(1.0, sup(res.u.samples))


def test_components_sum_to_forcing():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        p = random_pencil(rng, n)
        f = band_limited_noise(G, rng, n, INNER)
        res = solve(p, f)
        assert set(res.components) == set(COMPONENTS)
        assert res.residual_norm() <= 1e-9 * sup(f.samples)


def test_strong_solution_band_limited():
    rng = np.random.default_rng(4)
    p = random_pencil(rng, 2)
    for _ in range(5):
        f = band_limited_noise(G, rng, 2, INNER)
        rep = strong_solution_check(solve(p, f), p)
        assert rep.residual_relative <= 1e-8
        assert rep.first_order_mismatch <= 1e-8 and rep.second_order_mismatch <= 1e-8
    zero = strong_solution_check(solve(p, GridFunction.zeros(G, 2)), p)
    assert zero.residual == 0 and zero.first_order_mismatch == 0


def test_uniqueness_round_trip():
    rng = np.random.default_rng(5)
    p = random_pencil(rng, 2)
    v = band_limited_noise(G, rng, 2, INNER)
    f = apply_multiplier(pencil_symbol(p), v)
    u = solve(p, f).u
    assert sup(u.samples - v.samples) <= 1e-9 * sup(v.samples)


def test_punctured_pencil_rejected():
    p = OperatorPencil.scalar(A=1.0, B=1.0, chat=ConvolutionSymbol.decomposed(constant_symbol([[0.0]]),
                                                                             jump_symbol()))
    with pytest.raises(NonInvertiblePencil):
        solve(p, mode(1.0))


def test_singular_pencil_lists_nodes():
    with pytest.raises(NonInvertiblePencil) as err:
        solve(OperatorPencil.scalar(A=0.0, B=1.0), mode(1.0))
    assert err.value.tau == 0.0


# ---- regularity ---------------------------------------------------------

def test_l2_regularity_scalar():
    g = Grid(64.0, 4096)
    bank = standard_bank(g, 1, seed=6, size=100)
    rep, = regularity_sweep(scalar_demo(), [Lp(2.0)], bank)
    assert rep.empirical["first_order"] <= 1 + 1e-8
    assert rep.empirical["first_order"] >= 0.9
    for k in ("solution",) + COMPONENTS:
        assert rep.empirical[k] <= rep.analytic_bound[k] * (1 + 1e-8)


def test_regularity_zero_bank():
    rep, = regularity_sweep(scalar_demo(), [Lp(2.0)], [GridFunction.zeros(G)])
    assert all(v == 0 for v in rep.empirical.values())


def test_plancherel_bound_over_random_pencils():
    g = Grid(64.0, 4096)
    rng = np.random.default_rng(7)
    bank = standard_bank(g, 2, seed=8, size=40)
    for _ in range(3):
        p = random_pencil(rng, 2)
        rep, = regularity_sweep(p, [Lp(2.0)], bank)
        for k in ("solution",) + COMPONENTS:
            assert rep.empirical[k] <= rep.analytic_bound[k] * (1 + 1e-8)


def test_besov_regularity_refinement_stable():
    coarse = Grid(64.0, 4096)
    fine = coarse.refine(2)
    space = Besov(1.0, 1.0, Lp(2.0))
    p = random_pencil(np.random.default_rng(9), 2)
    consts = []
    for g in (coarse, fine):
        bank = [GridFunction.from_callable(g, lambda t, c=c, w=w: np.exp(-((t - c) / w) ** 2), vector=[1.0, 1j])
                for c, w in ((0.0, 1.0), (5.0, 2.0), (-10.0, 4.0))]
        rep, = regularity_sweep(p, [space], bank)
        consts.append(rep.empirical)
    for k in COMPONENTS:
        assert np.isfinite(consts[0][k])
        assert abs(consts[1][k] - consts[0][k]) <= 0.1 * consts[0][k] + 1e-12


# ---- convolution equation -----------------------------------------------

def test_convolution_scalar():
    one = constant_symbol([[1.0]])
    res = solve_convolution(one, one, mode(1.0))
    assert np.allclose(res.u.samples[:, 0], np.exp(1j * G.t) / (1 + 1j), atol=1e-12)
    zero = solve_convolution(one, one, GridFunction.zeros(G))
    assert np.all(zero.u.samples == 0)
    assert set(zero.estimates) == {"u_B_s", "u_B_s_plus_1", "f_B_s"}


def test_convolution_round_trip_through_kernel():
    rng = np.random.default_rng(10)
    c0 = constant_symbol(np.eye(2))
    c1 = constant_symbol(np.array([[2.0, 0.5], [0.0, 1.0]]))
    f = band_limited_noise(G, rng, 2, INNER)
    res = solve_convolution(c0, c1, f)
    chat = ConvolutionSymbol.decomposed(c0, c1).symbol
    k = kernel_from_symbol(chat, G)
    back = convolve_kernel(k, res.u)
    assert sup(back.samples - f.samples) <= 1e-6 * sup(f.samples)


# ---- weighted consistency -----------------------------------------------

def test_weighted_consistency_indicator():
    g = Grid(64.0, 4096)
    rep = weighted_consistency_check(scalar_demo(), indicator(g, 0.0, 1.0), Lp(3.0))
    assert rep.finite and rep.bit_identical


def test_weighted_consistency_heavy_tail():
    g = Grid(64.0, 4096)
    f = GridFunction.from_callable(g, lambda t: (1 + np.abs(t)) ** -0.4)
    rep = weighted_consistency_check(scalar_demo(), f, Lp(3.0))
    assert rep.finite and rep.bit_identical and rep.ratio > 0


def test_weighted_consistency_zero_input():
    with pytest.raises(ZeroInput):
        weighted_consistency_check(scalar_demo(), GridFunction.zeros(Grid(64.0, 4096)), Lp(3.0))


# ---- properties ---------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_linearity(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    p = random_pencil(rng, 2)
    f, g = band_limited_noise(G, rng, 2, INNER), band_limited_noise(G, rng, 2, INNER)
    lhs = solve(p, f * alpha + g * beta).u.samples
    rhs = alpha * solve(p, f).u.samples + beta * solve(p, g).u.samples
    scale = (abs(alpha) + abs(beta)) * max(sup(solve(p, f).u.samples), sup(solve(p, g).u.samples))
    assert sup(lhs - rhs) <= 1e-12 * max(scale, 1e-300) + 1e-300


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_plancherel_component_bound(seed):
    rng = np.random.default_rng(seed)
    p = random_pencil(rng, 2)
    f = band_limited_noise(G, rng, 2, INNER)
    res = solve(p, f)
    nf = np.sqrt(G.h * np.sum(np.abs(f.samples) ** 2))
    for k, sym in component_symbols(p).items():
        if k == "solution":
            continue
        bound = float(np.max(operator_norm(symbol_at_nodes(sym, G))))
        nc = np.sqrt(G.h * np.sum(np.abs(res.components[k].samples) ** 2))
        assert nc <= bound * nf * (1 + 1e-8)
