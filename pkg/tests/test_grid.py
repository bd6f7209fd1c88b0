import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxreg import Grid, GridFunction, SymbolSingular, antiderivative, apply_multiplier, convolve_kernel, derivative, fft, ifft
from maxreg.errors import DimensionMismatch, GridMismatch
from maxreg.grid import symbol_at_nodes
from maxreg.banks import band_limited_noise
from maxreg.symbols import kernel_from_symbol


def test_grid_invariants():
    g = Grid(64.0, 4096)
    assert g.h * g.N == pytest.approx(2 * g.T)
    tau = np.sort(g.frequencies)
    assert tau[0] == pytest.approx(-np.pi * g.N / (2 * g.T))
    # symmetric except the lone most-negative node
    assert np.allclose(tau[1:], -tau[1:][::-1])
    assert g.t[0] == -g.T and g.t[-1] == pytest.approx(g.T - g.h)


@pytest.mark.parametrize("N", [15, 8, 0, -4])
def test_grid_rejects_bad_sizes(N):
    with pytest.raises(ValueError):
        Grid(1.0, N)


def test_gridfunction_rejects_nonfinite():
    g = Grid(4.0, 16)
    x = np.zeros(16)
    x[3] = np.nan
    with pytest.raises(ValueError):
        GridFunction(g, x)


def test_grid_mismatch():
    with pytest.raises(GridMismatch):
        GridFunction.zeros(Grid(4.0, 16)) + GridFunction.zeros(Grid(8.0, 16))


def test_fft_zero_and_pure_mode():
    g = Grid(8.0, 64)
    assert np.all(fft(GridFunction.zeros(g, 2)).coefficients == 0)
    k0 = 5
    omega = np.pi * k0 / g.T
    F = fft(GridFunction.from_callable(g, lambda t: np.exp(1j * omega * t))).coefficients[:, 0]
    idx = int(np.argmin(np.abs(g.frequencies - omega)))
    assert F[idx] == pytest.approx(2 * g.T, abs=1e-12)
    others = np.delete(F, idx)
    assert np.max(np.abs(others)) < 1e-12


def test_fft_of_indicator():
    # the closed indicator puts an extra h of mass on the endpoints, so h < 1e-2
    g = Grid(8.0, 2048)
    f = GridFunction.from_callable(g, lambda t: (np.abs(t) <= 1).astype(float))
    F = fft(f).coefficients[:, 0]
    tau = g.frequencies
    sel = np.abs(tau) <= np.pi / (2 * g.h)
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = np.where(tau == 0, 2.0, 2 * np.sin(tau) / tau)
    assert np.max(np.abs(F[sel] - exact[sel])) <= 1e-2


def test_apply_multiplier_examples():
    g = Grid(4 * np.pi, 256)
    f = GridFunction.from_callable(g, lambda t: np.exp(1j * t))
    out = apply_multiplier(lambda tau: 1 / (1 + 1j * tau), f)
    assert np.allclose(out.samples[:, 0], np.exp(1j * g.t) / (1 + 1j), atol=1e-12)
    v = np.array([1.0, 2.0 - 1j])
    fv = GridFunction.from_callable(g, lambda t: np.exp(3j * t), vector=v)
    d = apply_multiplier(lambda tau: 1j * tau[:, None, None] * np.eye(2), fv)
    assert np.allclose(d.samples, 3j * fv.samples, atol=1e-10)
    same = apply_multiplier(np.ones(g.N), fv)
    assert np.allclose(same.samples, fv.samples, atol=1e-14)


def test_apply_multiplier_singular():
    g = Grid(4.0, 16)
    with pytest.raises(SymbolSingular), np.errstate(divide="ignore"):
        apply_multiplier(lambda tau: 1 / tau, GridFunction.zeros(g))


def test_derivative_examples():
    g = Grid(4 * np.pi, 512)
    assert np.max(np.abs(derivative(GridFunction(g, np.full(g.N, 3.0))).samples)) < 1e-12
    e2 = GridFunction.from_callable(g, lambda t: np.exp(2j * t))
    assert np.allclose(derivative(e2).samples, 2j * e2.samples, atol=1e-11)
    s = derivative(GridFunction.from_callable(g, np.sin))
    assert np.max(np.abs(s.samples[:, 0] - np.cos(g.t))) <= 1e-10


def test_convolve_kernel_examples():
    g = Grid(8.0, 128)
    rng = np.random.default_rng(0)
    f = GridFunction(g, rng.standard_normal((g.N, 2)))
    delta = np.zeros(g.N)
    delta[g.N // 2] = 1 / g.h  # t = 0 sits at index N/2
    out = convolve_kernel(GridFunction(g, delta), f)
    assert np.allclose(out.samples, f.samples, atol=1e-13)
    assert np.all(convolve_kernel(GridFunction.zeros(g), f).samples == 0)


def test_convolve_kernel_dimension_mismatch():
    g = Grid(8.0, 64)
    k = kernel_from_symbol(lambda tau: np.ones((tau.size, 2, 2)), g)
    with pytest.raises(DimensionMismatch):
        convolve_kernel(k, GridFunction.zeros(g, 3))


def test_kernel_convolution_matches_multiplier():
    g = Grid(64.0, 4096)
    f = band_limited_noise(g, np.random.default_rng(1), 1, band=0.75 * g.nyquist)
    a = lambda tau: 1 / (1 + 1j * tau)
    k = kernel_from_symbol(a, g)
    x, y = convolve_kernel(k, f).samples, apply_multiplier(a, f).samples
    assert np.max(np.abs(x - y)) / np.max(np.abs(y)) <= 1e-6


def test_symbol_at_nodes_shapes():
    g = Grid(4.0, 16)
    assert symbol_at_nodes(np.ones(16), g).shape == (16, 1, 1)
    assert symbol_at_nodes(lambda t: np.ones((t.size, 2, 3)), g).shape == (16, 2, 3)


# ---- properties ---------------------------------------------------------

grids = st.builds(Grid, st.sampled_from([2.0, 5.0, 8.0, 4 * np.pi]), st.sampled_from([16, 32, 64, 128]))


@st.composite
def grid_functions(draw, n=None):
    g = draw(grids)
    n = n or draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    scale = draw(st.floats(1e-3, 1e3))
    return GridFunction(g, scale * (rng.standard_normal((g.N, n)) + 1j * rng.standard_normal((g.N, n))))


@settings(max_examples=60, deadline=None)
@given(grid_functions())
def test_plancherel(f):
    g = f.grid
    lhs = g.h * np.sum(np.abs(f.samples) ** 2)
    rhs = np.sum(np.abs(fft(f).coefficients) ** 2) * (np.pi / g.T) / (2 * np.pi)
    assert rhs == pytest.approx(lhs, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(grid_functions())
def test_round_trips(f):
    back = ifft(fft(f)).samples
    assert np.max(np.abs(back - f.samples)) <= 1e-12 * np.max(np.abs(f.samples))
    F = fft(f)
    again = fft(ifft(F)).coefficients
    assert np.max(np.abs(again - F.coefficients)) <= 1e-12 * np.max(np.abs(F.coefficients))


@settings(max_examples=40, deadline=None)
@given(grid_functions())
def test_derivative_inverts_antiderivative_on_mean_zero(f):
    mean = f.samples.mean(axis=0)
    f0 = GridFunction(f.grid, f.samples - mean)
    back = derivative(antiderivative(f0)).samples
    assert np.max(np.abs(back - f0.samples)) <= 1e-8 * max(1.0, np.max(np.abs(f0.samples)))


@settings(max_examples=30, deadline=None)
@given(grid_functions(n=1), st.integers(-20, 20))
def test_shift_commutes_with_multiplier(f, s):
    a = lambda tau: 1 / (2 + 1j * tau)
    lhs = apply_multiplier(a, f.shift(s)).samples
    rhs = apply_multiplier(a, f).shift(s).samples
    assert np.allclose(lhs, rhs, atol=1e-10 * np.max(np.abs(f.samples)))
