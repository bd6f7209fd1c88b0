"""Periodic grid, discrete Fourier transform and spectral multipliers.

Run: python3 gallery/01_grid_and_spectral.py
"""
import numpy as np

from maxreg import Grid, GridFunction, apply_multiplier, derivative, fft

# a window [-T, T) with T a multiple of pi keeps tau = 1 on the frequency grid
grid = Grid(16 * np.pi, 2048)
print(f"grid: T={grid.T:.4f} N={grid.N} h={grid.h:.5f} nyquist={grid.nyquist:.2f}")

# the transform of a pure mode concentrates 2T at its own node
f = GridFunction.from_callable(grid, lambda t: np.exp(1j * t))
F = fft(f).coefficients[:, 0]
k = int(np.argmax(np.abs(F)))
print(f"peak at tau={grid.frequencies[k]:.3f}, value {F[k].real:.4f} (2T = {2 * grid.T:.4f})")

# the resolvent-like multiplier 1/(1+i tau) acts on e^{it} as division by 1+i
u = apply_multiplier(lambda tau: 1 / (1 + 1j * tau), f)
err = np.max(np.abs(u.samples[:, 0] - np.exp(1j * grid.t) / (1 + 1j)))
print(f"1/(1+iD) e^(it) vs e^(it)/(1+i): max error {err:.2e}")

# spectral derivative of a smooth bump
g = GridFunction.from_callable(grid, lambda t: np.exp(-t**2))
dg = derivative(g).samples[:, 0].real
exact = -2 * grid.t * np.exp(-grid.t**2)
print(f"derivative of exp(-t^2): max error {np.max(np.abs(dg - exact)):.2e}")

# Plancherel on the grid: h sum |f|^2 = (1/2pi) sum |F|^2 dtau
g_hat = fft(g).coefficients
lhs = grid.h * np.sum(np.abs(g.samples) ** 2)
rhs = np.sum(np.abs(g_hat) ** 2) * (np.pi / grid.T) / (2 * np.pi)
print(f"Plancherel: {lhs:.12f} vs {rhs:.12f}")
