"""Seeded test banks of grid functions.

Every member is defined analytically in ``t`` (frequencies are multiples of
``pi / T``), so the same bank can be re-sampled on a refined grid with the
same ``T`` and compared.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, _inverse

GAUSSIAN_WIDTHS = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class BankMember:
    label: str
    kind: str
    f: GridFunction


def _unit_vector(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def pure_mode(grid: Grid, k: int, v) -> GridFunction:
    """``exp(i pi k t / T) v``."""
    omega = np.pi * k / grid.T
    return GridFunction.from_callable(grid, lambda t: np.exp(1j * omega * t), vector=v)


def band_limited_noise(grid: Grid, rng: np.random.Generator, n: int, band: float,
                       kmax: int | None = None) -> GridFunction:
    """Random trigonometric polynomial with frequencies ``|tau| <= band``.

    Coefficients are drawn for ``k = -kmax..kmax`` so the function is the same
    on any grid sharing ``T``.
    """
    if kmax is None:
        kmax = int(np.floor(band * grid.T / np.pi))
    ks = np.arange(-kmax, kmax + 1)
    if 2 * kmax >= grid.N:
        raise ValueError("band exceeds the grid's Nyquist frequency")
    coef = (rng.standard_normal((ks.size, n)) + 1j * rng.standard_normal((ks.size, n))) / np.sqrt(2 * ks.size)
    # sum_k coef_k exp(i pi k t / T) is the inverse transform of 2T coef_k at node k
    spectrum = np.zeros((grid.N, n), dtype=complex)
    spectrum[ks % grid.N] = 2 * grid.T * coef
    return GridFunction(grid, _inverse(grid, spectrum))


def mode_bank(grid: Grid, n: int, rng: np.random.Generator, size: int, kmax: int) -> list:
    """Pure modes with ``|k|`` geometrically spread over ``1..kmax`` and alternating signs."""
    if size <= 0:
        return []
    ks = np.unique(np.round(np.geomspace(1, max(kmax, 1), size)).astype(int))
    ks = np.resize(ks, size)
    out = []
    for i, k in enumerate(ks):
        k = int(k) if i % 2 == 0 else -int(k)
        out.append(BankMember(f"mode[k={k}]", "mode", pure_mode(grid, k, _unit_vector(rng, n))))
    return out


def standard_bank(grid: Grid, n: int = 1, seed: int = 0, size: int = 100,
                  band: float | None = None) -> list:
    """Modes across every dyadic band, Gaussian bumps at five widths and
    random band-limited noise (spectrum in the inner half), in proportion
    30 : 20 : 50 for ``size = 100``.
    """
    rng = np.random.default_rng(seed)
    if band is None:
        band = grid.nyquist / 2
    n_modes = int(round(0.3 * size))
    n_gauss = int(round(0.2 * size))
    n_noise = size - n_modes - n_gauss
    kmax = int(np.floor(band * grid.T / np.pi))
    out = mode_bank(grid, n, rng, n_modes, kmax)
    for i in range(n_gauss):
        w = GAUSSIAN_WIDTHS[i % len(GAUSSIAN_WIDTHS)]
        c = float(rng.uniform(-grid.T / 4, grid.T / 4))
        v = _unit_vector(rng, n)
        f = GridFunction.from_callable(grid, lambda t, c=c, w=w: np.exp(-((t - c) ** 2) / (2 * w * w)), vector=v)
        out.append(BankMember(f"gauss[w={w:g},c={c:.3f}]", "gaussian", f))
    for i in range(n_noise):
        out.append(BankMember(f"noise[{i}]", "noise", band_limited_noise(grid, rng, n, band, kmax)))
    return out


def indicator(grid: Grid, a: float, b: float, n: int = 1) -> GridFunction:
    """``1_{[a, b]}`` sampled on the grid (closed interval)."""
    tol = 1e-9 * grid.h
    vals = ((grid.t >= a - tol) & (grid.t <= b + tol)).astype(float)
    return GridFunction(grid, np.repeat(vals[:, None], n, axis=1))


def positive_bank(grid: Grid, size: int, seed: int = 0) -> list:
    """Nonnegative functions supported in ``[-T/2, T/2]``: random mixtures of
    Gaussian bumps and indicator segments."""
    rng = np.random.default_rng(seed)
    t = grid.t
    out = []
    for _ in range(size):
        x = np.zeros(grid.N)
        for _ in range(int(rng.integers(1, 5))):
            c = rng.uniform(-grid.T / 3, grid.T / 3)
            w = rng.uniform(0.1, 3.0)
            amp = rng.uniform(0.1, 2.0)
            if rng.random() < 0.5:
                x += amp * np.exp(-((t - c) ** 2) / (2 * w * w))
            else:
                x += amp * ((t >= c - w) & (t <= c + w))
        x[np.abs(t) > grid.T / 2] = 0.0
        out.append(GridFunction(grid, x))
    return out
