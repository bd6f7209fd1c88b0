"""Uniform periodic grid on [-T, T), discrete Fourier transform and multipliers.

Conventions: ``F f(tau) = int f(t) exp(-i tau t) dt`` and
``F^{-1} g(t) = (1/2pi) int g(tau) exp(i tau t) dtau``.  On the grid the
forward transform is the DFT scaled by the spacing ``h``; frequency nodes are
``tau_k = pi k / T`` stored in numpy FFT order (``k = 0, 1, ..., N/2-1, -N/2, ..., -1``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import DimensionMismatch, GridMismatch, InvalidArgument, SymbolSingular
from .frequency import FrequencySymbol

DEFAULT_N = 4096
DEFAULT_T = 64.0


@dataclass(frozen=True)
class Grid:
    T: float = DEFAULT_T
    N: int = DEFAULT_N

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0):
            raise InvalidArgument(f"half length T must be positive, got {self.T}")
        if int(self.N) != self.N or self.N < 16 or self.N % 2:
            raise InvalidArgument(f"N must be an even integer >= 16, got {self.N}")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return 2.0 * self.T / self.N

    @property
    def nyquist(self) -> float:
        """Largest resolved frequency ``pi / h``."""
        return np.pi / self.h

    @cached_property
    def t(self) -> np.ndarray:
        t = -self.T + self.h * np.arange(self.N)
        t.flags.writeable = False
        return t

    @cached_property
    def frequencies(self) -> np.ndarray:
        k = np.fft.fftfreq(self.N, d=1.0 / self.N)
        tau = np.pi * k / self.T
        tau.flags.writeable = False
        return tau

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(i tau_k T) = (-1)^k, identical for k and k - N since N is even
        ph = np.where(np.arange(self.N) % 2 == 0, 1.0, -1.0)
        ph.flags.writeable = False
        return ph

    def refine(self, factor: int = 2, stretch: int = 1) -> "Grid":
        """Grid with ``N * factor * stretch`` points on ``[-T*stretch, T*stretch)``."""
        return Grid(self.T * stretch, self.N * factor * stretch)

    def index_of(self, t: float) -> int:
        return int(round((t + self.T) / self.h)) % self.N


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class GridFunction:
    """Samples ``f(t_j)`` in ``C^n`` on a :class:`Grid`, stored as an ``N x n`` array."""

    __slots__ = ("grid", "samples")

    def __init__(self, grid: Grid, samples):
        samples = np.array(samples, dtype=complex)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[0] != grid.N:
            raise DimensionMismatch(f"expected {grid.N} x n samples, got shape {samples.shape}")
        if samples.shape[1] < 1:
            raise DimensionMismatch("dimension n must be positive")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgument("grid function samples must be finite")
        self.grid = grid
        self.samples = _freeze(samples)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray], vector=None):
        vals = np.asarray(fn(grid.t), dtype=complex)
        if vector is not None:
            vals = vals.reshape(-1, 1) * np.asarray(vector, dtype=complex).reshape(1, -1)
        return cls(grid, vals)

    @classmethod
    def zeros(cls, grid: Grid, n: int = 1):
        return cls(grid, np.zeros((grid.N, n), dtype=complex))

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    def pointwise_norm(self) -> np.ndarray:
        """``|f(t_j)|_X`` with the Euclidean norm on ``C^n``."""
        return np.sqrt(np.sum(np.abs(self.samples) ** 2, axis=1))

    def _check(self, other: "GridFunction"):
        if other.grid != self.grid:
            raise GridMismatch("grid functions live on different grids")
        if other.n != self.n:
            raise DimensionMismatch(f"dimension mismatch {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        self._check(other)
        return GridFunction(self.grid, self.samples - other.samples)

    def __mul__(self, c):
        return GridFunction(self.grid, self.samples * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.samples)

    def shift(self, steps: int) -> "GridFunction":
        """Circular translation by ``steps`` grid points."""
        return GridFunction(self.grid, np.roll(self.samples, steps, axis=0))

    def matvec(self, M) -> "GridFunction":
        """Apply a constant matrix pointwise: ``t -> M f(t)``."""
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        if M.shape[1] != self.n:
            raise DimensionMismatch(f"matrix {M.shape} cannot act on C^{self.n}")
        return GridFunction(self.grid, self.samples @ M.T)

    def __repr__(self):
        return f"GridFunction(N={self.grid.N}, T={self.grid.T}, n={self.n})"


class SpectralFunction:
    """Values ``F f(tau_k)``, an ``N x n`` array in FFT node order."""

    __slots__ = ("grid", "coefficients")

    def __init__(self, grid: Grid, coefficients):
        coefficients = np.array(coefficients, dtype=complex)
        if coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        if coefficients.shape[0] != grid.N:
            raise DimensionMismatch(f"expected {grid.N} coefficients, got {coefficients.shape[0]}")
        self.grid = grid
        self.coefficients = _freeze(coefficients)

    @property
    def n(self) -> int:
        return self.coefficients.shape[1]


def _forward(grid: Grid, samples: np.ndarray) -> np.ndarray:
    ph = grid._phase.reshape((-1,) + (1,) * (samples.ndim - 1))
    return grid.h * ph * np.fft.fft(samples, axis=0)


def _inverse(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    ph = grid._phase.reshape((-1,) + (1,) * (coeffs.ndim - 1))
    return np.fft.ifft(ph * coeffs, axis=0) / grid.h


def fft(f: GridFunction) -> SpectralFunction:
    return SpectralFunction(f.grid, _forward(f.grid, f.samples))


def ifft(F: SpectralFunction) -> GridFunction:
    return GridFunction(F.grid, _inverse(F.grid, F.coefficients))


SymbolLike = Union[FrequencySymbol, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def symbol_at_nodes(a: SymbolLike, grid: Grid) -> np.ndarray:
    """Node values of ``a`` as an ``(N, n, m)`` array (scalars become ``1 x 1``)."""
    tau = grid.frequencies
    if isinstance(a, FrequencySymbol):
        vals = a.at_nodes(tau, zero_offset=0.5 * np.pi / grid.T)
    elif callable(a):
        vals = np.asarray(a(tau), dtype=complex)
    else:
        vals = np.asarray(a, dtype=complex)
    if vals.ndim == 1:
        vals = vals[:, None, None]
    if vals.shape[0] != grid.N or vals.ndim != 3:
        raise DimensionMismatch(f"symbol node values have shape {vals.shape}, expected (N, n, m)")
    return vals


def multiply_nodes(vals: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Node-wise ``vals[k] @ coeffs[k]``; scalar ``1 x 1`` symbols act diagonally."""
    if vals.shape[1:] == (1, 1):
        return vals[:, 0, :] * coeffs
    if vals.shape[2] != coeffs.shape[1]:
        raise DimensionMismatch(f"symbol of shape {vals.shape[1:]} cannot act on C^{coeffs.shape[1]}")
    return np.einsum("kij,kj->ki", vals, coeffs)


def apply_multiplier(a: SymbolLike, f: GridFunction) -> GridFunction:
    """``a(D) f = F^{-1}(a F f)`` on the grid."""
    try:
        vals = symbol_at_nodes(a, f.grid)
    except FloatingPointError as exc:  # pragma: no cover - numpy configured to raise
        raise SymbolSingular(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        k = int(np.argmax(~np.all(np.isfinite(vals), axis=(1, 2))))
        raise SymbolSingular(f"symbol not finite at tau={f.grid.frequencies[k]:.6g}")
    coeffs = multiply_nodes(vals, _forward(f.grid, f.samples))
    return GridFunction(f.grid, _inverse(f.grid, coeffs))


def derivative(f: GridFunction) -> GridFunction:
    """Spectral derivative, the multiplier ``i tau``."""
    return apply_multiplier(1j * f.grid.frequencies, f)


def antiderivative(f: GridFunction) -> GridFunction:
    """The multiplier ``(i tau)^{-1}`` off the zero node and 0 at the zero node."""
    tau = f.grid.frequencies
    sym = np.zeros_like(tau, dtype=complex)
    nz = tau != 0
    sym[nz] = 1.0 / (1j * tau[nz])
    return apply_multiplier(sym, f)


def _circular_convolve(k: np.ndarray, g: np.ndarray) -> np.ndarray:
    # direct summation (no FFT): circ[j] = sum_r k[r] g[(j - r) mod N]
    N = k.size
    full = np.convolve(k, np.concatenate([g, g]))
    return full[N:2 * N]


def convolve_kernel(k, f: GridFunction) -> GridFunction:
    """Riemann-sum convolution ``h sum_r k(t_r) f(t - t_r)``, circularly wrapped.

    ``k`` is a scalar :class:`GridFunction` (``n = 1``), or any object with
    ``grid`` and ``values`` of shape ``(N, n, m)`` (a matrix kernel, see
    :class:`maxreg.symbols.Kernel`).  Computed by direct summation, independent
    of the FFT path.
    """
    grid = f.grid
    if k.grid != grid:
        raise DimensionMismatch("kernel and function live on different grids")
    if isinstance(k, GridFunction):
        if k.n != 1:
            raise DimensionMismatch("a GridFunction kernel must be scalar (n = 1)")
        kv = k.samples[:, :, None]
        scalar = True
    else:
        kv = np.asarray(k.values)
        scalar = kv.shape[1:] == (1, 1)
    if not scalar and kv.shape[2] != f.n:
        raise DimensionMismatch(f"kernel of shape {kv.shape[1:]} cannot act on C^{f.n}")
    # reindex f so that position i holds f at t = i h, i.e. t_j - t_r = (j - r) h
    g = np.roll(f.samples, -(grid.N // 2), axis=0)
    if scalar:
        out = np.stack([_circular_convolve(kv[:, 0, 0], g[:, l]) for l in range(f.n)], axis=1)
    else:
        out = np.zeros((grid.N, kv.shape[1]), dtype=complex)
        for i in range(kv.shape[1]):
            for l in range(kv.shape[2]):
                out[:, i] += _circular_convolve(kv[:, i, l], g[:, l])
    return GridFunction(grid, grid.h * out)
