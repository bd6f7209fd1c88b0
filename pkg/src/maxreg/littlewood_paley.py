"""Dyadic resolution of the identity, Besov and Triebel-Lizorkin norms."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BandOverflow, IndexOutOfRange, InvalidArgument, InvalidQ
from .grid import Grid, GridFunction, _forward, _inverse, apply_multiplier, derivative, multiply_nodes, symbol_at_nodes
from .spaces import DEFAULT_MAXIMAL, Lp, MaximalConfig, SpaceDescriptor, _maximal_batch, norm


def _e(x):
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


class BumpFunction:
    """``psi(tau) = theta(2 - |tau|)`` with the smooth step
    ``theta(x) = e(x) / (e(x) + e(1 - x))``, ``e(x) = exp(-1/x)`` for ``x > 0``.

    ``psi = 1`` on ``[-1, 1]`` and vanishes outside ``[-2, 2]``.
    """

    def __call__(self, tau, order: int = 0) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        x = 2.0 - np.abs(tau)
        if order == 0:
            return self._theta(x)
        if order in (1, 2):
            sgn = np.sign(tau)
            d = self._theta_derivative(x, order)
            return -sgn * d if order == 1 else d
        raise InvalidArgument("bump derivatives are available up to order 2")

    @staticmethod
    def _theta(x):
        e1, e2 = _e(x), _e(1.0 - x)
        return e1 / (e1 + e2)

    @staticmethod
    def _theta_derivative(x, order):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        out = np.zeros_like(x)
        xi = x[inside]
        e1, e2 = np.exp(-1 / xi), np.exp(-1 / (1 - xi))
        s = e1 + e2
        r = 1 / xi**2 + 1 / (1 - xi) ** 2
        g = e1 * e2 / s**2
        if order == 1:
            out[inside] = g * r
        else:
            ds = e1 / xi**2 - e2 / (1 - xi) ** 2
            dg = g * (1 / xi**2 - 1 / (1 - xi) ** 2) - 2 * g * ds / s
            dr = -2 / xi**3 + 2 / (1 - xi) ** 3
            out[inside] = dg * r + g * dr
        return out


DEFAULT_BUMP = BumpFunction()


def max_level(grid: Grid) -> int:
    """Largest ``J`` with ``2^{J+1} <= pi / h``."""
    J = int(np.floor(np.log2(grid.nyquist))) - 1
    if J < 0:
        raise BandOverflow("grid too coarse for even the zeroth dyadic band")
    return J


@dataclass(frozen=True, eq=False)
class DyadicFilterBank:
    grid: Grid
    J: int
    filters: np.ndarray  # (J+1, N) real, FFT node order

    def __len__(self):
        return self.J + 1


def make_filter_bank(grid: Grid, J: int | None = None, psi: BumpFunction = DEFAULT_BUMP) -> DyadicFilterBank:
    """Filters ``psi_0 = psi`` and ``psi_j = psi(2^{-j} .) - psi(2^{-j+1} .)``."""
    top = max_level(grid)
    if J is None:
        J = top
    if J < 0:
        raise InvalidArgument("J must be nonnegative")
    if J > top:
        raise BandOverflow(f"level J={J} exceeds the grid's top resolvable level {top}")
    tau = grid.frequencies
    dil = [psi(tau / 2.0**j) for j in range(J + 1)]
    filters = np.empty((J + 1, grid.N))
    filters[0] = dil[0]
    for j in range(1, J + 1):
        filters[j] = dil[j] - dil[j - 1]
    filters.flags.writeable = False
    return DyadicFilterBank(grid, J, filters)


@lru_cache(maxsize=16)
def default_bank(grid: Grid) -> DyadicFilterBank:
    return make_filter_bank(grid)


def _bank_for(f: GridFunction, bank):
    bank = default_bank(f.grid) if bank is None else bank
    if bank.grid != f.grid:
        raise InvalidArgument("filter bank and function live on different grids")
    return bank


def dyadic_block(bank: DyadicFilterBank, j: int, f: GridFunction) -> GridFunction:
    """``psi_j(D) f``."""
    if not 0 <= j <= bank.J:
        raise IndexOutOfRange(f"block index {j} outside 0..{bank.J}")
    return apply_multiplier(bank.filters[j], f)


def blocks(bank: DyadicFilterBank, f: GridFunction) -> np.ndarray:
    """All dyadic blocks at once, shape ``(J+1, N, n)``."""
    F = _forward(f.grid, f.samples)
    spectrum = bank.filters[:, :, None] * F[None]
    return np.fft.ifft(f.grid._phase[None, :, None] * spectrum, axis=1) / f.grid.h


def _block_moduli(bank, f):
    return np.sqrt(np.sum(np.abs(blocks(bank, f)) ** 2, axis=2))  # (J+1, N)


@dataclass(frozen=True)
class SmoothnessParams:
    s: float
    q: float
    phi: SpaceDescriptor = Lp(2.0)

    def __post_init__(self):
        if not (1 <= self.q <= np.inf):
            raise InvalidQ(f"q must lie in [1, inf], got {self.q}")

    def __str__(self):
        q = "inf" if np.isinf(self.q) else f"{self.q:g}"
        return f"{self.symbol}^({self.s:g},{q})_{self.phi}"

    symbol = "B"


class Besov(SmoothnessParams):
    symbol = "B"


class TriebelLizorkin(SmoothnessParams):
    symbol = "F"

    def __post_init__(self):
        if not (1 < self.q < np.inf):
            raise InvalidQ(f"Triebel-Lizorkin norms need q in (1, inf), got {self.q}")


def _lq(values: np.ndarray, q: float, axis=0) -> np.ndarray:
    if np.isinf(q):
        return np.max(values, axis=axis)
    return np.sum(values ** q, axis=axis) ** (1 / q)


def _phi_norm_of_modulus(phi, grid, x):
    return norm(phi, GridFunction(grid, x))


def besov_norm(params: SmoothnessParams, f: GridFunction, bank: DyadicFilterBank | None = None) -> float:
    """``( sum_j || 2^{sj} psi_j(D) f ||_Phi^q )^{1/q}``, max over ``j`` when ``q = inf``."""
    bank = _bank_for(f, bank)
    mods = _block_moduli(bank, f)
    per_level = np.array([_phi_norm_of_modulus(params.phi, f.grid, m) for m in mods])
    weights = 2.0 ** (params.s * np.arange(bank.J + 1))
    return float(_lq(weights * per_level, params.q))


def triebel_lizorkin_norm(params: SmoothnessParams, f: GridFunction,
                          bank: DyadicFilterBank | None = None) -> float:
    """``|| ( sum_j |2^{sj} psi_j(D) f|^q )^{1/q} ||_Phi``."""
    if not (1 < params.q < np.inf):
        raise InvalidQ(f"Triebel-Lizorkin norms need q in (1, inf), got {params.q}")
    bank = _bank_for(f, bank)
    mods = _block_moduli(bank, f)
    weights = 2.0 ** (params.s * np.arange(bank.J + 1))
    g = _lq(weights[:, None] * mods, params.q)
    return _phi_norm_of_modulus(params.phi, f.grid, g)


def space_norm(space, f: GridFunction, bank: DyadicFilterBank | None = None) -> float:
    """Norm in ``Phi``, ``B^{s,q}_Phi`` or ``F^{s,q}_Phi`` depending on the descriptor."""
    if isinstance(space, TriebelLizorkin):
        return triebel_lizorkin_norm(space, f, bank)
    if isinstance(space, SmoothnessParams):
        return besov_norm(space, f, bank)
    return norm(space, f)


def lift(f: GridFunction, sigma: float = 1.0) -> GridFunction:
    """The Bessel potential ``(1 + tau^2)^{sigma/2}``; ``sigma = 1`` lowers smoothness by one."""
    return apply_multiplier((1.0 + f.grid.frequencies**2) ** (sigma / 2), f)


@dataclass(frozen=True)
class EquivNormReport:
    lhs: float
    rhs: float
    ratio: float
    flagged: bool = False


def equiv_norm_report(params: SmoothnessParams, f: GridFunction,
                      bank: DyadicFilterBank | None = None) -> EquivNormReport:
    """Compare ``||f||_{B^s}`` with ``||f||_{B^{s-1}} + ||f'||_{B^{s-1}}``."""
    lower = type(params)(params.s - 1, params.q, params.phi)
    lhs = besov_norm(params, f, bank)
    rhs = besov_norm(lower, f, bank) + besov_norm(lower, derivative(f), bank)
    if lhs == 0:
        return EquivNormReport(lhs, rhs, 1.0 if rhs == 0 else np.inf, flagged=rhs != 0)
    return EquivNormReport(lhs, rhs, rhs / lhs)


@dataclass(frozen=True)
class DominationReport:
    best_constant: float
    block_sup: np.ndarray
    maximal: np.ndarray


def maximal_domination_check(a, bank: DyadicFilterBank, f: GridFunction,
                             cfg: MaximalConfig = DEFAULT_MAXIMAL) -> DominationReport:
    """Smallest ``c`` with ``max_j |(psi_j a)(D) f| <= c M(|f|_X)`` on the grid."""
    grid = f.grid
    vals = symbol_at_nodes(a, grid)
    F = _forward(grid, f.samples)
    sup = np.zeros(grid.N)
    for j in range(bank.J + 1):
        coeffs = multiply_nodes(bank.filters[j][:, None, None] * vals, F)
        blk = _inverse(grid, coeffs)
        sup = np.maximum(sup, np.sqrt(np.sum(np.abs(blk) ** 2, axis=1)))
    Mf = _maximal_batch(f.pointwise_norm(), cfg)
    if not np.any(sup > 0):
        return DominationReport(0.0, sup, Mf)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sup > 0, sup / Mf, 0.0)
    return DominationReport(float(np.max(ratio)), sup, Mf)
