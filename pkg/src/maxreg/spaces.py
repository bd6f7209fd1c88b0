"""Function space norms, the Hardy-Littlewood maximal operator, Muckenhoupt
constants and the Rubio de Francia iteration.

The maximal operator works on grid-aligned windows with wrap-around, so it is
exactly translation equivariant on the periodic grid.  Window sums are built
by repeated doubling of positive arrays, which keeps the relative rounding
error of every window average at a few ulps; this matters for the pointwise
``A_1`` inequality, which is nearly tight away from the support of ``g``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import GridMismatch, InvalidArgument, NotSupported, ZeroInput
from .grid import Grid, GridFunction

WEIGHT_FLOOR = 1e-300
DEFAULT_DEPTH = 40
WEIGHTED_BOUND_C = 4.0


# --------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True, eq=False)
class Weight:
    grid: Grid
    values: np.ndarray
    tag: str = ""
    clamped: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != self.grid.N:
            raise GridMismatch(f"weight has {vals.size} samples, grid has {self.grid.N}")
        if not np.all(np.isfinite(vals)):
            raise InvalidArgument("weight values must be finite")
        low = vals < WEIGHT_FLOOR
        vals = np.where(low, WEIGHT_FLOOR, vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "clamped", int(self.clamped) + int(low.sum()))

    @classmethod
    def from_callable(cls, grid: Grid, fn, tag: str = ""):
        return cls(grid, fn(grid.t), tag)

    def power(self, e: float, tag: str | None = None) -> "Weight":
        return Weight(self.grid, self.values ** e, tag if tag is not None else f"({self.tag})^{e:g}")


def _check_p(p):
    if not (1 < p < np.inf):
        raise InvalidArgument(f"p must lie strictly between 1 and infinity, got {p}")


@dataclass(frozen=True)
class Lp:
    p: float

    def __post_init__(self):
        _check_p(self.p)

    def __str__(self):
        return f"L^{self.p:g}"


@dataclass(frozen=True, eq=False)
class WeightedLp:
    p: float
    weight: Weight

    def __post_init__(self):
        _check_p(self.p)

    def __str__(self):
        return f"L^{self.p:g}_w[{self.weight.tag}]"


@dataclass(frozen=True)
class Lorentz:
    """Weak-type space ``L^{p, infinity}`` (quasi-norm, norm only)."""
    p: float

    def __post_init__(self):
        _check_p(self.p)

    def __str__(self):
        return f"L^({self.p:g},inf)"


SpaceDescriptor = Union[Lp, WeightedLp, Lorentz]


def dual(space: SpaceDescriptor) -> SpaceDescriptor:
    """Koethe dual with respect to the pairing ``int f g dt``."""
    if isinstance(space, Lp):
        return Lp(space.p / (space.p - 1))
    if isinstance(space, WeightedLp):
        q = space.p / (space.p - 1)
        return WeightedLp(q, space.weight.power(1 - q))
    raise NotSupported(f"dual of {space} is not constructed")


def _modulus(f) -> np.ndarray:
    if isinstance(f, GridFunction):
        return f.pointwise_norm()
    return np.abs(np.asarray(f))


def norm(space: SpaceDescriptor, f: GridFunction) -> float:
    """``|| |f|_X ||_Phi`` with each sample carrying mass ``h``."""
    h = f.grid.h
    x = f.pointwise_norm()
    if isinstance(space, Lp):
        return float((h * np.sum(x ** space.p)) ** (1 / space.p))
    if isinstance(space, WeightedLp):
        if space.weight.grid != f.grid:
            raise GridMismatch("weight and function live on different grids")
        return float((h * np.sum(x ** space.p * space.weight.values)) ** (1 / space.p))
    if isinstance(space, Lorentz):
        v = np.sort(x)[::-1]
        s = h * np.arange(1, v.size + 1)
        return float(np.max(s ** (1 / space.p) * v))
    raise NotSupported(f"unknown space descriptor {space!r}")


# --------------------------------------------------------------------------
# maximal operator


@dataclass(frozen=True)
class MaximalConfig:
    """Admissible windows for the maximal operator.

    ``lengths`` are window lengths in samples; the default is the dyadic set
    ``1, 2, 4, ..., <= N``.  ``flavor="uncentered"`` takes every window
    containing the point; ``"centered"`` uses the window of ``2 (L // 2) + 1``
    samples centred at it.
    """
    flavor: str = "uncentered"
    lengths: tuple | None = None

    def __post_init__(self):
        if self.flavor not in ("uncentered", "centered"):
            raise InvalidArgument(f"unknown maximal flavor {self.flavor!r}")
        if self.lengths is not None:
            ls = tuple(sorted(int(L) for L in self.lengths))
            if not ls or ls[0] < 1:
                raise InvalidArgument("window lengths must be positive")
            object.__setattr__(self, "lengths", ls)

    def sample_lengths(self, N: int) -> tuple:
        if self.lengths is None:
            return tuple(1 << m for m in range(int(np.floor(np.log2(N))) + 1))
        if self.lengths[-1] > N:
            raise InvalidArgument("window longer than the period 2T")
        return self.lengths

    def window_set(self, grid: Grid) -> np.ndarray:
        return grid.h * np.asarray(self.sample_lengths(grid.N), dtype=float)

    @classmethod
    def dense(cls, N: int, flavor: str = "uncentered"):
        return cls(flavor, tuple(range(1, N + 1)))


DEFAULT_MAXIMAL = MaximalConfig()


def _shift(x: np.ndarray, s: int) -> np.ndarray:
    """``out[..., i] = x[..., (i + s) mod N]``."""
    return np.roll(x, -s, axis=-1)


class _WindowSums:
    """Circular window sums of a nonnegative batch ``x`` (time on the last axis)."""

    def __init__(self, x: np.ndarray):
        self.N = x.shape[-1]
        self.dyadic = [x]
        while (1 << len(self.dyadic)) <= self.N:
            prev = self.dyadic[-1]
            self.dyadic.append(prev + _shift(prev, 1 << (len(self.dyadic) - 1)))

    def __call__(self, L: int) -> np.ndarray:
        """``S[..., i] = sum x[..., i : i + L]`` (wrapped)."""
        out = None
        offset = 0
        for m in range(len(self.dyadic) - 1, -1, -1):
            if L & (1 << m):
                piece = _shift(self.dyadic[m], offset)
                out = piece if out is None else out + piece
                offset += 1 << m
        return out


def _sliding_max(v: np.ndarray, L: int) -> np.ndarray:
    """``Q[..., i] = max v[..., i : i + L]`` (wrapped), sparse-table style."""
    q = v
    r = 1
    while 2 * r <= L:
        q = np.maximum(q, _shift(q, r))
        r *= 2
    if r < L:
        q = np.maximum(q, _shift(q, L - r))
    return q


def _maximal_batch(x: np.ndarray, cfg: MaximalConfig = DEFAULT_MAXIMAL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    sums = _WindowSums(x)
    out = np.zeros_like(x)
    for L in cfg.sample_lengths(N):
        if cfg.flavor == "uncentered":
            avg = sums(L) / L
            # windows [i, i+L) containing j start at i in [j-L+1, j]
            cand = np.roll(_sliding_max(avg, L), L - 1, axis=-1)
        else:
            r = L // 2
            cand = np.roll(sums(2 * r + 1), r, axis=-1) / (2 * r + 1) if 2 * r + 1 <= N else sums(N)[..., :1] / N
        out = np.maximum(out, cand)
    return out


def maximal(f, cfg: MaximalConfig = DEFAULT_MAXIMAL) -> GridFunction:
    """Hardy-Littlewood maximal function of ``|f|_X`` over the configured windows."""
    return GridFunction(f.grid, _maximal_batch(_modulus(f), cfg))


def maximal_norm_bound(space: SpaceDescriptor, override: float | None = None,
                       C: float = WEIGHTED_BOUND_C) -> float:
    """An upper bound ``kappa`` for the operator norm of ``M`` on ``space``.

    ``L^p``: ``2p/(p-1)``.  Weighted ``L^p_w``:
    ``2p/(p-1) * [w]_{A_p}^{1/(p-1)} * C^{1 - 1/[w]_{A_p}}``, which reduces to
    the unweighted value for constant weights and approaches the factor ``C``
    for large ``A_p`` constants.
    """
    if override is not None:
        if override <= 0:
            raise InvalidArgument("kappa override must be positive")
        return float(override)
    if isinstance(space, Lp):
        return 2 * space.p / (space.p - 1)
    if isinstance(space, WeightedLp):
        p = space.p
        ap = ap_constant(space.weight, p)
        if not np.isfinite(ap):
            raise InvalidArgument("weight is not in A_p on this grid")
        return float(2 * p / (p - 1) * ap ** (1 / (p - 1)) * C ** (1 - 1 / ap))
    raise NotSupported(f"no maximal bound available for {space}")


# --------------------------------------------------------------------------
# Rubio de Francia algorithm


def maximal_iterates(x: np.ndarray, K: int, cfg: MaximalConfig = DEFAULT_MAXIMAL) -> np.ndarray:
    """Stack ``[x, M x, ..., M^K x]`` along a new leading axis."""
    its = [np.asarray(x, dtype=float)]
    for _ in range(K):
        its.append(_maximal_batch(its[-1], cfg))
    return np.stack(its)


def rubio_sum(iterates: np.ndarray, kappa: float) -> np.ndarray:
    """Truncated series ``sum_k M^k|g| / (2 kappa)^k`` from precomputed iterates."""
    if not kappa > 0:
        raise InvalidArgument("kappa must be positive")
    K = iterates.shape[0] - 1
    coef = (2.0 * kappa) ** -np.arange(K + 1, dtype=float)
    return np.tensordot(coef, iterates, axes=(0, 0))


def rubio_iterate(g, kappa: float, K: int = DEFAULT_DEPTH,
                  cfg: MaximalConfig = DEFAULT_MAXIMAL) -> GridFunction:
    """The iteration ``R g = sum_{k<=K} M^k|g| / (2 kappa)^k``."""
    if not kappa > 0:
        raise InvalidArgument("kappa must be positive")
    if K < 1:
        raise InvalidArgument("truncation depth K must be at least 1")
    return GridFunction(g.grid, rubio_sum(maximal_iterates(_modulus(g), K, cfg), kappa))


def _ap_batch(w: np.ndarray, p: float, cfg: MaximalConfig = DEFAULT_MAXIMAL) -> np.ndarray:
    w = np.maximum(np.asarray(w, dtype=float), WEIGHT_FLOOR)
    sw = _WindowSums(w)
    sv = _WindowSums(w ** (-1.0 / (p - 1)))
    best = np.zeros(w.shape[:-1])
    for L in cfg.sample_lengths(w.shape[-1]):
        val = (sw(L) / L) * (sv(L) / L) ** (p - 1)
        best = np.maximum(best, val.max(axis=-1))
    return best


def ap_constant(w: Weight, p: float, cfg: MaximalConfig = DEFAULT_MAXIMAL) -> float:
    """``sup_I (avg_I w) (avg_I w^{-1/(p-1)})^{p-1}`` over the admissible windows."""
    _check_p(p)
    return float(_ap_batch(w.values, p, cfg))


@dataclass(frozen=True)
class A1Check:
    ok: bool
    max_ratio: float
    tolerance: float


def pointwise_A1_check(v, kappa: float, K: int = DEFAULT_DEPTH,
                       cfg: MaximalConfig = DEFAULT_MAXIMAL) -> A1Check:
    """Check ``M v <= 2 kappa v (1 + 2^{-K+1})`` at every node.

    ``max_ratio`` is ``max M v / (2 kappa v)`` (infinite where ``v`` vanishes
    but ``M v`` does not).
    """
    x = _modulus(v)
    Mv = _maximal_batch(x, cfg)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(Mv == 0, 0.0, Mv / (2 * kappa * x))
    tol = 2.0 ** (-K + 1)
    max_ratio = float(np.max(ratio))
    return A1Check(max_ratio <= 1 + tol, max_ratio, tol)


def build_weight(g, h, p: float, space: SpaceDescriptor, K: int = DEFAULT_DEPTH,
                 cfg: MaximalConfig = DEFAULT_MAXIMAL, kappa: float | None = None,
                 kappa_dual: float | None = None) -> Weight:
    """Muckenhoupt weight ``(R g)^{1-p} R' h`` from the two iteration operators.

    ``R`` uses ``kappa = maximal_norm_bound(space)`` and ``R'`` uses the bound
    for the dual space.  The weight's ``meta`` records both kappas and the
    guaranteed ``A_p`` bound ``2^p kappa^{p-1} kappa'``.
    """
    _check_p(p)
    gx, hx = _modulus(g), _modulus(h)
    if not np.any(gx > 0):
        raise ZeroInput("g vanishes identically")
    if not np.any(hx > 0):
        raise ZeroInput("h vanishes identically")
    if g.grid != h.grid:
        raise GridMismatch("g and h live on different grids")
    if kappa is None:
        kappa = maximal_norm_bound(space)
    if kappa_dual is None:
        kappa_dual = maximal_norm_bound(dual(space))
    its = maximal_iterates(np.stack([gx, hx]), K, cfg)
    Rg = rubio_sum(its[:, 0], kappa)
    Rh = rubio_sum(its[:, 1], kappa_dual)
    w = Rg ** (1 - p) * Rh
    meta = {"kappa": kappa, "kappa_dual": kappa_dual, "p": p, "K": K,
            "ap_bound": 2 ** p * kappa ** (p - 1) * kappa_dual}
    return Weight(g.grid, w, tag=f"w(g,h,p={p:g})", meta=meta)


def weight_bound(p: float, kappa: float, kappa_dual: float) -> float:
    """``2^p kappa^{p-1} kappa'``: guaranteed ``A_p`` constant of the constructed weight."""
    return 2 ** p * kappa ** (p - 1) * kappa_dual
