"""Operator pencils, the solution symbol and its companions, Mihlin
certificates, kernel extraction and Calderon-Zygmund constants."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergentWeightedDerivative, InvalidArgument
from .frequency import (MAX_ORDER, PUNCTURED, WHOLE, FrequencySymbol, add, constant_symbol, invert,
                        memory_symbol, multiply, operator_norm, polynomial_symbol)
from .grid import Grid, GridFunction, _inverse, symbol_at_nodes
from .littlewood_paley import DyadicFilterBank


# --------------------------------------------------------------------------
# convolution symbols and pencils


@dataclass(frozen=True, eq=False)
class ConvolutionSymbol:
    """Fourier transform of the convolution kernel ``c``.

    kinds: ``"zero"``; ``"memory"`` with ``c_hat = 2 lam / (lam^2 + tau^2) C``;
    ``"decomposed"`` with ``c_hat = i tau c0_hat + c1_hat`` for ``c = c0' + c1``.
    """
    kind: str
    n: int
    lam: float | None = None
    C: np.ndarray | None = None
    c0: FrequencySymbol | None = None
    c1: FrequencySymbol | None = None

    @classmethod
    def zero(cls, n: int):
        return cls("zero", n)

    @classmethod
    def memory(cls, lam: float, C):
        C = np.atleast_2d(np.asarray(C, dtype=complex))
        return cls("memory", C.shape[0], lam=float(lam), C=C)

    @classmethod
    def decomposed(cls, c0: FrequencySymbol, c1: FrequencySymbol):
        if c0.shape != c1.shape or c0.shape[0] != c0.shape[1]:
            raise InvalidArgument("c0 and c1 must be square symbols of equal size")
        return cls("decomposed", c0.shape[0], c0=c0, c1=c1)

    @property
    def symbol(self) -> FrequencySymbol:
        if self.kind == "zero":
            return constant_symbol(np.zeros((self.n, self.n)), name="0")
        if self.kind == "memory":
            return memory_symbol(self.lam, self.C)
        if self.kind == "decomposed":
            ident = polynomial_symbol([np.zeros((self.n, self.n)), 1j * np.eye(self.n)], name="i tau")
            return add(multiply(ident, self.c0), self.c1)
        raise InvalidArgument(f"unknown convolution symbol kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class OperatorPencil:
    """``b(tau) = -tau^2 P + i tau B + A + c_hat(tau)`` on ``C^n``."""
    A: np.ndarray
    B: np.ndarray
    P: np.ndarray
    chat: Optional[ConvolutionSymbol] = None

    def __post_init__(self):
        mats = [np.atleast_2d(np.asarray(M, dtype=complex)) for M in (self.A, self.B, self.P)]
        n = mats[0].shape[0]
        for name, M in zip("ABP", mats):
            if M.shape != (n, n):
                raise InvalidArgument(f"matrix {name} has shape {M.shape}, expected ({n}, {n})")
            if not np.all(np.isfinite(M)):
                raise InvalidArgument(f"matrix {name} has non-finite entries")
            M.flags.writeable = False
        object.__setattr__(self, "A", mats[0])
        object.__setattr__(self, "B", mats[1])
        object.__setattr__(self, "P", mats[2])
        chat = self.chat if self.chat is not None else ConvolutionSymbol.zero(n)
        if chat.n != n:
            raise InvalidArgument("convolution symbol dimension does not match the pencil")
        object.__setattr__(self, "chat", chat)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def scalar(cls, A=1.0, B=0.0, P=0.0, chat=None):
        return cls([[A]], [[B]], [[P]], chat)


def pencil_symbol(pencil: OperatorPencil) -> FrequencySymbol:
    """``b`` with exact derivatives ``b' = -2 tau P + iB + c'``, ``b'' = -2P + c''``, ``b''' = c'''``."""
    poly = polynomial_symbol([pencil.A, 1j * pencil.B, -pencil.P], name="poly")
    return add(poly, pencil.chat.symbol)


def invert_symbol(b: FrequencySymbol, domain: str = WHOLE, grid: Grid | None = None) -> FrequencySymbol:
    """``a = b^{-1}`` with derivatives from the exact inverse recursions.

    With ``domain="whole"`` and a grid, every grid node (zero included) is
    checked up front and :class:`SingularAtNode` is raised at the first bad
    one.  ``domain="punctured"`` excludes ``tau = 0``: the zero node then takes
    the symmetric average of ``a(±tau_1/2)``.
    """
    if domain not in (WHOLE, PUNCTURED):
        raise InvalidArgument(f"unknown domain {domain!r}")
    if domain == WHOLE and b.domain == PUNCTURED:
        domain = PUNCTURED
    a = invert(b, domain=domain, name=f"inv({b.name})")
    if grid is not None:
        a.at_nodes(grid.frequencies, zero_offset=0.5 * np.pi / grid.T)
    return a


@dataclass(frozen=True)
class Companions:
    a0: FrequencySymbol
    a1: FrequencySymbol
    d: FrequencySymbol
    cconv: FrequencySymbol

    def __iter__(self):
        return iter((self.a0, self.a1, self.d, self.cconv))


def companion_symbols(pencil: OperatorPencil, a: FrequencySymbol) -> Companions:
    """``a0 = tau B a``, ``a1 = tau^2 P a``, ``d = tau a`` and ``c_hat a``."""
    n = pencil.n
    z = np.zeros((n, n))
    a0 = multiply(polynomial_symbol([z, pencil.B]), a, name="a0")
    a1 = multiply(polynomial_symbol([z, z, pencil.P]), a, name="a1")
    d = multiply(polynomial_symbol([z, np.eye(n)]), a, name="d")
    cconv = multiply(pencil.chat.symbol, a, name="chat*a")
    return Companions(a0, a1, d, cconv)


# --------------------------------------------------------------------------
# Mihlin certificates


def mihlin_sample_grid(lo: float = 1e-6, hi: float = 1e6, per_decade: int = 2000) -> np.ndarray:
    decades = np.log10(hi) - np.log10(lo)
    pos = np.logspace(np.log10(lo), np.log10(hi), int(round(decades * per_decade)) + 1)
    return np.concatenate([-pos[::-1], pos])


@dataclass(frozen=True)
class MihlinCertificate:
    gamma: int
    flavor: str
    constant: float
    per_order: tuple
    continuity_at_0: Optional[bool]
    jump: float
    finite: bool
    divergent: tuple = ()
    finite_differences: bool = False
    sample_count: int = 0

    def as_dict(self):
        return {
            "gamma": self.gamma, "flavor": self.flavor, "constant": self.constant,
            "per_order": list(self.per_order), "continuity_at_0": self.continuity_at_0,
            "jump": self.jump, "finite": self.finite, "divergent": [list(d) for d in self.divergent],
            "finite_differences": self.finite_differences,
        }


def _diverges(abs_tau: np.ndarray, vals: np.ndarray, outward_sign: int, decades: float = 2.0) -> bool:
    """Monotone growth of per-decade maxima over the last ``decades`` decades at one end."""
    logs = np.log10(abs_tau)
    edge = logs.max() if outward_sign > 0 else logs.min()
    maxima = []
    for k in range(int(decades) + 1):
        if outward_sign > 0:
            sel = (logs <= edge - k + 1e-12) & (logs > edge - k - 1 + 1e-12)
        else:
            sel = (logs >= edge + k - 1e-12) & (logs < edge + k + 1 - 1e-12)
        if not np.any(sel):
            return False
        maxima.append(vals[sel].max())
    # maxima[0] is the outermost decade.  Divergence needs strict growth whose
    # increments do not shrink geometrically (a convergent tail gains ~10x less
    # per decade; logarithmic or power growth does not).
    rising = all(maxima[k] > maxima[k + 1] * (1 + 1e-6) for k in range(len(maxima) - 1))
    steps = np.diff(maxima[::-1])
    return rising and all(steps[k + 1] >= 0.5 * steps[k] for k in range(len(steps) - 1))


def mihlin_constant(a: FrequencySymbol, gamma: int, flavor: str = "M~", grid: Grid | None = None,
                    samples: np.ndarray | None = None, strict: bool = True,
                    continuity_tol: float = 1e-8) -> MihlinCertificate:
    """``max_{l<=gamma} sup_{tau != 0} w_l(tau) ||a^{(l)}(tau)||``.

    ``flavor="M"`` uses the homogeneous weights ``|tau|^l``; ``"M~"`` uses
    ``(1 + |tau|)^l`` and also checks ``a(0+) = a(0-)``.  The supremum runs
    over ``±[1e-6, 1e6]`` (2000 points per decade) plus the grid's nonzero
    frequency nodes.  Monotone growth over the outer two decades at either end
    is declared divergence; with ``strict`` this raises
    :class:`DivergentWeightedDerivative`.
    """
    if not 0 <= gamma <= MAX_ORDER:
        raise InvalidArgument(f"gamma must be in 0..{MAX_ORDER}")
    if flavor not in ("M", "M~"):
        raise InvalidArgument(f"unknown Mihlin flavor {flavor!r}")
    tau = mihlin_sample_grid() if samples is None else np.asarray(samples, dtype=float)
    tau = tau[tau != 0]
    log_part = tau.copy()
    if grid is not None:
        nodes = grid.frequencies[grid.frequencies != 0]
        tau = np.concatenate([tau, nodes])
    jet = a.jet(tau, gamma)
    abs_tau = np.abs(tau)
    per_order, divergent = [], []
    for l in range(gamma + 1):
        weight = abs_tau**l if flavor == "M" else (1 + abs_tau) ** l
        vals = weight * operator_norm(jet[l])
        per_order.append(float(np.max(vals)))
        m = log_part.size
        for end, sign in (("outer", 1), ("inner", -1)):
            for side in (log_part > 0, log_part < 0):
                if _diverges(abs_tau[:m][side], vals[:m][side], sign):
                    divergent.append((l, end))
                    break
    divergent = tuple(dict.fromkeys(divergent))
    continuity, jump = None, 0.0
    if flavor == "M~":
        left, right = a.limits_at_zero()
        jump = float(operator_norm((right - left)[None])[0])
        continuity = jump <= continuity_tol
    finite = not divergent and all(np.isfinite(per_order))
    cert = MihlinCertificate(gamma, flavor, float(max(per_order)), tuple(per_order), continuity, jump,
                             finite, divergent, a.uses_finite_differences and gamma > a.exact_order,
                             int(tau.size))
    if strict and divergent:
        l, end = divergent[0]
        raise DivergentWeightedDerivative(l, end)
    return cert


# --------------------------------------------------------------------------
# kernels


@dataclass(frozen=True, eq=False)
class Kernel:
    """Matrix kernel ``k(t_j)`` and ``k'(t_j)`` sampled on a grid, shape ``(N, n, m)``."""
    grid: Grid
    values: np.ndarray
    derivative: np.ndarray
    fold: int = 0

    def as_grid_function(self) -> GridFunction:
        if self.values.shape[1:] != (1, 1):
            raise InvalidArgument("only scalar kernels convert to grid functions")
        return GridFunction(self.grid, self.values[:, :, 0])


def kernel_from_symbol(a, grid: Grid, fold: int = 0) -> Kernel:
    """Kernel ``F^{-1} a`` and its derivative ``F^{-1}(i tau a)`` on the grid.

    ``fold = 0`` gives the discrete kernel whose circular Riemann-sum
    convolution reproduces the multiplier ``a(D)`` exactly.  ``fold > 0``
    instead approximates point samples of the continuous kernel by adding the
    aliased copies ``a(tau_k + 2 pi m / h)``, ``0 < |m| <= fold`` (Poisson
    summation); this needs ``a`` to be a callable symbol decaying at infinity.
    """
    tau = grid.frequencies
    vals = symbol_at_nodes(a, grid)
    dvals = 1j * tau[:, None, None] * vals
    if fold:
        if not (isinstance(a, FrequencySymbol) or callable(a)):
            raise InvalidArgument("folding needs an evaluable symbol")
        period = 2 * np.pi / grid.h
        for m in range(1, int(fold) + 1):
            for s in (m, -m):
                shifted = tau + s * period
                v = np.asarray(a(shifted), dtype=complex)
                if v.ndim == 1:
                    v = v[:, None, None]
                vals = vals + v
                dvals = dvals + 1j * shifted[:, None, None] * v
    return Kernel(grid, _inverse(grid, vals), _inverse(grid, dvals), int(fold))


@dataclass(frozen=True)
class CZConstant:
    constant: float
    decay0: float
    decay1: float
    near_zero: float
    excluded_radius: float


def cz_constant(kernel: Kernel, exclude_steps: int = 4) -> CZConstant:
    """``max(sup ||t k(t)||, sup ||t^2 k'(t)||)`` over ``4h <= |t| <= T/2``.

    The excluded nodes near the origin are summarised in ``near_zero``.
    """
    grid = kernel.grid
    t = grid.t
    radius = exclude_steps * grid.h
    sel = (np.abs(t) >= radius - 1e-12 * grid.h) & (np.abs(t) <= grid.T / 2)
    near = (np.abs(t) < radius - 1e-12 * grid.h) & (t != 0)
    k0 = np.abs(t) * operator_norm(kernel.values)
    k1 = t**2 * operator_norm(kernel.derivative)
    d0 = float(k0[sel].max()) if np.any(sel) else 0.0
    d1 = float(k1[sel].max()) if np.any(sel) else 0.0
    nz = float(max(k0[near].max(), k1[near].max())) if np.any(near) else 0.0
    return CZConstant(max(d0, d1), d0, d1, nz, radius)


@dataclass(frozen=True)
class EnvelopeReport:
    constant: float
    per_level: tuple


def dyadic_envelope_check(a, bank: DyadicFilterBank) -> EnvelopeReport:
    """Smallest ``c_j`` with ``||F^{-1}(psi_j a)(t)|| <= c_j 2^j / (1 + 4^j t^2)``; returns ``max_j c_j``."""
    grid = bank.grid
    vals = symbol_at_nodes(a, grid)
    t = grid.t
    cs = []
    for j in range(bank.J + 1):
        kj = _inverse(grid, bank.filters[j][:, None, None] * vals)
        env = 2.0**j / (1 + 4.0**j * t**2)
        cs.append(float(np.max(operator_norm(kj) / env)))
    return EnvelopeReport(max(cs), tuple(cs))


# --------------------------------------------------------------------------
# random pencils


def random_pencil(rng: np.random.Generator, n: int, shift: float = 3.0, memory: bool = True,
                  lam: float = 1.0) -> OperatorPencil:
    """Standard complex Gaussian ``A, B, P`` with ``A`` shifted by ``shift * I``."""
    def cg():
        return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)

    A = cg() + shift * np.eye(n)
    B, P = cg(), cg()
    chat = ConvolutionSymbol.memory(lam, cg()) if memory else None
    return OperatorPencil(A, B, P, chat)


def min_singular_value(pencil: OperatorPencil, tau: np.ndarray | None = None) -> float:
    if tau is None:
        tau = np.concatenate([-np.logspace(-4, 4, 2001)[::-1], [0.0], np.logspace(-4, 4, 2001)])
    b = pencil_symbol(pencil)(tau)
    s = np.linalg.svd(b, compute_uv=False)
    return float(s[:, -1].min())


def pencil_bank(count: int = 20, seed: int = 0, n_choices=(1, 2, 3), min_gap: float | None = None,
                memory: bool = True) -> list:
    """Seeded bank of random pencils.

    With ``min_gap``, draws are kept only when ``||b(tau)^{-1}|| (1 + tau^2)^{-1}``
    stays below ``1 / min_gap`` on a probe grid, i.e. ``b`` is uniformly
    invertible on the real line with quadratic growth.
    """
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    probe = np.concatenate([-np.logspace(-3, 4, 1401)[::-1], [0.0], np.logspace(-3, 4, 1401)])
    while len(out) < count:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("could not draw enough well-conditioned pencils")
        n = int(n_choices[rng.integers(len(n_choices))])
        p = random_pencil(rng, n, memory=memory)
        if min_gap is not None:
            s = np.linalg.svd(pencil_symbol(p)(probe), compute_uv=False)[:, -1]
            if np.min(s / (1 + probe**2)) < min_gap:
                continue
        out.append(p)
    return out
