"""Matrix-valued functions of the frequency variable together with their derivatives.

A :class:`FrequencySymbol` is built around a *jet* function ``jet(tau, order)``
returning the stack ``[a(tau), a'(tau), ..., a^(order)(tau)]`` with shape
``(order + 1, len(tau), n, m)``.  Products, sums and inverses propagate jets
exactly with the Leibniz rule, so companion symbols never fall back to finite
differences unless a user-supplied building block lacks exact derivatives.
"""
from __future__ import annotations

from math import comb
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgument, SingularAtNode

MAX_ORDER = 3
COND_LIMIT = 1e12

WHOLE = "whole"
PUNCTURED = "punctured"

JetFunction = Callable[[np.ndarray, int], np.ndarray]


def _as_tau(tau) -> np.ndarray:
    return np.atleast_1d(np.asarray(tau, dtype=float))


def central_difference(fn: Callable[[np.ndarray], np.ndarray], tau, order: int, rel_step: float):
    """Central finite difference of ``fn`` (values only) of the given order.

    The step is ``rel_step * max(1, |tau|)``.  Second-order accurate stencils.
    """
    tau = _as_tau(tau)
    h = rel_step * np.maximum(1.0, np.abs(tau))
    hh = h.reshape((-1,) + (1,) * (fn(tau[:1]).ndim - 1))
    if order == 1:
        return (fn(tau + h) - fn(tau - h)) / (2 * hh)
    if order == 2:
        return (fn(tau + h) - 2 * fn(tau) + fn(tau - h)) / hh**2
    if order == 3:
        return (fn(tau + 2 * h) - 2 * fn(tau + h) + 2 * fn(tau - h) - fn(tau - 2 * h)) / (2 * hh**3)
    raise InvalidArgument(f"finite differences implemented for orders 1..3, got {order}")


class FrequencySymbol:
    """Matrix-valued symbol ``a: R -> C^{n x m}`` with derivatives up to order 3.

    Parameters
    ----------
    jet : callable
        ``jet(tau, order)`` returning an array of shape ``(order+1, len(tau), n, m)``.
    shape : (n, m)
    exact_order : int
        Highest derivative order the jet computes exactly.  Higher orders are
        obtained by central differences of the top exact derivative and the
        symbol is flagged (``uses_finite_differences``).
    domain : {"whole", "punctured"}
        ``"punctured"`` marks symbols that are only defined (or only continuous)
        off ``tau = 0``.  Their value at the zero grid node is the symmetric
        average of the one-sided values at ``±tau_1/2``.
    """

    def __init__(self, jet: JetFunction, shape, exact_order: int = MAX_ORDER,
                 domain: str = WHOLE, name: str = ""):
        if domain not in (WHOLE, PUNCTURED):
            raise InvalidArgument(f"unknown domain tag {domain!r}")
        self._jet = jet
        self.shape = (int(shape[0]), int(shape[1]))
        self.exact_order = int(exact_order)
        self.domain = domain
        self.name = name

    def __repr__(self):
        return f"FrequencySymbol({self.name or '?'}, shape={self.shape}, domain={self.domain})"

    @property
    def uses_finite_differences(self) -> bool:
        return self.exact_order < MAX_ORDER

    def jet(self, tau, order: int = 0) -> np.ndarray:
        if not 0 <= order <= MAX_ORDER:
            raise InvalidArgument(f"derivative order must be in 0..{MAX_ORDER}")
        tau = _as_tau(tau)
        if order <= self.exact_order:
            return np.asarray(self._jet(tau, order), dtype=complex)
        base = np.asarray(self._jet(tau, self.exact_order), dtype=complex)
        top = self.exact_order

        def top_fn(t):
            return np.asarray(self._jet(t, top), dtype=complex)[top]

        extra = [central_difference(top_fn, tau, k, 10.0 ** (-5 + k)) for k in range(1, order - top + 1)]
        return np.concatenate([base, np.stack(extra)], axis=0)

    def __call__(self, tau, order: int = 0) -> np.ndarray:
        """Value (``order=0``) or derivative of the given order, shape ``(len(tau), n, m)``."""
        return self.jet(tau, order)[order]

    def limits_at_zero(self, eps: float = 1e-10):
        """Approximate one-sided limits ``(a(0-), a(0+))``."""
        vals = self(np.array([-eps, eps]))
        return vals[0], vals[1]

    def at_nodes(self, tau_nodes: np.ndarray, zero_offset: float | None = None) -> np.ndarray:
        """Evaluate at grid frequency nodes, resolving the zero node by convention.

        ``zero_offset`` is the half spacing ``tau_1/2`` used for punctured symbols.
        """
        tau_nodes = _as_tau(tau_nodes)
        if self.domain == WHOLE:
            return self(tau_nodes)
        zero = tau_nodes == 0.0
        out = np.empty((tau_nodes.size,) + self.shape, dtype=complex)
        if np.any(~zero):
            out[~zero] = self(tau_nodes[~zero])
        if np.any(zero):
            if zero_offset is None:
                nz = np.abs(tau_nodes[~zero])
                zero_offset = 0.5 * float(nz.min()) if nz.size else 1e-8
            left, right = self(np.array([-zero_offset, zero_offset]))
            out[zero] = 0.5 * (left + right)
        return out


def _broadcast_constant(C, order, size):
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    out = np.zeros((order + 1, size) + C.shape, dtype=complex)
    out[0] = C
    return out


def constant_symbol(C, name: str = "const") -> FrequencySymbol:
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    return FrequencySymbol(lambda tau, order: _broadcast_constant(C, order, tau.size), C.shape, name=name)


def polynomial_symbol(coeffs: Sequence, name: str = "poly") -> FrequencySymbol:
    """``sum_k coeffs[k] * tau**k`` with matrix coefficients."""
    coeffs = [np.atleast_2d(np.asarray(c, dtype=complex)) for c in coeffs]
    shape = coeffs[0].shape

    def jet(tau, order):
        out = np.zeros((order + 1, tau.size) + shape, dtype=complex)
        for l in range(order + 1):
            for k in range(l, len(coeffs)):
                fac = np.prod(np.arange(k - l + 1, k + 1), dtype=float)
                out[l] += fac * tau[:, None, None] ** (k - l) * coeffs[k]
        return out

    return FrequencySymbol(jet, shape, name=name)


def scalar_symbol(funcs: Sequence[Callable[[np.ndarray], np.ndarray]], C=None,
                  domain: str = WHOLE, name: str = "scalar") -> FrequencySymbol:
    """Symbol ``g(tau) * C`` from a scalar function and its derivatives.

    ``funcs[l]`` evaluates the l-th derivative of ``g``; missing orders fall
    back to finite differences.
    """
    C = np.eye(1, dtype=complex) if C is None else np.atleast_2d(np.asarray(C, dtype=complex))
    funcs = list(funcs)

    def jet(tau, order):
        return np.stack([np.asarray(funcs[l](tau), dtype=complex)[:, None, None] * C
                         for l in range(order + 1)])

    return FrequencySymbol(jet, C.shape, exact_order=min(len(funcs) - 1, MAX_ORDER), domain=domain, name=name)


def memory_symbol(lam: float, C=None) -> FrequencySymbol:
    """Poisson-type symbol ``2 lam / (lam^2 + tau^2) * C`` of the kernel ``exp(-lam |t|) C``."""
    lam = float(lam)
    if lam <= 0:
        raise InvalidArgument("memory rate lambda must be positive")
    funcs = [
        lambda t: 2 * lam / (lam**2 + t**2),
        lambda t: -4 * lam * t / (lam**2 + t**2) ** 2,
        lambda t: 4 * lam * (3 * t**2 - lam**2) / (lam**2 + t**2) ** 3,
        lambda t: 48 * lam * t * (lam**2 - t**2) / (lam**2 + t**2) ** 4,
    ]
    return scalar_symbol(funcs, C, name=f"memory(lambda={lam:g})")


def jump_symbol(C=None) -> FrequencySymbol:
    """``sign(tau) * C``: smooth off the origin, with a jump at 0."""
    zero = lambda t: np.zeros_like(t)
    return scalar_symbol([np.sign, zero, zero, zero], C, domain=PUNCTURED, name="jump")


def _merge_domain(*symbols):
    return PUNCTURED if any(s.domain == PUNCTURED for s in symbols) else WHOLE


def add(*symbols: FrequencySymbol) -> FrequencySymbol:
    shape = symbols[0].shape
    if any(s.shape != shape for s in symbols):
        raise InvalidArgument("cannot add symbols of different shapes")

    def jet(tau, order):
        return sum(s.jet(tau, order) for s in symbols)

    return FrequencySymbol(jet, shape, exact_order=min(s.exact_order for s in symbols),
                           domain=_merge_domain(*symbols), name="+".join(s.name for s in symbols))


def leibniz(left: np.ndarray, right: np.ndarray, order: int) -> np.ndarray:
    """Jet of a matrix product from the jets of its factors."""
    out = np.zeros((order + 1,) + left.shape[1:-1] + right.shape[-1:], dtype=complex)
    for l in range(order + 1):
        for i in range(l + 1):
            out[l] += comb(l, i) * (left[i] @ right[l - i])
    return out


def multiply(left: FrequencySymbol, right: FrequencySymbol, name: str = "") -> FrequencySymbol:
    if left.shape[1] != right.shape[0]:
        raise InvalidArgument(f"incompatible symbol shapes {left.shape} @ {right.shape}")

    def jet(tau, order):
        return leibniz(left.jet(tau, order), right.jet(tau, order), order)

    return FrequencySymbol(jet, (left.shape[0], right.shape[1]),
                           exact_order=min(left.exact_order, right.exact_order),
                           domain=_merge_domain(left, right), name=name or f"{left.name}*{right.name}")


def scale(symbol: FrequencySymbol, factor: complex) -> FrequencySymbol:
    return FrequencySymbol(lambda tau, order: factor * symbol.jet(tau, order), symbol.shape,
                           exact_order=symbol.exact_order, domain=symbol.domain,
                           name=f"{factor}*{symbol.name}")


def inverse_jet(bj: np.ndarray, tau: np.ndarray, cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Jet of ``a = b^{-1}`` from the jet of ``b``.

    Uses ``-a' = a b' a`` and its differentiated forms for the second and third
    derivatives.  Raises :class:`SingularAtNode` at the first frequency where
    ``b`` is singular or its condition number exceeds ``cond_limit``.
    """
    order = bj.shape[0] - 1
    b = bj[0]
    finite = np.all(np.isfinite(b), axis=(-2, -1))
    cond = np.full(tau.shape, np.inf)
    if np.any(finite):
        cond[finite] = np.linalg.cond(b[finite])
    bad = ~(np.isfinite(cond) & (cond <= cond_limit))
    if np.any(bad):
        k = int(np.argmax(bad))
        raise SingularAtNode(tau[k], cond[k])
    a = np.linalg.inv(b)
    out = [a]
    if order >= 1:
        b1 = bj[1]
        a1 = -(a @ b1 @ a)
        out.append(a1)
    if order >= 2:
        b2 = bj[2]
        a2 = -(a1 @ b1 @ a + a @ b2 @ a + a @ b1 @ a1)
        out.append(a2)
    if order >= 3:
        b3 = bj[3]
        a3 = -(a2 @ b1 @ a + 2 * (a1 @ b2 @ a) + 2 * (a1 @ b1 @ a1)
               + a @ b3 @ a + 2 * (a @ b2 @ a1) + a @ b1 @ a2)
        out.append(a3)
    return np.stack(out)


def invert(symbol: FrequencySymbol, domain: str | None = None, name: str = "") -> FrequencySymbol:
    """Pointwise inverse with exact derivatives (see :func:`inverse_jet`)."""
    if symbol.shape[0] != symbol.shape[1]:
        raise InvalidArgument("only square symbols can be inverted")

    def jet(tau, order):
        return inverse_jet(symbol.jet(tau, order), tau)

    return FrequencySymbol(jet, symbol.shape, exact_order=symbol.exact_order,
                           domain=domain or symbol.domain, name=name or f"inv({symbol.name})")


def operator_norm(values: np.ndarray) -> np.ndarray:
    """Spectral norm of a stack of matrices (last two axes)."""
    if values.shape[-1] == 1 or values.shape[-2] == 1:
        return np.sqrt(np.sum(np.abs(values) ** 2, axis=(-2, -1)))
    return np.linalg.norm(values, ord=2, axis=(-2, -1))
