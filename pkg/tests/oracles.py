"""Independent reference computations used by the tests."""
import numpy as np


def pencil_matrix(pencil, tau, lam=None, C=None):
    """``b(tau)`` assembled directly, memory kernel in closed form."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    b = (-(tau**2)[:, None, None] * pencil.P + 1j * tau[:, None, None] * pencil.B + pencil.A)
    if pencil.chat.kind == "memory":
        lam, C = pencil.chat.lam, pencil.chat.C
        b = b + (2 * lam / (lam**2 + tau**2))[:, None, None] * C
    return b


def _inverse_small(M):
    """Adjugate inverse for stacks of 1x1, 2x2 or 3x3 matrices (any complex dtype)."""
    n = M.shape[-1]
    if n == 1:
        return 1 / M
    if n == 2:
        a, b, c, d = M[..., 0, 0], M[..., 0, 1], M[..., 1, 0], M[..., 1, 1]
        det = a * d - b * c
        adj = np.stack([np.stack([d, -b], -1), np.stack([-c, a], -1)], -2)
        return adj / det[..., None, None]
    if n != 3:
        raise ValueError("extended-precision inverse implemented for n <= 3")
    cof = np.empty_like(M)
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = M[..., r[0], c[0]] * M[..., r[1], c[1]] - M[..., r[0], c[1]] * M[..., r[1], c[0]]
            cof[..., i, j] = (-1) ** (i + j) * minor
    det = np.sum(M[..., 0, :] * cof[..., 0, :], axis=-1)
    return np.swapaxes(cof, -1, -2) / det[..., None, None]


def solution_symbol_extended(pencil, x):
    """``b(x)^{-1}`` at one real ``x`` in long-double complex arithmetic."""
    x = np.longdouble(x)
    P, B, A = (np.asarray(M, dtype=np.clongdouble) for M in (pencil.P, pencil.B, pencil.A))
    b = -(x * x) * P + 1j * x * B + A
    if pencil.chat.kind == "memory":
        lam = np.longdouble(pencil.chat.lam)
        b = b + (2 * lam / (lam * lam + x * x)) * np.asarray(pencil.chat.C, dtype=np.clongdouble)
    return _inverse_small(b)


def _d1(fn, x, h):
    return (fn(x - 2 * h) - 8 * fn(x - h) + 8 * fn(x + h) - fn(x + 2 * h)) / (12 * h)


def _d2(fn, x, h):
    return (-fn(x - 2 * h) + 16 * fn(x - h) - 30 * fn(x) + 16 * fn(x + h) - fn(x + 2 * h)) / (12 * h * h)


def _d3(fn, x, h):
    return (-fn(x + 3 * h) + 8 * fn(x + 2 * h) - 13 * fn(x + h)
            + 13 * fn(x - h) - 8 * fn(x - 2 * h) + fn(x - 3 * h)) / (8 * h**3)


def richardson_derivative(fn, x, order, rel_step=3e-3):
    """Fourth-order central stencil with one Richardson step (error ~ h^6).

    ``fn`` may compute in extended precision; ``x`` and the step are then
    promoted so the stencil points are exact.
    """
    d = {1: _d1, 2: _d2, 3: _d3}[order]
    x = np.longdouble(x)
    h = np.longdouble(rel_step) * max(np.longdouble(1), abs(x))
    return (16 * d(fn, x, h / 2) - d(fn, x, h)) / 15
