"""Pencil symbols, their inverses and Mihlin / kernel certificates.

Run: python3 gallery/04_symbols_and_certificates.py
"""
import numpy as np

from maxreg import ConvolutionSymbol, Grid, OperatorPencil
from maxreg.frequency import memory_symbol
from maxreg.symbols import (companion_symbols, cz_constant, invert_symbol, kernel_from_symbol, mihlin_constant,
                            pencil_symbol)

grid = Grid(64.0, 4096)

# scalar 1 + i tau: the tilde-class constant of order 1 is (1 + sqrt 2)/2
scalar = OperatorPencil.scalar(A=1.0, B=1.0)
a = invert_symbol(pencil_symbol(scalar))
cert = mihlin_constant(a, 1, "M~")
print(f"[1/(1+it)] order 1 = {cert.constant:.6f}, (1+sqrt2)/2 = {(1 + np.sqrt(2)) / 2:.6f}")

# a 2x2 pencil with a memory term c(t) = exp(-|t|) C
pencil = OperatorPencil(np.diag([2.0, 3.0]), [[1.0, 0.5], [0.0, 1.0]], np.eye(2),
                        ConvolutionSymbol.memory(1.0, [[0.3, 0.0], [0.1, 0.2]]))
a = invert_symbol(pencil_symbol(pencil), grid=grid)
comp = companion_symbols(pencil, a)
for name, sym in (("a", a), ("a0", comp.a0), ("a1", comp.a1), ("c_hat a", comp.cconv)):
    c2 = mihlin_constant(sym, 2, "M~")
    c3 = mihlin_constant(sym, 3, "M")
    print(f"{name:>8}: tilde order 2 = {c2.constant:8.4f}   homogeneous order 3 = {c3.constant:8.4f}")

# the memory kernel exp(-|t|) and its Calderon-Zygmund constant 4/e^2
k = kernel_from_symbol(memory_symbol(1.0), grid, fold=64)
sel = np.abs(grid.t) <= grid.T / 2
print(f"memory kernel vs exp(-|t|): {np.max(np.abs(k.values[sel, 0, 0] - np.exp(-np.abs(grid.t[sel])))):.1e}")
print(f"cz constant = {cz_constant(k).constant:.4f}, 4/e^2 = {4 / np.e**2:.4f}")

ka = kernel_from_symbol(a, grid, fold=16)
print(f"solution kernel cz constant = {cz_constant(ka).constant:.4f}")
