"""Solving (P u')' + B u' + A u + c * u = f and the convolution equation.

Run: python3 gallery/05_solver.py
"""
import numpy as np

from maxreg import Besov, ConvolutionSymbol, Grid, Lp, OperatorPencil
from maxreg.banks import band_limited_noise, standard_bank
from maxreg.frequency import constant_symbol
from maxreg.solver import regularity_sweep, solve, solve_convolution, strong_solution_check

grid = Grid(64.0, 4096)
rng = np.random.default_rng(1)

pencil = OperatorPencil(np.diag([2.0, 3.0]), [[1.0, 0.5], [0.0, 1.0]], np.eye(2),
                        ConvolutionSymbol.memory(1.0, [[0.3, 0.0], [0.1, 0.2]]))
f = band_limited_noise(grid, rng, 2, band=grid.nyquist / 2)
res = solve(pencil, f)
print(f"residual of the component identity: {res.residual_norm():.1e}")
print(f"worst node condition number: {res.condition.max():.2f}")
rep = strong_solution_check(res, pencil)
print(f"strong form residual {rep.residual_relative:.1e}, B u' vs component {rep.first_order_mismatch:.1e}, "
      f"(P u')' vs component {rep.second_order_mismatch:.1e}")

# empirical maximal regularity constants against the Plancherel bound
bank = standard_bank(grid, 2, seed=2, size=60)
l2, besov = regularity_sweep(pencil, [Lp(2.0), Besov(1.0, 1.0, Lp(2.0))], bank)
print(f"{'component':>14} {'L2 empirical':>13} {'L2 bound':>9} {'B^(1,1) emp.':>13}")
for k in ("solution", "second_order", "first_order", "zeroth", "convolution"):
    print(f"{k:>14} {l2.empirical[k]:13.4f} {l2.analytic_bound[k]:9.4f} {besov.empirical[k]:13.4f}")

# c * u = f with c_hat = i tau + 1
one = constant_symbol([[1.0]])
g = band_limited_noise(grid, rng, 1, band=10.0)
conv = solve_convolution(one, one, g)
print("convolution estimates:", {k: round(v, 4) for k, v in conv.estimates.items()})
