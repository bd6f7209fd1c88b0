"""Maximal operator, Rubio de Francia iteration and Muckenhoupt weights.

Run: python3 gallery/02_maximal_and_weights.py
"""
import numpy as np

from maxreg import (Grid, GridFunction, Lp, MaximalConfig, ap_constant, build_weight, maximal, maximal_norm_bound,
                    norm, pointwise_A1_check, rubio_iterate)
from maxreg.banks import indicator

grid = Grid(64.0, 4096)
ind = indicator(grid, 0.0, 1.0)

# M 1_[0,1] decays like 1/t outside the support
M = maximal(ind, MaximalConfig.dense(grid.N)).samples[:, 0].real
for t in (2.0, 4.0, 16.0):
    print(f"M 1_[0,1]({t:>4}) = {M[grid.index_of(t)]:.4f}   1/t = {1 / t:.4f}")

for p in (1.5, 2.0, 3.0):
    kappa = maximal_norm_bound(Lp(p))
    ratio = norm(Lp(p), maximal(ind)) / norm(Lp(p), ind)
    print(f"p={p}: ||M f|| / ||f|| = {ratio:.3f} <= kappa = {kappa:.3f}")

# R g >= g, ||R g|| <= 2 ||g||, and R g is an A1 function
kappa = maximal_norm_bound(Lp(2.0))
R = rubio_iterate(ind, kappa)
print(f"||R f|| / ||f|| = {norm(Lp(2.0), R) / norm(Lp(2.0), ind):.3f} (<= 2)")
a1 = pointwise_A1_check(R, kappa)
print(f"pointwise A1: max M(Rf)/(Rf) = {a1.max_ratio:.3f}, bound 2 kappa = {2 * kappa}, ok={a1.ok}")

# the weight w = (R g)^(1-p) R' h sits in A_p with an explicit bound
w = build_weight(ind, ind, 2.0, Lp(2.0))
print(f"[w]_A2 = {ap_constant(w, 2.0):.3f}, bound {w.meta['ap_bound']:.1f}")
flat = build_weight(GridFunction(grid, np.ones(grid.N)), GridFunction(grid, np.ones(grid.N)), 2.0, Lp(2.0))
print(f"constant inputs give w = 1 up to {np.max(np.abs(flat.values - 1)):.1e}")
