"""Dyadic filter bank, Besov and Triebel-Lizorkin norms, Bessel lifts.

Run: python3 gallery/03_littlewood_paley.py
"""
import numpy as np

from maxreg import (Besov, Grid, GridFunction, Lp, TriebelLizorkin, besov_norm, equiv_norm_report, lift,
                    triebel_lizorkin_norm)
from maxreg.banks import band_limited_noise
from maxreg.littlewood_paley import blocks, default_bank

grid = Grid(16 * np.pi, 4096)
bank = default_bank(grid)
print(f"filter bank: J={bank.J}, top band 2^(J+1) = {2 ** (bank.J + 1)} <= pi/h = {np.pi / grid.h:.1f}")

f = band_limited_noise(grid, np.random.default_rng(0), 1, band=2.0**bank.J)
B = blocks(bank, f)
print(f"reconstruction sum_j Delta_j f - f: {np.max(np.abs(B.sum(axis=0) - f.samples)):.1e}")
energy = [np.sqrt(grid.h * np.sum(np.abs(b) ** 2)) for b in B]
print("block L2 norms:", " ".join(f"{e:.3f}" for e in energy))

e2 = GridFunction.from_callable(grid, lambda t: np.exp(2j * t))
print(f"||e^(2it)||_B^(1,2) = {besov_norm(Besov(1.0, 2.0, Lp(2.0)), e2):.4f}, 2 sqrt(2T) = {2 * np.sqrt(2 * grid.T):.4f}")

for s in (-1.0, 0.0, 1.0, 2.0):
    b = besov_norm(Besov(s, 2.0, Lp(3.0)), f)
    t = triebel_lizorkin_norm(TriebelLizorkin(s, 3.0, Lp(3.0)), f)
    bq = besov_norm(Besov(s, 3.0, Lp(3.0)), f)
    print(f"s={s:>4}: B^(s,2)_L3 = {b:9.3f}  F^(s,3)_L3 = {t:9.3f}  B^(s,3)_L3 = {bq:9.3f}")

# the lift J^1 = (1 - d^2)^(1/2) trades one derivative of smoothness
print(f"J^1 e^(2it) / e^(2it) = {lift(e2, 1).samples[0, 0] / e2.samples[0, 0]:.6f} (sqrt 5 = {np.sqrt(5):.6f})")
r = equiv_norm_report(Besov(1.0, 1.0, Lp(2.0)), e2)
print(f"equivalent norm ratio for e^(2it): {r.ratio:.4f}")
