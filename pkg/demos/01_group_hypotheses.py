#!/usr/bin/env python3
"""Rotation groups on the circle and the two hypotheses they must satisfy.

The workbench supports two concrete isometry groups: the dense subgroup of
U(1) generated by an irrational rotation, and finite cyclic rotation groups.
Both must grow polynomially in the word metric and obey a quantitative
Diophantine bound keeping orbits away from fixed points.  This script
measures both hypotheses and cross-checks the dense case against the
continued-fraction convergents of the rotation number.
"""

import numpy as np

from shiftindex import group_model as gm

# the golden-mean conjugate (sqrt(5)-1)/2: the "most irrational" rotation
golden = gm.GroupSpec(kind="dense-rotation", theta=gm.GOLDEN_CONJUGATE)
z4 = gm.GroupSpec(kind="finite-cyclic", order=4)

print("== word metric and growth ==")
for k in (0, 1, 5, 13):
    print(f"  |{k}| over generators ±1:", gm.word_length(k, golden))

counts, degree = gm.growth_census(golden, 32)
print(f"  Z census up to k=32: {counts[:8].tolist()} ... fitted degree {degree:.3f}")
counts4, degree4 = gm.growth_census(z4, 10)
print(f"  Z/4 census saturates: {counts4.tolist()} (degree {degree4:.3f})")

print("\n== Diophantine margins ==")
# for a rotation, dist(gx, x) is constant and fix(g) is empty, so the margin
# is (circle distance of the angle from 0) * |g|^N
for k in (1, 2, 3, 5, 8, 13):
    margin, ok = gm.diophantine_margin(golden, k, C=0.05, N=2.0)
    print(f"  k={k:3d}: margin {margin:10.4f}  satisfied: {ok}")

kmax = 10_000
worst_k, worst, ok = gm.diophantine_sweep(golden, kmax, C=0.05, N=2.0)
print(f"  sweep k <= {kmax}: worst margin {worst:.4f} at k={worst_k} (satisfied: {ok})")

# the worst k is always a continued-fraction convergent denominator: the
# Fibonacci numbers for the golden mean
dens = gm.convergent_denominators(golden.theta, kmax)
print(f"  convergent denominators (Fibonacci): {dens[:12]} ...")
oracle = min(gm.diophantine_margin(golden, q, 0.05, 2.0)[0] for q in dens)
print(f"  oracle minimum over convergents: {oracle:.4f}  (matches sweep: {np.isclose(oracle, worst)})")

print("\n== Haar averages over the closure group ==")
table = gm.conjugacy_table(golden, 4)
print("  constant 3.25     ->", gm.haar_average(lambda a: 3.25, 0, table))
print("  e^{i angle}       ->", abs(gm.haar_average(lambda a: np.exp(1j * a), 0, table)))
print("  cos^2(angle)      ->", gm.haar_average(lambda a: np.cos(a) ** 2, 0, table))

print("\n== fixed sets and the codifferential ==")
print("  fix(identity):", gm.fixed_set(0, golden).kind)
print("  fix(k=1):     ", gm.fixed_set(1, golden).kind)
act = gm.codifferential_action(1, golden)
print("  codifferential of the generator moves (xi=+1, x=0) to", act.on_cosphere(+1, 0.0))
