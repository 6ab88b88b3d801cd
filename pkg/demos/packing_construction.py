"""Separated packings on the unitary group and the counting machinery.

Run:  python3 demos/packing_construction.py
"""

import numpy as np

from compent import (
    GateBudget,
    counting_ratio_log,
    epr_overlap,
    frobenius_distance,
    greedy_packing,
    net_cardinality_bounds,
    pauli_orbit,
    separation_check,
)
from compent.linalg import haar_unitary

rng = np.random.default_rng(2)

print("== overlap-distance identity ==")
u, v = haar_unitary(2, rng), haar_unitary(2, rng)
lhs = epr_overlap(u, v, 1).real
rhs = 1 - frobenius_distance(u, v) ** 2 / 4
print(f"Re<overlap> = {lhs:.12f}")
print(f"1 - d^2/4   = {rhs:.12f}   (residual {abs(lhs - rhs):.1e})")

print("\n== greedy packings at m=1 (members carry their full Pauli orbit) ==")
for eta in (0.1, 0.2, 0.3, 0.4, 0.5):
    p = greedy_packing(1, eta, seed=7)
    print(f"eta={eta:.1f}: {len(p):3d} members, separation check: {separation_check(p)}")
print("orbit size at m=1:", len(pauli_orbit(np.eye(2), 1)))
print("(above eta=1/2 the orbit overlap floor 1/2 blocks any second member)")

print("\n== minimal net cardinality bounds, log2 form ==")
b = net_cardinality_bounds(d=2, eta=0.5, c=1.0, big_c=1.0)
print(f"d=2, eta=0.5, c=C=1: log2 N = {b.log2_lower:.1f}  (N = {2 ** b.log2_lower:.0f})")
b = net_cardinality_bounds(d=4, eta=0.1, c=0.5, big_c=2.0)
print(f"d=4, eta=0.1, c=0.5, C=2: log2 N in [{b.log2_lower:.1f}, {b.log2_upper:.1f}]")

print("\n== counting ratio: efficient circuits vs packing size ==")
poly = GateBudget((0.0, 0.0, 1.0))  # lambda^2 gate budget
for lam, m in ((4, 1), (4, 2), (4, 3)):
    val = counting_ratio_log(poly, lam, m, 0.5)
    verdict = "efficient channels outnumbered" if val < 0 else "poly term dominates"
    print(f"lambda={lam}, m={m}: log2 ratio = {val:7.1f}  ({verdict})")
