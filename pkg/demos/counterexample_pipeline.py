"""The non-invariance counterexample chain, end to end.

A separated pair of rotated EPR states mixes into a state whose
squashed-type upper bound drops strictly below one pair, so no single
channel, efficient or not, can distill both members to the claimed rate.

Run:  python3 demos/counterexample_pipeline.py
"""

import numpy as np

from compent import greedy_packing, mixture, rotated_epr
from compent.harness import run_noninvariance_counterexample
from compent.measures import counterexample_eta_threshold, distillable_upper_via_squashed
from compent.states import binary_mixture_entropy, g2, h_star

print("== threshold scan: smallest eta with H*(eta) > 2(g2(sqrt(eps)) + m sqrt(eps)) ==")
for m, eps in ((1, 0.0), (1, 1e-4), (1, 1e-2), (2, 0.25)):
    eta = counterexample_eta_threshold(m, eps)
    print(f"m={m}, eps={eps:g}: eta = {eta}")

print("\n== full pipeline at (m=1, eps=1e-4) ==")
record = run_noninvariance_counterexample(1, 1e-4, seed=7)
d = record.details
print(f"threshold eta:        {d['threshold']}")
print(f"pair overlap |x|:     {d['overlap']:.6f}")
print(f"mixture entropy H[x]: {binary_mixture_entropy(d['overlap']):.6f}")
print(f"upper bound:          {record.lhs:.6f}  (must be < 1 - 1e-6)")
print(f"verdict:              {'pass' if record.passed else 'fail'}")

print("\n== the same chain by hand ==")
packing = greedy_packing(1, 0.06, seed=7, max_size=2)
u, v = packing.members
psi = mixture([rotated_epr(u, 1), rotated_epr(v, 1)], [0.5, 0.5])
bound = distillable_upper_via_squashed(psi, 1e-4)
x = abs(np.trace(u.conj().T @ v)) / 2
print(f"overlap {x:.6f}, H* floor at eta=0.06: {h_star(0.06):.6f}")
print(f"bound = (1 - H[x]/2 + g2(0.01)) / 0.99 = {bound:.6f} < 1")
print(f"g2(sqrt(eps)) = {g2(0.01):.6f}")
