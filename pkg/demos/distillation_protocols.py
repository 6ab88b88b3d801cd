"""Distillation witnesses: exact unrotation and a noisy purification round.

Run:  python3 demos/distillation_protocols.py
"""

import numpy as np

from compent import apply, bbpssw_round, epr_pairs, gate_count, unrotate_distillation
from compent.linalg import haar_unitary
from compent.measures import p_err_distill
from compent.states import bipartite_from_matrix, rotated_epr, tensor_states

rng = np.random.default_rng(11)

print("== unrotation: a Bob-local witness with zero error ==")
for m in (1, 2):
    u = haar_unitary(2 ** m, rng)
    witness = unrotate_distillation(u, m)
    err = p_err_distill(witness, rotated_epr(u, m), m)
    print(f"m={m}: p_err = {err:.3e}, gate count = {gate_count(witness)}")

print("\n== one recurrence round of two-pair purification ==")
phi = epr_pairs(1).matrix
circuit = bbpssw_round()
print("gate count:", gate_count(circuit))
for f in (0.9, 0.8, 0.7, 0.6):
    pair = bipartite_from_matrix(f * phi + (1 - f) * (np.eye(4) - phi) / 3.0, (1, 1))
    out = apply(circuit, tensor_states(pair, pair))
    channel_f = float(np.real(np.trace(out.matrix @ phi)))
    print(f"input pair fidelity {f:.2f} -> channel-output fidelity {channel_f:.4f} "
          "(success branch kept, failure branch reset to |00>)")

print("\nnote: the summed channel mixes the purified success branch with the")
print("failure reset, so the branch improvement is visible through the gap")
print("between the channel value and (1 - p_success) / 2.")
