"""
Two-qutrit entanglement and the sign of the spectator branch
============================================================

A stronger stage-A drive, Omega_A = (1 + sqrt 3) g_A, stops the Raman transfer
a third of the way: atom A ends in an equal superposition of staying in
``ga`` (no photon) and emitting into L or R. Atom B absorbs the photon in the
latter two branches only, so P'_1 (the ``|ga,g0>`` branch) stays at 1/3
through the whole second stage.

The absorption is half a Raman cycle and flips the sign of the two branches
it touches. The final state is therefore

    (-|ga,g0> + |gL,gR> + |gR,gL>) / sqrt(3)

and not the all-plus combination, whose overlap with it is only 1/9. Both
are maximally entangled qutrit states; they differ by a local phase on
atom A that a single-qubit rotation removes.
"""
import numpy as np

from bimodal_cqed import ProtocolConfig, overlap, run_protocol, target_state
from bimodal_cqed.propagator import PHOTON, populations
from bimodal_cqed.protocol import figure_labels

res = run_protocol(ProtocolConfig(variant="qutrit"))
s = res.schedule
print(f"Omega_A = {s.omega_a:.6f}, t1 = {s.t1:.9f} = 5 pi / (3 + sqrt 3)")

a = populations(res.stage_a_trajectory, figure_labels("qutrit", "A"))
print("stage A populations at t1:", np.round(a[:, -1], 9))
print("photon probability at t1:", round(populations(res.stage_a_trajectory, [PHOTON])[0, -1], 12))

b = populations(res.stage_b_trajectory, figure_labels("qutrit", "B"))
print("P'_1 during stage B: min %.12f  max %.12f" % (b[0].min(), b[0].max()))
print("final populations:", np.round(b[:, -1], 9))

final = res.final_state
space = final.space
for literal in (False, True):
    tgt = target_state(space, "qutrit", "B", literal=literal)
    name = "all-plus superposition" if literal else "signed target"
    print(f"|<{name}|final>|^2 = {abs(overlap(tgt, final)) ** 2:.12f}")

# the relative phase between the spectator and the transferred branches
amp = {lbl: final.amplitude(lbl) for lbl in [("ga", "g0", 0, 0), ("gL", "gR", 0, 0), ("gR", "gL", 0, 0)]}
ref = amp[("ga", "g0", 0, 0)]
for lbl, c in amp.items():
    print(lbl, "relative amplitude", np.round(c / ref, 9))
