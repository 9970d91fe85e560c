"""Cone-shaped state reduction for a singlet measured at two spacelike sites.

A measures particle 1 and finds up; B measures particle 2 and finds down.
Each query event sees only the observations whose past cone it is not strictly inside.

Run: python demos/02_singlet_reduction.py
"""

import numpy as np

from hkreduce.collapse import Observation, effective_state
from hkreduce.hilbert import DOWN, UP, P, Projector, singlet
from hkreduce.spacetime import Boost, Event, boost

A = Event(0, -1, "A")
B = Event(0, 1, "B")
observations = [Observation(A, Projector(P(1), UP)), Observation(B, Projector(P(2), DOWN))]

queries = [Event(-3, 0, "deep past"), Event(-0.5, 0.8, "near B"), Event(-0.5, -0.8, "near A"), Event(0, 5, "far right")]

psi = singlet()
print("singlet amplitudes (P1 P2 = 00, 01, 10, 11):", np.round(psi.amplitudes.real, 4))
print()
for q in queries:
    rep = effective_state(psi, q, observations)
    ket = ", ".join(str(lab) for lab in rep.effective_ket.labels) or "scalar"
    print(f"{q.label:>10}: {rep.region.value:<14} ket over [{ket}]"
          f" amps {np.round(rep.effective_ket.amplitudes.real, 4)}  weight {rep.probability_weight:.3f}")

# the same classification in a fast-moving frame
print("\nboosted to v = 0.9:")
b9 = Boost(0.9)
boosted_obs = [Observation(boost(o.event, b9), o.projector) for o in observations]
for q in queries:
    rep = effective_state(psi, boost(q, b9), boosted_obs)
    print(f"{q.label:>10}: {rep.region.value}")
