"""Light cones in 1+1 dimensions and what a boost does (and does not) change.

Run: python demos/01_light_cones.py
"""

from hkreduce.spacetime import Boost, Event, boost, interval, relation

A = Event(0, -1, "A")
B = Event(0, 1, "B")
later = Event(3, 0, "C")

print("Two observers at equal times, two light-seconds apart.")
for a, b in [(A, B), (A, later), (later, B)]:
    print(f"  {a.label} -> {b.label}: s^2 = {interval(a, b):+.3f}  {relation(a, b).value}")

print("\nFrame dependence of time order for the spacelike pair A, B:")
for v in (-0.6, 0.0, 0.6):
    ab, bb = boost(A, Boost(v)), boost(B, Boost(v))
    first = "A" if ab.t < bb.t else ("B" if bb.t < ab.t else "neither")
    print(f"  v = {v:+.1f}: t_A = {ab.t:+.3f}, t_B = {bb.t:+.3f}, first = {first}, s^2 = {interval(ab, bb):+.3f}")

# the interval and the causal class never move, only the time order of spacelike events does
