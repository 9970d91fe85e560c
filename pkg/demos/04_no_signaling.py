"""A's choice to measure does not show up in B's statistics; A's result does.

Run: python demos/04_no_signaling.py
"""

from hkreduce.hilbert import Basis
from hkreduce.nosignal import Strategy, exact_conditional_B, exact_marginal_B, run_trials, signaling_test

for s in [Strategy(True, Basis.Z), Strategy(False, Basis.Z), Strategy(True, Basis.X)]:
    m = exact_marginal_B(s)
    print(f"{s.describe():<28} P_B(up) = {m[0]:.3f}  P_B(down) = {m[1]:.3f}")

print("\nconditioned on A seeing up:", exact_conditional_B(0))

run = run_trials(Strategy(), 10_000, seed=42)
print(f"\n10^4 sampled trials: f(up, down) = {run.joint_frequency(0, 1):.4f}, f(up, up) = {run.joint_frequency(0, 0):.4f}")

rep = signaling_test(10_000, seed=42)
print(f"two-batch test: z = {rep.z:.3f}, pass = {rep.passed}")
