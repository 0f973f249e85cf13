"""The scenario gallery: ways agreement can succeed or fail to aggregate.

Four constructions bracket the theory.  The flip family shows the 1/n
error rate is really attained by uncorrelated signals; the two-bit
combination shows agreement can be optimal yet far from full-information;
the committee shows common actions alone allow persistent herding; the
geometric-tail family shows how unbounded beliefs rule that out.
"""

from fractions import Fraction

from agreelab import (
    PUBLIC_ACTION,
    belief_range,
    flip_accuracy,
    geometric_tail_model,
    run_monte_carlo,
    senate,
    senate_exact_summary,
    uncorrelated_tight,
)

print("=== flip family: pairwise-independent signals, error ~ (3/4)/n ===")
print("  n     proxy accuracy p(n)   error 1-p(n)   error*(n-1)")
for n in (8, 16, 32, 64, 128, 256):
    p = float(flip_accuracy(n))
    print(f"  {n:<5d} {p:<21.6f} {1 - p:<14.6f} {(1 - p) * (n - 1):.4f}")
print("even with every signal revealed, the wrong action survives w.p. ~3/(4n)")

print("\n=== two-bit combination: agreement is optimal but not omniscient ===")
print("first bits hide the state in their parity; second bits form the flip")
print("family.  Revealing the second bits aggregates optimally (success p(n))")
print("while the pooled posterior over both bits is deterministic: an")
print("unbridgeable gap between agreement and full information.")

print("\n=== the committee: common actions without learning ===")
summary = senate_exact_summary(senate(200))
print(f"committee of 100 at accuracy 2/3, exact law of the common action:")
print(f"  success {float(summary.success):.6f}")
print(f"  tie     {float(summary.tie):.6f}")
print(f"  failure {float(summary.failure):.6f}")
for n in (200, 400, 800):
    s = senate_exact_summary(senate(n))
    print(f"  n={n}: failure {float(s.failure):.6f}  (independent of n)")
mc = run_monte_carlo(senate(400), PUBLIC_ACTION, 20_000, seed=42)
print(f"Monte Carlo at n=400: {mc.failures} failures in {mc.trials} trials")

print("\n=== geometric tails: beliefs reach toward 0 and 1 as K grows ===")
print("  K    min belief      max belief")
for depth in (1, 2, 4, 8, 12):
    low, high = belief_range(geometric_tail_model(depth, Fraction(7, 10)))
    print(f"  {depth:<4d} {float(low):<15.9f} {float(high):.9f}")
print("unbounded tails are what rules committee-style herding out")
