"""Seeded sweeps and the verification report, end to end.

The harness samples (state, signals) from the prior, evaluates the
fixed-point action for each trial, and emits a CSV row per agent count
with the matching bounds attached.  Identical seeds reproduce output
byte for byte; the verification suite re-derives the headline claims.
"""

import time
from fractions import Fraction

from agreelab import default_verification_suite, sweep_n

print("=== sweep: accuracy-2/3 signals, pooled fixed point ===")
table = sweep_n(
    "iid_binary",
    n_values=(10, 20, 50, 100),
    trials=20_000,
    seed=2024,
    params={"p": Fraction(2, 3)},
)
print(table.to_csv())

print("=== sweep: flip family, watching error*(n-1) approach 3/4 ===")
table = sweep_n("uncorrelated_tight", n_values=(8, 16, 32, 64), trials=20_000, seed=7)
for row in table.rows:
    rate = row.summary.failure_rate
    print(f"  n={row.n:<4d} error {rate:.5f}   error*(n-1) {rate * (row.n - 1):.4f}")

print("\n=== the verification suite ===")
started = time.time()
report = default_verification_suite(seed=11, trials=8_000)
print(report.to_text())
print(f"(ran in {time.time() - started:.1f}s)")
