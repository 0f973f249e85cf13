"""How fast do agreeing agents learn?  The noise-to-signal ratio in action.

For conditionally uncorrelated signals the common belief X satisfies
Var(X - S) <= D/(n+D) and the common action is right with probability at
least 1 - 4D/(n+D), where D summarizes how noisy one signal is.  This
script evaluates D for a few models, checks the estimator identities that
drive the bound, and prints the bound next to the exact error law.
"""

from fractions import Fraction

from agreelab import (
    SignalModel,
    belief_tail_cdf,
    estimator_moments_enumerated,
    exact_pooled_summary,
    geometric_tail_model,
    noise_to_signal_ratio,
    learning_bounds,
    qn_bound,
    truncated_model,
)

print("=== noise-to-signal ratio D for a few signal models ===")
models = {
    "binary, accuracy 3/5": SignalModel.binary(Fraction(3, 5)),
    "binary, accuracy 2/3": SignalModel.binary(Fraction(2, 3)),
    "binary, accuracy 3/4": SignalModel.binary(Fraction(3, 4)),
    "geometric tail, K=6": geometric_tail_model(6, Fraction(7, 10)),
}
for label, model in models.items():
    print(f"  {label:24s} D = {noise_to_signal_ratio(model):.4f}")

print("\n=== the state estimator behind the bound (accuracy 2/3, D = 8) ===")
model = SignalModel.binary(Fraction(2, 3))
d = noise_to_signal_ratio(model)
print("  n   Var(Y-S)    D/(4n)      Cov(S,Y)   Var(Y)     (1+D/n)/4")
for n in (1, 2, 4, 8):
    m = estimator_moments_enumerated(model, n)
    print(
        f"  {n:<3d} {m.var_y_minus_s:<11.6f} {d / (4 * n):<11.6f} "
        f"{m.cov_s_y:<10.6f} {m.var_y:<10.6f} {0.25 * (1 + d / n):<10.6f}"
    )

print("\n=== bound versus the exact pooled error, accuracy 2/3 ===")
print("  n    error P(L != {S})   bound 4D/(n+D)   Var(X-S)   bound D/(n+D)")
for n in (10, 20, 50, 100, 200):
    summary = exact_pooled_summary(model, n)
    report = learning_bounds(n, d)
    flag = "" if report.action_bound > 0 else "   (vacuous)"
    print(
        f"  {n:<4d} {float(summary.not_learned):<19.6f} "
        f"{4 * report.var_bound:<16.6f} {float(summary.msbe):<10.6f} "
        f"{report.var_bound:.6f}{flag}"
    )

print("\n=== tail bound for unbounded beliefs (geometric tail, K=12) ===")
tail_model = geometric_tail_model(12, Fraction(7, 10))
cdf = belief_tail_cdf(tail_model, 0)
print("  n      bound on P(wrong action | S=0)")
for n in (10, 100, 1000, 10000):
    print(f"  {n:<6d} {qn_bound(n, cdf):.5f}")

print("\n=== censoring strong signals keeps the machinery finite ===")
cut = truncated_model(tail_model, threshold=6.5)
print(f"full model: {len(tail_model.alphabet)} symbols, D = {noise_to_signal_ratio(tail_model):.4f}")
print(f"censored at |z| < 6.5: {len(cut.alphabet)} symbols, D = {noise_to_signal_ratio(cut):.4f}")
