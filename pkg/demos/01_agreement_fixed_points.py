"""Tour of the announcement protocols on a two-agent coin-flip model.

Two agents each see a binary signal that matches the hidden state with
probability 2/3.  We drive the four protocols to their fixed points and
watch agreement emerge, then look at the parity construction where
agreement is instant because nobody can learn anything.
"""

from fractions import Fraction

from agreelab import (
    NETWORK_BELIEF,
    PUBLIC_ACTION,
    PUBLIC_BELIEF,
    PUBLIC_STATISTIC,
    Digraph,
    SignalModel,
    outcome_space_iid,
    own_signal_partitions,
    parity,
    pooled_posterior,
    run_protocol,
)

model = SignalModel.binary(Fraction(2, 3))
space = outcome_space_iid(model, 2)
realized = (1, 1)

print("=== two agents, both saw '1', state prior 50/50 ===")
print(f"pooled posterior (all signals): {pooled_posterior(space, realized)}")

for kind in (PUBLIC_BELIEF, PUBLIC_ACTION, PUBLIC_STATISTIC, NETWORK_BELIEF):
    result = run_protocol(
        kind,
        space,
        own_signal_partitions(space),
        realized,
        network=Digraph.ring(2) if kind == NETWORK_BELIEF else None,
    )
    print(f"\n--- {kind} ---")
    print(f"rounds of refinement: {result.trace.rounds_to_fixed_point}")
    print(f"final beliefs:        {[str(b) for b in result.beliefs]}")
    print(f"final action sets:    {[sorted(a) for a in result.actions]}")
    print(f"beliefs common knowledge: {result.beliefs_common_knowledge}")

print("\n=== round-by-round trace of the public-belief run ===")
result = run_protocol(PUBLIC_BELIEF, space, own_signal_partitions(space), realized)
print(result.trace.to_csv())

print("=== parity: agreement without communication ===")
scenario = parity(3)
space = scenario.outcome_space()
result = run_protocol(
    PUBLIC_BELIEF, space, scenario.initial_partitions(space), (1, 0, 1)
)
print(f"rounds of refinement: {result.trace.rounds_to_fixed_point}")
print(f"common belief:        {result.common_belief}  (the prior, forever)")
print(f"pooled posterior:     {pooled_posterior(space, (1, 0, 1))}  (certainty!)")
print("the signals jointly determine the state, yet no agent can act on it")
