"""Announcement protocols driven to their common-knowledge fixed points.

Refinement is a function of the information structure alone, so protocols run
over all profiles simultaneously; a realized profile only selects which
block's values get reported.  The fixed point is detected on partition
equality, never on value coincidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ConnectivityError
from .knowledge import (
    OutcomeSpace,
    Partition,
    action_function,
    belief_function,
    is_common_knowledge,
    optimal_action_set,
    posterior_belief,
    validate_partitions,
)

PUBLIC_BELIEF = "public-belief"
PUBLIC_ACTION = "public-action"
PUBLIC_STATISTIC = "public-statistic"
NETWORK_BELIEF = "network-belief"

PROTOCOL_KINDS = (PUBLIC_BELIEF, PUBLIC_ACTION, PUBLIC_STATISTIC, NETWORK_BELIEF)


@dataclass(frozen=True)
class Digraph:
    """Directed communication graph; an edge (u, w) lets w hear u."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted(set(self.edges)))
        object.__setattr__(self, "edges", edges)
        for u, w in edges:
            if not (0 <= u < self.n and 0 <= w < self.n) or u == w:
                raise ValueError(f"invalid edge ({u}, {w})")

    def is_strongly_connected(self) -> bool:
        forward: dict[int, list[int]] = {u: [] for u in range(self.n)}
        backward: dict[int, list[int]] = {u: [] for u in range(self.n)}
        for u, w in self.edges:
            forward[u].append(w)
            backward[w].append(u)

        def reaches_all(adj) -> bool:
            seen = {0}
            stack = [0]
            while stack:
                for nxt in adj[stack.pop()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return len(seen) == self.n

        return reaches_all(forward) and reaches_all(backward)

    @staticmethod
    def ring(n: int) -> "Digraph":
        return Digraph(n, tuple((u, (u + 1) % n) for u in range(n)))


@dataclass
class ProtocolRound:
    announced: tuple[tuple[str, object], ...]
    block_counts: tuple[int, ...]


@dataclass
class ProtocolTrace:
    kind: str
    rounds: list[ProtocolRound] = field(default_factory=list)

    @property
    def rounds_to_fixed_point(self) -> int:
        return max(len(self.rounds) - 1, 0)

    def to_csv(self) -> str:
        """Row-per-round-per-agent CSV: round, agent, announced value, block count."""

        def fmt(value) -> str:
            if isinstance(value, frozenset):
                return "{" + " ".join(str(x) for x in sorted(value)) + "}"
            return str(value)

        lines = ["round,agent,announced,blocks"]
        for r, rnd in enumerate(self.rounds):
            values = dict(rnd.announced)
            for agent, blocks in enumerate(rnd.block_counts):
                label = str(agent)
                value = values.get(label, values.get("public", ""))
                lines.append(f"{r},{agent},{fmt(value)},{blocks}")
        return "\n".join(lines) + "\n"


@dataclass
class ProtocolResult:
    partitions: list[Partition]
    trace: ProtocolTrace
    beliefs: tuple[Fraction, ...] | None
    actions: tuple[frozenset, ...] | None
    beliefs_common_knowledge: bool
    actions_common_knowledge: bool

    @property
    def common_belief(self) -> Fraction:
        values = set(self.beliefs)
        if len(values) != 1:
            raise ValueError("beliefs did not agree at the fixed point")
        return values.pop()

    @property
    def common_action(self) -> frozenset:
        values = set(self.actions)
        if len(values) != 1:
            raise ValueError("actions did not agree at the fixed point")
        return values.pop()


def _public_round(space, partitions, value_fns):
    """One simultaneous announce-and-refine step; returns new partitions."""
    fns = list(value_fns.values())

    def heard(profile):
        return tuple(fn(profile) for fn in fns)

    return [p.refine_by_key(heard) for p in partitions]


def fixed_point_partitions(
    kind: str,
    space: OutcomeSpace,
    partitions: Sequence[Partition],
    profile=None,
    network: Digraph | None = None,
    max_rounds: int | None = None,
) -> tuple[list[Partition], ProtocolTrace]:
    """Iterate announce-then-refine until a full round changes nothing.

    Partitions over a finite profile set can only refine finitely often, so
    termination is guaranteed; ``max_rounds`` is an internal safety valve.
    """
    if kind not in PROTOCOL_KINDS:
        raise ValueError(f"unknown protocol kind {kind!r}")
    validate_partitions(space, partitions)
    if kind == NETWORK_BELIEF:
        if network is None:
            network = Digraph.ring(space.n)
        if network.n != space.n:
            raise ValueError("digraph size must match the agent count")
        if not network.is_strongly_connected():
            raise ConnectivityError("network protocol needs a strongly connected digraph")
    partitions = list(partitions)
    trace = ProtocolTrace(kind=kind)
    limit = max_rounds if max_rounds is not None else space.n * len(space.profiles) + 1
    for _ in range(limit):
        announced: list[tuple[str, object]] = []
        if kind in (PUBLIC_BELIEF, PUBLIC_ACTION):
            make = belief_function if kind == PUBLIC_BELIEF else action_function
            fns = {u: make(space, partitions[u]) for u in range(space.n)}
            new_partitions = _public_round(space, partitions, fns)
            if profile is not None:
                announced = [(str(u), fns[u](profile)) for u in range(space.n)]
        elif kind == PUBLIC_STATISTIC:
            beliefs = [belief_function(space, p) for p in partitions]

            def mean_belief(prof):
                return sum(b(prof) for b in beliefs) / space.n

            new_partitions = _public_round(space, partitions, {"public": mean_belief})
            if profile is not None:
                announced = [("public", mean_belief(profile))]
        else:
            new_partitions = list(partitions)
            for u, w in network.edges:
                fn = belief_function(space, new_partitions[u])
                new_partitions[w] = new_partitions[w].refine_by_key(fn)
            if profile is not None:
                announced = [
                    (str(u), posterior_belief(space, new_partitions[u].block_of(profile)))
                    for u in range(space.n)
                ]
        trace.rounds.append(
            ProtocolRound(
                announced=tuple(announced),
                block_counts=tuple(p.block_count for p in new_partitions),
            )
        )
        if new_partitions == partitions:
            return partitions, trace
        partitions = new_partitions
    raise AssertionError("protocol failed to reach a fixed point within the round limit")


def run_protocol(
    kind: str,
    space: OutcomeSpace,
    partitions: Sequence[Partition],
    profile,
    network: Digraph | None = None,
) -> ProtocolResult:
    """Run one protocol to its fixed point and report the realized outcome.

    At the fixed point of public-belief, all beliefs agree and are common
    knowledge; at the fixed point of public-action, all action sets agree and
    are common knowledge.  Both predicates are checked explicitly, never
    assumed.
    """
    if space.profile_weight(profile) == 0:
        raise ValueError(f"realized profile {profile!r} has zero weight")
    final, trace = fixed_point_partitions(kind, space, partitions, profile, network)
    beliefs = tuple(posterior_belief(space, p.block_of(profile)) for p in final)
    actions = tuple(optimal_action_set(b) for b in beliefs)
    belief_vars = [
        lambda block, s=space: posterior_belief(s, block) for _ in range(space.n)
    ]
    action_vars = [
        lambda block, s=space: optimal_action_set(posterior_belief(s, block))
        for _ in range(space.n)
    ]
    return ProtocolResult(
        partitions=final,
        trace=trace,
        beliefs=beliefs,
        actions=actions,
        beliefs_common_knowledge=is_common_knowledge(space, final, belief_vars),
        actions_common_knowledge=is_common_knowledge(space, final, action_vars),
    )
