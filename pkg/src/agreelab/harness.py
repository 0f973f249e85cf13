"""Monte Carlo engine, exact evaluations, n-sweeps and verification reports.

Reproducibility contract: every trial draws from its own counter-based
stream, keyed by (seed, row, trial) through numpy's SeedSequence/Philox
machinery, so results do not depend on execution order or parallelism and
identical (config, seed) pairs produce byte-identical output files.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .bounds import (
    BoundReport,
    _count_vectors,
    _multinomial_coefficient,
    estimator_moments_by_counts,
    estimator_moments_enumerated,
    learning_bounds,
    qn_bound,
)
from .dynamics import PROTOCOL_KINDS, PUBLIC_ACTION, PUBLIC_BELIEF, fixed_point_partitions
from .errors import (
    AgreementLabError,
    BoundedBeliefsError,
    NonInformativeModelError,
)
from .knowledge import (
    ACTION_BOTH,
    ACTION_ONE,
    ACTION_ZERO,
    DEFAULT_ENUMERATION_BUDGET,
    belief_function,
    is_common_knowledge,
    optimal_action_set,
    pooled_posterior,
    posterior_belief,
)
from .scenarios import Scenario, SenateStaged, build_scenario
from .signals import SignalModel, belief_tail_cdf, noise_to_signal_ratio

RNG_VERSION = f"philox4x64/seedseq/numpy-{np.__version__}"

POOLED = "pooled"
MODES = (POOLED,) + PROTOCOL_KINDS


def trial_rng(seed: int, *path: int) -> np.random.Generator:
    """Counter-based per-trial generator, split by (seed, *path)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(seed=ss))


def csv_cell(value: str) -> str:
    """Quote a CSV field when it contains separators (RFC 4180)."""
    if any(ch in value for ch in (",", '"', "\n")):
        return '"' + value.replace('"', '""') + '"'
    return value


@dataclass
class TrialSummary:
    """Tally of one Monte Carlo run.

    ``successes`` counts trials whose reported action set was exactly the
    true state's singleton, ``ties`` the undecided {0,1} outcomes,
    ``failures`` the wrong singletons.  ``success_rate`` resolves ties with
    a fair coin from the trial's own stream, which is the operational
    "action equals the state" rate; ``msbe`` is the trial mean of
    (X - S)^2 where X is the run's belief summary (the common belief for
    belief protocols and the pooled shortcut, the mean agent belief for
    action protocols, the committee's belief for the staged committee).
    """

    scenario: str
    n: int
    mode: str
    trials: int
    successes: int
    ties: int
    failures: int
    success_rate: float
    stderr: float
    msbe: float
    seed: int
    rng: str = RNG_VERSION

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials

    @property
    def tie_rate(self) -> float:
        return self.ties / self.trials

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExactSummary:
    """Exact outcome law of a fixed-point action, no sampling involved."""

    success: Fraction
    tie: Fraction
    failure: Fraction
    msbe: Fraction

    @property
    def not_learned(self) -> Fraction:
        """Probability that the action set is not {S}, ties included."""
        return self.tie + self.failure


def _classify(label: frozenset, state: int, rng) -> tuple[str, bool]:
    """Bucket one trial; ties are resolved by a fair coin for the rate only."""
    if label == ACTION_BOTH:
        resolved = int(rng.integers(0, 2)) == state
        return "tie", resolved
    if label == (ACTION_ONE if state == 1 else ACTION_ZERO):
        return "success", True
    return "failure", False


def _protocol_outcome_table(scenario: Scenario, kind: str, budget: int) -> dict:
    """Run the exact engine once and tabulate the fixed point per profile.

    Refinement does not depend on the realized profile, so one run covers
    every trial; the table maps profile -> (reported action set, belief X).
    """
    space = scenario.outcome_space(budget=budget)
    partitions = scenario.initial_partitions(space)
    final, _ = fixed_point_partitions(kind, space, partitions)
    belief_fns = [belief_function(space, p) for p in final]
    relabel = getattr(scenario.structure, "trial_label", None)
    table = {}
    for profile in space.profiles:
        beliefs = [fn(profile) for fn in belief_fns]
        actions = {optimal_action_set(b) for b in beliefs}
        if len(actions) != 1:
            raise AgreementLabError(
                f"{scenario.name}: fixed point of {kind} left actions unequal "
                f"on profile {profile!r}"
            )
        common_action = actions.pop()
        if kind == PUBLIC_ACTION:
            x = sum(beliefs) / len(beliefs)
        else:
            unique = set(beliefs)
            if len(unique) != 1:
                raise AgreementLabError(
                    f"{scenario.name}: fixed point of {kind} left beliefs "
                    f"unequal on profile {profile!r}"
                )
            x = unique.pop()
        label = relabel(profile, common_action) if relabel else common_action
        table[profile] = (label, float(x))
    return table


def run_monte_carlo(
    scenario: Scenario,
    mode: str,
    trials: int,
    seed: int,
    row_key: tuple[int, ...] = (),
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> TrialSummary:
    """Sample (state, signals) from the prior and tally fixed-point actions.

    ``mode`` is either ``pooled`` (the full-information posterior stands in
    for the agreement outcome, which belief-announcement dynamics provably
    reach for conditionally independent signals) or a protocol kind, which
    runs the exact engine when the space is within budget.  The staged
    committee scenario additionally supports public-action at any size
    through its analytic fixed point.  Deterministic given the seed.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choices: {MODES}")

    if mode == POOLED:
        sampler = scenario.pooled_sampler()

        def outcome(rng):
            state, x, action = sampler(rng)
            return state, action, x

    elif (
        mode == PUBLIC_ACTION
        and isinstance(scenario.structure, SenateStaged)
        and scenario.structure.pair_count(scenario.n) > budget
    ):
        committee = scenario.structure
        analytic = committee.action_trial_sampler(scenario.n)

        def outcome(rng):
            state, committee_action, _common, tally = analytic(rng)
            return state, committee_action, float(committee.tally_posterior(tally))

    else:
        table = _protocol_outcome_table(scenario, mode, budget)
        profile_sampler = scenario.profile_sampler()

        def outcome(rng):
            state, profile = profile_sampler(rng)
            label, x = table[profile]
            return state, label, x

    successes = ties = failures = resolved_hits = 0
    msbe_total = 0.0
    for t in range(trials):
        rng = trial_rng(seed, *row_key, t)
        state, label, x = outcome(rng)
        bucket, hit = _classify(label, state, rng)
        if bucket == "success":
            successes += 1
        elif bucket == "tie":
            ties += 1
        else:
            failures += 1
        resolved_hits += 1 if hit else 0
        msbe_total += (float(x) - state) ** 2
    rate = resolved_hits / trials
    return TrialSummary(
        scenario=scenario.name,
        n=scenario.n,
        mode=mode,
        trials=trials,
        successes=successes,
        ties=ties,
        failures=failures,
        success_rate=rate,
        stderr=math.sqrt(rate * (1.0 - rate) / trials),
        msbe=msbe_total / trials,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# exact (sampling-free) evaluations
# ---------------------------------------------------------------------------


def exact_pooled_summary(model: SignalModel, n: int) -> ExactSummary:
    """Exact law of the pooled-posterior action for n i.i.d. signals.

    Enumerates symbol-count vectors, so the cost is polynomial in n; all
    arithmetic is rational, including the posterior itself.
    """
    support = model.support
    mu = {s: [model.weight(s, sym) for sym in support] for s in (0, 1)}
    ratios = [model.weight(1, sym) / model.weight(0, sym) for sym in support]
    success = tie = failure = Fraction(0)
    msbe = Fraction(0)
    for counts in _count_vectors(n, len(support)):
        coeff = _multinomial_coefficient(counts)
        odds = Fraction(1)
        for c, r in zip(counts, ratios):
            odds *= r**c
        x = odds / (1 + odds)
        action = optimal_action_set(x)
        for state in (0, 1):
            w = Fraction(coeff, 2)
            for c, p in zip(counts, mu[state]):
                w *= p**c
            if action == ACTION_BOTH:
                tie += w
            elif action == (ACTION_ONE if state == 1 else ACTION_ZERO):
                success += w
            else:
                failure += w
            msbe += w * (x - state) ** 2
    return ExactSummary(success=success, tie=tie, failure=failure, msbe=msbe)


def senate_exact_summary(scenario: Scenario) -> ExactSummary:
    """Exact law of the committee's fixed-point action, any agent count.

    The belief summary X is the committee's pooled posterior given its
    tally, which every agent ends up adopting.
    """
    structure = scenario.structure
    if not isinstance(structure, SenateStaged):
        raise TypeError("scenario is not a staged committee scenario")
    if not structure.deference_is_exact():
        raise AgreementLabError("agents would not defer to the committee")
    m, acc = structure.senate_size, structure.accuracy
    success = tie = failure = Fraction(0)
    msbe = Fraction(0)
    half = Fraction(m, 2)
    for k in range(m + 1):
        pmf = math.comb(m, k) * acc**k * (1 - acc) ** (m - k)
        x = structure.tally_posterior(k)
        # by state symmetry it suffices to condition on S=1
        msbe += pmf * (x - 1) ** 2
        if k > half:
            success += pmf
        elif k < half:
            failure += pmf
        else:
            tie += pmf
    return ExactSummary(success=success, tie=tie, failure=failure, msbe=msbe)


def binary_noise_to_signal_exact(accuracy) -> Fraction:
    """Closed-form noise-to-signal ratio 4p(1-p)/(2p-1)^2 of a symmetric
    binary model, exact."""
    p = Fraction(accuracy)
    return 4 * p * (1 - p) / (2 * p - 1) ** 2


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    n: int
    summary: TrialSummary
    bound_report: BoundReport | None
    qn: float | None


@dataclass
class SweepTable:
    family: str
    mode: str
    trials: int
    seed: int
    rows: list[SweepRow] = field(default_factory=list)
    rng: str = RNG_VERSION

    CSV_HEADER = (
        "n,trials,successes,ties,failures,success_rate,stderr,msbe,"
        "D,var_bound,action_bound,qn_bound,seed"
    )

    def to_csv(self) -> str:
        lines = [
            f"# generator={self.rng} family={self.family} mode={self.mode} seed={self.seed}",
            self.CSV_HEADER,
        ]
        for row in self.rows:
            s = row.summary
            b = row.bound_report
            cells = [
                str(row.n),
                str(s.trials),
                str(s.successes),
                str(s.ties),
                str(s.failures),
                repr(s.success_rate),
                repr(s.stderr),
                repr(s.msbe),
                repr(b.d) if b else "",
                repr(b.var_bound) if b else "",
                repr(b.action_bound) if b else "",
                repr(row.qn) if row.qn is not None else "",
                str(s.seed),
            ]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "mode": self.mode,
            "trials": self.trials,
            "seed": self.seed,
            "rng": self.rng,
            "rows": [
                {
                    "n": row.n,
                    "summary": row.summary.to_dict(),
                    "bounds": asdict(row.bound_report) if row.bound_report else None,
                    "qn_bound": row.qn,
                }
                for row in self.rows
            ],
        }


def sweep_n(
    family: str,
    n_values: Sequence[int],
    trials: int,
    seed: int,
    mode: str = POOLED,
    params: dict | None = None,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    eps_grid: Sequence[float] | None = None,
) -> SweepTable:
    """One Monte Carlo row per agent count, with bound columns attached.

    Rows draw from independent seed streams; the qn column is filled for
    families whose private beliefs have a lower tail on the grid and left
    blank otherwise.
    """
    params = dict(params or {})
    table = SweepTable(family=family, mode=mode, trials=trials, seed=seed)
    for i, n in enumerate(sorted(n_values)):
        scenario = build_scenario(family, n, **params)
        summary = run_monte_carlo(
            scenario, mode, trials, seed, row_key=(i,), budget=budget
        )
        model = scenario.marginal_model
        bound_report = None
        qn = None
        if model is not None:
            try:
                bound_report = learning_bounds(n, noise_to_signal_ratio(model))
            except NonInformativeModelError:
                bound_report = None
            try:
                qn = qn_bound(n, belief_tail_cdf(model, 0), eps_grid=eps_grid)
            except BoundedBeliefsError:
                qn = None
        table.rows.append(SweepRow(n=n, summary=summary, bound_report=bound_report, qn=qn))
    return table


# ---------------------------------------------------------------------------
# verification report
# ---------------------------------------------------------------------------

PASS = "pass"
FAIL = "fail"
VACUOUS = "vacuous"


@dataclass
class Check:
    """One named verification check carrying its margin, not a bare boolean."""

    name: str
    status: str
    observed: float
    bound: float
    tolerance: float
    margin: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    rng: str = RNG_VERSION

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(
                f"[{c.status.upper():7s}] {c.name}: observed={c.observed:.6g} "
                f"bound={c.bound:.6g} margin={c.margin:.3g}"
                + (f" ({c.detail})" if c.detail else "")
            )
        lines.append(
            f"{len(self.checks)} checks: "
            f"{sum(c.status == PASS for c in self.checks)} pass, "
            f"{len(self.failures)} fail, "
            f"{sum(c.status == VACUOUS for c in self.checks)} vacuous"
        )
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"rng": self.rng, "checks": [c.to_dict() for c in self.checks]}

    def to_csv(self) -> str:
        lines = [
            f"# generator={self.rng}",
            "name,status,observed,bound,tolerance,margin,detail",
        ]
        for c in self.checks:
            lines.append(
                f"{csv_cell(c.name)},{c.status},{c.observed!r},{c.bound!r},"
                f"{c.tolerance!r},{c.margin!r},{csv_cell(c.detail)}"
            )
        return "\n".join(lines) + "\n"


def verify_report(checks: Iterable[Check]) -> VerificationReport:
    """Assemble checks into a report; failures are content, not errors."""
    return VerificationReport(checks=list(checks))


def _bounded_check(name, observed, bound, tolerance=0.0, detail="", vacuous=False):
    observed = float(observed)
    bound = float(bound)
    margin = bound + tolerance - observed
    status = VACUOUS if vacuous else (PASS if margin >= 0 else FAIL)
    return Check(
        name=name,
        status=status,
        observed=observed,
        bound=bound,
        tolerance=tolerance,
        margin=margin,
        detail=detail,
    )


def agreement_identity_checks(
    scenarios: Sequence[Scenario], budget: int = DEFAULT_ENUMERATION_BUDGET
) -> list[Check]:
    """Common-knowledge beliefs must equal the pooled posterior, exactly.

    Runs the public-belief protocol on each scenario's exact space and
    counts profiles where the fixed-point common belief differs from the
    all-signals posterior, or where the fixed point fails the
    common-knowledge predicate.  Applies to conditionally i.i.d. scenarios.
    """
    checks = []
    for scenario in scenarios:
        space = scenario.outcome_space(budget=budget)
        partitions = scenario.initial_partitions(space)
        final, _ = fixed_point_partitions(PUBLIC_BELIEF, space, partitions)
        belief_fns = [belief_function(space, p) for p in final]
        mismatches = 0
        for profile in space.profiles:
            values = {fn(profile) for fn in belief_fns}
            if len(values) != 1 or values.pop() != pooled_posterior(space, profile):
                mismatches += 1
        ck = is_common_knowledge(
            space,
            final,
            [lambda block, s=space: posterior_belief(s, block)] * space.n,
        )
        checks.append(
            _bounded_check(
                name=f"belief-agreement-pools-signals[{scenario.name}]",
                observed=mismatches + (0 if ck else 1),
                bound=0.0,
                detail=f"{len(space.profiles)} profiles, common knowledge={ck}",
            )
        )
    return checks


def aggregate_bound_checks(
    label: str,
    d,
    rows: Sequence[tuple[int, ExactSummary]],
) -> list[Check]:
    """Exact wrong-action and belief-variance bounds for a given D.

    ``d`` may be a Fraction for end-to-end exact comparisons.  Rows whose
    action bound is non-positive are marked vacuous, never failed.
    """
    checks = []
    for n, summary in rows:
        err_bound = 4 * Fraction(d) / (n + Fraction(d))
        checks.append(
            _bounded_check(
                name=f"wrong-action-bound[{label}, n={n}]",
                observed=summary.not_learned,
                bound=err_bound,
                vacuous=err_bound >= 1,
                detail="exact action-error mass vs 4D/(n+D)",
            )
        )
        var_bound = Fraction(d) / (n + Fraction(d))
        checks.append(
            _bounded_check(
                name=f"belief-variance-bound[{label}, n={n}]",
                observed=summary.msbe,
                bound=var_bound,
                detail="exact E[(X-S)^2] vs D/(n+D)",
            )
        )
    return checks


def estimator_identity_checks(
    labelled_models: Sequence[tuple[str, SignalModel]],
    n_values: Sequence[int],
    tolerance: float = 1e-10,
) -> list[Check]:
    """Var(Y-S) = D/(4n), Cov(S,Y) = 1/4, Var(Y) = (1+D/n)/4 by enumeration."""
    checks = []
    for label, model in labelled_models:
        d = noise_to_signal_ratio(model)
        dev_var = dev_cov = dev_vary = 0.0
        for n in n_values:
            size = 2 * len(model.support) ** n
            moments = (
                estimator_moments_enumerated(model, n)
                if size <= 2**18
                else estimator_moments_by_counts(model, n)
            )
            dev_var = max(dev_var, abs(moments.var_y_minus_s - d / (4 * n)))
            dev_cov = max(dev_cov, abs(moments.cov_s_y - 0.25))
            dev_vary = max(dev_vary, abs(moments.var_y - 0.25 * (1 + d / n)))
        checks.append(
            _bounded_check(
                f"estimator-deviation-variance[{label}]", dev_var, 0.0, tolerance,
                detail=f"max |Var(Y-S) - D/4n| over n={list(n_values)}",
            )
        )
        checks.append(
            _bounded_check(
                f"estimator-state-covariance[{label}]", dev_cov, 0.0, tolerance,
                detail="max |Cov(S,Y) - 1/4|",
            )
        )
        checks.append(
            _bounded_check(
                f"estimator-variance[{label}]", dev_vary, 0.0, tolerance,
                detail="max |Var(Y) - (1+D/n)/4|",
            )
        )
    return checks


def tail_bound_checks(
    depth: int,
    ratio,
    n_values: Sequence[int],
    trials: int,
    seed: int,
    eps_grid: Sequence[float] | None = None,
) -> list[Check]:
    """Empirical wrong-action rate given S=0 against the lower-tail bound.

    Trials are conditioned on state 0; the empirical rate must stay below
    the bound plus three binomial standard errors, and must not increase
    with n beyond the same allowance.
    """
    from .scenarios import geometric_tail

    checks = []
    rates = []
    for i, n in enumerate(n_values):
        scenario = geometric_tail(n, depth=depth, ratio=ratio)
        model = scenario.marginal_model
        sampler = scenario.pooled_sampler()
        wrong = 0
        for t in range(trials):
            rng = trial_rng(seed, i, t)
            _state, _x, action = sampler(rng, force_state=0)
            if action != ACTION_ZERO:
                wrong += 1
        rate = wrong / trials
        sigma = math.sqrt(max(rate * (1 - rate), 1.0 / trials) / trials)
        bound = qn_bound(n, belief_tail_cdf(model, 0), eps_grid=eps_grid)
        rates.append((n, rate, sigma))
        checks.append(
            _bounded_check(
                f"tail-learning-bound[n={n}]",
                rate,
                bound,
                tolerance=3 * sigma,
                detail=f"empirical P(action != 0 | S=0), {trials} trials",
            )
        )
    worst_rise = 0.0
    for (n0, r0, s0), (n1, r1, s1) in zip(rates, rates[1:]):
        allowance = 3 * math.sqrt(s0 * s0 + s1 * s1)
        worst_rise = max(worst_rise, (r1 - r0) - allowance)
    checks.append(
        _bounded_check(
            "tail-learning-trend",
            worst_rise,
            0.0,
            detail="wrong-action rate non-increasing in n within 3 sigma",
        )
    )
    return checks


def example_invariant_checks(seed: int, trials: int) -> list[Check]:
    """Structural invariants of the example scenarios, mostly exact."""
    from .dynamics import run_protocol
    from .scenarios import parity, senate, uncorrelated_tight

    checks = []

    # parity: no refinement, common belief one half, pooled degenerate
    scenario = parity(3)
    space = scenario.outcome_space()
    result = run_protocol(
        PUBLIC_BELIEF, space, scenario.initial_partitions(space), space.profiles[0]
    )
    pooled_degenerate = all(
        pooled_posterior(space, p) in (0, 1) for p in space.profiles
    )
    parity_bad = (
        result.trace.rounds_to_fixed_point
        + (0 if result.common_belief == Fraction(1, 2) else 1)
        + (0 if pooled_degenerate else 1)
    )
    checks.append(
        _bounded_check(
            "parity-agreement-without-learning", parity_bad, 0.0,
            detail="0 refinement rounds, belief exactly 1/2, pooled degenerate",
        )
    )

    # flip family: exact decode law matches the announced accuracy
    scenario = uncorrelated_tight(8)
    space = scenario.outcome_space()
    q = scenario.metadata["q"]
    success = Fraction(0)
    for profile in space.profiles:
        x = pooled_posterior(space, profile)
        action = optimal_action_set(x)
        for state in (0, 1):
            w = space.weights.get((state, profile), Fraction(0))
            if action == (ACTION_ONE if state == 1 else ACTION_ZERO):
                success += w
    checks.append(
        _bounded_check(
            "flip-decode-law", abs(float(success - q)), 0.0, 1e-12,
            detail="exact pooled success probability equals the proxy accuracy",
        )
    )

    # committee: deference holds and the error law ignores the agent count
    summaries = {n: senate_exact_summary(senate(n)) for n in (200, 400, 800)}
    spread = max(
        abs(float(a.failure - b.failure))
        for a in summaries.values()
        for b in summaries.values()
    )
    checks.append(
        _bounded_check(
            "committee-error-ignores-population", spread, 0.0,
            detail="exact failure probability identical across n=200,400,800",
        )
    )
    return checks


def default_verification_suite(
    seed: int = 20240601, trials: int = 20_000
) -> VerificationReport:
    """The desk-scale suite behind the ``verify`` command."""
    from .scenarios import iid_binary

    checks: list[Check] = []
    checks += agreement_identity_checks(
        [iid_binary(2, Fraction(2, 3)), iid_binary(3, Fraction(2, 3))]
    )
    acc = Fraction(2, 3)
    d_exact = binary_noise_to_signal_exact(acc)
    model = SignalModel.binary(acc)
    rows = [(n, exact_pooled_summary(model, n)) for n in (10, 20, 50, 100, 200)]
    checks += aggregate_bound_checks("iid_binary(2/3)", d_exact, rows)
    checks += estimator_identity_checks(
        [("binary(2/3)", model), ("binary(0.6)", SignalModel.binary(Fraction(3, 5)))],
        n_values=(1, 2, 3, 5, 8),
    )
    checks += tail_bound_checks(
        depth=8,
        ratio=Fraction(7, 10),
        n_values=(10, 50, 250),
        trials=max(trials // 4, 1000),
        seed=seed,
    )
    checks += example_invariant_checks(seed=seed, trials=trials)
    return verify_report(checks)
