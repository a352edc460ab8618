"""Searching a code matrix for a large confusable list of rows.

The procedure grows an ensemble of equal-size row sets in phases.  Each
phase unions every member with a fresh random set drawn from the current
universe of rows, then inspects every still-effective ("good") column: if the
new ensemble misbehaves there (it is not a sampler for the reference
distribution, or some member's image strays too far from its expected
size) the column is declared bad.  A bad column is then neutralised by
shrinking the universe to the rows carrying that column's most frequent
symbol, so later phases can add at most that one symbol to any member's
image in that column.  After the last phase any member without a rainbow
column is a confusable list.

Ensemble sizes are a free parameter here: the sizes that make the
probabilistic argument go through are astronomically large, and are only
recorded in the transcript.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .core import (
    CodeMatrix,
    Ensemble,
    Phase,
    PhasedDistribution,
    _popcount,
    as_rows,
    most_frequent_symbol,
    restrict_universe,
)
from .coupon import NonpositivePhaseSize, ell_sequence, mu_cc, phase_sizes_g
from .sampler import (
    EXACT_Q_LIMIT,
    SamplerParams,
    check_sampler_exact,
    check_sampler_sampled,
    symbol_coverage,
)


class ParameterInfeasible(RuntimeError):
    """The attack cannot continue with these parameters."""

    def __init__(self, message: str, state: "AttackState | None" = None):
        super().__init__(message)
        self.state = state


class UniverseExhausted(ParameterInfeasible):
    pass


class InvariantViolation(AssertionError):
    pass


@dataclass
class AttackConfig:
    """Attack parameters.  ``None`` fields take the default schedule
    ``gamma = gamma' = q^(-2 eps) / 2``, ``delta' = q^(-5 eps) / 4``,
    ``delta = gamma^2``, evaluated at the matrix's ``q``."""

    epsilon: float = 0.1
    k: int = 3
    ensemble_size: int = 200
    seed: int = 0
    gamma: float | None = None
    gamma_prime: float | None = None
    delta: float | None = None
    delta_prime: float | None = None
    g_variant: str = "cumulative"
    num_wt: int = 256
    # smallest allowed delta_i * q; keeps exp(-delta_i q) <= 1/2 by default
    min_exponent: float = math.log(2)
    target: int | None = None
    phase_sizes: tuple[int, ...] | None = None

    def resolve(self, q: int) -> dict:
        eps = self.epsilon
        gamma = q ** (-2 * eps) / 2 if self.gamma is None else self.gamma
        gamma_p = q ** (-2 * eps) / 2 if self.gamma_prime is None else self.gamma_prime
        delta_p = q ** (-5 * eps) / 4 if self.delta_prime is None else self.delta_prime
        delta = gamma**2 if self.delta is None else self.delta
        schedule = all(v is None for v in (self.gamma, self.gamma_prime, self.delta, self.delta_prime))
        target = self.target if self.target is not None else math.floor(eps * q * math.log(q)) + 1
        return dict(
            gamma=gamma,
            gamma_prime=gamma_p,
            delta=delta,
            delta_prime=delta_p,
            default_schedule=schedule,
            target=target,
        )


@dataclass
class AttackState:
    iteration: int
    universe: np.ndarray
    good_columns: list[int]
    bad_columns: list[int]
    ensemble: Ensemble
    distribution: PhasedDistribution
    phase_sizes: list[int]
    log2_universe: list[float]
    transcript: list[dict] = field(default_factory=list)
    pruned_symbols: dict[int, int] = field(default_factory=dict)
    dropped: int = 0

    @property
    def list_size(self) -> int:
        return sum(self.phase_sizes)


@dataclass
class AttackOutcome:
    status: str  # "found" | "not-found" | "parameter-infeasible"
    list: list[int] | None
    verified: bool
    target: int
    transcript: list[dict]
    message: str = ""
    found_round: int | None = None
    best_verified_size: int = 0

    def __post_init__(self):
        if self.status == "found" and not self.verified:
            raise InvariantViolation("an unverified list cannot be reported as found")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ColumnVerdict:
    column: int
    expected_image: float
    max_deviation: float
    furthermore_ok: bool
    sampler_ok: bool
    failure_fraction: float
    threshold: float
    exact_sampler_check: bool

    @property
    def bad(self) -> bool:
        return not (self.furthermore_ok and self.sampler_ok)


@dataclass
class ComposeResult:
    ensemble: Ensemble
    distribution: PhasedDistribution
    verdicts: dict[int, ColumnVerdict]


def _derive(seed, *keys) -> list[int]:
    base = list(seed) if isinstance(seed, (list, tuple)) else [seed]
    return [int(v) for v in base] + list(keys)


def no_rainbow(C: CodeMatrix, rows) -> bool:
    """Direct check: no column shows all ``q`` symbols on ``rows``."""
    return bool(np.all(C.image_sizes(as_rows(rows)) <= C.q - 1))


def _fresh_set(rng, U: np.ndarray, exclude: np.ndarray, size: int) -> np.ndarray:
    """``size`` distinct rows drawn uniformly from ``U``, avoiding ``exclude``.

    Draws with replacement and redraws repeats.
    """
    taken = set(exclude.tolist())
    picked: list[int] = []
    while len(picked) < size:
        for r in U[rng.integers(0, len(U), size=2 * (size - len(picked)) + 4)].tolist():
            if r not in taken:
                taken.add(r)
                picked.append(r)
                if len(picked) == size:
                    break
    return np.array(picked, dtype=np.int64)


def compose(
    ensemble: Ensemble,
    D_base: PhasedDistribution,
    U,
    phase_size: int,
    s: int,
    params: SamplerParams,
    seed,
    C: CodeMatrix,
    h_set,
    num_wt: int = 256,
) -> ComposeResult:
    """One composition step.

    Draws ``s`` members of ``ensemble`` with replacement, pairs each with a
    fresh size-``phase_size`` set from ``U`` (disjoint from the member, so
    sizes add exactly), and judges every column in ``h_set`` against the
    reference ``D_base v uniform(U)^phase_size`` with deviation ``params.gamma``
    and exponent ``params.delta``.
    """
    U = as_rows(U)
    if s < 1:
        raise ValueError("s must be >= 1")
    if phase_size > len(U):
        raise UniverseExhausted(f"phase size {phase_size} exceeds universe size {len(U)}")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, ensemble.L, size=s)
    in_u = set(U.tolist())
    members = []
    for j in picks:
        R = ensemble[j]
        overlap = sum(1 for r in R.tolist() if r in in_u)
        if len(U) - overlap < phase_size:
            raise UniverseExhausted(
                f"only {len(U) - overlap} universe rows avoid a member; need {phase_size}"
            )
        members.append(np.concatenate([R, _fresh_set(rng, U, R, phase_size)]))
    composed = Ensemble(members)
    D = D_base.join(Phase.uniform(U, phase_size))

    q = C.q
    gamma_q = params.gamma * q
    sizes = composed.image_sizes(C)
    exact = (1 << q) - 2 <= num_wt and q <= EXACT_Q_LIMIT
    verdicts = {}
    for h in sorted(h_set):
        expected = float(symbol_coverage(h, D, C).sum())
        dev = float(np.max(np.abs(sizes[:, h] - expected)))
        if exact:
            rep = check_sampler_exact(composed, h, D, C, params)
        else:
            rep = check_sampler_sampled(composed, h, D, C, params, num_wt, _derive(seed, 7, h))
        verdicts[h] = ColumnVerdict(
            column=h,
            expected_image=expected,
            max_deviation=dev,
            furthermore_ok=dev <= gamma_q,
            sampler_ok=rep.is_sampler,
            failure_fraction=rep.max_failure_fraction,
            threshold=rep.threshold,
            exact_sampler_check=exact,
        )
    return ComposeResult(composed, D, verdicts)


def _check_no_completion(C: CodeMatrix, state: AttackState) -> np.ndarray:
    """Members (as a bool mask) whose image together with the universe stays
    below ``q`` in every bad column."""
    if not state.bad_columns:
        return np.ones(state.ensemble.L, dtype=bool)
    cols = np.array(state.bad_columns)
    u_mask = C.image_masks(state.universe)[cols]
    member_masks = state.ensemble.image_masks(C)[:, cols] | u_mask
    return np.all(_popcount(member_masks) <= C.q - 1, axis=1)


def prune(C: CodeMatrix, state: AttackState, bad) -> AttackState:
    """Neutralise ``bad`` columns, in ascending order, by shrinking the universe.

    Members that a pruned column could still complete to a rainbow are
    discarded and counted in ``dropped``.
    """
    bad = sorted(bad)
    if not set(bad) <= set(state.good_columns):
        raise ValueError("can only prune good columns")
    U = state.universe
    if len(U) == 0:
        raise UniverseExhausted("universe is empty", state)
    log_q = math.log2(C.q)
    pruned = dict(state.pruned_symbols)
    for h in bad:
        sym, count = most_frequent_symbol(C, h, U)
        newU = restrict_universe(C, h, U, sym)
        if len(newU) == 0:
            raise UniverseExhausted(f"universe emptied by column {h}", state)
        if math.log2(len(U)) - math.log2(len(newU)) > log_q + 1e-12:
            raise InvariantViolation(f"column {h} shrank the universe by more than a factor q")
        pruned[h] = sym
        U = newU
    bad_set = set(bad)
    new = replace(
        state,
        universe=U,
        good_columns=[h for h in state.good_columns if h not in bad_set],
        bad_columns=sorted(state.bad_columns + bad),
        pruned_symbols=pruned,
        log2_universe=state.log2_universe + [math.log2(len(U))],
    )
    keep = _check_no_completion(C, new)
    if not keep.all():
        if not keep.any():
            raise ParameterInfeasible("every ensemble member can complete a rainbow in a pruned column", new)
        new.ensemble = Ensemble([R for R, k in zip(new.ensemble, keep) if k])
    new.dropped = int((~keep).sum())
    return new


def initial_state(C: CodeMatrix) -> AttackState:
    return AttackState(
        iteration=0,
        universe=np.arange(C.m, dtype=np.int64),
        good_columns=list(range(C.n)),
        bad_columns=[],
        ensemble=Ensemble.singleton_empty(),
        distribution=PhasedDistribution(),
        phase_sizes=[],
        log2_universe=[math.log2(C.m)],
    )


def _schedule(C: CodeMatrix, config: AttackConfig, p: dict) -> list[int]:
    q, k = C.q, config.k
    if config.phase_sizes is not None:
        sizes = [int(g) for g in config.phase_sizes]
        if len(sizes) < k:
            raise ParameterInfeasible(f"{len(sizes)} phase sizes given for {k} rounds")
        if any(g < 1 for g in sizes[:k]):
            raise ParameterInfeasible("phase sizes must be positive")
        return sizes[:k]
    if q < 3:
        raise ParameterInfeasible("the phase schedule needs q >= 3")
    try:
        g, _ = phase_sizes_g(q, p["gamma"], k, config.g_variant)
    except NonpositivePhaseSize as exc:
        raise ParameterInfeasible(str(exc)) from exc
    sizes = [int(math.floor(v)) for v in g]
    for i, v in enumerate(sizes, start=1):
        if v < 1:
            raise ParameterInfeasible(f"phase size g_{i} floors to {v}")
    return sizes


def _union_schedule(C: CodeMatrix, config: AttackConfig, p: dict) -> list[int]:
    """Phase sizes when each phase's image is bounded separately:
    ``g_{i+1} = q - sum_j mu_cc(g_j) - (i+1) gamma q - 2``."""
    if config.phase_sizes is not None:
        return _schedule(C, config, p)
    q = C.q
    sizes = [q - 2]
    spent = mu_cc(q, q - 2)
    for i in range(1, config.k):
        v = math.floor(q - spent - (i + 1) * p["gamma"] * q - 2)
        if v < 1:
            raise ParameterInfeasible(f"phase size g_{i + 1} floors to {v}")
        sizes.append(v)
        spent += mu_cc(q, v)
    if sizes[0] < 1:
        raise ParameterInfeasible("q - 2 < 1")
    return sizes


def _assert_invariants(C: CodeMatrix, state: AttackState, total_bad: int) -> None:
    target = state.list_size
    sizes = state.ensemble.sizes()
    if not np.all(sizes == target):
        raise InvariantViolation(f"member sizes {set(sizes.tolist())} != {target}")
    if not _check_no_completion(C, state).all():
        raise InvariantViolation("a member can complete a rainbow in a bad column")
    floor = math.log2(C.m) - total_bad * math.log2(C.q)
    if state.log2_universe[-1] < floor - 1e-9:
        raise InvariantViolation("universe shrank faster than a factor q per bad column")


def _confusable(C: CodeMatrix, ensemble: Ensemble) -> np.ndarray:
    return np.all(ensemble.image_sizes(C) <= C.q - 1, axis=1)


def _run(C: CodeMatrix, config: AttackConfig, baseline: bool) -> AttackState:
    q = C.q
    p = config.resolve(q)
    sizes = _union_schedule(C, config, p) if baseline else _schedule(C, config, p)
    L = 1 if baseline else config.ensemble_size
    ell = ell_sequence(q, config.k).prefix
    state = initial_state(C)
    total_bad = 0
    for i in range(1, config.k + 1):
        g = sizes[i - 1]
        gamma_i = p["gamma"] + i * p["gamma_prime"]
        delta_in = p["delta"] - (i - 1) * p["delta_prime"]
        delta_i = p["delta"] - i * p["delta_prime"]
        clamped = delta_i * q < config.min_exponent
        exponent = max(delta_i * q, config.min_exponent)
        params = SamplerParams(gamma_i, exponent / q)
        t = g / q
        try:
            res = compose(
                state.ensemble,
                state.distribution,
                state.universe,
                g,
                L,
                params,
                [config.seed, i],
                C,
                state.good_columns,
                num_wt=config.num_wt,
            )
        except UniverseExhausted as exc:
            exc.state = state
            raise
        verdicts = res.verdicts
        if baseline:
            bad = [h for h, v in verdicts.items() if not v.furthermore_ok]
        else:
            bad = [h for h, v in verdicts.items() if v.bad]
        n_good_before = len(state.good_columns)
        state = replace(
            state,
            iteration=i,
            ensemble=res.ensemble,
            distribution=res.distribution,
            phase_sizes=state.phase_sizes + [g],
        )
        state = prune(C, state, bad)
        total_bad += len(bad)
        _assert_invariants(C, state, total_bad)
        conf = _confusable(C, state.ensemble)
        first_conf = int(np.argmax(conf)) if conf.any() else None
        devs = [v.max_deviation for v in verdicts.values()]
        fails = [v.failure_fraction for v in verdicts.values()]
        state.transcript = state.transcript + [
            dict(
                round=i,
                phase_size=g,
                list_size=state.list_size,
                coupon_target=float(ell[i - 1]),
                bookkeeping_floor=float(ell[i - 1] - 2 * i - i * i * p["gamma"] * q / 2),
                gamma_i=gamma_i,
                delta_i=delta_i,
                exponent_used=exponent,
                clamped=bool(clamped),
                vacuous=bool(delta_i <= 0),
                composition_hypotheses=bool(delta_in <= 2 * p["gamma_prime"] ** 2 / t and delta_in > p["delta_prime"]),
                prescribed_log_ensemble_size=(p["gamma"] ** 2 - i * p["delta_prime"]) * q,
                ensemble_size=len(state.ensemble),
                dropped_members=state.dropped,
                good_before=n_good_before,
                bad_new=bad,
                bad_total=total_bad,
                bad_fraction=len(bad) / n_good_before if n_good_before else 0.0,
                predicted_bad_fraction=min(1.0, 12 * math.exp(-p["delta_prime"] * q)),
                universe_size=len(state.universe),
                log2_universe=state.log2_universe[-1],
                log2_universe_floor=math.log2(C.m) - total_bad * math.log2(q),
                max_image_deviation=max(devs) if devs else 0.0,
                max_failure_fraction=max(fails) if fails else 0.0,
                confusable_members=int(conf.sum()),
                first_confusable=(state.ensemble[first_conf].tolist() if first_conf is not None else None),
            )
        ]
    return state


def iterate(C: CodeMatrix, config: AttackConfig) -> AttackState:
    """Run ``config.k`` compose-classify-prune rounds.

    Invariants checked after every round (violations raise
    :class:`InvariantViolation`): every member has size ``g_1 + ... + g_k``;
    no member together with the universe is rainbow in a bad column; the
    universe lost at most a factor ``q`` per bad column.
    """
    if config.g_variant not in ("cumulative", "as-written"):
        raise ValueError(f"unknown g_variant {config.g_variant!r}")
    return _run(C, config, baseline=False)


def extract_list(C: CodeMatrix, state: AttackState, target: int, exact_size: bool = False) -> AttackOutcome:
    """First ensemble member of size ``>= target`` with no rainbow column.

    Members are checked directly against every column.  With
    ``exact_size`` the list is cut to its first ``target`` rows (a subset of a
    confusable list is confusable).
    """
    best = _best_size(state.transcript)
    for R in state.ensemble:
        if len(R) >= target and no_rainbow(C, R):
            rows = R.tolist()
            rows = sorted(rows)[:target] if exact_size else sorted(rows)
            ok = no_rainbow(C, rows)
            return AttackOutcome(
                "found" if ok else "not-found",
                rows if ok else None,
                ok,
                target,
                state.transcript,
                found_round=state.iteration if ok else None,
                best_verified_size=max(best, len(R)),
            )
    return AttackOutcome("not-found", None, False, target, state.transcript, best_verified_size=best)


def _best_size(transcript) -> int:
    sizes = [t["list_size"] for t in transcript if t["confusable_members"] > 0]
    return max(sizes) if sizes else 0


def _drive(C: CodeMatrix, config: AttackConfig, baseline: bool) -> AttackOutcome:
    target = config.resolve(C.q)["target"]
    try:
        state = _run(C, config, baseline)
    except ParameterInfeasible as exc:
        transcript = exc.state.transcript if exc.state is not None else []
        return AttackOutcome(
            "parameter-infeasible",
            None,
            False,
            target,
            transcript,
            message=str(exc),
            best_verified_size=_best_size(transcript),
        )
    return extract_list(C, state, target)


def attack(C: CodeMatrix, config: AttackConfig) -> AttackOutcome:
    """Ensemble attack followed by list extraction at ``config``'s target."""
    return _drive(C, config, baseline=False)


def greedy_baseline(C: CodeMatrix, config: AttackConfig) -> AttackOutcome:
    """Single-set variant: one random set per phase, image-size test only.

    Phase sizes bound each phase's image separately,
    ``g_{i+1} = q - sum_j mu_cc(g_j) - (i+1) gamma q - 2``, unless
    ``config.phase_sizes`` is given.
    """
    return _drive(C, config, baseline=True)
