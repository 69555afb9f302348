"""Seeded Monte Carlo play of the audit game against the equilibrium policyholder.

Every repetition draws the policyholder's type, her claim decision (from the
equilibrium strategy), whether a breach occurs and, on a breach, each
insurer model's audit decision. Repetitions are reduced to per-leaf counts,
and all statistics are computed from those integer counts, so results do not
depend on chunking or on how many workers ran.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations

import numpy as np

from .equilibrium import InsurerStrategy, PbeSolution, Region, classify_region, solve_pbe
from .errors import CiagError, InvalidConfig, MixedSolutionError
from .game import LEAVES, N_LEAVES, Breach, GameParams, InsAction, PHAction, PHType, insurer_payoff_cents, policyholder_utility
from .rng import derive_seed, stream_key, uniforms
from .utility import LINEAR, UtilitySpec

DEFAULT_CHUNK = 1 << 16


class StrategyModel(str, enum.Enum):
    GT = "GT"
    ALWAYS_AUDIT = "(A,A)"
    NEVER_AUDIT = "(NA,NA)"
    AUDIT_ON_CLAIM = "(A,NA)"
    AUDIT_ON_NO_CLAIM = "(NA,A)"
    HALF_HALF = "(0.5A,0.5A)"
    HALF_ON_CLAIM = "(0.5A,NA)"

    @property
    def stream_id(self) -> int:
        """Stable RNG stream number; independent of which models are simulated."""
        return _MODEL_ORDER.index(self) + 1

    @classmethod
    def parse(cls, text: str) -> "StrategyModel":
        s = text.strip()
        key = s.replace(" ", "").upper()
        for m in cls:
            if key in (m.value.upper(), m.name, m.name.replace("_", "")):
                return m
        raise ValueError(f"unknown strategy model {text!r}")


_MODEL_ORDER = tuple(StrategyModel)
ALL_MODELS = _MODEL_ORDER

_FIXED = {
    StrategyModel.ALWAYS_AUDIT: InsurerStrategy(1.0, 1.0),
    StrategyModel.NEVER_AUDIT: InsurerStrategy(0.0, 0.0),
    StrategyModel.AUDIT_ON_CLAIM: InsurerStrategy(1.0, 0.0),
    StrategyModel.AUDIT_ON_NO_CLAIM: InsurerStrategy(0.0, 1.0),
    StrategyModel.HALF_HALF: InsurerStrategy(0.5, 0.5),
    StrategyModel.HALF_ON_CLAIM: InsurerStrategy(0.5, 0.0),
}


def insurer_strategy_for(model: StrategyModel, sol: PbeSolution) -> InsurerStrategy:
    if model is StrategyModel.GT:
        return sol.ins_strategy
    return _FIXED[model]


class Draw(enum.IntEnum):
    TYPE = 1
    CLAIM = 2
    BREACH = 3
    AUDIT = 4


# stream id of nature's draws when they are shared across models
SHARED_STREAM = 0


@dataclass(frozen=True)
class SimulationConfig:
    params: GameParams
    utility: UtilitySpec = LINEAR
    repetitions: int = 1000
    master_seed: int = 0
    models: tuple[StrategyModel, ...] = ALL_MODELS
    common_random_numbers: bool = True

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(StrategyModel(m) for m in self.models))

    def problems(self) -> list[str]:
        out = []
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            out.append(f"repetitions must be a positive integer, got {self.repetitions!r}")
        if not 0 <= self.master_seed < 1 << 64:
            out.append(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if not self.models:
            out.append("models must not be empty")
        if len(set(self.models)) != len(self.models):
            out.append("models must not contain duplicates")
        return out


@dataclass(frozen=True)
class ModelResult:
    model: StrategyModel
    ins_strategy: InsurerStrategy
    repetitions: int
    leaf_counts: tuple[int, ...]
    total_insurer_cents: int
    mean_insurer_payoff: float
    std_error: float
    mean_ph_secure_utility: float | None
    mean_ph_nonsecure_utility: float | None
    claims: int
    breaches: int
    audits: int
    denials: int


@dataclass(frozen=True)
class PairedDifference:
    """Per-repetition payoff difference ``first - second``."""

    first: StrategyModel
    second: StrategyModel
    total_cents: int
    mean: float
    std_error: float


@dataclass(frozen=True)
class SimulationSummary:
    config: SimulationConfig
    solution: PbeSolution
    results: dict[StrategyModel, ModelResult]
    differences: dict[tuple[StrategyModel, StrategyModel], PairedDifference] = field(repr=False)

    def difference(self, first: StrategyModel, second: StrategyModel) -> PairedDifference:
        if (first, second) in self.differences:
            return self.differences[first, second]
        d = self.differences[second, first]
        return PairedDifference(first, second, -d.total_cents, -d.mean, d.std_error)


def _mean_and_se(counts, values_cents, n):
    """Exact mean (USD) and standard error from a histogram of cent values."""
    s1 = sum(c * v for c, v in zip(counts, values_cents))
    s2 = sum(c * v * v for c, v in zip(counts, values_cents))
    mean = Fraction(s1, n) / 100
    if n < 2:
        return s1, float(mean), 0.0
    var = Fraction(n * s2 - s1 * s1, n * (n - 1)) / 10_000
    return s1, float(mean), math.sqrt(var / n)


_SECURE = np.array([lf.ph_type is PHType.SECURE for lf in LEAVES])
_CLAIMED = np.array([lf.ph_action is PHAction.CLAIM_DISCOUNT for lf in LEAVES])
_BREACHED = np.array([lf.breach is Breach.BREACH for lf in LEAVES])
_AUDITED = np.array([lf.ins_action is InsAction.AUDIT for lf in LEAVES])


def _simulate_chunk(start, stop, seed, crn, ph, strategies, params):
    """Leaf histograms (per model) and joint histograms (per model pair)."""
    idx = np.arange(start, stop, dtype=np.uint64)

    def nature(stream):
        secure = uniforms(stream_key(seed, stream, Draw.TYPE), idx) < params.prior
        u_claim = uniforms(stream_key(seed, stream, Draw.CLAIM), idx)
        claimed = np.where(secure, u_claim < ph.claim_prob_secure, u_claim < ph.claim_prob_nonsecure)
        u_breach = uniforms(stream_key(seed, stream, Draw.BREACH), idx)
        breached = np.where(secure, u_breach < params.breach_prob_invested, u_breach < params.breach_prob)
        return secure, claimed, breached

    shared = nature(SHARED_STREAM) if crn else None
    leaves = []
    for model, ins in strategies:
        secure, claimed, breached = shared if crn else nature(model.stream_id)
        u_audit = uniforms(stream_key(seed, model.stream_id, Draw.AUDIT), idx)
        audited = breached & np.where(claimed, u_audit < ins.audit_prob_given_cd, u_audit < ins.audit_prob_given_nc)
        outcome = np.where(breached, np.where(audited, 1, 2), 0)
        leaves.append((~secure).astype(np.int64) * 6 + (~claimed).astype(np.int64) * 3 + outcome)

    single = [np.bincount(lf, minlength=N_LEAVES) for lf in leaves]
    pairs = {
        (i, j): np.bincount(leaves[i] * N_LEAVES + leaves[j], minlength=N_LEAVES * N_LEAVES)
        for i, j in combinations(range(len(leaves)), 2)
    }
    return single, pairs


def run_simulation(config: SimulationConfig, *, workers: int = 1, chunk_size: int = DEFAULT_CHUNK) -> SimulationSummary:
    """Play ``config.repetitions`` independent rounds for every model.

    ``workers`` and ``chunk_size`` only affect speed; the summary is
    bit-identical for any choice.
    """
    problems = config.problems()
    if problems:
        raise InvalidConfig("; ".join(problems))
    params = config.params
    sol = solve_pbe(params, config.utility)
    strategies = [(m, insurer_strategy_for(m, sol)) for m in config.models]
    n = config.repetitions

    bounds = [(s, min(s + chunk_size, n)) for s in range(0, n, chunk_size)]
    job = lambda b: _simulate_chunk(b[0], b[1], config.master_seed, config.common_random_numbers,
                                    sol.ph_strategy, strategies, params)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, bounds))
    else:
        parts = [job(b) for b in bounds]

    k = len(strategies)
    single = [[0] * N_LEAVES for _ in range(k)]
    pairs = {key: [0] * (N_LEAVES * N_LEAVES) for key in combinations(range(k), 2)}
    for part_single, part_pairs in parts:
        for i in range(k):
            single[i] = [a + int(b) for a, b in zip(single[i], part_single[i])]
        for key, hist in part_pairs.items():
            pairs[key] = [a + int(b) for a, b in zip(pairs[key], hist)]

    ins_cents = [insurer_payoff_cents(lf, params) for lf in LEAVES]
    utils = [policyholder_utility(lf, params, config.utility) for lf in LEAVES]

    results = {}
    for (model, ins), counts in zip(strategies, single):
        total, mean, se = _mean_and_se(counts, ins_cents, n)
        n_secure = sum(c for c, s in zip(counts, _SECURE) if s)
        n_nonsecure = n - n_secure
        results[model] = ModelResult(
            model=model,
            ins_strategy=ins,
            repetitions=n,
            leaf_counts=tuple(counts),
            total_insurer_cents=total,
            mean_insurer_payoff=mean,
            std_error=se,
            mean_ph_secure_utility=_type_mean(counts, utils, _SECURE, n_secure),
            mean_ph_nonsecure_utility=_type_mean(counts, utils, ~_SECURE, n_nonsecure),
            claims=sum(c for c, m in zip(counts, _CLAIMED) if m),
            breaches=sum(c for c, m in zip(counts, _BREACHED) if m),
            audits=sum(c for c, m in zip(counts, _AUDITED) if m),
            denials=sum(c for c, m in zip(counts, _AUDITED & _CLAIMED & ~_SECURE) if m),
        )

    diff_values = [ins_cents[i] - ins_cents[j] for i in range(N_LEAVES) for j in range(N_LEAVES)]
    differences = {}
    for (i, j), hist in pairs.items():
        total, mean, se = _mean_and_se(hist, diff_values, n)
        first, second = strategies[i][0], strategies[j][0]
        differences[first, second] = PairedDifference(first, second, total, mean, se)

    return SimulationSummary(config=config, solution=sol, results=results, differences=differences)


def _type_mean(counts, utils, mask, n_type):
    if n_type == 0:
        return None
    return math.fsum(c * u for c, u, m in zip(counts, utils, mask) if m and c) / n_type


class SweepAxis(str, enum.Enum):
    AUDIT_COST = "audit-cost"
    DISCOUNT = "discount"
    LOSS = "loss"
    REPETITIONS = "repetitions"
    PRIOR = "prior"

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        key = text.strip().lower().replace("_", "-")
        aliases = {"auditcost": "audit-cost", "a": "audit-cost", "d": "discount", "l": "loss", "reps": "repetitions", "phi": "prior"}
        return cls(aliases.get(key, key))


_AXIS_FIELD = {
    SweepAxis.AUDIT_COST: "audit_cost",
    SweepAxis.DISCOUNT: "discount",
    SweepAxis.LOSS: "loss",
    SweepAxis.PRIOR: "prior",
}


@dataclass(frozen=True)
class SweepPoint:
    index: int
    value: float
    config: SimulationConfig
    region: Region | None
    summary: SimulationSummary | None
    error: str | None = None

    def gt_vs_never(self) -> PairedDifference | None:
        if self.summary is None:
            return None
        models = self.config.models
        if StrategyModel.GT not in models or StrategyModel.NEVER_AUDIT not in models:
            return None
        return self.summary.difference(StrategyModel.GT, StrategyModel.NEVER_AUDIT)


@dataclass(frozen=True)
class SweepTable:
    axis: SweepAxis
    points: tuple[SweepPoint, ...]


def point_config(base: SimulationConfig, axis: SweepAxis, value, index: int) -> SimulationConfig:
    seed = derive_seed(base.master_seed, index)
    if axis is SweepAxis.REPETITIONS:
        if float(value) != int(value):
            raise InvalidConfig(f"repetitions must be whole numbers, got {value}")
        return replace(base, repetitions=int(value), master_seed=seed)
    return replace(base, params=replace(base.params, **{_AXIS_FIELD[axis]: value}), master_seed=seed)


def sweep(base: SimulationConfig, axis: SweepAxis, values, *, workers: int = 1) -> SweepTable:
    """Re-solve and re-simulate the game at each axis value.

    A point whose game has no valid equilibrium (e.g. deterrence infeasible)
    is kept with its error message instead of aborting the sweep.
    """
    axis = SweepAxis(axis)
    values = list(values)
    if not values:
        raise InvalidConfig("sweep needs at least one axis value")
    points = []
    for i, value in enumerate(values):
        cfg = point_config(base, axis, value, i)
        region = None
        try:
            region = classify_region(cfg.params)[0]
            summary = run_simulation(cfg, workers=workers)
            points.append(SweepPoint(i, value, cfg, summary.solution.region, summary))
        except MixedSolutionError as exc:
            points.append(SweepPoint(i, value, cfg, exc.region or region, None, f"{type(exc).__name__}: {exc}"))
        except CiagError as exc:
            points.append(SweepPoint(i, value, cfg, None, None, f"{type(exc).__name__}: {exc}"))
    return SweepTable(axis, tuple(points))
