"""Independent checks on strategy profiles.

Expected payoffs are computed by enumerating every leaf with its reach
probability under the true chance measure (type-dependent breach
probabilities). Sequential rationality is checked by grid search under two
accountings:

* true measure: each player's ex-ante expected payoff from ``expected_payoffs``;
* closed-form accounting: the insurer compares infoset payoffs from
  ``cd_infoset_insurer_payoffs`` using the weight the closed-form derivation
  puts on the secure node, ``1 - (1 - phi) * q_N``. This equals the Bayes
  posterior whenever the non-secure type claims for sure, and makes the
  insurer exactly indifferent at the mixed equilibrium's ``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import (
    OFF_PATH,
    InsurerStrategy,
    PbeSolution,
    PolicyholderStrategy,
    cd_infoset_insurer_payoffs,
    posterior_beliefs,
)
from .errors import WrongRegion
from .game import LEAVES, Breach, GameParams, InsAction, PHAction, PHType, insurer_payoff, policyholder_utility
from .utility import LINEAR, UtilitySpec


@dataclass(frozen=True)
class StrategyProfile:
    ph: PolicyholderStrategy
    ins: InsurerStrategy

    @classmethod
    def of(cls, sol: PbeSolution) -> "StrategyProfile":
        return cls(sol.ph_strategy, sol.ins_strategy)


@dataclass(frozen=True)
class Gaps:
    """Best-response gaps of one accounting; the ``*_best`` fields are the maximisers."""

    ph_secure_gap: float
    ph_nonsecure_gap: float
    insurer_gap: float
    ph_secure_best: float
    ph_nonsecure_best: float
    insurer_best: tuple[float, float]

    @property
    def max_gap(self) -> float:
        return max(self.ph_secure_gap, self.ph_nonsecure_gap, self.insurer_gap)


@dataclass(frozen=True)
class DeviationReport:
    true_measure: Gaps
    closed_form: Gaps
    closed_form_cd_weight: float
    # CD-infoset gap using the normalised Bayes posterior; None when CD is off path
    posterior_cd_gap: float | None


def conditional_leaf_weights(secure: bool, q, x, y, params: GameParams):
    """Probability of each leaf given the policyholder's type.

    ``q`` is the type's claim probability and ``x``/``y`` the audit
    probabilities after CD/NC. Arguments broadcast, so arrays of alternatives
    give arrays of weights. Leaves of the other type get weight 0.
    """
    beta = params.breach_prob_invested if secure else params.breach_prob
    weights = []
    for leaf in LEAVES:
        if (leaf.ph_type is PHType.SECURE) != secure:
            weights.append(0.0)
            continue
        claimed = leaf.ph_action is PHAction.CLAIM_DISCOUNT
        w = q if claimed else 1 - q
        if leaf.breach is Breach.NO_BREACH:
            w = w * (1 - beta)
        else:
            audit = x if claimed else y
            w = w * beta * (audit if leaf.ins_action is InsAction.AUDIT else 1 - audit)
        weights.append(w)
    return weights


def _leaf_tables(params: GameParams, u: UtilitySpec):
    ins = [insurer_payoff(leaf, params) for leaf in LEAVES]
    ph = [policyholder_utility(leaf, params, u) for leaf in LEAVES]
    return ins, ph


def _dot(weights, values):
    return sum(w * v for w, v in zip(weights, values))


def expected_payoffs(
    profile: StrategyProfile, params: GameParams, u: UtilitySpec = LINEAR
) -> tuple[float, float, float]:
    """(E[U | secure], E[U | non-secure], insurer's ex-ante expected payoff)."""
    ins_pay, ph_util = _leaf_tables(params, u)
    x, y = profile.ins.audit_prob_given_cd, profile.ins.audit_prob_given_nc
    ws = conditional_leaf_weights(True, profile.ph.claim_prob_secure, x, y, params)
    wn = conditional_leaf_weights(False, profile.ph.claim_prob_nonsecure, x, y, params)
    phi = params.prior
    eu_ins = phi * _dot(ws, ins_pay) + (1 - phi) * _dot(wn, ins_pay)
    return float(_dot(ws, ph_util)), float(_dot(wn, ph_util)), float(eu_ins)


def closed_form_cd_weight(phi: float, ph: PolicyholderStrategy) -> float:
    return 1.0 - (1.0 - phi) * ph.claim_prob_nonsecure


def _best(values: np.ndarray, grid: np.ndarray, current: float):
    """Gap max(values ∪ {current}) - current and the grid point attaining it."""
    i = int(np.argmax(values))
    if values[i] <= current:
        return 0.0, None
    return float(values[i] - current), float(grid[i])


def deviation_gaps(
    profile: StrategyProfile, params: GameParams, u: UtilitySpec = LINEAR, grid_n: int = 101
) -> DeviationReport:
    """Unilateral best-response gaps over the grid {0, 1/(n-1), ..., 1}."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_n)
    ph, ins = profile.ph, profile.ins
    x, y = ins.audit_prob_given_cd, ins.audit_prob_given_nc
    eu_s, eu_n, eu_i = expected_payoffs(profile, params, u)
    ins_pay, ph_util = _leaf_tables(params, u)

    # policyholder: the type-conditional expectation is the same in both accountings
    alt_s = _dot(conditional_leaf_weights(True, grid, x, y, params), ph_util)
    alt_n = _dot(conditional_leaf_weights(False, grid, x, y, params), ph_util)
    gap_s, best_s = _best(np.asarray(alt_s), grid, eu_s)
    gap_n, best_n = _best(np.asarray(alt_n), grid, eu_n)

    gx, gy = np.meshgrid(grid, grid, indexing="ij")
    phi = params.prior
    alt_i = phi * _dot(conditional_leaf_weights(True, ph.claim_prob_secure, gx, gy, params), ins_pay) + (
        1 - phi
    ) * _dot(conditional_leaf_weights(False, ph.claim_prob_nonsecure, gx, gy, params), ins_pay)
    alt_i = np.asarray(alt_i)
    k = int(np.argmax(alt_i))
    i, j = np.unravel_index(k, alt_i.shape)
    if alt_i[i, j] > eu_i:
        true_gap, true_best = float(alt_i[i, j] - eu_i), (float(grid[i]), float(grid[j]))
    else:
        true_gap, true_best = 0.0, (x, y)

    w = closed_form_cd_weight(phi, ph)
    cd_gap, cd_best = _cd_gap(w, x, grid, params)
    nc_a, nc_na = params.premium - params.loss - params.audit_cost, params.premium - params.loss
    nc_gap, nc_best = _best(grid * nc_a + (1 - grid) * nc_na, grid, y * nc_a + (1 - y) * nc_na)

    mu = posterior_beliefs(phi, ph).mu
    posterior_gap = None if mu is OFF_PATH else _cd_gap(mu, x, grid, params)[0]

    def pick(best, fallback):
        return fallback if best is None else best

    return DeviationReport(
        true_measure=Gaps(gap_s, gap_n, true_gap, pick(best_s, ph.claim_prob_secure),
                          pick(best_n, ph.claim_prob_nonsecure), true_best),
        closed_form=Gaps(gap_s, gap_n, max(cd_gap, nc_gap), pick(best_s, ph.claim_prob_secure),
                   pick(best_n, ph.claim_prob_nonsecure), (pick(cd_best, x), pick(nc_best, y))),
        closed_form_cd_weight=w,
        posterior_cd_gap=posterior_gap,
    )


def _cd_gap(belief, x, grid, params):
    u_a, u_na = cd_infoset_insurer_payoffs(belief, params)
    return _best(grid * u_a + (1 - grid) * u_na, grid, x * u_a + (1 - x) * u_na)


def indifference_residuals(
    sol: PbeSolution, params: GameParams, u: UtilitySpec = LINEAR
) -> tuple[float, float]:
    """Residuals of the two indifference conditions of the mixed equilibrium.

    ``ph_residual`` is E[U | non-secure, CD] minus E[U | non-secure, NC] when the
    insurer audits claims with probability ``sol.theta`` and never audits NC.
    ``insurer_residual`` is ``delta (1 - phi) l - a``.
    """
    if not sol.region.is_mixed:
        raise WrongRegion(f"indifference residuals need the mixed equilibrium, got {sol.region.value}")
    c = params.cents
    base = (c["wealth"] - c["premium"]) / 100
    d, l, beta = params.discount, params.loss, params.breach_prob
    theta = sol.theta
    u_cd = beta * theta * u(base + d - l) + beta * (1 - theta) * u(base + d) + (1 - beta) * u(base + d)
    u_nc = u(base)
    return float(u_cd - u_nc), sol.delta * (1 - params.prior) * l - params.audit_cost


MONEY_TOL = 1e-9
UTIL_REL_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    """One line of a verification run; ``passed`` is None for report-only values."""

    name: str
    passed: bool | None
    value: float
    tol: float | None = None


def util_tol(params: GameParams, u: UtilitySpec = LINEAR) -> float:
    return UTIL_REL_TOL * max(1.0, abs(u(params.wealth)))


def verification_checks(sol: PbeSolution, params: GameParams, u: UtilitySpec = LINEAR, grid_n: int = 101) -> list[Check]:
    """Sequential-rationality and indifference checks for a solved game.

    Closed-form gaps and (for the mixed equilibrium) indifference residuals
    are asserted; true-measure gaps are reported only.
    """
    ut = util_tol(params, u)
    rep = deviation_gaps(StrategyProfile.of(sol), params, u, grid_n)
    checks = [
        Check("secure type always claims the discount", sol.ph_strategy.claim_prob_secure == 1.0,
              sol.ph_strategy.claim_prob_secure),
        Check("insurer never audits after no claim", sol.ins_strategy.audit_prob_given_nc == 0.0,
              sol.ins_strategy.audit_prob_given_nc),
        Check("closed-form gap, secure policyholder", rep.closed_form.ph_secure_gap <= ut, rep.closed_form.ph_secure_gap, ut),
        Check("closed-form gap, non-secure policyholder", rep.closed_form.ph_nonsecure_gap <= ut,
              rep.closed_form.ph_nonsecure_gap, ut),
        Check("closed-form gap, insurer", rep.closed_form.insurer_gap <= MONEY_TOL, rep.closed_form.insurer_gap, MONEY_TOL),
    ]
    if sol.region.is_mixed:
        ph_res, ins_res = indifference_residuals(sol, params, u)
        checks += [
            Check("indifference residual, non-secure policyholder", abs(ph_res) <= ut, ph_res, ut),
            Check("indifference residual, insurer", abs(ins_res) <= MONEY_TOL, ins_res, MONEY_TOL),
        ]
    checks += [
        Check("true-measure gap, insurer", None, rep.true_measure.insurer_gap),
        Check("true-measure gap, non-secure policyholder", None, rep.true_measure.ph_nonsecure_gap),
    ]
    if rep.posterior_cd_gap is not None:
        checks.append(Check("CD-infoset gap at Bayes posterior", None, rep.posterior_cd_gap))
    return checks
