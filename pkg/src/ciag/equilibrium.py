"""Beliefs, thresholds and the perfect Bayesian equilibria of the audit game.

The solution space splits on two comparisons, ``l`` vs ``a`` and ``l`` vs
``d``, and then on the prior against the audit threshold
``phi_star = (l - a) / l``::

    l <= a                      PBE1   (CD,CD), (NA,NA)
    l > a, l >= d, phi > phi*   PBE2   (CD,CD), (NA,NA)
    l > a, l >= d, phi <= phi*  PBE3   P_N claims w.p. delta, audit CD w.p. theta
    l > a, l < d,  phi > phi*   PBE4   (CD,CD), (NA,NA)
    l > a, l < d,  phi <= phi*  PBE5   (CD,CD), (A,NA)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DeterrenceInfeasible, InvalidParamsError, PriorDegenerate, RegionMismatch, UtilityDomainError
from .game import GameParams, validate_params
from .utility import LINEAR, UtilitySpec

# delta is allowed to exceed one by this much (floating-point noise at phi == phi*)
_DELTA_SLACK = 1e-12


class _OffPath:
    """Belief at an information set that the strategy profile never reaches."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OffPath"

    def __reduce__(self):
        return (_OffPath, ())


OFF_PATH = _OffPath()


class Region(str, enum.Enum):
    PBE1 = "PBE1"
    PBE2 = "PBE2"
    PBE3_MIXED = "PBE3_Mixed"
    PBE4 = "PBE4"
    PBE5 = "PBE5"

    @property
    def is_mixed(self) -> bool:
        return self is Region.PBE3_MIXED


def _check_prob(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class PolicyholderStrategy:
    """Probability of claiming the discount, per type."""

    claim_prob_secure: float
    claim_prob_nonsecure: float

    def __post_init__(self):
        _check_prob("claim_prob_secure", self.claim_prob_secure)
        _check_prob("claim_prob_nonsecure", self.claim_prob_nonsecure)

    def claim_prob(self, secure: bool) -> float:
        return self.claim_prob_secure if secure else self.claim_prob_nonsecure


@dataclass(frozen=True)
class InsurerStrategy:
    """Probability of auditing a breach, per observed policyholder action."""

    audit_prob_given_cd: float
    audit_prob_given_nc: float

    def __post_init__(self):
        _check_prob("audit_prob_given_cd", self.audit_prob_given_cd)
        _check_prob("audit_prob_given_nc", self.audit_prob_given_nc)

    def audit_prob(self, claimed: bool) -> float:
        return self.audit_prob_given_cd if claimed else self.audit_prob_given_nc


@dataclass(frozen=True)
class Beliefs:
    """Pr(secure | CD) and Pr(secure | NC); ``OFF_PATH`` where undefined."""

    mu: float | _OffPath
    lam: float | _OffPath


@dataclass(frozen=True)
class PbeSolution:
    region: Region
    ph_strategy: PolicyholderStrategy
    ins_strategy: InsurerStrategy
    beliefs: Beliefs
    phi_star: float
    theta: float | None = None
    delta: float | None = None
    notes: tuple[str, ...] = ()


def audit_threshold(params: GameParams) -> float:
    """phi* = (l - a) / l. Non-positive when a >= l (auditing never pays)."""
    return params.phi_star


def posterior_beliefs(phi: float, ph: PolicyholderStrategy) -> Beliefs:
    _check_prob("phi", phi)
    qs, qn = ph.claim_prob_secure, ph.claim_prob_nonsecure

    def bayes(ws, wn):
        total = ws + wn
        return OFF_PATH if total == 0 else ws / total

    return Beliefs(
        mu=bayes(phi * qs, (1 - phi) * qn),
        lam=bayes(phi * (1 - qs), (1 - phi) * (1 - qn)),
    )


def mixed_solution(params: GameParams, u: UtilitySpec = LINEAR) -> tuple[float, float, Beliefs]:
    """Closed-form (theta, delta) of the mixed equilibrium and its beliefs.

    ``delta = a / ((1 - phi) l)`` makes the insurer indifferent and
    ``theta = (U(W-p+d) - U(W-p)) / (beta (U(W-p+d) - U(W-p+d-l)))`` makes the
    non-secure policyholder indifferent.

    Raises:
        PriorDegenerate: phi == 1.
        DeterrenceInfeasible: theta > 1, or beta == 0 so no audit rate deters.
        RegionMismatch: delta > 1, i.e. phi > phi*.
        UtilityDomainError: ``u`` is undefined or numerically flat on the
            reachable wealth values.
    """
    phi = params.prior
    if phi >= 1:
        raise PriorDegenerate("prior is 1: claim-mixing probability a/((1-phi) l) is undefined")
    c = params.cents
    delta = c["audit_cost"] / ((1 - phi) * c["loss"])
    if phi == params.phi_star:
        delta = 1.0  # exact at the boundary; the division above can land an ulp short
    if delta > 1:
        if delta - 1 > _DELTA_SLACK:
            raise RegionMismatch(f"delta = {delta:.6g} > 1: prior {phi} exceeds the audit threshold {params.phi_star:.6g}")
        delta = 1.0

    base = (c["wealth"] - c["premium"]) / 100
    d, l = params.discount, params.loss
    u_cd, u_nc, u_denied = u(base + d), u(base), u(base + d - l)
    if params.breach_prob <= 0:
        raise DeterrenceInfeasible("breach probability is 0: audits never happen, nothing deters a false claim")
    if not (u_denied < u_cd and u_nc <= u_cd):
        raise UtilityDomainError(f"utility {u} is not strictly increasing on reachable wealth (saturated?)")
    theta = (u_cd - u_nc) / (params.breach_prob * (u_cd - u_denied))
    if theta > 1:
        raise DeterrenceInfeasible(f"theta = {theta:.6g} > 1: even auditing every claim cannot deter misrepresentation")
    return theta, delta, posterior_beliefs(phi, PolicyholderStrategy(1.0, delta))


def cd_infoset_insurer_payoffs(belief_mu: float, params: GameParams) -> tuple[float, float]:
    """Insurer's (audit, no-audit) payoffs after a breach on a discount claim."""
    _check_prob("belief_mu", belief_mu)
    p, d, l, a = params.premium, params.discount, params.loss, params.audit_cost
    return p - belief_mu * l - d - a, p - d - l


def classify_region(params: GameParams) -> tuple[Region, tuple[str, ...]]:
    """Region of the solution space, with notes on any boundary ties."""
    c = params.cents
    l, a, d = c["loss"], c["audit_cost"], c["discount"]
    notes = []
    if l <= a:
        if l == a:
            notes.append("l == a: audit saves exactly its cost; tie broken toward not auditing")
        return Region.PBE1, tuple(notes)

    phi, phi_star = params.prior, params.phi_star
    at_threshold = phi == phi_star
    if l == d:
        notes.append("l == d: denied non-secure claimant is indifferent; treated as deterrable (l > d)")
    if at_threshold:
        notes.append("phi == phi*: boundary assigned to the audit-relevant side")
    if l >= d:
        region = Region.PBE3_MIXED if phi <= phi_star else Region.PBE2
    else:
        region = Region.PBE5 if phi <= phi_star else Region.PBE4
    return region, tuple(notes)


_ALWAYS_CLAIM = PolicyholderStrategy(1.0, 1.0)
_NEVER_AUDIT = InsurerStrategy(0.0, 0.0)
_AUDIT_CLAIMS = InsurerStrategy(1.0, 0.0)


def solve_pbe(params: GameParams, u: UtilitySpec = LINEAR) -> PbeSolution:
    """Classify the game and return its equilibrium.

    Raises:
        InvalidParamsError: the parameters violate a model assumption.
        MixedSolutionError: only in the mixed region (see ``mixed_solution``);
            the exception's ``region`` attribute is set.
    """
    violations = validate_params(params)
    if violations:
        raise InvalidParamsError(violations)

    region, notes = classify_region(params)
    phi_star = params.phi_star

    if region is Region.PBE3_MIXED:
        try:
            theta, delta, beliefs = mixed_solution(params, u)
        except (PriorDegenerate, DeterrenceInfeasible, RegionMismatch) as exc:
            exc.region = region
            raise
        if delta == 1.0:
            notes += ("delta == 1: non-secure type always claims; NC is off path",)
        return PbeSolution(
            region=region,
            ph_strategy=PolicyholderStrategy(1.0, delta),
            ins_strategy=InsurerStrategy(theta, 0.0),
            beliefs=beliefs,
            phi_star=phi_star,
            theta=theta,
            delta=delta,
            notes=notes,
        )

    ins = _AUDIT_CLAIMS if region is Region.PBE5 else _NEVER_AUDIT
    return PbeSolution(
        region=region,
        ph_strategy=_ALWAYS_CLAIM,
        ins_strategy=ins,
        beliefs=posterior_beliefs(params.prior, _ALWAYS_CLAIM),
        phi_star=phi_star,
        notes=notes,
    )

