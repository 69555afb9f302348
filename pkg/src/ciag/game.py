"""The audit game tree: parameters, the twelve leaves and their payoffs.

Money is held in whole cents. ``GameParams`` rounds every monetary field to
the nearest cent on construction, and leaf offsets are computed on integer
cents so payoff identities hold bit-exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from decimal import ROUND_HALF_EVEN, Decimal
from functools import cached_property
from typing import NamedTuple

from .utility import LINEAR, UtilitySpec

MONEY_FIELDS = ("audit_cost", "investment_cost", "discount", "loss", "premium", "wealth")
PROB_FIELDS = ("breach_prob", "breach_prob_invested", "prior")


def to_cents(amount) -> int:
    """Round a dollar amount to integer cents (half-even)."""
    if isinstance(amount, int):
        return amount * 100
    d = amount if isinstance(amount, Decimal) else Decimal(repr(float(amount)))
    return int((d * 100).to_integral_value(rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class GameParams:
    """One instance of the audit game. Monetary fields are USD."""

    audit_cost: float
    investment_cost: float
    discount: float
    loss: float
    premium: float
    wealth: float = 1_000_000.0
    breach_prob: float = 0.015
    breach_prob_invested: float = 0.003
    prior: float = 0.5

    def __post_init__(self):
        for name in MONEY_FIELDS:
            value = getattr(self, name)
            if isinstance(value, float) and not math.isfinite(value):
                continue  # reported by validate_params
            object.__setattr__(self, name, to_cents(value) / 100)
        for name in PROB_FIELDS:
            object.__setattr__(self, name, float(getattr(self, name)))

    @cached_property
    def cents(self) -> dict[str, int]:
        """Monetary fields as exact integer cents."""
        return {name: to_cents(getattr(self, name)) for name in MONEY_FIELDS}

    @cached_property
    def phi_star(self) -> float:
        """Audit threshold (l - a) / l, correctly rounded from integer cents."""
        c = self.cents
        return (c["loss"] - c["audit_cost"]) / c["loss"]

    def with_(self, **changes) -> "GameParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def calibrated_defaults(**overrides) -> GameParams:
    """Calibrated parameters: median breach loss, firewall cost and discount."""
    base = dict(
        audit_cost=5000.0,
        investment_cost=2960.0,
        discount=181.5,
        loss=170000.0,
        premium=3630.0,
        wealth=1_000_000.0,
        breach_prob=0.015,
        breach_prob_invested=0.003,
        prior=0.5,
    )
    base.update(overrides)
    return GameParams(**base)


class Violation(NamedTuple):
    rule: str
    fields: tuple[str, ...]
    detail: str

    def __str__(self):
        return f"{self.rule} ({self.detail})"


def validate_params(params: GameParams) -> list[Violation]:
    """Every violated model assumption; an empty list means valid."""
    out: list[Violation] = []
    finite = True
    for name in MONEY_FIELDS + PROB_FIELDS:
        v = getattr(params, name)
        if not math.isfinite(v):
            out.append(Violation(f"{name} finite", (name,), f"{name}={v}"))
            finite = False
    if not finite:
        return out

    for name in ("audit_cost", "investment_cost", "discount"):
        v = getattr(params, name)
        if v < 0:
            out.append(Violation(f"{name} >= 0", (name,), f"{name}={v}"))
    if params.loss <= 0:
        out.append(Violation("l > 0", ("loss",), f"loss={params.loss}"))
    if params.premium <= 0:
        out.append(Violation("p > 0", ("premium",), f"premium={params.premium}"))

    c = params.cents
    if not c["wealth"] > c["premium"]:
        out.append(Violation("W > p", ("wealth", "premium"), f"wealth={params.wealth}, premium={params.premium}"))
    if not c["premium"] > c["discount"]:
        out.append(Violation("p > d", ("premium", "discount"), f"premium={params.premium}, discount={params.discount}"))
    if not c["wealth"] - c["premium"] + c["discount"] > c["investment_cost"]:
        out.append(
            Violation(
                "W - p + d > c",
                ("wealth", "premium", "discount", "investment_cost"),
                f"W - p + d = {(c['wealth'] - c['premium'] + c['discount']) / 100}, c={params.investment_cost}",
            )
        )

    b, bs = params.breach_prob, params.breach_prob_invested
    if not 0 <= bs:
        out.append(Violation("0 ≤ β*", ("breach_prob_invested",), f"breach_prob_invested={bs}"))
    if not bs <= b:
        out.append(Violation("β* ≤ β", ("breach_prob_invested", "breach_prob"), f"β*={bs}, β={b}"))
    if not b <= 1:
        out.append(Violation("β ≤ 1", ("breach_prob",), f"breach_prob={b}"))
    if not 0 <= params.prior <= 1:
        out.append(Violation("0 ≤ φ ≤ 1", ("prior",), f"prior={params.prior}"))
    return out


class PHType(enum.IntEnum):
    SECURE = 0
    NON_SECURE = 1


class PHAction(enum.IntEnum):
    CLAIM_DISCOUNT = 0
    NO_CLAIM = 1


class Breach(enum.IntEnum):
    NO_BREACH = 0
    BREACH = 1


class InsAction(enum.IntEnum):
    AUDIT = 0
    NO_AUDIT = 1


@dataclass(frozen=True)
class Leaf:
    ph_type: PHType
    ph_action: PHAction
    breach: Breach
    ins_action: InsAction | None = field(default=None)

    def __post_init__(self):
        if (self.breach is Breach.BREACH) != (self.ins_action is not None):
            raise ValueError("the insurer moves if and only if there is a breach")

    @property
    def index(self) -> int:
        """Position in ``LEAVES``: type*6 + action*3 + outcome.

        Outcome is 0 for no breach, 1 for breach+audit, 2 for breach+no audit.
        """
        outcome = 0 if self.ins_action is None else 1 + int(self.ins_action)
        return int(self.ph_type) * 6 + int(self.ph_action) * 3 + outcome

    def __str__(self):
        parts = [
            "S" if self.ph_type is PHType.SECURE else "N",
            "CD" if self.ph_action is PHAction.CLAIM_DISCOUNT else "NC",
            "B" if self.breach is Breach.BREACH else "NB",
        ]
        if self.ins_action is not None:
            parts.append("A" if self.ins_action is InsAction.AUDIT else "NA")
        return ",".join(parts)


def _all_leaves() -> tuple[Leaf, ...]:
    leaves = []
    for t in PHType:
        for act in PHAction:
            leaves.append(Leaf(t, act, Breach.NO_BREACH))
            for ins in InsAction:
                leaves.append(Leaf(t, act, Breach.BREACH, ins))
    return tuple(leaves)


LEAVES: tuple[Leaf, ...] = _all_leaves()
N_LEAVES = len(LEAVES)


def leaf_net_offsets(leaf: Leaf, params: GameParams) -> tuple[int, int]:
    """Leaf labels of the game tree in integer cents.

    The policyholder's wealth is ``W - p + ph_offset`` and the insurer's
    payoff is ``p + ins_offset``.
    """
    c = params.cents
    a, inv, d, l = c["audit_cost"], c["investment_cost"], c["discount"], c["loss"]
    claimed = leaf.ph_action is PHAction.CLAIM_DISCOUNT
    secure = leaf.ph_type is PHType.SECURE
    breached = leaf.breach is Breach.BREACH
    audited = leaf.ins_action is InsAction.AUDIT

    ph = (d if claimed else 0) - (inv if secure else 0)
    ins = -d if claimed else 0
    if breached:
        denied = audited and claimed and not secure
        if denied:
            ph -= l
        else:
            ins -= l
        if audited:
            ins -= a
    return ph, ins


def policyholder_wealth(leaf: Leaf, params: GameParams) -> float:
    c = params.cents
    return (c["wealth"] - c["premium"] + leaf_net_offsets(leaf, params)[0]) / 100


def policyholder_utility(leaf: Leaf, params: GameParams, u: UtilitySpec = LINEAR) -> float:
    return u(policyholder_wealth(leaf, params))


def insurer_payoff_cents(leaf: Leaf, params: GameParams) -> int:
    return params.cents["premium"] + leaf_net_offsets(leaf, params)[1]


def insurer_payoff(leaf: Leaf, params: GameParams) -> float:
    """Insurer's (risk-neutral) payoff at a leaf, in USD."""
    return insurer_payoff_cents(leaf, params) / 100
