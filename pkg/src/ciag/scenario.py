"""Scenario documents: flat ``key: value`` text (or a JSON object).

Recognised keys::

    audit_cost, investment_cost, loss, premium, wealth       USD
    discount | discount_pct                                  USD, or % of premium
    breach_prob                                              probability
    breach_prob_invested | effectiveness_pct                 probability, or % reduction of breach_prob
    prior                                                    probability
    utility                                                  linear | log(shift) | cara(alpha) | power(gamma)
    repetitions, seed                                        integers
    models                                                   comma-separated, e.g. GT, (A,NA)
    common_random_numbers                                    true/false
    axis, values, out                                        optional sweep axis, values and output path

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

import numpy as np

from .errors import ParseError, UtilityDomainError, ValidationError
from .game import LEAVES, GameParams, policyholder_wealth, to_cents, validate_params
from .montecarlo import ALL_MODELS, SimulationConfig, StrategyModel, SweepAxis
from .utility import LINEAR, UtilitySpec

KEYS = (
    "audit_cost", "investment_cost", "discount", "discount_pct", "loss", "premium", "wealth",
    "breach_prob", "breach_prob_invested", "effectiveness_pct", "prior", "utility",
    "repetitions", "seed", "models", "common_random_numbers", "axis", "values", "out",
)
REQUIRED = (
    ("audit_cost",), ("investment_cost",), ("discount", "discount_pct"), ("loss",),
    ("premium",), ("breach_prob",), ("breach_prob_invested", "effectiveness_pct"),
)
EXCLUSIVE = (("discount", "discount_pct"), ("breach_prob_invested", "effectiveness_pct"))

DEFAULT_VALUES_POINTS = 11

PRESETS: dict[str, dict[str, str]] = {
    "paper-default": {
        "loss": "170000",
        "breach_prob": "0.015",
        "breach_prob_invested": "0.003",
        "investment_cost": "2960",
        "premium": "3630",
        "audit_cost": "5000",
        "discount": "181.5",
    },
}


@dataclass(frozen=True)
class Scenario:
    params: GameParams
    utility: UtilitySpec = LINEAR
    repetitions: int = 1000
    seed: int = 0
    models: tuple[StrategyModel, ...] = ALL_MODELS
    common_random_numbers: bool = True
    axis: SweepAxis | None = None
    values: tuple[float, ...] | None = None
    out: str | None = None

    def to_config(self) -> SimulationConfig:
        return SimulationConfig(
            params=self.params,
            utility=self.utility,
            repetitions=self.repetitions,
            master_seed=self.seed,
            models=self.models,
            common_random_numbers=self.common_random_numbers,
        )


def _split_lines(text: str) -> dict[str, tuple[str, int]]:
    raw: dict[str, tuple[str, int]] = {}
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno) from exc
        if not isinstance(doc, dict):
            raise ParseError("JSON scenario must be an object")
        for key, value in doc.items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            raw[key] = (str(value), None)
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            key, sep, value = body.partition(":")
            if not sep:
                raise ParseError("expected 'key: value'", line=lineno)
            key = key.strip()
            if key in raw:
                raise ParseError("duplicate key", line=lineno, key=key)
            raw[key] = (value.strip(), lineno)
    return raw


def _number(raw, key) -> Decimal:
    value, lineno = raw[key]
    try:
        d = Decimal(value.replace("_", ""))
    except InvalidOperation:
        raise ParseError(f"not a number: {value!r}", line=lineno, key=key) from None
    if not d.is_finite():
        raise ParseError(f"not a finite number: {value!r}", line=lineno, key=key)
    return d


def _integer(raw, key) -> int:
    d = _number(raw, key)
    if d != d.to_integral_value():
        raise ParseError(f"not an integer: {raw[key][0]!r}", line=raw[key][1], key=key)
    return int(d)


def _boolean(raw, key) -> bool:
    value, lineno = raw[key]
    v = value.strip().lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise ParseError(f"not a boolean: {value!r}", line=lineno, key=key)


def _models(text: str) -> list[str]:
    """Split a model list on commas that are not inside parentheses."""
    return [m.strip() for m in re.findall(r"(?:\([^)]*\)|[^,])+", text) if m.strip()]


def parse_values(text: str) -> tuple[float, ...]:
    """Axis values: ``1,2,3``, ``lo..hi`` (11 points) or ``lo..hi:n``."""
    text = text.strip()
    m = re.fullmatch(r"([^.:,]+(?:\.\d*)?)\.\.([^:,]+)(?::(\d+))?", text)
    if m:
        lo, hi = float(m.group(1)), float(m.group(2))
        n = int(m.group(3)) if m.group(3) else DEFAULT_VALUES_POINTS
        if n < 2:
            raise ValueError("a range needs at least 2 points")
        return tuple(float(v) for v in np.linspace(lo, hi, n))
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ValueError(f"bad value list {text!r}") from None
    if not values:
        raise ValueError("empty value list")
    return values


def _check_layer(layer):
    for key, (_, lineno) in layer.items():
        if key not in KEYS:
            raise ParseError("unknown key", line=lineno, key=key)
    for a, b in EXCLUSIVE:
        if a in layer and b in layer:
            raise ParseError(f"conflicts with {b!r}", line=layer[a][1], key=a)


def _utility_problems(params: GameParams, utility: UtilitySpec) -> list[str]:
    """The utility must be defined and strictly increasing on every leaf's wealth."""
    wealth = sorted({policyholder_wealth(leaf, params) for leaf in LEAVES})
    try:
        values = [utility(w) for w in wealth]
    except UtilityDomainError as exc:
        return [f"utility {utility} undefined on reachable wealth: {exc}"]
    if any(lo >= hi for lo, hi in zip(values, values[1:])):
        return [f"utility {utility} is numerically flat on reachable wealth [{wealth[0]}, {wealth[-1]}]"]
    return []


def parse_scenario(text: str, base: dict[str, str] | None = None, overrides: dict[str, str] | None = None) -> Scenario:
    """Parse and fully validate a scenario.

    ``base`` supplies raw ``key -> value`` defaults (e.g. a preset) that the
    document overrides, and ``overrides`` (e.g. from the command line) win over
    both. A percentage key in a later layer replaces the corresponding absolute
    key from an earlier one and vice versa.

    Raises:
        ParseError: malformed text, unknown key, conflicting keys, bad number.
        ValidationError: missing required key or invalid game parameters.
    """
    layers = [
        {k: (str(v), None) for k, v in (base or {}).items()},
        _split_lines(text),
        {k: (str(v), None) for k, v in (overrides or {}).items()},
    ]
    raw: dict[str, tuple[str, int | None]] = {}
    for layer in layers:
        _check_layer(layer)
        for pair in EXCLUSIVE:
            if any(k in layer for k in pair):
                for k in pair:
                    raw.pop(k, None)
        raw.update(layer)

    missing = [" or ".join(alts) for alts in REQUIRED if not any(k in raw for k in alts)]
    if missing:
        raise ValidationError([f"missing required key: {m}" for m in missing])

    money = {}
    for key in ("audit_cost", "investment_cost", "loss", "premium", "wealth"):
        if key in raw:
            money[key] = _number(raw, key)
    money.setdefault("wealth", Decimal(1_000_000))
    if "discount_pct" in raw:
        money["discount"] = money["premium"] * _number(raw, "discount_pct") / 100
    else:
        money["discount"] = _number(raw, "discount")

    beta = float(_number(raw, "breach_prob"))
    if "effectiveness_pct" in raw:
        beta_inv = (1 - float(_number(raw, "effectiveness_pct")) / 100) * beta
    else:
        beta_inv = float(_number(raw, "breach_prob_invested"))

    params = GameParams(
        **{k: to_cents(v) / 100 for k, v in money.items()},
        breach_prob=beta,
        breach_prob_invested=beta_inv,
        prior=float(_number(raw, "prior")) if "prior" in raw else 0.5,
    )
    problems = [f"{v} [{', '.join(v.fields)}]" for v in validate_params(params)]

    utility = LINEAR
    if "utility" in raw:
        try:
            utility = UtilitySpec.parse(raw["utility"][0])
        except ValueError as exc:
            raise ParseError(str(exc), line=raw["utility"][1], key="utility") from None

    models = ALL_MODELS
    if "models" in raw:
        try:
            models = tuple(StrategyModel.parse(m) for m in _models(raw["models"][0]))
        except ValueError as exc:
            raise ParseError(str(exc), line=raw["models"][1], key="models") from None

    axis = values = None
    if "axis" in raw:
        try:
            axis = SweepAxis.parse(raw["axis"][0])
        except ValueError as exc:
            raise ParseError(str(exc), line=raw["axis"][1], key="axis") from None
    if "values" in raw:
        try:
            values = parse_values(raw["values"][0])
        except ValueError as exc:
            raise ParseError(str(exc), line=raw["values"][1], key="values") from None

    scenario = Scenario(
        params=params,
        utility=utility,
        repetitions=_integer(raw, "repetitions") if "repetitions" in raw else 1000,
        seed=_integer(raw, "seed") if "seed" in raw else 0,
        models=models,
        common_random_numbers=_boolean(raw, "common_random_numbers") if "common_random_numbers" in raw else True,
        axis=axis,
        values=values,
        out=raw["out"][0] if "out" in raw else None,
    )
    problems += scenario.to_config().problems()
    if not problems:
        problems += _utility_problems(params, utility)
    if problems:
        raise ValidationError(problems)
    return scenario
