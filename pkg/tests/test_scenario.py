import pytest

from ciag.errors import ParseError, ValidationError
from ciag.montecarlo import ALL_MODELS, StrategyModel, SweepAxis
from ciag.scenario import PRESETS, parse_scenario, parse_values
from ciag.utility import LINEAR, UtilitySpec

DOC = """\
# calibrated defaults
loss: 170000
breach_prob: 0.015
breach_prob_invested: 0.003
investment_cost: 2960
premium: 3630
audit_cost: 5000
discount: 181.5
"""


def test_preset_is_valid():
    sc = parse_scenario("", PRESETS["paper-default"])
    p = sc.params
    assert (p.loss, p.breach_prob, p.breach_prob_invested, p.investment_cost, p.premium, p.audit_cost, p.discount) == (
        170000, 0.015, 0.003, 2960, 3630, 5000, 181.5)
    assert (p.wealth, p.prior) == (1_000_000, 0.5)
    assert sc.utility == LINEAR
    assert (sc.repetitions, sc.seed, sc.models, sc.common_random_numbers) == (1000, 0, ALL_MODELS, True)


def test_document_equals_preset():
    assert parse_scenario(DOC) == parse_scenario("", PRESETS["paper-default"])


def test_discount_percentage():
    sc = parse_scenario(DOC.replace("discount: 181.5", "discount_pct: 25"))
    assert sc.params.discount == 907.5
    assert sc.params.cents["discount"] == 90750


def test_effectiveness_percentage():
    sc = parse_scenario(DOC.replace("breach_prob_invested: 0.003", "effectiveness_pct: 80"))
    assert sc.params.breach_prob_invested == pytest.approx(0.003, abs=1e-15)


def test_missing_loss_named():
    with pytest.raises(ValidationError) as info:
        parse_scenario(DOC.replace("loss: 170000\n", ""))
    assert "loss" in str(info.value)
    assert any("loss" in p for p in info.value.problems)


def test_invalid_params_listed():
    with pytest.raises(ValidationError) as info:
        parse_scenario(DOC + "wealth: 1000\nprior: 2\n")
    text = str(info.value)
    assert "W > p" in text and "φ" in text


@pytest.mark.parametrize("extra, key", [
    ("colour: blue\n", "colour"),
    ("loss: 1\n", "loss"),
    ("discount_pct: 10\n", "discount"),
    ("prior: half\n", "prior"),
    ("repetitions: 1.5\n", "repetitions"),
    ("utility: quadratic\n", "utility"),
    ("models: GT, (B,B)\n", "models"),
    ("common_random_numbers: maybe\n", "common_random_numbers"),
])
def test_parse_errors_carry_key_and_line(extra, key):
    with pytest.raises(ParseError) as info:
        parse_scenario(DOC + extra)
    assert info.value.key == key
    assert info.value.line is not None
    assert key in str(info.value)


def test_line_without_colon():
    with pytest.raises(ParseError) as info:
        parse_scenario(DOC + "just words\n")
    assert info.value.line == DOC.count("\n") + 1


def test_optional_keys():
    sc = parse_scenario(DOC + "utility: log(1000)\nrepetitions: 500\nseed: 42\nmodels: GT, (A,NA), never_audit\n"
                              "common_random_numbers: false\naxis: audit-cost\nvalues: 5000..100000:3\nout: x.csv\n")
    assert sc.utility == UtilitySpec.log_shifted(1000)
    assert (sc.repetitions, sc.seed, sc.common_random_numbers) == (500, 42, False)
    assert sc.models == (StrategyModel.GT, StrategyModel.AUDIT_ON_CLAIM, StrategyModel.NEVER_AUDIT)
    assert sc.axis is SweepAxis.AUDIT_COST and sc.values == (5000, 52500, 100000)
    assert sc.out == "x.csv"
    assert sc.to_config().master_seed == 42


def test_json_document():
    text = '{"loss": 170000, "breach_prob": 0.015, "effectiveness_pct": 80, "investment_cost": 2960,' \
           ' "premium": 3630, "audit_cost": 5000, "discount_pct": 5, "models": ["GT", "(A,A)"], "common_random_numbers": true}'
    sc = parse_scenario(text)
    assert sc.params.discount == 181.5
    assert sc.models == (StrategyModel.GT, StrategyModel.ALWAYS_AUDIT)
    with pytest.raises(ParseError):
        parse_scenario("{not json")
    with pytest.raises(ParseError):
        parse_scenario("[1, 2]")


def test_layers_override_and_replace_exclusive_partner():
    sc = parse_scenario("discount_pct: 25\n", PRESETS["paper-default"], {"prior": "0.3", "audit_cost": "100000"})
    assert (sc.params.discount, sc.params.prior, sc.params.audit_cost) == (907.5, 0.3, 100000)
    sc = parse_scenario(DOC.replace("discount: 181.5", "discount_pct: 25"), overrides={"discount": "100"})
    assert sc.params.discount == 100
    with pytest.raises(ParseError):
        parse_scenario("", PRESETS["paper-default"], {"bogus": "1"})


def test_bad_simulation_settings():
    with pytest.raises(ValidationError):
        parse_scenario(DOC + "repetitions: 0\n")
    with pytest.raises(ValidationError):
        parse_scenario(DOC + "models: GT, GT\n")


def test_utility_checked_on_reachable_wealth():
    with pytest.raises(ValidationError) as info:
        parse_scenario(DOC + "wealth: 100000\nutility: log(-90000)\n")
    assert "undefined" in str(info.value)
    with pytest.raises(ValidationError) as info:
        parse_scenario(DOC + "utility: cara(1e-4)\n")
    assert "flat" in str(info.value)
    assert parse_scenario(DOC + "utility: cara(1e-5)\n").utility == UtilitySpec.cara(1e-5)


@pytest.mark.parametrize("text, values", [
    ("1,2,3", (1, 2, 3)),
    ("0..10", tuple(range(11))),
    ("5000..100000:2", (5000, 100000)),
    ("0.1..0.3:3", (0.1, 0.2, 0.3)),
])
def test_values(text, values):
    assert parse_values(text) == pytest.approx(values)


@pytest.mark.parametrize("text", ["", "a,b", "1..2:1"])
def test_values_rejected(text):
    with pytest.raises(ValueError):
        parse_values(text)
