import pytest
from hypothesis import strategies as st

from ciag.game import GameParams, calibrated_defaults, validate_params


def cents(lo, hi):
    return st.integers(lo, hi).map(lambda c: c / 100)


@st.composite
def valid_params(draw, loss=None, prior=None):
    premium = draw(cents(1, 10_000_00))
    p = GameParams(
        audit_cost=draw(cents(0, 300_000_00)),
        investment_cost=draw(cents(0, 10_000_00)),
        discount=draw(st.integers(0, int(premium * 100) - 1).map(lambda c: c / 100)),
        loss=loss if loss is not None else draw(cents(1, 500_000_00)),
        premium=premium,
        wealth=draw(cents(30_000_00, 5_000_000_00)),
        breach_prob=(beta := draw(st.floats(0, 1))),
        breach_prob_invested=draw(st.floats(0, beta)),
        prior=prior if prior is not None else draw(st.floats(0, 1)),
    )
    assert not validate_params(p), validate_params(p)
    return p


@pytest.fixture
def defaults():
    return calibrated_defaults()


@pytest.fixture
def mixed_params():
    """Mixed-region instance: a = 100k, d = 25% of the premium, prior 0.3."""
    return calibrated_defaults(audit_cost=100_000, discount=907.5, prior=0.3)
