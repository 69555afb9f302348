"""Solver, verifier and simulator for a one-shot cyber insurance audit game."""

from .equilibrium import (
    OFF_PATH,
    Beliefs,
    InsurerStrategy,
    PbeSolution,
    PolicyholderStrategy,
    Region,
    audit_threshold,
    cd_infoset_insurer_payoffs,
    classify_region,
    mixed_solution,
    posterior_beliefs,
    solve_pbe,
)
from .errors import (
    CiagError,
    DeterrenceInfeasible,
    InvalidConfig,
    InvalidParamsError,
    ParseError,
    PriorDegenerate,
    RegionMismatch,
    UtilityDomainError,
    ValidationError,
    WrongRegion,
)
from .game import LEAVES, GameParams, Leaf, insurer_payoff, leaf_net_offsets, calibrated_defaults, policyholder_utility, validate_params
from .montecarlo import ALL_MODELS, SimulationConfig, SimulationSummary, StrategyModel, SweepAxis, run_simulation, sweep
from .oracle import StrategyProfile, deviation_gaps, expected_payoffs, indifference_residuals
from .scenario import parse_scenario
from .utility import LINEAR, UtilitySpec

__version__ = "0.1.0"

__all__ = [
    "ALL_MODELS", "Beliefs", "CiagError", "DeterrenceInfeasible", "GameParams", "InsurerStrategy",
    "InvalidConfig", "InvalidParamsError", "LEAVES", "LINEAR", "Leaf", "OFF_PATH", "ParseError",
    "PbeSolution", "PolicyholderStrategy", "PriorDegenerate", "Region", "RegionMismatch",
    "SimulationConfig", "SimulationSummary", "StrategyModel", "StrategyProfile", "SweepAxis",
    "UtilityDomainError", "UtilitySpec", "ValidationError", "WrongRegion", "audit_threshold",
    "cd_infoset_insurer_payoffs", "classify_region", "deviation_gaps", "expected_payoffs",
    "indifference_residuals", "insurer_payoff", "leaf_net_offsets", "mixed_solution", "calibrated_defaults",
    "parse_scenario", "policyholder_utility", "posterior_beliefs", "run_simulation", "solve_pbe",
    "sweep", "validate_params",
]
