"""CSV tables of simulated insurer payoffs per strategy model.

Money is written with ``repr`` (shortest round-tripping decimal) and
probabilities with 12 significant digits. Undefined values are empty cells.
"""

from __future__ import annotations

import csv
import json

from .equilibrium import OFF_PATH, PbeSolution
from .montecarlo import SimulationSummary, StrategyModel, SweepTable

COLUMNS = (
    "axis_value", "model", "mean_insurer_payoff", "std_error",
    "mean_ph_secure_utility", "mean_ph_nonsecure_utility",
    "claims", "breaches", "audits", "denials",
    "pbe_region", "theta", "delta", "phi_star",
)
# appended after the fixed columns; non-empty only for sweep points that could not be solved
ERROR_COLUMN = "error"

COMPARISON_COLUMNS = (
    "axis_value", "pbe_region", "gt_mean", "never_audit_mean",
    "difference", "difference_std_error", "difference_premiums",
)


def fmt_money(x) -> str:
    return "" if x is None else repr(float(x))


def fmt_prob(x) -> str:
    return "" if x is None else format(float(x), ".12g")


def fmt_value(x) -> str:
    if x is None:
        return ""
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _writer(fh, columns):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    return w


def summary_rows(summary: SimulationSummary, axis_value=None):
    sol = summary.solution
    for model, r in summary.results.items():
        yield [
            fmt_value(axis_value), model.value, fmt_money(r.mean_insurer_payoff), fmt_money(r.std_error),
            fmt_money(r.mean_ph_secure_utility), fmt_money(r.mean_ph_nonsecure_utility),
            r.claims, r.breaches, r.audits, r.denials,
            sol.region.value, fmt_prob(sol.theta), fmt_prob(sol.delta), fmt_prob(sol.phi_star),
        ]


def write_summary_csv(summary: SimulationSummary, fh, axis_value=None) -> None:
    w = _writer(fh, COLUMNS)
    w.writerows(summary_rows(summary, axis_value))


def write_sweep_csv(table: SweepTable, fh) -> None:
    w = _writer(fh, COLUMNS + (ERROR_COLUMN,))
    for pt in table.points:
        if pt.summary is not None:
            for row in summary_rows(pt.summary, pt.value):
                w.writerow(row + [""])
            continue
        region = "" if pt.region is None else pt.region.value
        for model in pt.config.models:
            row = [fmt_value(pt.value), model.value] + [""] * 8 + [region, "", "", fmt_prob(pt.config.params.phi_star)]
            w.writerow(row + [pt.error])


def write_comparison_csv(table: SweepTable, fh) -> None:
    """GT minus never-audit per axis value, also in units of the annual premium."""
    w = _writer(fh, COMPARISON_COLUMNS)
    for pt in table.points:
        diff = pt.gt_vs_never()
        if diff is None:
            continue
        res = pt.summary.results
        w.writerow([
            fmt_value(pt.value), pt.summary.solution.region.value,
            fmt_money(res[StrategyModel.GT].mean_insurer_payoff),
            fmt_money(res[StrategyModel.NEVER_AUDIT].mean_insurer_payoff),
            fmt_money(diff.mean), fmt_money(diff.std_error),
            fmt_prob(diff.mean / pt.config.params.premium),
        ])


def _belief(b):
    return None if b is OFF_PATH else b


def solution_dict(sol: PbeSolution) -> dict:
    return {
        "region": sol.region.value,
        "ph_strategy": {
            "claim_prob_secure": sol.ph_strategy.claim_prob_secure,
            "claim_prob_nonsecure": sol.ph_strategy.claim_prob_nonsecure,
        },
        "ins_strategy": {
            "audit_prob_given_cd": sol.ins_strategy.audit_prob_given_cd,
            "audit_prob_given_nc": sol.ins_strategy.audit_prob_given_nc,
        },
        "beliefs": {"mu": _belief(sol.beliefs.mu), "lambda": _belief(sol.beliefs.lam)},
        "phi_star": sol.phi_star,
        "theta": sol.theta,
        "delta": sol.delta,
        "notes": list(sol.notes),
    }


def solution_json(sol: PbeSolution) -> str:
    return json.dumps(solution_dict(sol), indent=2)


def solution_text(sol: PbeSolution) -> str:
    def belief(b):
        return "off path" if b is OFF_PATH else f"{b:.6g}"

    ph, ins = sol.ph_strategy, sol.ins_strategy
    lines = [
        f"region            {sol.region.value}",
        f"phi*              {sol.phi_star:.6g}",
        f"policyholder      P(CD | secure) = {ph.claim_prob_secure:.6g}, P(CD | non-secure) = {ph.claim_prob_nonsecure:.6g}",
        f"insurer           P(A | CD) = {ins.audit_prob_given_cd:.6g}, P(A | NC) = {ins.audit_prob_given_nc:.6g}",
        f"beliefs           mu = {belief(sol.beliefs.mu)}, lambda = {belief(sol.beliefs.lam)}",
    ]
    if sol.theta is not None:
        lines.append(f"theta             {sol.theta:.12g}")
        lines.append(f"delta             {sol.delta:.12g}")
    lines += [f"note              {n}" for n in sol.notes]
    return "\n".join(lines)


def solution_csv(sol: PbeSolution, fh) -> None:
    d = solution_dict(sol)
    w = _writer(fh, ("region", "claim_prob_secure", "claim_prob_nonsecure", "audit_prob_given_cd",
                     "audit_prob_given_nc", "mu", "lambda", "phi_star", "theta", "delta"))
    w.writerow([
        d["region"], fmt_prob(d["ph_strategy"]["claim_prob_secure"]), fmt_prob(d["ph_strategy"]["claim_prob_nonsecure"]),
        fmt_prob(d["ins_strategy"]["audit_prob_given_cd"]), fmt_prob(d["ins_strategy"]["audit_prob_given_nc"]),
        fmt_prob(d["beliefs"]["mu"]), fmt_prob(d["beliefs"]["lambda"]),
        fmt_prob(sol.phi_star), fmt_prob(sol.theta), fmt_prob(sol.delta),
    ])
