"""Exception hierarchy shared by the solver, oracle, simulator and CLI."""


class CiagError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParamsError(CiagError, ValueError):
    """Game parameters violate one or more model assumptions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UtilityDomainError(CiagError, ValueError):
    """A utility function was evaluated outside its domain."""


class MixedSolutionError(CiagError, ValueError):
    """The mixed-strategy closed forms do not yield a valid equilibrium.

    ``region`` is set when the error is raised while classifying a game,
    so callers can still report which region the parameters fall in.
    """

    region = None


class PriorDegenerate(MixedSolutionError):
    """The prior equals one, so the claim-mixing probability is undefined."""


class DeterrenceInfeasible(MixedSolutionError):
    """No audit frequency at most one makes the non-secure type indifferent."""


class RegionMismatch(MixedSolutionError):
    """The claim-mixing probability exceeds one (prior above the threshold)."""


class WrongRegion(CiagError, ValueError):
    """An operation that needs a mixed equilibrium received a pure one."""


class InvalidConfig(CiagError, ValueError):
    """A simulation configuration violates its invariants."""


class ParseError(CiagError, ValueError):
    """A scenario document could not be parsed."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(CiagError, ValueError):
    """A scenario parsed but does not describe a valid game or simulation."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
