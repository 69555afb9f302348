"""Policyholder utility families.

All families are increasing and concave on their domain. ``Linear`` is the
risk-neutral default, which keeps simulated payoffs in dollars.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import UtilityDomainError


class UtilityFamily(str, enum.Enum):
    LINEAR = "linear"
    LOG_SHIFTED = "log"
    EXPONENTIAL_CARA = "cara"
    POWER = "power"


@dataclass(frozen=True)
class UtilitySpec:
    """A wealth -> utils mapping from one of the supported families.

    ``param`` is the shift for ``log``, the absolute risk aversion for
    ``cara`` and the exponent for ``power``; it is ignored for ``linear``.
    """

    family: UtilityFamily = UtilityFamily.LINEAR
    param: float | None = None

    def __post_init__(self):
        family = UtilityFamily(self.family)
        object.__setattr__(self, "family", family)
        if family is UtilityFamily.LINEAR:
            object.__setattr__(self, "param", None)
            return
        if self.param is None or not math.isfinite(self.param):
            raise ValueError(f"{family.value} utility needs a finite parameter")
        if family is UtilityFamily.EXPONENTIAL_CARA and self.param <= 0:
            raise ValueError("cara utility needs alpha > 0")
        if family is UtilityFamily.POWER and not 0 < self.param < 1:
            raise ValueError("power utility needs gamma in (0, 1)")

    @classmethod
    def linear(cls) -> "UtilitySpec":
        return cls(UtilityFamily.LINEAR)

    @classmethod
    def log_shifted(cls, shift: float) -> "UtilitySpec":
        return cls(UtilityFamily.LOG_SHIFTED, float(shift))

    @classmethod
    def cara(cls, alpha: float) -> "UtilitySpec":
        return cls(UtilityFamily.EXPONENTIAL_CARA, float(alpha))

    @classmethod
    def power(cls, gamma: float) -> "UtilitySpec":
        return cls(UtilityFamily.POWER, float(gamma))

    @classmethod
    def parse(cls, text: str) -> "UtilitySpec":
        """Parse ``linear``, ``log(shift)``, ``cara(alpha)`` or ``power(gamma)``.

        ``name:value`` is accepted as an alternative to ``name(value)``.
        """
        s = text.strip().lower()
        if s == "linear":
            return cls.linear()
        m = re.fullmatch(r"(log|cara|power)\s*(?:\(\s*([^)]*?)\s*\)|:\s*(\S+))", s)
        if not m:
            raise ValueError(f"unrecognised utility {text!r}")
        value = float(m.group(2) if m.group(2) is not None else m.group(3))
        return cls(UtilityFamily(m.group(1)), value)

    def __str__(self) -> str:
        if self.family is UtilityFamily.LINEAR:
            return "linear"
        return f"{self.family.value}({self.param!r})"

    def __call__(self, wealth):
        """Evaluate at a scalar or array of wealth values (USD)."""
        x = np.asarray(wealth, dtype=float)
        fam = self.family
        if fam is UtilityFamily.LINEAR:
            out = x.copy()
        elif fam is UtilityFamily.LOG_SHIFTED:
            arg = x + self.param
            if np.any(arg <= 0):
                raise UtilityDomainError(f"log utility undefined at wealth {_first_bad(x, arg <= 0)}")
            out = np.log(arg)
        elif fam is UtilityFamily.EXPONENTIAL_CARA:
            with np.errstate(over="ignore"):
                out = -np.expm1(-self.param * x) / self.param
            if not np.all(np.isfinite(out)):
                raise UtilityDomainError(f"cara utility overflows at wealth {_first_bad(x, ~np.isfinite(out))}")
        else:
            if np.any(x < 0):
                raise UtilityDomainError(f"power utility undefined at wealth {_first_bad(x, x < 0)}")
            out = np.power(x, self.param)
        return float(out) if out.ndim == 0 else out


LINEAR = UtilitySpec.linear()


def _first_bad(x, mask):
    return np.atleast_1d(x)[np.atleast_1d(mask)][0]
