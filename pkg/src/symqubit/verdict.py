"""Three-way entanglement verdict carrying its decisive scalar."""

from __future__ import annotations

import enum
from dataclasses import dataclass

DEFAULT_TOL = 1e-9

# Decisive values this close to zero are structural zeros (rank-deficient C,
# stretched coherent states, vacuum) rather than float noise, and sit on the
# separable side of a positive-semidefiniteness test.
ZERO_FLOOR = 1e-12


class Outcome(str, enum.Enum):
    ENTANGLED = "Entangled"
    SEPARABLE_CONSISTENT = "SeparableConsistent"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    decisive_value: float
    tolerance: float

    @classmethod
    def from_margin(cls, value, tol=DEFAULT_TOL, scale=1.0, boundary="indeterminate"):
        """Classify a margin whose negativity signals entanglement.

        ``boundary="indeterminate"`` reports values in ``[-tol, tol]`` as
        Indeterminate except for structural zeros (``|value| <= ZERO_FLOOR*scale``).
        ``boundary="separable"`` treats the whole band as consistent with
        separability, for criteria stated as closed inequalities.
        """
        if tol <= 0:
            raise ValueError("tol must be positive")
        value = float(value)
        if value < -tol:
            outcome = Outcome.ENTANGLED
        elif value > tol or boundary == "separable":
            outcome = Outcome.SEPARABLE_CONSISTENT
        elif abs(value) <= ZERO_FLOOR * max(1.0, scale):
            outcome = Outcome.SEPARABLE_CONSISTENT
        else:
            outcome = Outcome.INDETERMINATE
        return cls(outcome, value, float(tol))

    @property
    def entangled(self):
        return self.outcome is Outcome.ENTANGLED

    def to_dict(self):
        return {"outcome": self.outcome.value, "decisive_value": self.decisive_value,
                "tolerance": self.tolerance}
