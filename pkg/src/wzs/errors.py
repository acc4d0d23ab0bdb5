"""Exception types shared across the package."""

from __future__ import annotations

from typing import Any


class HypothesisError(ValueError):
    """A closed-form or construction was asked for outside its hypotheses.

    The message names the specific failed hypothesis so callers can report
    a precise refusal instead of a silent wrong answer.
    """

    def __init__(self, hypothesis: str, detail: str = "") -> None:
        self.hypothesis = hypothesis
        msg = f"hypothesis violated: {hypothesis}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ContractError(RuntimeError):
    """An internal construction failed its own verification step."""


class TheoremViolation(ContractError):
    """A verified-extremal sequence failed to decompose as guaranteed.

    Carries a full dump of the offending instance; raising this means either
    the implementation is broken or an actual counterexample was found, and
    both demand a loud stop.
    """

    def __init__(self, message: str, dump: dict[str, Any]) -> None:
        self.dump = dump
        super().__init__(f"{message}; dump={dump!r}")
