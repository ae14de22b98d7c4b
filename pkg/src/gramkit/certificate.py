"""Machine-checkable records of theorem hypotheses and their conclusions."""
from __future__ import annotations

from dataclasses import dataclass, field, fields

PASS = "pass"
INCONCLUSIVE = "inconclusive"
VIOLATED = "violated"


@dataclass
class Certificate:
    """Outcome of checking a theorem's hypotheses on concrete data.

    ``verdict`` says whether the hypotheses hold.  When they do, the
    conclusion has been verified numerically as well; a conclusion that
    fails despite the hypotheses lands in ``violations``.  A false verdict
    never claims the negation of the conclusion.
    """

    name: str
    verdict: bool
    lhs: float | None = None
    threshold: float | None = None
    conclusion: str = ""
    quantities: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def margin(self):
        if self.lhs is None or self.threshold is None:
            return None
        return self.threshold - self.lhs

    @property
    def status(self):
        if self.violations:
            return VIOLATED
        return PASS if self.verdict else INCONCLUSIVE

    def to_dict(self):
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["margin"] = self.margin
        out["status"] = self.status
        return out
