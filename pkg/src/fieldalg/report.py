"""Structured verdicts for identity checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

HOLDS = "holds"
FAILS = "fails"
INAPPLICABLE = "inapplicable"
VERDICTS = (HOLDS, FAILS, INAPPLICABLE)


@dataclass
class CheckReport:
    """Named verdict plus the truncation it was established under.

    ``window`` is the region actually certified; a ``holds`` verdict means
    "holds exactly on ``window``" and nothing more.
    """

    name: str
    verdict: str
    params: dict = field(default_factory=dict)
    window: dict | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAILS and self.witness is None:
            raise ValueError(f"{self.name}: a failing report needs a witness")

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict == FAILS

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "verdict": self.verdict,
            "params": self.params,
            "window": self.window,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out

    def __str__(self) -> str:
        s = f"{self.name}: {self.verdict}"
        if self.details.get("summary"):
            s += f" ({self.details['summary']})"
        return s


def grid_window(degree_cap: int, mode_window: int) -> dict:
    return {"degree": [0, degree_cap], "mode": [-mode_window, mode_window]}
