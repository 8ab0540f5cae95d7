"""Data models for ctx-sim runs and configuration."""

from dataclasses import dataclass, field
from typing import Any, Dict, List

DEFAULT_ASSIGNMENT_BUDGET = 2 ** 20
DEFAULT_HOM_OUTCOME_BUDGET = 10 ** 6
DEFAULT_PROCEDURE_BUDGET = 10 ** 5
DEFAULT_PIVOT_LIMIT = 10 ** 6

MODES = ("probabilistic", "possibilistic", "weak")
FORMATS = ("json", "markdown")


@dataclass
class InputFile:
    """A file read by a command, identified by its content hash."""
    path: str
    sha256: str


@dataclass
class RunReport:
    """Outcome of one CLI command."""
    command: str
    inputs: List[InputFile] = field(default_factory=list)
    result: Any = None
    exit_code: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs": [{"path": item.path, "sha256": item.sha256} for item in self.inputs],
            "result": self.result,
            "exit_code": self.exit_code,
        }


@dataclass
class Config:
    """Configuration for ctx-sim."""
    assignment_budget: int = DEFAULT_ASSIGNMENT_BUDGET
    hom_outcome_budget: int = DEFAULT_HOM_OUTCOME_BUDGET
    procedure_budget: int = DEFAULT_PROCEDURE_BUDGET
    pivot_limit: int = DEFAULT_PIVOT_LIMIT
    default_mode: str = "probabilistic"
    default_format: str = "json"

    def with_budget(self, budget: int) -> "Config":
        """Copy with every enumeration ceiling set to ``budget``."""
        return Config(
            assignment_budget=budget,
            hom_outcome_budget=budget,
            procedure_budget=budget,
            pivot_limit=self.pivot_limit,
            default_mode=self.default_mode,
            default_format=self.default_format,
        )
