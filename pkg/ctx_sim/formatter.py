"""Report formatter for different output formats."""

import json
from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader

from .models import RunReport
from .utils import canonical_json


class ReportFormatter:
    """Formats run reports as canonical JSON or as Markdown."""

    def __init__(self, template_dir: Path = None):
        """Initialize formatter with template directory."""
        if template_dir is None:
            template_dir = Path(__file__).parent / "templates"

        self.template_dir = template_dir
        self.jinja_env = Environment(
            loader=FileSystemLoader(str(template_dir)),
            trim_blocks=True,
            lstrip_blocks=True
        )

        # Add custom filters and tests
        self.jinja_env.filters['pretty'] = self._pretty
        self.jinja_env.tests['scalar'] = self._is_scalar

    def format_report(self, report: RunReport, output_format: str = "json") -> str:
        """Format a run report into the specified output format."""
        if output_format == "json":
            return canonical_json(report.to_dict())
        elif output_format == "markdown":
            return self._format_markdown(report)
        else:
            raise ValueError(f"Unsupported output format: {output_format}")

    def _format_markdown(self, report: RunReport, template_name: str = "report") -> str:
        template = self.jinja_env.get_template(f"{template_name}.md")
        return template.render(**report.to_dict())

    @staticmethod
    def _pretty(value: Any) -> str:
        return json.dumps(value, sort_keys=True, indent=2, ensure_ascii=False)

    @staticmethod
    def _is_scalar(value: Any) -> bool:
        return value is None or isinstance(value, (str, int, bool))
