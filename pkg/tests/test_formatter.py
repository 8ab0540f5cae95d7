"""Tests for report formatting."""

import json
import unittest

from ctx_sim.formatter import ReportFormatter
from ctx_sim.models import InputFile, RunReport


class TestReportFormatter(unittest.TestCase):
    """Test cases for ReportFormatter."""

    def setUp(self):
        """Set up test fixtures."""
        self.formatter = ReportFormatter()
        self.report = RunReport(
            command="check",
            inputs=[InputFile(path="samples/pr_model.json", sha256="ab" * 32)],
            result={
                "probabilistic": "contextual",
                "logical": "contextual",
                "strong": "contextual",
                "witness": {
                    "kind": "local_section",
                    "context": ["EvilG", "SammyA"],
                    "assignment": {"EvilG": "grain", "SammyA": "grain"},
                },
            },
            exit_code=0,
        )

    def test_format_json(self):
        """JSON reports are canonical: sorted keys and a trailing newline."""
        result = self.formatter.format_report(self.report, "json")
        data = json.loads(result)
        self.assertEqual(data["command"], "check")
        self.assertEqual(data["result"]["strong"], "contextual")
        self.assertEqual(data["inputs"][0]["path"], "samples/pr_model.json")
        self.assertTrue(result.endswith("}\n"))
        self.assertEqual(result, json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n")

    def test_format_json_is_deterministic(self):
        """The same report always gives the same bytes."""
        first = self.formatter.format_report(self.report, "json")
        second = ReportFormatter().format_report(self.report, "json")
        self.assertEqual(first, second)

    def test_format_markdown(self):
        """Markdown reports list inputs and result fields."""
        result = self.formatter.format_report(self.report, "markdown")
        self.assertIn("# ctx check", result)
        self.assertIn("**Exit code:** 0", result)
        self.assertIn("`samples/pr_model.json`", result)
        self.assertIn("- **strong:** `contextual`", result)
        self.assertIn('"kind": "local_section"', result)

    def test_format_markdown_scalar_result(self):
        """Scalar results are shown inline."""
        report = RunReport(command="game-value", result="13/16")
        result = self.formatter.format_report(report, "markdown")
        self.assertIn("`13/16`", result)
        self.assertIn("_No input files._", result)

    def test_unsupported_format(self):
        """Unknown formats are rejected."""
        with self.assertRaises(ValueError):
            self.formatter.format_report(self.report, "pdf")


if __name__ == '__main__':
    unittest.main()
