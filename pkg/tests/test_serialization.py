"""Tests for the JSON codecs."""

import json
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

from ctx_sim.catalog import (
    chsh_model,
    chsh_predicate,
    delta_all_grain,
    pr_model,
    square,
    triangle,
    triangle_model,
    triangle_to_square,
    zero_to_pr,
)
from ctx_sim.contextuality import classify
from ctx_sim.empirical import PossibilisticModel, possibilistic_collapse
from ctx_sim.errors import FormatError, NotNormalized
from ctx_sim.games import canonical_model_of_predicate, make_predicate, model_value
from ctx_sim.procedure import enumerate_deterministic_procedures, make_probabilistic_procedure
from ctx_sim.scenario import ZERO, dice_scenario
from ctx_sim.serialization import (
    canonical_result_to_json,
    game_from_json,
    hierarchy_to_json,
    load_json,
    model_from_json,
    model_to_json,
    predicate_from_json,
    procedure_from_json,
    procedure_to_json,
    query_from_json,
    scenario_from_json,
    scenario_to_json,
    to_json,
)

SAMPLES = Path(__file__).parent.parent / "samples"


def _sample(name):
    return load_json(SAMPLES / name), SAMPLES


class TestSamples(unittest.TestCase):
    """The shipped sample files decode to the catalog values."""

    def test_scenarios(self):
        """Scenario files and references."""
        self.assertEqual(scenario_from_json(*_sample("triangle.json")), triangle())
        self.assertEqual(scenario_from_json(*_sample("square.json")), square())
        self.assertEqual(scenario_from_json(*_sample("zero.json")), ZERO)

    def test_models(self):
        """Model files resolve their scenario relative to themselves."""
        self.assertEqual(model_from_json(*_sample("triangle_model.json")), triangle_model())
        self.assertEqual(model_from_json(*_sample("pr_model.json")), pr_model())
        self.assertEqual(model_from_json(*_sample("chsh_model.json")), chsh_model())
        self.assertEqual(model_from_json(*_sample("delta_all_grain.json")), delta_all_grain())

    def test_procedure(self):
        """The triangle -> square procedure."""
        self.assertEqual(procedure_from_json(*_sample("triangle_to_square.json")), triangle_to_square())

    def test_game(self):
        """The CHSH game file plays like the catalog game."""
        game = game_from_json(*_sample("chsh_game.json"))
        self.assertEqual(model_value(game, chsh_model()), Fraction(13, 16))

    def test_predicate(self):
        """The CHSH predicate file."""
        self.assertEqual(predicate_from_json(*_sample("chsh_predicate.json")), chsh_predicate())

    def test_query(self):
        """The Zero -> PR query."""
        self.assertEqual(query_from_json(*_sample("zero_to_pr.json")), zero_to_pr())


class TestScenarioReferences(unittest.TestCase):
    """Test cases for named scenario references."""

    def test_zero(self):
        """The reference zero names the empty scenario."""
        self.assertEqual(scenario_from_json("zero"), ZERO)

    def test_dice(self):
        """dice(n) names the one-measurement scenario."""
        self.assertEqual(scenario_from_json("dice(3)"), dice_scenario(3))

    def test_round_trip(self):
        """Encoded scenarios decode to themselves."""
        s = square()
        self.assertEqual(scenario_from_json(json.loads(json.dumps(scenario_to_json(s)))), s)


class TestFormatErrors(unittest.TestCase):
    """Test cases for malformed documents."""

    def test_missing_key(self):
        """Scenarios need maximal contexts."""
        with self.assertRaises(FormatError):
            scenario_from_json({"measurements": []})

    def test_wrong_type(self):
        """Measurements are a list."""
        with self.assertRaises(FormatError):
            scenario_from_json({"measurements": {}, "maximal_contexts": []})

    def test_float_weight(self):
        """Decimal probabilities are not exact."""
        data = {"scenario": "dice(2)", "distributions": [
            {"context": ["*"], "weights": [{"assignment": {"*": "0"}, "p": "0.5"},
                                           {"assignment": {"*": "1"}, "p": "0.5"}]},
        ]}
        with self.assertRaises(FormatError):
            model_from_json(data)

    def test_duplicate_cell(self):
        """A cell may be listed once."""
        data = {"scenario": "dice(2)", "distributions": [
            {"context": ["*"], "weights": [{"assignment": {"*": "0"}, "p": "1/2"},
                                           {"assignment": {"*": "0"}, "p": "1/2"}]},
        ]}
        with self.assertRaises(FormatError):
            model_from_json(data)

    def test_mixed_kinds(self):
        """A model is either weighted or support-only."""
        data = {"scenario": "dice(2)", "distributions": [
            {"context": ["*"], "weights": [{"assignment": {"*": "0"}, "p": "1"}]},
            {"context": ["*"], "support": [{"*": "0"}]},
        ]}
        with self.assertRaises(FormatError):
            model_from_json(data)

    def test_validation_errors_pass_through(self):
        """Well-formed but invalid data raises the validating constructor's error."""
        data = {"scenario": "dice(2)", "distributions": [
            {"context": ["*"], "weights": [{"assignment": {"*": "0"}, "p": "1/3"}]},
        ]}
        with self.assertRaises(NotNormalized):
            model_from_json(data)

    def test_invalid_json_file(self):
        """Syntax errors become FormatError."""
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "broken.json"
            path.write_text("{\"measurements\": [", encoding="utf-8")
            with self.assertRaises(FormatError):
                load_json(path)

    def test_missing_file(self):
        """Unreadable files become FormatError."""
        with self.assertRaises(FormatError):
            load_json(SAMPLES / "no_such_file.json")

    def test_duplicate_query_row(self):
        """F lists each source assignment once."""
        data = {"source": "zero", "target": "dice(2)", "F": [
            {"assignment": {}, "model": {"distributions": [
                {"context": ["*"], "weights": [{"assignment": {"*": "0"}, "p": "1"}]}]}},
            {"assignment": {}, "model": {"distributions": [
                {"context": ["*"], "weights": [{"assignment": {"*": "1"}, "p": "1"}]}]}},
        ]}
        with self.assertRaises(FormatError):
            query_from_json(data)

    def test_no_encoding(self):
        """Only catalog values encode."""
        with self.assertRaises(FormatError):
            to_json(object())


class TestEncoders(unittest.TestCase):
    """Test cases for encoders."""

    def test_possibilistic_model(self):
        """Support-only models use "support" lists."""
        support = possibilistic_collapse(pr_model())
        data = model_to_json(support)
        self.assertTrue(all("support" in entry for entry in data["distributions"]))
        decoded = model_from_json(data)
        self.assertIsInstance(decoded, PossibilisticModel)
        self.assertEqual(decoded, support)

    def test_weights_are_strings(self):
        """Probabilities are written as p/q strings."""
        data = model_to_json(chsh_model())
        cells = [cell["p"] for entry in data["distributions"] for cell in entry["weights"]]
        self.assertEqual(set(cells), {"1/2", "3/8", "1/8"})

    def test_mixture_round_trip(self):
        """Mixtures keep their weights."""
        procedures = list(enumerate_deterministic_procedures(triangle(), dice_scenario(2)))
        mixture = make_probabilistic_procedure([("1/3", procedures[0]), ("2/3", procedures[5])])
        self.assertEqual(procedure_from_json(procedure_to_json(mixture)), mixture)

    def test_payoff_game(self):
        """Games may be given by payoff tables."""
        data = {"source": "dice(2)", "components": [
            {"weight": "1", "context": ["*"], "payoffs": [
                {"assignment": {"*": "0"}, "value": "1"},
                {"assignment": {"*": "1"}, "value": "1/2"},
            ]},
        ]}
        game = game_from_json(data)
        coin = model_from_json({"scenario": "dice(2)", "distributions": [
            {"context": ["*"], "weights": [{"assignment": {"*": "0"}, "p": "1/2"},
                                           {"assignment": {"*": "1"}, "p": "1/2"}]}]})
        self.assertEqual(model_value(game, coin), Fraction(3, 4))

    def test_hierarchy_local_section(self):
        """Strong contextuality is witnessed by a local section."""
        data = hierarchy_to_json(classify(pr_model()), square())
        self.assertEqual(data["strong"], "contextual")
        self.assertEqual(data["witness"]["kind"], "local_section")
        self.assertEqual(len(data["witness"]["context"]), 2)

    def test_hierarchy_global_distribution(self):
        """Non-contextual models report their global distribution."""
        data = hierarchy_to_json(classify(delta_all_grain()), square())
        self.assertEqual(data["probabilistic"], "noncontextual")
        self.assertEqual(data["witness"]["kind"], "global_distribution")
        self.assertEqual(data["witness"]["weights"][0]["p"], "1")

    def test_unsatisfiable_result(self):
        """Unsatisfiable predicates encode as a plain string."""
        predicate = make_predicate(square(), [(["SammyA"], [])])
        self.assertEqual(canonical_result_to_json(canonical_model_of_predicate(predicate)), "unsatisfiable")


if __name__ == '__main__':
    unittest.main()
