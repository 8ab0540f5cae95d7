"""Tests for procedures, pushforward, canonical forms and enumeration."""

import unittest
from fractions import Fraction

from ctx_sim.catalog import (
    bell_model,
    bell_to_square,
    chsh_model,
    pr_model,
    square,
    triangle,
    triangle_model,
    triangle_to_square,
)
from ctx_sim.empirical import (
    EmpiricalModel,
    PossibilisticModel,
    deterministic_model,
    make_empirical_model,
    make_possibilistic_model,
    possibilistic_collapse,
)
from ctx_sim.errors import (
    BudgetExceeded,
    CodomainViolation,
    IncompleteTable,
    NegativeWeight,
    NotAContext,
    NotNormalized,
    NotSimplicial,
    ScenarioMismatch,
)
from ctx_sim.procedure import (
    DeterministicProcedure,
    PossibilisticProcedure,
    ProbabilisticProcedure,
    canonicalize,
    compose,
    count_deterministic_procedures,
    enumerate_deterministic_procedures,
    experiment_from_table,
    find_simulation,
    global_assignment_procedure,
    identity_procedure,
    is_canonical,
    is_simulation,
    least_subset,
    make_deterministic_procedure,
    make_possibilistic_procedure,
    make_probabilistic_procedure,
    pushforward,
)
from ctx_sim.scenario import EMPTY_ASSIGNMENT, ZERO, Assignment, dice_scenario, make_scenario


def _binary(ids, facets):
    return make_scenario(ids, {x: ["0", "1"] for x in ids}, facets)


def _constant_to_square(outcome):
    s = square()
    return global_assignment_procedure(s, Assignment.of({x: outcome for x in s.measurements}))


class TestMakeProcedure(unittest.TestCase):
    """Test cases for procedure validation."""

    def test_triangle_to_square(self):
        """The catalog simulation is a valid procedure."""
        f = triangle_to_square()
        self.assertEqual(f.query("GeorgieB"), frozenset({"grub"}))
        self.assertEqual(f.image(["GeorgieB", "JohnnyB"]), frozenset({"grub"}))

    def test_not_simplicial(self):
        """Sending a triangle edge to a square diagonal is rejected."""
        sq, tri = square(), triangle()
        pi = {"pint": ["SammyA"], "wine": ["JohnnyB"], "grub": ["SammyA"]}
        alpha = {
            y: {Assignment.of({x[0]: o}): ("yes" if o == "grain" else "no") for o in ("grain", "grape")}
            for y, x in pi.items()
        }
        with self.assertRaises(NotSimplicial) as caught:
            make_deterministic_procedure(sq, tri, pi, alpha)
        self.assertEqual(caught.exception.image, frozenset({"SammyA", "JohnnyB"}))
        self.assertEqual(caught.exception.facet, frozenset({"grub", "wine"}))

    def test_incomplete_table(self):
        """Tables are total on Ev(pi(x))."""
        d2 = dice_scenario(2)
        with self.assertRaises(IncompleteTable):
            make_deterministic_procedure(d2, d2, {"*": ["*"]}, {"*": {Assignment.of({"*": "0"}): "1"}})

    def test_codomain_violation(self):
        """Outputs are outcomes of the target measurement."""
        d2 = dice_scenario(2)
        table = {Assignment.of({"*": "0"}): "0", Assignment.of({"*": "1"}): "7"}
        with self.assertRaises(CodomainViolation):
            make_deterministic_procedure(d2, d2, {"*": ["*"]}, {"*": table})

    def test_missing_query(self):
        """Every target measurement needs a query."""
        with self.assertRaises(IncompleteTable):
            make_deterministic_procedure(ZERO, dice_scenario(2), {}, {})

    def test_mixture_validation(self):
        """Mixture weights are positive and normalized; equal components merge."""
        f = identity_procedure(triangle())
        with self.assertRaises(NegativeWeight):
            make_probabilistic_procedure([("0", f), ("1", f)])
        with self.assertRaises(NotNormalized):
            make_probabilistic_procedure([("1/2", f)])
        merged = make_probabilistic_procedure([("1/2", f), ("1/2", f)])
        self.assertEqual(len(merged.components), 1)

    def test_mixture_endpoints(self):
        """Components share endpoints."""
        with self.assertRaises(ScenarioMismatch):
            make_probabilistic_procedure([
                ("1/2", identity_procedure(triangle())),
                ("1/2", identity_procedure(square())),
            ])


class TestPushforward(unittest.TestCase):
    """Test cases for EMP."""

    def test_triangle_simulates_pr(self):
        """Pushing the triangle model along the catalog procedure gives the PR box."""
        self.assertEqual(pushforward(triangle_to_square(), triangle_model()), pr_model())

    def test_identity(self):
        """The identity leaves models alone."""
        model = chsh_model()
        self.assertEqual(pushforward(identity_procedure(square()), model), model)

    def test_deltas_push_to_deltas(self):
        """A deterministic model goes to the deterministic model of the translated assignment."""
        f = triangle_to_square()
        s = Assignment.of({"grub": "no", "pint": "yes", "wine": "no"})
        expected = deterministic_model(square(), f.apply_global(s))
        self.assertEqual(pushforward(f, deterministic_model(triangle(), s)), expected)

    def test_zero_source(self):
        """The procedure for s pushes the unique model on Zero to delta_s."""
        zero_model = deterministic_model(ZERO, EMPTY_ASSIGNMENT)
        s = Assignment.of({"EvilG": "grape", "GeorgieB": "grain", "JohnnyB": "grain", "SammyA": "grape"})
        image = pushforward(global_assignment_procedure(square(), s), zero_model)
        self.assertEqual(image, deterministic_model(square(), s))

    def test_mixture_pushforward(self):
        """Mixtures push forward to mixtures."""
        zero_model = deterministic_model(ZERO, EMPTY_ASSIGNMENT)
        mixture = make_probabilistic_procedure([
            ("1/2", _constant_to_square("grain")),
            ("1/2", _constant_to_square("grape")),
        ])
        image = pushforward(mixture, zero_model)
        self.assertIsInstance(image, EmpiricalModel)
        dist = image[["SammyA", "GeorgieB"]]
        self.assertEqual(len(dist.weights), 2)

    def test_possibilistic_pushforward(self):
        """Boolean mixtures act on supports."""
        zero_model = deterministic_model(ZERO, EMPTY_ASSIGNMENT)
        members = make_possibilistic_procedure([_constant_to_square("grain"), _constant_to_square("grape")])
        image = pushforward(members, zero_model)
        self.assertIsInstance(image, PossibilisticModel)
        self.assertEqual(len(image[["SammyA", "EvilG"]]), 2)

    def test_collapse_naturality(self):
        """Collapse commutes with pushforward along a deterministic procedure."""
        f = triangle_to_square()
        model = triangle_model()
        self.assertEqual(
            possibilistic_collapse(pushforward(f, model)),
            pushforward(f, possibilistic_collapse(model)),
        )

    def test_scenario_mismatch(self):
        """Models live on the procedure's source."""
        with self.assertRaises(ScenarioMismatch):
            pushforward(triangle_to_square(), pr_model())


class TestCompose(unittest.TestCase):
    """Test cases for composition."""

    def test_identity_laws(self):
        """Identities are units up to canonical form."""
        f = triangle_to_square()
        self.assertEqual(canonicalize(compose(f, identity_procedure(square()))), canonicalize(f))
        self.assertEqual(canonicalize(compose(identity_procedure(triangle()), f)), canonicalize(f))

    def test_functoriality(self):
        """Pushing along a composite is pushing twice."""
        relabel = bell_to_square()
        model = bell_model()
        swap = make_deterministic_procedure(
            square(), square(),
            {x: [x] for x in square().measurements},
            {x: {Assignment.of({x: "grain"}): "grape", Assignment.of({x: "grape"}): "grain"}
             for x in square().measurements},
        )
        composite = compose(relabel, swap)
        self.assertEqual(pushforward(composite, model), pushforward(swap, pushforward(relabel, model)))

    def test_compose_mismatch(self):
        """Endpoints must meet."""
        with self.assertRaises(ScenarioMismatch):
            compose(triangle_to_square(), triangle_to_square())

    def test_mixtures_compose_bilinearly(self):
        """Weights multiply."""
        half = make_probabilistic_procedure([
            ("1/2", _constant_to_square("grain")),
            ("1/2", _constant_to_square("grape")),
        ])
        composite = compose(half, identity_procedure(square()))
        self.assertIsInstance(composite, ProbabilisticProcedure)
        self.assertEqual(sorted(w for w, _ in composite.components), [Fraction(1, 2), Fraction(1, 2)])

    def test_possibilistic_composition(self):
        """Boolean mixtures compose to Boolean mixtures."""
        members = make_possibilistic_procedure([_constant_to_square("grain")])
        composite = compose(members, identity_procedure(square()))
        self.assertIsInstance(composite, PossibilisticProcedure)


class TestLeastSubset(unittest.TestCase):
    """Test cases for least subsets and canonical forms."""

    def setUp(self):
        """Set up test fixtures."""
        self.s = _binary(["a", "b", "c"], [["a", "b", "c"]])
        self.globals = self.s.enumerate_assignments(self.s.measurements)

    def test_constant(self):
        """Constant tables depend on nothing."""
        self.assertEqual(least_subset(self.s, {g: 0 for g in self.globals}), frozenset())

    def test_projection(self):
        """A projection depends on one measurement."""
        self.assertEqual(least_subset(self.s, {g: g["a"] for g in self.globals}), frozenset({"a"}))

    def test_xor(self):
        """XOR of a and b ignores c."""
        table = {g: int(g["a"] != g["b"]) for g in self.globals}
        self.assertEqual(least_subset(self.s, table), frozenset({"a", "b"}))

    def test_partial_domain(self):
        """Tables on Ev(D) for a smaller D are accepted."""
        rows = self.s.enumerate_assignments(["a", "c"])
        self.assertEqual(least_subset(self.s, {r: r["c"] for r in rows}), frozenset({"c"}))

    def test_incomplete(self):
        """Tables must be total on their domain."""
        with self.assertRaises(IncompleteTable):
            least_subset(self.s, {self.globals[0]: 1})

    def test_budget(self):
        """Large tables are refused."""
        with self.assertRaises(BudgetExceeded):
            least_subset(self.s, {g: 0 for g in self.globals}, budget=4)

    def test_canonicalize_drops_ignored_query(self):
        """An ignored queried measurement leaves pi(x)."""
        d = dice_scenario(2)
        pi = {"*": ["a", "b"]}
        alpha = {"*": {r: r["a"] for r in self.s.enumerate_assignments(["a", "b"])}}
        f = make_deterministic_procedure(self.s, d, pi, alpha)
        self.assertFalse(is_canonical(f))
        g = canonicalize(f)
        self.assertEqual(g.query("*"), frozenset({"a"}))
        self.assertTrue(is_canonical(g))
        self.assertEqual(canonicalize(g), g)

    def test_canonicalize_merges_mixture(self):
        """Components with the same canonical form merge."""
        d = dice_scenario(2)
        wide = make_deterministic_procedure(
            self.s, d, {"*": ["a", "b"]},
            {"*": {r: r["a"] for r in self.s.enumerate_assignments(["a", "b"])}},
        )
        narrow = make_deterministic_procedure(
            self.s, d, {"*": ["a"]},
            {"*": {r: r["a"] for r in self.s.enumerate_assignments(["a"])}},
        )
        merged = canonicalize(make_probabilistic_procedure([("1/2", wide), ("1/2", narrow)]))
        self.assertEqual(len(merged.components), 1)
        self.assertEqual(merged.components[0][0], 1)

    def test_experiment_from_table(self):
        """Functions depending on a context give experiments querying exactly it."""
        tri = triangle()
        rows = tri.enumerate_assignments(tri.measurements)
        f = experiment_from_table(tri, {g: int(g["pint"] == g["wine"]) for g in rows}, 2)
        self.assertEqual(f.query("*"), frozenset({"pint", "wine"}))

    def test_experiment_from_non_context(self):
        """Functions of all three triangle measurements are not experiments."""
        tri = triangle()
        rows = tri.enumerate_assignments(tri.measurements)
        parity = {g: sum(o == "yes" for _, o in g.items) % 2 for g in rows}
        with self.assertRaises(NotAContext):
            experiment_from_table(tri, parity, 2)


class TestSimulation(unittest.TestCase):
    """Test cases for is_simulation and find_simulation."""

    def test_probabilistic_simulation(self):
        """The catalog procedure simulates PR from the triangle model."""
        self.assertTrue(is_simulation(triangle_to_square(), triangle_model(), pr_model(), "probabilistic"))

    def test_identity_all_modes(self):
        """The identity simulates every model by itself."""
        model = chsh_model()
        f = identity_procedure(square())
        for mode in ("probabilistic", "possibilistic", "weak"):
            self.assertTrue(is_simulation(f, model, model, mode))

    def test_weak_fails_when_cell_removed(self):
        """Weak simulation fails once the target loses a support cell."""
        f = identity_procedure(square())
        model = possibilistic_collapse(chsh_model())
        smaller = dict(model.supports)
        facet = frozenset({"EvilG", "SammyA"})
        smaller[facet] = frozenset(list(sorted(smaller[facet], key=square().assignment_key))[1:])
        truncated = make_possibilistic_model(square(), smaller)
        self.assertFalse(is_simulation(f, model, truncated, "weak"))
        self.assertTrue(is_simulation(f, truncated, model, "weak"))

    def test_wrong_target(self):
        """The catalog procedure does not reach the CHSH model."""
        self.assertFalse(is_simulation(triangle_to_square(), triangle_model(), chsh_model(), "probabilistic"))

    def test_find_simulation_forward(self):
        """Reading one triangle measurement gives a fair coin."""
        d2 = dice_scenario(2)
        coin = make_empirical_model(d2, {("*",): {Assignment.of({"*": "0"}): "1/2", Assignment.of({"*": "1"}): "1/2"}})
        witness = find_simulation(triangle_model(), coin)
        self.assertIsNotNone(witness)
        self.assertEqual(pushforward(witness, triangle_model()), coin)

    def test_find_simulation_budget(self):
        """Triangle -> square has more canonical procedures than the default budget."""
        with self.assertRaises(BudgetExceeded):
            find_simulation(triangle_model(), pr_model())

    def test_find_simulation_reverse(self):
        """Nothing simulates the triangle model from PR."""
        self.assertIsNone(find_simulation(pr_model(), triangle_model()))


class TestEnumeration(unittest.TestCase):
    """Test cases for procedure enumeration."""

    def test_zero_to_square(self):
        """Zero -> square has one procedure per global assignment."""
        procedures = list(enumerate_deterministic_procedures(ZERO, square()))
        self.assertEqual(len(procedures), 16)
        self.assertEqual(count_deterministic_procedures(ZERO, square()), 16)

    def test_to_dice_one(self):
        """Into dice(1) only the constant is canonical."""
        procedures = list(enumerate_deterministic_procedures(triangle(), dice_scenario(1)))
        self.assertEqual(len(procedures), 1)
        self.assertEqual(procedures[0].query("*"), frozenset())

    def test_triangle_to_dice_counts(self):
        """All and canonical procedures triangle -> dice(2)."""
        self.assertEqual(count_deterministic_procedures(triangle(), dice_scenario(2), canonical=False), 62)
        # 2 constants, 3 x 2 single-measurement, 3 x 10 two-measurement essential tables
        self.assertEqual(count_deterministic_procedures(triangle(), dice_scenario(2)), 38)

    def test_enumeration_is_canonical_and_distinct(self):
        """Enumerated procedures are canonical and pairwise distinct."""
        procedures = list(enumerate_deterministic_procedures(triangle(), dice_scenario(2)))
        self.assertTrue(all(is_canonical(f) for f in procedures))
        self.assertEqual(len(set(procedures)), len(procedures))
        self.assertTrue(all(isinstance(f, DeterministicProcedure) for f in procedures))

    def test_budget_checked_eagerly(self):
        """The budget fails before anything is produced."""
        with self.assertRaises(BudgetExceeded):
            enumerate_deterministic_procedures(ZERO, square(), budget=15)


if __name__ == '__main__':
    unittest.main()
