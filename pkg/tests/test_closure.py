"""Tests for the closed structure maps on hom scenarios."""

import unittest

from ctx_sim.catalog import chsh_predicate, square, triangle, triangle_to_square
from ctx_sim.closure import (
    check_cc1,
    check_cc2,
    check_cc5,
    composition_L,
    hom_map,
    hom_post,
    hom_pre,
    identity_name_j,
    name,
    unit_iso_i,
    unit_iso_inverse,
    unname,
)
from ctx_sim.errors import ScenarioMismatch
from ctx_sim.games import make_predicate
from ctx_sim.hom import (
    UNIT,
    hom_scenario,
    hom_with_predicates,
    make_scenario_with_predicate,
    procedure_to_assignment,
    respects_predicates,
)
from ctx_sim.procedure import (
    ProbabilisticProcedure,
    canonicalize,
    compose,
    enumerate_deterministic_procedures,
    identity_procedure,
    make_deterministic_procedure,
    make_probabilistic_procedure,
)
from ctx_sim.scenario import EMPTY_ASSIGNMENT, ZERO, Assignment, dice_scenario


def _d2():
    return dice_scenario(2)


def _negation():
    d2 = _d2()
    flip = {Assignment.of({"*": "0"}): "1", Assignment.of({"*": "1"}): "0"}
    return make_deterministic_procedure(d2, d2, {"*": ["*"]}, {"*": flip})


def _constant(outcome):
    d2 = _d2()
    return make_deterministic_procedure(d2, d2, {"*": []}, {"*": {EMPTY_ASSIGNMENT: outcome}})


class TestUnitMaps(unittest.TestCase):
    """Test cases for i, its inverse and j."""

    def test_unit_iso_round_trip(self):
        """i followed by its inverse is the identity on S."""
        s = square()
        round_trip = compose(unit_iso_i(s), unit_iso_inverse(s))
        self.assertEqual(canonicalize(round_trip), identity_procedure(s))

    def test_unit_iso_other_way(self):
        """The inverse followed by i is the identity on [Zero, S]."""
        s = square()
        hom = hom_scenario(ZERO, s).base
        self.assertEqual(canonicalize(compose(unit_iso_inverse(s), unit_iso_i(s))), identity_procedure(hom))

    def test_j_names_identity(self):
        """j is the point of the identity procedure."""
        d2 = _d2()
        self.assertEqual(identity_name_j(d2), name(identity_procedure(d2)))

    def test_predicates_do_not_change_maps(self):
        """Structured scenarios give the same maps as bare ones."""
        s = square()
        self.assertEqual(unit_iso_i(make_scenario_with_predicate(s)), unit_iso_i(s))


class TestHomFunctor(unittest.TestCase):
    """Test cases for [-, -] on procedures."""

    def test_post_composition(self):
        """[id, h] sends the point of g to the point of h . g."""
        d2 = _d2()
        g, h = _negation(), _constant("1")
        moved = compose(name(g), hom_post(h, d2))
        self.assertEqual(canonicalize(moved), canonicalize(name(compose(g, h))))

    def test_pre_composition(self):
        """[f, id] sends the point of g to the point of g . f."""
        d2 = _d2()
        f, g = _negation(), identity_procedure(d2)
        moved = compose(name(g), hom_pre(f, d2))
        self.assertEqual(canonicalize(moved), canonicalize(name(compose(f, g))))

    def test_hom_map_of_identities(self):
        """[id, id] is the identity on [S, S]."""
        d2 = _d2()
        ident = identity_procedure(d2)
        hom = hom_scenario(d2, d2).base
        self.assertEqual(canonicalize(hom_map(ident, ident)), identity_procedure(hom))

    def test_hom_post_of_mixture(self):
        """[id, -] acts componentwise on mixtures."""
        d2 = _d2()
        mixture = make_probabilistic_procedure([("1/2", _negation()), ("1/2", _constant("0"))])
        lifted = hom_post(mixture, d2)
        self.assertIsInstance(lifted, ProbabilisticProcedure)
        self.assertEqual(len(lifted.components), 2)

    def test_composition_l_endpoints(self):
        """L: [S, T] -> [[P, S], [P, T]]."""
        d2 = _d2()
        ell = composition_L(ZERO, d2, d2)
        self.assertEqual(ell.source, hom_scenario(d2, d2).base)
        inner = hom_scenario(ZERO, d2).base
        self.assertEqual(ell.target, hom_scenario(inner, inner).base)


class TestNaming(unittest.TestCase):
    """Test cases for name and unname."""

    def test_round_trip_catalog_procedure(self):
        """unname(name(f)) = f for the triangle -> square procedure."""
        f = triangle_to_square()
        point = name(f)
        self.assertEqual(point.source, ZERO)
        self.assertEqual(point.apply_global(EMPTY_ASSIGNMENT), procedure_to_assignment(f))
        self.assertEqual(unname(point, triangle(), square()), f)

    def test_round_trip_every_procedure(self):
        """Every dice(2) -> dice(2) procedure survives naming."""
        d2 = _d2()
        for f in enumerate_deterministic_procedures(d2, d2, canonical=False):
            self.assertEqual(unname(name(f), d2, d2), f)

    def test_name_of_mixture(self):
        """Naming a mixture names each component."""
        mixture = make_probabilistic_procedure([("1/3", _negation()), ("2/3", _constant("1"))])
        named = name(mixture)
        self.assertEqual({f for _, f in named.components}, {name(_negation()), name(_constant("1"))})

    def test_unname_wrong_scenario(self):
        """A point of another hom scenario is rejected."""
        with self.assertRaises(ScenarioMismatch):
            unname(name(_negation()), triangle(), _d2())


class TestAxioms(unittest.TestCase):
    """Test cases for the closed-structure axiom checks."""

    def test_cc1(self):
        """L . j = j on small instances."""
        self.assertTrue(check_cc1(_d2(), ZERO))
        self.assertTrue(check_cc1(ZERO, _d2()))
        self.assertTrue(check_cc1(_d2(), _d2()))

    def test_cc2(self):
        """[j, id] . L = i on small instances."""
        self.assertTrue(check_cc2(ZERO, _d2()))
        self.assertTrue(check_cc2(_d2(), _d2()))

    def test_cc5(self):
        """Naming is a bijection onto accepted points."""
        self.assertTrue(check_cc5(_d2(), _d2()))
        self.assertTrue(check_cc5(ZERO, square()))


class TestStructurePredicates(unittest.TestCase):
    """The maps respect non-trivial structure predicates on their endpoints."""

    def setUp(self):
        """Set up test fixtures."""
        d2 = _d2()
        self.chsh = make_scenario_with_predicate(square(), chsh_predicate())
        self.coin = make_scenario_with_predicate(d2)
        self.heads = make_scenario_with_predicate(d2, make_predicate(d2, [(["*"], [{"*": "0"}])]))
        self.to_heads = _constant("0")

    def test_unit_iso(self):
        """i and its inverse respect the CHSH predicate."""
        hom = hom_with_predicates(UNIT, self.chsh)
        self.assertTrue(respects_predicates(unit_iso_i(self.chsh), self.chsh, hom))
        self.assertTrue(respects_predicates(unit_iso_inverse(self.chsh), hom, self.chsh))

    def test_identity_name(self):
        """j lands in the accepted points of [S, S]."""
        for s in (self.heads, self.coin):
            self.assertTrue(respects_predicates(identity_name_j(s), UNIT, hom_with_predicates(s, s)))

    def test_composition(self):
        """L respects the predicates of the nested hom scenarios."""
        for s, t in ((self.heads, self.heads), (self.coin, self.heads)):
            ell = composition_L(UNIT, s, t)
            source = hom_with_predicates(s, t)
            target = hom_with_predicates(hom_with_predicates(UNIT, s), hom_with_predicates(UNIT, t))
            self.assertTrue(respects_predicates(ell, source, target))

    def test_post_composition(self):
        """[id, f] respects predicates when f does."""
        self.assertTrue(respects_predicates(self.to_heads, self.coin, self.heads))
        lifted = hom_post(self.to_heads, self.coin)
        source = hom_with_predicates(self.coin, self.coin)
        target = hom_with_predicates(self.coin, self.heads)
        self.assertTrue(respects_predicates(lifted, source, target))

    def test_pre_composition(self):
        """[f, id] respects predicates when f does."""
        lifted = hom_pre(self.to_heads, self.heads)
        source = hom_with_predicates(self.heads, self.heads)
        target = hom_with_predicates(self.coin, self.heads)
        self.assertTrue(respects_predicates(lifted, source, target))

    def test_name_and_unname(self):
        """Points of respecting procedures are accepted, and unname gives them back."""
        hom = hom_with_predicates(self.coin, self.heads)
        point = name(self.to_heads)
        self.assertTrue(respects_predicates(point, UNIT, hom))
        recovered = unname(point, self.coin, self.heads)
        self.assertEqual(recovered, self.to_heads)
        self.assertTrue(respects_predicates(recovered, self.coin, self.heads))

    def test_name_of_non_respecting_procedure(self):
        """The identity does not respect coin -> heads, and neither does its point."""
        ident = identity_procedure(_d2())
        self.assertFalse(respects_predicates(ident, self.coin, self.heads))
        self.assertFalse(respects_predicates(name(ident), UNIT, hom_with_predicates(self.coin, self.heads)))


if __name__ == '__main__':
    unittest.main()
