"""Built-in scenarios, models, procedures and games."""

from typing import Any, Callable, Dict

from .empirical import EmpiricalModel, deterministic_model, make_empirical_model
from .games import Experiment, PossibilisticPredicate, game_from_components, make_predicate
from .hom import RealizabilityQuery, make_realizability_query
from .procedure import DeterministicProcedure, make_deterministic_procedure, pushforward, relabelling
from .scenario import EMPTY_ASSIGNMENT, ZERO, Assignment, Scenario, make_scenario, relabel_scenario

HALF = "1/2"

GRAIN, GRAPE = "grain", "grape"
YES, NO = "yes", "no"

BELL_TO_SQUARE = {"Y_A": "SammyA", "X_B": "GeorgieB", "X_A": "JohnnyB", "Y_B": "EvilG"}
BELL_OUTCOMES = {"0": GRAIN, "1": GRAPE}


def triangle() -> Scenario:
    return make_scenario(
        ["pint", "wine", "grub"],
        {x: [YES, NO] for x in ("pint", "wine", "grub")},
        [["pint", "wine"], ["wine", "grub"], ["pint", "grub"]],
    )


def square() -> Scenario:
    """The 4-cycle SammyA - GeorgieB - JohnnyB - EvilG - SammyA."""
    people = ["SammyA", "GeorgieB", "JohnnyB", "EvilG"]
    return make_scenario(
        people,
        {x: [GRAIN, GRAPE] for x in people},
        [["SammyA", "GeorgieB"], ["GeorgieB", "JohnnyB"], ["JohnnyB", "EvilG"], ["EvilG", "SammyA"]],
    )


def bell() -> Scenario:
    """Two parties, two binary measurements each."""
    ids = ["X_A", "Y_A", "X_B", "Y_B"]
    return make_scenario(
        ids,
        {x: ["0", "1"] for x in ids},
        [["X_A", "X_B"], ["X_A", "Y_B"], ["Y_A", "X_B"], ["Y_A", "Y_B"]],
    )


def _pair_table(first: str, second: str, labels, weights) -> Dict[Assignment, Any]:
    """Weights listed in the order (00, 01, 10, 11) of ``labels``, ``first`` most significant."""
    cells = [(a, b) for a in labels for b in labels]
    return {Assignment.of({first: a, second: b}): w for (a, b), w in zip(cells, weights)}


def _correlated(first, second, labels):
    return _pair_table(first, second, labels, [HALF, 0, 0, HALF])


def _anticorrelated(first, second, labels):
    return _pair_table(first, second, labels, [0, HALF, HALF, 0])


def triangle_model() -> EmpiricalModel:
    """Anti-correlated on pint/wine, correlated on the other two edges."""
    labels = (YES, NO)
    return make_empirical_model(triangle(), {
        ("pint", "wine"): _anticorrelated("pint", "wine", labels),
        ("wine", "grub"): _correlated("wine", "grub", labels),
        ("pint", "grub"): _correlated("pint", "grub", labels),
    })


def pr_model() -> EmpiricalModel:
    """The PR box on the square: only SammyA and EvilG disagree."""
    labels = (GRAIN, GRAPE)
    return make_empirical_model(square(), {
        ("SammyA", "GeorgieB"): _correlated("SammyA", "GeorgieB", labels),
        ("GeorgieB", "JohnnyB"): _correlated("GeorgieB", "JohnnyB", labels),
        ("JohnnyB", "EvilG"): _correlated("JohnnyB", "EvilG", labels),
        ("EvilG", "SammyA"): _anticorrelated("SammyA", "EvilG", labels),
    })


def bell_model() -> EmpiricalModel:
    """The Bell model: probabilistically but not logically contextual."""
    labels = ("0", "1")
    tilted = ["3/8", "1/8", "1/8", "3/8"]
    return make_empirical_model(bell(), {
        ("X_A", "X_B"): _pair_table("X_A", "X_B", labels, [HALF, 0, 0, HALF]),
        ("X_A", "Y_B"): _pair_table("X_A", "Y_B", labels, tilted),
        ("Y_A", "X_B"): _pair_table("Y_A", "X_B", labels, tilted),
        ("Y_A", "Y_B"): _pair_table("Y_A", "Y_B", labels, ["1/8", "3/8", "3/8", "1/8"]),
    })


def bell_to_square() -> DeterministicProcedure:
    return relabelling(bell(), BELL_TO_SQUARE, {x: BELL_OUTCOMES for x in BELL_TO_SQUARE})


def chsh_model() -> EmpiricalModel:
    """The Bell model relabelled onto the square."""
    return pushforward(bell_to_square(), bell_model())


def triangle_to_square() -> DeterministicProcedure:
    """Each square party asks one triangle measurement; yes becomes grain."""
    asks = {"SammyA": "pint", "EvilG": "wine", "GeorgieB": "grub", "JohnnyB": "grub"}
    return make_deterministic_procedure(
        triangle(),
        square(),
        {x: [y] for x, y in asks.items()},
        {x: {Assignment.of({y: YES}): GRAIN, Assignment.of({y: NO}): GRAPE} for x, y in asks.items()},
    )


def _agree(a, b):
    return [{a: GRAIN, b: GRAIN}, {a: GRAPE, b: GRAPE}]


def _differ(a, b):
    return [{a: GRAIN, b: GRAPE}, {a: GRAPE, b: GRAIN}]


def _chsh_components():
    return [
        (["SammyA", "EvilG"], _differ("SammyA", "EvilG")),
        (["SammyA", "GeorgieB"], _agree("SammyA", "GeorgieB")),
        (["GeorgieB", "JohnnyB"], _agree("GeorgieB", "JohnnyB")),
        (["JohnnyB", "EvilG"], _agree("JohnnyB", "EvilG")),
    ]


def chsh_game() -> Experiment:
    """Win when SammyA and EvilG disagree or any other neighbours agree; each edge with weight 1/4."""
    return game_from_components(square(), [("1/4", context, accept) for context, accept in _chsh_components()])


def chsh_predicate() -> PossibilisticPredicate:
    return make_predicate(square(), _chsh_components())


def delta_all_grain() -> EmpiricalModel:
    s = square()
    return deterministic_model(s, Assignment.of({x: GRAIN for x in s.measurements}))


def triangle_01() -> Scenario:
    """The triangle with yes/no written as 1/0."""
    return relabel_scenario(triangle(), outcome_map={x: {YES: "1", NO: "0"} for x in ("pint", "wine", "grub")})


def zero_to_pr() -> RealizabilityQuery:
    return make_realizability_query(ZERO, square(), {EMPTY_ASSIGNMENT: pr_model()})


def zero() -> Scenario:
    return ZERO


CATALOG: Dict[str, Callable[[], Any]] = {
    "triangle": triangle,
    "square": square,
    "bell": bell,
    "zero": zero,
    "triangle-01": triangle_01,
    "triangle-model": triangle_model,
    "pr-model": pr_model,
    "bell-model": bell_model,
    "chsh-model": chsh_model,
    "delta-all-grain": delta_all_grain,
    "triangle-to-square": triangle_to_square,
    "bell-to-square": bell_to_square,
    "chsh-game": chsh_game,
    "chsh-predicate": chsh_predicate,
    "zero-to-pr": zero_to_pr,
}
