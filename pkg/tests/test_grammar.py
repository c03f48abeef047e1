import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labloop.grammar import (
    ArityMismatch,
    Condition,
    DanglingUntil,
    EmptyLine,
    NoSteps,
    PRIMITIVE_MENU,
    PlanParseFailure,
    PrimitiveTask,
    PrimitiveVerb,
    SLOT_ROLES,
    UnknownVerb,
    bind_predicate,
    format_primitive,
    parse_plan,
    parse_primitive,
    validate_plan,
)
from labloop.simlab.fixtures import COMPLETE_TASKS, PRIMITIVE_TASKS, get_fixture


def test_menu_has_exactly_seven_templates():
    assert len(PRIMITIVE_MENU) == 7
    verbs = {line.split()[0] for line in PRIMITIVE_MENU}
    assert verbs == {v.value for v in PrimitiveVerb}


def test_parse_each_verb():
    cases = {
        "Grasp the glass rod": (PrimitiveVerb.GRASP, {"object": "the glass rod"}),
        "Pour dilute acid from the cylinder into the beaker": (
            PrimitiveVerb.POUR,
            {
                "liquid": "dilute acid",
                "source_container": "the cylinder",
                "dest_container": "the beaker",
            },
        ),
        "Stir the salt solution": (PrimitiveVerb.STIR, {"mixture": "the salt solution"}),
        "Transfer NaCl solid from the weighing boat to the beaker": (
            PrimitiveVerb.TRANSFER,
            {
                "solid": "NaCl solid",
                "source_container": "the weighing boat",
                "dest_container": "the beaker",
            },
        ),
        "Dip the platinum wire into the copper sulfate solution in the beaker": (
            PrimitiveVerb.DIP,
            {
                "object": "the platinum wire",
                "solution": "copper sulfate solution",
                "container": "the beaker",
            },
        ),
        "Heat the platinum wire over a flame": (
            PrimitiveVerb.HEAT,
            {"object": "the platinum wire"},
        ),
        "Press the button of the evaporator": (
            PrimitiveVerb.PRESS,
            {"object": "the evaporator"},
        ),
    }
    for line, (verb, slots) in cases.items():
        task = parse_primitive(line)
        assert task.verb is verb
        assert dict(task.slots) == slots
        assert task.until is None


def test_until_only_on_pour():
    task = parse_primitive(
        "Pour acid from the cylinder into the beaker until the solution becomes colorless"
    )
    assert task.until is not None
    assert task.until.text == "the solution becomes colorless"
    for line in (
        "Stir the mixture until it dissolves",
        "Heat the wire over a flame until it glows",
        "Grasp the rod until secure",
        "Transfer salt from boat to beaker until empty",
        "Dip the wire into the solution in the beaker until wet",
        "Press the button of the evaporator until dry",
    ):
        with pytest.raises(DanglingUntil):
            parse_primitive(line)


def test_rightmost_until_wins():
    task = parse_primitive(
        "Pour solution until saturation from the flask into the dish until crystals appear"
    )
    assert task.until.text == "crystals appear"
    assert task.slot("liquid") == "solution until saturation"


def test_empty_until_condition_rejected():
    with pytest.raises(ArityMismatch):
        parse_primitive("Pour acid from the cylinder into the beaker until ")
    with pytest.raises(ArityMismatch):
        format_primitive(
            PrimitiveTask(
                verb=PrimitiveVerb.POUR,
                slots=(
                    ("liquid", "acid"),
                    ("source_container", "a"),
                    ("dest_container", "b"),
                ),
                until=Condition(text="   "),
            )
        )


def test_parse_rejections():
    with pytest.raises(EmptyLine):
        parse_primitive("   ")
    with pytest.raises(UnknownVerb):
        parse_primitive("Shake the flask")
    with pytest.raises(ArityMismatch):
        parse_primitive("Grasp")
    with pytest.raises(ArityMismatch):
        parse_primitive("Pour acid into the beaker")  # missing 'from'
    with pytest.raises(ArityMismatch):
        parse_primitive("Pour acid from the cylinder")  # missing 'into'
    with pytest.raises(ArityMismatch):
        parse_primitive("Transfer salt from the boat into the beaker")  # 'to', not 'into'
    with pytest.raises(ArityMismatch):
        parse_primitive("Heat the wire")  # missing 'over a flame'
    with pytest.raises(ArityMismatch):
        parse_primitive("Press the evaporator")  # missing 'the button of'
    with pytest.raises(ArityMismatch):
        parse_primitive("Dip the wire into the beaker")  # missing trailing ' in '


def test_dip_uses_rightmost_in():
    task = parse_primitive(
        "Dip the wire into the salt solution in water in the beaker on the left"
    )
    assert task.slot("solution") == "salt solution in water"
    assert task.slot("container") == "the beaker on the left"


def test_format_is_parse_inverse_for_every_fixture_plan():
    for task_id in (*PRIMITIVE_TASKS, *COMPLETE_TASKS):
        plan = parse_plan(get_fixture(task_id).plan_text)
        assert plan.steps, task_id
        for step in plan.steps:
            again = parse_primitive(format_primitive(step))
            assert again == step, f"{task_id}: {format_primitive(step)}"


_slot_text = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyz ",
    min_size=1,
    max_size=24,
).map(lambda s: " ".join(s.split())).filter(
    lambda s: s
    and not any(
        f" {word} " in f" {s} " for word in ("from", "into", "to", "in", "until", "the")
    )
)


@st.composite
def _task_strategy(draw):
    verb = draw(st.sampled_from(list(PrimitiveVerb)))
    roles = SLOT_ROLES[verb]
    slots = tuple((role, draw(_slot_text)) for role in roles)
    until = None
    if verb is PrimitiveVerb.POUR and draw(st.booleans()):
        until = Condition(text="the solution becomes colorless")
    return PrimitiveTask(verb=verb, slots=slots, until=until)


@settings(max_examples=200, deadline=None)
@given(_task_strategy())
def test_round_trip_over_generated_tasks(task):
    line = format_primitive(task)
    assert parse_primitive(line) == task


def test_plan_parsing_strips_markers_and_blanks():
    block = """
    1. Grasp the rod

    2) Heat the rod over a flame
    - Stir the mixture
    * Press the button of the evaporator
    """
    plan = parse_plan(block)
    assert [s.verb for s in plan.steps] == [
        PrimitiveVerb.GRASP,
        PrimitiveVerb.HEAT,
        PrimitiveVerb.STIR,
        PrimitiveVerb.PRESS,
    ]


def test_plan_aggregates_line_errors():
    with pytest.raises(PlanParseFailure) as info:
        parse_plan("Grasp the rod\nExplode the flask\nHeat the wire")
    errors = info.value.errors
    assert [n for n, _ in errors] == [2, 3]
    assert isinstance(errors[0][1], UnknownVerb)
    assert isinstance(errors[1][1], ArityMismatch)


def test_empty_plan_raises_no_steps():
    with pytest.raises(NoSteps):
        parse_plan("\n\n  \n")


def test_bind_predicate_phrases():
    cases = {
        "the solution becomes colorless": ("colorless", None),
        "the pink color disappears": ("colorless", None),
        "the solution turns pink": ("pink", None),
        "bubbles stop forming": ("bubbles", None),
        "crystals appear": ("crystals", None),
        "white mist is visible": ("mist", None),
        "the solid has dissolved": ("dissolved", None),
        "the flame turns blue-green": ("flame_color", "blue-green"),
        "the flame is brick-red": ("flame_color", "brick-red"),
    }
    for text, (predicate, argument) in cases.items():
        cond = Condition(text=text)
        bind_predicate(cond)
        assert cond.predicate == predicate, text
        assert cond.argument == argument, text


def test_bind_predicate_unknown_phrase_stays_none():
    cond = Condition(text="the vibes are right")
    bind_predicate(cond)
    assert cond.predicate is None


def test_validate_plan_warns_on_unknown_objects():
    plan = parse_plan("Grasp the moon rock\nHeat the platinum wire over a flame")
    warnings = validate_plan(plan, ("The platinum wire on a holder", "Alcohol lamp"))
    assert len(warnings) == 1
    assert warnings[0].step_index == 1
    assert warnings[0].slot_role == "object"
    assert "moon rock" in warnings[0].message


def test_validate_plan_binds_until_predicates():
    plan = parse_plan(
        "Pour acid from the cylinder into the beaker until the solution becomes colorless"
    )
    assert plan.steps[0].until.predicate is None
    validate_plan(plan, ())
    assert plan.steps[0].until.predicate == "colorless"


@settings(max_examples=300, deadline=None)
@given(
    st.text(min_size=1, max_size=60).filter(
        lambda s: s.strip() and s.strip().split()[0].casefold()
        not in {v.value.casefold() for v in PrimitiveVerb}
    )
)
def test_fuzzed_non_menu_lines_never_parse(line):
    with pytest.raises(Exception) as info:
        parse_primitive(line)
    assert isinstance(info.value, (UnknownVerb, EmptyLine))
