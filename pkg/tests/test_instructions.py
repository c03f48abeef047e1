import pytest

from labloop.grammar import PrimitiveVerb, parse_primitive
from labloop.instructions import (
    PLAIN_TEMPLATES,
    PROMPTED_TEMPLATES,
    PROPRIO_DIM,
    BadProprio,
    MissingView,
    ObservationError,
    PolicyObservation,
    PromptedImage,
    compose_observation,
    pick_instruction,
    substitute_colors,
    template_bank,
)
from labloop.marks import VisualMark
from labloop.raster import RasterImage
from labloop.simlab.render import VIEWS

ALL_VERBS = tuple(PrimitiveVerb)


def _views():
    return {name: RasterImage.blank(8, 6) for name in VIEWS}


def test_template_bank_sizes():
    for verb in ALL_VERBS:
        assert len(PROMPTED_TEMPLATES[verb]) == 5
        assert len(PLAIN_TEMPLATES[verb]) == 3


def test_prompted_templates_reference_an_image_and_plain_ones_do_not():
    for verb in ALL_VERBS:
        for text in PROMPTED_TEMPLATES[verb]:
            lowered = text.lower()
            assert "image" in lowered or "frame" in lowered, verb
            assert "[COLOR]" in text, verb
        for text in PLAIN_TEMPLATES[verb]:
            lowered = text.lower()
            assert "image" not in lowered and "frame" not in lowered, verb
            assert "[COLOR]" not in text


def test_color_substitution_box_vs_point():
    text = "The [COLOR] bounding box and the [COLOR] target point."
    assert substitute_colors(text, PrimitiveVerb.GRASP) == (
        "The blue bounding box and the amber target point."
    )
    assert substitute_colors(text, PrimitiveVerb.HEAT) == (
        "The blue bounding box and the red target point."
    )


def test_grasp_points_are_amber_and_target_points_red():
    for verb, word in ((PrimitiveVerb.GRASP, "amber"), (PrimitiveVerb.POUR, "amber"),
                       (PrimitiveVerb.DIP, "red"), (PrimitiveVerb.PRESS, "red")):
        out = substitute_colors("the [COLOR] point", verb)
        assert out == f"the {word} point"


def test_no_color_slots_survive_substitution():
    for verb in ALL_VERBS:
        for prompted in (True, False):
            for text in template_bank(verb, prompted):
                assert "[COLOR]" not in substitute_colors(text, verb)


def test_pick_instruction_is_deterministic_in_seed_and_step():
    a = pick_instruction(PrimitiveVerb.GRASP, True, seed=7, step_index=2)
    b = pick_instruction(PrimitiveVerb.GRASP, True, seed=7, step_index=2)
    assert a == b
    variants = {pick_instruction(PrimitiveVerb.GRASP, True, seed=7, step_index=i) for i in range(40)}
    assert len(variants) > 1  # different steps reach different variants


def test_picked_instruction_comes_from_the_bank():
    for verb in ALL_VERBS:
        for prompted in (True, False):
            got = pick_instruction(verb, prompted, seed=3, step_index=0)
            bank = {substitute_colors(t, verb) for t in template_bank(verb, prompted)}
            assert got in bank


def test_compose_observation_plain():
    step = parse_primitive("Grasp the glass rod")
    obs = compose_observation(_views(), [0.0] * PROPRIO_DIM, step, None, seed=5, step_index=0)
    assert obs.prompt_flag is False and obs.prompted is None
    assert obs.instruction in {substitute_colors(t, step.verb) for t in PLAIN_TEMPLATES[step.verb]}
    assert len(obs.proprio) == PROPRIO_DIM


def test_compose_observation_prompted():
    step = parse_primitive("Grasp the glass rod")
    base = RasterImage.blank(64, 48)
    prompted = PromptedImage.build(base, [VisualMark("box", (4, 4, 20, 20), "region")])
    obs = compose_observation(_views(), [0.1] * PROPRIO_DIM, step, prompted, seed=5, step_index=0)
    assert obs.prompt_flag is True
    assert obs.prompted.rendered.to_ppm() != base.to_ppm()
    assert obs.instruction in {substitute_colors(t, step.verb) for t in PROMPTED_TEMPLATES[step.verb]}


def test_compose_observation_missing_view():
    step = parse_primitive("Grasp the glass rod")
    views = _views()
    del views["top"]
    with pytest.raises(MissingView):
        compose_observation(views, [0.0] * PROPRIO_DIM, step, None, seed=5, step_index=0)


def test_compose_observation_bad_proprio():
    step = parse_primitive("Grasp the glass rod")
    with pytest.raises(BadProprio):
        compose_observation(_views(), [0.0] * (PROPRIO_DIM - 1), step, None, seed=5, step_index=0)


def test_observation_prompt_flag_must_mirror_prompted():
    with pytest.raises(ObservationError):
        PolicyObservation(
            views=_views(),
            proprio=tuple([0.0] * PROPRIO_DIM),
            instruction="x",
            prompted=None,
            prompt_flag=True,
        )


def test_prompted_image_build_validates_marks():
    base = RasterImage.blank(32, 32)
    with pytest.raises(ValueError, match="out_of_bounds"):
        PromptedImage.build(base, [VisualMark("point", (200, 200), "target_point")])
