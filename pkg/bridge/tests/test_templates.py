from labbridge.templates import (
    DEFAULT_TEMPLATES,
    REQUIRED_PLACEHOLDERS,
    ROLES,
    render,
)

PLAN_PAYLOAD = {
    "experiment_id": "e",
    "task": "acid_base",
    "apparatus": ["A beaker with NaOH solid", "A beaker with water and a glass rod"],
    "primitive_menu": [
        "Grasp [rod-like object]",
        "Pour [liquid] from [container] into [container] until [condition]",
        "Stir [mixture]",
        "Transfer [solid] from [container] to [container]",
        "Dip [object] into the [solution] in [container]",
        "Heat [object] over a flame",
        "Press the button of [object]",
    ],
}


def test_every_role_has_a_default_template_with_its_slots():
    assert set(DEFAULT_TEMPLATES) == set(ROLES)
    for role in ROLES:
        for slot in REQUIRED_PLACEHOLDERS[role]:
            assert slot in DEFAULT_TEMPLATES[role]


def test_plan_render_fills_task_apparatus_and_menu():
    text = render("/plan", PLAN_PAYLOAD, DEFAULT_TEMPLATES)
    assert "tasked with acid_base using the materials" in text
    assert "Task: acid_base." in text
    assert "- A beaker with NaOH solid\n- A beaker with water and a glass rod" in text
    for entry in PLAN_PAYLOAD["primitive_menu"]:
        assert f"- {entry}" in text
    assert "[TASK]" not in text and "[APPARATUS]" not in text and "[MENU]" not in text


def test_plan_render_keeps_condition_brackets_verbatim():
    text = render("/plan", PLAN_PAYLOAD, DEFAULT_TEMPLATES)
    # the output-format sentence and the menu entries keep their slot syntax
    assert "If given until [condition] sentence" in text
    assert "Pour [liquid] from [container] into [container] until [condition]" in text


def test_step_render_fills_number_and_primitive():
    payload = {"experiment_id": "e", "step_no": 3, "step_text": "Stir NaOH solution",
               "image_b64": "aW1n"}
    for endpoint in ("/guideline", "/visual_prompt", "/verify"):
        text = render(endpoint, payload, DEFAULT_TEMPLATES)
        assert "step 3, Stir NaOH solution" in text
        assert "[NUMBER]" not in text and "[PRIMITIVE]" not in text


def test_verify_render_matches_the_fixed_wording():
    payload = {"experiment_id": "e", "step_no": 1, "step_text": "Grasp glass rod",
               "image_b64": "aW1n"}
    assert render("/verify", payload, DEFAULT_TEMPLATES) == (
        "Judge whether the step 1, Grasp glass rod, has successfully finished "
        "from the image provided. If yes, directly return Y, else return N."
    )


def test_visual_prompt_render_keeps_the_json_example_intact():
    payload = {"experiment_id": "e", "step_no": 2, "step_text": "Grasp glass rod",
               "image_b64": "aW1n"}
    text = render("/visual_prompt", payload, DEFAULT_TEMPLATES)
    assert '[{"type": "box", "coordinates":[xmin, ymin, xmax, ymax]}' in text
    assert '{"type":"point", "coordinates":[x, y]}]' in text


def test_step_text_containing_slot_syntax_is_not_resubstituted():
    payload = {"experiment_id": "e", "step_no": 7, "step_text": "Heat [NUMBER] over a flame",
               "image_b64": "aW1n"}
    text = render("/verify", payload, DEFAULT_TEMPLATES)
    # [NUMBER] was filled before the step text landed, so the step's own
    # bracket text survives
    assert "step 7, Heat [NUMBER] over a flame," in text
