import pytest
from hypothesis import given, strategies as st

from labbridge.normalize import (
    NormalizationFailure,
    extract_first_array,
    normalize_guideline,
    normalize_marks,
    normalize_plan,
    normalize_verify,
)


# --- plan ---------------------------------------------------------------------


def test_plan_is_byte_for_byte():
    text = "1. Grasp glass rod\n2. Stir NaOH solution\n"
    assert normalize_plan(text) is text


# --- guideline ------------------------------------------------------------------


def test_guideline_strips_whitespace():
    assert normalize_guideline("  Hold the rod by the middle.\n") == "Hold the rod by the middle."


def test_guideline_literal_none_becomes_null():
    assert normalize_guideline("None") is None
    assert normalize_guideline("None\n") is None
    assert normalize_guideline("  None  ") is None


def test_guideline_near_none_stays_text():
    # only the literal word maps to null; anything else is a real guideline
    assert normalize_guideline("none") == "none"
    assert normalize_guideline("None.") == "None."
    assert normalize_guideline("None applicable here") == "None applicable here"


# --- mark extraction -------------------------------------------------------------


def test_bare_array_is_found():
    assert extract_first_array('[{"type": "point", "coordinates": [1, 2]}]') == [
        {"type": "point", "coordinates": [1, 2]}
    ]


def test_array_inside_prose_is_found():
    text = 'Sure! Here are the marks: [{"type": "point", "coordinates": [3, 4]}] for step 2.'
    assert extract_first_array(text) == [{"type": "point", "coordinates": [3, 4]}]


def test_non_json_brackets_are_skipped():
    text = 'See [figure 2] and [the items before]; marks: [1, 2] done.'
    assert extract_first_array(text) == [1, 2]


def test_no_array_raises():
    with pytest.raises(NormalizationFailure):
        extract_first_array("I cannot mark anything in this image.")
    with pytest.raises(NormalizationFailure):
        extract_first_array('{"marks": "none"}')


def test_array_in_string_literal_is_not_fooled():
    # the '[' inside the quoted string parses as part of the string, so the
    # first *array* is still the outer one
    text = 'reply: ["a [bracket] inside", 5]'
    assert extract_first_array(text) == ["a [bracket] inside", 5]


# --- mark validation -------------------------------------------------------------


def test_good_marks_pass_through():
    reply = (
        'prose [{"type": "box", "coordinates": [1, 2, 3, 4], "role": "region"},'
        ' {"type": "point", "coordinates": [5, 6]}] trailing'
    )
    assert normalize_marks(reply) == [
        {"type": "box", "coordinates": [1, 2, 3, 4], "role": "region"},
        {"type": "point", "coordinates": [5, 6]},
    ]


def test_empty_list_is_a_valid_answer():
    assert normalize_marks("[]") == []
    assert normalize_marks("Nothing to mark. []") == []


@pytest.mark.parametrize(
    "reply",
    [
        '[{"type": "dot", "coordinates": [1, 2]}]',  # unknown kind
        '[{"type": "point", "coordinates": [1, 2, 3]}]',  # wrong arity
        '[{"type": "box", "coordinates": [1, 2, 3]}]',  # wrong arity
        '[{"type": "point", "coordinates": [1.5, 2]}]',  # float coordinate
        '[{"type": "point", "coordinates": [true, 2]}]',  # boolean coordinate
        '[{"type": "point", "coordinates": [1, 2], "role": "anchor"}]',  # bad role
        '[{"type": "point", "coordinates": [1, 2], "color": "red"}]',  # extra field
        '[{"coordinates": [1, 2]}]',  # no type
        "[1, 2]",  # not objects
        '["point"]',
    ],
)
def test_malformed_marks_fail(reply):
    with pytest.raises(NormalizationFailure):
        normalize_marks(reply)


# --- verdicts --------------------------------------------------------------------


def test_bare_verdicts():
    assert normalize_verify("Y\n") == "Y"
    assert normalize_verify("N") == "N"
    assert normalize_verify("  Y") == "Y"


def test_wordy_verdicts_keep_their_first_letter():
    assert normalize_verify("Yes, the rod is grasped.") == "Y"
    assert normalize_verify("No - the beaker is still full.") == "N"


@pytest.mark.parametrize("reply", ["", "   \n", "yes", "n", "maybe", "OK", "1"])
def test_bad_verdicts_fail(reply):
    with pytest.raises(NormalizationFailure):
        normalize_verify(reply)


def test_corrupted_verdict_message_is_stable():
    # the conformance fixtures byte-compare this message
    with pytest.raises(NormalizationFailure) as info:
        normalize_verify("yes\n")
    assert str(info.value) == "verify reply did not start with Y or N: 'yes'"


@given(st.text(max_size=80))
def test_verify_accepts_exactly_leading_y_or_n(reply):
    stripped = reply.strip()
    if stripped[:1] in ("Y", "N"):
        assert normalize_verify(reply) == stripped[0]
    else:
        with pytest.raises(NormalizationFailure):
            normalize_verify(reply)
