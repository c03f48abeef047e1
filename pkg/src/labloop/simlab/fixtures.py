"""Bench fixtures: the seven single-primitive drills, five complete tasks,
the generalization suite, and the cup-ambiguity setups.

Each fixture carries the apparatus inventory handed to planners, the scripted
plan the mock planner returns, human-readable chain labels for reports, and a
builder producing the fully specified scene. Same (task_id, seed) always
builds an identical scene.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .scene import Ambiguity, Container, LabScene, Substance


class UnknownTask(KeyError):
    def __init__(self, task_id: str):
        super().__init__(f"unknown task {task_id!r}")
        self.task_id = task_id


@dataclass(frozen=True)
class TaskFixture:
    task_id: str
    title: str
    apparatus: tuple[str, ...]
    plan_text: str
    chain: tuple[str, ...]
    builder: Callable[[int], LabScene]
    ambiguity_k: int | None = None


def _sub(species: str, phase: str, amount: float) -> Substance:
    return Substance(species=species, phase=phase, amount=amount)


def _scene(task_id: str, seed: int, *containers: Container, lamp_lit: bool = False) -> LabScene:
    scene = LabScene(task_id=task_id, seed=seed, lamp_lit=lamp_lit)
    for c in containers:
        scene.add_container(c)
    return scene


# --- single-primitive drills -------------------------------------------------


def _build_grasp_rod(seed: int) -> LabScene:
    return _scene(
        "grasp_rod",
        seed,
        Container("rack", "rack", "test tube rack", (260, 300, 120, 60)),
        Container("rod", "glass_rod", "glass rod", (300, 100, 8, 120)),
    )


def _build_pour_liquid(seed: int) -> LabScene:
    return _scene(
        "pour_liquid",
        seed,
        Container("beaker_left", "beaker", "left beaker", (150, 260, 100, 140)),
        Container(
            "beaker_right", "beaker", "right beaker", (390, 260, 100, 140),
            contents=[_sub("H2O", "liquid", 50.0)],
        ),
    )


def _build_stir_solution(seed: int) -> LabScene:
    return _scene(
        "stir_solution",
        seed,
        Container(
            "beaker_salt", "beaker", "beaker with salt solution", (260, 260, 120, 140),
            contents=[_sub("NaCl", "solid", 0.05), _sub("H2O", "liquid", 100.0)],
        ),
        Container("rod", "glass_rod", "glass rod", (140, 120, 8, 120)),
    )


def _build_transfer_solid(seed: int) -> LabScene:
    return _scene(
        "transfer_solid",
        seed,
        Container(
            "beaker_salt", "beaker", "beaker with salt", (140, 280, 100, 120),
            contents=[_sub("NaCl", "solid", 0.05)],
        ),
        Container(
            "beaker_water", "beaker", "beaker with water", (400, 260, 100, 140),
            contents=[_sub("H2O", "liquid", 20.0)],
        ),
        Container("spatula", "spatula", "spatula", (280, 180, 8, 90)),
    )


def _build_dip_wire(seed: int) -> LabScene:
    return _scene(
        "dip_wire",
        seed,
        Container("wire", "platinum_wire", "platinum wire", (300, 140, 6, 100), material="Pt"),
        Container(
            "beaker_cuso4", "beaker", "beaker with copper sulfate solution", (420, 260, 120, 140),
            contents=[_sub("CuSO4", "aqueous", 0.05), _sub("H2O", "liquid", 50.0)],
        ),
    )


def _build_heat_wire(seed: int) -> LabScene:
    return _scene(
        "heat_wire",
        seed,
        Container("lamp", "alcohol_lamp", "alcohol lamp", (260, 280, 80, 120)),
        Container("wire", "platinum_wire", "platinum wire", (420, 150, 6, 100), material="Pt"),
        lamp_lit=True,
    )


def _build_press_button(seed: int) -> LabScene:
    return _scene(
        "press_button",
        seed,
        Container(
            "evaporator", "evaporator", "evaporator", (240, 310, 160, 90),
            linked_container_id="vessel",
        ),
        Container(
            "vessel", "beaker", "beaker with salt solution", (280, 240, 80, 70),
            contents=[_sub("NaCl", "aqueous", 0.02), _sub("H2O", "liquid", 20.0)],
        ),
    )


# --- complete tasks ----------------------------------------------------------


def _build_mix_nacl_cuso4(seed: int) -> LabScene:
    return _scene(
        "mix_nacl_cuso4",
        seed,
        Container(
            "beaker_nacl", "beaker", "beaker with sodium chloride solution", (150, 260, 110, 140),
            contents=[_sub("NaCl", "aqueous", 0.05), _sub("H2O", "liquid", 50.0)],
        ),
        Container(
            "beaker_cuso4", "beaker", "beaker with copper sulfate solution", (390, 260, 110, 140),
            contents=[_sub("CuSO4", "aqueous", 0.05), _sub("H2O", "liquid", 50.0)],
        ),
    )


def _build_decompose_cuoh2(seed: int) -> LabScene:
    return _scene(
        "decompose_cuoh2",
        seed,
        Container("lamp", "alcohol_lamp", "alcohol lamp", (180, 280, 80, 120)),
        Container(
            "tube", "test_tube", "test tube with copper hydroxide", (420, 180, 30, 130),
            contents=[_sub("Cu(OH)2", "solid", 0.02)],
        ),
        Container("rack", "rack", "test tube rack", (400, 310, 120, 50)),
        lamp_lit=True,
    )


def _build_flame_test(task_id: str, species: str):
    solution_names = {
        "CuSO4": "copper sulfate solution",
        "NaCl": "sodium chloride solution",
        "CaCl2": "calcium chloride solution",
        "LiCl": "lithium chloride solution",
        "MnCl2": "manganese chloride solution",
        "SrCl2": "strontium chloride solution",
    }
    name = solution_names[species]

    def build(seed: int) -> LabScene:
        return _scene(
            task_id,
            seed,
            Container("lamp", "alcohol_lamp", "alcohol lamp", (200, 280, 80, 120)),
            Container("wire", "platinum_wire", "platinum wire", (340, 140, 6, 100), material="Pt"),
            Container(
                "beaker", "beaker", f"beaker with {name}", (460, 260, 120, 140),
                contents=[_sub(species, "aqueous", 0.05), _sub("H2O", "liquid", 50.0)],
            ),
            lamp_lit=True,
        )

    plan = (
        "Grasp platinum wire\n"
        "Heat platinum wire over a flame\n"
        f"Dip platinum wire into the {name} in beaker\n"
        "Heat platinum wire over a flame"
    )
    apparatus = ("A lit alcohol lamp", "Platinum wire", f"A beaker with {name}")
    chain = ("Grasp Platinum Wire", "Heat Platinum Wire", "Insert into Solution", "Heat Platinum Wire")
    return build, plan, apparatus, chain


def _build_evaporate_nacl(seed: int) -> LabScene:
    return _scene(
        "evaporate_nacl",
        seed,
        Container(
            "beaker_salt", "beaker", "beaker with salt", (80, 280, 90, 110),
            contents=[_sub("NaCl", "solid", 0.05)],
        ),
        Container(
            "evaporator", "evaporator", "evaporator", (220, 310, 200, 90),
            linked_container_id="vessel",
        ),
        Container(
            "vessel", "beaker", "beaker with water", (260, 240, 100, 70),
            contents=[_sub("H2O", "liquid", 20.0)],
        ),
    )


def _build_acid_base(seed: int) -> LabScene:
    return _scene(
        "acid_base",
        seed,
        Container(
            "beaker_naoh", "beaker", "beaker with NaOH solid", (60, 280, 100, 130),
            contents=[_sub("NaOH", "solid", 0.05)],
        ),
        Container(
            "beaker_water", "beaker", "beaker with water", (220, 260, 110, 150),
            contents=[_sub("H2O", "liquid", 100.0)],
        ),
        Container("rod_in_beaker", "glass_rod", "glass rod in water beaker", (260, 180, 8, 90)),
        Container(
            "beaker_ph", "beaker", "beaker with phenolphthalein indicator", (380, 290, 80, 110),
            contents=[_sub("phenolphthalein", "aqueous", 0.001), _sub("H2O", "liquid", 10.0)],
        ),
        Container(
            "cylinder", "graduated_cylinder", "graduated cylinder", (500, 240, 50, 170),
            contents=[_sub("HCl", "aqueous", 0.2), _sub("H2O", "liquid", 40.0)],
        ),
        Container("rack", "rack", "test tube rack", (560, 320, 70, 60)),
        Container("rod", "glass_rod", "glass rod", (585, 200, 8, 120)),
    )


# --- generalization chemistries ----------------------------------------------


def _build_cao_water(seed: int) -> LabScene:
    return _scene(
        "cao_water",
        seed,
        Container(
            "beaker_cao", "beaker", "beaker with calcium oxide", (160, 280, 100, 120),
            contents=[_sub("CaO", "solid", 0.05)],
        ),
        Container(
            "beaker_water", "beaker", "beaker with water", (400, 260, 100, 140),
            contents=[_sub("H2O", "liquid", 50.0)],
        ),
    )


def _build_h2o2_mn(seed: int) -> LabScene:
    return _scene(
        "h2o2_mn",
        seed,
        Container(
            "dish_mn", "beaker", "beaker with manganese hydroxide", (160, 300, 90, 100),
            contents=[_sub("Mn(OH)2", "solid", 0.01)],
        ),
        Container(
            "beaker_h2o2", "beaker", "beaker with hydrogen peroxide", (400, 260, 110, 140),
            contents=[_sub("H2O2", "aqueous", 0.1), _sub("H2O", "liquid", 50.0)],
        ),
    )


def _build_fe_cuso4(seed: int) -> LabScene:
    return _scene(
        "fe_cuso4",
        seed,
        Container("wire_fe", "platinum_wire", "iron wire", (300, 140, 6, 100), material="Fe"),
        Container(
            "beaker_cuso4", "beaker", "beaker with copper sulfate solution", (430, 260, 120, 140),
            contents=[_sub("CuSO4", "aqueous", 0.05), _sub("H2O", "liquid", 50.0)],
        ),
    )


def _build_zn_hcl(seed: int) -> LabScene:
    return _scene(
        "zn_hcl",
        seed,
        Container(
            "beaker_zn", "beaker", "beaker with zinc granules", (160, 300, 90, 100),
            contents=[_sub("Zn", "solid", 0.05)],
        ),
        Container(
            "beaker_hcl", "beaker", "beaker with hydrochloric acid", (400, 260, 110, 140),
            contents=[_sub("HCl", "aqueous", 0.1), _sub("H2O", "liquid", 30.0)],
        ),
    )


def _build_naoh_cuso4(seed: int) -> LabScene:
    return _scene(
        "naoh_cuso4",
        seed,
        Container(
            "beaker_naoh", "beaker", "beaker with sodium hydroxide solution", (160, 260, 110, 140),
            contents=[_sub("NaOH", "aqueous", 0.05), _sub("H2O", "liquid", 50.0)],
        ),
        Container(
            "beaker_cuso4", "beaker", "beaker with copper sulfate solution", (400, 260, 110, 140),
            contents=[_sub("CuSO4", "aqueous", 0.05), _sub("H2O", "liquid", 50.0)],
        ),
    )


def _build_nahco3_hcl(seed: int) -> LabScene:
    return _scene(
        "nahco3_hcl",
        seed,
        Container(
            "beaker_soda", "beaker", "beaker with sodium bicarbonate", (160, 300, 90, 100),
            contents=[_sub("NaHCO3", "solid", 0.05)],
        ),
        Container(
            "beaker_hcl", "beaker", "beaker with hydrochloric acid", (400, 260, 110, 140),
            contents=[_sub("HCl", "aqueous", 0.1), _sub("H2O", "liquid", 30.0)],
        ),
    )


# --- cup ambiguity -----------------------------------------------------------


def _build_cups(task_id: str, k: int):
    def build(seed: int) -> LabScene:
        source = Container(
            "source", "beaker", "source beaker", (60, 260, 90, 140),
            contents=[_sub("H2O", "liquid", 50.0)],
        )
        if k == 2:
            cups = [
                Container("cup_left", "beaker", "beaker on the left", (260, 260, 100, 140), distractor=True),
                Container("cup_right", "beaker", "beaker on the right", (440, 260, 100, 140)),
            ]
            target = "cup_right"
        else:
            cups = [
                Container("cup_left", "beaker", "beaker on the left", (230, 260, 90, 140), distractor=True),
                Container("cup_middle", "beaker", "beaker in the middle", (360, 260, 90, 140)),
                Container("cup_right", "beaker", "beaker on the right", (490, 260, 90, 140), distractor=True),
            ]
            target = "cup_middle"
        scene = _scene(task_id, seed, source, *cups)
        scene.ambiguity = Ambiguity(
            candidate_ids=tuple(c.container_id for c in cups), target_id=target
        )
        return scene

    return build


# --- registry ----------------------------------------------------------------


def _fixture(task_id, title, apparatus, plan_text, chain, builder, ambiguity_k=None):
    return TaskFixture(task_id, title, tuple(apparatus), plan_text, tuple(chain), builder, ambiguity_k)


_FLAME_SPECIES = {
    "flame_test_cuso4": "CuSO4",
    "flame_test_na": "NaCl",
    "flame_test_ca": "CaCl2",
    "flame_test_li": "LiCl",
    "flame_test_mn": "MnCl2",
    "flame_test_sr": "SrCl2",
}


def _make_registry() -> dict[str, TaskFixture]:
    fixtures = [
        _fixture(
            "grasp_rod", "Grasp the glass rod",
            ("A glass rod in a test tube rack",),
            "Grasp glass rod",
            ("Grasp Glass Rod",),
            _build_grasp_rod,
        ),
        _fixture(
            "pour_liquid", "Pour liquid between beakers",
            ("A right beaker with water", "An empty left beaker"),
            "Pour water from right beaker into left beaker",
            ("Pour Liquid",),
            _build_pour_liquid,
        ),
        _fixture(
            "stir_solution", "Stir the solution",
            ("A beaker with salt solution", "A glass rod"),
            "Stir salt solution",
            ("Stir the Solution",),
            _build_stir_solution,
        ),
        _fixture(
            "transfer_solid", "Transfer the solid",
            ("A beaker with salt", "A beaker with water", "A spatula"),
            "Transfer salt from beaker with salt to beaker with water",
            ("Transfer the Solid",),
            _build_transfer_solid,
        ),
        _fixture(
            "dip_wire", "Insert the wire into solution",
            ("Platinum wire", "A beaker with copper sulfate solution"),
            "Dip platinum wire into the copper sulfate solution in beaker",
            ("Insert into Solution",),
            _build_dip_wire,
        ),
        _fixture(
            "heat_wire", "Heat the wire",
            ("A lit alcohol lamp", "Platinum wire"),
            "Heat platinum wire over a flame",
            ("Heat Platinum Wire",),
            _build_heat_wire,
        ),
        _fixture(
            "press_button", "Press the button",
            ("An evaporator with a power button", "A beaker with salt solution"),
            "Press the button of evaporator",
            ("Press the Button",),
            _build_press_button,
        ),
        _fixture(
            "mix_nacl_cuso4", "Mix sodium chloride and copper sulfate",
            ("A beaker with sodium chloride solution", "A beaker with copper sulfate solution"),
            "Pour sodium chloride solution from beaker with sodium chloride solution"
            " into beaker with copper sulfate solution",
            ("Pour Liquid",),
            _build_mix_nacl_cuso4,
        ),
        _fixture(
            "decompose_cuoh2", "Heat-decompose copper hydroxide",
            ("A lit alcohol lamp", "A test tube with copper hydroxide in a rack"),
            "Grasp test tube with copper hydroxide\n"
            "Heat test tube with copper hydroxide over a flame",
            ("Grasp Test Tube", "Heat Test Tube"),
            _build_decompose_cuoh2,
        ),
        _fixture(
            "evaporate_nacl", "Evaporate brine to crystals",
            ("A beaker with salt", "A beaker with water on an evaporator",
             "An evaporator with a power button"),
            "Transfer salt from beaker with salt to beaker with water\n"
            "Press the button of evaporator",
            ("Transfer NaCl Solid", "Press the Button"),
            _build_evaporate_nacl,
        ),
        _fixture(
            "acid_base", "Neutralize sodium hydroxide with acid",
            ("A beaker with NaOH solid", "A beaker with water and a glass rod",
             "A beaker with phenolphthalein indicator",
             "A graduated cylinder containing hydrochloric acid",
             "A glass rod in a test tube rack"),
            "1. Transfer NaOH solid from beaker with NaOH solid to beaker with water\n"
            "2. Grasp glass rod\n"
            "3. Stir NaOH solution\n"
            "4. Pour phenolphthalein from beaker with phenolphthalein indicator into beaker with water\n"
            "5. Pour hydrochloric acid from graduated cylinder into beaker with water"
            " until the solution becomes colorless",
            ("Transfer NaOH Solid", "Grasp Glass Rod", "Stir the Solution",
             "Add Phenolphthalein", "Add HCl Acid"),
            _build_acid_base,
        ),
        _fixture(
            "cao_water", "Slake calcium oxide",
            ("A beaker with calcium oxide", "A beaker with water"),
            "Pour water from beaker with water into beaker with calcium oxide",
            ("Pour Liquid",),
            _build_cao_water,
        ),
        _fixture(
            "h2o2_mn", "Decompose hydrogen peroxide on a catalyst",
            ("A beaker with manganese hydroxide", "A beaker with hydrogen peroxide"),
            "Transfer manganese hydroxide from beaker with manganese hydroxide"
            " to beaker with hydrogen peroxide",
            ("Transfer the Solid",),
            _build_h2o2_mn,
        ),
        _fixture(
            "fe_cuso4", "Displace copper with iron",
            ("Iron wire", "A beaker with copper sulfate solution"),
            "Dip iron wire into the copper sulfate solution in beaker",
            ("Insert into Solution",),
            _build_fe_cuso4,
        ),
        _fixture(
            "zn_hcl", "React zinc with hydrochloric acid",
            ("A beaker with zinc granules", "A beaker with hydrochloric acid"),
            "Transfer zinc from beaker with zinc granules to beaker with hydrochloric acid",
            ("Transfer the Solid",),
            _build_zn_hcl,
        ),
        _fixture(
            "naoh_cuso4", "Precipitate copper hydroxide",
            ("A beaker with sodium hydroxide solution", "A beaker with copper sulfate solution"),
            "Pour sodium hydroxide solution from beaker with sodium hydroxide solution"
            " into beaker with copper sulfate solution",
            ("Pour Liquid",),
            _build_naoh_cuso4,
        ),
        _fixture(
            "nahco3_hcl", "React baking soda with acid",
            ("A beaker with sodium bicarbonate", "A beaker with hydrochloric acid"),
            "Transfer sodium bicarbonate from beaker with sodium bicarbonate"
            " to beaker with hydrochloric acid",
            ("Transfer the Solid",),
            _build_nahco3_hcl,
        ),
        _fixture(
            "cups_ambiguity_2", "Pour into the named cup of two",
            ("A source beaker with water", "Two similar empty beakers"),
            "Pour water from source beaker into beaker on the right",
            ("Pour Liquid",),
            _build_cups("cups_ambiguity_2", 2),
            ambiguity_k=2,
        ),
        _fixture(
            "cups_ambiguity_3", "Pour into the named cup of three",
            ("A source beaker with water", "Three similar empty beakers"),
            "Pour water from source beaker into beaker in the middle",
            ("Pour Liquid",),
            _build_cups("cups_ambiguity_3", 3),
            ambiguity_k=3,
        ),
    ]
    for task_id, species in _FLAME_SPECIES.items():
        build, plan, apparatus, chain = _build_flame_test(task_id, species)
        title = f"Flame test ({species})"
        fixtures.append(_fixture(task_id, title, apparatus, plan, chain, build))
    return {f.task_id: f for f in fixtures}


REGISTRY: dict[str, TaskFixture] = _make_registry()

PRIMITIVE_TASKS = (
    "grasp_rod", "pour_liquid", "stir_solution", "transfer_solid",
    "dip_wire", "heat_wire", "press_button",
)
COMPLETE_TASKS = (
    "mix_nacl_cuso4", "decompose_cuoh2", "flame_test_cuso4", "evaporate_nacl", "acid_base",
)


def get_fixture(task_id: str) -> TaskFixture:
    try:
        return REGISTRY[task_id]
    except KeyError:
        raise UnknownTask(task_id) from None


def init_scene(task_id: str, seed: int) -> LabScene:
    """Build the fully specified scene for a task; deterministic per (task, seed)."""
    return get_fixture(task_id).builder(seed)
