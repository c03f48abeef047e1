"""Discrete transition rules and condition predicates for the bench.

apply_primitive maps (scene, step, outcome) to the next scene purely and in
place: the rubric category decides how much physically happened (spill
fractions, activation), then a small rule table decides what the chemistry
does. Every call appends one event record to the scene, which is what the
monitor's execution predicates read.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..grammar import Condition, PrimitiveTask, PrimitiveVerb
from .rubric import RubricOutcome
from .scene import Container, LabScene, MOL_EPS, MissingContainer
from .substances import FLAME_COLORS, species_info, find_species_in_text


class RuleNotApplicable(ValueError):
    pass


class UnboundPredicate(ValueError):
    def __init__(self, cond: Condition):
        super().__init__(f"condition {cond.text!r} has no bound predicate")
        self.condition = cond


@dataclass(frozen=True)
class SimParams:
    """Config-exposed physical constants."""

    acid_mol_per_pour: float = 0.02  # H+ delivered by one repetition of an until-pour
    evap_ml_per_press: float = 20.0  # water boiled off by one successful press
    spill_complete_fraction: float = 1.0  # poured quantity lost when spilling completely
    spill_slight_fraction: float = 0.1  # poured quantity lost when spilling slightly
    displacement_deposit_mol: float = 0.001  # nominal Cu deposited in the iron displacement


DEFAULT_PARAMS = SimParams()

#: fraction of the moved quantity that reaches the destination, per category
_DELIVERY = {
    "spill_all": 0.0,
    "spill_slight": None,  # 1 - spill_slight_fraction, resolved at run time
    "controlled": 1.0,
    "clean": 1.0,
}

_BASES = ("NaOH", "Ca(OH)2")


def _delivered_fraction(category: str, params: SimParams) -> float:
    if category == "spill_all":
        return 1.0 - params.spill_complete_fraction
    if category == "spill_slight":
        return 1.0 - params.spill_slight_fraction
    return 1.0


def hydroxide_excess(container: Container) -> float:
    """Mol of dissolved base not yet neutralized."""
    return sum(container.amount_of(base, "aqueous") for base in _BASES)


def container_color(container: Container) -> str:
    """The observable solution color, indicator first, else dominant species."""
    if container.flags.indicator_color:
        return container.flags.indicator_color
    if container.flags.milky:
        return "milky"
    colored = [
        s
        for s in container.contents
        if s.amount > MOL_EPS and s.color not in ("colorless",)
    ]
    if not colored:
        return "colorless"
    best = max(colored, key=lambda s: s.amount)
    return best.color


def _update_indicator(container: Container) -> None:
    if container.amount_of("phenolphthalein") > MOL_EPS:
        pink = hydroxide_excess(container) > MOL_EPS
        container.flags.indicator_color = "pink" if pink else "colorless"
    else:
        container.flags.indicator_color = None


def _react_in_place(container: Container) -> list[str]:
    """Run every applicable contact reaction inside one container.

    Returns the rule tags that fired (for the event record).
    """
    fired: list[str] = []

    # NaCl + CuSO4 -> Na2CuCl4 (green complex)
    n = min(container.amount_of("NaCl", "aqueous"), container.amount_of("CuSO4", "aqueous"))
    if n > MOL_EPS:
        container.remove("NaCl", "aqueous", n)
        container.remove("CuSO4", "aqueous", n)
        container.add("Na2CuCl4", "aqueous", n)
        fired.append("complexation")

    # NaOH + CuSO4 -> Cu(OH)2 blue precipitate
    n = min(container.amount_of("NaOH", "aqueous"), container.amount_of("CuSO4", "aqueous"))
    if n > MOL_EPS:
        container.remove("NaOH", "aqueous", n)
        container.remove("CuSO4", "aqueous", n)
        container.add("Cu(OH)2", "solid", n)
        container.flags.precipitate_color = "blue"
        fired.append("double_displacement_precipitate")

    # HCl + NaOH -> NaCl + water (neutralization)
    n = min(container.amount_of("HCl", "aqueous"), container.amount_of("NaOH", "aqueous"))
    if n > MOL_EPS:
        container.remove("HCl", "aqueous", n)
        container.remove("NaOH", "aqueous", n)
        container.add("NaCl", "aqueous", n)
        fired.append("neutralization")

    # CaO + water -> Ca(OH)2 (milky suspension)
    n = container.amount_of("CaO", "solid")
    if n > MOL_EPS and container.amount_of("H2O", "liquid") > MOL_EPS:
        container.remove("CaO", "solid", n)
        container.add("Ca(OH)2", "aqueous", n)
        container.flags.milky = True
        fired.append("combination")

    # H2O2 decomposes on the Mn(OH)2 catalyst -> oxygen bubbles
    n = container.amount_of("H2O2", "aqueous")
    if n > MOL_EPS and container.amount_of("Mn(OH)2", "solid") > MOL_EPS:
        container.remove("H2O2", "aqueous", n)
        container.flags.bubbles = True
        fired.append("catalytic_decomposition")

    # Zn + HCl -> hydrogen bubbles
    if (
        container.amount_of("Zn", "solid") > MOL_EPS
        and container.amount_of("HCl", "aqueous") > MOL_EPS
    ):
        consumed = min(container.amount_of("Zn", "solid"), container.amount_of("HCl", "aqueous") / 2)
        container.remove("HCl", "aqueous", 2 * consumed)
        container.remove("Zn", "solid", consumed)
        container.flags.bubbles = True
        fired.append("single_displacement_gas")

    # NaHCO3 + HCl -> CO2 bubbles
    n = min(container.amount_of("NaHCO3", "solid") + container.amount_of("NaHCO3", "aqueous"),
            container.amount_of("HCl", "aqueous"))
    if n > MOL_EPS:
        left = n - container.remove("NaHCO3", "solid", n)
        if left > MOL_EPS:
            container.remove("NaHCO3", "aqueous", left)
        container.remove("HCl", "aqueous", n)
        container.add("NaCl", "aqueous", n)
        container.flags.bubbles = True
        fired.append("carbonate_gas")

    _update_indicator(container)
    container.prune()
    return fired


def apply_primitive(
    scene: LabScene,
    step: PrimitiveTask,
    outcome: RubricOutcome,
    params: SimParams = DEFAULT_PARAMS,
) -> LabScene:
    """Apply one primitive's outcome to the scene (mutates and returns it)."""
    if outcome.verb is not step.verb:
        raise RuleNotApplicable(f"outcome for {outcome.verb.value} applied to {step.verb.value}")
    verb = step.verb
    event: dict = {
        "verb": verb.value,
        "category": outcome.category,
        "score": outcome.score,
        "success": outcome.success,
        "rules": [],
    }

    if verb is PrimitiveVerb.GRASP:
        target = scene.resolve(step.slot("object"))
        if outcome.success:
            for arm, held in scene.held.items():
                if held == target.container_id:
                    scene.held[arm] = None
            scene.held["right"] = target.container_id
        event["target"] = target.container_id

    elif verb is PrimitiveVerb.POUR:
        source = scene.resolve(step.slot("source_container"))
        dest = scene.resolve(step.slot("dest_container"))
        event["source"] = source.container_id
        event["dest"] = dest.container_id
        event["delivered_fraction"] = 0.0
        poured = outcome.category in ("spill_all", "spill_slight", "controlled")
        if poured:
            fraction = _delivered_fraction(outcome.category, params)
            event["delivered_fraction"] = fraction
            acid = source.amount_of("HCl", "aqueous")
            if step.until is not None and acid > MOL_EPS:
                # dosed pour: one repetition moves one acid dose
                dose = min(params.acid_mol_per_pour, acid)
                source.remove("HCl", "aqueous", dose)
                dest.add("HCl", "aqueous", dose * fraction)
                event["moved"] = [["HCl", "aqueous", dose]]
            else:
                moved = []
                for s in list(source.contents):
                    if s.phase in ("liquid", "aqueous") and s.amount > MOL_EPS:
                        qty = s.amount
                        source.remove(s.species, s.phase, qty)
                        dest.add(s.species, s.phase, qty * fraction)
                        moved.append([s.species, s.phase, qty])
                event["moved"] = moved
            source.prune()
            event["rules"] = _react_in_place(dest)
            _update_indicator(source)

    elif verb is PrimitiveVerb.TRANSFER:
        source = scene.resolve(step.slot("source_container"))
        dest = scene.resolve(step.slot("dest_container"))
        event["source"] = source.container_id
        event["dest"] = dest.container_id
        event["delivered_fraction"] = 0.0
        moved_any = outcome.category in ("spill_all", "spill_slight", "clean")
        if moved_any:
            fraction = _delivered_fraction(outcome.category, params)
            event["delivered_fraction"] = fraction
            wanted = set(find_species_in_text(step.slot("solid")))
            moved = []
            for s in list(source.contents):
                if s.phase != "solid":
                    continue
                if wanted and s.species not in wanted:
                    continue
                qty = s.amount
                source.remove(s.species, "solid", qty)
                dest.add(s.species, "solid", qty * fraction)
                moved.append([s.species, "solid", qty])
            event["moved"] = moved
            event["rules"] = _react_in_place(dest)

    elif verb is PrimitiveVerb.DIP:
        wire = scene.resolve(step.slot("object"))
        bath = scene.resolve(step.slot("container"))
        event["target"] = wire.container_id
        event["bath"] = bath.container_id
        if outcome.success:
            solutes = [
                s.species
                for s in bath.contents
                if s.phase == "aqueous" and s.species != "H2O" and s.amount > MOL_EPS
            ]
            wire.dipped_species = solutes[0] if solutes else None
            if wire.material == "Fe" and bath.amount_of("CuSO4", "aqueous") > MOL_EPS:
                deposit = min(params.displacement_deposit_mol, bath.amount_of("CuSO4", "aqueous"))
                bath.remove("CuSO4", "aqueous", deposit)
                bath.add("Cu", "solid", deposit)
                bath.flags.precipitate_color = "red"
                event["rules"] = ["single_displacement_deposit"]

    elif verb is PrimitiveVerb.HEAT:
        target = scene.resolve(step.slot("object"))
        event["target"] = target.container_id
        if outcome.success:
            if target.dipped_species is not None:
                info = species_info(target.dipped_species)
                if info.flame_ion in FLAME_COLORS:
                    target.flags.flame_color = FLAME_COLORS[info.flame_ion]
                    event["rules"] = ["flame_emission"]
            n = target.amount_of("Cu(OH)2", "solid")
            if n > MOL_EPS:
                target.remove("Cu(OH)2", "solid", n)
                target.add("CuO", "solid", n)
                target.flags.mist = True
                event["rules"] = list(event["rules"]) + ["thermal_decomposition"]

    elif verb is PrimitiveVerb.STIR:
        target = scene.resolve(step.slot("mixture"))
        event["target"] = target.container_id
        if outcome.success:
            has_water = target.amount_of("H2O", "liquid") > MOL_EPS
            dissolved = []
            if has_water:
                for s in list(target.contents):
                    if s.phase == "solid" and species_info(s.species).soluble:
                        qty = s.amount
                        target.remove(s.species, "solid", qty)
                        target.add(s.species, "aqueous", qty)
                        dissolved.append(s.species)
            event["dissolved"] = dissolved
            event["rules"] = _react_in_place(target)

    elif verb is PrimitiveVerb.PRESS:
        target = scene.resolve(step.slot("object"))
        event["target"] = target.container_id
        activated = outcome.category in ("too_forceful", "clean")
        event["activated"] = activated
        if activated and target.kind == "evaporator":
            vessel = (
                scene.container(target.linked_container_id)
                if target.linked_container_id
                else target
            )
            water = vessel.amount_of("H2O", "liquid")
            boiled = min(params.evap_ml_per_press, water)
            vessel.remove("H2O", "liquid", boiled)
            remaining = vessel.amount_of("H2O", "liquid")
            vessel.flags.bubbles = remaining > MOL_EPS
            if remaining <= MOL_EPS:
                solutes = [s for s in vessel.contents if s.phase == "aqueous" and s.species != "H2O"]
                for s in list(solutes):
                    qty = s.amount
                    vessel.remove(s.species, "aqueous", qty)
                    vessel.add(s.species, "solid", qty)
                vessel.flags.crystals = any(s.phase == "solid" for s in vessel.contents)
            event["rules"] = ["evaporation"]
            event["boiled_ml"] = boiled

    scene.log_event(**event)
    return scene


def check_condition(scene: LabScene, cond: Condition) -> bool:
    """Evaluate a bound condition predicate on the scene (pure)."""
    if cond.predicate is None:
        raise UnboundPredicate(cond)
    predicate = cond.predicate

    def targets() -> list[Container]:
        if cond.target:
            return [scene.container(cond.target)]
        return list(scene.containers.values())

    if predicate == "colorless":
        pool = (
            [scene.container(cond.target)]
            if cond.target
            else [c for c in scene.containers.values() if c.flags.indicator_color is not None]
            or list(scene.containers.values())
        )
        return all(container_color(c) == "colorless" for c in pool)
    if predicate == "pink":
        return any(container_color(c) == "pink" for c in targets())
    if predicate == "bubbles":
        return any(c.flags.bubbles for c in targets())
    if predicate == "crystals":
        return any(c.flags.crystals for c in targets())
    if predicate == "mist":
        return any(c.flags.mist for c in targets())
    if predicate == "dissolved":
        return all(
            not (s.phase == "solid" and species_info(s.species).soluble and s.amount > MOL_EPS)
            for c in targets()
            for s in c.contents
        )
    if predicate == "flame_color":
        if cond.argument is None:
            return any(c.flags.flame_color is not None for c in targets())
        return any(c.flags.flame_color == cond.argument for c in targets())
    raise UnboundPredicate(cond)
