"""Bench state: containers, contents, flags, and canonical serialization.

A scene is a flat registry of containers on a 640x480 canvas. Contents are
(species, phase, amount) triples where solids and dissolved species carry
moles and free liquid carries milliliters. Scenes serialize to canonical JSON
(sorted keys, stable container order) and deserialize losslessly, which is
what the monitor inspects and what replay compares byte-for-byte.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

from .substances import species_info, UnknownSpecies

CANVAS_WIDTH = 640
CANVAS_HEIGHT = 480

CONTAINER_KINDS = (
    "beaker",
    "test_tube",
    "graduated_cylinder",
    "evaporator",
    "alcohol_lamp",
    "rack",
    "platinum_wire",
    "glass_rod",
    "spatula",
)

ARMS = ("left", "right")

#: tolerance below which a molar excess counts as zero (ties read as colorless)
MOL_EPS = 1e-9


class MissingContainer(KeyError):
    def __init__(self, text: str):
        super().__init__(f"no container matches {text!r}")
        self.text = text


class SceneError(ValueError):
    pass


@dataclass
class Substance:
    species: str
    phase: str  # "solid" | "liquid" | "aqueous"
    amount: float  # mol (solid/aqueous) or mL (liquid)

    def __post_init__(self) -> None:
        info = species_info(self.species)
        if self.phase not in info.colors:
            raise SceneError(f"{self.species} has no {self.phase} phase")
        if self.amount < 0:
            raise SceneError(f"negative amount for {self.species}")

    @property
    def color(self) -> str:
        return species_info(self.species).colors[self.phase]


@dataclass
class Flags:
    mist: bool = False
    bubbles: bool = False
    crystals: bool = False
    milky: bool = False
    precipitate_color: str | None = None
    flame_color: str | None = None
    indicator_color: str | None = None


@dataclass
class Container:
    container_id: str
    kind: str
    name: str
    pose: tuple[int, int, int, int]  # x, y, width, height on the canvas
    contents: list[Substance] = field(default_factory=list)
    flags: Flags = field(default_factory=Flags)
    dipped_species: str | None = None
    material: str | None = None  # e.g. "Pt" or "Fe" for wires
    linked_container_id: str | None = None  # evaporator -> heated vessel
    distractor: bool = False

    def __post_init__(self) -> None:
        if self.kind not in CONTAINER_KINDS:
            raise SceneError(f"unknown container kind {self.kind!r}")

    def amount_of(self, species: str, phase: str | None = None) -> float:
        return sum(
            s.amount
            for s in self.contents
            if s.species == species and (phase is None or s.phase == phase)
        )

    def add(self, species: str, phase: str, amount: float) -> None:
        if amount <= 0:
            return
        for s in self.contents:
            if s.species == species and s.phase == phase:
                s.amount += amount
                return
        self.contents.append(Substance(species, phase, amount))

    def remove(self, species: str, phase: str, amount: float) -> float:
        """Remove up to ``amount``; returns what was actually removed."""
        taken = 0.0
        for s in self.contents:
            if s.species == species and s.phase == phase:
                take = min(s.amount, amount - taken)
                s.amount -= take
                taken += take
        self.contents = [s for s in self.contents if s.amount > MOL_EPS]
        return taken

    def prune(self) -> None:
        self.contents = [s for s in self.contents if s.amount > MOL_EPS]


@dataclass
class Ambiguity:
    candidate_ids: tuple[str, ...]
    target_id: str

    @property
    def k(self) -> int:
        return len(self.candidate_ids)


@dataclass
class LabScene:
    task_id: str
    seed: int
    containers: dict[str, Container] = field(default_factory=dict)
    held: dict[str, str | None] = field(default_factory=lambda: {"left": None, "right": None})
    lamp_lit: bool = False
    events: list[dict] = field(default_factory=list)
    ambiguity: Ambiguity | None = None
    canvas: tuple[int, int] = (CANVAS_WIDTH, CANVAS_HEIGHT)

    def add_container(self, container: Container) -> Container:
        if container.container_id in self.containers:
            raise SceneError(f"duplicate container id {container.container_id}")
        x, y, w, h = container.pose
        if not (0 <= x and 0 <= y and x + w <= self.canvas[0] and y + h <= self.canvas[1]):
            raise SceneError(f"{container.container_id} pose {container.pose} leaves the canvas")
        self.containers[container.container_id] = container
        return container

    def container(self, container_id: str) -> Container:
        try:
            return self.containers[container_id]
        except KeyError:
            raise MissingContainer(container_id) from None

    def held_ids(self) -> tuple[str, ...]:
        return tuple(cid for cid in self.held.values() if cid)

    def log_event(self, **fields) -> None:
        self.events.append(dict(sorted(fields.items())))

    def last_event(self, verb: str | None = None) -> dict | None:
        for event in reversed(self.events):
            if verb is None or event.get("verb") == verb:
                return event
        return None

    # -- canonical serialization ------------------------------------------

    def to_json_dict(self) -> dict:
        containers = []
        for cid in sorted(self.containers):
            c = self.containers[cid]
            containers.append(
                {
                    "container_id": c.container_id,
                    "kind": c.kind,
                    "name": c.name,
                    "pose": list(c.pose),
                    "contents": [
                        {"species": s.species, "phase": s.phase, "amount": s.amount}
                        for s in c.contents
                    ],
                    "flags": asdict(c.flags),
                    "dipped_species": c.dipped_species,
                    "material": c.material,
                    "linked_container_id": c.linked_container_id,
                    "distractor": c.distractor,
                }
            )
        doc = {
            "task_id": self.task_id,
            "seed": self.seed,
            "canvas": list(self.canvas),
            "containers": containers,
            "held": dict(self.held),
            "lamp_lit": self.lamp_lit,
            "events": self.events,
            "ambiguity": (
                {"candidate_ids": list(self.ambiguity.candidate_ids), "target_id": self.ambiguity.target_id}
                if self.ambiguity
                else None
            ),
        }
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LabScene":
        scene = cls(task_id=doc["task_id"], seed=doc["seed"], canvas=tuple(doc["canvas"]))
        for cdoc in doc["containers"]:
            container = Container(
                container_id=cdoc["container_id"],
                kind=cdoc["kind"],
                name=cdoc["name"],
                pose=tuple(cdoc["pose"]),
                contents=[Substance(**s) for s in cdoc["contents"]],
                flags=Flags(**cdoc["flags"]),
                dipped_species=cdoc["dipped_species"],
                material=cdoc["material"],
                linked_container_id=cdoc["linked_container_id"],
                distractor=cdoc["distractor"],
            )
            scene.containers[container.container_id] = container
        scene.held = dict(doc["held"])
        scene.lamp_lit = doc["lamp_lit"]
        scene.events = [dict(e) for e in doc["events"]]
        if doc.get("ambiguity"):
            scene.ambiguity = Ambiguity(
                candidate_ids=tuple(doc["ambiguity"]["candidate_ids"]),
                target_id=doc["ambiguity"]["target_id"],
            )
        return scene

    @classmethod
    def from_json(cls, text: str) -> "LabScene":
        return cls.from_json_dict(json.loads(text))

    # -- slot resolution ---------------------------------------------------

    def resolve(self, slot_text: str) -> Container:
        """Map free slot text onto a container.

        Scoring prefers exact name equality, then name containment (shorter
        enclosing names win), then a species-content hit, then a bare kind
        word; ties break on definition order. Raises MissingContainer when
        nothing scores.
        """
        folded = slot_text.casefold().strip()
        best: tuple[float, int] | None = None
        best_container: Container | None = None
        from .substances import find_species_in_text  # local import to avoid cycles

        slot_species = find_species_in_text(folded)
        for order, container in enumerate(self.containers.values()):
            name = container.name.casefold()
            score = 0.0
            if folded == name:
                score = 1000.0
            elif folded in name:
                score = 500.0 - 0.1 * len(name)
            elif name in folded:
                score = 400.0 + 0.1 * len(name)
            if score == 0.0 and slot_species:
                present = {s.species for s in container.contents}
                if container.dipped_species:
                    present.add(container.dipped_species)
                overlap = [sp for sp in slot_species if sp in present]
                if overlap:
                    score = 200.0 + len(overlap)
            if score == 0.0:
                kind_word = container.kind.replace("_", " ")
                if kind_word in folded or (kind_word == "beaker" and "cup" in folded):
                    score = 50.0
            if score > 0 and (best is None or score > best[0]):
                best = (score, order)
                best_container = container
        if best_container is None:
            raise MissingContainer(slot_text)
        return best_container
