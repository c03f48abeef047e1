"""Closed registry of bench species, their phases, colors, and flame ions."""
from __future__ import annotations

from dataclasses import dataclass

PHASES = ("solid", "liquid", "aqueous")


class UnknownSpecies(KeyError):
    pass


class NoFlameEntry(KeyError):
    def __init__(self, species: str):
        super().__init__(f"no flame color tabulated for {species!r}")
        self.species = species


@dataclass(frozen=True)
class SpeciesInfo:
    species: str
    colors: dict[str, str]  # phase -> color tag
    aliases: tuple[str, ...] = ()
    flame_ion: str | None = None
    soluble: bool = False  # dissolves into the aqueous phase when stirred in water


def _info(species, colors, aliases=(), flame_ion=None, soluble=False):
    return SpeciesInfo(species, colors, tuple(aliases), flame_ion, soluble)


REGISTRY: dict[str, SpeciesInfo] = {
    s.species: s
    for s in (
        _info("NaOH", {"solid": "white", "aqueous": "colorless"},
              ("sodium hydroxide",), "Na+", soluble=True),
        _info("HCl", {"aqueous": "colorless"}, ("hydrochloric acid",)),
        _info("CuSO4", {"solid": "blue", "aqueous": "blue"},
              ("copper sulfate", "copper(II) sulfate", "copper sulphate"), "Cu2+", soluble=True),
        _info("NaCl", {"solid": "white", "aqueous": "colorless"},
              ("sodium chloride", "salt"), "Na+", soluble=True),
        _info("Cu(OH)2", {"solid": "pale-blue"},
              ("copper hydroxide", "copper(II) hydroxide"), "Cu2+"),
        _info("CuO", {"solid": "black"}, ("copper oxide", "copper(II) oxide")),
        _info("phenolphthalein", {"aqueous": "colorless"}, ("indicator",)),
        _info("H2O", {"liquid": "colorless"}, ("water",)),
        _info("Na2CuCl4", {"aqueous": "green"}, ("sodium tetrachlorocuprate",)),
        _info("CaO", {"solid": "white"}, ("calcium oxide", "quicklime")),
        _info("Ca(OH)2", {"solid": "white", "aqueous": "milky"},
              ("calcium hydroxide", "limewater"), "Ca2+"),
        _info("H2O2", {"aqueous": "colorless"}, ("hydrogen peroxide",)),
        _info("Mn(OH)2", {"solid": "brown"}, ("manganese hydroxide",), "Mn2+"),
        _info("Fe", {"solid": "gray"}, ("iron",)),
        _info("Cu", {"solid": "red"}, ("copper",)),
        _info("Zn", {"solid": "gray"}, ("zinc",)),
        _info("NaHCO3", {"solid": "white", "aqueous": "colorless"},
              ("sodium bicarbonate", "baking soda"), "Na+", soluble=True),
        _info("CaCl2", {"solid": "white", "aqueous": "colorless"},
              ("calcium chloride",), "Ca2+", soluble=True),
        _info("LiCl", {"solid": "white", "aqueous": "colorless"},
              ("lithium chloride",), "Li+", soluble=True),
        _info("SrCl2", {"solid": "white", "aqueous": "colorless"},
              ("strontium chloride",), "Sr2+", soluble=True),
        _info("MnCl2", {"solid": "white", "aqueous": "colorless"},
              ("manganese chloride",), "Mn2+", soluble=True),
    )
}

#: emission colors by ion
FLAME_COLORS: dict[str, str] = {
    "Cu2+": "blue-green",
    "Ca2+": "brick-red",
    "Li+": "purplish-red",
    "Na+": "yellow",
    "Mn2+": "yellow-green",
    "Sr2+": "magenta",
}

_SUPERSCRIPTS = str.maketrans({"⁺": "+", "⁻": "-", "²": "2", "³": "3"})


def species_info(species: str) -> SpeciesInfo:
    try:
        return REGISTRY[species]
    except KeyError:
        raise UnknownSpecies(species) from None


def flame_color_of(species_or_ion: str) -> str:
    """Emission color for a species (via its ion) or a bare ion symbol."""
    key = species_or_ion.translate(_SUPERSCRIPTS)
    if key in FLAME_COLORS:
        return FLAME_COLORS[key]
    info = REGISTRY.get(key)
    if info is not None and info.flame_ion in FLAME_COLORS:
        return FLAME_COLORS[info.flame_ion]
    raise NoFlameEntry(species_or_ion)


def find_species_in_text(text: str) -> list[str]:
    """Species whose id or alias appears in free text, most specific first.

    Ordered by longest matched name so "copper sulfate" outranks the bare
    "copper" alias; ties keep registry order (stable).
    """
    folded = text.casefold()
    hits: list[tuple[int, int, str]] = []
    for order, (species, info) in enumerate(REGISTRY.items()):
        names = (species.casefold(),) + tuple(a.casefold() for a in info.aliases)
        matched = [name for name in names if name in folded]
        if matched:
            hits.append((-max(len(m) for m in matched), order, species))
    hits.sort()
    return [species for _, _, species in hits]
