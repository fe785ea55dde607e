"""Task vocabulary shared across the toolkit: skills, colors, gaits, speed
levels, the object catalog, and the structured task description.

The seen/unseen partition drives both scene sampling and the generalization
eval splits, so the catalog lives here rather than in the language layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum


class Skill(str, Enum):
    DISTINGUISH = "distinguish"
    GO_TO = "go_to"
    GO_AVOID = "go_avoid"
    GO_THROUGH = "go_through"
    CRAWL = "crawl"
    UNLOAD = "unload"


class Color(str, Enum):
    GREEN = "green"
    RED = "red"
    BLUE = "blue"
    YELLOW = "yellow"
    GOLD = "gold"
    PINK = "pink"
    ORANGE = "orange"
    PURPLE = "purple"


SEEN_COLORS = (Color.GREEN, Color.RED, Color.BLUE, Color.YELLOW)
UNSEEN_COLORS = (Color.GOLD, Color.PINK, Color.ORANGE, Color.PURPLE)


class GaitName(str, Enum):
    TROT = "trot"
    BOUND = "bound"
    PACE = "pace"
    PRONK = "pronk"


# Phase-offset triples (theta_1, theta_2, theta_3) per named gait, following
# the command convention of the low-level tracking controller.
GAIT_PHASES = {
    GaitName.TROT: (0.5, 0.0, 0.0),
    GaitName.BOUND: (0.0, 0.5, 0.0),
    GaitName.PACE: (0.0, 0.0, 0.5),
    GaitName.PRONK: (0.0, 0.0, 0.0),
}


class SpeedLevel(str, Enum):
    SLOW = "slow"
    NORMAL = "normal"
    FAST = "fast"


class Split(str, Enum):
    SEEN_SIM = "seen_sim"
    SEEN_REAL = "seen_real"
    UNSEEN_OBJECT = "unseen_object"
    UNSEEN_VERBAL = "unseen_verbal"


# ---------------------------------------------------------------------------
# Object catalog

BASIC_SHAPES = ("cube", "ball", "cylinder")
INDOOR_FURNITURE = ("bookshelf", "oven", "vase", "cooker", "drawers", "fan", "sofa")
OUTDOOR_FACILITIES = ("trashcan", "bench")
UNSEEN_CATEGORIES = ("pillow", "computer", "window")
# Unseen same-category shape variants used by the generalization split.
SHAPE_VARIANTS = {"cube": "block", "ball": "sphere", "cylinder": "tube"}
LETTERS = ("a", "b", "c", "d")
TUNNEL_CATEGORIES = ("rectangle tunnel", "triangle tunnel")
RECEPTACLE_CATEGORY = "traybox"
BAR_CATEGORY = "bar"


@dataclass(frozen=True)
class ObjectRef:
    """A catalog entry: category plus optional color or printed letter."""

    category: str
    color: Color | None = None
    letter: str | None = None

    def phrase(self) -> str:
        if self.letter is not None:
            return self.letter
        if self.color is not None:
            return f"{self.color.value} {self.category}"
        return self.category

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "color": self.color.value if self.color else None,
            "letter": self.letter,
        }

    @staticmethod
    def from_dict(d: dict) -> "ObjectRef":
        color = Color(d["color"]) if d.get("color") else None
        return ObjectRef(d["category"], color, d.get("letter"))


def seen_object_pool(skill: Skill) -> list[ObjectRef]:
    """All objects a seen-split task of this skill may reference."""
    if skill in (Skill.GO_TO, Skill.GO_AVOID):
        pool = [ObjectRef(s, c) for s in BASIC_SHAPES for c in SEEN_COLORS]
        pool += [ObjectRef(cat) for cat in INDOOR_FURNITURE + OUTDOOR_FACILITIES]
        return pool
    if skill is Skill.GO_THROUGH:
        return [ObjectRef(t, c) for t in TUNNEL_CATEGORIES for c in SEEN_COLORS]
    if skill is Skill.CRAWL:
        return [ObjectRef(BAR_CATEGORY)]
    if skill is Skill.UNLOAD:
        return [ObjectRef(RECEPTACLE_CATEGORY, c) for c in SEEN_COLORS]
    if skill is Skill.DISTINGUISH:
        return [ObjectRef("letter", letter=l) for l in LETTERS]
    raise ValueError(f"unknown skill {skill!r}")


def unseen_variant(obj: ObjectRef, index: int = 0) -> ObjectRef:
    """Map a seen object to its unseen-split counterpart.

    Colored objects move to the unseen palette (and basic shapes to their
    same-category variant); furniture cycles through the unseen categories.
    """
    if obj.letter is not None:
        return obj
    if obj.color is not None:
        new_color = UNSEEN_COLORS[index % len(UNSEEN_COLORS)]
        category = SHAPE_VARIANTS.get(obj.category, obj.category)
        return ObjectRef(category, new_color, None)
    if obj.category == BAR_CATEGORY:
        return obj
    return ObjectRef(UNSEEN_CATEGORIES[index % len(UNSEEN_CATEGORIES)])


@dataclass(frozen=True)
class TaskSpec:
    """Structured description of one task instance: skill, object, speed, gait."""

    skill: Skill
    obj: ObjectRef
    speed: SpeedLevel
    gait: GaitName
    split: Split = Split.SEEN_SIM

    def with_split(self, split: Split) -> "TaskSpec":
        return replace(self, split=split)

    def to_dict(self) -> dict:
        return {
            "skill": self.skill.value,
            "object": self.obj.to_dict(),
            "speed": self.speed.value,
            "gait": self.gait.value,
            "split": self.split.value,
        }

    @staticmethod
    def from_dict(d: dict) -> "TaskSpec":
        return TaskSpec(
            Skill(d["skill"]),
            ObjectRef.from_dict(d["object"]),
            SpeedLevel(d["speed"]),
            GaitName(d["gait"]),
            Split(d.get("split", "seen_sim")),
        )
