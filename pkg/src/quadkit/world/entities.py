"""Scene entities: targets, obstacles, tunnels, bars, receptacles, letter boxes.

Geometry is deliberately schematic: every entity is an upright box or
cylinder described by a 2D pose and bounding extents, which keeps collision
and rendering exact and cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..taxonomy import Color


class EntityKind(str, Enum):
    TARGET_OBJECT = "target_object"
    OBSTACLE = "obstacle"
    TUNNEL = "tunnel"
    BAR = "bar"
    RECEPTACLE = "receptacle"
    LETTER_BOX = "letter_box"
    CARRIED_BALL = "carried_ball"


# Kinds whose footprint blocks the robot. Targets and receptacles are
# non-solid: the robot stops at the target and leans over the receptacle.
SOLID_KINDS = (EntityKind.OBSTACLE, EntityKind.LETTER_BOX)

ROUND_SHAPES = ("ball", "cylinder", "sphere", "tube", "vase", "trashcan", "fan")


@dataclass
class Entity:
    kind: EntityKind
    shape: str                      # catalog category or proxy name
    color: Color
    pose: tuple[float, float, float]      # x, y, yaw
    dims: tuple[float, float, float]      # bounding extents dx, dy, dz
    attributes: dict = field(default_factory=dict)

    def __post_init__(self):
        if min(self.dims) <= 0:
            raise ValueError(f"entity dims must be positive, got {self.dims}")

    @property
    def is_round(self) -> bool:
        return self.shape in ROUND_SHAPES

    def footprint_distance(self, x: float, y: float) -> float:
        """Distance from (x, y) to this entity's footprint boundary (<= 0 inside)."""
        ex, ey, _ = self.pose
        if self.is_round:
            return ((x - ex) ** 2 + (y - ey) ** 2) ** 0.5 - self.dims[0] / 2.0
        hx, hy = self.dims[0] / 2.0, self.dims[1] / 2.0
        dx = max(abs(x - ex) - hx, 0.0)
        dy = max(abs(y - ey) - hy, 0.0)
        if dx == 0.0 and dy == 0.0:
            return max(abs(x - ex) - hx, abs(y - ey) - hy)
        return (dx * dx + dy * dy) ** 0.5

    def contains_point(self, x: float, y: float) -> bool:
        return self.footprint_distance(x, y) <= 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "shape": self.shape,
            "color": self.color.value,
            "pose": list(self.pose),
            "dims": list(self.dims),
            "attributes": dict(self.attributes),
        }

    @staticmethod
    def from_dict(d: dict) -> "Entity":
        return Entity(
            EntityKind(d["kind"]), d["shape"], Color(d["color"]),
            tuple(d["pose"]), tuple(d["dims"]), dict(d.get("attributes", {})),
        )


def tunnel_passable_halfwidth(tunnel: Entity, body_height: float) -> float:
    """Lateral clearance inside a tunnel at a given realized body height.

    Rectangular cross-sections keep the full passage width; triangular ones
    narrow linearly toward the apex.
    """
    passage = tunnel.attributes["passage_width"] / 2.0
    if tunnel.attributes.get("cross_section") == "triangle":
        height = tunnel.attributes["height"]
        return passage * max(0.0, 1.0 - body_height / height)
    return passage
