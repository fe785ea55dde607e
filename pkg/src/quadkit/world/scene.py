"""Scene description: the entity layout for one task instance.

Scenes serialize to JSON (see docs/format.md) so layouts can be inspected,
edited, and replayed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..taxonomy import TaskSpec
from .entities import Entity, EntityKind
from .state import WorldState


@dataclass
class Scene:
    task: TaskSpec
    entities: list[Entity]
    target_index: int
    goal_xy: tuple[float, float]
    start_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)
    metadata: dict = field(default_factory=dict)

    @property
    def target(self) -> Entity:
        return self.entities[self.target_index]

    def initial_state(self, standing_height: float = 0.25) -> WorldState:
        """Build the episode-start world state (robot at the origin)."""
        from .state import BodyState

        carried = None
        entities = list(self.entities)
        if self.task.skill.value == "unload":
            carried = Entity(
                kind=EntityKind.CARRIED_BALL, shape="ball",
                color=self.target.color, pose=self.start_pose,
                dims=(0.12, 0.12, 0.12),
            )
        return WorldState(
            robot_pose=self.start_pose,
            body=BodyState(h_z=standing_height),
            carried_object=carried,
            entities=entities,
        )

    def to_dict(self) -> dict:
        return {
            "task": self.task.to_dict(),
            "entities": [e.to_dict() for e in self.entities],
            "target_index": self.target_index,
            "goal_xy": list(self.goal_xy),
            "start_pose": list(self.start_pose),
            "metadata": dict(self.metadata),
        }

    @staticmethod
    def from_dict(d: dict) -> "Scene":
        return Scene(
            task=TaskSpec.from_dict(d["task"]),
            entities=[Entity.from_dict(e) for e in d["entities"]],
            target_index=d["target_index"],
            goal_xy=tuple(d["goal_xy"]),
            start_pose=tuple(d.get("start_pose", (0.0, 0.0, 0.0))),
            metadata=dict(d.get("metadata", {})),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @staticmethod
    def load(path: str | Path) -> "Scene":
        return Scene.from_dict(json.loads(Path(path).read_text()))
