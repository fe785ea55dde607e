"""Evaluation policies: scripted oracle, uniform random, and a trajectory
nearest-neighbor imitator.

Policies consume an observation plus instruction text and emit action tokens;
only the oracle additionally receives the live simulator through ``bind``
(it is the privileged reference, not a learned model). The nearest-neighbor
policy is an intentionally simple behavior-cloning stand-in: it featurizes
the pooled image and the parsed instruction, finds the k closest recorded
steps, and takes a per-position majority vote over their token vectors.
"""

from __future__ import annotations

from typing import Iterable, Protocol, runtime_checkable

import numpy as np

from ..actions import (
    ActionCommand,
    ActionSpaceSpec,
    ActionTokens,
    clamp_to_space,
    default_action_space,
    tokenize,
)
from ..config import RunConfig
from ..language import CATEGORY_VOCAB, parse_instruction
from ..store.episodes import Episode, EpisodeStore
from ..taxonomy import Color, GaitName, Skill, SpeedLevel, TaskSpec, LETTERS
from ..world.camera import Observation
from ..world.scene import Scene
from ..world.sim import Simulator
from .. import expert


@runtime_checkable
class Policy(Protocol):
    def reset(self) -> None: ...

    def act(self, obs: Observation, instruction: str) -> ActionTokens: ...


class OraclePolicy:
    """Privileged scripted controller; the upper reference line in reports."""

    def __init__(self, run: RunConfig | None = None,
                 space: ActionSpaceSpec | None = None):
        self.run = run or RunConfig()
        self.space = space or default_action_space()
        self._sim: Simulator | None = None
        self._tracker: expert.PathTracker | None = None

    def reset(self) -> None:
        self._sim = None
        self._tracker = None

    def bind(self, sim: Simulator, scene: Scene) -> None:
        """Attach the live episode; called by the harness before rollout."""
        from ..expert.collect import plan_for_task

        self._sim = sim
        try:
            path = plan_for_task(scene, self.run)
        except expert.NoPathError:
            self._tracker = None
            return
        self._tracker = expert.PathTracker(
            scene.task, scene, path, self.run.expert, self.run.sim
        )

    def act(self, obs: Observation, instruction: str) -> ActionTokens:
        if self._sim is None:
            raise RuntimeError("oracle must be bound to a simulator first")
        if self._tracker is None:
            # No feasible plan: stand still and give up via terminate.
            return tokenize(clamp_to_space(ActionCommand(terminate=True), self.space),
                            self.space)
        cmd = self._tracker.command(self._sim.state)
        return tokenize(clamp_to_space(cmd, self.space), self.space)


class RandomPolicy:
    """Uniform tokens over the action vocabulary; the lower reference line."""

    def __init__(self, space: ActionSpaceSpec | None = None, seed: int = 0):
        self.space = space or default_action_space()
        self._rng = np.random.default_rng(seed)

    def reset(self) -> None:
        pass

    def act(self, obs: Observation, instruction: str) -> ActionTokens:
        lo = self.space.token_offset
        bins = self._rng.integers(lo, lo + self.space.bin_count, size=11)
        term = self._rng.integers(lo, lo + 2)
        return ActionTokens(tuple(int(t) for t in bins) + (int(term),))


# -- nearest-neighbor behavior cloning -------------------------------------------

_POOL_ROWS, _POOL_COLS = 6, 8
_SPEC_WEIGHT = 4.0  # instruction features dominate neighbor choice


def _pool_image(image: np.ndarray) -> np.ndarray:
    h, w, _ = image.shape
    rh, rw = h // _POOL_ROWS, w // _POOL_COLS
    pooled = (
        image[: rh * _POOL_ROWS, : rw * _POOL_COLS]
        .reshape(_POOL_ROWS, rh, _POOL_COLS, rw, 3)
        .mean(axis=(1, 3))
    )
    return pooled.reshape(-1) / 255.0


def _one_hot(options: tuple, value) -> np.ndarray:
    vec = np.zeros(len(options) + 1)
    vec[options.index(value) if value in options else len(options)] = 1.0
    return vec


def _encode_spec(spec: TaskSpec) -> np.ndarray:
    return _SPEC_WEIGHT * np.concatenate([
        _one_hot(tuple(Skill), spec.skill),
        _one_hot(tuple(SpeedLevel), spec.speed),
        _one_hot(tuple(GaitName), spec.gait),
        _one_hot(tuple(Color), spec.obj.color),
        _one_hot(tuple(CATEGORY_VOCAB) + ("letter",), spec.obj.category),
        _one_hot(LETTERS, spec.obj.letter),
    ])


def _featurize(image: np.ndarray, spec: TaskSpec) -> np.ndarray:
    return np.concatenate([_pool_image(image), _encode_spec(spec)])


class KnnPolicy:
    """Vote the next tokens from the k nearest recorded steps."""

    def __init__(self, features: np.ndarray, labels: np.ndarray, k: int,
                 space: ActionSpaceSpec):
        if features.shape[0] != labels.shape[0]:
            raise ValueError("features and labels must align")
        if not 1 <= k <= features.shape[0]:
            raise ValueError(
                f"k must be in [1, {features.shape[0]}] for this training set, got {k}"
            )
        self.features = features.astype(np.float32)
        self.labels = labels.astype(np.int64)
        self.k = k
        self.space = space
        self._sq = (self.features ** 2).sum(axis=1)
        self._vocab = space.token_offset + space.bin_count

    def reset(self) -> None:
        pass

    def act(self, obs: Observation, instruction: str) -> ActionTokens:
        spec = parse_instruction(instruction).spec
        q = _featurize(obs.image, spec).astype(np.float32)
        d2 = self._sq - 2.0 * (self.features @ q) + float(q @ q)
        nearest = np.argsort(d2, kind="stable")[: self.k]
        votes = self.labels[nearest]
        tokens = tuple(
            int(np.bincount(votes[:, j], minlength=self._vocab).argmax())
            for j in range(votes.shape[1])
        )
        return ActionTokens(tokens)


def knn_bc_policy(train: Iterable[Episode] | EpisodeStore, k: int = 5,
                  space: ActionSpaceSpec | None = None) -> KnnPolicy:
    """Fit the nearest-neighbor imitator on recorded episodes."""
    space = space or default_action_space()
    if isinstance(train, EpisodeStore):
        space = train.action_space
        train = train.iter_episodes()
    feats, labels = [], []
    for ep in train:
        for step in ep.steps:
            feats.append(_featurize(step.image, ep.task))
            labels.append(step.tokens)
    if not feats:
        raise ValueError("training set has no steps")
    return KnnPolicy(np.stack(feats), np.asarray(labels), k, space)
