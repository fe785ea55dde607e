"""On-disk episode store.

Layout under a store root (see docs/format.md for the full schema):

    manifest.json            action space, rates, shard list with checksums
    shards/<name>.rec        length-prefixed JSON episode records
    obs/<aa>/<sha256>.ppm    content-addressed observation rasters

Records are canonical JSON (sorted keys, no whitespace) framed by a 4-byte
big-endian length, and observations are stored once per distinct image, so
two runs that produce the same episodes produce byte-identical stores. No
timestamps or host details are written anywhere.

Concurrent writers each own one shard file; the manifest commit is
serialized through a lock file.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from ..actions import ActionCommand, ActionSpaceSpec, NUM_CONTINUOUS
from ..config import RateConfig
from ..taxonomy import TaskSpec
from ..world.camera import from_ppm, to_ppm

FORMAT_VERSION = 1
_LEN = struct.Struct(">I")

OUTCOMES = ("success", "collision", "timeout", "out_of_bounds", "unplannable")
SOURCES = ("sim", "real")


class StoreError(RuntimeError):
    """Malformed store contents or misuse of the store API."""


@dataclass
class Step:
    """One recorded tick: observation, tokenized action, raw command, pose."""

    image: np.ndarray
    tokens: tuple[int, ...]
    command: ActionCommand
    pose: tuple[float, float, float]

    def __post_init__(self):
        if len(self.tokens) != NUM_CONTINUOUS + 1:
            raise StoreError(f"step tokens must have 12 entries, got {len(self.tokens)}")


@dataclass
class Episode:
    episode_id: str
    task: TaskSpec
    instruction: str
    template_id: str
    source: str
    seed: int
    outcome: str
    steps: list[Step] = field(default_factory=list)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise StoreError(f"unknown source {self.source!r}")
        if self.outcome not in OUTCOMES:
            raise StoreError(f"unknown outcome {self.outcome!r}")

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class ShardInfo:
    name: str
    episodes: int
    sha256: str

    def to_dict(self) -> dict:
        return {"name": self.name, "episodes": self.episodes, "sha256": self.sha256}


def _canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def _episode_record(ep: Episode, obs_shas: list[str]) -> dict:
    return {
        "episode_id": ep.episode_id,
        "task": ep.task.to_dict(),
        "instruction": ep.instruction,
        "template_id": ep.template_id,
        "source": ep.source,
        "seed": ep.seed,
        "outcome": ep.outcome,
        "steps": [
            {
                "obs": sha,
                "tokens": list(step.tokens),
                "command": {
                    "values": list(step.command.continuous()),
                    "terminate": step.command.terminate,
                },
                "pose": list(step.pose),
            }
            for step, sha in zip(ep.steps, obs_shas)
        ],
    }


class _ManifestLock:
    """Exclusive-create lock file; serializes manifest commits."""

    def __init__(self, root: Path, timeout: float = 30.0):
        self.path = root / ".manifest.lock"
        self.timeout = timeout

    def __enter__(self):
        deadline = time.monotonic() + self.timeout
        while True:
            try:
                fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.close(fd)
                return self
            except FileExistsError:
                if time.monotonic() > deadline:
                    raise StoreError(f"could not acquire manifest lock {self.path}")
                time.sleep(0.02)

    def __exit__(self, *exc):
        try:
            os.unlink(self.path)
        except FileNotFoundError:
            pass


class ShardWriter:
    """Appends episodes to one shard file; one writer per shard."""

    def __init__(self, store: "EpisodeStore", name: str):
        if any(s.name == name for s in store.shards):
            raise StoreError(f"shard {name!r} already committed")
        self.store = store
        self.name = name
        self.path = store.root / "shards" / f"{name}.rec"
        if self.path.exists():
            raise StoreError(f"shard file {self.path} already exists")
        self._fh = open(self.path, "wb")
        self._hash = hashlib.sha256()
        self._count = 0

    def add(self, ep: Episode) -> None:
        shas = [self.store.put_image(step.image) for step in ep.steps]
        payload = _canonical_json(_episode_record(ep, shas))
        framed = _LEN.pack(len(payload)) + payload
        self._fh.write(framed)
        self._hash.update(framed)
        self._count += 1

    def close(self) -> ShardInfo:
        self._fh.close()
        return ShardInfo(self.name, self._count, self._hash.hexdigest())

    def __enter__(self):
        return self

    def __exit__(self, exc_type, *exc):
        if exc_type is None:
            self.info = self.close()
        else:
            self._fh.close()


class EpisodeStore:
    """Reader/writer for one store root."""

    def __init__(self, root: str | Path, manifest: dict):
        self.root = Path(root)
        self._manifest = manifest

    # -- lifecycle ---------------------------------------------------------------

    @staticmethod
    def create(root: str | Path, action_space: ActionSpaceSpec,
               rates: RateConfig | None = None) -> "EpisodeStore":
        root = Path(root)
        if (root / "manifest.json").exists():
            raise StoreError(f"store already exists at {root}")
        (root / "shards").mkdir(parents=True, exist_ok=True)
        (root / "obs").mkdir(parents=True, exist_ok=True)
        rates = rates or RateConfig()
        manifest = {
            "format_version": FORMAT_VERSION,
            "action_space": action_space.to_dict(),
            "rates": {"f_high": rates.f_high, "f_low": rates.f_low},
            "episode_count": 0,
            "shards": [],
        }
        store = EpisodeStore(root, manifest)
        store._write_manifest()
        return store

    @staticmethod
    def open(root: str | Path) -> "EpisodeStore":
        root = Path(root)
        path = root / "manifest.json"
        if not path.exists():
            raise StoreError(f"no manifest.json under {root}")
        manifest = json.loads(path.read_text())
        if manifest.get("format_version") != FORMAT_VERSION:
            raise StoreError(
                f"unsupported store format {manifest.get('format_version')!r}"
            )
        return EpisodeStore(root, manifest)

    def _write_manifest(self) -> None:
        tmp = self.root / "manifest.json.tmp"
        tmp.write_text(json.dumps(self._manifest, indent=2, sort_keys=True) + "\n")
        os.replace(tmp, self.root / "manifest.json")

    # -- properties --------------------------------------------------------------

    @property
    def action_space(self) -> ActionSpaceSpec:
        return ActionSpaceSpec.from_dict(self._manifest["action_space"])

    @property
    def rates(self) -> RateConfig:
        r = self._manifest["rates"]
        return RateConfig(f_high=r["f_high"], f_low=r["f_low"])

    @property
    def shards(self) -> list[ShardInfo]:
        return [ShardInfo(s["name"], s["episodes"], s["sha256"])
                for s in self._manifest["shards"]]

    @property
    def episode_count(self) -> int:
        return self._manifest["episode_count"]

    # -- images --------------------------------------------------------------------

    def _image_path(self, sha: str) -> Path:
        return self.root / "obs" / sha[:2] / f"{sha}.ppm"

    def put_image(self, image: np.ndarray) -> str:
        data = to_ppm(image)
        sha = hashlib.sha256(data).hexdigest()
        path = self._image_path(sha)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            # Per-process temp name so concurrent writers of the same image
            # cannot interleave; the final rename is atomic either way.
            tmp = path.with_suffix(f".{os.getpid()}.tmp")
            tmp.write_bytes(data)
            os.replace(tmp, path)
        return sha

    def load_image(self, sha: str) -> np.ndarray:
        path = self._image_path(sha)
        if not path.exists():
            raise StoreError(f"missing observation {sha}")
        return from_ppm(path.read_bytes())

    # -- writing -----------------------------------------------------------------

    def shard_writer(self, name: str) -> ShardWriter:
        return ShardWriter(self, name)

    def write_shard(self, name: str, episodes: Iterable[Episode]) -> ShardInfo:
        with self.shard_writer(name) as writer:
            for ep in episodes:
                writer.add(ep)
        self.commit_shards([writer.info])
        return writer.info

    def commit_shards(self, infos: Iterable[ShardInfo]) -> None:
        """Record finished shards in the manifest (lock-serialized)."""
        infos = list(infos)
        with _ManifestLock(self.root):
            current = json.loads((self.root / "manifest.json").read_text())
            names = {s["name"] for s in current["shards"]}
            for info in infos:
                if info.name in names:
                    raise StoreError(f"shard {info.name!r} already committed")
                current["shards"].append(info.to_dict())
                current["episode_count"] += info.episodes
            current["shards"].sort(key=lambda s: s["name"])
            self._manifest = current
            self._write_manifest()

    # -- reading -----------------------------------------------------------------

    def _iter_records(self, name: str) -> Iterator[dict]:
        path = self.root / "shards" / f"{name}.rec"
        if not path.exists():
            raise StoreError(f"missing shard file {path}")
        with open(path, "rb") as fh:
            while True:
                head = fh.read(_LEN.size)
                if not head:
                    return
                if len(head) < _LEN.size:
                    raise StoreError(f"{name}: truncated record length")
                (length,) = _LEN.unpack(head)
                payload = fh.read(length)
                if len(payload) < length:
                    raise StoreError(f"{name}: truncated record payload")
                yield json.loads(payload)

    def _episode_from_record(self, rec: dict, load_images: bool = True) -> Episode:
        steps = []
        for s in rec["steps"]:
            image = self.load_image(s["obs"]) if load_images else _EMPTY_IMAGE
            steps.append(Step(
                image=image,
                tokens=tuple(int(t) for t in s["tokens"]),
                command=ActionCommand.from_continuous(
                    s["command"]["values"], s["command"]["terminate"]
                ),
                pose=tuple(s["pose"]),
            ))
        return Episode(
            episode_id=rec["episode_id"],
            task=TaskSpec.from_dict(rec["task"]),
            instruction=rec["instruction"],
            template_id=rec["template_id"],
            source=rec["source"],
            seed=rec["seed"],
            outcome=rec["outcome"],
            steps=steps,
        )

    def iter_episodes(self, shard: str | None = None,
                      load_images: bool = True) -> Iterator[Episode]:
        names = [shard] if shard else [s.name for s in self.shards]
        for name in names:
            for rec in self._iter_records(name):
                yield self._episode_from_record(rec, load_images)

    # -- validation ----------------------------------------------------------------

    def validate(self) -> list[str]:
        """Check checksums and record schema; returns problems as field paths."""
        problems: list[str] = []
        total = 0
        for info in self.shards:
            path = self.root / "shards" / f"{info.name}.rec"
            if not path.exists():
                problems.append(f"shards[{info.name}]: file missing")
                continue
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
            if digest != info.sha256:
                problems.append(f"shards[{info.name}].sha256: mismatch")
            count = 0
            try:
                for i, rec in enumerate(self._iter_records(info.name)):
                    problems.extend(self._check_record(rec, f"shards[{info.name}].record[{i}]"))
                    count += 1
            except (StoreError, ValueError) as exc:
                # ValueError covers JSON syntax errors and undecodable bytes.
                problems.append(f"shards[{info.name}]: {exc}")
            if count != info.episodes:
                problems.append(
                    f"shards[{info.name}].episodes: manifest says {info.episodes}, found {count}"
                )
            total += count
        if total != self.episode_count:
            problems.append(
                f"episode_count: manifest says {self.episode_count}, found {total}"
            )
        return problems

    def _check_record(self, rec: dict, where: str) -> list[str]:
        problems = []
        for key in ("episode_id", "task", "instruction", "template_id",
                    "source", "seed", "outcome", "steps"):
            if key not in rec:
                problems.append(f"{where}.{key}: missing")
        if problems:
            return problems
        if rec["outcome"] not in OUTCOMES:
            problems.append(f"{where}.outcome: unknown value {rec['outcome']!r}")
        if rec["source"] not in SOURCES:
            problems.append(f"{where}.source: unknown value {rec['source']!r}")
        try:
            TaskSpec.from_dict(rec["task"])
        except (KeyError, ValueError) as exc:
            problems.append(f"{where}.task: {exc}")
        for j, s in enumerate(rec["steps"]):
            sw = f"{where}.steps[{j}]"
            if len(s.get("tokens", ())) != NUM_CONTINUOUS + 1:
                problems.append(f"{sw}.tokens: expected 12 entries")
            if len(s.get("command", {}).get("values", ())) != NUM_CONTINUOUS:
                problems.append(f"{sw}.command.values: expected 11 entries")
            sha = s.get("obs", "")
            if not self._image_path(sha).exists():
                problems.append(f"{sw}.obs: missing image {sha[:12]}")
        return problems


_EMPTY_IMAGE = np.zeros((1, 1, 3), dtype=np.uint8)
