"""Schematic first-person rendering.

A pinhole camera rides at the front of the body, yawed with the robot and
pitched with the realized body pitch. Entities render as color-filled
bounding boxes in painter's order; ground and sky fill the rest. The raster
is a pure function of (state, intrinsics): identical states give
byte-identical images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import CameraConfig
from ..taxonomy import Color
from .state import WorldState

# Fixed palette; ground and sky are distinct from every entity color.
COLOR_RGB = {
    Color.GREEN: (40, 170, 70),
    Color.RED: (200, 40, 40),
    Color.BLUE: (40, 90, 200),
    Color.YELLOW: (230, 200, 40),
    Color.GOLD: (218, 165, 32),
    Color.PINK: (255, 105, 180),
    Color.ORANGE: (240, 140, 20),
    Color.PURPLE: (140, 60, 160),
}
GROUND_RGB = (120, 110, 100)
SKY_RGB = (180, 210, 235)


@dataclass(frozen=True)
class Observation:
    image: np.ndarray          # (H, W, 3) uint8
    intrinsics: CameraConfig

    def __post_init__(self):
        if self.image.dtype != np.uint8 or self.image.ndim != 3:
            raise ValueError("observation image must be (H, W, 3) uint8")


def _camera_basis(yaw: float, pitch: float):
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    forward = np.array([cp * cy, cp * sy, sp])
    right = np.array([sy, -cy, 0.0])
    down = np.cross(forward, right)
    return right, down, forward


def render_observation(state: WorldState, intrinsics: CameraConfig | None = None) -> Observation:
    cam = intrinsics or CameraConfig()
    w, h = cam.width, cam.height
    fx = (w / 2.0) / math.tan(math.radians(cam.hfov_deg) / 2.0)
    cx, cy_px = w / 2.0, h / 2.0

    x, y, yaw = state.robot_pose
    pitch = state.body.phi
    right, down, forward = _camera_basis(yaw, pitch)
    cam_pos = np.array([
        x + cam.forward_offset * math.cos(yaw),
        y + cam.forward_offset * math.sin(yaw),
        state.body.h_z + cam.height_offset,
    ])

    img = np.empty((h, w, 3), dtype=np.uint8)
    horizon = cy_px + fx * math.tan(pitch)
    split = min(max(int(math.ceil(horizon)), 0), h)
    img[:split] = SKY_RGB
    img[split:] = GROUND_RGB

    # Painter's order: far entities first.
    order = sorted(
        state.entities,
        key=lambda e: -((e.pose[0] - x) ** 2 + (e.pose[1] - y) ** 2),
    )
    for ent in order:
        ex, ey, _ = ent.pose
        hx, hy, dz = ent.dims[0] / 2.0, ent.dims[1] / 2.0, ent.dims[2]
        corners = np.array([
            [ex + sx * hx, ey + sy_ * hy, z]
            for sx in (-1, 1) for sy_ in (-1, 1) for z in (0.0, dz)
        ])
        rel = corners - cam_pos
        zc = rel @ forward
        if (zc <= cam.near_plane).all():
            continue
        zc = np.maximum(zc, cam.near_plane)
        u = cx + fx * (rel @ right) / zc
        v = cy_px + fx * (rel @ down) / zc
        # Round both edges so the filled area is unbiased wrt the exact box.
        u0, u1 = int(round(u.min())), int(round(u.max()))
        v0, v1 = int(round(v.min())), int(round(v.max()))
        u0, u1 = max(u0, 0), min(u1, w)
        v0, v1 = max(v0, 0), min(v1, h)
        if u0 < u1 and v0 < v1:
            img[v0:v1, u0:u1] = COLOR_RGB[ent.color]

    img.flags.writeable = False
    return Observation(img, cam)


def to_ppm(obs_or_image) -> bytes:
    """Serialize a raster as binary PPM (P6)."""
    image = obs_or_image.image if isinstance(obs_or_image, Observation) else obs_or_image
    h, w, _ = image.shape
    return b"P6\n%d %d\n255\n" % (w, h) + image.tobytes()


def from_ppm(data: bytes) -> np.ndarray:
    """Parse a binary PPM (P6) produced by :func:`to_ppm`."""
    if not data.startswith(b"P6"):
        raise ValueError("not a P6 PPM")
    parts = data.split(b"\n", 3)
    w, h = (int(t) for t in parts[1].split())
    raster = np.frombuffer(parts[3], dtype=np.uint8, count=w * h * 3)
    return raster.reshape(h, w, 3)
