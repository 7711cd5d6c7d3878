"""Camera intrinsics under the square-pixel, centered-principal-point model,
plus the default-focal model fitted over 35mm-equivalent focal lengths.

The shipped device database (``data/devices.json``) is a reconstruction that
targets the published mean/variance of the smartphone survey; it is not a
ground-truth device list.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

#: Diagonal of a full-frame 36x24 mm sensor, the usual f35 reference length.
FULL_FRAME_DIAG_MM = 43.27
FULL_FRAME_WIDTH_MM = 36.0


@dataclass(frozen=True)
class CameraIntrinsics:
    """Single-focal pinhole camera: square pixels, principal point centered."""

    f_px: float
    width_px: int
    height_px: int

    def __post_init__(self):
        if self.f_px <= 0:
            raise ValueError("focal length must be positive")
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("image size must be positive")

    @property
    def K(self) -> np.ndarray:
        f = self.f_px
        return np.array(
            [
                [f, 0.0, self.width_px / 2.0],
                [0.0, f, self.height_px / 2.0],
                [0.0, 0.0, 1.0],
            ]
        )

    def iac(self) -> np.ndarray:
        """Image of the absolute conic, ``K^-T K^-1`` (positive definite)."""
        ki = np.linalg.inv(self.K)
        w = ki.T @ ki
        return 0.5 * (w + w.T)

    def to_dict(self) -> dict:
        return {
            "f_px": self.f_px,
            "width_px": self.width_px,
            "height_px": self.height_px,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CameraIntrinsics":
        return cls(
            f_px=float(data["f_px"]),
            width_px=int(data["width_px"]),
            height_px=int(data["height_px"]),
        )


@dataclass(frozen=True)
class FocalModel:
    """Gaussian model of the 35mm-equivalent focal length across devices."""

    mean_f35: float
    var_f35: float
    samples: tuple[tuple[str, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "mean_f35_mm": self.mean_f35,
            "var_f35_mm2": self.var_f35,
            "samples": [{"device": d, "f35_mm": v} for d, v in self.samples],
        }


def fit_focal_model(f35_values, device_ids=None) -> FocalModel:
    """Arithmetic mean and unbiased sample variance over f35 values."""
    values = [float(v) for v in f35_values]
    if len(values) < 2:
        raise ValueError("need at least 2 focal samples")
    if device_ids is None:
        device_ids = [f"device_{i:02d}" for i in range(len(values))]
    arr = np.asarray(values)
    return FocalModel(
        mean_f35=float(arr.mean()),
        var_f35=float(arr.var(ddof=1)),
        samples=tuple(zip([str(d) for d in device_ids], values)),
    )


def default_intrinsics(
    width_px: int,
    height_px: int,
    model: FocalModel,
    convention: str = "diagonal",
) -> CameraIntrinsics:
    """Intrinsics from the focal model and the image size alone.

    ``f_px = mean_f35 * diag_px / 43.27`` under the standard diagonal-based
    f35 equivalence; ``convention="width"`` uses the 36 mm width instead.
    """
    if width_px <= 0 or height_px <= 0:
        raise ValueError("image size must be positive")
    if convention == "diagonal":
        ref_px = math.hypot(width_px, height_px)
        ref_mm = FULL_FRAME_DIAG_MM
    elif convention == "width":
        ref_px = float(width_px)
        ref_mm = FULL_FRAME_WIDTH_MM
    else:
        raise ValueError(f"unknown f35 convention: {convention!r}")
    f_px = model.mean_f35 * ref_px / ref_mm
    return CameraIntrinsics(f_px=f_px, width_px=width_px, height_px=height_px)


def focal_modifier(k: CameraIntrinsics, factor: float) -> CameraIntrinsics:
    """Scale the focal length, leaving the image size unchanged."""
    if factor <= 0:
        raise ValueError("focal modifier must be positive")
    return CameraIntrinsics(
        f_px=k.f_px * factor, width_px=k.width_px, height_px=k.height_px
    )


def load_device_database(path=None) -> list[tuple[str, float]]:
    """Read a JSON array of ``{"device": str, "f35_mm": real}`` records.

    Without a path, loads the reconstructed database shipped with the package.
    """
    if path is None:
        text = (
            resources.files("circlepose").joinpath("data/devices.json").read_text()
        )
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    if not isinstance(raw, list):
        raise ValueError("device database must be a JSON array")
    out = []
    for entry in raw:
        out.append((str(entry["device"]), float(entry["f35_mm"])))
    return out


def default_focal_model() -> FocalModel:
    """Focal model fitted to the shipped device database."""
    devices = load_device_database()
    return fit_focal_model([v for _, v in devices], [d for d, _ in devices])
