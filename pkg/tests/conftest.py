"""Shared synthetic-scene helpers for the test suite."""

import numpy as np
import pytest

from circlepose import Conic, make_scene
from circlepose.intrinsics import CameraIntrinsics


def line_angle(a, b) -> float:
    """Angle between two homogeneous lines as direction vectors (radians)."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.arccos(min(abs(float(a @ b)), 1.0)))


def vector_angle(a, b) -> float:
    """Sign-invariant angle between unit vectors (radians)."""
    return line_angle(a, b)


def random_scene(rng, alpha_range=(10.0, 80.0), r_range=(5.0, 60.0)):
    """Scene with angle and distance drawn uniformly from the given ranges."""
    alpha = float(rng.uniform(*alpha_range))
    r = float(rng.uniform(*r_range))
    return make_scene(alpha, r)


def offaxis_world_camera(rng, theta=None, roll=None, f_px=1000.0, image=(1280, 720)):
    """Camera at unit distance from the plane origin, elevation ``theta``;
    returns the plane-to-image homography and the intrinsics."""
    if theta is None:
        theta = float(rng.uniform(np.deg2rad(10), np.deg2rad(80)))
    if roll is None:
        roll = float(rng.uniform(0.0, 2 * np.pi))
    ct, st = np.cos(theta), np.sin(theta)
    cam = np.array([0.0, -ct, st])
    z = -cam
    x = np.array([1.0, 0.0, 0.0])
    y = np.cross(z, x)
    rot = np.vstack([x, y, z])
    cr, sr = np.cos(roll), np.sin(roll)
    rot = np.array([[cr, -sr, 0.0], [sr, cr, 0.0], [0.0, 0.0, 1.0]]) @ rot
    t = -rot @ cam
    k = CameraIntrinsics(f_px, image[0], image[1])
    h_plane = k.K @ np.column_stack([rot[:, 0], rot[:, 1], t])
    return h_plane, k, theta


def world_circle(xc, yc, radius) -> Conic:
    return Conic.from_matrix(
        np.array(
            [
                [1.0, 0.0, -xc],
                [0.0, 1.0, -yc],
                [-xc, -yc, xc * xc + yc * yc - radius * radius],
            ]
        )
    )


def virtual_circle_psi(theta) -> Conic:
    """Back-projection of the IAC onto the plane for the unit-distance camera:
    the virtual circle centred at the camera foot with squared radius -sin^2."""
    ct = np.cos(theta)
    return Conic.from_matrix(
        np.array([[1.0, 0.0, 0.0], [0.0, 1.0, ct], [0.0, ct, 1.0]])
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250810)
