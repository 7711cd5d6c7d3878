"""Plane pose candidates from a circle image and camera intrinsics.

Two steps: the pencil of the circle image with the absolute-conic image
yields two vanishing-line hypotheses (a twofold ambiguity), and each
hypothesis determines a world-to-image homography of the marker plane up to
an in-plane rotation about the circle centre.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_vec3
from .conics import Conic, ConicKind, transform_conic
from .intrinsics import CameraIntrinsics
from .pencil import PencilDecomposition


@dataclass(frozen=True)
class VanishingCandidates:
    """The two vanishing-line hypotheses and their plane normals.

    Normals are unit vectors in the camera frame, oriented with nonnegative
    z-component (fronto-parallel viewing gives [0, 0, 1]). When the
    ``degenerate`` flag is set the geometry is fronto-parallel and both
    entries hold the single solution.
    """

    v1: np.ndarray
    v2: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class PlanePose:
    """Pose of the marker plane for one vanishing-line hypothesis.

    ``homography`` maps the unit-circle marker frame (marker scaled to the
    unit circle) onto the image and reproduces the observed conic; it is
    defined up to an in-plane rotation. ``center_cam`` and ``distance`` are
    in the physical units of the marker diameter supplied by the caller.
    """

    normal: np.ndarray
    distance: float
    homography: np.ndarray = field(repr=False)
    center_cam: np.ndarray
    rotation: np.ndarray = field(repr=False)
    translation_unit: np.ndarray = field(repr=False)
    marker_diameter: float = 1.0


def vanishing_candidates(
    p: PencilDecomposition, k: CameraIntrinsics
) -> VanishingCandidates:
    """Both vanishing-line solutions from the pencil decomposition.

    The candidate lines are the two components of the real line-pair member:
    with ``w`` the normalized IAC and ``z1, z3`` the extreme base points,
    each line is a signed combination of the polars ``w z_i`` scaled to unit
    norm in the ``w``-dual metric. One of them is the image of the support
    plane's line at infinity; the other is its indistinguishable twin.
    """
    lam = p.lambdas
    w = p.iac.m
    z1 = p.base_points[:, 0]
    z3 = p.base_points[:, 2]
    w1 = w @ z1 / np.sqrt(z1 @ w @ z1)
    w3 = w @ z3 / np.sqrt(z3 @ w @ z3)
    a = np.sqrt(max(lam[0] - lam[1], 0.0))
    b = np.sqrt(max(lam[1] - lam[2], 0.0))

    if p.fronto_parallel:
        v = a * w1 if a >= b else b * w3
        n = _normal_from_line(v, k)
        return VanishingCandidates(v1=v, v2=v.copy(), n1=n, n2=n.copy(), degenerate=True)

    vp = a * w1 + b * w3
    vm = a * w1 - b * w3
    return VanishingCandidates(
        v1=vp,
        v2=vm,
        n1=_normal_from_line(vp, k),
        n2=_normal_from_line(vm, k),
        degenerate=False,
    )


def _normal_from_line(v: np.ndarray, k: CameraIntrinsics) -> np.ndarray:
    n = k.K.T @ v
    n = n / np.linalg.norm(n)
    if n[2] < 0:
        n = -n
    return n


def canonical_diagonalize(c: Conic) -> tuple[np.ndarray, Conic]:
    """Similarity ``S`` (rotation + translation) with ``S^-T c S^-1`` diagonal.

    The returned conic is scaled to ``diag(A, B, -1)`` with ``0 < A <= B``,
    i.e. the major axis lies along x in the canonical frame.
    """
    if c.kind is not ConicKind.REAL_ELLIPSE:
        raise ValueError("canonical form requires a real ellipse")
    m = c.m
    if np.trace(m[:2, :2]) < 0:
        m = -m
    quad = m[:2, :2]
    center = -np.linalg.solve(quad, m[:2, 2])
    _, evecs = np.linalg.eigh(quad)
    if np.linalg.det(evecs) < 0:
        evecs = evecs[:, ::-1].copy()
    rot = evecs.T
    s = np.eye(3)
    s[:2, :2] = rot
    s[:2, 2] = -rot @ center
    diag = _transport_diag(m, s)
    if diag[0] > diag[1]:
        swap = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        s = swap @ s
        diag = _transport_diag(m, s)
    return s, Conic.from_matrix(np.diag(diag))


def _transport_diag(m: np.ndarray, s: np.ndarray) -> np.ndarray:
    si = np.linalg.inv(s)
    cc = si.T @ m @ si
    cc = 0.5 * (cc + cc.T)
    cc = cc / -cc[2, 2]
    return np.diag(cc).copy()


def homography_from_circle_and_vline(
    c: Conic,
    vline,
    k: CameraIntrinsics,
    marker_diameter: float = 1.0,
) -> PlanePose:
    """Homography and pose of the marker plane for one vanishing-line choice.

    Works in the canonical frame of the ellipse: with ``C' = diag(A, B, -1)``
    and ``[u, v, 1]`` the pole of the (transformed) vanishing line,

        H = S^-1 [[-1, B u v, u], [0, 1 - A u^2, v], [-A u, B v, 1]]
                 diag(r, -1, s),
        r^2 = (B/A) (1 - A u^2 - B v^2),   s^2 = B (1 - A u^2).

    Both radicands are nonnegative exactly when the pole lies inside the
    ellipse, which holds for any vanishing line consistent with a fully
    visible circle.
    """
    vline = as_vec3(vline, "vanishing line")
    if marker_diameter <= 0:
        raise ValueError("marker diameter must be positive")
    s_img, cdiag = canonical_diagonalize(c)
    a, b = cdiag.m[0, 0], cdiag.m[1, 1]
    v_canon = np.linalg.inv(s_img).T @ vline
    pole = np.array([v_canon[0] / a, v_canon[1] / b, -v_canon[2]])
    if abs(pole[2]) < 1e-14 * np.linalg.norm(pole):
        raise ValueError("degenerate viewing geometry: pole at infinity")
    pole = pole / pole[2]
    u, v = pole[0], pole[1]

    r2 = (b / a) * (1.0 - a * u * u - b * v * v)
    s2 = b * (1.0 - a * u * u)
    scale = max(abs(r2), abs(s2), 1.0)
    if r2 < -1e-10 * scale or s2 < -1e-10 * scale:
        raise ValueError("vanishing line inconsistent with ellipse")
    if s2 <= 1e-14 * scale:
        raise ValueError("degenerate viewing geometry")
    r2 = max(r2, 0.0)

    m1 = np.array(
        [
            [-1.0, b * u * v, u],
            [0.0, 1.0 - a * u * u, v],
            [-a * u, b * v, 1.0],
        ]
    )
    h = np.linalg.inv(s_img) @ m1 @ np.diag([np.sqrt(r2), -1.0, np.sqrt(s2)])
    return _pose_from_homography(h, k, marker_diameter)


def _pose_from_homography(
    h: np.ndarray, k: CameraIntrinsics, marker_diameter: float
) -> PlanePose:
    """Decompose a unit-circle-frame homography against the intrinsics."""
    ki = np.linalg.inv(k.K)
    ht = ki @ h
    lam = 2.0 / (np.linalg.norm(ht[:, 0]) + np.linalg.norm(ht[:, 1]))
    if lam * ht[2, 2] < 0:
        lam = -lam
        h = -h
        ht = -ht
    r_approx = np.column_stack([lam * ht[:, 0], lam * ht[:, 1],
                                np.cross(lam * ht[:, 0], lam * ht[:, 1])])
    u_svd, _, vt = np.linalg.svd(r_approx)
    rot = u_svd @ np.diag([1.0, 1.0, np.linalg.det(u_svd @ vt)]) @ vt
    t_unit = lam * ht[:, 2]
    center = t_unit * (marker_diameter / 2.0)
    normal = rot[:, 2].copy()
    if normal[2] < 0:
        normal = -normal
    distance = float(abs(normal @ center))
    return PlanePose(
        normal=normal,
        distance=distance,
        homography=h,
        center_cam=center,
        rotation=rot,
        translation_unit=t_unit,
        marker_diameter=marker_diameter,
    )


def reprojection_residual(c: Conic, pose: PlanePose) -> float:
    """Relative residual between the observed conic and the pose's reprojection
    of the unit circle (0 means the homography reproduces the image exactly)."""
    from .conics import projective_residual

    reproj = transform_conic(Conic.unit_circle(), pose.homography)
    return projective_residual(reproj.m, c.m)
