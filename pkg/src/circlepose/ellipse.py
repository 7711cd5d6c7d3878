"""Direct least-squares ellipse estimation from contour points, plus the
matching synthetic sampler used by the simulation harness.

The fit minimizes algebraic distance under the ellipse-guaranteeing
constraint ``4ac - b^2 = 1`` (stable partitioned formulation), so the result
can never be a hyperbola. Data are centered and isotropically scaled before
solving for conditioning.
"""

from __future__ import annotations

import numpy as np

from ._validation import as_points_2d
from .conics import Conic, ConicKind


def fit_ellipse(points) -> Conic:
    """Fit an ellipse conic to at least six 2D contour points.

    Exact (residual < 1e-9) on noise-free samples of a true ellipse; raises
    ``ValueError`` on degenerate input that admits no ellipse.
    """
    pts = as_points_2d(points, min_points=6, name="contour points")
    mean = pts.mean(axis=0)
    spread = np.sqrt(np.mean(np.sum((pts - mean) ** 2, axis=1)) / 2.0)
    if spread <= 0 or not np.isfinite(spread):
        raise ValueError("cannot fit ellipse: degenerate point spread")
    x = (pts[:, 0] - mean[0]) / spread
    y = (pts[:, 1] - mean[1]) / spread

    d1 = np.column_stack([x * x, x * y, y * y])
    d2 = np.column_stack([x, y, np.ones_like(x)])
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    try:
        t = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError:
        raise ValueError("cannot fit ellipse: collinear or coincident points") from None
    reduced = s1 + s2 @ t
    # premultiply by C1^-1 for the constraint matrix [[0,0,2],[0,-1,0],[2,0,0]]
    m = np.vstack([reduced[2] / 2.0, -reduced[1], reduced[0] / 2.0])
    try:
        eigval, eigvec = np.linalg.eig(m)
    except np.linalg.LinAlgError:
        raise ValueError("cannot fit ellipse: eigen solve failed") from None
    vec = np.real(eigvec)
    disc = 4.0 * vec[0] * vec[2] - vec[1] ** 2
    real_ev = np.abs(np.imag(eigval)) <= 1e-9 * np.max(np.abs(eigval))
    ok = np.where(real_ev & (disc > 0))[0]
    if len(ok) == 0:
        raise ValueError("cannot fit ellipse: no ellipse-constrained solution")
    a1 = vec[:, ok[0]]
    coeffs = np.concatenate([a1, t @ a1])

    # undo the normalization: conic transports as T^T C' T for x' = T x
    tm = np.array(
        [
            [1.0 / spread, 0.0, -mean[0] / spread],
            [0.0, 1.0 / spread, -mean[1] / spread],
            [0.0, 0.0, 1.0],
        ]
    )
    c_norm = Conic.from_coefficients(coeffs)
    conic = Conic.from_matrix(tm.T @ c_norm.m @ tm)
    if conic.kind is not ConicKind.REAL_ELLIPSE:
        raise ValueError("cannot fit ellipse: degenerate solution")
    return conic


def ellipse_parameters(c: Conic) -> tuple[np.ndarray, np.ndarray, float]:
    """Geometric parameters (center, semi-axes (major, minor), major-axis angle)."""
    if c.kind is not ConicKind.REAL_ELLIPSE:
        raise ValueError("not a real ellipse")
    m = c.m
    quad = m[:2, :2]
    center = -np.linalg.solve(quad, m[:2, 2])
    evals, evecs = np.linalg.eigh(quad)
    axes_sq = -np.linalg.det(m) / (np.linalg.det(quad) * evals)
    if np.any(axes_sq <= 0):
        raise ValueError("not a real ellipse")
    axes = np.sqrt(axes_sq)
    order = np.argsort(axes)[::-1]
    axes = axes[order]
    major_vec = evecs[:, order[0]]
    angle = float(np.arctan2(major_vec[1], major_vec[0]))
    if angle <= -np.pi / 2:
        angle += np.pi
    elif angle > np.pi / 2:
        angle -= np.pi
    return center, axes, angle


def sample_ellipse(c: Conic, n: int, noise_sigma: float = 0.0, seed: int = 0):
    """``n`` points at uniform parametric angles on the ellipse, each offset
    by iid zero-mean isotropic gaussian noise. Deterministic per seed."""
    if n < 1:
        raise ValueError("need at least one sample point")
    if noise_sigma < 0:
        raise ValueError("noise sigma must be nonnegative")
    center, axes, angle = ellipse_parameters(c)
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    ca, sa = np.cos(angle), np.sin(angle)
    rot = np.array([[ca, -sa], [sa, ca]])
    pts = np.column_stack([axes[0] * np.cos(t), axes[1] * np.sin(t)]) @ rot.T + center
    rng = np.random.default_rng(seed)
    pts = pts + rng.normal(0.0, noise_sigma, size=pts.shape)
    return pts


def algebraic_residual(c: Conic, points) -> float:
    """RMS of the normalized quadratic form over the points (scale-free)."""
    pts = as_points_2d(points, name="points")
    hom = np.column_stack([pts, np.ones(len(pts))])
    m = c.m / np.linalg.norm(c.m)
    vals = np.einsum("ij,jk,ik->i", hom, m, hom)
    return float(np.sqrt(np.mean(vals**2)))
