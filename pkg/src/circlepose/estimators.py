"""Scikit-learn style estimators wrapping the geometry pipeline.

``EllipseFitter`` fits a guaranteed-ellipse conic to contour points;
``CirclePoseEstimator`` runs the full chain from contour points (or a
ready-made conic) to the plane pose, exposing both pose hypotheses and the
disambiguation outcome as fitted attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils import check_array

from .conics import Conic
from .disambiguate import centered_side_info, select_vanishing_line
from .ellipse import algebraic_residual, ellipse_parameters, fit_ellipse
from .intrinsics import CameraIntrinsics
from .pencil import decompose_pencil
from .pose import homography_from_circle_and_vline, vanishing_candidates


def _check_contour(X) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_min_samples=6)
    if X.shape[1] != 2:
        raise ValueError(f"expected (n, 2) contour points, got shape {X.shape}")
    return X


class EllipseFitter(BaseEstimator):
    """Direct least-squares ellipse fit with an ellipse-guaranteeing constraint.

    Attributes after ``fit``: ``conic_`` (the fitted :class:`Conic`),
    ``center_``, ``semi_axes_`` (major, minor) and ``angle_`` (radians).
    """

    def fit(self, X, y=None):
        X = _check_contour(X)
        self.conic_ = fit_ellipse(X)
        self.center_, self.semi_axes_, self.angle_ = ellipse_parameters(self.conic_)
        return self

    def score_samples(self, X):
        """Negative squared algebraic distance of each point to the fit."""
        self._require_fitted()
        X = check_array(X, dtype=float)
        hom = np.column_stack([X, np.ones(len(X))])
        m = self.conic_.m / np.linalg.norm(self.conic_.m)
        return -np.einsum("ij,jk,ik->i", hom, m, hom) ** 2

    def residual(self, X) -> float:
        """RMS algebraic residual of points against the fitted conic."""
        self._require_fitted()
        return algebraic_residual(self.conic_, check_array(X, dtype=float))

    def _require_fitted(self):
        if not hasattr(self, "conic_"):
            raise NotFittedError("EllipseFitter is not fitted yet")


class CirclePoseEstimator(BaseEstimator):
    """Plane pose from the contour of a single circular marker.

    Parameters
    ----------
    intrinsics:
        Camera model used for the pencil and the pose. Required before fit.
    marker_diameter:
        Physical circle diameter; fixes the monocular scale.
    assume_centered:
        Assert that the optical axis passes (approximately) through the
        marker centre, which makes the twofold ambiguity decidable.
    side_info:
        Explicit :class:`SceneSideInfo` overriding ``assume_centered``.

    Attributes after ``fit``: ``conic_``, ``decomposition_``, ``candidates_``,
    ``poses_`` (one per hypothesis), ``selection_``, ``selected_`` (index or
    None) and ``pose_`` (the selected or only pose; hypothesis 1 when
    undecided).
    """

    def __init__(
        self,
        intrinsics: CameraIntrinsics | None = None,
        marker_diameter: float = 1.0,
        assume_centered: bool = True,
        side_info=None,
    ):
        self.intrinsics = intrinsics
        self.marker_diameter = marker_diameter
        self.assume_centered = assume_centered
        self.side_info = side_info

    def fit(self, X, y=None):
        """Estimate the pose from (n >= 6) contour points."""
        X = _check_contour(X)
        return self.fit_conic(fit_ellipse(X))

    def fit_conic(self, conic: Conic):
        """Estimate the pose from an already-fitted ellipse conic."""
        if self.intrinsics is None:
            raise ValueError("intrinsics must be provided")
        k = self.intrinsics
        self.conic_ = conic
        self.decomposition_ = decompose_pencil(conic, Conic.from_matrix(k.iac()))
        self.candidates_ = vanishing_candidates(self.decomposition_, k)

        if self.candidates_.degenerate:
            pose = homography_from_circle_and_vline(
                conic, self.candidates_.v1, k, self.marker_diameter
            )
            self.poses_ = (pose,)
            self.selection_ = None
            self.selected_ = 1
            self.pose_ = pose
            return self

        self.poses_ = tuple(
            homography_from_circle_and_vline(conic, v, k, self.marker_diameter)
            for v in (self.candidates_.v1, self.candidates_.v2)
        )
        side = self.side_info
        if side is None and self.assume_centered:
            side = centered_side_info()
        self.selection_ = select_vanishing_line(
            self.candidates_, self.decomposition_, side
        )
        self.selected_ = self.selection_.selected
        self.pose_ = self.poses_[(self.selected_ or 1) - 1]
        return self

    def predict(self, P):
        """Project plane points (marker frame, units of the marker diameter)
        into the image through the selected pose."""
        self._require_fitted()
        P = check_array(P, dtype=float)
        if P.shape[1] != 2:
            raise ValueError("expected (n, 2) plane points")
        hom = np.column_stack([2.0 * P, np.ones(len(P))])  # to circle-radius units
        img = hom @ self.pose_.homography.T
        return img[:, :2] / img[:, 2:3]

    def _require_fitted(self):
        if not hasattr(self, "pose_"):
            raise NotFittedError("CirclePoseEstimator is not fitted yet")
