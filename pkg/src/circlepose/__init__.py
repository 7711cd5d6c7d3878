"""circlepose: plane pose from the image of a single circle.

The pencil of the circle image with the image of the absolute conic yields
two vanishing-line hypotheses; geometric side conditions select the true
one where the configuration permits, and a default-intrinsics model makes
the method usable without per-device calibration.
"""

from .conics import (
    Conic,
    ConicKind,
    Signature,
    decompose_line_pair,
    normalize_unit_det,
    pole,
    polar,
    proportional,
    signature,
    transform_conic,
)
from .disambiguate import (
    DisambiguationResult,
    SceneSideInfo,
    SelectionRule,
    centered_side_info,
    same_side_condition,
    select_vanishing_line,
    separation_product,
    sufficient_condition_check,
)
from .ellipse import fit_ellipse, sample_ellipse
from .estimators import CirclePoseEstimator, EllipseFitter
from .intrinsics import (
    CameraIntrinsics,
    FocalModel,
    default_focal_model,
    default_intrinsics,
    fit_focal_model,
    focal_modifier,
)
from .pencil import PencilDecomposition, decompose_pencil, generalized_eigen_sym
from .pose import (
    PlanePose,
    VanishingCandidates,
    canonical_diagonalize,
    homography_from_circle_and_vline,
    vanishing_candidates,
)
from .simulate import (
    ExperimentConfig,
    GroundTruthScene,
    TrialRecord,
    make_scene,
    metric_normal,
    metric_position,
    metric_reproj,
    run_experiment,
    run_trial,
)

__version__ = "0.1.0"

__all__ = [
    "CameraIntrinsics",
    "CirclePoseEstimator",
    "Conic",
    "ConicKind",
    "DisambiguationResult",
    "EllipseFitter",
    "ExperimentConfig",
    "FocalModel",
    "GroundTruthScene",
    "PencilDecomposition",
    "PlanePose",
    "SceneSideInfo",
    "SelectionRule",
    "Signature",
    "TrialRecord",
    "VanishingCandidates",
    "canonical_diagonalize",
    "centered_side_info",
    "decompose_line_pair",
    "decompose_pencil",
    "default_focal_model",
    "default_intrinsics",
    "fit_ellipse",
    "fit_focal_model",
    "focal_modifier",
    "generalized_eigen_sym",
    "homography_from_circle_and_vline",
    "make_scene",
    "metric_normal",
    "metric_position",
    "metric_reproj",
    "normalize_unit_det",
    "polar",
    "pole",
    "proportional",
    "run_experiment",
    "run_trial",
    "same_side_condition",
    "sample_ellipse",
    "select_vanishing_line",
    "separation_product",
    "signature",
    "sufficient_condition_check",
    "transform_conic",
    "vanishing_candidates",
    "__version__",
]
