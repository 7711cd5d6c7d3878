"""Synthetic experiment harness: scene generation, the full estimation
pipeline under focal modifiers, and the three pose-error metrics.

Scenes follow the benchmark protocol: the optical axis passes through the
marker centre, camera roll and the in-plane marker rotation are zero, and
the plane is inclined at ``alpha`` to the viewing direction (``alpha = 90``
is fronto-parallel). Distances are expressed in marker diameters.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .conics import Conic, transform_conic
from .disambiguate import (
    SceneSideInfo,
    centered_side_info,
    select_vanishing_line,
    sufficient_condition_check,
)
from .ellipse import ellipse_parameters, fit_ellipse, sample_ellipse
from .intrinsics import CameraIntrinsics, focal_modifier
from .pencil import decompose_pencil
from .pose import (
    PlanePose,
    homography_from_circle_and_vline,
    vanishing_candidates,
)

CSV_COLUMNS = (
    "alpha_deg",
    "r_over_D",
    "modifier",
    "trial",
    "err_normal_deg",
    "err_position",
    "err_reproj_px",
    "disamb_correct",
    "candidates",
    "failed",
)


def _log_spaced(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.geomspace(lo, hi, n))


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one simulation sweep."""

    alpha_deg: tuple[float, ...] = (15.0, 30.0, 45.0)
    r_over_d: tuple[float, ...] = field(default_factory=lambda: _log_spaced(15, 50, 8))
    focal_modifiers: tuple[float, ...] = (0.7, 0.85, 1.0, 1.15, 1.3)
    noise_sigma: float = 1.0
    trials: int = 200
    seed: int = 0
    f_px: float = 1280.0
    image: tuple[int, int] = (1280, 720)
    contour_points: int = 360
    marker_diameter: float = 1.0

    def __post_init__(self):
        if any(not 0 < a < 90 for a in self.alpha_deg):
            raise ValueError("alpha must lie strictly between 0 and 90 degrees")
        if any(r <= 0 for r in self.r_over_d):
            raise ValueError("r_over_d must be positive")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if any(m <= 0 for m in self.focal_modifiers):
            raise ValueError("focal modifiers must be positive")

    def camera(self) -> CameraIntrinsics:
        return CameraIntrinsics(self.f_px, self.image[0], self.image[1])

    def to_dict(self) -> dict:
        return {
            "alpha_deg": list(self.alpha_deg),
            "r_over_d": list(self.r_over_d),
            "focal_modifiers": list(self.focal_modifiers),
            "noise_sigma": self.noise_sigma,
            "trials": self.trials,
            "seed": self.seed,
            "f_px": self.f_px,
            "image": list(self.image),
            "contour_points": self.contour_points,
            "marker_diameter": self.marker_diameter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        kwargs = {}
        for key in (
            "alpha_deg",
            "r_over_d",
            "focal_modifiers",
        ):
            if key in data:
                kwargs[key] = tuple(float(v) for v in data[key])
        for key in ("noise_sigma", "f_px", "marker_diameter"):
            if key in data:
                kwargs[key] = float(data[key])
        for key in ("trials", "seed", "contour_points"):
            if key in data:
                kwargs[key] = int(data[key])
        if "image" in data:
            kwargs["image"] = (int(data["image"][0]), int(data["image"][1]))
        return cls(**kwargs)


@dataclass(frozen=True)
class GroundTruthScene:
    """Exact geometry of one synthetic view."""

    alpha_deg: float
    r_over_d: float
    marker_diameter: float
    k_true: CameraIntrinsics
    h_world: np.ndarray = field(repr=False)  # plane coords (units of D) -> image
    h_unit: np.ndarray = field(repr=False)  # unit-circle marker frame -> image
    conic_true: Conic = field(repr=False)
    v_inf_true: np.ndarray = field(repr=False)
    normal_true: np.ndarray = field(repr=False)
    center_cam_true: np.ndarray = field(repr=False)
    rotation_true: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class TrialRecord:
    alpha_deg: float
    r_over_d: float
    modifier: float
    trial: int
    err_normal_deg: float
    err_position: float
    err_reproj_px: float
    disamb_correct: bool
    candidates: int
    failed: str = ""


def make_scene(
    alpha_deg: float,
    r_over_d: float,
    f_px: float = 1280.0,
    image: tuple[int, int] = (1280, 720),
    marker_diameter: float = 1.0,
) -> GroundTruthScene:
    """Ground truth for a camera at ``r_over_d`` diameters from the marker
    centre, optical axis through the centre, plane inclined at ``alpha``.

    Raises when the projected marker leaves the image bounds.
    """
    if not 0 < alpha_deg <= 90:
        raise ValueError("alpha must lie in (0, 90] degrees")
    if r_over_d <= 0:
        raise ValueError("distance must be positive")
    d = marker_diameter
    a = math.radians(alpha_deg)
    ca, sa = math.cos(a), math.sin(a)
    cam = r_over_d * d * np.array([0.0, -ca, sa])
    z = -cam / np.linalg.norm(cam)
    x = np.array([1.0, 0.0, 0.0])
    y = np.cross(z, x)
    rot = np.vstack([x, y, z])  # world -> camera, rows
    t = -rot @ cam
    k = CameraIntrinsics(f_px, image[0], image[1])
    h_plane = k.K @ np.column_stack([rot[:, 0], rot[:, 1], t])  # world units
    h_world = h_plane @ np.diag([d, d, 1.0])  # plane coords in units of D
    h_unit = h_plane @ np.diag([d / 2.0, d / 2.0, 1.0])
    conic_true = transform_conic(Conic.unit_circle(), h_unit)
    v_inf = np.linalg.inv(h_plane).T @ np.array([0.0, 0.0, 1.0])
    normal = rot[:, 2].copy()
    if normal[2] < 0:
        normal = -normal
    scene = GroundTruthScene(
        alpha_deg=float(alpha_deg),
        r_over_d=float(r_over_d),
        marker_diameter=float(d),
        k_true=k,
        h_world=h_world,
        h_unit=h_unit,
        conic_true=conic_true,
        v_inf_true=v_inf,
        normal_true=normal,
        center_cam_true=t,
        rotation_true=rot,
    )
    _check_in_frame(scene)
    return scene


def _check_in_frame(scene: GroundTruthScene, n_boundary: int = 64) -> None:
    pts = sample_ellipse(scene.conic_true, n_boundary, 0.0, 0)
    w, h = scene.k_true.width_px, scene.k_true.height_px
    if (
        pts[:, 0].min() < 0
        or pts[:, 1].min() < 0
        or pts[:, 0].max() > w
        or pts[:, 1].max() > h
    ):
        raise ValueError("marker out of frame")


def metric_normal(n_est, n_true) -> float:
    """Angle between plane normals in degrees, invariant to normal sign."""
    a = np.asarray(n_est, dtype=float)
    b = np.asarray(n_true, dtype=float)
    dot = abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(math.degrees(math.acos(min(dot, 1.0))))


def metric_position(center_est, center_true, marker_diameter: float) -> float:
    """Camera-frame distance between marker centres, in marker diameters."""
    delta = np.asarray(center_est, dtype=float) - np.asarray(center_true, dtype=float)
    return float(np.linalg.norm(delta) / marker_diameter)


def metric_reproj(
    pose: PlanePose,
    scene: GroundTruthScene,
    k_used: CameraIntrinsics,
    grid_radius_in_d: float = 2.0,
) -> float:
    """RMS pixel error over a 5x5 grid of plane points around the marker.

    A bare circle leaves the marker frame free up to rotations and turn-overs
    of the plane; that gauge is fixed by aligning the estimated frame to the
    true one (normal side first, then the optimal in-plane rotation) before
    reprojecting. The grid is projected through the estimate's own camera.
    """
    g = np.linspace(-grid_radius_in_d, grid_radius_in_d, 5)
    gx, gy = np.meshgrid(g, g)
    world = np.column_stack([gx.ravel(), gy.ravel(), np.ones(gx.size)])

    true_px = _project(scene.h_world, world)

    r_est = pose.rotation
    if r_est[:, 2] @ scene.rotation_true[:, 2] < 0:
        r_est = r_est @ np.diag([-1.0, 1.0, -1.0])
    gmat = r_est.T @ scene.rotation_true
    phi = math.atan2(gmat[1, 0] - gmat[0, 1], gmat[0, 0] + gmat[1, 1])
    cp, sp = math.cos(phi), math.sin(phi)
    rz = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    r_al = r_est @ rz
    h_unit_est = k_used.K @ np.column_stack(
        [r_al[:, 0], r_al[:, 1], pose.translation_unit]
    )
    # grid is in units of D; the unit frame measures in circle radii (D/2)
    h_world_est = h_unit_est @ np.diag([2.0, 2.0, 1.0])
    est_px = _project(h_world_est, world)
    return float(np.sqrt(np.mean(np.sum((est_px - true_px) ** 2, axis=1))))


def _project(h: np.ndarray, pts_hom: np.ndarray) -> np.ndarray:
    img = pts_hom @ h.T
    return img[:, :2] / img[:, 2:3]


def run_trial(
    scene: GroundTruthScene,
    k_used: CameraIntrinsics,
    noise_sigma: float,
    seed: int,
    contour_points: int = 360,
    assume_centered: bool = True,
    modifier: float = 1.0,
    trial: int = 0,
) -> TrialRecord:
    """One pass of the full pipeline; pipeline errors become failure flags."""
    base = dict(
        alpha_deg=scene.alpha_deg,
        r_over_d=scene.r_over_d,
        modifier=modifier,
        trial=trial,
    )
    try:
        pts = sample_ellipse(scene.conic_true, contour_points, noise_sigma, seed)
        conic = fit_ellipse(pts)
        pencil = decompose_pencil(conic, Conic.from_matrix(k_used.iac()))
        cands = vanishing_candidates(pencil, k_used)
        if cands.degenerate:
            chosen, n_cands, correct = cands.v1, 1, True
        else:
            side = centered_side_info() if assume_centered else None
            result = select_vanishing_line(cands, pencil, side)
            selected = result.selected if result.selected is not None else 1
            chosen = cands.v1 if selected == 1 else cands.v2
            n_cands = 2
            correct = _closer_line(chosen, cands, scene.v_inf_true)
        pose = homography_from_circle_and_vline(
            conic, chosen, k_used, scene.marker_diameter
        )
        return TrialRecord(
            **base,
            err_normal_deg=metric_normal(pose.normal, scene.normal_true),
            err_position=metric_position(
                pose.center_cam, scene.center_cam_true, scene.marker_diameter
            ),
            err_reproj_px=metric_reproj(pose, scene, k_used),
            disamb_correct=bool(correct),
            candidates=n_cands,
        )
    except (ValueError, np.linalg.LinAlgError) as exc:
        return TrialRecord(
            **base,
            err_normal_deg=float("nan"),
            err_position=float("nan"),
            err_reproj_px=float("nan"),
            disamb_correct=False,
            candidates=0,
            failed=str(exc),
        )


def _closer_line(chosen, cands, v_true) -> bool:
    a1 = _line_angle(cands.v1, v_true)
    a2 = _line_angle(cands.v2, v_true)
    chosen_is_1 = chosen is cands.v1 or np.array_equal(chosen, cands.v1)
    return (a1 <= a2) if chosen_is_1 else (a2 <= a1)


def _line_angle(a, b) -> float:
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.arccos(min(abs(float(a @ b)), 1.0)))


def _trial_seed(seed: int, *indices: int) -> int:
    ss = np.random.SeedSequence((int(seed),) + tuple(int(i) for i in indices))
    return int(ss.generate_state(1)[0])


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """Full sweep over alpha x distance x modifier x trials.

    Each trial draws its noise from an RNG stream derived from the sweep
    seed and the trial's grid position, so results do not depend on
    execution order.
    """
    records: list[TrialRecord] = []
    k_true = config.camera()
    for ia, alpha in enumerate(sorted(config.alpha_deg)):
        for ir, r in enumerate(sorted(config.r_over_d)):
            scene = make_scene(
                alpha, r, config.f_px, config.image, config.marker_diameter
            )
            for im, mod in enumerate(sorted(config.focal_modifiers)):
                k_used = focal_modifier(k_true, mod)
                for trial in range(config.trials):
                    seed = _trial_seed(config.seed, ia, ir, im, trial)
                    records.append(
                        run_trial(
                            scene,
                            k_used,
                            config.noise_sigma,
                            seed,
                            config.contour_points,
                            assume_centered=True,
                            modifier=mod,
                            trial=trial,
                        )
                    )
    records.sort(key=lambda t: (t.alpha_deg, t.r_over_d, t.modifier, t.trial))
    return records


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records: list[TrialRecord]) -> str:
    """Render trial records as CSV text (deterministic formatting)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for t in records:
        writer.writerow(
            [
                _fmt(t.alpha_deg),
                _fmt(t.r_over_d),
                _fmt(t.modifier),
                _fmt(t.trial),
                _fmt(t.err_normal_deg),
                _fmt(t.err_position),
                _fmt(t.err_reproj_px),
                _fmt(t.disamb_correct),
                _fmt(t.candidates),
                t.failed,
            ]
        )
    return buf.getvalue()


def write_csv(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records))


# ---------------------------------------------------------------------------
# Selection-rule oracle over offset-circle scenes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prop2TrialRecord:
    trial: int
    theta_deg: float
    x_c: float
    y_c: float
    radius: float
    noise_sigma: float
    decided: bool
    correct: bool
    prod_selected: float
    prod_other: float


def sample_sufficient_scene(
    rng: np.random.Generator,
    r_over_d: float = 15.0,
    margin: float = 1.5,
    f_px: float = 1280.0,
    image: tuple[int, int] = (1280, 720),
):
    """Random scene satisfying the offset-circle sufficient condition.

    The circle centre offset is sampled relative to the radius with
    ``y_c >= margin * R``; the radius is then solved so the camera sits at
    ``r_over_d`` marker diameters from the circle centre. Returns the scene
    side info plus the exact image conic, true vanishing line and camera.
    """
    theta = rng.uniform(math.radians(15), math.radians(75))
    rho = rng.uniform(margin, 6.0)  # y_c / R
    xi = rng.uniform(-4.0, 4.0)  # x_c / R
    roll = rng.uniform(0.0, 2 * math.pi)
    ct, st = math.cos(theta), math.sin(theta)
    # |camera - centre| = 2 * r_over_d * R with camera at unit distance from q
    dd = 2.0 * r_over_d
    acoef = dd * dd - xi * xi - rho * rho
    if acoef <= 0:
        raise ValueError("distance too small for the sampled offsets")
    radius = (rho * ct + math.sqrt(rho * rho * ct * ct + acoef)) / acoef
    xc, yc = xi * radius, rho * radius

    cam = np.array([0.0, -ct, st])
    z = -cam
    x = np.array([1.0, 0.0, 0.0])
    y = np.cross(z, x)
    rot = np.vstack([x, y, z])
    cr, sr = math.cos(roll), math.sin(roll)
    rot = np.array([[cr, -sr, 0.0], [sr, cr, 0.0], [0.0, 0.0, 1.0]]) @ rot
    t = -rot @ cam
    k = CameraIntrinsics(f_px, image[0], image[1])
    h_plane = k.K @ np.column_stack([rot[:, 0], rot[:, 1], t])

    q_world = np.array(
        [
            [1.0, 0.0, -xc],
            [0.0, 1.0, -yc],
            [-xc, -yc, xc * xc + yc * yc - radius * radius],
        ]
    )
    conic = transform_conic(Conic.from_matrix(q_world), h_plane)
    v_true = np.linalg.inv(h_plane).T @ np.array([0.0, 0.0, 1.0])
    side = SceneSideInfo(theta=theta, circle_center=(xc, yc), radius=radius)
    return side, conic, v_true, k


def run_prop2_oracle(
    trials: int,
    seed: int,
    noise_sigma: float = 0.0,
    r_over_d: float = 15.0,
    margin: float = 1.5,
    contour_points: int = 360,
) -> tuple[list[Prop2TrialRecord], dict]:
    """Monte-Carlo check of the selection rule on sufficient-condition scenes.

    Returns per-trial records and a summary with the decided fraction and
    the selection accuracy over decided trials.
    """
    rng = np.random.default_rng(seed)
    records = []
    n_decided = 0
    n_correct = 0
    for trial in range(trials):
        side, conic_exact, v_true, k = sample_sufficient_scene(
            rng, r_over_d=r_over_d, margin=margin
        )
        assert sufficient_condition_check(side)
        if noise_sigma > 0:
            pts = sample_ellipse(
                conic_exact,
                contour_points,
                noise_sigma,
                _trial_seed(seed, trial),
            )
            conic = fit_ellipse(pts)
        else:
            conic = conic_exact
        pencil = decompose_pencil(conic, Conic.from_matrix(k.iac()))
        cands = vanishing_candidates(pencil, k)
        result = select_vanishing_line(cands, pencil, side)
        decided = result.selected is not None
        if decided:
            chosen = cands.v1 if result.selected == 1 else cands.v2
            correct = _closer_line(chosen, cands, v_true)
            p_sel = result.separation_products[result.selected - 1]
            p_other = result.separation_products[2 - result.selected]
        else:
            correct = False
            p_sel, p_other = result.separation_products
        n_decided += int(decided)
        n_correct += int(decided and correct)
        records.append(
            Prop2TrialRecord(
                trial=trial,
                theta_deg=math.degrees(side.theta),
                x_c=side.circle_center[0],
                y_c=side.circle_center[1],
                radius=side.radius,
                noise_sigma=noise_sigma,
                decided=decided,
                correct=correct,
                prod_selected=p_sel,
                prod_other=p_other,
            )
        )
    summary = {
        "trials": trials,
        "seed": seed,
        "noise_sigma": noise_sigma,
        "r_over_d": r_over_d,
        "margin": margin,
        "decided": n_decided,
        "correct_of_decided": n_correct,
        "decided_fraction": n_decided / trials if trials else 0.0,
        "accuracy_decided": (n_correct / n_decided) if n_decided else 0.0,
    }
    return records, summary


def prop2_records_to_csv(records: list[Prop2TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "trial",
            "theta_deg",
            "x_c",
            "y_c",
            "radius",
            "noise_sigma",
            "decided",
            "correct",
            "prod_selected",
            "prod_other",
        ]
    )
    for t in records:
        writer.writerow(
            [
                t.trial,
                repr(t.theta_deg),
                repr(t.x_c),
                repr(t.y_c),
                repr(t.radius),
                repr(t.noise_sigma),
                "1" if t.decided else "0",
                "1" if t.correct else "0",
                repr(t.prod_selected),
                repr(t.prod_other),
            ]
        )
    return buf.getvalue()
