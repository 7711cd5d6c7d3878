"""Selecting the true vanishing line among the two candidates.

The geometric machinery: the two extreme base points of the pencil project
to image points z1, z3, and exactly one candidate line separates them. Which
one is the vanishing line depends on where the base points sit relative to
the trace of the camera's principal plane on the support plane, which the
closed-form side test below decides from coarse scene knowledge.

The shipped sign rule is the one validated by the Monte-Carlo oracle whose
summary is committed at ``data/prop2_oracle.csv`` (regenerate with
``circlepose verify-prop2``): when the side test holds (as it does whenever
the optical axis passes through the circle centre), the vanishing line is
the candidate that separates the image base points; when the sufficient
condition on the circle offset holds, it is the candidate that does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .conics import normalize_point
from .pencil import PencilDecomposition
from .pose import VanishingCandidates

#: Separation products with magnitude below this (relative) threshold are
#: treated as sign-ambiguous and selection fails safe to Undecided.
PRODUCT_TOL = 1e-10

#: Circle-centre offsets below this are treated as "optical axis through the
#: circle centre" for the robust centered branch.
CENTERED_TOL = 1e-9


class SelectionRule(Enum):
    SUFFICIENT_CONDITION = "sufficient_condition"
    SEPARATION_TEST = "separation_test"
    NONE = "none"


@dataclass(frozen=True)
class SceneSideInfo:
    """Coarse scene layout in the canonical side-test frame.

    The frame puts the point where the optical axis meets the support plane
    at the origin, the x-axis parallel to the principal-plane trace, and the
    camera centre at unit distance, elevated by ``theta`` (radians, in
    [0, pi/2)). The circle has centre ``(x_c, y_c)`` and radius ``R > 0`` in
    that frame.
    """

    theta: float
    circle_center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not 0.0 <= self.theta < math.pi / 2:
            raise ValueError("theta must lie in [0, pi/2)")
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class DisambiguationResult:
    selected: int | None  # 1, 2, or None for Undecided
    rule_fired: SelectionRule
    separation_products: tuple[float, float]


def separation_product(line, p1, p3) -> float:
    """``(l . p1/p1_3)(l . p3/p3_3)``; negative iff the line separates the
    two (finite) points. Raises for points at infinity."""
    line = np.asarray(line, dtype=float)
    try:
        b1 = normalize_point(p1)
        b3 = normalize_point(p3)
    except ValueError:
        raise ValueError("base point at infinity") from None
    return float((line @ b1) * (line @ b3))


def eq3_lhs(s: SceneSideInfo) -> float:
    """Left-hand side of the closed-form side test."""
    ct = math.cos(s.theta)
    xc, yc = s.circle_center
    r = s.radius
    return (
        ct * (yc * yc - r * r) * (yc + ct)
        + yc * ct * (1.0 + xc * xc)
        + xc * xc
        + yc * yc
    )


def same_side_condition(s: SceneSideInfo) -> bool:
    """True iff the side-test inequality holds (LHS <= 0).

    Note on semantics: validated against brute-force geometry, a True result
    corresponds to the two base points straddling the principal-plane trace
    (one in front of the camera, one behind). It holds identically, for any
    radius and elevation, when the circle is centered on the optical axis.
    """
    return eq3_lhs(s) <= 0.0


def sufficient_condition_check(s: SceneSideInfo) -> bool:
    """Offset-circle condition under which selection is guaranteed decidable:
    (i) ``y_c > 0`` and (ii) ``y_c^2 > R^2``."""
    yc = s.circle_center[1]
    return yc > 0.0 and yc * yc - s.radius * s.radius > 0.0


def select_vanishing_line(
    cand: VanishingCandidates,
    p: PencilDecomposition,
    side: SceneSideInfo | None,
) -> DisambiguationResult:
    """Pick the true vanishing line using the validated sign rule.

    Decides only in the two regimes where the branch is certain without
    precise scene measurements: the sufficient condition (i)+(ii), and the
    centered configuration (optical axis through the circle centre, where
    the side test holds for every radius and elevation). Otherwise, or when
    the separation products are numerically ambiguous, returns Undecided.
    """
    if cand.degenerate:
        raise ValueError("candidates are degenerate; nothing to select")
    z1 = p.base_points[:, 0]
    z3 = p.base_points[:, 2]
    prod1 = separation_product(cand.v1, z1, z3)
    prod2 = separation_product(cand.v2, z1, z3)
    products = (prod1, prod2)

    if side is None:
        return DisambiguationResult(None, SelectionRule.NONE, products)

    scale = max(abs(prod1), abs(prod2), 1e-300)
    decisive = (
        min(abs(prod1), abs(prod2)) > PRODUCT_TOL * scale and prod1 * prod2 < 0
    )

    if sufficient_condition_check(side):
        if not decisive:
            return DisambiguationResult(None, SelectionRule.NONE, products)
        # base points on one side of the principal trace: the vanishing line
        # is the candidate that does NOT separate their images
        selected = 1 if prod1 > 0 else 2
        return DisambiguationResult(
            selected, SelectionRule.SUFFICIENT_CONDITION, products
        )

    xc, yc = side.circle_center
    centered = max(abs(xc), abs(yc)) <= CENTERED_TOL * max(1.0, side.radius)
    if centered:
        if not decisive:
            return DisambiguationResult(None, SelectionRule.NONE, products)
        # straddling regime (side test holds identically): the vanishing
        # line is the candidate that DOES separate the image base points
        selected = 1 if prod1 < 0 else 2
        return DisambiguationResult(selected, SelectionRule.SEPARATION_TEST, products)

    return DisambiguationResult(None, SelectionRule.NONE, products)


def centered_side_info(theta: float = math.pi / 4, radius: float = 0.05) -> SceneSideInfo:
    """Side info asserting the optical axis passes through the circle centre.

    The selection branch for this regime is invariant to ``theta`` and
    ``radius``, so the defaults only need to be valid placeholders.
    """
    return SceneSideInfo(theta=theta, circle_center=(0.0, 0.0), radius=radius)
