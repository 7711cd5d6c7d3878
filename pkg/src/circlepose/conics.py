"""Conic algebra in 2D homogeneous coordinates.

A conic is a real symmetric 3x3 matrix ``m`` up to scale: the points ``x``
with ``x^T m x = 0``. Points and lines are plain length-3 numpy arrays in
homogeneous coordinates; a point with third coordinate 0 lies at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._validation import as_matrix_3x3, as_vec3

# Homogeneous points and lines are bare arrays throughout the library.
HomPoint2 = np.ndarray
HomLine2 = np.ndarray

#: Relative threshold under which an eigenvalue counts as zero.
DEFAULT_RANK_TOL = 1e-9

LINE_AT_INFINITY = np.array([0.0, 0.0, 1.0])


class ConicKind(Enum):
    REAL_ELLIPSE = "real_ellipse"
    VIRTUAL_CONIC = "virtual_conic"
    LINE_PAIR = "line_pair"
    OTHER = "other"


@dataclass(frozen=True)
class Signature:
    """Counts of positive (p) and negative (n) eigenvalues of a conic matrix.

    The raw pair depends on the sign of the matrix scale; the unordered pair
    {p, n} is a projective invariant.
    """

    p: int
    n: int

    def unordered(self) -> tuple[int, int]:
        return (max(self.p, self.n), min(self.p, self.n))


@dataclass(frozen=True)
class Conic:
    """Symmetric 3x3 conic matrix plus its classification.

    Construct via :meth:`from_matrix` or :meth:`from_coefficients`; both
    symmetrize exactly and classify the result.
    """

    m: np.ndarray = field(repr=False)
    kind: ConicKind

    @classmethod
    def from_matrix(cls, m, tol: float = DEFAULT_RANK_TOL) -> "Conic":
        m = as_matrix_3x3(m, "conic matrix")
        m = 0.5 * (m + m.T)  # exactly symmetric: (a+b)/2 == (b+a)/2 in IEEE
        m.flags.writeable = False
        return cls(m=m, kind=_classify(m, tol))

    @classmethod
    def from_coefficients(cls, coeffs) -> "Conic":
        """Build from algebraic coefficients [a,b,c,d,e,f] of
        ``a x^2 + b xy + c y^2 + d x + e y + f = 0``."""
        a, b, c, d, e, f = (float(v) for v in coeffs)
        m = np.array([[a, b / 2, d / 2], [b / 2, c, e / 2], [d / 2, e / 2, f]])
        return cls.from_matrix(m)

    @classmethod
    def unit_circle(cls) -> "Conic":
        return cls.from_matrix(np.diag([1.0, 1.0, -1.0]))

    def coefficients(self) -> np.ndarray:
        m = self.m
        return np.array(
            [m[0, 0], 2 * m[0, 1], m[1, 1], 2 * m[0, 2], 2 * m[1, 2], m[2, 2]]
        )

    def to_dict(self) -> dict:
        return {"m": self.m.tolist()}

    @classmethod
    def from_dict(cls, data) -> "Conic":
        """Accept ``{"m": [[...]]}`` or a bare 6-coefficient list."""
        if isinstance(data, dict):
            if "m" not in data:
                raise ValueError("conic JSON object must carry an 'm' key")
            return cls.from_matrix(data["m"])
        seq = list(data)
        if len(seq) == 6:
            return cls.from_coefficients(seq)
        return cls.from_matrix(seq)


def _classify(m: np.ndarray, tol: float) -> ConicKind:
    sig = _signature_of(m, tol)
    rank = sig.p + sig.n
    if rank == 2:
        return ConicKind.LINE_PAIR
    if rank == 3:
        pair = sig.unordered()
        if pair == (3, 0):
            return ConicKind.VIRTUAL_CONIC
        # full-rank {2,1}: affine ellipse iff the quadratic part is definite
        det2 = m[0, 0] * m[1, 1] - m[0, 1] * m[0, 1]
        if det2 > 0:
            return ConicKind.REAL_ELLIPSE
        return ConicKind.OTHER
    return ConicKind.OTHER


def _signature_of(m: np.ndarray, tol: float) -> Signature:
    if not np.any(m):
        raise ValueError("not a conic: zero matrix")
    w = np.linalg.eigvalsh(_balanced_congruent(m))
    scale = np.max(np.abs(w))
    cut = tol * scale
    return Signature(p=int(np.sum(w > cut)), n=int(np.sum(w < -cut)))


def _balanced_congruent(m: np.ndarray) -> np.ndarray:
    """Congruent matrix with reduced dynamic range (same signature).

    Central conics far from the coordinate origin carry a translation-induced
    eigenvalue spread that swamps relative rank tolerances; moving the centre
    to the origin removes it without touching the inertia (congruence). The
    centered matrix is block diagonal: its eigenvalues are those of the
    quadratic part plus the conic's value at its centre. Non-central conics
    are returned unchanged.
    """
    quad = m[:2, :2]
    det2 = quad[0, 0] * quad[1, 1] - quad[0, 1] ** 2
    qn = np.max(np.abs(quad))
    if qn == 0.0 or abs(det2) <= (1e-10 * qn) ** 2:
        return m
    center = -np.linalg.solve(quad, m[:2, 2])
    val = float(m[2, 2] + m[:2, 2] @ center)  # conic value at its centre
    out = np.zeros((3, 3))
    out[:2, :2] = quad
    out[2, 2] = val
    return out


def signature(c: Conic, tol: float = DEFAULT_RANK_TOL) -> Signature:
    """Raw eigenvalue signature (p, n) of the conic matrix.

    Eigenvalues with magnitude below ``tol`` times the largest magnitude
    count as zero. Callers needing the projective invariant should compare
    ``Signature.unordered()``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _signature_of(c.m, tol)


def normalize_unit_det(c: Conic) -> Conic:
    """Rescale so the matrix has determinant exactly +1 (real cube root)."""
    d = float(np.linalg.det(c.m))
    scale = float(np.linalg.norm(c.m))
    if abs(d) <= (1e-10 * scale) ** 3:
        raise ValueError("degenerate conic: determinant too small to normalize")
    k = np.sign(d) * abs(d) ** (-1.0 / 3.0)
    return Conic.from_matrix(k * c.m)


def transform_conic(c: Conic, h) -> Conic:
    """Transport the conic by the point homography ``x' = h x``.

    Returns the conic with matrix ``h^-T m h^-1``, so incidence is preserved.
    """
    h = as_matrix_3x3(h, "homography")
    if abs(np.linalg.det(h)) <= 1e-14 * np.linalg.norm(h) ** 3:
        raise ValueError("homography is singular")
    hi = np.linalg.inv(h)
    return Conic.from_matrix(hi.T @ c.m @ hi)


def pole(c: Conic, line) -> HomPoint2:
    """Pole of a line with respect to an invertible conic: ``c^-1 l``."""
    line = as_vec3(line, "line")
    if abs(np.linalg.det(c.m)) <= 1e-14 * np.linalg.norm(c.m) ** 3:
        raise ValueError("conic is singular; pole undefined")
    return np.linalg.solve(c.m, line)


def polar(c: Conic, point) -> HomLine2:
    """Polar line of a point with respect to the conic: ``c x``."""
    point = as_vec3(point, "point")
    return c.m @ point


def decompose_line_pair(
    d: Conic, tol: float = DEFAULT_RANK_TOL
) -> tuple[HomLine2, HomLine2]:
    """Split a rank-2 conic into its two real lines.

    Writes the matrix as ``mu1 e1 e1^T + mu3 e3 e3^T`` with ``mu1 > 0 > mu3``
    and returns ``sqrt(mu1) e1 +- sqrt(-mu3) e3`` in arbitrary order.
    """
    w, e = np.linalg.eigh(d.m)
    scale = np.max(np.abs(w))
    if scale == 0.0:
        raise ValueError("not a line pair: zero matrix")
    nz = np.abs(w) > tol * scale
    if int(np.sum(nz)) != 2:
        raise ValueError("not a line pair: rank != 2")
    mu = w[nz]
    if mu[0] * mu[1] > 0:
        raise ValueError("complex-conjugate line pair: no real decomposition")
    vecs = e[:, nz]
    i_pos, i_neg = (0, 1) if mu[0] > 0 else (1, 0)
    a = np.sqrt(mu[i_pos]) * vecs[:, i_pos]
    b = np.sqrt(-mu[i_neg]) * vecs[:, i_neg]
    return a + b, a - b


def normalized_projective(arr) -> np.ndarray:
    """Scale-free canonical form: unit Frobenius norm, sign fixed by the
    first entry above threshold in row-major scan order."""
    arr = np.asarray(arr, dtype=float)
    nrm = np.linalg.norm(arr)
    if nrm == 0.0:
        raise ValueError("zero array has no projective normalization")
    out = arr / nrm
    flat = out.reshape(-1)
    idx = np.argmax(np.abs(flat) > 1e-12)
    if flat[idx] < 0:
        out = -out
    return out


def proportional(a, b, tol: float = 1e-10) -> bool:
    """True when two arrays agree up to a nonzero scale factor."""
    return projective_residual(a, b) <= tol


def projective_residual(a, b) -> float:
    """Distance between projective normal forms (0 means proportional)."""
    na = normalized_projective(a)
    nb = normalized_projective(b)
    return float(np.linalg.norm(na - nb))


def normalize_point(x, tol: float = 1e-12) -> HomPoint2:
    """Rescale a finite homogeneous point so its third coordinate is 1."""
    x = as_vec3(x, "point")
    if abs(x[2]) <= tol * np.linalg.norm(x):
        raise ValueError("point at infinity cannot be normalized")
    return x / x[2]


def is_point_at_infinity(x, tol: float = 1e-12) -> bool:
    x = as_vec3(x, "point")
    return abs(x[2]) <= tol * np.linalg.norm(x)


def line_through(p, q) -> HomLine2:
    return np.cross(as_vec3(p, "p"), as_vec3(q, "q"))


def intersect_lines(l1, l2) -> HomPoint2:
    return np.cross(as_vec3(l1, "l1"), as_vec3(l2, "l2"))
