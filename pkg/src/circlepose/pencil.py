"""Generalized eigen-analysis of the pair (circle image C, absolute-conic image w).

The one-parameter family ``{C - beta*w}`` contains three degenerate members;
after normalizing both matrices to unit determinant the family's parameters
coincide with those of the world-side pair, and the member at the middle
eigenvalue is the unique real line pair carrying the vanishing line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix_3x3
from .conics import Conic, ConicKind, Signature, normalize_unit_det, signature

#: Relative eigenvalue-gap threshold below which the viewing geometry is
#: treated as fronto-parallel (the twofold ambiguity collapses).
COLLISION_TOL = 1e-7


def generalized_eigen_sym(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``a v = lambda b v`` for symmetric ``a`` and definite ``b``.

    Factors ``b = L L^T`` and solves the standard symmetric problem on
    ``L^-1 a L^-T``. A negative definite ``b`` is handled by negating the
    pair, which leaves the eigenpairs unchanged.

    Returns eigenvalues in descending order and eigenvectors as columns.
    """
    a = as_matrix_3x3(a, "a")
    b = as_matrix_3x3(b, "b")
    try:
        chol = np.linalg.cholesky(b)
    except np.linalg.LinAlgError:
        try:
            chol = np.linalg.cholesky(-b)
        except np.linalg.LinAlgError:
            raise ValueError("second matrix of the pair must be definite") from None
        a = -a
    li = np.linalg.inv(chol)
    mid = li @ a @ li.T
    mid = 0.5 * (mid + mid.T)
    w, y = np.linalg.eigh(mid)
    v = li.T @ y
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


@dataclass(frozen=True)
class PencilDecomposition:
    """Eigenstructure of the unit-determinant pair (C, w).

    ``lambdas`` are sorted descending; ``base_points`` holds the unit-norm
    generalized eigenvectors as columns; ``degenerates[i]`` is the member
    ``C - lambdas[i] * w``. ``fronto_parallel`` flags an eigenvalue collision
    (the pose ambiguity degenerates to a single solution).
    """

    lambdas: np.ndarray = field(repr=False)
    base_points: np.ndarray = field(repr=False)
    degenerates: tuple[Conic, Conic, Conic]
    sigs: tuple[Signature, Signature, Signature]
    fronto_parallel: bool
    conic: Conic = field(repr=False)
    iac: Conic = field(repr=False)

    @property
    def line_pair_member(self) -> Conic:
        """The degenerate member carrying the two candidate lines."""
        return self.degenerates[1]

    def to_dict(self) -> dict:
        return {
            "lambdas": self.lambdas.tolist(),
            "base_points": self.base_points.tolist(),
            "degenerates": [d.m.tolist() for d in self.degenerates],
            "signatures": [[s.p, s.n] for s in self.sigs],
            "fronto_parallel": self.fronto_parallel,
        }


#: Classification tolerance for the degenerate members, which are only
#: numerically rank-2 (their zero eigenvalue sits at the error level of the
#: generalized eigenvalues, not at machine epsilon).
DEGENERATE_RANK_TOL = 1e-6


def decompose_pencil(
    c: Conic,
    w: Conic,
    collision_tol: float = COLLISION_TOL,
    degenerate_rank_tol: float = DEGENERATE_RANK_TOL,
) -> PencilDecomposition:
    """Decompose the pencil spanned by a circle image and the IAC.

    Both inputs are normalized to unit determinant before pairing. Raises if
    ``c`` is not a real ellipse or ``w`` is not definite.

    The member signatures follow exactly from the eigenvalue gaps: writing
    the pair in the eigenbasis shows ``D_i`` congruent to
    ``diag(lambda_j - lambda_i, j != i; 0)``, so the sorted eigenvalues give
    members of signature (0,2), (1,1) and (2,0), the real line pair always
    sitting at the middle eigenvalue.
    """
    if c.kind is not ConicKind.REAL_ELLIPSE:
        raise ValueError("input conic is not a real ellipse")
    if signature(w).unordered() != (3, 0):
        raise ValueError("IAC must be definite")

    cn = normalize_unit_det(c)
    wn = normalize_unit_det(w)
    lam, vecs = generalized_eigen_sym(cn.m, wn.m)

    # unit Euclidean norm, largest-magnitude coordinate positive
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    for i in range(3):
        j = int(np.argmax(np.abs(vecs[:, i])))
        if vecs[j, i] < 0:
            vecs[:, i] = -vecs[:, i]

    collided = (lam[0] - lam[1]) < collision_tol * abs(lam[1]) or (
        lam[1] - lam[2]
    ) < collision_tol * abs(lam[1])

    degenerates = tuple(
        Conic.from_matrix(cn.m - lam[i] * wn.m, tol=degenerate_rank_tol)
        for i in range(3)
    )
    sigs = tuple(
        Signature(
            p=int(np.sum(np.delete(lam, i) > lam[i])),
            n=int(np.sum(np.delete(lam, i) < lam[i])),
        )
        for i in range(3)
    )

    return PencilDecomposition(
        lambdas=lam,
        base_points=vecs,
        degenerates=degenerates,
        sigs=sigs,
        fronto_parallel=bool(collided),
        conic=cn,
        iac=wn,
    )
