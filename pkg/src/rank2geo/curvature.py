"""Curvature tensor, sectional curvature and Lie triple systems.

Vectors in ``p`` are handled in coordinates with respect to the model's
orthonormal p-basis, so the metric on ``p`` is the Euclidean one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import DegeneratePlane, NotTangent
from .numlin import orth_svd
from .symspace import SymmetricSpaceModel


@dataclass(frozen=True, eq=False)
class TangentSubspace:
    """Orthonormal rows ``basis`` (k x dim p) spanning U ⊂ p."""

    model: SymmetricSpaceModel
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def space(self):
        return self.model.id

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def complement(self) -> "TangentSubspace":
        P = np.eye(self.model.dim_p) - self.projector()
        return TangentSubspace(self.model, orth_svd(P, tol=1e-8))

    def matrices(self) -> np.ndarray:
        return self.model.to_matrix(self.basis)


def tangent_subspace(model: SymmetricSpaceModel, vectors, tol: float | None = None) -> TangentSubspace:
    """Orthonormalize p-coordinate vectors into a TangentSubspace."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.shape[-1] != model.dim_p:
        raise NotTangent(f"expected p-coordinates of length {model.dim_p}, got {V.shape[-1]}")
    return TangentSubspace(model, orth_svd(V, tol=TOL.rank if tol is None else tol))


def tangent_from_matrices(model: SymmetricSpaceModel, mats, tol: float = 1e-8) -> TangentSubspace:
    """TangentSubspace spanned by matrices of g that must lie in p."""
    mats = np.asarray(mats)
    coords = model.coords(mats)
    recon = np.tensordot(coords, model.g_mats, axes=([-1], [0]))
    scale = max(np.abs(mats).max(), 1e-300)
    if np.abs(recon - mats).max() > 1e-8 * scale:
        raise NotTangent("matrices are not in the Lie algebra")
    if np.abs(coords[:, : model.dim_k]).max(initial=0.0) > 1e-8 * np.abs(coords).max():
        raise NotTangent("matrices have a k-component")
    return tangent_subspace(model, coords[:, model.dim_k:], tol)


def _check_tangent(model, *vs):
    for v in vs:
        if np.shape(v)[-1] != model.dim_p:
            raise NotTangent("vector is not given in p-coordinates")


def curvature_op(model: SymmetricSpaceModel, X, Y, Z) -> np.ndarray:
    """R(X, Y)Z = -[[X, Y], Z] in p-coordinates."""
    _check_tangent(model, X, Y, Z)
    return np.einsum("abcd,a,b,c->d", model.curvature_tensor, X, Y, Z)


def curvature_op_matrix(model: SymmetricSpaceModel, X, Y, Z) -> np.ndarray:
    """Same quantity computed directly with matrix brackets (independent route)."""
    mx, my, mz = (model.to_matrix(v) for v in (X, Y, Z))
    xy = mx @ my - my @ mx
    out = -(xy @ mz - mz @ xy)
    coords = model.coords(out)
    if np.abs(coords[: model.dim_k]).max() > TOL.residual * max(1.0, np.abs(coords).max()):
        raise NotTangent("curvature output left p")
    return coords[model.dim_k:]


def sectional_curvature(model: SymmetricSpaceModel, X, Y) -> float:
    """K(X, Y) = |[X, Y]|^2 / (|X|^2 |Y|^2 - <X, Y>^2)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    denom = X @ X * (Y @ Y) - (X @ Y) ** 2
    if denom < 1e-12:
        raise DegeneratePlane("X and Y are (nearly) linearly dependent")
    br = np.einsum("abk,a,b->k", model.p_bracket_k, X, Y)
    return float(br @ br / denom)


def sectional_curvatures(model: SymmetricSpaceModel, X, Y) -> np.ndarray:
    """Vectorized sectional curvature for rows of X and Y."""
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    denom = np.einsum("ia,ia->i", X, X) * np.einsum("ia,ia->i", Y, Y) - np.einsum("ia,ia->i", X, Y) ** 2
    br = np.einsum("abk,ia,ib->ik", model.p_bracket_k, X, Y)
    return np.einsum("ik,ik->i", br, br) / denom


def apply_triples(model: SymmetricSpaceModel, U: np.ndarray) -> np.ndarray:
    """T[i, j, k, :] = R(u_i, u_j) u_k for rows u of U."""
    Rt = model.curvature_tensor
    t = np.tensordot(U, Rt, axes=([1], [0]))          # i b c d
    t = np.tensordot(U, t, axes=([1], [1]))           # j i c d
    t = np.tensordot(U, t, axes=([1], [2]))           # k j i d
    return t.transpose(2, 1, 0, 3)


def lts_defect(model: SymmetricSpaceModel, T: TangentSubspace | np.ndarray) -> float:
    """Max over basis triples of |proj_{U^perp} R(u_i, u_j) u_k|.

    The basis is the eigenbasis of the contracted residual form
    S(x, y) = sum_jk <E(x, e_j, e_k), E(y, e_j, e_k)>, so the value depends on
    U only and not on the orthonormal basis it is handed in.
    """
    U = T.basis if isinstance(T, TangentSubspace) else np.atleast_2d(T)
    if U.shape[0] == 0:
        return 0.0
    vals = apply_triples(model, U)
    resid = vals - np.einsum("ijkd,ld,le->ijke", vals, U, U)
    S = np.einsum("ijkd,ljkd->il", resid, resid)
    if np.abs(S).max() > 1e-24:
        _, V = np.linalg.eigh((S + S.T) / 2)
        # E is trilinear, so changing basis is a contraction on each slot
        resid = np.einsum("ijkd,ia,jb,kc->abcd", resid, V, V, V)
    return float(np.sqrt(np.einsum("ijkd,ijkd->ijk", resid, resid)).max())


def is_lts(model, T, tol: float | None = None) -> bool:
    return lts_defect(model, T) < (TOL.lts if tol is None else tol)


def lts_closure(model: SymmetricSpaceModel, vectors, max_rounds: int = 50) -> TangentSubspace:
    """Smallest curvature-invariant subspace containing the given vectors."""
    U = orth_svd(np.atleast_2d(np.asarray(vectors, dtype=float)), tol=1e-9)
    for _ in range(max_rounds):
        vals = apply_triples(model, U).reshape(-1, model.dim_p)
        vals = vals - (vals @ U.T) @ U
        scale = max(np.abs(vals).max(initial=0.0), 1e-300)
        if scale < 1e-9:
            break
        new = orth_svd(vals, tol=1e-7)
        if new.shape[0] == 0:
            break
        U = orth_svd(np.vstack([U, new]), tol=1e-9)
        if U.shape[0] == model.dim_p:
            U = np.eye(model.dim_p)
            break
    return TangentSubspace(model, U)


def jacobi_operator(model: SymmetricSpaceModel, H) -> np.ndarray:
    """Matrix of u -> R(u, H)H on p (symmetric, positive semidefinite)."""
    return np.einsum("cabd,a,b->cd", model.curvature_tensor, H, H)


def jacobi_bilinear(model: SymmetricSpaceModel, H1, H2) -> np.ndarray:
    """Symmetric bilinear extension: u -> (R(u, H1)H2 + R(u, H2)H1)/2."""
    Rt = model.curvature_tensor
    A = np.einsum("cabd,a,b->cd", Rt, H1, H2)
    B = np.einsum("cabd,a,b->cd", Rt, H2, H1)
    return (A + B) / 2


def subspace_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Mutual projection residual between two orthonormal row bases."""
    if A.shape[0] != B.shape[0]:
        return float("inf")
    ra = A - (A @ B.T) @ B
    rb = B - (B @ A.T) @ A
    return float(max(np.abs(ra).max(initial=0.0), np.abs(rb).max(initial=0.0)))
