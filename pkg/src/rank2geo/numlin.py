"""Dense linear algebra: subspaces, eigensolvers, matrix exponential."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import EmptyInput, NotSymmetric


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis (rows) of a subspace of R^d or C^d.

    ``gram`` is the inner product the basis is orthonormal for (``None`` means
    the standard one).
    """

    ambient_dim: int
    basis: np.ndarray
    gram: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        """Matrix P with P v = orthogonal projection of v (column vector)."""
        B = self.basis
        G = np.eye(self.ambient_dim) if self.gram is None else self.gram
        return B.T @ B.conj() @ G if self.dim else np.zeros((self.ambient_dim,) * 2)

    def project(self, v) -> np.ndarray:
        v = np.asarray(v)
        G = np.eye(self.ambient_dim) if self.gram is None else self.gram
        return (v @ G.T @ self.basis.conj().T) @ self.basis

    def complement(self) -> "Subspace":
        G = np.eye(self.ambient_dim) if self.gram is None else self.gram
        full = np.eye(self.ambient_dim, dtype=self.basis.dtype)
        resid = full - full @ self.projector().T
        return orthonormalize(resid, G, allow_empty=True)


def _inner(G, u, v):
    return np.vdot(u, G @ v) if G is not None else np.vdot(u, v)


def orthonormalize(vectors, inner_product=None, *, tol: float | None = None,
                   allow_empty: bool = False) -> Subspace:
    """Modified Gram-Schmidt with re-orthogonalization.

    Vectors whose residual after projection falls below ``tol * max-norm`` are
    dropped, so the rank decision is relative to the largest input.
    """
    V = np.atleast_2d(np.asarray(vectors))
    if V.size == 0 or V.shape[0] == 0:
        if allow_empty:
            d = V.shape[-1] if V.ndim == 2 else 0
            return Subspace(d, np.zeros((0, d), dtype=V.dtype), inner_product)
        raise EmptyInput("no vectors given")
    tol = TOL.rank if tol is None else tol
    G = inner_product
    dtype = np.result_type(V.dtype, float)
    norms = [np.sqrt(abs(_inner(G, v, v))) for v in V]
    scale = max(norms) if norms else 0.0
    basis: list[np.ndarray] = []
    if scale == 0.0:
        return Subspace(V.shape[1], np.zeros((0, V.shape[1]), dtype=dtype), G)
    for v in V:
        w = v.astype(dtype, copy=True)
        for _ in range(2):
            for b in basis:
                w = w - _inner(G, b, w) * b
        nw = np.sqrt(abs(_inner(G, w, w)))
        if nw > tol * scale:
            basis.append(w / nw)
    B = np.array(basis, dtype=dtype) if basis else np.zeros((0, V.shape[1]), dtype=dtype)
    return Subspace(V.shape[1], B, G)


def orth_svd(vectors, tol: float | None = None) -> np.ndarray:
    """Orthonormal rows spanning the row space (SVD rank, relative tolerance)."""
    V = np.atleast_2d(np.asarray(vectors))
    if V.shape[0] == 0:
        return np.zeros((0, V.shape[1]), dtype=V.dtype)
    tol = TOL.rank if tol is None else tol
    _, s, vh = np.linalg.svd(V, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((0, V.shape[1]), dtype=V.dtype)
    r = int(np.sum(s > tol * s[0]))
    return vh[:r]


def null_space(M, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal columns spanning ker M (rank relative to largest singular value)."""
    M = np.atleast_2d(M)
    # the full right factor is only needed when M is wide; U is never needed
    _, s, vh = np.linalg.svd(M, full_matrices=M.shape[0] < M.shape[1])
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > tol * max(smax, 1.0)))
    return vh[r:].conj().T


def intersect(A, B, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal rows spanning rowspace(A) ∩ rowspace(B) (real vectors)."""
    QA = orth_svd(A)
    QB = orth_svd(B)
    if QA.shape[0] == 0 or QB.shape[0] == 0:
        return np.zeros((0, np.shape(A)[-1]))
    # v in both iff |P_B v| = |v| for v in span QA
    M = QA @ QB.T
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    keep = s > 1 - tol
    return orth_svd(u[:, keep].T @ QA) if keep.any() else np.zeros((0, QA.shape[1]))


def _check_hermitian(A):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric("matrix must be square")
    scale = max(np.linalg.norm(A), 1e-300)
    if np.linalg.norm(A - A.conj().T) >= TOL.residual * scale and np.linalg.norm(A) > 0:
        raise NotSymmetric("matrix is not symmetric/Hermitian")
    return A


def sym_eig(A):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns).

    Backed by LAPACK; :func:`jacobi_eig` is the independent implementation
    used to cross-check it.
    """
    A = _check_hermitian(A)
    H = (A + A.conj().T) / 2
    return np.linalg.eigh(H)


def jacobi_eig(A, sweeps: int = 60, tol: float = 1e-15):
    """Cyclic Jacobi eigensolver for real symmetric or complex Hermitian input."""
    A = _check_hermitian(A)
    if np.iscomplexobj(A) and np.any(np.imag(A)):
        n = A.shape[0]
        R = np.block([[A.real, -A.imag], [A.imag, A.real]])
        w, V = jacobi_eig(R, sweeps, tol)
        # each eigenvalue appears twice; pick one vector per pair
        vecs = V[:n] + 1j * V[n:]
        order = np.argsort(w, kind="stable")
        chosen = orthonormalize(vecs[:, order].T, tol=1e-6).basis
        vals = np.real(np.einsum("ij,jk,ik->i", chosen.conj(), A, chosen))
        o = np.argsort(vals)
        return vals[o], chosen[o].T
    a = np.array(A, dtype=float)
    a = (a + a.T) / 2
    n = a.shape[0]
    V = np.eye(n)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * scale:
                    continue
                tau = (a[q, q] - a[p, p]) / (2 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


_TAYLOR_DEGREE = 20


def mat_exp(X) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The input is scaled by 2^-s until its 1-norm is at most 1/2, where a
    degree-20 Taylor polynomial is accurate to well below double rounding.
    ``mat_exp(0)`` returns the identity exactly.
    """
    X = np.asarray(X)
    n = X.shape[0]
    dtype = np.result_type(X.dtype, float)
    norm = np.linalg.norm(X, 1)
    if norm == 0:
        return np.eye(n, dtype=dtype)
    s = max(0, int(np.ceil(np.log2(norm / 0.5))))
    Y = X / (2.0**s)
    E = np.eye(n, dtype=dtype)
    term = np.eye(n, dtype=dtype)
    for k in range(1, _TAYLOR_DEGREE + 1):
        term = term @ Y / k
        E = E + term
        if np.linalg.norm(term, 1) < 1e-18 * np.linalg.norm(E, 1):
            break
    for _ in range(s):
        E = E @ E
    return E


def exp_normal(X, t: float | np.ndarray = 1.0):
    """exp(t X) for a normal matrix via one eigendecomposition (fast scans)."""
    X = np.asarray(X, dtype=complex)
    # skew-Hermitian: i X is Hermitian
    w, V = np.linalg.eigh(1j * X)
    t = np.atleast_1d(t)
    phases = np.exp(-1j * np.outer(t, w))
    return np.einsum("ij,tj,kj->tik", V, phases, V.conj())
