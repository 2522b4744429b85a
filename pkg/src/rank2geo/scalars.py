"""Quaternions, octonions and the complex realization of quaternionic matrices.

Octonion convention (fixed for the whole package): Cayley-Dickson doubling of
the quaternions.  An octonion is a pair ``(a, b)`` of quaternions stored as 8
real coefficients ``[a0, a1, a2, a3, b0, b1, b2, b3]`` over the basis
``e0 = 1, e1 = i, e2 = j, e3 = k, e4 = l, e5 = il, e6 = jl, e7 = kl`` and

    (a, b) * (c, d) = (a c - conj(d) b,  d a + b conj(c)).

The map ``(a, b) -> (a, -b)`` is an automorphism fixing the quaternion
subalgebra; it is used as the Cartan involution of G2/SO(4).

Quaternionic matrices are written ``M = A + B j`` with complex ``A, B``
(so ``a + b i + c j + d k`` has ``A = a + b i`` and ``B = c + d i``) and are
realized as

    M  ->  [[A, -B], [conj(B), conj(A)]].

The 1x1 quaternion ``j`` becomes ``[[0, -1], [1, 0]]``.  The image commutes
with the anti-linear structure map ``v -> Omega conj(v)``,
``Omega = [[0, -I], [I, 0]]``.
"""
from __future__ import annotations

from enum import Enum

import numpy as np


class AlgebraTag(Enum):
    REAL = "R"
    COMPLEX = "C"
    QUATERNION = "H"
    OCTONION = "O"

    @property
    def real_dim(self) -> int:
        return {"R": 1, "C": 2, "H": 4, "O": 8}[self.value]

    @property
    def matrix_scalar(self) -> bool:
        """Octonions are used element-wise only, never as matrix entries."""
        return self is not AlgebraTag.OCTONION


def quat_mul(p, q):
    """Hamilton product of quaternions given as arrays ``[..., 4]``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def quat_conj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def oct_mul(x, y):
    """Octonion product (Cayley-Dickson doubling of the quaternions)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = x[..., :4], x[..., 4:]
    c, d = y[..., :4], y[..., 4:]
    first = quat_mul(a, c) - quat_mul(quat_conj(d), b)
    second = quat_mul(d, a) + quat_mul(b, quat_conj(c))
    return np.concatenate([first, second], axis=-1)


def oct_conj(x):
    x = np.asarray(x, dtype=float)
    out = -x.copy()
    out[..., 0] = x[..., 0]
    return out


def oct_norm(x) -> float:
    return float(np.linalg.norm(x))


def oct_basis(i: int) -> np.ndarray:
    e = np.zeros(8)
    e[i] = 1.0
    return e


def oct_structure_table() -> np.ndarray:
    """``T[i, j, k]`` = coefficient of e_k in e_i e_j."""
    eye = np.eye(8)
    return np.stack([oct_mul(eye[i], eye) for i in range(8)])


def left_mult_matrix(x) -> np.ndarray:
    """Matrix of y -> x y on R^8."""
    return oct_mul(np.broadcast_to(x, (8, 8)), np.eye(8)).T


# Reflection (a, b) -> (a, -b); an automorphism of the octonions.
CD_REFLECTION = np.diag([1.0, 1, 1, 1, -1, -1, -1, -1])


def quat_to_complex(A, B=None) -> np.ndarray:
    """Complex 2n x 2n realization of the quaternionic matrix ``A + B j``."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.zeros_like(A) if B is None else np.atleast_2d(np.asarray(B, dtype=complex))
    return np.block([[A, -B], [B.conj(), A.conj()]])


def quat_from_components(a, b, c, d) -> np.ndarray:
    """Realize ``a + b i + c j + d k`` (real matrices) as a complex matrix."""
    a, b, c, d = (np.atleast_2d(np.asarray(t, dtype=float)) for t in (a, b, c, d))
    return quat_to_complex(a + 1j * b, c + 1j * d)


def symplectic_form(n: int) -> np.ndarray:
    """Omega = [[0, -I], [I, 0]] of size 2n."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def structure_map(v) -> np.ndarray:
    """Anti-linear map v -> Omega conj(v) on C^{2n} (squares to -1)."""
    v = np.asarray(v, dtype=complex)
    n = v.shape[0] // 2
    return symplectic_form(n) @ v.conj()


def is_quaternionic(M, atol: float = 1e-12) -> bool:
    """True when the complex matrix commutes with the structure map."""
    M = np.asarray(M, dtype=complex)
    om = symplectic_form(M.shape[0] // 2)
    return bool(np.allclose(M @ om, om @ M.conj(), atol=atol))
