"""The 14-dimensional irreducible representation of Sp(3) inside Λ³C⁶.

``Λ³C⁶ = C⁶ ⊕ V`` under Sp(3); the C⁶ summand is ``{v ∧ ω}`` with ``ω`` the
symplectic 2-vector.  Restrictions to the canonical SO(3) (real matrices) and
SU(3) (``A -> diag(A, conj A)``) give the real 5-dimensional module used for
the sphere orbit in G2+(R^5) and the complex 6-dimensional module used for the
CP^2 orbit in G2(C^6).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .numlin import null_space, orth_svd
from .scalars import quat_to_complex, symplectic_form
from .symspace import so_basis, sp_basis, su_basis

TRIPLES = list(combinations(range(6), 3))
_INDEX = {t: i for i, t in enumerate(TRIPLES)}


def _wedge_index(idx):
    """Sorted index tuple and permutation sign, or (None, 0) if repeated."""
    if len(set(idx)) < len(idx):
        return None, 0
    order = sorted(range(len(idx)), key=lambda k: idx[k])
    perm = list(order)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return tuple(sorted(idx)), sign


def wedge3_action(X) -> np.ndarray:
    """20x20 matrix of the derivation action of X (6x6) on Λ³C⁶."""
    X = np.asarray(X, dtype=complex)
    M = np.zeros((20, 20), dtype=complex)
    for col, trip in enumerate(TRIPLES):
        for pos in range(3):
            for r in range(6):
                coef = X[r, trip[pos]]
                if coef == 0:
                    continue
                new = list(trip)
                new[pos] = r
                key, sign = _wedge_index(new)
                if key is not None:
                    M[_INDEX[key], col] += sign * coef
    return M


def wedge3_group(g) -> np.ndarray:
    """Λ³ of a 6x6 matrix (3x3 minors)."""
    g = np.asarray(g, dtype=complex)
    M = np.zeros((20, 20), dtype=complex)
    for c, J in enumerate(TRIPLES):
        for r, I in enumerate(TRIPLES):
            M[r, c] = np.linalg.det(g[np.ix_(I, J)])
    return M


def omega_wedge_map() -> np.ndarray:
    """20x6 matrix of v -> v ∧ ω."""
    om = symplectic_form(3)
    out = np.zeros((20, 6), dtype=complex)
    for v in range(6):
        for a in range(6):
            for b in range(a + 1, 6):
                if om[a, b] == 0:
                    continue
                key, sign = _wedge_index([v, a, b])
                if key is not None:
                    out[_INDEX[key], v] += sign * om[a, b]
    return out


@dataclass
class Sp3Rep:
    V: np.ndarray            # 20 x 14 orthonormal columns
    sp3: np.ndarray          # actions on V (14x14), one per sp(3) basis element
    so3_real: np.ndarray     # so(3) acting on V_R' (5x5 real)
    su3_complex: np.ndarray  # su(3) acting on V_C (6x6 complex)
    wedge_dim: int
    so3_invariants_complex: int
    so3_invariants_real_form: int
    real_form_dim: int
    real5_commutant_dim: int
    vc_dim: int
    so3_generators: np.ndarray
    su3_generators: np.ndarray


def _restrict(V, mats):
    return np.array([V.conj().T @ wedge3_action(X) @ V for X in mats])


def _common_kernel(ops, tol=1e-9):
    stack = np.concatenate(list(ops), axis=0)
    return null_space(stack, tol)


@functools.lru_cache(maxsize=1)
def build_sp3_rep() -> Sp3Rep:
    wedge_dim = len(TRIPLES)
    W6 = omega_wedge_map()
    # V = orthocomplement of {v ∧ ω}
    Q6 = np.linalg.qr(W6)[0]
    P = np.eye(20) - Q6 @ Q6.conj().T
    u, s, _ = np.linalg.svd(P)
    V = u[:, s > 0.5]
    sp_gens = sp_basis(3)
    sp3 = _restrict(V, sp_gens)

    # canonical so(3): real quaternionic matrices -> diag(A, A)
    so_gens = np.array([quat_to_complex(A.real) for A in so_basis(3)])
    so_V = _restrict(V, so_gens)
    inv_c = _common_kernel(so_V)  # coefficient vectors in V
    # real 14-dim space V^c spanned by Re/Im parts of V
    Vreal = orth_svd(np.concatenate([V.real.T, V.imag.T]), tol=1e-9)
    acts = np.array([wedge3_action(X).real for X in so_gens])
    # so(3)-invariants in V^c
    inv_real = orth_svd(_common_kernel([Vreal @ A @ Vreal.T for A in acts]).T @ Vreal)
    # complex structure on V^c: Λ³(Omega), Omega = quaternion j
    Jw = wedge3_group(symplectic_form(3)).real
    u1 = inv_real[0]
    rest = inv_real[1:] - ((inv_real[1:] @ np.vstack([u1, u1 @ Jw.T]).T) @ np.vstack([u1, u1 @ Jw.T]))
    u2 = orth_svd(rest)[0]
    inv_form = orth_svd(np.vstack([u1, u2]))
    # spin-2 part: orthocomplement of the invariants in V^c
    spin2 = orth_svd(Vreal - (Vreal @ inv_real.T) @ inv_real)
    # one irreducible copy: eigenspace of a generic symmetric commutant element
    acts2 = np.array([spin2 @ A @ spin2.T for A in acts])
    comm = _commutant_basis(acts2)
    rng = np.random.default_rng(7)
    S = np.einsum("i,ijk->jk", rng.standard_normal(len(comm)), comm)
    evals, evecs = np.linalg.eigh(S + S.T)
    W = orth_svd(evecs[:, :5].T @ spin2)
    real_form = orth_svd(np.vstack([inv_form, W]))
    inv_in_form = orth_svd(_common_kernel([real_form @ A @ real_form.T for A in acts]).T @ real_form)
    so3_real = np.array([W @ A @ W.T for A in acts])
    commutant = _commutant_dim(so3_real)

    # su(3): A -> diag(A, conj A); V_C = V ∩ {Z = diag(iI, -iI) acts by i}
    su_gens = np.array([quat_to_complex(A) for A in su_basis(3)])
    Z = quat_to_complex(1j * np.eye(3))
    ZV = V.conj().T @ wedge3_action(Z) @ V
    vc = null_space(ZV - 1j * np.eye(14), 1e-9)
    VC = V @ vc
    su3_complex = np.array([VC.conj().T @ wedge3_action(X) @ VC for X in su_gens])
    return Sp3Rep(
        V=V,
        sp3=sp3,
        so3_real=so3_real,
        su3_complex=su3_complex,
        wedge_dim=wedge_dim,
        so3_invariants_complex=inv_c.shape[1],
        so3_invariants_real_form=inv_in_form.shape[0],
        real_form_dim=real_form.shape[0],
        real5_commutant_dim=commutant,
        vc_dim=VC.shape[1],
        so3_generators=so_gens,
        su3_generators=su_gens,
    )


def _commutant_basis(mats) -> np.ndarray:
    """Basis of {C : C A = A C for all A} (real matrices)."""
    n = mats.shape[1]
    rows = [np.kron(A, np.eye(n)) - np.kron(np.eye(n), A.T) for A in mats]
    ns = null_space(np.concatenate(rows), 1e-9)
    return ns.T.reshape(-1, n, n)


def _commutant_dim(mats) -> int:
    return _commutant_basis(mats).shape[0]


def is_irreducible_sp3(rep: Sp3Rep) -> bool:
    """Schur test on V: the complex commutant of sp(3) is one-dimensional."""
    n = rep.sp3.shape[1]
    rows = [np.kron(A, np.eye(n)) - np.kron(np.eye(n), A.T) for A in rep.sp3]
    return null_space(np.concatenate(rows), 1e-9).shape[1] == 1
