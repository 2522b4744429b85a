"""Fixed-point constructions: polars, meridians, centrosomes and the Cartan map.

For the Grassmann families the geodesic reflection at the base plane U0 is
induced by the linear involution rho = (+1 on U0) + (-1 on U0^perp) of the
defining space.  A component of its fixed set through a plane q = g.U0 has
tangent space (pulled back to U0 by g) equal to the part of p commuting with
g^-1 rho g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import TangentSubspace, lts_defect, tangent_subspace
from .errors import NotAnLTS, SamplingFailed, UnsupportedAmbient, UnsupportedPair
from .numlin import mat_exp, orth_svd
from .recipes import CARTAN_PAIRS, cartan_image, commuting_with, lift
from .symspace import SymmetricSpaceModel, sp_basis, su_basis


@dataclass(frozen=True)
class IsometryRep:
    """Isometry given by a matrix acting on the defining space (or group)."""

    kind: str
    matrix: np.ndarray
    involutive: bool = True

    def check_involutive(self, tol: float = 1e-10) -> bool:
        M = self.matrix
        return bool(np.abs(M @ M - np.eye(M.shape[0])).max() < tol)


@dataclass
class PolarComponent:
    description: str
    meet_dim: int             # dim of W ∩ U0 (quaternionic/complex/real units)
    translate: np.ndarray     # g with q = g.U0 (defining-space matrix)
    tangent: TangentSubspace  # tangent at q, pulled back to U0
    is_pole: bool


def _require_grassmann(model):
    if model.id.family not in ("g2r", "g2c", "g2h"):
        raise UnsupportedAmbient(f"polars are implemented for Grassmann models only, not {model.id}")


def geodesic_reflection(model) -> IsometryRep:
    m = model.id.n + 2
    d = -np.ones(m)
    d[:2] = 1.0
    return IsometryRep("linear", lift(model, np.diag(d)))


def _rotation(m, a, b):
    g = np.eye(m)
    g[a, a] = g[b, b] = 0.0
    g[b, a], g[a, b] = 1.0, -1.0
    return g


def _check_lts(model, T, what):
    d = lts_defect(model, T)
    if d > 1e-8:
        raise NotAnLTS(f"{what}: defect {d:.2e}")
    return T


def polar_components(model: SymmetricSpaceModel) -> list[PolarComponent]:
    """Components of Fix(s_U0) other than {U0}, one sample point each."""
    _require_grassmann(model)
    n = model.id.n
    m = n + 2
    rho = geodesic_reflection(model).matrix
    out = []

    def component(desc, k, g):
        G = lift(model, g)
        rho_q = np.linalg.inv(G) @ rho @ G
        T = _check_lts(model, commuting_with(model, rho_q), desc)
        out.append(PolarComponent(desc, k, g, T, T.dim == 0))

    if model.id.family == "g2r":
        flip = np.diag([1.0, -1.0] + [1.0] * (m - 2)) @ np.diag([1.0] * (m - 1) + [-1.0])
        component("U0 with reversed orientation", 2, flip)
    # one line in U0, one in U0^perp: q = span(e0, e2)
    component("P(U0) x P(U0^perp)", 1, _rotation(m, 1, 2))
    if n >= 2:
        swap = _rotation(m, 0, 2) @ _rotation(m, 1, 3)
        desc = "U0^perp" if n == 2 else "G2(U0^perp)"
        component(desc, 0, swap)
    return out


def meridian_at(model: SymmetricSpaceModel, comp: PolarComponent) -> TangentSubspace:
    """Reflective complement of a polar through its sample point (pulled back)."""
    T = comp.tangent.complement() if comp.tangent.dim else TangentSubspace(model, np.eye(model.dim_p))
    return _check_lts(model, T, f"meridian of {comp.description}")


# ---------------------------------------------------------------------------
# centrosome


def _pole_blocks(model):
    fam = model.id.family
    if fam == "g2c":
        return [0, 1], [2, 3]
    return [0, 1, 4, 5], [2, 3, 6, 7]


def _block_matrix(model, Q) -> np.ndarray:
    """Z with Z maps U0 -> U0^perp by Q and U0^perp -> U0 by -Q^*."""
    idx, jdx = _pole_blocks(model)
    Z = np.zeros((model.matrix_size,) * 2, dtype=complex)
    Z[np.ix_(jdx, idx)] = Q
    Z[np.ix_(idx, jdx)] = -Q.conj().T
    return Z


def _unitary_algebra(model) -> np.ndarray:
    """Lie algebra of the isometries U0 -> U0 (u(2), resp. sp(2) realized in u(4))."""
    if model.id.family == "g2c":
        return np.concatenate([su_basis(2), [1j * np.eye(2) / math.sqrt(2)]])
    return sp_basis(2)


def center_residual(model, Q) -> float:
    """|s_m(U0) - U0^perp| for the midpoint m of the geodesic with block Q."""
    idx, jdx = _pole_blocks(model)
    g = mat_exp(math.pi / 4 * _block_matrix(model, Q))
    basis = g[:, idx]
    P = basis @ basis.conj().T
    s = 2 * P - np.eye(len(P))
    P0 = np.zeros_like(P)
    P0[idx, idx] = 1.0
    P1 = np.zeros_like(P)
    P1[jdx, jdx] = 1.0
    return float(np.abs(s @ P0 @ s.conj().T - P1).max())


def pole_residual(model, Q) -> float:
    """|exp(X).U0 - U0^perp| for X = (pi/2) Z(Q)."""
    idx, jdx = _pole_blocks(model)
    g = mat_exp(math.pi / 2 * _block_matrix(model, Q))
    return float(np.abs(g[np.ix_(idx, idx)]).max())


def centrosome_sample(model: SymmetricSpaceModel, samples: int = 200, seed: int = 0,
                      return_info: bool = False):
    """Tangent space (at the base point) of the centrosome between U0 and U0^perp.

    Geodesics from U0 to its pole are t -> exp(t Z(Q)).U0 with Q an isometry
    U0 -> U0^perp; the midpoints are exp(pi/4 Z(Q)).U0.  Directions of the
    midpoint set at Q = I are pulled back by g0 = exp(pi/4 Z(I)).
    """
    _require_grassmann(model)
    if model.id.family not in ("g2c", "g2h") or model.id.n != 2:
        raise UnsupportedAmbient("centrosomes are built for G2(C^4) and G2(H^4)")
    rng = np.random.default_rng(seed)
    alg = _unitary_algebra(model)
    g0 = mat_exp(math.pi / 4 * _block_matrix(model, np.eye(alg.shape[1])))
    g0inv = g0.conj().T
    s = math.sin(math.pi / 4)
    vecs, ranks = [], []
    worst_center = worst_pole = 0.0
    for _ in range(samples):
        A = np.einsum("i,ijk->jk", rng.standard_normal(len(alg)), alg)
        Q = mat_exp(A)
        worst_pole = max(worst_pole, pole_residual(model, Q))
        worst_center = max(worst_center, center_residual(model, Q))
        # d/dt exp(pi/4 Z(exp(tA))) at t = 0, pulled back to the base point
        Y = g0inv @ (s * _block_matrix(model, A))
        co = model.coords(Y)
        vecs.append(co[model.dim_k:])
        ranks.append(orth_svd(np.array(vecs), tol=1e-8).shape[0])
    if len(ranks) < 20 or ranks[-1] != ranks[len(ranks) // 2]:
        raise SamplingFailed("centrosome tangent dimension did not stabilize")
    T = _check_lts(model, tangent_subspace(model, np.array(vecs), tol=1e-8), "centrosome")
    if return_info:
        return T, {"pole_residual": worst_pole, "center_residual": worst_center, "ranks": ranks}
    return T


# ---------------------------------------------------------------------------
# Cartan map


def cartan_map_check(group_model: SymmetricSpaceModel, inner: str) -> TangentSubspace:
    """Image of the differential of gK -> sigma(g) g^-1; must be an LTS."""
    if (group_model.id.family, inner) not in CARTAN_PAIRS:
        raise UnsupportedPair(f"({group_model.id}, {inner}) is not a registered Cartan pair")
    T = cartan_image(group_model, inner)
    return _check_lts(group_model, T, f"Cartan image of {inner}")


__all__ = [
    "IsometryRep",
    "PolarComponent",
    "cartan_map_check",
    "center_residual",
    "centrosome_sample",
    "geodesic_reflection",
    "meridian_at",
    "polar_components",
    "pole_residual",
]
