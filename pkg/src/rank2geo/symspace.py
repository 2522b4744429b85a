"""Matrix models of the compact rank-2 symmetric spaces.

Every model is a compact matrix Lie algebra ``g`` of skew-Hermitian matrices
with an involution ``theta``.  The basis is adapted to ``g = k + p`` and
orthonormal for ``<X, Y> = -c Re tr(X Y)``.  Group manifolds ``G`` are
modelled as ``(G x G)/diag(G)`` with ``theta(X, Y) = (Y, X)``, so the curvature
formula ``R(X, Y)Z = -[[X, Y], Z]`` is used for every space.
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Callable

import numpy as np

from .config import TOL
from .errors import NotApplicable, UnsupportedSpace
from .numlin import null_space, orth_svd
from .scalars import (
    CD_REFLECTION,
    oct_structure_table,
    quat_from_components,
    quat_to_complex,
    symplectic_form,
)

GRASSMANN_FAMILIES = ("g2r", "g2c", "g2h")
FAMILIES = GRASSMANN_FAMILIES + ("ai", "aii", "diii", "gi", "grp-su3", "grp-sp2", "grp-g2")
OUT_OF_SCOPE = ("eiii", "eiv")
MAX_ALGEBRA_DIM = 300


@dataclass(frozen=True, order=True)
class SpaceId:
    family: str
    n: int | None = None

    def __post_init__(self):
        if self.family in OUT_OF_SCOPE:
            return
        if self.family not in FAMILIES:
            raise UnsupportedSpace(f"unknown space family {self.family!r}")
        if self.family in GRASSMANN_FAMILIES:
            if self.n is None or self.n < 1:
                raise UnsupportedSpace(f"{self.family} needs n >= 1")
        elif self.n is not None:
            raise UnsupportedSpace(f"{self.family} takes no parameter")

    def __str__(self) -> str:
        return self.family if self.n is None else f"{self.family}:{self.n}"

    @classmethod
    def parse(cls, text: str) -> "SpaceId":
        text = text.strip().lower()
        if ":" in text:
            fam, n = text.split(":", 1)
            return cls(fam, int(n))
        return cls(text)

    @property
    def is_group(self) -> bool:
        return self.family.startswith("grp-")


@dataclass(frozen=True, eq=False)
class SymmetricSpaceModel:
    id: SpaceId
    k_mats: np.ndarray
    p_mats: np.ndarray
    structure: np.ndarray  # C[i, j, l] = <[B_i, B_j], B_l>, basis = k then p
    metric_scale: float
    theta: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    sigma: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    base_rep: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    convention: str = "raw"

    # basic sizes -----------------------------------------------------------
    @property
    def dim_k(self) -> int:
        return self.k_mats.shape[0]

    @property
    def dim_p(self) -> int:
        return self.p_mats.shape[0]

    @property
    def algebra_dim(self) -> int:
        return self.dim_k + self.dim_p

    @property
    def matrix_size(self) -> int:
        return self.k_mats.shape[1]

    @property
    def g_mats(self) -> np.ndarray:
        return np.concatenate([self.k_mats, self.p_mats])

    # metric -----------------------------------------------------------------
    def inner(self, X, Y) -> float:
        return float(-self.metric_scale * np.real(np.trace(np.asarray(X) @ np.asarray(Y))))

    def coords(self, Z) -> np.ndarray:
        """Coordinates of matrices ``Z`` (shape (..., N, N)) in the g-basis."""
        Z = np.asarray(Z)
        G = self.g_mats
        return self.metric_scale * np.real(np.einsum("aij,...ij->...a", G.conj(), Z))

    def p_coords(self, Z) -> np.ndarray:
        return self.coords(Z)[..., self.dim_k:]

    def to_matrix(self, x) -> np.ndarray:
        x = np.asarray(x)
        G = self.g_mats if x.shape[-1] == self.algebra_dim else self.p_mats
        return np.tensordot(x, G, axes=([-1], [0]))

    def p_to_g(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (self.algebra_dim,))
        out[..., self.dim_k:] = x
        return out

    # brackets in coordinates ---------------------------------------------------
    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijl->l", x, y, self.structure)

    @functools.cached_property
    def p_bracket_k(self) -> np.ndarray:
        """B[a, b, kappa]: k-coordinates of [e_a, e_b] for p-basis vectors."""
        dk = self.dim_k
        return self.structure[dk:, dk:, :dk]

    @functools.cached_property
    def k_on_p(self) -> np.ndarray:
        """A[kappa, c, d]: p-coordinates of [f_kappa, e_c]."""
        dk = self.dim_k
        return self.structure[:dk, dk:, dk:]

    @functools.cached_property
    def curvature_tensor(self) -> np.ndarray:
        """Rt[a, b, c, d] = <R(e_a, e_b) e_c, e_d> with R(X, Y)Z = -[[X, Y], Z]."""
        return -np.einsum("abk,kcd->abcd", self.p_bracket_k, self.k_on_p)

    # scaling -----------------------------------------------------------------
    def with_scale(self, c: float, convention: str = "raw") -> "SymmetricSpaceModel":
        s = np.sqrt(c / self.metric_scale)
        return replace(
            self,
            k_mats=self.k_mats / s,
            p_mats=self.p_mats / s,
            structure=self.structure / s,
            metric_scale=float(c),
            convention=convention,
        )


# ---------------------------------------------------------------------------
# Lie algebra bases


def so_basis(m: int) -> np.ndarray:
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            X = np.zeros((m, m), dtype=complex)
            X[i, j], X[j, i] = -1, 1
            out.append(X)
    return np.array(out)


def su_basis(m: int) -> np.ndarray:
    out = list(so_basis(m))
    for i in range(m):
        for j in range(i + 1, m):
            X = np.zeros((m, m), dtype=complex)
            X[i, j] = X[j, i] = 1j
            out.append(X)
    for i in range(m - 1):
        X = np.zeros((m, m), dtype=complex)
        X[i, i], X[i + 1, i + 1] = 1j, -1j
        out.append(X)
    return np.array(out)


def sp_basis(m: int) -> np.ndarray:
    """sp(m) realized in u(2m) (quaternionic skew-Hermitian matrices)."""
    zero = np.zeros((m, m))
    out = []
    for i in range(m):
        for j in range(i, m):
            S = np.zeros((m, m))
            S[i, j] = S[j, i] = 1
            if i != j:
                A = np.zeros((m, m))
                A[i, j], A[j, i] = -1, 1
                out.append(quat_from_components(A, zero, zero, zero))
            out.append(quat_from_components(zero, S, zero, zero))
            out.append(quat_from_components(zero, zero, S, zero))
            out.append(quat_from_components(zero, zero, zero, S))
    return np.array(out)


def derivation_basis() -> np.ndarray:
    """Basis of der(O) as 8x8 real matrices, by solving the derivation equations.

    Unknown D (64 entries); for every pair (i, j):
    D(e_i e_j) - D(e_i) e_j - e_i D(e_j) = 0.
    """
    T = oct_structure_table()  # T[i, j, k]: e_i e_j = sum_k T[i,j,k] e_k
    rows = []
    for i in range(8):
        for j in range(8):
            for out in range(8):
                # coefficient of e_out, as a linear functional of D[a, b] (D e_b = sum_a D[a,b] e_a)
                coef = np.zeros((8, 8))
                coef[out, :] += T[i, j, :]
                # D(e_i) e_j = sum_a D[a,i] e_a e_j
                coef[:, i] -= T[:, j, out]
                coef[:, j] -= T[i, :, out]
                rows.append(coef.ravel())
    ns = null_space(np.array(rows), tol=1e-10)
    mats = ns.T.reshape(-1, 8, 8)
    return mats.astype(complex)


# ---------------------------------------------------------------------------
# involutions


def _signature(m: int, neg: int = 2) -> np.ndarray:
    return np.diag([-1.0] * neg + [1.0] * (m - neg))


def _conj_by(D):
    Dinv = np.linalg.inv(D)
    return lambda X: D @ X @ Dinv


def _block_swap(N: int):
    def swap(X):
        return np.block([[X[N:, N:], X[N:, :N]], [X[:N, N:], X[:N, :N]]])

    return swap


def _double(mats: np.ndarray) -> np.ndarray:
    N = mats.shape[1]
    out = np.zeros((mats.shape[0], 2 * N, 2 * N), dtype=complex)
    out[:, :N, :N] = mats
    return out


def _decompose(raw: np.ndarray, theta, c: float):
    """Orthonormal k and p bases (as matrices) from a spanning set of g."""
    th = np.array([theta(X) for X in raw])
    parts = []
    for sign in (+1, -1):
        M = (raw + sign * th) / 2
        vec = np.concatenate([M.real.reshape(len(M), -1), M.imag.reshape(len(M), -1)], axis=1)
        Q = orth_svd(vec, tol=1e-10)
        n2 = raw.shape[1] ** 2
        mats = (Q[:, :n2] + 1j * Q[:, n2:]).reshape(-1, *raw.shape[1:])
        parts.append(mats / np.sqrt(c))
    return parts


def _structure_constants(G: np.ndarray, c: float) -> np.ndarray:
    prod = np.einsum("aij,bjk->abik", G, G)
    br = prod - prod.transpose(1, 0, 2, 3)
    return c * np.real(np.einsum("lij,abij->abl", G.conj(), br))


def _assemble(sid, raw, theta, sigma, base_rep=None, c=1.0):
    k, p = _decompose(raw, theta, c)
    G = np.concatenate([k, p])
    if G.shape[0] > MAX_ALGEBRA_DIM:
        raise UnsupportedSpace(f"{sid}: algebra dimension {G.shape[0]} exceeds {MAX_ALGEBRA_DIM}")
    C = _structure_constants(G, c)
    if base_rep is None:
        def base_rep(g, _s=sigma):
            return _s(g) @ np.linalg.inv(g)
    return SymmetricSpaceModel(sid, k, p, C, c, theta, sigma, base_rep)


@functools.lru_cache(maxsize=64)
def build_space(sid: SpaceId | str) -> SymmetricSpaceModel:
    """Build the unnormalized (c = 1) model of a registered space."""
    if isinstance(sid, str):
        sid = SpaceId.parse(sid)
    fam, n = sid.family, sid.n
    if fam in OUT_OF_SCOPE:
        raise UnsupportedSpace(f"{sid}: exceptional E6 models are not available")
    if fam in GRASSMANN_FAMILIES:
        m = n + 2
        sizes = {"g2r": m * (m - 1) // 2, "g2c": m * m - 1, "g2h": m * (2 * m + 1)}
        if sizes[fam] > MAX_ALGEBRA_DIM:
            raise UnsupportedSpace(f"{sid}: algebra dimension {sizes[fam]} exceeds {MAX_ALGEBRA_DIM}")
    if fam == "g2r":
        m = n + 2
        D = _signature(m)
        E = np.zeros((m, m), dtype=complex)
        E[1, 0], E[0, 1] = 1, -1
        th = _conj_by(D)
        return _assemble(sid, so_basis(m), th, th, base_rep=lambda g, E=E: g @ E @ g.conj().T)
    if fam == "g2c":
        th = _conj_by(_signature(n + 2))
        return _assemble(sid, su_basis(n + 2), th, th)
    if fam == "g2h":
        D = _signature(n + 2)
        th = _conj_by(np.kron(np.eye(2), D))
        return _assemble(sid, sp_basis(n + 2), th, th)
    if fam == "ai":
        th = np.conj
        return _assemble(sid, su_basis(3), th, th)
    if fam == "aii":
        om = symplectic_form(3)
        th = _conj_by_anti(om)
        return _assemble(sid, su_basis(6), th, th)
    if fam == "diii":
        th = _conj_by(symplectic_form(5))
        return _assemble(sid, so_basis(10), th, th)
    if fam == "gi":
        th = _conj_by(CD_REFLECTION)
        return _assemble(sid, derivation_basis(), th, th)
    base = {"grp-su3": lambda: su_basis(3), "grp-sp2": lambda: sp_basis(2),
            "grp-g2": derivation_basis}[fam]()
    N = base.shape[1]
    lower = np.zeros_like(_double(base))
    lower[:, N:, N:] = base
    raw = np.concatenate([_double(base), lower])
    swap = _block_swap(N)
    return _assemble(sid, raw, swap, swap)


def _conj_by_anti(om):
    omi = np.linalg.inv(om)
    return lambda X: om @ np.conj(X) @ omi


def inner_involution(group_family: str):
    """Involution theta of the simple algebra g whose Cartan map lands in G.

    Returns ``(g_basis, {name: theta})`` for the group families.
    """
    if group_family == "grp-su3":
        return su_basis(3), {
            "ai": np.conj,
            "cp2": _conj_by(np.diag([1.0, 1.0, -1.0])),
        }
    if group_family == "grp-sp2":
        # quaternionic scalar i (fixed algebra u(2)) and diag(1, -1)
        Di = quat_to_complex(1j * np.eye(2))
        Dm = quat_to_complex(np.diag([1.0, -1.0]))
        return sp_basis(2), {"g2r5": _conj_by(Di), "hp1": _conj_by(Dm)}
    if group_family == "grp-g2":
        return derivation_basis(), {"gi": _conj_by(CD_REFLECTION)}
    raise UnsupportedSpace(group_family)


# ---------------------------------------------------------------------------
# metric normalization

_STAR_FILE = "srr_star.json"


def _star_path():
    return resources.files("rank2geo").joinpath("data", _STAR_FILE)


def compute_star_scales(n_ref: int = 6) -> dict[str, float]:
    """Metric scale c per Grassmann family making the generic short root length 1.

    The scale is read off the n = 6 instance, where every root of the generic
    BC2/B2 pattern is present.
    """
    from .roots import shortest_root_length

    out = {}
    for fam in GRASSMANN_FAMILIES:
        model = build_space(SpaceId(fam, n_ref))
        L = shortest_root_length(model)
        # lengths scale like 1/sqrt(c)
        out[fam] = float(model.metric_scale * L**2)
    return out


@functools.lru_cache(maxsize=1)
def star_scales() -> dict[str, float]:
    return json.loads(_star_path().read_text())["scales"]


def normalize_metric(model: SymmetricSpaceModel, convention: str = "srr1") -> SymmetricSpaceModel:
    """Rescale the metric: ``srr1`` (shortest root 1) or ``srr1star`` (Grassmann generic)."""
    if convention == "srr1":
        from .roots import shortest_root_length

        L = shortest_root_length(model)
        return model.with_scale(model.metric_scale * L**2, "srr1")
    if convention == "srr1star":
        if model.id.family not in GRASSMANN_FAMILIES:
            raise NotApplicable(f"srr1star is defined only for Grassmann families, not {model.id}")
        return model.with_scale(star_scales()[model.id.family], "srr1star")
    raise ValueError(f"unknown convention {convention!r}")


def default_convention(sid: SpaceId) -> str:
    return "srr1star" if sid.family in GRASSMANN_FAMILIES else "srr1"


@functools.lru_cache(maxsize=64)
def get_space(sid: SpaceId | str, convention: str | None = None) -> SymmetricSpaceModel:
    """Registry access: normalized model (default: the convention used in the tables)."""
    if isinstance(sid, str):
        sid = SpaceId.parse(sid)
    conv = convention or default_convention(sid)
    return normalize_metric(build_space(sid), conv)


def cartan_residuals(model: SymmetricSpaceModel) -> dict[str, float]:
    """Max residual of [k,k] ⊆ k, [k,p] ⊆ p, [p,p] ⊆ k and theta properties."""
    dk = model.dim_k
    C = model.structure
    kk_p = np.abs(C[:dk, :dk, dk:]).max(initial=0.0)
    kp_k = np.abs(C[:dk, dk:, :dk]).max(initial=0.0)
    pp_p = np.abs(C[dk:, dk:, dk:]).max(initial=0.0)
    G = model.g_mats
    # closure of the bracket inside span(g)
    prod = np.einsum("aij,bjk->abik", G, G)
    br = prod - prod.transpose(1, 0, 2, 3)
    recon = np.einsum("abl,lij->abij", C, G)
    closure = np.abs(br - recon).max()
    th = np.array([model.theta(X) for X in G])
    signs = np.concatenate([np.ones(dk), -np.ones(model.dim_p)])
    theta_eig = np.abs(th - signs[:, None, None] * G).max()
    theta2 = np.abs(np.array([model.theta(X) for X in th]) - G).max()
    return {
        "kk_in_k": float(kk_p),
        "kp_in_p": float(kp_k),
        "pp_in_k": float(pp_p),
        "closure": float(closure),
        "theta_eigen": float(theta_eig),
        "theta_squared": float(theta2),
    }


def registry() -> list[SpaceId]:
    """Registered spaces at desk scale."""
    ids = [SpaceId("g2r", n) for n in range(1, 7)]
    ids += [SpaceId("g2c", n) for n in range(1, 5)]
    ids += [SpaceId("g2h", n) for n in range(1, 4)]
    ids += [SpaceId(f) for f in ("ai", "aii", "diii", "gi", "grp-su3", "grp-sp2", "grp-g2")]
    return ids


__all__ = [
    "SpaceId",
    "SymmetricSpaceModel",
    "build_space",
    "get_space",
    "normalize_metric",
    "cartan_residuals",
    "registry",
    "TOL",
]
