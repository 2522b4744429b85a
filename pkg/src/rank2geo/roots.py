"""Maximal abelian subspaces, restricted roots and fingerprints."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .config import TOL
from .curvature import (
    TangentSubspace,
    jacobi_bilinear,
    jacobi_operator,
    lts_defect,
    sectional_curvatures,
)
from .errors import NotAbelian, NotAnLTS
from .numlin import exp_normal, null_space, orth_svd
from .symspace import SymmetricSpaceModel


@dataclass
class RootDatum:
    """Restricted roots of an LTS ``U`` w.r.t. an orthonormal basis of ``a``.

    ``roots`` holds both members of each +/- pair; ``multiplicities[i]`` is the
    dimension of the joint eigenspace of the Jacobi operators in ``U``.
    """

    a_basis: np.ndarray
    roots: np.ndarray
    multiplicities: np.ndarray
    zero_dim: int

    @property
    def rank(self) -> int:
        return self.a_basis.shape[0]

    def positive(self):
        """One representative per +/- pair (first nonzero coordinate positive)."""
        out = []
        for alpha, m in zip(self.roots, self.multiplicities):
            nz = alpha[np.abs(alpha) > 1e-9]
            if nz.size and nz[0] > 0:
                out.append((alpha, int(m)))
        return out

    def lengths(self) -> list[tuple[float, int]]:
        return sorted((float(np.linalg.norm(a)), m) for a, m in self.positive())

    def vectors(self) -> np.ndarray:
        """Roots as p-coordinate vectors (metric identification a* = a)."""
        return self.roots @ self.a_basis if len(self.roots) else np.zeros((0, self.a_basis.shape[1]))


@dataclass
class Fingerprint:
    dim: int
    rank: int
    root_lengths: list[tuple[float, int]]
    curv_min: float
    curv_max: float
    flat_dim: int
    sampled_min: float | None = None
    sampled_max: float | None = None
    radius: float | None = None
    extra: dict = field(default_factory=dict)

    def key(self):
        return (self.dim, self.rank, tuple(self.root_lengths), self.flat_dim)

    def to_dict(self) -> dict:
        d = {
            "dim": self.dim,
            "rank": self.rank,
            "root_lengths": [[round(l, TOL.root_round), m] for l, m in self.root_lengths],
            "curv_min": _r(self.curv_min),
            "curv_max": _r(self.curv_max),
            "flat_dim": self.flat_dim,
        }
        if self.sampled_min is not None:
            d["sampled_min"] = _r(self.sampled_min)
            d["sampled_max"] = _r(self.sampled_max)
        if self.radius is not None:
            d["radius"] = _r(self.radius)
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Fingerprint":
        known = {"dim", "rank", "root_lengths", "curv_min", "curv_max", "flat_dim",
                 "sampled_min", "sampled_max", "radius"}
        return cls(
            dim=d["dim"],
            rank=d["rank"],
            root_lengths=[(float(l), int(m)) for l, m in d["root_lengths"]],
            curv_min=d["curv_min"],
            curv_max=d["curv_max"],
            flat_dim=d["flat_dim"],
            sampled_min=d.get("sampled_min"),
            sampled_max=d.get("sampled_max"),
            radius=d.get("radius"),
            extra={k: v for k, v in d.items() if k not in known},
        )

    def distance(self, other: "Fingerprint") -> float:
        """Max field difference; infinite when the discrete data differ."""
        if (self.dim, self.rank, self.flat_dim) != (other.dim, other.rank, other.flat_dim):
            return math.inf
        a = _expand(self.root_lengths)
        b = _expand(other.root_lengths)
        if len(a) != len(b):
            return math.inf
        d = max([abs(x - y) for x, y in zip(a, b)], default=0.0)
        return max(d, abs(self.curv_min - other.curv_min), abs(self.curv_max - other.curv_max))


def _r(x, nd=12):
    return None if x is None else round(float(x), nd)


def _expand(lengths):
    return sorted(l for l, m in lengths for _ in range(m))


def _basis(U) -> np.ndarray:
    return U.basis if isinstance(U, TangentSubspace) else np.atleast_2d(np.asarray(U, dtype=float))


def _bracket_norms(model, h, V):
    """|[h, v]| for rows v of V (k-valued bracket of p-vectors)."""
    br = np.einsum("abk,a,ib->ik", model.p_bracket_k, h, V)
    return br


def maximal_abelian(model: SymmetricSpaceModel, U, rng=None, samples: int = 8,
                    check_lts: bool = True) -> np.ndarray:
    """Orthonormal basis of a maximal abelian subspace of the LTS ``U``.

    The centralizer in U of a generic element is maximal abelian; the
    smallest centralizer among ``samples`` random elements is returned.
    """
    B = _basis(U)
    if check_lts and lts_defect(model, B) > TOL.lts:
        raise NotAnLTS("maximal_abelian needs a Lie triple system")
    if B.shape[0] == 0:
        return np.zeros((0, model.dim_p))
    rng = np.random.default_rng(0) if rng is None else rng
    best = None
    for _ in range(samples):
        c = rng.standard_normal(B.shape[0])
        h = c @ B
        h /= np.linalg.norm(h)
        M = _bracket_norms(model, h, B)  # (dim U, dim k)
        ns = null_space(M.T, tol=1e-8)   # coefficient vectors with [h, v] = 0
        cand = orth_svd(ns.T @ B, tol=1e-9)
        if best is None or cand.shape[0] < best.shape[0]:
            best = cand
    br = np.einsum("abk,ia,jb->ijk", model.p_bracket_k, best, best)
    if np.abs(br).max(initial=0.0) > 1e-8:
        raise NotAbelian("generic centralizer is not abelian")
    return best


def _clusters(vals, tol):
    groups = [[0]]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def restricted_roots(model: SymmetricSpaceModel, U, a: np.ndarray, rng=None,
                     attempts: int = 20) -> RootDatum:
    """Simultaneous eigen-decomposition of the Jacobi operators R(., H)H on U."""
    B = _basis(U)
    a = np.atleast_2d(a)
    r = a.shape[0]
    br = np.einsum("abk,ia,jb->ijk", model.p_bracket_k, a, a)
    if np.abs(br).max(initial=0.0) > 1e-8:
        raise NotAbelian("a is not abelian")
    if r == 0:
        return RootDatum(a.reshape(0, model.dim_p), np.zeros((0, 0)), np.zeros(0, dtype=int), 0)
    rng = np.random.default_rng(12345) if rng is None else rng
    # bilinear family of Jacobi operators restricted to U
    ops = np.empty((r, r, B.shape[0], B.shape[0]))
    for i in range(r):
        for j in range(i, r):
            J = B @ jacobi_bilinear(model, a[i], a[j]) @ B.T
            ops[i, j] = ops[j, i] = (J + J.T) / 2
    # relative to the ambient curvature so that flat U is handled too
    scale = max(np.abs(ops).max(), np.abs(model.curvature_tensor).max())
    for _ in range(attempts):
        w = rng.standard_normal(r)
        w /= np.linalg.norm(w)
        TH = np.einsum("i,j,ijab->ab", w, w, ops)
        vals, vecs = np.linalg.eigh(TH)
        groups = _clusters(vals, 1e-7 * scale)
        roots, mults = [], []
        zero_dim = 0
        ok = True
        for g in groups:
            E = vecs[:, g]
            if vals[g].mean() < 1e-7 * scale:
                zero_dim += len(g)
                continue
            M = np.einsum("ai,jkab,bi->jk", E, ops, E) / len(g)
            ev, evec = np.linalg.eigh(M)
            if r > 1 and ev[-2] > 1e-6 * ev[-1]:
                ok = False
                break
            # off-diagonal consistency: each operator is scalar on E
            for i in range(r):
                for j in range(r):
                    blk = E.T @ ops[i, j] @ E
                    if np.abs(blk - M[i, j] * np.eye(len(g))).max() > 1e-6 * scale:
                        ok = False
            if not ok:
                break
            alpha = np.sqrt(max(ev[-1], 0.0)) * evec[:, -1]
            roots += [alpha, -alpha]
            mults += [len(g), len(g)]
        if ok and zero_dim == r:
            return RootDatum(a, np.array(roots).reshape(-1, r), np.array(mults, dtype=int), zero_dim)
    raise RuntimeError("could not separate restricted roots (degenerate spectrum)")


def root_datum(model: SymmetricSpaceModel, U=None, seed: int = 0) -> RootDatum:
    B = np.eye(model.dim_p) if U is None else _basis(U)
    rng = np.random.default_rng(seed)
    a = maximal_abelian(model, B, rng, check_lts=U is not None)
    return restricted_roots(model, B, a, rng)


def shortest_root_length(model: SymmetricSpaceModel) -> float:
    lens = root_datum(model).lengths()
    return min(l for l, _ in lens)


def ambient_rank(model: SymmetricSpaceModel, seed: int = 0) -> int:
    return maximal_abelian(model, np.eye(model.dim_p), np.random.default_rng(seed), check_lts=False).shape[0]


def curvature_range_exact(rd: RootDatum) -> tuple[float, float]:
    lens = [l for l, _ in rd.lengths()]
    if not lens:
        return 0.0, 0.0
    hi = max(lens) ** 2
    lo = min(lens) ** 2 if rd.rank == 1 else 0.0
    return lo, hi


def sampled_curvature_range(model, U, n_planes: int = 2000, seed: int = 0):
    B = _basis(U)
    if B.shape[0] < 2:
        return None, None
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_planes, B.shape[0])) @ B
    Y = rng.standard_normal((n_planes, B.shape[0])) @ B
    K = sectional_curvatures(model, X, Y)
    return float(K.min()), float(K.max())


def fingerprint(model: SymmetricSpaceModel, U, seed: int = 0, n_planes: int = 2000,
                check_lts: bool = True) -> Fingerprint:
    """Local isometry signature of the totally geodesic submanifold tangent to U."""
    B = _basis(U)
    if check_lts and lts_defect(model, B) > TOL.lts:
        raise NotAnLTS("fingerprint needs a Lie triple system")
    rng = np.random.default_rng(seed)
    a = maximal_abelian(model, B, rng, check_lts=False)
    rd = restricted_roots(model, B, a, rng)
    lo, hi = curvature_range_exact(rd)
    smin, smax = sampled_curvature_range(model, B, n_planes, seed)
    vecs = rd.vectors()
    span_rank = orth_svd(vecs).shape[0] if len(vecs) else 0
    radius = None
    if rd.rank == 1 and hi > 0 and abs(hi - lo) < 1e-9 * hi and B.shape[0] >= 2:
        radius = 1 / math.sqrt(hi)
    return Fingerprint(
        dim=B.shape[0],
        rank=rd.rank,
        root_lengths=[(round(l, TOL.root_round), m) for l, m in rd.lengths()],
        curv_min=lo,
        curv_max=hi,
        flat_dim=rd.rank - span_rank,
        sampled_min=smin,
        sampled_max=smax,
        radius=radius,
    )


def factor_orthogonality(model, U1, U2, seed: int = 0) -> float:
    """Residual measuring that the root systems of two factors are orthogonal.

    Uses a = a1 + a2 inside U1 + U2 and returns the largest value, over the
    joint roots, of min(|projection on a1|, |projection on a2|).
    """
    B1, B2 = _basis(U1), _basis(U2)
    rng = np.random.default_rng(seed)
    a1 = maximal_abelian(model, B1, rng)
    a2 = maximal_abelian(model, B2, rng)
    a = np.vstack([a1, a2])
    joint = np.vstack([B1, B2])
    rd = restricted_roots(model, joint, a, rng)
    r1 = a1.shape[0]
    worst = 0.0
    for alpha in rd.roots:
        worst = max(worst, min(np.linalg.norm(alpha[:r1]), np.linalg.norm(alpha[r1:])))
    return float(worst)


def flat_directions(model: SymmetricSpaceModel, U, seed: int = 0) -> np.ndarray:
    """Orthonormal rows of a that are annihilated by every root (Euclidean factor)."""
    B = _basis(U)
    rng = np.random.default_rng(seed)
    a = maximal_abelian(model, B, rng, check_lts=False)
    rd = restricted_roots(model, B, a, rng)
    if len(rd.roots) == 0:
        return a.reshape(-1, model.dim_p)
    coef = null_space(rd.roots, tol=1e-8).T
    return coef @ a if coef.size else np.zeros((0, model.dim_p))


def holonomy_operators(model: SymmetricSpaceModel, U) -> np.ndarray:
    """Basis of the span of R(u, v) restricted to U, as (h, k, k) matrices in U-coordinates."""
    B = _basis(U)
    R = np.einsum("abcd,ia,jb,kc,ld->ijlk", model.curvature_tensor, B, B, B, B)
    ops = R.reshape(-1, B.shape[0] ** 2)
    return orth_svd(ops, tol=1e-9).reshape(-1, B.shape[0], B.shape[0])


def de_rham_factors(model: SymmetricSpaceModel, U, seed: int = 0) -> list:
    """Irreducible non-flat factors of the LTS U, then its flat part (if any).

    The non-flat factors are the eigenspaces of a generic symmetric element
    of the commutant of the holonomy operators; the flat part is their common
    kernel.
    """
    B = _basis(U)
    k = B.shape[0]
    if k == 0:
        return []
    ops = holonomy_operators(model, B)
    if len(ops) == 0:
        return [TangentSubspace(model, B)]
    flat = null_space(np.concatenate(list(ops)), 1e-8).T
    curved = null_space(flat, 1e-8).T if len(flat) else np.eye(k)
    acts = np.array([curved @ A @ curved.T for A in ops])
    m = curved.shape[0]
    rows = np.concatenate([np.kron(A, np.eye(m)) - np.kron(np.eye(m), A.T) for A in acts])
    comm = null_space(rows, 1e-9).T.reshape(-1, m, m)
    rng = np.random.default_rng(seed)
    S = np.einsum("i,ijk->jk", rng.standard_normal(len(comm)), comm)
    w, v = np.linalg.eigh(S + S.T)
    scale = max(np.abs(w).max(), 1.0)
    groups, start = [], 0
    for i in range(1, m + 1):
        if i == m or w[i] - w[i - 1] > 1e-6 * scale:
            groups.append(v[:, start:i].T)
            start = i
    out = [TangentSubspace(model, orth_svd(g @ curved @ B)) for g in groups]
    if len(flat):
        out.append(TangentSubspace(model, orth_svd(flat @ B)))
    return out


# ---------------------------------------------------------------------------
# closed geodesics


def geodesic_period(model: SymmetricSpaceModel, X, t_max: float | None = None,
                    tol: float = 1e-7) -> float:
    """Smallest t > 0 with exp(tX).o = o for a unit vector X in p (inf if none)."""
    X = np.asarray(X, dtype=float)
    X = X / np.linalg.norm(X)
    M = model.to_matrix(X)
    w = np.linalg.eigvalsh(1j * M)
    omega = max(np.abs(w).max(), 1e-12)
    if t_max is None:
        t_max = 8 * math.pi / shortest_root_length(model)
    base = model.base_rep(np.eye(M.shape[0], dtype=complex))
    bscale = max(np.linalg.norm(base), 1.0)

    def f(t):
        g = exp_normal(M, t)[0]
        return float(np.linalg.norm(model.base_rep(g) - base) / bscale)

    dt = math.pi / (40 * omega)
    ts = np.arange(dt, t_max + dt, dt)
    gs = exp_normal(M, ts)
    vals = np.array([np.linalg.norm(model.base_rep(g) - base) / bscale for g in gs])
    for i in range(1, len(ts) - 1):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1] and vals[i] < 0.2:
            res = minimize_scalar(lambda t: f(t) ** 2, bracket=(ts[i - 1], ts[i], ts[i + 1]),
                                  tol=1e-14)
            if f(res.x) < tol:
                return float(res.x)
    return math.inf
