"""Numerical discovery of Lie triple systems and a maximality probe.

The LTS defect of a k-frame Q is driven to zero by damped Gauss-Newton
(Levenberg-Marquardt) steps in the chart Z -> orth(Q + Z Q_perp) of the
Grassmannian, with a central-difference Jacobian.  Accepted solutions are
clustered by fingerprint, which is invariant under the isometry group.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curvature import TangentSubspace, apply_triples, lts_closure, lts_defect
from .errors import NotAnLTS, SearchUnsupported
from .numlin import null_space, orth_svd
from .roots import Fingerprint, fingerprint

MAX_SEARCH_DIM = 6


def default_restarts(dim_p: int) -> int:
    return 200 if dim_p <= 10 else 500


@dataclass(frozen=True)
class SearchConfig:
    dim_target: int
    restarts: int = 200
    max_iters: int = 60
    seed: int = 0
    defect_accept: float = 1e-10
    cluster_tol: float = 1e-4
    fd_step: float = 1e-5
    damping: float = 1e-3

    def __post_init__(self):
        if self.dim_target < 1:
            raise ValueError("dim_target must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")

    def to_dict(self) -> dict:
        return {"dim_target": self.dim_target, "restarts": self.restarts, "max_iters": self.max_iters,
                "seed": self.seed, "defect_accept": self.defect_accept, "cluster_tol": self.cluster_tol,
                "fd_step": self.fd_step}


@dataclass
class Cluster:
    tangent: TangentSubspace
    fingerprint: Fingerprint
    hits: int
    defect: float
    first_restart: int
    matches: list = field(default_factory=list)
    status: str = ""

    def to_dict(self) -> dict:
        return {"fingerprint": self.fingerprint.to_dict(), "hits": self.hits,
                "defect": float(f"{self.defect:.3e}"), "first_restart": self.first_restart,
                "matches": self.matches, "status": self.status}


# ---------------------------------------------------------------------------
# optimization


def _residual(model, Q) -> np.ndarray:
    """Components of R(q_i, q_j) q_l orthogonal to span(Q), i < j."""
    T = apply_triples(model, Q)
    k = Q.shape[0]
    iu = np.triu_indices(k, 1)
    T = T[iu[0], iu[1]]
    return (T - (T @ Q.T) @ Q).ravel()


def _orth_rows(M) -> np.ndarray:
    q, r = np.linalg.qr(M.T)
    return (q * np.sign(np.diag(r))).T


def _retract(Q, Qp, Z) -> np.ndarray:
    return _orth_rows(Q + Z @ Qp)


def polish_frame(model, Q, cfg: SearchConfig) -> tuple[np.ndarray, float]:
    """Levenberg-Marquardt minimization of the defect from the frame Q."""
    k, d = Q.shape
    lam = cfg.damping
    h = cfg.fd_step
    r = _residual(model, Q)
    cost = r @ r
    for _ in range(cfg.max_iters):
        if math.sqrt(cost) < 1e-14:
            break
        Qp = null_space(Q, 1e-12).T
        m = Qp.shape[0]
        J = np.empty((r.size, k * m))
        for idx in range(k * m):
            E = np.zeros(k * m)
            E[idx] = h
            E = E.reshape(k, m)
            J[:, idx] = (_residual(model, _retract(Q, Qp, E)) - _residual(model, _retract(Q, Qp, -E))) / (2 * h)
        g = J.T @ r
        A = J.T @ J
        improved = False
        for _ in range(12):
            step = -np.linalg.solve(A + lam * (np.diag(np.diag(A)) + np.eye(len(A)) * 1e-12), g)
            Qn = _retract(Q, Qp, step.reshape(k, m))
            rn = _residual(model, Qn)
            cn = rn @ rn
            if cn < cost:
                Q, r, cost = Qn, rn, cn
                lam = max(lam / 5, 1e-12)
                improved = True
                break
            lam *= 10
        if not improved:
            break
    return Q, lts_defect(model, Q)


def find_lts(model, cfg: SearchConfig, fingerprint_seed: int = 0, stop_when=None) -> list[Cluster]:
    """Random-restart search for k-dimensional Lie triple systems.

    Restart i starts from a Haar-random frame drawn with seed cfg.seed + i.
    Returns clusters sorted by fingerprint key; empty if nothing converged.
    ``stop_when(fingerprint)`` ends the run early once it returns True.
    """
    k, d = cfg.dim_target, model.dim_p
    if k > MAX_SEARCH_DIM:
        raise SearchUnsupported(f"search is limited to k <= {MAX_SEARCH_DIM} (got {k})")
    if k > d:
        raise ValueError(f"k = {k} exceeds dim p = {d}")
    clusters: list[Cluster] = []
    for i in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + i)
        Q0 = _orth_rows(rng.standard_normal((k, d)))
        Q, defect = polish_frame(model, Q0, cfg)
        if defect >= cfg.defect_accept:
            continue
        T = TangentSubspace(model, Q)
        fp = fingerprint(model, T, seed=fingerprint_seed, n_planes=200, check_lts=False)
        for c in clusters:
            if c.fingerprint.distance(fp) < cfg.cluster_tol:
                c.hits += 1
                break
        else:
            clusters.append(Cluster(T, fp, 1, defect, i))
        if stop_when is not None and stop_when(fp):
            break
    clusters.sort(key=lambda c: (c.fingerprint.key(), c.first_restart))
    return clusters


# ---------------------------------------------------------------------------
# maximality


@dataclass
class ProbeResult:
    maximal_probable: bool
    trials: int
    witness: TangentSubspace | None = None
    witness_dim: int | None = None

    @property
    def verdict(self) -> str:
        return "maximal-probable" if self.maximal_probable else "not-maximal"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "trials": self.trials, "witness_dim": self.witness_dim,
                "note": "probabilistic evidence, not a proof"}


def _structured_candidates(model, B, rng) -> list[np.ndarray]:
    """Directions of U^perp adapted to the curvature of U.

    Any LTS V containing U meets U^perp in a subspace invariant under the
    operators R(u, u') and R(., u)u (u, u' in U).  Eigenvectors of generic
    symmetric elements commuting with these operators, and of a generic Jacobi
    operator, are therefore natural witnesses.
    """
    C = null_space(B, 1e-10).T
    if C.shape[0] == 0:
        return []
    m = C.shape[0]
    Rt = model.curvature_tensor
    ops = []
    k = B.shape[0]
    for i in range(k):
        ops.append(C @ np.einsum("cabd,a,b->cd", Rt, B[i], B[i]) @ C.T)
        for j in range(i + 1, k):
            M = np.einsum("cabd,a,b->cd", Rt, B[i], B[j])
            ops.append(C @ (M + M.T) / 2 @ C.T)
            ops.append(C @ np.einsum("abcd,a,b->dc", Rt, B[i], B[j]) @ C.T)
    out = []
    u = rng.standard_normal(k) @ B
    w, v = np.linalg.eigh(C @ np.einsum("cabd,a,b->cd", Rt, u, u) @ C.T)
    out += [v[:, i] @ C for i in range(m)]
    basis = orth_svd(np.array([o.ravel() for o in ops]), tol=1e-9).reshape(-1, m, m)
    if m <= 40 and len(basis):
        rows = np.concatenate([np.kron(A, np.eye(m)) - np.kron(np.eye(m), A.T) for A in basis])
        comm = null_space(rows, 1e-9).T.reshape(-1, m, m)
        S = np.einsum("i,ijk->jk", rng.standard_normal(len(comm)), comm)
        w, v = np.linalg.eigh(S + S.T)
        scale = max(np.abs(w).max(), 1.0)
        start = 0
        for i in range(1, m + 1):
            if i == m or w[i] - w[i - 1] > 1e-6 * scale:
                block = v[:, start:i]
                out.append(block @ rng.standard_normal(block.shape[1]) @ C)
                out += [block[:, j] @ C for j in range(block.shape[1])]
                start = i
    return out


def maximality_probe(model, U, trials: int = 64, seed: int = 0,
                     structured: bool = True) -> ProbeResult:
    """Probabilistic maximality test via closures lts_closure(U + w)."""
    B = U.basis if isinstance(U, TangentSubspace) else orth_svd(U)
    if lts_defect(model, B) > 1e-8:
        raise NotAnLTS("maximality probe needs a Lie triple system")
    d = model.dim_p
    if B.shape[0] == d:
        return ProbeResult(True, 0)
    rng = np.random.default_rng(seed)
    C = null_space(B, 1e-10).T
    cands = [rng.standard_normal(C.shape[0]) @ C for _ in range(trials)]
    if structured:
        cands += _structured_candidates(model, B, rng)
    count = 0
    for w in cands:
        count += 1
        cl = lts_closure(model, np.vstack([B, w]))
        if B.shape[0] < cl.dim < d:
            return ProbeResult(False, count, cl, cl.dim)
    return ProbeResult(True, count)


# ---------------------------------------------------------------------------
# catalog interplay


def catalog_signatures(space_id: str, catalog=None) -> list:
    """(instance id, Signature) for every catalog entry applicable to a space."""
    from .catalog import expected_signature, load_catalog

    catalog = catalog or load_catalog()
    fam, _, n = space_id.partition(":")
    out = []
    for e in catalog.entries:
        if e.ambient != fam or e.status == "out-of-scope":
            continue
        for inst in e.instances:
            if n and inst.get("n") != int(n):
                continue
            out.append((e.instance_id(inst), expected_signature(e, inst)))
    return out


def signature_matches(fp: Fingerprint, sig, tol: float = 1e-5) -> bool:
    from .catalog import compare_fingerprint

    return all(c.passed for c in compare_fingerprint(fp, sig, tol) if c.name != "sampled_curvature_within_range")


def classify_clusters(model, clusters, catalog=None, trials: int = 64, seed: int = 0) -> list[Cluster]:
    """Label clusters: ambient (all of p), catalog match, sub-LTS (not maximal) or unexpected."""
    sigs = catalog_signatures(str(model.id), catalog)
    for c in clusters:
        if c.tangent.dim == model.dim_p:
            c.status = "ambient"
            continue
        c.matches = [iid for iid, sig in sigs if signature_matches(c.fingerprint, sig)]
        if c.matches:
            c.status = "catalog"
            continue
        probe = maximality_probe(model, c.tangent, trials, seed)
        c.status = "sub-lts" if not probe.maximal_probable else "unexpected"
    return clusters


def rediscover(entry, inst, seed: int = 0, restarts: int | None = None):
    """Search route for an entry without construction: first matching cluster."""
    from .catalog import expected_signature
    from .symspace import get_space

    model = get_space(entry.space_id(inst))
    sig = expected_signature(entry, inst)
    cfg = SearchConfig(sig.dim, restarts or default_restarts(model.dim_p), seed=seed)
    clusters = find_lts(model, cfg, stop_when=lambda fp: signature_matches(fp, sig))
    for c in clusters:
        if signature_matches(c.fingerprint, sig):
            return c.tangent, f"search k={sig.dim} seed={seed} restarts={cfg.restarts}: {c.hits} hits"
    return None, f"search k={sig.dim} seed={seed} restarts={cfg.restarts}: no matching cluster among {len(clusters)}"


__all__ = [
    "Cluster",
    "MAX_SEARCH_DIM",
    "ProbeResult",
    "SearchConfig",
    "catalog_signatures",
    "classify_clusters",
    "default_restarts",
    "find_lts",
    "maximality_probe",
    "polish_frame",
    "rediscover",
    "signature_matches",
]
