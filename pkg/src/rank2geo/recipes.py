"""Tangent-space constructors for the catalog recipes.

Every recipe reduces to a real-linear condition on p (or on the simple factor
of a group space); the solution space is orthonormalized in p-coordinates.
Grassmann models use the base plane spanned by the first two coordinates of
the defining space, so conditions are written in those coordinates.
"""
from __future__ import annotations

import numpy as np

from .curvature import TangentSubspace, tangent_subspace
from .errors import NotTangent, RecipeUnavailable, UnsupportedPair
from .numlin import null_space, orth_svd
from .scalars import oct_basis, quat_to_complex
from .symspace import SymmetricSpaceModel, derivation_basis, inner_involution, so_basis, sp_basis, su_basis


def _realify(M) -> np.ndarray:
    M = np.asarray(M)
    return np.concatenate([M.real.ravel(), M.imag.ravel()])


def solve_linear(mats: np.ndarray, cond) -> np.ndarray:
    """Coefficient vectors c (rows) with cond(sum_i c_i mats[i]) = 0."""
    cols = np.array([_realify(cond(X)) for X in mats]).T
    return null_space(cols, tol=1e-9).T


def p_where(model: SymmetricSpaceModel, cond) -> TangentSubspace:
    """Subspace of p (coordinates) on which the real-linear map ``cond`` vanishes."""
    sol = solve_linear(model.p_mats, cond)
    if sol.shape[0] == 0:
        return TangentSubspace(model, np.zeros((0, model.dim_p)))
    return TangentSubspace(model, orth_svd(sol, tol=1e-9))


def complement(T: TangentSubspace) -> TangentSubspace:
    return T.complement()


# ---------------------------------------------------------------------------
# Grassmann families: operators on the defining space


def _defining_size(model) -> int:
    return model.id.n + 2


def lift(model, A) -> np.ndarray:
    """Operator on the defining space as a matrix acting like the model's g."""
    A = np.asarray(A)
    if model.id.family == "g2h":
        return quat_to_complex(A)
    return A.astype(complex)


def sign_matrix(model, negative) -> np.ndarray:
    m = _defining_size(model)
    d = np.ones(m)
    for i in negative:
        d[i % m] = -1.0
    return lift(model, np.diag(d))


def pair_rotation(m: int, pairs) -> np.ndarray:
    """Real skew matrix J with J e_a = e_b, J e_b = -e_a for each pair (a, b)."""
    J = np.zeros((m, m))
    for a, b in pairs:
        J[b, a], J[a, b] = 1.0, -1.0
    return J


def _adjacent_pairs(m: int):
    return [(2 * i, 2 * i + 1) for i in range(m // 2)]


def commuting_with(model, D, sign: float = 1.0) -> TangentSubspace:
    Dinv = np.linalg.inv(D)
    return p_where(model, lambda X: D @ X @ Dinv - sign * X)


def _grassmann_only(model, what):
    if model.id.family not in ("g2r", "g2c", "g2h"):
        raise RecipeUnavailable(f"{what} needs a Grassmann model, not {model.id}")


def build_subalgebra_inclusion(model, params, inst) -> TangentSubspace:
    fam = model.id.family
    if model.id.is_group:
        return group_subgroup(model, params)
    if "drop" in params:
        _grassmann_only(model, "coordinate inclusion")
        return commuting_with(model, sign_matrix(model, params["drop"]))
    if params.get("real_form"):
        _grassmann_only(model, "real form inclusion")
        if fam == "g2c":
            return p_where(model, lambda X: X - X.conj())
        if fam == "g2h":
            return commuting_with(model, quat_to_complex(1j * np.eye(_defining_size(model))))
        raise RecipeUnavailable(f"no real form inclusion for {model.id}")
    if "negate" in params:
        m = model.matrix_size
        d = np.ones(m)
        d[list(params["negate"])] = -1.0
        return commuting_with(model, np.diag(d))
    if "annihilate" in params:
        v = oct_basis(params["annihilate"])
        return p_where(model, lambda X: X @ v)
    raise RecipeUnavailable(f"unknown subalgebra parameters {params}")


def build_fixed_vector(model, params, inst) -> TangentSubspace:
    _grassmann_only(model, "fixed vector")
    return commuting_with(model, sign_matrix(model, [params.get("vector", 0)]))


def build_product_splitting(model, params, inst) -> TangentSubspace:
    _grassmann_only(model, "product splitting")
    m = _defining_size(model)
    if params.get("segre"):
        # complex line factor plus one closed geodesic of the other factor
        J = lift(model, pair_rotation(m, _adjacent_pairs(m)))
        line = commuting_with(model, J)
        other = commuting_with(model, J, -1.0)
        return tangent_subspace(model, np.vstack([line.basis, other.basis[:1]]))
    l = int(inst["l"])
    first = [0] + list(range(2, 2 + l))
    second = [i for i in range(m) if i not in first]
    return commuting_with(model, sign_matrix(model, second))


def product_factors(model, params, inst) -> list[TangentSubspace]:
    """Tangent spaces of the two factors of a splitting entry."""
    m = _defining_size(model)
    l = int(inst["l"])
    second = [1] + [i for i in range(2 + l, m)]
    split = sign_matrix(model, second)
    out = []
    for fixed in (1, 0):
        # one factor moves while the other line stays fixed
        pin = sign_matrix(model, [fixed])
        out.append(p_where(model, lambda X, P=pin: np.stack([split @ X @ split - X, P @ X @ P - X])))
    return out


def build_complex_structure(model, params, inst) -> TangentSubspace:
    if model.id.family != "g2r":
        raise RecipeUnavailable("a complex structure recipe needs a real Grassmannian")
    m = _defining_size(model)
    return commuting_with(model, pair_rotation(m, params.get("pairs") or _adjacent_pairs(m)).astype(complex))


def build_quaternionic_structure(model, params, inst) -> TangentSubspace:
    if model.id.family != "g2c":
        raise RecipeUnavailable("a quaternionic structure recipe needs a complex Grassmannian")
    m = _defining_size(model)
    Om = pair_rotation(m, params.get("pairs") or _adjacent_pairs(m)).astype(complex)
    # X commutes with the anti-linear map v -> Om conj(v)
    return p_where(model, lambda X: X @ Om - Om @ X.conj())


def build_reflective(model, params, inst) -> TangentSubspace:
    """±1 eigenspace in p of Ad(D), D diagonal with the given negated coordinates."""
    m = model.matrix_size
    d = np.ones(m)
    d[list(params["negate"])] = -1.0
    return commuting_with(model, np.diag(d), float(params.get("sign", 1)))


def build_diagonal_group(model, params, inst) -> TangentSubspace:
    fam = model.id.family
    if fam == "aii":
        # B -> diag(B, B^T): tangent diag(X, -conj X), X in su(3)
        mats = [np.block([[X, np.zeros((3, 3))], [np.zeros((3, 3)), -X.conj()]]) for X in su_basis(3)]
    elif fam == "diii":
        mats = [np.block([[X, np.zeros((5, 5))], [np.zeros((5, 5)), -X]]) for X in so_basis(5)]
    else:
        raise RecipeUnavailable(f"no diagonal-group recipe for {model.id}")
    return _from_matrices(model, np.array(mats))


def _from_matrices(model, mats) -> TangentSubspace:
    co = model.coords(mats)
    recon = np.tensordot(co, model.g_mats, axes=([-1], [0]))
    if np.abs(recon - mats).max() > 1e-9 or np.abs(co[:, : model.dim_k]).max() > 1e-9:
        raise NotTangent("constructed matrices are not in p")
    return tangent_subspace(model, co[:, model.dim_k:], tol=1e-9)


# ---------------------------------------------------------------------------
# group spaces


def group_base(family: str) -> np.ndarray:
    return {"grp-su3": lambda: su_basis(3), "grp-sp2": lambda: sp_basis(2),
            "grp-g2": derivation_basis}[family]()


def group_tangent(model, mats) -> TangentSubspace:
    """Image of elements X of the simple factor under X -> (X, -X) in p."""
    mats = np.asarray(mats)
    N = mats.shape[1]
    Z = np.zeros(mats.shape[:1] + (2 * N, 2 * N), dtype=complex)
    Z[:, :N, :N] = mats
    Z[:, N:, N:] = -mats
    return _from_matrices(model, Z)


def group_subgroup(model, params) -> TangentSubspace:
    base = group_base(model.id.family)
    if "commute_quat_signs" in params:
        D = quat_to_complex(np.diag(np.asarray(params["commute_quat_signs"], dtype=float)))
        Dinv = np.linalg.inv(D)
        cond = lambda X: D @ X @ Dinv - X  # noqa: E731
    elif "annihilate" in params:
        v = oct_basis(params["annihilate"])
        cond = lambda X: X @ v  # noqa: E731
    else:
        raise RecipeUnavailable(f"unknown subgroup parameters {params}")
    coef = solve_linear(base, cond)
    return group_tangent(model, np.tensordot(coef, base, axes=([1], [0])))


CARTAN_PAIRS = {
    ("grp-su3", "ai"): "ai",
    ("grp-su3", "cp2"): "cp2",
    ("grp-sp2", "g2r5"): "g2r5",
    ("grp-sp2", "hp1"): "hp1",
    ("grp-g2", "gi"): "gi",
}


def cartan_image(model, inner: str) -> TangentSubspace:
    """Differential at the base point of gK -> sigma(g) g^-1: X -> sigma X - X."""
    fam = model.id.family
    if (fam, inner) not in CARTAN_PAIRS:
        raise UnsupportedPair(f"no Cartan map registered for ({fam}, {inner})")
    base, invs = inner_involution(fam)
    sigma = invs[inner]
    return group_tangent(model, np.array([sigma(X) - X for X in base]))


def build_cartan_embedding(model, params, inst) -> TangentSubspace:
    return cartan_image(model, params["inner"])


# ---------------------------------------------------------------------------
# centrosome of a pair of poles (n = 2 Grassmannians)


def centrosome_block_condition(model) -> TangentSubspace:
    """Base-point tangent of the centrosome: p-blocks B in the compact algebra of U0."""
    fam = model.id.family
    if fam not in ("g2c", "g2h") or model.id.n != 2:
        raise RecipeUnavailable("centrosome recipe needs G2(C^4) or G2(H^4)")
    idx = [0, 1] if fam == "g2c" else [0, 1, 4, 5]
    jdx = [2, 3] if fam == "g2c" else [2, 3, 6, 7]
    # X maps U0 to U0^perp by a block B; B skew-Hermitian (and quaternionic)
    return p_where(model, lambda X: X[np.ix_(jdx, idx)] + X[np.ix_(jdx, idx)].conj().T)


def build_centrosome(model, params, inst) -> TangentSubspace:
    from .constructions import centrosome_sample

    T = centrosome_sample(model)
    return T.complement() if params.get("part") == "complement" else T


# ---------------------------------------------------------------------------
# representation orbits


def orbit_tangent(model, gens, plane, seed: int = 0):
    """Tangent at the base point of the orbit through ``plane`` and its second fundamental form.

    ``gens`` act on the defining space; the orbit is pulled back to the base
    plane by a unitary completion Q of ``plane``.  Returns the tangent space
    and max |proj_{U^perp} [Y_k, X]| over generators Y and X in U, which
    vanishes exactly for totally geodesic orbits whose tangent is an LTS.
    """
    N = gens.shape[1]
    rng = np.random.default_rng(seed)
    fill = rng.standard_normal((N, N - plane.shape[1])) + 0j
    Q, _ = np.linalg.qr(np.hstack([plane.astype(complex), fill]))
    # keep the first columns equal to the plane up to phases
    mats = np.array([Q.conj().T @ A @ Q for A in gens])
    if model.id.family == "g2r":
        mats = mats.real.astype(complex)
    co = model.coords(mats)
    U = orth_svd(co[:, model.dim_k:], tol=1e-8)
    if U.shape[0] == 0:
        return TangentSubspace(model, U), 0.0
    kp = np.einsum("ik,kcd,jc->ijd", co[:, : model.dim_k], model.k_on_p, U)
    res = kp - np.einsum("ijd,ld,le->ije", kp, U, U)
    return TangentSubspace(model, U), float(np.abs(res).max())


def _rep_generators(group: str):
    from .sp3rep import build_sp3_rep

    rep = build_sp3_rep()
    if group == "so3":
        return rep.so3_real.astype(complex)
    if group == "su3":
        return rep.su3_complex
    raise RecipeUnavailable(f"unknown representation {group}")


def candidate_planes(gens, seed: int = 0, n_random: int = 8) -> list[tuple[str, np.ndarray]]:
    """Weight-vector planes of a generic torus element, plus random planes."""
    N = gens.shape[1]
    real = np.allclose(gens.imag, 0)
    rng = np.random.default_rng(seed)
    coef = np.arange(1, len(gens) + 1) * 0.37 + rng.uniform(0, 0.1, len(gens))
    if real:
        # torus of so(3): a single generator; real weight planes from eigenvectors
        H = gens[-1].real
        w, v = np.linalg.eig(H)
        out = []
        for i in np.argsort(-w.imag):
            if w[i].imag > 1e-9:
                P = np.linalg.qr(np.column_stack([v[:, i].real, v[:, i].imag]))[0]
                out.append((f"weight {w[i].imag:.0f}", P))
    else:
        H = np.einsum("i,ijk->jk", coef, gens)
        w, v = np.linalg.eigh(1j * H)
        out = []
        for a in range(N):
            for b in range(a + 1, N):
                out.append((f"weights ({a},{b})", np.linalg.qr(v[:, [a, b]])[0]))
    for r in range(n_random):
        Z = rng.standard_normal((N, 2)) + (0 if real else 1j * rng.standard_normal((N, 2)))
        out.append((f"random {r}", np.linalg.qr(Z)[0]))
    return out


def scan_orbits(model, group: str, seed: int = 0):
    """All candidate orbits with their LTS defect and second fundamental form."""
    from .curvature import lts_defect

    gens = _rep_generators(group)
    rows = []
    for name, plane in candidate_planes(gens, seed):
        T, sff = orbit_tangent(model, gens, plane, seed)
        rows.append((name, T, lts_defect(model, T), sff))
    return rows


def build_rep_orbit(model, params, inst) -> TangentSubspace:
    from .errors import OrbitNotFound
    from .roots import fingerprint

    rows = scan_orbits(model, params["group"], params.get("seed", 0))
    good = [r for r in rows if r[2] < 1e-8 and r[3] < 1e-8]
    if not good:
        raise OrbitNotFound(f"no totally geodesic orbit among {len(rows)} candidates")
    unclear = [r[0] for r in rows if r not in good and max(r[2], r[3]) <= 0.01]
    if unclear:
        raise OrbitNotFound(f"orbits neither accepted nor clearly rejected: {unclear}")
    keys = {fingerprint(model, r[1]).key() for r in good}
    if len(keys) != 1:
        raise OrbitNotFound(f"{len(keys)} distinct totally geodesic orbit types found")
    return good[0][1]


# ---------------------------------------------------------------------------

BUILDERS = {
    "subalgebra-inclusion": build_subalgebra_inclusion,
    "fixed-vector": build_fixed_vector,
    "product-splitting": build_product_splitting,
    "complex-structure": build_complex_structure,
    "quaternionic-structure": build_quaternionic_structure,
    "reflective": build_reflective,
    "diagonal-group": build_diagonal_group,
    "cartan-embedding": build_cartan_embedding,
    "centrosome": build_centrosome,
    "rep-orbit": build_rep_orbit,
}

__all__ = [
    "BUILDERS",
    "CARTAN_PAIRS",
    "candidate_planes",
    "cartan_image",
    "centrosome_block_condition",
    "commuting_with",
    "group_subgroup",
    "group_tangent",
    "orbit_tangent",
    "p_where",
    "product_factors",
    "scan_orbits",
    "solve_linear",
]
