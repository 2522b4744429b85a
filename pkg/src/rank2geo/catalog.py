"""Catalog of maximal totally geodesic submanifolds and their verification.

Each entry names an ambient family, the isometry type as a small expression
tree (``expected``), the recipe that builds its tangent space and a status.
Numbers in ``expected`` are strings evaluated in the variables ``n`` and
``l``; each carries a ``source`` tag: ``listed`` for values printed in the
classification tables, ``derived`` for bookkeeping values implied by them.
"""
from __future__ import annotations

import ast
import json
import math
import operator
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .config import TOL
from .curvature import TangentSubspace, lts_defect
from .errors import RecipeUnavailable, UnsupportedSpace
from .recipes import BUILDERS, product_factors
from .roots import (
    de_rham_factors,
    factor_orthogonality,
    fingerprint,
    flat_directions,
    geodesic_period,
    root_datum,
)
from .symspace import GRASSMANN_FAMILIES, OUT_OF_SCOPE, SpaceId, get_space, registry

CATALOG_FILE = "catalog.json"
STATUSES = ("verified", "search-only", "stretch", "out-of-scope")
QUOTIENT_FACTORS = (1, 2, 4)


# ---------------------------------------------------------------------------
# safe arithmetic on catalog expressions

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow, ast.Mod: operator.mod,
           ast.FloorDiv: operator.floordiv}
_CMPOPS = {ast.Eq: operator.eq, ast.NotEq: operator.ne, ast.Lt: operator.lt,
           ast.LtE: operator.le, ast.Gt: operator.gt, ast.GtE: operator.ge}
_FUNCS = {"sqrt": math.sqrt}


def evaluate(expr, env: dict | None = None):
    """Evaluate an arithmetic/boolean expression over numbers, n, l and sqrt."""
    if isinstance(expr, (int, float)):
        return expr
    env = env or {}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ValueError(f"unknown variable {node.id!r}")
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BoolOp):
            vals = [ev(v) for v in node.values]
            return all(vals) if isinstance(node.op, ast.And) else any(vals)
        if isinstance(node, ast.Compare):
            left = ev(node.left)
            for op, comp in zip(node.ops, node.comparators):
                right = ev(comp)
                if not _CMPOPS[type(op)](left, right):
                    return False
                left = right
            return True
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression element {ast.dump(node)}")

    return ev(ast.parse(str(expr), mode="eval"))


def _val(field_, env):
    """Numeric value of a tagged field {"value": expr, "source": tag}."""
    if isinstance(field_, dict):
        return evaluate(field_["value"], env)
    return evaluate(field_, env)


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class ConstructorRecipe:
    kind: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params}


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    ambient: str
    item: int
    part: str
    label: str
    applies: str
    instances: list
    expected: dict
    recipe: ConstructorRecipe
    status: str
    quotient: str = ""
    complement_reflective: bool = False
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "ambient": self.ambient,
            "item": self.item,
            "part": self.part,
            "label": self.label,
            "applies": self.applies,
            "instances": self.instances,
            "expected": self.expected,
            "recipe": self.recipe.to_dict(),
            "status": self.status,
            "quotient": self.quotient,
            "complement_reflective": self.complement_reflective,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CatalogEntry":
        if d["status"] not in STATUSES:
            raise ValueError(f"{d['id']}: unknown status {d['status']!r}")
        return cls(
            id=d["id"], ambient=d["ambient"], item=d["item"], part=d["part"],
            label=d["label"], applies=d["applies"], instances=d["instances"],
            expected=d["expected"], recipe=ConstructorRecipe(**d["recipe"]),
            status=d["status"], quotient=d["quotient"],
            complement_reflective=d["complement_reflective"], notes=d["notes"],
        )

    @property
    def parametrized(self) -> bool:
        return self.ambient in GRASSMANN_FAMILIES

    def space_id(self, inst: dict) -> str:
        return f"{self.ambient}:{inst['n']}" if self.parametrized else self.ambient

    def instance_id(self, inst: dict) -> str:
        base = f"{self.space_id(inst)}/item{self.item}{self.part}"
        return base + (f"@l={inst['l']}" if "l" in inst else "")

    def applies_to(self, inst: dict) -> bool:
        return bool(evaluate(self.applies, inst)) if self.applies else True


@dataclass(frozen=True)
class Catalog:
    version: int
    entries: tuple

    def by_id(self, entry_id: str) -> CatalogEntry:
        for e in self.entries:
            if e.id == entry_id:
                return e
        raise KeyError(entry_id)

    def for_family(self, family: str) -> list:
        return [e for e in self.entries if e.ambient == family]


def dumps_catalog(cat: Catalog) -> str:
    doc = {"version": cat.version, "entries": [e.to_dict() for e in cat.entries]}
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def loads_catalog(text: str) -> Catalog:
    doc = json.loads(text)
    return Catalog(doc["version"], tuple(CatalogEntry.from_dict(d) for d in doc["entries"]))


def default_catalog_path():
    return resources.files("rank2geo").joinpath("data", CATALOG_FILE)


def load_catalog(path: str | Path | None = None) -> Catalog:
    p = default_catalog_path() if path is None else Path(path)
    return loads_catalog(p.read_text(encoding="utf-8"))


def item_counts(cat: Catalog) -> dict[str, int]:
    """Number of distinct list items per ambient family."""
    out: dict[str, set] = {}
    for e in cat.entries:
        out.setdefault(e.ambient, set()).add(e.item)
    return {k: len(v) for k, v in out.items()}


# ---------------------------------------------------------------------------
# expected signatures


@dataclass
class Signature:
    """Local isometry data implied by an isometry-type expression."""

    dim: int
    rank: int
    flat_dim: int
    roots: list                      # [(length, multiplicity)], positive roots
    circles: list = field(default_factory=list)   # radii of circle factors
    factors: list = field(default_factory=list)   # per-factor signatures

    @property
    def lengths(self) -> list:
        return sorted(l for l, m in self.roots for _ in range(m))

    def curvature_range(self) -> tuple[float, float]:
        if not self.roots:
            return 0.0, 0.0
        hi = max(l for l, _ in self.roots) ** 2
        lo = min(l for l, _ in self.roots) ** 2 if self.rank == 1 else 0.0
        return lo, hi

    def to_dict(self) -> dict:
        lo, hi = self.curvature_range()
        return {
            "dim": self.dim,
            "rank": self.rank,
            "flat_dim": self.flat_dim,
            "root_lengths": [[round(l, TOL.root_round), m] for l, m in _merge(self.roots)],
            "curv_min": round(lo, 12),
            "curv_max": round(hi, 12),
            "circle_radii": [round(r, 12) for r in self.circles],
        }


def _merge(roots):
    acc: dict = {}
    for l, m in roots:
        key = round(l, 9)
        acc[key] = acc.get(key, 0) + m
    return sorted(acc.items())


def _circle(r):
    return Signature(1, 1, 1, [], [r])


def signature(spec: dict, env: dict) -> Signature:
    t = spec["type"]
    if t == "product":
        parts = [signature(f, env) for f in spec["factors"]]
        return Signature(
            sum(p.dim for p in parts), sum(p.rank for p in parts), sum(p.flat_dim for p in parts),
            [r for p in parts for r in p.roots], [c for p in parts for c in p.circles], parts,
        )
    if t == "circle":
        return _circle(_val(spec["r"], env))
    if t == "sphere":
        ell = int(_val(spec["dim"], env))
        r = _val(spec["r"], env)
        return _circle(r) if ell == 1 else Signature(ell, 1, 0, [(1 / r, ell - 1)])
    if t in ("rp", "cp", "hp"):
        ell = int(_val(spec["dim"], env))
        s = math.sqrt(_val(spec["kappa"], env))
        if t == "rp":
            return _circle(1 / s) if ell == 1 else Signature(ell, 1, 0, [(s, ell - 1)])
        d = 2 if t == "cp" else 4
        roots = [(s, d * (ell - 1))] if ell > 1 else []
        return Signature(d * ell, 1, 0, roots + [(2 * s, d - 1)])
    if t == "space":
        sid = re.sub(r"\{([^}]*)\}", lambda m: str(int(evaluate(m.group(1), env))), spec["space"])
        scale = _val(spec.get("srr", "1"), env)
        model = get_space(sid, spec.get("convention"))
        rd = root_datum(model)
        return Signature(model.dim_p, rd.rank, 0, [(l * scale, m) for l, m in rd.lengths()])
    if t == "unchecked":
        raise UnsupportedSpace("no expected invariants recorded")
    raise ValueError(f"unknown isometry type {t!r}")


def expected_signature(entry: CatalogEntry, inst: dict) -> Signature:
    return signature(entry.expected, inst)


# ---------------------------------------------------------------------------
# construction


def construct_tangent(entry: CatalogEntry, inst: dict | None = None) -> TangentSubspace:
    """Tangent space at the base point built from the entry's recipe."""
    inst = inst or (entry.instances[0] if entry.instances else {})
    if entry.status == "out-of-scope":
        raise UnsupportedSpace(f"{entry.id} lies in an ambient space without a model")
    if entry.status == "search-only" or entry.recipe.kind == "search":
        raise RecipeUnavailable(f"{entry.id} has no explicit construction; use the search route")
    builder = BUILDERS.get(entry.recipe.kind)
    if builder is None:
        raise RecipeUnavailable(f"{entry.id}: recipe kind {entry.recipe.kind!r} is not built")
    model = get_space(entry.space_id(inst))
    return builder(model, entry.recipe.params, inst)


def entry_factors(entry: CatalogEntry, inst: dict, T: TangentSubspace) -> list:
    """Factor tangent spaces of a product entry (recipe factors where defined)."""
    model = T.model
    if entry.recipe.kind == "product-splitting" and not entry.recipe.params.get("segre"):
        return product_factors(model, entry.recipe.params, inst)
    return de_rham_factors(model, T)


# ---------------------------------------------------------------------------
# comparison


@dataclass
class Check:
    name: str
    measured: object
    expected: object
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "measured": self.measured, "expected": self.expected,
                "passed": bool(self.passed)}


def _close(a, b, tol):
    return abs(a - b) <= tol


def compare_fingerprint(fp, sig: Signature, tol: float = 2e-6) -> list[Check]:
    """Field-by-field comparison of a measured fingerprint with an expected signature."""
    checks = [
        Check("dim", fp.dim, sig.dim, fp.dim == sig.dim),
        Check("rank", fp.rank, sig.rank, fp.rank == sig.rank),
        Check("flat_dim", fp.flat_dim, sig.flat_dim, fp.flat_dim == sig.flat_dim),
    ]
    mine = sorted(l for l, m in fp.root_lengths for _ in range(m))
    theirs = sig.lengths
    same = len(mine) == len(theirs) and all(_close(a, b, tol) for a, b in zip(mine, theirs))
    checks.append(Check("root_lengths", [[l, m] for l, m in fp.root_lengths],
                        [[round(l, TOL.root_round), m] for l, m in _merge(sig.roots)], same))
    lo, hi = sig.curvature_range()
    checks.append(Check("curvature_range", [round(fp.curv_min, 12), round(fp.curv_max, 12)],
                        [round(lo, 12), round(hi, 12)],
                        _close(fp.curv_min, lo, 1e-6) and _close(fp.curv_max, hi, 1e-6)))
    if fp.sampled_min is not None:
        inside = fp.sampled_min >= fp.curv_min - 1e-9 and fp.sampled_max <= fp.curv_max + 1e-9
        checks.append(Check("sampled_curvature_within_range",
                            [round(fp.sampled_min, 12), round(fp.sampled_max, 12)],
                            [round(fp.curv_min, 12), round(fp.curv_max, 12)], inside))
    return checks


def period_matches(period: float, radius: float) -> bool:
    """Circle period 2 pi r, possibly divided by a quotient factor 1, 2 or 4."""
    return any(_close(period, 2 * math.pi * radius / k, 1e-6 * max(1.0, period))
               for k in QUOTIENT_FACTORS)


# ---------------------------------------------------------------------------
# verification


@dataclass
class EntryResult:
    entry_id: str
    instance: str
    status: str
    route: str
    outcome: str                 # pass | fail | skipped
    defect: float | None = None
    measured: dict | None = None
    expected: dict | None = None
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.outcome == "pass"

    def recompute(self) -> str:
        """Outcome from the stored checks (skipped when nothing was checked)."""
        if not self.checks:
            return "skipped"
        return "pass" if all(c["passed"] for c in self.checks) else "fail"

    def to_dict(self) -> dict:
        return {
            "entry": self.entry_id,
            "instance": self.instance,
            "status": self.status,
            "route": self.route,
            "outcome": self.outcome,
            "defect": None if self.defect is None else float(f"{self.defect:.3e}"),
            "measured": self.measured,
            "expected": self.expected,
            "checks": self.checks,
            "notes": self.notes,
        }


def verify_tangent(entry: CatalogEntry, inst: dict, T: TangentSubspace, seed: int = 0,
                   tol_defect: float = 1e-8) -> tuple[list[Check], dict, list]:
    """All checks for a constructed (or found) tangent space of an entry."""
    model = T.model
    notes = []
    defect = lts_defect(model, T)
    checks = [Check("lts_defect", float(f"{defect:.3e}"), f"< {tol_defect:g}", defect < tol_defect)]
    fp = fingerprint(model, T, seed=seed, check_lts=False)
    sig = expected_signature(entry, inst)
    checks += compare_fingerprint(fp, sig)
    measured = fp.to_dict()
    # circle factors: geodesic period along the Euclidean directions
    if sig.circles and fp.flat_dim == len(sig.circles) == 1:
        F = flat_directions(model, T, seed)
        P = geodesic_period(model, F[0])
        measured["circle_period"] = round(P, 9)
        checks.append(Check("circle_period", round(P, 9),
                            [round(2 * math.pi * sig.circles[0] / k, 9) for k in QUOTIENT_FACTORS],
                            period_matches(P, sig.circles[0])))
    elif sig.circles:
        notes.append("torus factor: individual circle periods not separated")
    # product entries: factor root systems are orthogonal
    nonflat = [f for f in sig.factors if f.roots]
    if len(nonflat) >= 2:
        facs = entry_factors(entry, inst, T)
        if len(facs) >= 2:
            res = factor_orthogonality(model, facs[0], facs[1], seed)
            checks.append(Check("factor_orthogonality", float(f"{res:.3e}"), "< 1e-08", res < 1e-8))
            got = sorted(f.dim for f in facs)
            want = sorted(f.dim for f in nonflat)
            checks.append(Check("factor_dims", got, want, got == want))
        else:
            checks.append(Check("factor_count", len(facs), len(nonflat), False))
    if entry.complement_reflective:
        cd = lts_defect(model, T.complement())
        checks.append(Check("complement_lts_defect", float(f"{cd:.3e}"), "< 1e-08", cd < 1e-8))
    return checks, measured, notes


def instances_for(entry: CatalogEntry, n_values=None) -> list[dict]:
    """Verification instances; ``n_values`` restricts the Grassmann parameter."""
    insts = list(entry.instances)
    if n_values is not None and entry.parametrized:
        wanted = set(n_values)
        insts = [i for i in insts if i["n"] in wanted]
    return insts


def verify_entry(entry: CatalogEntry, inst: dict, seed: int = 0, tol_defect: float = 1e-8,
                 restarts: int | None = None) -> EntryResult:
    """Run the construction (or search) route of one entry instance."""
    t0 = time.perf_counter()
    iid = entry.instance_id(inst) if entry.status != "out-of-scope" else entry.id
    res = EntryResult(entry.id, iid, entry.status, entry.recipe.kind, "skipped")
    if entry.status == "out-of-scope":
        res.notes.append("ambient space has no model (out of scope)")
        return res
    try:
        sig = expected_signature(entry, inst)
    except UnsupportedSpace as exc:
        res.notes.append(str(exc))
        return res
    res.expected = sig.to_dict()
    if entry.status == "stretch" and entry.recipe.kind not in BUILDERS:
        res.notes.append("unverified (stretch): constructor not built")
        return res
    try:
        if entry.status == "search-only" or entry.recipe.kind == "search":
            from .search import rediscover

            T, info = rediscover(entry, inst, seed=seed, restarts=restarts)
            res.route = "search"
            res.notes.append(info)
            if T is None:
                res.checks = [Check("search_match", None, "matching cluster", False).to_dict()]
                res.outcome = res.recompute()
                res.seconds = round(time.perf_counter() - t0, 3)
                return res
        else:
            T = construct_tangent(entry, inst)
        checks, measured, notes = verify_tangent(entry, inst, T, seed, tol_defect)
    except UnsupportedSpace as exc:
        res.notes.append(f"unverified: {exc}")
        return res
    except RecipeUnavailable as exc:
        if entry.status != "stretch":
            raise
        res.notes.append(f"unverified (stretch): {exc}")
        return res
    res.defect = lts_defect(T.model, T)
    res.measured = measured
    res.checks = [c.to_dict() for c in checks]
    res.notes += notes
    res.outcome = res.recompute()
    res.seconds = round(time.perf_counter() - t0, 3)
    return res


def verify_catalog(cat: Catalog | None = None, families=None, seed: int = 0,
                   tol_defect: float = 1e-8, include_search: bool = False,
                   restarts: int | None = None) -> list[EntryResult]:
    cat = cat or load_catalog()
    out = []
    for e in cat.entries:
        if families is not None and e.ambient not in families:
            continue
        if e.status == "search-only" and not include_search:
            continue
        if e.status == "out-of-scope":
            out.append(verify_entry(e, {}, seed, tol_defect))
            continue
        for inst in e.instances:
            out.append(verify_entry(e, inst, seed, tol_defect, restarts))
    return out


def registered_space_ids() -> list[str]:
    return [str(s) for s in registry()]


__all__ = [
    "CATALOG_FILE",
    "Catalog",
    "CatalogEntry",
    "Check",
    "ConstructorRecipe",
    "EntryResult",
    "OUT_OF_SCOPE",
    "Signature",
    "compare_fingerprint",
    "construct_tangent",
    "dumps_catalog",
    "entry_factors",
    "evaluate",
    "expected_signature",
    "instances_for",
    "item_counts",
    "load_catalog",
    "loads_catalog",
    "period_matches",
    "signature",
    "verify_catalog",
    "verify_entry",
    "verify_tangent",
]
