"""Command-line front end: list, verify and search, with JSON reports.

Exit codes: 0 all checked fields pass, 1 a verification failure, 2 nothing
failed but something was skipped (out of scope or unbuilt stretch entry),
3 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from . import __version__
from .catalog import Catalog, EntryResult, load_catalog, verify_entry
from .errors import Rank2GeoError, SearchUnsupported
from .search import SearchConfig, classify_clusters, default_restarts, find_lts
from .symspace import OUT_OF_SCOPE, SpaceId, default_convention, get_space, registry

EXIT_PASS, EXIT_FAIL, EXIT_SKIPPED, EXIT_USAGE = 0, 1, 2, 3
REPORT_DIR_ENV = "RANK2GEO_REPORT_DIR"
REPORT_FORMAT = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# selection


def _parse_space(text: str) -> SpaceId:
    try:
        return SpaceId.parse(text)
    except Exception as exc:  # noqa: BLE001
        raise UsageError(f"unknown space {text!r}: {exc}") from exc


def select_instances(cat: Catalog, entry: str | None = None, space: str | None = None):
    """(entry, instance) pairs addressed by an entry id or a space id.

    Entry ids: ``fam/itemN``, ``fam:n/itemN`` or ``fam:n/itemN@l=L``.
    """
    if entry:
        m = re.fullmatch(r"([a-z0-9-]+)(?::(\d+))?/item(\d+)([a-z]?)(?:@l=(\d+))?", entry)
        if not m:
            raise UsageError(f"malformed entry id {entry!r}")
        fam, n, item, part, l = m.groups()
        found = [e for e in cat.entries if e.ambient == fam and e.item == int(item)
                 and (not part or e.part == part)]
        if not found:
            raise UsageError(f"no catalog entry {entry!r}")
        out = []
        for e in found:
            if e.status == "out-of-scope":
                out.append((e, {}))
                continue
            for inst in e.instances:
                if n is not None and inst.get("n") != int(n):
                    continue
                if l is not None and inst.get("l") != int(l):
                    continue
                out.append((e, inst))
        if not out:
            raise UsageError(f"entry {entry!r} has no instance there")
        return out
    if space:
        fam, _, n = space.partition(":")
        if fam not in OUT_OF_SCOPE:
            _parse_space(space)
        out = []
        for e in cat.entries:
            if e.ambient != fam:
                continue
            if e.status == "out-of-scope":
                out.append((e, {}))
                continue
            out += [(e, i) for i in e.instances if not n or i.get("n") == int(n)]
        return out
    return [(e, i) for e in cat.entries for i in (e.instances if e.status != "out-of-scope" else [{}])]


def list_rows(cat: Catalog, filt: str = "") -> list[dict]:
    """Catalog rows in file order; ``filt`` is a family or a space id."""
    fam, _, n = (filt or "").partition(":")
    rows = []
    for e in cat.entries:
        if fam and e.ambient != fam:
            continue
        if n and not any(i.get("n") == int(n) for i in e.instances):
            continue
        rows.append({"entry": e.id, "label": e.label, "status": e.status, "recipe": e.recipe.kind,
                     "instances": [e.instance_id(i) for i in e.instances]})
    return rows


# ---------------------------------------------------------------------------
# reports


def exit_code(records: list[dict]) -> int:
    outcomes = [r["outcome"] for r in records]
    if any(o == "fail" for o in outcomes):
        return EXIT_FAIL
    if any(o == "skipped" for o in outcomes):
        return EXIT_SKIPPED
    return EXIT_PASS


def summarize(records: list[dict]) -> dict:
    out = {"pass": 0, "fail": 0, "skipped": 0}
    for r in records:
        out[r["outcome"]] += 1
    return out


def build_verify_report(cat: Catalog, results: list[EntryResult], seed: int, tol_defect: float,
                        restarts, timings: bool = False) -> dict:
    records = []
    for r in results:
        d = r.to_dict()
        if timings:
            d["seconds"] = r.seconds
        records.append(d)
    return {
        "report_format": REPORT_FORMAT,
        "tool_version": __version__,
        "catalog_version": cat.version,
        "command": "verify",
        "config": {"seed": seed, "tol_defect": tol_defect, "restarts": restarts},
        "records": records,
        "summary": summarize(records),
        "unverified_claims": [
            "completeness of the classification",
            "E6 entries (no model)",
            "global quotient types (local invariants only)",
            "maximality is probabilistic evidence",
        ],
    }


def reevaluate(report: dict) -> list[str]:
    """Outcomes recomputed from the stored per-field checks."""
    out = []
    for r in report["records"]:
        if not r["checks"]:
            out.append("skipped")
        else:
            out.append("pass" if all(c["passed"] for c in r["checks"]) else "fail")
    return out


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def _fmt_table(records: list[dict]) -> str:
    lines = [f"{'instance':22s} {'status':13s} {'route':22s} {'curvature':22s} outcome  failed fields"]
    for r in records:
        bad = ",".join(c["name"] for c in r["checks"] if not c["passed"])
        m = r["measured"]
        curv = f"[{m['curv_min']:.6g}, {m['curv_max']:.6g}]" if m else "-"
        lines.append(f"{r['instance']:22s} {r['status']:13s} {r['route']:22s} {curv:22s} {r['outcome']:8s} {bad}")
    return "\n".join(lines)


def _search_table(report: dict) -> str:
    lines = [f"space {report['space']} k={report['config']['dim_target']} seed={report['config']['seed']}"
             f" restarts={report['config']['restarts']}"]
    for c in report["clusters"]:
        fp = c["fingerprint"]
        lines.append(f"  dim={fp['dim']} rank={fp['rank']} roots={fp['root_lengths']} "
                     f"K=[{fp['curv_min']:.6g},{fp['curv_max']:.6g}] hits={c['hits']} "
                     f"{c['status']} {','.join(c['matches'])}")
    return "\n".join(lines)


def _write_report(report: dict, args, slug: str):
    path = args.report_out
    if path is None and os.environ.get(REPORT_DIR_ENV):
        path = Path(os.environ[REPORT_DIR_ENV]) / f"{slug}.json"
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(dumps_report(report), encoding="utf-8")


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", text).strip("-")


# ---------------------------------------------------------------------------
# commands


def cmd_list(args, cat: Catalog) -> int:
    rows = list_rows(cat, args.filter or "")
    if args.format == "records":
        print(json.dumps(rows, indent=1, ensure_ascii=False))
    else:
        for r in rows:
            print(f"{r['entry']:18s} {r['status']:13s} {r['recipe']:22s} {r['label']}")
    return EXIT_PASS


def cmd_verify(args, cat: Catalog) -> int:
    if not (args.entry or args.space):
        raise UsageError("verify needs --entry or --space")
    pairs = select_instances(cat, args.entry, args.space)
    if args.convention:
        for e, inst in pairs:
            if e.status != "out-of-scope" and default_convention(SpaceId.parse(e.space_id(inst))) != args.convention:
                raise UsageError(f"{e.id} is tabulated in convention {default_convention(SpaceId.parse(e.space_id(inst)))}")
    results = [verify_entry(e, inst, args.seed, args.tol_defect, args.restarts) for e, inst in pairs]
    report = build_verify_report(cat, results, args.seed, args.tol_defect, args.restarts, args.timings)
    print(_fmt_table(report["records"]) if args.format == "table" else dumps_report(report), end="\n")
    _write_report(report, args, "verify-" + _slug(args.entry or args.space))
    return exit_code(report["records"])


def search_report(space: str, k: int, restarts: int | None, seed: int, convention: str | None = None,
                  catalog: Catalog | None = None) -> dict:
    sid = _parse_space(space)
    model = get_space(sid, convention)
    cfg = SearchConfig(k, restarts or default_restarts(model.dim_p), seed=seed)
    clusters = classify_clusters(model, find_lts(model, cfg), catalog, seed=seed)
    return {
        "report_format": REPORT_FORMAT,
        "tool_version": __version__,
        "command": "search",
        "space": str(sid),
        "convention": model.convention,
        "config": cfg.to_dict(),
        "clusters": [c.to_dict() for c in clusters],
        "unexpected": sum(c.status == "unexpected" for c in clusters),
    }


def cmd_search(args, cat: Catalog) -> int:
    if not args.space or args.k is None:
        raise UsageError("search needs --space and --k")
    report = search_report(args.space, args.k, args.restarts, args.seed, args.convention, cat)
    print(_search_table(report) if args.format == "table" else dumps_report(report), end="\n")
    _write_report(report, args, f"search-{_slug(args.space)}-k{args.k}-s{args.seed}")
    return EXIT_PASS


def cmd_spaces(args, cat: Catalog) -> int:
    for s in registry():
        print(s)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rank2geo", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--catalog", help="catalog file (default: packaged catalog)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("records", "table"), default="table")
        sp.add_argument("--report-out", type=Path, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--convention", choices=("srr1", "srr1star"), default=None)

    ls = sub.add_parser("list", help="list catalog entries")
    ls.add_argument("filter", nargs="?", default="")
    ls.add_argument("--format", choices=("records", "table"), default="table")
    ls.set_defaults(func=cmd_list)

    sub.add_parser("spaces", help="list registered spaces").set_defaults(func=cmd_spaces)

    ve = sub.add_parser("verify", help="verify catalog entries")
    common(ve)
    ve.add_argument("target", nargs="?", help="entry id or space id")
    ve.add_argument("--entry")
    ve.add_argument("--space")
    ve.add_argument("--restarts", type=int, default=None)
    ve.add_argument("--tol-defect", type=float, default=1e-8)
    ve.add_argument("--timings", action="store_true", help="add runtimes to the records")
    ve.set_defaults(func=cmd_verify)

    se = sub.add_parser("search", help="search for Lie triple systems")
    common(se)
    se.add_argument("target", nargs="?", help="space id")
    se.add_argument("--space")
    se.add_argument("--k", type=int)
    se.add_argument("--restarts", type=int, default=None)
    se.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    target = getattr(args, "target", None)
    if target:
        if "/" in target:
            args.entry = args.entry or target
        else:
            args.space = args.space or target
    try:
        cat = load_catalog(args.catalog)
        return args.func(args, cat)
    except (UsageError, SearchUnsupported, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Rank2GeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
