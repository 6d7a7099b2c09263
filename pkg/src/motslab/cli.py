"""Command-line front end: run scenarios into immutable run directories and report on them."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import stat
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import MotslabError, ScenarioError
from .scenario import Scenario, parse_scenario, with_overrides
from .surface import export_nodal_csv
from .tasks import RUNNERS

OUT_ENV = "MOTSLAB_OUT"
SUBCOMMANDS = {
    "validate-model": "validate_model",
    "check-identities": "check_identities",
    "find-mots": "find_mots",
    "find-cmc": "find_cmc",
    "stability": "stability",
    "foliate": "foliate",
    "brane": "brane",
    "mass": "mass",
}


@dataclass(frozen=True)
class RunRecord:
    run_dir: Path
    manifest: dict

    @property
    def passed(self) -> bool:
        return self.manifest["status"] == "passed"


def _clean(value):
    """JSON-safe copy: non-finite floats become strings, numpy scalars become Python numbers."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def _write_table(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else ("" if v is None else v) for v in row])


def _new_run_dir(root: Path, task: str) -> Path:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
    root.mkdir(parents=True, exist_ok=True)
    for n in range(1000):
        cand = root / (f"{task}-{stamp}" + (f"-{n}" if n else ""))
        try:
            cand.mkdir()
            return cand
        except FileExistsError:
            continue
    raise ScenarioError(f"could not create a fresh run directory under {root}")


def run(scen: Scenario, out_root=None) -> RunRecord:
    """Execute a scenario; the run directory holds manifest.json plus CSV tables."""
    root = Path(out_root or scen.output_dir or os.environ.get(OUT_ENV, "runs"))
    run_dir = _new_run_dir(root, scen.task)
    started = datetime.now(timezone.utc).isoformat()
    manifest = {"artifact": "motslab", "version": __version__, "scenario": scen.to_dict(), "started": started}
    files = []
    try:
        out = RUNNERS[scen.task](scen)
    except MotslabError as exc:
        manifest.update(status="failed", summary={}, invariants=[],
                        error={"module": exc.origin, "type": type(exc).__name__, "message": str(exc)})
    else:
        for name, (header, rows) in out.tables.items():
            path = run_dir / f"{name}.csv"
            _write_table(path, header, rows)
            files.append(path.name)
        for name, (mesh, fields) in out.nodal.items():
            if fields:
                files.append(export_nodal_csv(run_dir / f"{name}_nodal.csv", mesh, fields).name)
        checks = [c.to_dict() for c in out.checks]
        failed = any(c["hard"] and not c["passed"] for c in checks)
        manifest.update(status="failed" if failed else "passed", summary=out.summary, invariants=checks, error=None)
    manifest["files"] = files
    manifest["finished"] = datetime.now(timezone.utc).isoformat()
    manifest = _clean(manifest)
    mpath = run_dir / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for p in run_dir.iterdir():
        p.chmod(stat.S_IRUSR | stat.S_IRGRP | stat.S_IROTH)
    return RunRecord(run_dir, manifest)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    return str(v)


def render(manifest: dict) -> str:
    scen = manifest.get("scenario", {})
    lines = [
        f"task: {scen.get('task')}   model: {scen.get('model', {}).get('name')}   seed: {scen.get('seed')}",
        f"status: {manifest.get('status')}",
    ]
    if manifest.get("error"):
        err = manifest["error"]
        lines.append(f"error [{err['module']}] {err['type']}: {err['message']}")
    if manifest.get("summary"):
        lines.append("summary:")
        lines += [f"  {k}: {_fmt(v)}" for k, v in manifest["summary"].items()]
    if manifest.get("invariants"):
        lines.append("invariants:")
        for c in manifest["invariants"]:
            tag = "PASS" if c["passed"] else ("FAIL" if c["hard"] else "warn")
            lines.append(f"  [{tag}] {c['name']}: {_fmt(c['value'])} (tol {_fmt(c['tol'])})")
    return "\n".join(lines)


def report(run_dir) -> str:
    path = Path(run_dir) / "manifest.json"
    if not path.is_file():
        raise ScenarioError(f"no run manifest at {path}")
    return render(json.loads(path.read_text(encoding="utf-8")))


def _tol_pair(text):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(val)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"tolerance {key!r} is not a number: {val!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario TOML file")
    common.add_argument("--out", help=f"output root (default ${OUT_ENV} or ./runs)")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--tol", type=_tol_pair, action="append", default=[], metavar="KEY=VALUE",
                        help="override a tolerance; repeatable")
    parser = argparse.ArgumentParser(prog="motslab", description="Stability operators, MOTS and CMC surfaces at desk scale.")
    parser.add_argument("--version", action="version", version=f"motslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {SUBCOMMANDS[name]} task")
    rep = sub.add_parser("report", help="summarize an existing run directory")
    rep.add_argument("run_dir")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            print(report(args.run_dir))
            return 0
        scen = parse_scenario(args.scenario, task=SUBCOMMANDS[args.command])
        scen = with_overrides(scen, seed=args.seed, tolerances=dict(args.tol))
        record = run(scen, args.out)
    except MotslabError as exc:
        print(f"error [{exc.origin}] {exc}", file=sys.stderr)
        return 2
    print(render(record.manifest))
    print(f"run directory: {record.run_dir}")
    return 0 if record.passed else 1


if __name__ == "__main__":
    sys.exit(main())
