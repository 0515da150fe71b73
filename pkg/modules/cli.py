# modules/cli.py
# Command surface: classify, transport, demo counterexample, catalog

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from modules.algebra import Extension
from modules.catalog import CATALOG, build, counterexample_entry, get_entry
from modules.errors import MorextError
from modules.export_manager import ExportManager, render_text, to_json
from modules.extension_classifier import CLASS_NAMES, HOLDS, ExtensionClassifier, check_power_range, verify_certificate
from modules.extension_loader import ExtensionLoader, parse_idempotent, serialize_extension
from modules.morita import (RECOMPUTED, TRANSPORTABLE, InvarianceAnalyzer, power_counterexample,
                            progenerator_free, progenerator_from_idempotent, transport_extension,
                            witness_candidates)
from modules.settings import WorkbenchSettings

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morext", description="Exact workbench for ring extensions and Morita transport")
    parser.add_argument("--verbose", action="store_true", help="log debug output to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="emit the machine-readable report")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--power-max", type=int, default=None)
        p.add_argument("--power-samples", type=int, default=None)
        p.add_argument("--trivial-budget", type=int, default=None,
                       help="most points enumerated by the trivial-complement and power searches")
        p.add_argument("--output-dir", default=None, help="also write JSON and text reports into this directory")
        p.add_argument("--excel", default=None, metavar="PATH", help="also write the report tables to a workbook")
        p.add_argument("--timing", action="store_true", help="add wall time per check")

    classify = sub.add_parser("classify", help="decide every class of A/B")
    classify.add_argument("sources", nargs="+", help="extension files, directories or catalog names")
    classify.add_argument("--classes", default=None, help="comma-separated subset of " + ",".join(CLASS_NAMES))
    common(classify)

    transport = sub.add_parser("transport", help="build A'/B' and carry certificates across")
    transport.add_argument("source", help="extension file or catalog name")
    group = transport.add_mutually_exclusive_group(required=True)
    group.add_argument("--free", type=int, metavar="N", help="use N = B^n")
    group.add_argument("--idempotent", metavar="FILE", help="use N = B^k E for the idempotent in FILE")
    transport.add_argument("--verify-invariance", action="store_true",
                           help="exit 1 when a transported certificate fails to verify")
    transport.add_argument("--lemmas", action="store_true", help="add the invariance suite to the report")
    common(transport)

    demo = sub.add_parser("demo", help="worked examples")
    demo.add_argument("example", choices=["counterexample"])
    demo.add_argument("--p", type=int, default=2)
    common(demo)

    catalog = sub.add_parser("catalog", help="list or emit built-in extensions")
    catalog.add_argument("name", nargs="?")
    catalog.add_argument("--emit", action="store_true", help="print the extension document")
    return parser


def configure_logging(verbose: bool):
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def settings_from(args) -> WorkbenchSettings:
    return WorkbenchSettings.from_env().override(
        seed=getattr(args, "seed", None),
        power_max=getattr(args, "power_max", None),
        power_samples=getattr(args, "power_samples", None),
        trivial_budget=getattr(args, "trivial_budget", None),
        output_dir=getattr(args, "output_dir", None),
    )


def resolve_sources(sources: Sequence[str]) -> List[Extension]:
    """Files, directories (every *.json inside) and catalog names, in order"""
    loader = ExtensionLoader()
    extensions: List[Extension] = []
    for source in sources:
        path = Path(source)
        if path.is_dir():
            extensions.extend(ExtensionLoader(str(path)).load_all())
        elif path.exists():
            extensions.extend(loader.load_files([path]))
        elif source in CATALOG:
            extensions.append(build(source))
        else:
            raise UsageError(f"no such file or catalog entry: {source}")
    return extensions


def _parse_classes(raw: Optional[str]) -> Optional[List[str]]:
    if not raw:
        return None
    names = [c.strip() for c in raw.split(",") if c.strip()]
    unknown = [c for c in names if c not in CLASS_NAMES]
    if unknown:
        raise UsageError(f"unknown classes: {', '.join(unknown)}")
    return names


def run_classify(args, settings: WorkbenchSettings) -> Dict[str, Any]:
    classes = _parse_classes(args.classes)
    reports = []
    for ext in resolve_sources(args.sources):
        report = ExtensionClassifier(ext, settings).classify(classes, timing=args.timing)
        reports.append(report.to_dict())
    return {"reports": reports}


def _progenerator(args, ext: Extension):
    if args.free is not None:
        if args.free < 1:
            raise UsageError("--free needs a positive rank")
        return progenerator_free(ext.B.induced, args.free)
    k, E = parse_idempotent(Path(args.idempotent).read_text(encoding="utf-8"), ext)
    prog = progenerator_from_idempotent(ext.B.induced, k, E)
    if prog is None:
        raise MorextError("idempotent does not define a progenerator")
    return prog


def run_transport(args, settings: WorkbenchSettings) -> Dict[str, Any]:
    exts = resolve_sources([args.source])
    if len(exts) != 1:
        raise UsageError("transport takes exactly one extension")
    ext = exts[0]
    te = transport_extension(ext, _progenerator(args, ext))
    source_report = ExtensionClassifier(ext, settings).classify(timing=args.timing)
    target_report = ExtensionClassifier(te.ext_prime, settings).classify(TRANSPORTABLE + RECOMPUTED)
    rows = []
    for name in TRANSPORTABLE + RECOMPUTED:
        src = source_report.outcomes[name]
        if name in TRANSPORTABLE and src == HOLDS:
            moved = te.transport_certificate(source_report.certificates[name])
            rows.append({"class": name, "status": "transported", "verified": verify_certificate(te.ext_prime, moved)})
        elif name in RECOMPUTED:
            dst = target_report.outcomes[name]
            rows.append({"class": name, "status": f"recomputed: {src} -> {dst}", "verified": None})
    power_source = source_report.certificates.get("power")
    power_target = check_power_range(te.ext_prime, settings.power_max, settings.power_samples, settings.seed,
                                     witness_candidates(te), settings.trivial_budget)
    f = ext.field
    transport = {
        "progenerator": te.prog.name,
        "dim_Aprime": te.Aprime.dim,
        "dim_Bprime": te.Bprime.dim,
        "certificates": rows,
        "power": {
            "source": power_source.payload(f) if power_source else {"status": source_report.outcomes.get("power")},
            "target": {**power_target.payload(f), "transferred": False},
        },
    }
    if args.lemmas:
        transport["invariance"] = InvarianceAnalyzer(te, settings).run_all(certificates=False)
    return {"reports": [source_report.to_dict()], "transport": transport}


def run_demo(args, settings: WorkbenchSettings) -> Dict[str, Any]:
    name = counterexample_entry(args.p)
    ext = build(name)
    result = power_counterexample(ext, args.p, settings, max_power=settings.power_max)
    f = ext.field
    te = result["transported"]
    target = result["target"]
    return {"demo": {
        "p": args.p,
        "n": args.p,
        "source": {"name": name, "status": result["source"].status, "method": result["source"].method},
        "target": {"name": te.ext_prime.name, "status": target.status,
                   "counterexample": [f.format(c) for c in result["witness"]]},
        "witness_powers": {str(k): v for k, v in result["witness_powers"].items()},
    }}


def run_catalog(args) -> Any:
    if args.name:
        entry = get_entry(args.name)
        ext = entry.build()
        if args.emit:
            return serialize_extension(ext)
        return {"catalog": [_catalog_row(entry.name, entry.description, ext)]}
    return {"catalog": [_catalog_row(e.name, e.description, e.build()) for e in CATALOG.values()]}


def _catalog_row(name: str, description: str, ext: Extension) -> Dict[str, Any]:
    return {"name": name, "description": description, "field": ext.field.label,
            "dim_A": ext.A.dim, "dim_B": ext.B.dim}


def emit(payload: Any, as_json: bool, out) -> None:
    if isinstance(payload, str):
        out.write(payload if payload.endswith("\n") else payload + "\n")
    elif as_json:
        out.write(to_json(payload) + "\n")
    else:
        out.write(render_text(payload))


def run_command(argv: Optional[Sequence[str]] = None, out=None) -> int:
    """Parse argv, dispatch, write the report to out; returns the exit status"""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    configure_logging(args.verbose)
    try:
        settings = settings_from(args)
        if args.command == "classify":
            payload = run_classify(args, settings)
        elif args.command == "transport":
            payload = run_transport(args, settings)
        elif args.command == "demo":
            payload = run_demo(args, settings)
        else:
            payload = run_catalog(args)
    except UsageError as exc:
        logger.error("❌ %s", exc)
        return EXIT_USAGE
    except (MorextError, OSError) as exc:
        logger.error("❌ %s", exc)
        return EXIT_FAILURE
    emit(payload, getattr(args, "json", False), out)
    if isinstance(payload, dict) and getattr(args, "output_dir", None):
        exporter = ExportManager(args.output_dir)
        exporter.export_json(payload)
        exporter.export_text(payload)
    if isinstance(payload, dict) and getattr(args, "excel", None):
        ExportManager(settings.output_dir).export_excel(payload, args.excel)
    if args.command == "transport" and args.verify_invariance:
        failed = [row["class"] for row in payload["transport"]["certificates"]
                  if row["status"] == "transported" and not row["verified"]]
        failed += [row["check"] for row in payload["transport"].get("invariance", []) if row["holds"] is False]
        if failed:
            logger.error("❌ invariance failed for %s", ", ".join(failed))
            return EXIT_FAILURE
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())
