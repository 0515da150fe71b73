# modules/export_manager.py
# Export of classification and transport reports

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

logger = logging.getLogger(__name__)


def to_json(payload: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent"""
    return json.dumps(payload, indent=2, sort_keys=True, default=str)


def outcome_frame(reports: List[Dict[str, Any]]) -> pd.DataFrame:
    rows = []
    for report in reports:
        for cls, row in report.get("classes", {}).items():
            rows.append({"extension": report["name"], "class": cls, "outcome": row["outcome"],
                         "verified": row.get("verified")})
    return pd.DataFrame(rows, columns=["extension", "class", "outcome", "verified"])


def dimension_frame(reports: List[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame([{"extension": r["name"], "field": r["field"], **r.get("dimensions", {})} for r in reports])


def render_text(payload: Dict[str, Any]) -> str:
    """Human-readable rendering of a classify or transport payload"""
    lines: List[str] = []
    for report in payload.get("reports", []):
        lines.append(f"== {report['name']} over {report['field']} ==")
        frame = outcome_frame([report]).drop(columns=["extension"])
        lines.append(frame.to_string(index=False))
        dims = report.get("dimensions", {})
        if dims:
            lines.append("dimensions: " + ", ".join(f"{k}={v}" for k, v in dims.items()))
        broken = [k for k, ok in report.get("implications", {}).items() if not ok]
        lines.append("implications: " + ("consistent" if not broken else "violated " + ", ".join(broken)))
        if "timing" in report:
            lines.append("timing: " + ", ".join(f"{k}={v:.4f}s" for k, v in report["timing"].items()))
        lines.append("")
    transport = payload.get("transport")
    if transport:
        lines.append(f"== transport along {transport['progenerator']} ==")
        lines.append(f"dim A' = {transport['dim_Aprime']}, dim B' = {transport['dim_Bprime']}")
        for row in transport.get("certificates", []):
            mark = "·" if row["verified"] is None else ("✅" if row["verified"] else "❌")
            lines.append(f"{mark} {row['class']}: {row['status']}")
        for name, row in transport.get("power", {}).items():
            lines.append(f"power {name}: {row['status']}" + (f" witness {row['counterexample']}" if row.get("counterexample") else ""))
        if transport.get("invariance"):
            frame = pd.DataFrame(transport["invariance"], columns=["check", "source", "target", "holds"])
            lines.append(frame.to_string(index=False))
        lines.append("")
    demo = payload.get("demo")
    if demo:
        lines.append(f"== power property counterexample, p = {demo['p']} ==")
        lines.append(f"source {demo['source']['name']}: x^{demo['n']} in B {demo['source']['status']}")
        lines.append(f"target {demo['target']['name']}: {demo['target']['status']}, witness {demo['target']['counterexample']}")
        for n, escapes in demo.get("witness_powers", {}).items():
            lines.append(f"  w^{n} = w and w^{n} not in B': {escapes}")
    catalog = payload.get("catalog")
    if catalog:
        lines.append(pd.DataFrame(catalog).to_string(index=False))
    return "\n".join(lines).rstrip() + "\n"


class ExportManager:
    """Writes reports as JSON, text and Excel workbooks"""

    def __init__(self, output_dir: str = "./output"):
        self.output_dir = Path(output_dir)

    def _target(self, filename: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / filename

    def export_json(self, payload: Dict[str, Any], filename: str = "morext_report.json") -> str:
        filepath = self._target(filename)
        filepath.write_text(to_json(payload) + "\n", encoding="utf-8")
        logger.info("✅ Wrote %s", filepath)
        return str(filepath)

    def export_text(self, payload: Dict[str, Any], filename: str = "morext_report.txt") -> str:
        filepath = self._target(filename)
        filepath.write_text(render_text(payload), encoding="utf-8")
        logger.info("✅ Wrote %s", filepath)
        return str(filepath)

    def export_excel(self, payload: Dict[str, Any], filepath: Optional[str] = None) -> str:
        """Workbook with one sheet per report table"""
        path = Path(filepath) if filepath else self._target("morext_report.xlsx")
        path.parent.mkdir(parents=True, exist_ok=True)
        reports = payload.get("reports", [])
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            outcome_frame(reports).to_excel(writer, sheet_name="Classes", index=False)
            dimension_frame(reports).to_excel(writer, sheet_name="Dimensions", index=False)
            transport = payload.get("transport") or {}
            if transport.get("certificates"):
                pd.DataFrame(transport["certificates"]).to_excel(writer, sheet_name="Transport", index=False)
            if transport.get("invariance"):
                pd.DataFrame(transport["invariance"]).to_excel(writer, sheet_name="Invariance", index=False)
        logger.info("✅ Wrote %s", path)
        return str(path)
