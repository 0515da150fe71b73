# modules/extension_loader.py
# Handles loading, parsing and serializing extension files

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from modules.algebra import Algebra, Extension, SubalgebraEmbedding
from modules.errors import MorextError, ParseError, ValidationError
from modules.exact_linalg import FieldSpec

logger = logging.getLogger(__name__)


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", line=exc.lineno) from exc


def _require(doc: Dict[str, Any], key: str, kind, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"missing key {key!r}", field=where or key)
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(f"{key!r} has the wrong type", field=f"{where}.{key}" if where else key)
    return value


def parse_field(doc: Dict[str, Any]) -> FieldSpec:
    kind = _require(doc, "kind", str, "field")
    if kind == "rational":
        return FieldSpec.rational()
    if kind == "prime":
        p = _require(doc, "p", int, "field")
        try:
            return FieldSpec.prime(p)
        except MorextError as exc:
            raise ParseError(str(exc), field="field.p") from exc
    raise ParseError(f"unknown field kind {kind!r}", field="field.kind")


def _coefficients(field: FieldSpec, values, length: int, where: str) -> np.ndarray:
    if not isinstance(values, list) or len(values) != length:
        raise ParseError(f"expected {length} coefficients", field=where)
    try:
        return field.array([field.parse(v) for v in values])
    except ParseError as exc:
        raise ParseError(str(exc), field=where) from exc


def parse_document(doc: Dict[str, Any], name: Optional[str] = None) -> Extension:
    """Extension from an already decoded document"""
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    field = parse_field(_require(doc, "field", dict, ""))
    algebra = _require(doc, "algebra", dict, "")
    d = _require(algebra, "dim", int, "algebra")
    if d < 1:
        raise ParseError("dimension must be positive", field="algebra.dim")
    unit = _coefficients(field, _require(algebra, "unit", list, "algebra"), d, "algebra.unit")
    table = field.zeros((d, d, d))
    for pos, triple in enumerate(_require(algebra, "mul", list, "algebra")):
        where = f"algebra.mul[{pos}]"
        if not isinstance(triple, list) or len(triple) != 4:
            raise ParseError("expected [i, j, k, coeff]", field=where)
        i, j, k, coeff = triple
        if not all(isinstance(x, int) and 0 <= x < d for x in (i, j, k)):
            raise ParseError(f"index out of range 0..{d - 1}", field=where)
        try:
            table[i, j, k] = field.add(table[i, j, k], field.parse(coeff))
        except ParseError as exc:
            raise ParseError(str(exc), field=where) from exc
    subalgebra = _require(doc, "subalgebra", dict, "")
    vectors = [_coefficients(field, v, d, f"subalgebra.basis[{pos}]")
               for pos, v in enumerate(_require(subalgebra, "basis", list, "subalgebra"))]
    label = doc.get("name", name)
    try:
        A = Algebra(field, table, unit, name=label)
        B = SubalgebraEmbedding(A, np.vstack(vectors) if vectors else field.zeros((0, d)))
    except ParseError:
        raise
    except MorextError as exc:
        raise ValidationError(f"{label or 'extension'}: {exc}") from exc
    return Extension(A, B, name=label)


def parse_extension(text: str, name: Optional[str] = None) -> Extension:
    """Extension from the JSON document grammar"""
    return parse_document(_load_json(text, name or "<input>"), name=name)


def extension_document(ext: Extension) -> Dict[str, Any]:
    f, A = ext.field, ext.A
    field_doc = {"kind": "prime", "p": f.p} if f.is_prime else {"kind": "rational"}
    mul = [[int(i), int(j), int(k), f.format(A.mul_table[i, j, k])]
           for i, j, k in zip(*np.nonzero(A.mul_table != 0))]
    doc: Dict[str, Any] = {}
    if ext.name:
        doc["name"] = ext.name
    doc["field"] = field_doc
    doc["algebra"] = {"dim": A.dim, "unit": [f.format(c) for c in A.unit], "mul": mul}
    doc["subalgebra"] = {"basis": [[f.format(c) for c in row] for row in ext.B.basis]}
    return doc


def serialize_extension(ext: Extension) -> str:
    return json.dumps(extension_document(ext), indent=2)


def parse_idempotent(text: str, ext: Extension) -> Tuple[int, np.ndarray]:
    """(k, E) with E of shape (k, k, dim B) from {"k": k, "entries": [[A-vectors]]}"""
    doc = _load_json(text, "<idempotent>")
    f, d = ext.field, ext.A.dim
    k = _require(doc, "k", int, "")
    rows = _require(doc, "entries", list, "")
    if k < 1 or len(rows) != k or any(not isinstance(r, list) or len(r) != k for r in rows):
        raise ParseError(f"entries must be a {k}x{k} array", field="entries")
    E = f.zeros((k, k, ext.B.dim))
    for s in range(k):
        for t in range(k):
            where = f"entries[{s}][{t}]"
            coords = ext.B.coordinates(_coefficients(f, rows[s][t], d, where))
            if coords is None:
                raise ParseError("entry does not lie in the subalgebra", field=where)
            E[s, t] = coords
    return k, E


def serialize_idempotent(ext: Extension, E: np.ndarray) -> str:
    f, k = ext.field, E.shape[0]
    entries = [[[f.format(c) for c in ext.B.include(E[s, t])] for t in range(k)] for s in range(k)]
    return json.dumps({"k": k, "entries": entries}, indent=2)


class ExtensionLoader:
    """Loads extension files from a directory or a list of paths"""

    def __init__(self, directory: Optional[str] = None):
        self.directory = directory

    def load_all(self) -> List[Extension]:
        """Load every *.json file of the directory, skipping broken ones"""
        if not self.directory:
            return []
        path = Path(self.directory)
        if not path.is_dir():
            logger.error("❌ Directory not found: %s", path)
            return []
        files = sorted(path.glob("*.json"))
        logger.info("✅ Found %d extension files", len(files))
        return self.load_files(files, tolerant=True)

    def load_files(self, paths, tolerant: bool = False) -> List[Extension]:
        extensions = []
        for path in paths:
            path = Path(path)
            try:
                extensions.append(self.parse_file(path))
                logger.info("✅ Loaded: %s", path.name)
            except (MorextError, OSError) as exc:
                logger.error("❌ Error parsing %s: %s", path.name, exc)
                if not tolerant:
                    raise
        return extensions

    def parse_file(self, filepath) -> Extension:
        path = Path(filepath)
        text = path.read_text(encoding="utf-8")
        return parse_extension(text, name=path.stem)
