# tests/test_extension_loader.py

import json

import pytest

from modules.catalog import build
from modules.errors import ParseError, ValidationError
from modules.extension_loader import (ExtensionLoader, extension_document, parse_extension,
                                      parse_idempotent, serialize_extension, serialize_idempotent)

TRUNCATED_F2 = {
    "name": "dual-numbers",
    "field": {"kind": "prime", "p": 2},
    "algebra": {"dim": 2, "unit": [1, 0], "mul": [[0, 0, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1]]},
    "subalgebra": {"basis": [[1, 0]]},
}


def _document(**changes):
    doc = json.loads(json.dumps(TRUNCATED_F2))
    doc.update(changes)
    return json.dumps(doc)


def test_parse_minimal_document():
    ext = parse_extension(_document())
    assert ext.name == "dual-numbers"
    assert (ext.A.dim, ext.B.dim) == (2, 1)
    assert ext.field.label == "F_2"
    assert ext.field.is_zero(ext.A.power(ext.A.basis_vector(1), 2))


def test_rational_coefficients():
    doc = {
        "field": {"kind": "rational"},
        "algebra": {"dim": 2, "unit": ["1", "0"], "mul": [[0, 0, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1],
                                                          [1, 1, 0, "-1/4"]]},
        "subalgebra": {"basis": [[1, 0]]},
    }
    ext = parse_extension(json.dumps(doc), name="sqrt")
    square = ext.A.power(ext.A.basis_vector(1), 2)
    assert [ext.field.format(c) for c in square] == ["-1/4", "0"]
    assert ext.name == "sqrt"


def test_serialized_catalog_entry_parses_back():
    ext = build("m2diag-q")
    again = parse_extension(serialize_extension(ext))
    assert ext.field.equal(again.A.mul_table, ext.A.mul_table)
    assert ext.field.equal(again.B.basis, ext.B.basis)
    assert extension_document(again) == extension_document(ext)


def test_malformed_json_reports_the_line():
    with pytest.raises(ParseError) as info:
        parse_extension('{\n  "field": \n}')
    assert info.value.line == 3


@pytest.mark.parametrize("changes, field", [
    ({"field": {"kind": "prime", "p": 4}}, "field.p"),
    ({"field": {"kind": "octonion"}}, "field.kind"),
    ({"subalgebra": {"basis": [[1]]}}, "subalgebra.basis[0]"),
    ({"algebra": {"dim": 2, "unit": [1, 0], "mul": [[0, 0, 5, 1]]}}, "algebra.mul[0]"),
    ({"algebra": {"dim": 2, "unit": [1, 0], "mul": [[0, 0, 0, "x"]]}}, "algebra.mul[0]"),
])
def test_parse_errors_name_the_field(changes, field):
    with pytest.raises(ParseError) as info:
        parse_extension(_document(**changes))
    assert info.value.field == field


def test_missing_section():
    doc = dict(TRUNCATED_F2)
    del doc["subalgebra"]
    with pytest.raises(ParseError):
        parse_extension(json.dumps(doc))


def test_invalid_algebras_are_validation_errors():
    with pytest.raises(ValidationError):
        parse_extension(_document(algebra={"dim": 2, "unit": [1, 0], "mul": [[0, 0, 0, 1]]}))
    with pytest.raises(ValidationError):
        parse_extension(_document(subalgebra={"basis": [[0, 1]]}))


def test_idempotent_documents(m2diag):
    f = m2diag.field
    text = json.dumps({"k": 2, "entries": [[[1, 0, 0, 0], [0, 0, 0, 0]], [[0, 0, 0, 0], [1, 0, 0, 1]]]})
    k, E = parse_idempotent(text, m2diag)
    assert k == 2
    assert f.equal(E[1, 1], m2diag.B.induced.unit)
    assert parse_idempotent(serialize_idempotent(m2diag, E), m2diag)[0] == 2
    outside = json.dumps({"k": 1, "entries": [[[0, 1, 0, 0]]]})
    with pytest.raises(ParseError):
        parse_idempotent(outside, m2diag)


def test_loader_skips_broken_files(tmp_path):
    (tmp_path / "good.json").write_text(_document(), encoding="utf-8")
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")
    loaded = ExtensionLoader(str(tmp_path)).load_all()
    assert [ext.name for ext in loaded] == ["dual-numbers"]
    assert ExtensionLoader(str(tmp_path / "missing")).load_all() == []
    with pytest.raises(ParseError):
        ExtensionLoader().load_files([tmp_path / "broken.json"])
