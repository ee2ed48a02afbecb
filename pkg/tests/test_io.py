import json

import numpy as np
import pytest

from veesys import catalogue, io, parse_document
from veesys.errors import DocumentFormatError


def test_round_trip_bit_identical(tmp_path):
    config = catalogue.construct("G3", {"t": 1.7})
    path = tmp_path / "g3.json"
    io.save_document(config, path, parameters={"t": 1.7})
    loaded = io.load_document(path)
    assert loaded.labels == config.labels
    # bit-identical, not merely close
    assert (loaded.matrix == config.matrix).all()


def test_round_trip_awkward_floats(tmp_path):
    matrix = np.array(
        [[0.1, 1e-8, 2.0], [3.0, 0.2 + 0.1, 1 / 3], [123456.789, 1.0, -0.0001]]
    )
    config = parse_document(io.format_document(
        __import__("veesys").CovectorConfiguration(matrix)
    ))
    assert (config.matrix == matrix).all()


def test_document_fields():
    doc = json.loads(io.format_document(catalogue.construct("H3", {})))
    assert doc["format"] == io.FORMAT
    assert doc["dimension"] == 3
    assert len(doc["covectors"]) == 15
    assert all(isinstance(x, str) for col in doc["covectors"] for x in col)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("{", "not valid JSON"),
        ("[]", "JSON object"),
        ('{"format": "other/1"}', "format"),
        ('{"dimension": "three"}', "dimension"),
        ('{"dimension": 3, "covectors": []}', "covectors"),
        ('{"dimension": 3, "covectors": [["1", "0"]]}', "covectors[0]"),
        (
            '{"dimension": 2, "covectors": [["1", "x"], ["0", "1"]]}',
            "covectors[0][1]",
        ),
        (
            '{"dimension": 2, "covectors": [["1", "0"], ["0", "1"]], "labels": [1, 2]}',
            "labels",
        ),
        (
            '{"dimension": 2, "covectors": [["1", "0"], ["2", "0"]]}',
            "invalid configuration",
        ),
    ],
)
def test_parse_diagnostics(text, fragment):
    with pytest.raises(DocumentFormatError) as info:
        parse_document(text)
    assert fragment in str(info.value)


def test_load_missing_file():
    with pytest.raises(DocumentFormatError, match="cannot read"):
        io.load_document("/nonexistent/nowhere.json")
