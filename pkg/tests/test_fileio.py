import json
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_array_equal

from smwpinv.errors import ParseError
from smwpinv.fileio import (
    MANIFEST_SCHEMA,
    REPORT_SCHEMA,
    BundleManifest,
    RunReport,
    read_bundle,
    read_document,
    read_mtx,
    write_bundle,
    write_mtx,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.tuples(st.integers(1, 5), st.integers(0, 5)), st.data())
def test_round_trip_is_bit_exact(shape, data):
    re = data.draw(arrays(np.float64, shape, elements=finite))
    im = data.draw(arrays(np.float64, shape, elements=finite))
    a = re + 1j * im
    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "a.mtx"
        write_mtx(path, a)
        b = read_mtx(path)
    assert b.shape == a.shape
    assert b.tobytes() == a.tobytes()


def test_header_and_layout(tmp_path):
    path = tmp_path / "a.mtx"
    write_mtx(path, np.array([[1, 2j], [3, 4]]), comment="two\nlines")
    lines = path.read_text().splitlines()
    assert lines[0] == "%%MatrixMarket matrix array complex general"
    assert lines[1:3] == ["% two", "% lines"]
    assert lines[3] == "2 2"
    # column-major
    assert lines[4:] == ["1 0", "3 0", "0 2", "4 0"]


def test_zero_columns(tmp_path):
    path = tmp_path / "u.mtx"
    write_mtx(path, np.zeros((3, 0)))
    assert read_mtx(path).shape == (3, 0)


def _write(tmp_path, text):
    path = tmp_path / "m.mtx"
    path.write_text(text)
    return path


class TestReaderFormats:
    def test_real_promoted(self, tmp_path):
        p = _write(tmp_path, "%%MatrixMarket matrix array real general\n2 1\n1.5\n-2\n")
        a = read_mtx(p)
        assert a.dtype == np.complex128
        assert_array_equal(a, [[1.5], [-2]])

    def test_integer_symmetric(self, tmp_path):
        p = _write(tmp_path, "%%MatrixMarket matrix array integer symmetric\n"
                             "2 2\n1\n2\n3\n")
        assert_array_equal(read_mtx(p), [[1, 2], [2, 3]])

    def test_skew(self, tmp_path):
        p = _write(tmp_path, "%%MatrixMarket matrix array real skew-symmetric\n"
                             "2 2\n5\n")
        assert_array_equal(read_mtx(p), [[0, -5], [5, 0]])

    def test_coordinate_hermitian(self, tmp_path):
        p = _write(tmp_path, "%%MatrixMarket matrix coordinate complex hermitian\n"
                             "% comment\n2 2 2\n1 1 1 0\n2 1 0 1\n")
        assert_array_equal(read_mtx(p), [[1, -1j], [1j, 0]])

    def test_coordinate_pattern(self, tmp_path):
        p = _write(tmp_path, "%%MatrixMarket matrix coordinate pattern general\n"
                             "2 3 1\n2 3\n")
        a = read_mtx(p)
        assert a.shape == (2, 3) and a[1, 2] == 1 and a.sum() == 1

    def test_case_insensitive_header(self, tmp_path):
        p = _write(tmp_path, "%%MatrixMarket MATRIX Array Real General\n1 1\n7\n")
        assert read_mtx(p)[0, 0] == 7


class TestParseErrors:
    @pytest.mark.parametrize("text, line, fragment", [
        ("", 1, "empty"),
        ("hello\n", 1, "header"),
        ("%%MatrixMarket vector array real general\n", 1, "object"),
        ("%%MatrixMarket matrix array pattern general\n", 1, "field"),
        ("%%MatrixMarket matrix array real hermitian\n", 1, "hermitian"),
        ("%%MatrixMarket matrix array real general\n%only comments\n", 2, "size"),
        ("%%MatrixMarket matrix array real general\n2 x\n", 2, "integers"),
        ("%%MatrixMarket matrix array real symmetric\n2 3\n", 2, "square"),
        ("%%MatrixMarket matrix array real general\n2 1\n1\nabc\n", 4, "number"),
        ("%%MatrixMarket matrix array real general\n2 1\n1\n", 3, "expected 2"),
        ("%%MatrixMarket matrix array complex general\n1 1\n1\n", 3, "fields"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n", 3, "outside"),
        ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n", 3,
         "expected 2 entries"),
    ])
    def test_line_numbers(self, tmp_path, text, line, fragment):
        p = _write(tmp_path, text)
        with pytest.raises(ParseError) as info:
            read_mtx(p)
        assert info.value.line == line
        assert fragment in str(info.value)
        assert str(info.value).startswith(f"{p}:{line}:")

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_mtx(tmp_path / "nope.mtx")


def test_bundle_round_trip(tmp_path):
    mats = {"a": np.eye(2) * (1 + 1j), "u": np.ones((2, 1)), "v": np.zeros((2, 1))}
    written = write_bundle(tmp_path / "b", mats, "thm32", {"m": 2}, {"verdict_thm32": True})
    manifest, loaded = read_bundle(tmp_path / "b")
    assert manifest == written
    assert manifest.shapes == {"a": [2, 2], "u": [2, 1], "v": [2, 1]}
    for k in mats:
        assert_array_equal(loaded[k], mats[k])
    raw = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert raw["schema"] == MANIFEST_SCHEMA


def test_report_round_trip(tmp_path):
    report = RunReport(command="update", inputs=[{"path": "a.mtx", "shape": [2, 2]}],
                       verdict="valid", tol=1e-10, penrose_residuals=[0.0] * 4,
                       timings={"update_s": 0.1}, details={"x": 1})
    text = report.to_json()
    assert json.loads(text)["schema"] == REPORT_SCHEMA
    assert read_document(text) == report
    path = tmp_path / "r.json"
    path.write_text(text)
    assert read_document(path) == report
    assert read_document(str(path)) == report


def test_unknown_schema():
    with pytest.raises(ValueError, match="schema"):
        read_document('{"schema": "other"}')


def test_manifest_from_dict_defaults():
    m = BundleManifest.from_dict({"regime": "xny", "spec": {}, "files": {}, "shapes": {}})
    assert m.expected == {}
