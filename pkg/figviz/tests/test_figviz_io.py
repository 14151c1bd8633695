"""Table reading and atomic writing."""

import numpy as np
import pytest

from figviz import DataError, atomic_write, read_table


def test_read_table_golden(golden):
    table = read_table(golden / "bm_paths.csv", ("path_id", "step", "t", "x"))
    assert set(table) == {"path_id", "step", "t", "x"}
    assert table["path_id"].dtype == np.float64
    assert table["t"].size == 5 * 51
    assert np.unique(table["path_id"]).size == 5


def test_read_table_missing_file(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        read_table(tmp_path / "absent.csv", ("a",))


def test_read_table_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(DataError, match="is empty"):
        read_table(path, ("a", "b"))


def test_read_table_header_only(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("a,b\n")
    with pytest.raises(DataError, match="no data rows"):
        read_table(path, ("a", "b"))


def test_read_table_wrong_header(tmp_path):
    path = tmp_path / "wrong.csv"
    path.write_text("a,c\n1,2\n")
    with pytest.raises(DataError, match="has columns a,c, expected a,b"):
        read_table(path, ("a", "b"))


def test_read_table_non_numeric(tmp_path):
    path = tmp_path / "text.csv"
    path.write_text("a,b\n1,two\n")
    with pytest.raises(DataError, match="non-numeric"):
        read_table(path, ("a", "b"))


def test_read_table_ragged_row(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(DataError):
        read_table(path, ("a", "b"))


def test_atomic_write_and_overwrite(tmp_path):
    out = tmp_path / "art.png"
    atomic_write(out, b"first")
    assert out.read_bytes() == b"first"
    atomic_write(out, b"second")
    assert out.read_bytes() == b"second"
    # no temporary droppings survive
    assert [p.name for p in tmp_path.iterdir()] == ["art.png"]


def test_atomic_write_missing_directory(tmp_path):
    with pytest.raises(OSError):
        atomic_write(tmp_path / "nowhere" / "art.png", b"payload")
