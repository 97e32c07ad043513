import json
import math

import numpy as np
import pytest

from sketchuq import io
from sketchuq.errors import ParseError


def test_read_matrix_and_vector(tmp_path):
    x = tmp_path / "x.csv"
    x.write_text("a,b\n1,0\n0,1\n\n0,0\n")
    X = io.read_matrix_csv(x, header=True)
    assert np.array_equal(X, [[1, 0], [0, 1], [0, 0]])
    y = tmp_path / "y.csv"
    y.write_text("1\n2\n3\n")
    assert np.array_equal(io.read_vector_csv(y), [1, 2, 3])


@pytest.mark.parametrize(
    "text,where",
    [("1,0\n0,x\n", "row 2, column 2"), ("1,0\n0\n", "row 2"), ("1,nan\n", "row 1, column 2"), ("", "no data")],
)
def test_matrix_parse_errors(tmp_path, text, where):
    f = tmp_path / "bad.csv"
    f.write_text(text)
    with pytest.raises(ParseError) as info:
        io.read_matrix_csv(f)
    assert where in str(info.value)
    assert info.value.exit_code == 3


def test_vector_must_be_single_column(tmp_path):
    f = tmp_path / "y.csv"
    f.write_text("1,2\n")
    with pytest.raises(ParseError):
        io.read_vector_csv(f)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        io.read_matrix_csv(tmp_path / "nope.csv")


def test_jsonable_encoding():
    out = json.loads(io.dumps({"m": np.eye(2), "v": np.array([1.0, math.inf]), "b": np.bool_(True), "n": math.nan}))
    assert out["m"] == {"shape": [2, 2], "data": [[1.0, 0.0], [0.0, 1.0]]}
    assert out["v"] == [1.0, "Infinity"]
    assert out["b"] is True and out["n"] == "NaN"
