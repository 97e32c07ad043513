import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sketchuq import DesignData, SchemeKind, SketchDraw, SketchScheme, apply_sketch, draw_sketch
from sketchuq.errors import InvalidInput, InvalidSketchDim

from conftest import FIXTURE_X


def test_unif_frequencies():
    # r <= n is enforced, so the 1e5 indices are pooled over draws of r = n = 3
    data = DesignData(np.eye(3), np.zeros(3))
    rows = np.concatenate(
        [draw_sketch(SketchScheme(SchemeKind.UNIF, 3), data, (7, k)).rows for k in range(33_334)]
    )
    freq = np.bincount(rows, minlength=3) / rows.size
    assert np.all(np.abs(freq - 1 / 3) < 3 * math.sqrt((1 / 3) * (2 / 3) / rows.size))


def test_lev_never_draws_zero_leverage_row(fixture_data):
    rows = np.concatenate([draw_sketch(SketchScheme.parse("lev", 3), fixture_data, k).rows for k in range(2000)])
    assert 2 not in rows
    freq = np.bincount(rows, minlength=3) / rows.size
    assert abs(freq[0] - 0.5) < 3 * math.sqrt(0.25 / rows.size)


def test_norm_entry_moments():
    data = DesignData(np.random.default_rng(0).standard_normal((50, 3)), np.zeros(50))
    S = draw_sketch(SketchScheme.parse("norm", 50), data, 9).matrix
    S2 = draw_sketch(SketchScheme.parse("norm", 50), data, 10).matrix
    entries = np.concatenate([S.ravel(), S2.ravel()])
    assert S.shape == (50, 50)
    assert abs(entries.mean()) < 4 / math.sqrt(entries.size)
    assert abs(entries.var() - 1) < 0.05


def test_apply_examples(fixture_data):
    X = FIXTURE_X
    assert np.allclose(apply_sketch(SketchDraw.selector([0, 1], 3), X), np.eye(2))
    assert np.allclose(apply_sketch(SketchDraw.selector([2, 2], 3), X), np.zeros((2, 2)))
    assert np.allclose(apply_sketch(SketchDraw.dense(2 * np.eye(3)), np.array([1.0, 2, 3])), [2, 4, 6])


def test_sketch_dimension_errors(fixture_data):
    with pytest.raises(InvalidSketchDim):
        draw_sketch(SketchScheme.parse("unif", 4), fixture_data, 0)
    with pytest.raises(InvalidSketchDim):
        draw_sketch(SketchScheme.parse("identity", 2), fixture_data, 0)
    with pytest.raises(InvalidInput):
        SketchScheme.parse("gauss", 2)
    with pytest.raises(InvalidSketchDim):
        SketchScheme.parse("unif", 0)
    with pytest.raises(InvalidInput):
        SketchDraw.selector([3], 3)


def test_draws_reproducible(fixture_data):
    for kind in ("unif", "lev", "norm"):
        a = draw_sketch(SketchScheme.parse(kind, 2), fixture_data, 123).materialize()
        b = draw_sketch(SketchScheme.parse(kind, 2), fixture_data, 123).materialize()
        assert np.array_equal(a, b)


@given(
    st.integers(1, 12),
    st.integers(1, 12),
    st.integers(0, 2**32 - 1),
    st.sampled_from(["unif", "norm"]),
)
def test_implicit_ops_match_dense(n, r, seed, kind):
    r = min(r, n)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 1)) + 1.0
    data = DesignData(X, np.zeros(n))
    draw = draw_sketch(SketchScheme.parse(kind, r), data, seed)
    S = draw.materialize()
    M = rng.standard_normal((n, 3))
    A = rng.standard_normal((2, r))
    v = rng.standard_normal(r)
    assert np.allclose(draw.apply(M), S @ M)
    assert np.allclose(draw.gram(), S @ S.T)
    assert np.allclose(draw.scatter(A), A @ S)
    assert np.allclose(draw.rmatvec(v), S.T @ v)
