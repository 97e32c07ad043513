import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sketchuq import (
    DesignData,
    SketchDraw,
    SketchScheme,
    build_projectors,
    draw_sketch,
    exact_solve,
    null_space_check,
    sketched_solve,
)

from conftest import FIXTURE_X, FIXTURE_Y, random_design
from oracles import projectors


def test_identity_sketch(fixture_data):
    proj = build_projectors(fixture_data, SketchDraw.identity(3))
    assert np.allclose(proj.matrix(), np.diag([1.0, 1, 0]))
    assert np.allclose(proj.P0, np.eye(2))
    assert proj.dev_ppx == pytest.approx(0, abs=1e-15)
    assert proj.rank_preserved
    sfit = sketched_solve(fixture_data, SketchDraw.identity(3))
    assert np.allclose(sfit.beta_tilde, [1, 2])


def test_two_row_selector(fixture_data):
    draw = SketchDraw.selector([0, 1], 3)
    proj = build_projectors(fixture_data, draw)
    assert np.allclose(proj.matrix(), np.diag([1.0, 1, 0]))
    assert np.allclose(proj.P0, np.eye(2))
    assert proj.rank_sx == 2
    sfit = sketched_solve(fixture_data, draw)
    assert np.allclose(sfit.beta_tilde, [1, 2])
    assert np.allclose(sfit.residual_tilde, [0, 0, 3])
    assert null_space_check(fixture_data, draw)


def test_one_row_selector(fixture_data):
    draw = SketchDraw.selector([0], 3)
    proj = build_projectors(fixture_data, draw)
    assert np.allclose(proj.P0, np.diag([1.0, 0]))
    assert proj.rank_sx == 1
    assert proj.dev_p0 == pytest.approx(1.0)
    assert not proj.rank_preserved
    sfit = sketched_solve(fixture_data, draw)
    assert np.allclose(sfit.beta_tilde, [1, 0])


def test_null_space_identity(fixture_data):
    assert null_space_check(fixture_data, SketchDraw.identity(3))


def test_null_space_gaussian_square():
    rng = np.random.default_rng(21)
    for t in range(10):
        data = random_design(rng, 12, 4)
        draw = draw_sketch(SketchScheme.parse("norm", 4), data, t)
        assert null_space_check(data, draw)


def test_null_space_rank_deficient_sampling():
    rng = np.random.default_rng(5)
    data = random_design(rng, 10, 4)
    assert null_space_check(data, SketchDraw.selector([1, 1, 2], 10))


def test_power_norms_match_exact():
    rng = np.random.default_rng(2)
    data = random_design(rng, 60, 5)
    draw = draw_sketch(SketchScheme.parse("unif", 20), data, 4)
    exact = build_projectors(data, draw)
    implicit = build_projectors(data, draw, cap=0)
    assert implicit.P is None
    assert implicit.dev_ppx == pytest.approx(exact.dev_ppx, rel=1e-4)
    assert implicit.dev_ppt == pytest.approx(exact.dev_ppt, rel=1e-4)
    v = rng.standard_normal(60)
    assert np.allclose(implicit.apply(v), exact.matrix() @ v)
    assert np.allclose(implicit.apply_t(v), exact.matrix().T @ v)


@given(
    st.integers(0, 2**32 - 1),
    st.integers(2, 40),
    st.integers(1, 6),
    st.sampled_from(["unif", "lev", "norm"]),
    st.integers(-2, 8),
)
def test_projector_identities_against_pinv_oracle(seed, n, p, kind, dr):
    p = min(p, n - 1) if n > 1 else 1
    r = int(np.clip(p + dr, 1, n))
    rng = np.random.default_rng(seed)
    data = random_design(rng, n, p)
    draw = draw_sketch(SketchScheme.parse(kind, r), data, seed)
    proj = build_projectors(data, draw)
    P = proj.matrix()
    P_ref, P0_ref, _ = projectors(data.X, draw.materialize())
    scale = max(1.0, np.linalg.norm(P, 2))
    assert np.linalg.norm(P - P_ref, 2) <= 1e-8 * scale * max(1.0, data.kappa)
    assert np.linalg.norm(proj.P0 - P0_ref, 2) <= 1e-8
    assert np.linalg.norm(P @ P - P, 2) <= 1e-8 * scale**2
    assert np.linalg.norm(data.hat_matrix() @ P - P, 2) <= 1e-8 * scale
    assert np.linalg.norm(proj.P0 @ proj.P0 - proj.P0, 2) <= 1e-8
    assert np.linalg.norm(proj.P0 - proj.P0.T, 2) <= 1e-8
    assert np.linalg.norm(P @ data.X - data.X @ proj.P0, 2) <= 1e-8 * scale * data.x_norm
    assert (proj.rank_sx == p) == (np.linalg.norm(proj.P0 - np.eye(p), 2) <= 1e-8)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["unif", "lev", "norm"]))
def test_sketched_solution_identity(seed, kind):
    rng = np.random.default_rng(seed)
    data = random_design(rng, 15, 3)
    draw = draw_sketch(SketchScheme.parse(kind, int(rng.integers(1, 8))), data, seed)
    sfit = sketched_solve(data, draw)
    assert sfit.identity_error <= 1e-8
    fit = exact_solve(data)
    P = build_projectors(data, draw).matrix()
    rhs = fit.beta_hat + data.x_pinv @ (P - fit.hat_matrix) @ data.y
    assert np.allclose(sfit.beta_tilde, rhs, atol=1e-8 * max(1, np.linalg.norm(rhs)))


def test_fixture_constants():
    assert np.allclose(FIXTURE_X.T @ FIXTURE_Y, [1, 2])
    assert math.isclose(np.linalg.norm(FIXTURE_Y), math.sqrt(14))
