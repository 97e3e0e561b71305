# tests/test_harmonic.py
from math import comb
import numpy as np
import pytest
from core.entities import BZGrid, JetFrameField, ModularParameter
from core.harmonic import (
    check_no_hyperosculation,
    frame_defect,
    gram_schmidt_frames,
    level_projector,
    lift_projector,
    osculating_projector,
)
from core.theta import embedding_lift, make_basis
from core.torus import grid_z
from tests.conftest import SKEWED, SQUARE
from util.errors import InputError, ResolutionError


@pytest.mark.parametrize("tau,n_bands", [(SQUARE, 3), (SKEWED, 4)])
def test_frames_are_orthonormal_and_complete(pipeline, tau, n_bands):
    pipe = pipeline(tau, n_bands, 32)
    assert frame_defect(pipe.frames) < 1e-12
    total = sum(level_projector(pipe.frames, k).matrices for k in range(n_bands))
    np.testing.assert_allclose(total, np.broadcast_to(np.eye(n_bands), total.shape), atol=1e-12)
    assert np.all(pipe.frames.norms[..., : n_bands - 1] > 0)


def test_first_frame_spans_the_lift(pipeline):
    pipe = pipeline(SQUARE, 3, 32)
    np.testing.assert_allclose(
        level_projector(pipe.frames, 0).matrices, lift_projector(pipe.jets).matrices, atol=1e-12
    )


def test_osculating_projectors_accumulate_levels(pipeline):
    pipe = pipeline(SKEWED, 4, 32)
    pi_1 = osculating_projector(pipe.frames, 1)
    assert pi_1.rank == 2
    expected = level_projector(pipe.frames, 0).matrices + level_projector(pipe.frames, 1).matrices
    np.testing.assert_allclose(pi_1.matrices, expected, atol=1e-13)
    top = osculating_projector(pipe.frames, 3).matrices
    np.testing.assert_allclose(top, np.broadcast_to(np.eye(4), top.shape), atol=1e-12)


def test_level_range_errors(pipeline):
    pipe = pipeline(SQUARE, 3, 32)
    with pytest.raises(InputError):
        level_projector(pipe.frames, 3)
    with pytest.raises(InputError):
        osculating_projector(pipe.frames, -1)


def test_frames_need_full_jet_order():
    basis = make_basis(ModularParameter(1j), 3)
    jets = embedding_lift(basis, BZGrid(16), order=1)
    with pytest.raises(InputError):
        gram_schmidt_frames(jets)
    with pytest.raises(InputError):
        check_no_hyperosculation(jets)


def test_degenerate_curve_is_rank_deficient():
    basis = make_basis(ModularParameter(1j), 3)
    collapse = np.zeros((3, 3))
    collapse[0, :] = 1.0
    with pytest.raises(ResolutionError):
        gram_schmidt_frames(embedding_lift(basis, BZGrid(16), twist=collapse))


def test_hyperosculation_report_lists_the_hyperflexes(pipeline):
    pipe = pipeline(SQUARE, 3, 96)
    report = check_no_hyperosculation(pipe.jets)
    assert report.special_free
    assert all(s > 1e-3 for s in report.min_singular_values)
    assert report.min_abs_wronskian < 1e-8
    sixths = {1 / 6, 1 / 2, 5 / 6}
    expected = {(round(a, 9), round(b, 9)) for a in sixths for b in sixths}
    assert {(round(a, 9), round(b, 9)) for a, b in report.hyperflexes} == expected


@pytest.mark.parametrize("tau", [SQUARE, SKEWED])
def test_hyperosculation_minima_are_refinement_stable(pipeline, tau):
    coarse_pipe, fine_pipe = pipeline(tau, 3, 48), pipeline(tau, 3, 96)
    coarse = check_no_hyperosculation(coarse_pipe.jets, coarse_pipe.basis)
    fine = check_no_hyperosculation(fine_pipe.jets, fine_pipe.basis)
    np.testing.assert_allclose(coarse.min_singular_values, fine.min_singular_values, rtol=1e-8)
    grid_only = check_no_hyperosculation(fine_pipe.jets)
    for polished, sampled in zip(fine.min_singular_values, grid_only.min_singular_values):
        assert polished <= sampled + 1e-15
    assert fine.min_singular_values[0] == pytest.approx(1.0)


def test_twisted_jets_keep_their_grid_minima(pipeline):
    pipe = pipeline(SQUARE, 3, 48)
    collapse = np.diag([1.0, 2.0, 0.5])
    twisted = embedding_lift(pipe.basis, pipe.grid, twist=collapse)
    report = check_no_hyperosculation(twisted, pipe.basis)
    assert report.min_singular_values == check_no_hyperosculation(twisted).min_singular_values


def test_gram_schmidt_fixes_orthonormal_frames(pipeline):
    pipe = pipeline(SKEWED, 4, 16)
    again = gram_schmidt_frames(JetFrameField(grid=pipe.grid, order=3, frames=pipe.frames.vectors))
    np.testing.assert_allclose(again.vectors, pipe.frames.vectors, atol=1e-12)
    np.testing.assert_allclose(again.norms, 1.0, atol=1e-12)


def test_osculating_projectors_match_an_svd_of_the_jets(pipeline):
    pipe = pipeline(SQUARE, 4, 16)
    for k in range(3):
        span, _, _ = np.linalg.svd(pipe.jets.frames[..., : k + 1], full_matrices=False)
        oracle = np.einsum("...ik,...jk->...ij", span, np.conj(span))
        np.testing.assert_allclose(osculating_projector(pipe.frames, k).matrices, oracle, atol=1e-9)


def test_levels_ignore_a_holomorphic_rescaling(pipeline):
    pipe = pipeline(SKEWED, 3, 16)
    a = complex(0.7, 0.2)
    z = grid_z(pipe.grid, ModularParameter(SKEWED))
    f = pipe.jets.frames
    scaled = np.zeros_like(f)
    # Leibniz rule for (e^{az} f)^{(m)}
    for m in range(3):
        for i in range(m + 1):
            scaled[..., m] += comb(m, i) * a**i * f[..., m - i]
    scaled = np.exp(a * z)[..., None, None] * scaled
    rescaled = gram_schmidt_frames(JetFrameField(grid=pipe.grid, order=2, frames=scaled))
    for k in range(3):
        np.testing.assert_allclose(
            level_projector(rescaled, k).matrices, level_projector(pipe.frames, k).matrices, atol=1e-9
        )
