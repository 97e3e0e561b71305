# tests/test_recurrence.py
import numpy as np
import pytest
from core.entities import BZGrid, ModularParameter, TwoFormField
from core.rigidity import random_unitary
from core.recurrence import (
    frenet_two_form,
    hyperflex_density,
    reconstruct_sequence,
    recurrence_residuals,
    ricci_form,
    smooth_top_ricci_form,
    top_ricci_form,
    two_form_sequence,
)
from core.theta import theta_eval
from core.torus import grid_z, integrate_two_form
from service.pipeline import build_theta_pipeline
from tests.conftest import SKEWED, SQUARE
from util.enums import ErrorMessage
from util.errors import InputError, ResolutionError


@pytest.mark.parametrize("tau", [SQUARE, SKEWED])
def test_recurrence_holds_on_fine_grids(pipeline, tau):
    report = recurrence_residuals(pipeline(tau, 4, 128).frames, ModularParameter(tau))
    assert len(report.residuals) == 3
    assert max(report.residuals) <= 1e-6


def test_frenet_forms_match_associated_forms(pipeline):
    pipe = pipeline(SKEWED, 4, 64)
    tau = ModularParameter(SKEWED)
    forms = two_form_sequence(pipe.frames)
    for j in range(3):
        np.testing.assert_allclose(frenet_two_form(pipe.frames, j, tau).w, forms[j + 1].w, atol=1e-8)
    with pytest.raises(InputError):
        frenet_two_form(pipe.frames, 3, tau)


def test_ricci_form_integrates_to_zero(pipeline):
    pipe = pipeline(SQUARE, 4, 64)
    forms = two_form_sequence(pipe.frames)
    tau = ModularParameter(SQUARE)
    for w in forms[1:3]:
        assert abs(integrate_two_form(ricci_form(w, tau))) < 1e-10


def test_ricci_form_of_flat_form_vanishes():
    w = TwoFormField(grid=BZGrid(16), w=np.full((16, 16), 3.0))
    assert np.max(np.abs(ricci_form(w, ModularParameter(1j)).w)) < 1e-12


def test_ricci_form_rejects_vanishing_forms():
    values = np.ones((16, 16))
    values[3, 5] = 0.0
    with pytest.raises(ResolutionError) as exc:
        ricci_form(TwoFormField(grid=BZGrid(16), w=values), ModularParameter(1j))
    assert exc.value.error is ErrorMessage.NONPOSITIVE_FORM
    assert "(3, 5)" in exc.value.detail


@pytest.mark.parametrize("k", [1, 2])
def test_sequence_is_rebuilt_from_one_consecutive_pair(pipeline, k):
    pipe = pipeline(SQUARE, 4, 128)
    tau = ModularParameter(SQUARE)
    forms = two_form_sequence(pipe.frames)
    rebuilt = reconstruct_sequence(forms[k], forms[k + 1], k, 4, tau)
    assert len(rebuilt.forms) == 5
    scale = max(float(np.max(f.w)) for f in forms)
    for j in range(0, 3):
        np.testing.assert_allclose(rebuilt.forms[j + 1].w, forms[j + 1].w, atol=1e-5 * scale)
    assert rebuilt.lower_terminal_max <= 1e-5 * scale
    assert np.isfinite(rebuilt.upper_terminal_max)
    assert rebuilt.hyperflex_mass == pytest.approx(16.0, rel=1e-5)


def test_reconstruction_input_errors(pipeline):
    pipe = pipeline(SQUARE, 4, 32)
    forms = two_form_sequence(pipe.frames)
    tau = ModularParameter(SQUARE)
    with pytest.raises(InputError):
        reconstruct_sequence(forms[0], forms[1], 0, 4, tau)
    with pytest.raises(InputError):
        reconstruct_sequence(forms[3], forms[4], 3, 4, tau)
    small = TwoFormField(grid=BZGrid(16), w=np.ones((16, 16)))
    with pytest.raises(InputError):
        reconstruct_sequence(small, forms[2], 1, 4, tau)


def test_hyperflex_density_vanishes_on_the_hyperflexes():
    grid, tau = BZGrid(48), ModularParameter(SKEWED)
    h = hyperflex_density(grid, tau, 3)
    hits = [8, 24, 40]
    peak = float(np.max(h))
    for i1 in hits:
        for i2 in hits:
            assert h[i1, i2] <= 1e-20 * peak
    mask = np.ones(h.shape, dtype=bool)
    mask[np.ix_(hits, hits)] = False
    assert np.min(h[mask]) > 1e-4 * peak
    # reducing the argument into the cell leaves the density unchanged
    v = 3 * (grid_z(grid, tau) - (1 + tau.tau) / 2)
    direct = np.abs(theta_eval(0.5, 0.5, v, tau.tau)[0]) ** 2 * np.exp(-2 * np.pi * v.imag**2 / tau.imag)
    np.testing.assert_allclose(h, direct, rtol=1e-9, atol=1e-12 * peak)


def test_smooth_ricci_form_matches_the_frame_potential(pipeline):
    pipe = pipeline(SKEWED, 4, 128)
    tau = ModularParameter(SKEWED)
    forms = two_form_sequence(pipe.frames)
    smooth = smooth_top_ricci_form(forms[3], tau, 4).w
    reference = top_ricci_form(pipe.frames, tau).w
    np.testing.assert_allclose(smooth, reference, atol=1e-5 * float(np.max(np.abs(reference))))


def test_upper_terminal_is_computed_and_audits_the_pair(pipeline):
    pipe = pipeline(SQUARE, 4, 128)
    tau = ModularParameter(SQUARE)
    forms = two_form_sequence(pipe.frames)
    scale = max(float(np.max(f.w)) for f in forms)

    rebuilt = reconstruct_sequence(forms[2], forms[3], 2, 4, tau)
    assert rebuilt.upper_terminal_max <= 1e-5 * scale
    assert rebuilt.upper_terminal_max == float(np.max(np.abs(rebuilt.level(3).w)))

    skewed = TwoFormField(grid=forms[3].grid, w=1.05 * forms[3].w)
    broken = reconstruct_sequence(forms[2], skewed, 2, 4, tau)
    assert broken.upper_terminal_max > 1e-3 * scale
    assert broken.lower_terminal_max > 1e-3 * scale


def test_upper_terminal_needs_a_positive_quotient():
    grid = BZGrid(32)
    values = np.ones((32, 32))
    with pytest.raises(ResolutionError) as exc:
        reconstruct_sequence(
            TwoFormField(grid=grid, w=values), TwoFormField(grid=grid, w=-values), 1, 3, ModularParameter(1j)
        )
    assert exc.value.error is ErrorMessage.NONPOSITIVE_FORM
    assert exc.value.detail.startswith("level 1:")


def test_recurrence_residuals_shrink_fourfold_from_64_to_128(pipeline):
    tau = ModularParameter(SKEWED)
    coarse = recurrence_residuals(pipeline(SKEWED, 4, 64).frames, tau)
    fine = recurrence_residuals(pipeline(SKEWED, 4, 128).frames, tau)
    assert max(fine.residuals) <= max(coarse.residuals) / 4


def test_reconstructions_agree_across_pairs(pipeline):
    pipe = pipeline(SKEWED, 5, 128)
    tau = ModularParameter(SKEWED)
    forms = two_form_sequence(pipe.frames)
    scale = max(float(np.max(f.w)) for f in forms)
    rebuilt = [reconstruct_sequence(forms[k], forms[k + 1], k, 5, tau) for k in (1, 2, 3)]
    for other in rebuilt[1:]:
        for j in range(-1, 4):
            np.testing.assert_allclose(other.level(j).w, rebuilt[0].level(j).w, atol=1e-5 * scale)


def test_reconstruction_is_blind_to_a_unitary_twist(pipeline):
    tau = ModularParameter(SQUARE)
    pipe = pipeline(SQUARE, 4, 64)
    twisted = build_theta_pipeline(tau, 4, 64, twist=random_unitary(4, seed=9))
    forms = two_form_sequence(pipe.frames)
    forms_twisted = two_form_sequence(twisted.frames)
    scale = max(float(np.max(f.w)) for f in forms)
    plain = reconstruct_sequence(forms[1], forms[2], 1, 4, tau)
    turned = reconstruct_sequence(forms_twisted[1], forms_twisted[2], 1, 4, tau)
    for a, b in zip(plain.forms, turned.forms):
        np.testing.assert_allclose(a.w, b.w, atol=1e-8 * scale)
    again = reconstruct_sequence(forms[1], forms[2], 1, 4, tau)
    for a, b in zip(plain.forms, again.forms):
        np.testing.assert_array_equal(a.w, b.w)
