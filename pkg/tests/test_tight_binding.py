# tests/test_tight_binding.py
import json
import numpy as np
import pytest
from core.entities import BZGrid, ModularParameter, ProjectorField
from core.geometry import chern_number, qgt
from core.harmonic import level_projector
from core.tight_binding import (
    bloch_hamiltonian,
    fermi_projector_field,
    is_immersion,
    kahler_deviation,
    parse_hopping_spec,
    spectral_gap,
    two_band_document,
    two_band_model,
    wirtinger_deviation,
)
from repository.spec_repository import SpecRepository
from service.tight_binding_service import TightBindingService
from tests.conftest import SQUARE
from util.enums import ErrorMessage
from util.errors import GapClosureError, InputError


def _doc(**overrides) -> str:
    doc = two_band_document(1.0)
    doc.update(overrides)
    return json.dumps(doc)


def _lower_band(m: float, n: int = 64, e_fermi: float = 0.0) -> ProjectorField:
    return fermi_projector_field(bloch_hamiltonian(two_band_model(m), BZGrid(n)), e_fermi)


def test_parse_closes_hoppings_under_inversion():
    spec = two_band_model(1.0)
    assert set(spec.hoppings) == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    np.testing.assert_allclose(spec.hoppings[(-1, 0)], spec.hoppings[(1, 0)].conj().T)


def test_bloch_hamiltonian_is_the_d_vector():
    grid = BZGrid(16)
    bloch = bloch_hamiltonian(two_band_model(1.0), grid)
    k1, k2 = grid.mesh()
    d = np.sqrt(
        np.sin(2 * np.pi * k1) ** 2
        + np.sin(2 * np.pi * k2) ** 2
        + (1.0 - np.cos(2 * np.pi * k1) - np.cos(2 * np.pi * k2)) ** 2
    )
    np.testing.assert_allclose(bloch.energies[..., 1], d, atol=1e-12)
    np.testing.assert_allclose(bloch.energies[..., 0], -d, atol=1e-12)
    np.testing.assert_allclose(bloch.h_k, np.conj(np.swapaxes(bloch.h_k, -1, -2)), atol=1e-14)


@pytest.mark.parametrize(
    "document,error",
    [
        ("{not json", ErrorMessage.MALFORMED_SPEC),
        (_doc(dim=3), ErrorMessage.MALFORMED_SPEC),
        (_doc(cutoff=0), ErrorMessage.MALFORMED_SPEC),
        (_doc(bands=3), ErrorMessage.MALFORMED_SPEC),
        (_doc(extra=1), ErrorMessage.MALFORMED_SPEC),
    ],
)
def test_malformed_specs(document, error):
    with pytest.raises(InputError) as exc:
        parse_hopping_spec(document)
    assert exc.value.error is error


def test_hermiticity_conflicts():
    doc = two_band_document(1.0)
    doc["hoppings"][0]["matrix_im"] = [[0.0, 1.0], [0.0, 0.0]]
    with pytest.raises(InputError) as exc:
        parse_hopping_spec(json.dumps(doc))
    assert exc.value.error is ErrorMessage.HERMITICITY_CONFLICT

    doc = two_band_document(1.0)
    doc["hoppings"].append({"gamma": [-1, 0], "matrix_re": [[1.0, 0.0], [0.0, 1.0]]})
    with pytest.raises(InputError) as exc:
        parse_hopping_spec(json.dumps(doc))
    assert exc.value.error is ErrorMessage.HERMITICITY_CONFLICT

    doc = two_band_document(1.0)
    doc["hoppings"].append(dict(doc["hoppings"][1]))
    with pytest.raises(InputError):
        parse_hopping_spec(json.dumps(doc))


@pytest.mark.parametrize("m,chern", [(1.0, 1), (3.0, 0), (-1.0, -1)])
def test_two_band_chern_numbers(m, chern):
    assert chern_number(_lower_band(m)).chern == chern


def test_upper_band_carries_opposite_chern():
    p = _lower_band(1.0)
    upper = ProjectorField(grid=p.grid, rank=1, matrices=np.eye(2) - p.matrices)
    assert chern_number(upper).chern == -chern_number(p).chern


def test_gap_closure_at_critical_mass():
    bloch = bloch_hamiltonian(two_band_model(2.0), BZGrid(32))
    assert spectral_gap(bloch, 0.0) < 1e-12
    with pytest.raises(GapClosureError) as exc:
        fermi_projector_field(bloch, 0.0)
    assert exc.value.error is ErrorMessage.GAP_CLOSURE
    assert "k=(0, 0)" in exc.value.detail


def test_fermi_level_outside_the_spectrum():
    bloch = bloch_hamiltonian(two_band_model(1.0), BZGrid(16))
    with pytest.raises(InputError) as exc:
        fermi_projector_field(bloch, -10.0)
    assert exc.value.error is ErrorMessage.RANK_CHANGE
    full = fermi_projector_field(bloch, 10.0)
    assert full.rank == 2
    assert chern_number(full).chern == 0


def test_fermi_shift_inside_the_gap_changes_nothing():
    p0 = _lower_band(1.0)
    p1 = _lower_band(1.0, e_fermi=0.4)
    np.testing.assert_allclose(p0.matrices, p1.matrices, atol=1e-13)


def test_atomic_insulator_has_no_geometry():
    report, q = TightBindingService(SpecRepository()).compute("atomic_insulator", 32)
    assert report.chern.chern == 0
    assert report.gap.gap == pytest.approx(1.0)
    assert np.max(np.abs(q.w12)) < 1e-14
    assert report.kahler_deviation == pytest.approx(0.0, abs=1e-14)
    assert not report.immersion


def test_two_band_model_is_not_kahler():
    q = qgt(_lower_band(1.0, n=64))
    assert kahler_deviation(q) > 1e-3
    # the target is one complex dimension, so √det g = |w12| pointwise
    assert abs(wirtinger_deviation(q)) <= 1e-6
    assert is_immersion(q)


def test_holomorphic_theta_band_is_kahler(pipeline):
    q = qgt(level_projector(pipeline(SQUARE, 3, 96).frames, 0))
    area = float(np.mean(np.abs(q.w12)))
    assert abs(kahler_deviation(q, ModularParameter(SQUARE))) <= 1e-6 * area


def test_tight_binding_service_reports(tmp_path):
    service = TightBindingService(SpecRepository())
    report = service.run("two_band_m1", 32, 0.0, str(tmp_path))
    assert report.ok
    assert report.spec == "two_band_m1"
    assert report.chern.chern == 1
    assert report.gap.rank == 1
    for name in ("gap.json", "chern.json", "qgt.csv", "tight_binding.json", "manifest.json"):
        assert (tmp_path / name).is_file()
    assert json.loads((tmp_path / "chern.json").read_text())["chern"] == 1


def test_inline_specs_and_missing_specs():
    service = TightBindingService(SpecRepository())
    report, _ = service.compute(json.dumps(two_band_document(-1.0)), 32)
    assert report.spec == "inline"
    assert report.chern.chern == -1
    with pytest.raises(InputError) as exc:
        service.compute("no_such_model", 32)
    assert exc.value.error is ErrorMessage.SPEC_NOT_FOUND
    assert exc.value.stage == "parse"


def test_tight_binding_checks_decide_ok():
    service = TightBindingService(SpecRepository())
    report, _ = service.compute("two_band_m-1", 32, expected_chern=-1)
    assert report.ok
    assert [c.name for c in report.checks] == [
        "chern_integrality",
        "wirtinger_lower_bound",
        "kahler_deviation",
        "chern",
    ]
    assert report.checks[0].value < 1e-10

    wrong, _ = service.compute("two_band_m-1", 32, expected_chern=1)
    assert not wrong.ok
    assert [c.name for c in wrong.checks if not c.passed] == ["chern"]
