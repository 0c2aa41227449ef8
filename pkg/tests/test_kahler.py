import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complex_in_disk
from finslerium.errors import ConfigurationError, PoleSingularityError
from finslerium.kahler import (
    KahlerModel,
    complex_hessian,
    complex_hessian_batch,
    gradient_pairing,
    kahler_identity_checks,
    real_metric,
)
from finslerium.metrics import SamplePlan

DISK = KahlerModel.disk()


def test_flat_complex_hessian_of_squared_norm():
    f = lambda z: z[0] * np.conj(z[0])
    for z in (0.0, 0.3 - 2j, 5j):
        assert complex_hessian(f, [z]).entries[0, 0] == pytest.approx(1.0, abs=1e-14)


def test_disk_distance_squared_hessian():
    assert complex_hessian(DISK.rho2, [0.0]).entries[0, 0] == pytest.approx(1.0, abs=1e-12)
    val = complex_hessian(DISK.rho2, [0.5]).entries[0, 0].real
    # symbolic oracle
    assert val == pytest.approx(2.1095692096312333, abs=1e-10)
    # raw value stays below the h-unit bound for this point
    assert val <= 2 * (1 + 2 * np.arctanh(0.5)) == pytest.approx(4.19722457733622)


def test_distance_is_rejected_at_the_pole():
    with pytest.raises(PoleSingularityError):
        complex_hessian(DISK.rho, [0.0])
    assert complex_hessian(DISK.rho2, [1e-5]).entries[0, 0].real == pytest.approx(1.0, abs=1e-8)


def test_flat_report():
    rep = kahler_identity_checks(KahlerModel.flat(2), SamplePlan(100, 2.0, 0, 0.05))
    assert rep.passed
    assert rep.results["pairing"].worst_slack >= -1e-8
    assert rep.results["l_operator"].worst_slack >= -1e-8
    assert rep.results["gradient_pairing"].worst_slack >= -1e-8
    # complex Hessian of |z|^2 contracts to 1 on unit vectors, slack 2 - 1
    assert rep.results["hessian_bound"].worst_slack == pytest.approx(1.0, abs=1e-12)


def test_disk_report():
    rep = kahler_identity_checks(DISK, SamplePlan(100, 0.9, 0, 0.05))
    assert rep.passed
    assert rep.results["hessian_bound"].worst_slack >= 0
    assert rep.results["disk_bound"].worst_slack > 0


def test_model_validation():
    with pytest.raises(ConfigurationError):
        KahlerModel("sphere")
    with pytest.raises(ConfigurationError):
        KahlerModel("poincare-disk", 2)
    with pytest.raises(ConfigurationError):
        kahler_identity_checks(DISK, SamplePlan(10, 1.2, 0))


def test_real_metric_is_symmetric_positive():
    h = np.array([[2.0, 0.3 + 0.4j], [0.3 - 0.4j, 1.0]])
    g = real_metric(h)
    assert np.allclose(g, g.T)
    assert np.all(np.linalg.eigvalsh(g) > 0)


# -- properties ----------------------------------------------------------------------


@given(z=complex_in_disk(0.95))
def test_complex_hessian_of_real_field_is_hermitian(z):
    H = complex_hessian_batch(KahlerModel.flat(2).rho2, np.array([[z], [0.3 * z + 0.1j]]))
    assert np.max(np.abs(H - np.conj(np.swapaxes(H, 1, 2)))) <= 1e-9
    Hd = complex_hessian(DISK.rho2, [z])
    assert Hd.hermitian_defect() <= 1e-9


@given(z=complex_in_disk(0.9).filter(lambda z: abs(z) > 0.05))
def test_gradient_pairing_identity(z):
    rho = float(np.arctanh(abs(z)))
    pair = gradient_pairing(DISK, np.array([[z]]))[0]
    assert abs(pair - 2 * rho) <= 1e-7 * (1 + rho)


@given(z=complex_in_disk(0.9).filter(lambda z: abs(z) > 0.05), v=complex_in_disk(1).filter(lambda v: abs(v) > 0.1))
def test_disk_hessian_bounds(z, v):
    rho = float(np.arctanh(abs(z)))
    c = complex_hessian(DISK.rho2, [z]).entries[0, 0].real
    hv = abs(v) ** 2 / (1 - abs(z) ** 2) ** 2
    val = c * abs(v) ** 2 / hv
    assert val <= 2 + 2 * rho + 1e-12
    assert val <= 2 * (1 + 2 * rho) + 1e-12


@given(seed=st.integers(0, 1000))
def test_seeded_reports_pass(seed):
    assert kahler_identity_checks(DISK, SamplePlan(20, 0.9, seed, 0.05)).passed
