import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complex_in_disk, nonzero_complex
from finslerium.chern import (
    CurveGerm,
    connection_coefficients,
    curvature_batch,
    curvature_bound_estimate,
    gaussian_curvature,
    hermitian_hsc,
    hermitian_hsc_batch,
    hh_curvature,
    holomorphic_sectional_curvature,
    hsc_batch,
    induced_curvatures,
    induced_curve_metric,
    variational_check,
)
from finslerium.errors import ConfigurationError, DegenerateCurveError, DomainError, IllConditionedMetricError
from finslerium.metrics import (
    SCALINGS,
    ZOO,
    SamplePlan,
    degenerate,
    euclidean,
    exp_family,
    fubini_study,
    hermitian_metric,
    make_metric,
    poincare_disk,
    poincare_product,
    sample_jets,
)
from finslerium.wirtinger import FD, JetPoint


def _radius(m):
    return 0.45 if m.domain_closed else 0.8


def _poly_h(z):
    # same polynomial Hermitian metric as the symbolic oracle
    z1, z2 = z
    zb1, zb2 = np.conj(z1), np.conj(z2)
    h12 = 0.3 * z1 * zb2 + 0.2 * zb1
    return [[1 + z1 * zb1 + z2 * zb2 / 2, h12], [np.conj(h12), 1 + 2 * z2 * zb2 + 0.1 * (z1 * z2 + zb1 * zb2)]]


ORACLE_POINT = JetPoint.of([0.2 - 0.1j, 0.15 + 0.05j], [0.6 + 0.2j, -0.3 + 0.7j])


def test_euclidean_connection_and_curvature_vanish():
    p = JetPoint.of([0.3, -1j], [1, 2])
    c = connection_coefficients(euclidean(2), p)
    for arr in (c.gamma_semicolon, c.gamma_mixed, c.gamma_vertical):
        assert np.max(np.abs(arr)) < 1e-14
    blk = hh_curvature(euclidean(2), p, ("hh", "vh", "hv", "vv"))
    for arr in (blk.hh, blk.vh, blk.hv, blk.vv):
        assert np.max(np.abs(arr)) < 1e-7
    K, _ = holomorphic_sectional_curvature(euclidean(2), p)
    assert abs(K) < 1e-8


def test_poincare_connection_at_half():
    c = connection_coefficients(poincare_disk(), JetPoint.of([0.5], [1.0]))
    assert c.gamma_semicolon[0, 0] == pytest.approx(4 / 3, abs=1e-12)


def test_poincare_hh_entry_at_origin():
    blk = hh_curvature(poincare_disk(), JetPoint.of([0.0], [1.0]))
    assert blk.hh[0, 0, 0, 0] == pytest.approx(-2.0, abs=1e-12)
    K, _ = holomorphic_sectional_curvature(poincare_disk(), JetPoint.of([0.0], [1.0]))
    assert K == pytest.approx(-4.0, abs=1e-12)


def test_exp_family_connection_against_symbolic_oracle_and_fd():
    m = exp_family(1, 0.5, 1, 2)
    p = JetPoint.of([0.3 + 0.1j, -0.2], [1, 0.5j])
    gam = connection_coefficients(m, p).gamma_semicolon
    oracle = np.array([[0.4494409937888198 - 0.20231884057971014j, -0.1953623188405797 - 0.0011180124223602508j],
                       [0.04939958592132505 + 0.14708074534161492j, 0.1558385093167702 - 0.20120082815734994j]])
    assert np.allclose(gam, oracle, atol=1e-12)
    fd = connection_coefficients(m, p, FD)
    ad = connection_coefficients(m, p)
    for name in ("gamma_semicolon", "gamma_mixed", "gamma_vertical"):
        assert np.max(np.abs(getattr(fd, name) - getattr(ad, name))) <= 1e-5


def test_exp_family_curvature_against_symbolic_oracle():
    K, res = holomorphic_sectional_curvature(exp_family(1, 0.5), JetPoint.of([0.3 + 0.1j, -0.2], [1, 0.5j]))
    assert K == pytest.approx(-2.4759206054750464, abs=1e-12)
    assert res < 1e-12


def test_exp_family_curvature_at_origin():
    K, _ = holomorphic_sectional_curvature(exp_family(1, 0.5), JetPoint.of([0, 0], [0.3, 1j]))
    assert K == pytest.approx(-3.0, abs=1e-12)


def test_fubini_study_curvature():
    K, _ = holomorphic_sectional_curvature(fubini_study(1), JetPoint.of([0.4 - 0.3j], [2.0]))
    assert K == pytest.approx(4.0, abs=1e-10)


def test_hermitian_closed_form_examples():
    assert hermitian_hsc(poincare_disk(), JetPoint.of([0.6j], [1])) == pytest.approx(-4.0, abs=1e-10)
    assert hermitian_hsc(euclidean(3), JetPoint.of([0, 1, 2], [1, 1, 1])) == pytest.approx(0.0, abs=1e-14)
    prod = poincare_product()
    assert hermitian_hsc(prod, JetPoint.of([0, 0], [1, 0])) == pytest.approx(-4.0, abs=1e-12)
    assert hermitian_hsc(prod, JetPoint.of([0, 0], [0, 1])) == pytest.approx(0.0, abs=1e-12)


def test_polynomial_hermitian_metric_against_symbolic_oracle():
    m = hermitian_metric("poly", 2, _poly_h)
    assert hermitian_hsc(m, ORACLE_POINT) == pytest.approx(-1.383036722656975, abs=1e-12)
    assert holomorphic_sectional_curvature(m, ORACLE_POINT)[0] == pytest.approx(-1.383036722656975, abs=1e-10)


def test_singular_hermitian_tensor_is_rejected():
    with pytest.raises(IllConditionedMetricError):
        hermitian_hsc(degenerate(), JetPoint.of([0, 0], [1, 0]))
    with pytest.raises(IllConditionedMetricError):
        holomorphic_sectional_curvature(degenerate(), JetPoint.of([0, 0], [1, 0]))


def test_unknown_block_is_rejected():
    with pytest.raises(ConfigurationError):
        curvature_batch(euclidean(1), [0], [1], blocks=("xx",))


def test_gaussian_curvature_examples():
    assert gaussian_curvature(lambda z: (1 - z * np.conj(z)) ** -2, 0.3) == pytest.approx(-4.0, abs=1e-12)
    assert gaussian_curvature(lambda z: 1.0, 0.3) == pytest.approx(0.0)
    assert gaussian_curvature(lambda z: (1 + z * np.conj(z)) ** -2, -0.5j) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(DomainError):
        gaussian_curvature(lambda z: -1.0 + 0 * z, 0)


def test_induced_curves():
    line = CurveGerm.quadratic([0.1, 0.2], [1, 1j])
    assert gaussian_curvature(induced_curve_metric(euclidean(2), line)) == pytest.approx(0.0, abs=1e-14)
    disk = CurveGerm.quadratic([0.0], [1.0])
    assert gaussian_curvature(induced_curve_metric(poincare_disk(), disk)) == pytest.approx(-4.0, abs=1e-12)
    with pytest.raises(DegenerateCurveError):
        induced_curve_metric(euclidean(1), CurveGerm.quadratic([0.0], [0.0], [1.0]))


def test_bounds_examples():
    b = curvature_bound_estimate(poincare_disk(), SamplePlan(60, 0.9, 0))
    assert b.inf == pytest.approx(-4, abs=1e-5) and b.sup == pytest.approx(-4, abs=1e-5)
    b = curvature_bound_estimate(euclidean(2), SamplePlan(30, 1.0, 0))
    assert abs(b.inf) < 1e-8 and abs(b.sup) < 1e-8
    b = curvature_bound_estimate(exp_family(1, 0.5, 1, 2), SamplePlan(100, 1.0, 0))
    assert b.inf == pytest.approx(-3.0, abs=1e-3)
    assert b.sup == pytest.approx(-0.6693904804452895, abs=1e-3)
    with pytest.raises(ConfigurationError):
        curvature_bound_estimate(exp_family(), SamplePlan(10, 1.5, 0))


# -- properties ---------------------------------------------------------------------


@pytest.mark.parametrize("name", [k for k in sorted(ZOO) if k != "degenerate"])
def test_curvature_is_scale_invariant(name):
    m = make_metric(name)
    Z, V = sample_jets(m, SamplePlan(100, _radius(m), 4))
    K0, res = hsc_batch(m, Z, V)
    assert np.all(res <= 1e-8 * (1 + np.abs(K0)))
    for zeta in SCALINGS:
        K1, _ = hsc_batch(m, Z, zeta * V)
        assert np.max(np.abs(K1 - K0)) <= 1e-7


@pytest.mark.parametrize("name", [k for k in sorted(ZOO) if make_metric(k).is_hermitian and k != "degenerate"])
def test_finsler_pipeline_reduces_to_hermitian_formula(name):
    m = make_metric(name)
    Z, V = sample_jets(m, SamplePlan(100, _radius(m), 8))
    K, _ = hsc_batch(m, Z, V)
    assert np.max(np.abs(K - hermitian_hsc_batch(m, Z, V))) <= 1e-5


@pytest.mark.parametrize("name", [k for k in sorted(ZOO) if k != "degenerate"])
def test_induced_curves_never_exceed_holomorphic_curvature(name):
    m = make_metric(name)
    Z, V = sample_jets(m, SamplePlan(5, _radius(m), 9))
    for j in range(Z.shape[1]):
        chk = variational_check(m, JetPoint.of(Z[:, j], V[:, j]), count=50, seed=j)
        assert chk.one_sided_pass, chk


@pytest.mark.parametrize("name", ["poincare-disk", "fubini-study", "hermpoly"])
def test_hermitian_supremum_over_curves_reaches_curvature(name):
    m = make_metric(name)
    Z, V = sample_jets(m, SamplePlan(3, _radius(m), 1))
    for j in range(Z.shape[1]):
        chk = variational_check(m, JetPoint.of(Z[:, j], V[:, j]), count=20, seed=j, optimize=True)
        assert abs(chk.supremum - chk.K_G) <= 1e-2


@given(z0=complex_in_disk(0.9), z1=complex_in_disk(0.9), v0=nonzero_complex(), v1=nonzero_complex(),
       a=st.floats(0.2, 3), b=st.floats(-1, 0.95))
def test_exp_family_closed_form(z0, z1, v0, v1, a, b):
    if a + b <= 0.05 or abs(z0) ** 2 + abs(z1) ** 2 > 1:
        return
    m = exp_family(a, b, 1, 2)
    z, v = np.array([z0, z1]), np.array([v0, v1])
    t = np.sum(np.abs(z) ** 2)
    s = abs(np.vdot(v, z)) ** 2 / np.sum(np.abs(v) ** 2)
    K, _ = holomorphic_sectional_curvature(m, JetPoint.of(z, v))
    assert K == pytest.approx(-2 * (a + b) * np.exp(-(a * t + b * s)), abs=1e-8)


@given(z=complex_in_disk(0.95), w=st.complex_numbers(max_magnitude=3))
def test_disk_curves_stay_below_minus_four(z, w):
    ks = induced_curvatures(poincare_disk(), JetPoint.of([z], [1.0]), np.array([[w]]))
    assert ks[0] <= -4 + 1e-8
