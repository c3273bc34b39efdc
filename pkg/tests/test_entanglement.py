"""Tests for the entanglement optimizer, closed forms, and quantumness."""

import math

import numpy as np
import pytest

from geoment.entanglement import (
    CertificateReport,
    EntanglementResult,
    OptimizerConfig,
    average_overlap_quadrature,
    balanced_dicke_asymptotic,
    bures_from_entanglement,
    bures_quantumness,
    certified_n5_cos_theta0,
    certified_n5_entanglement,
    dicke_entanglement_closed_form,
    dicke_form_of_maximal_states,
    geometric_entanglement,
    symmetric_upper_bound,
)
from geoment.errors import ConvergenceError
from geoment.states import (
    BlochPoint,
    DickeVector,
    MajoranaSet,
    apply_global_rotation,
    coherent_state,
    dicke_basis_state,
    dicke_from_majorana,
    majorana_from_dicke,
    sqrt_binomials,
)


def random_state(rng, n):
    return DickeVector(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))


def ghz(n):
    coeffs = np.zeros(n + 1)
    coeffs[0] = coeffs[n] = 1.0
    return DickeVector(coeffs)


# --- oracle: independent dense-grid maximization ------------------------------


def dense_grid_max_overlap_sq(d, n_theta=2001, n_phi=4001):
    """Brute-force grid maximum of the squared overlap, written from scratch."""
    n = d.n_qubits
    k = np.arange(n + 1)
    weights = np.conj(d.coeffs) * sqrt_binomials(n)
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    u = (
        np.cos(thetas / 2)[:, None] ** (n - k)[None, :]
        * np.sin(thetas / 2)[:, None] ** k[None, :]
    )
    amp = (weights * u) @ np.exp(1j * np.outer(k, phis))
    return float(np.max(np.abs(amp) ** 2))


# --- closed forms -------------------------------------------------------------


def test_closed_form_values():
    assert dicke_entanglement_closed_form(3, 1) == pytest.approx(5 / 9, abs=1e-15)
    assert dicke_entanglement_closed_form(5, 0) == 0.0
    assert dicke_entanglement_closed_form(5, 5) == 0.0
    assert dicke_entanglement_closed_form(4, 2) == pytest.approx(0.625, abs=1e-15)


def test_closed_form_rejects_bad_k():
    with pytest.raises(ValueError):
        dicke_entanglement_closed_form(4, 5)


def test_balanced_asymptotic_values():
    assert balanced_dicke_asymptotic(100) == pytest.approx(0.9202115, abs=1e-7)
    previous = 0.0
    for n in (10, 100, 1000, 10**6):
        value = balanced_dicke_asymptotic(n)
        assert value > previous
        previous = value
    assert balanced_dicke_asymptotic(10**6) < 1.0


def test_balanced_closed_form_approaches_asymptotic():
    diffs = []
    for n in (20, 40, 60, 100):
        exact = dicke_entanglement_closed_form(n, n // 2)
        diffs.append(abs(exact - balanced_dicke_asymptotic(n)))
    assert all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))
    assert diffs[-1] < 5e-4


def test_upper_bound_values():
    assert symmetric_upper_bound(1) == pytest.approx(0.5)
    assert symmetric_upper_bound(5) == pytest.approx(5 / 6)
    assert symmetric_upper_bound(6) == pytest.approx(6 / 7)
    assert 0.7011 < symmetric_upper_bound(5)
    assert 7 / 9 < symmetric_upper_bound(6)


# --- the optimizer ------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 11))
def test_ghz_entanglement(n):
    result = geometric_entanglement(ghz(n))
    assert result.e_g == pytest.approx(0.5, abs=1e-9)


def test_w_state():
    result = geometric_entanglement(dicke_basis_state(3, 1))
    assert result.e_g == pytest.approx(5 / 9, abs=1e-9)


def test_six_qubit_maximal_state_and_maximizer_count():
    result = geometric_entanglement(dicke_form_of_maximal_states(6))
    assert result.e_g == pytest.approx(7 / 9, abs=1e-9)
    assert len(result.maximizers) == 8


def test_maximizers_reproduce_reported_value():
    rng = np.random.default_rng(2)
    cfg = OptimizerConfig()
    for n in (3, 6, 9):
        d = random_state(rng, n)
        result = geometric_entanglement(d, cfg)
        for p in result.maximizers:
            k = np.arange(n + 1)
            amp = np.vdot(
                d.coeffs,
                coherent_state(n, p),
            )
            assert abs(abs(amp) ** 2 - result.overlap_sq) <= cfg.refinement_tolerance


@pytest.mark.parametrize("n", [2, 3, 4])
def test_against_dense_grid_oracle(n):
    rng = np.random.default_rng(50 + n)
    for _ in range(3):
        d = random_state(rng, n)
        brute = dense_grid_max_overlap_sq(d)
        result = geometric_entanglement(d)
        assert result.overlap_sq >= brute - 1e-12
        assert abs(result.overlap_sq - brute) < 1e-6


def test_closed_form_consistency_moderate_n():
    for n in (7, 12, 16):
        for k in range(n + 1):
            result = geometric_entanglement(dicke_basis_state(n, k))
            assert result.e_g == pytest.approx(
                dicke_entanglement_closed_form(n, k), abs=1e-9
            )


def test_rotation_invariance():
    rng = np.random.default_rng(77)
    for n in (3, 7, 12):
        d = random_state(rng, n)
        base = geometric_entanglement(d).e_g
        for _ in range(3):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            rotated = apply_global_rotation(
                majorana_from_dicke(d), axis, rng.uniform(0, 2 * math.pi)
            )
            rotated_e = geometric_entanglement(dicke_from_majorana(rotated)).e_g
            assert abs(rotated_e - base) < 1e-7


def test_bound_strict_on_random_states():
    rng = np.random.default_rng(123)
    for n in (2, 6, 14, 20):
        for _ in range(3):
            result = geometric_entanglement(random_state(rng, n))
            assert result.e_g < symmetric_upper_bound(n)


def test_deterministic_for_fixed_config():
    rng = np.random.default_rng(5)
    d = random_state(rng, 8)
    r1 = geometric_entanglement(d)
    r2 = geometric_entanglement(d)
    assert r1.e_g == r2.e_g
    assert [(p.theta, p.phi) for p in r1.maximizers] == [
        (p.theta, p.phi) for p in r2.maximizers
    ]


def test_result_invariants_enforced():
    with pytest.raises(ValueError):
        EntanglementResult(e_g=0.5, overlap_sq=0.6, maximizers=())
    with pytest.raises(ValueError):
        EntanglementResult(e_g=1.2, overlap_sq=-0.2, maximizers=())


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(grid_theta=4)
    with pytest.raises(ValueError):
        OptimizerConfig(refinement_tolerance=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(max_refinement_steps=0)


# --- sphere-average identity --------------------------------------------------


def test_quadrature_identity_n4():
    rng = np.random.default_rng(8)
    d = random_state(rng, 4)
    assert average_overlap_quadrature(d) == pytest.approx(0.2, abs=1e-10)


def test_quadrature_identity_coherent():
    d = dicke_basis_state(3, 0)
    assert average_overlap_quadrature(d) == pytest.approx(0.25, abs=1e-10)


def test_quadrature_identity_n10():
    rng = np.random.default_rng(9)
    d = random_state(rng, 10)
    assert average_overlap_quadrature(d) == pytest.approx(1 / 11, abs=1e-10)


def test_quadrature_matches_monte_carlo():
    # Independent check of the quadrature implementation: seeded uniform
    # sphere sampling, 3-sigma agreement.
    rng = np.random.default_rng(1234)
    n = 6
    d = random_state(rng, n)
    samples = 10**6
    z = rng.uniform(-1.0, 1.0, size=samples)
    phi = rng.uniform(0.0, 2 * math.pi, size=samples)
    theta = np.arccos(z)
    k = np.arange(n + 1)
    u = (
        np.cos(theta / 2)[:, None] ** (n - k)[None, :]
        * np.sin(theta / 2)[:, None] ** k[None, :]
    )
    amp = (u * (np.conj(d.coeffs) * sqrt_binomials(n))) * np.exp(
        1j * np.outer(phi, k)
    )
    f = np.abs(amp.sum(axis=1)) ** 2
    mc = float(np.mean(f))
    sigma = float(np.std(f) / math.sqrt(samples))
    quad = average_overlap_quadrature(d)
    assert abs(quad - mc) < 3 * sigma


def test_quadrature_implies_max_above_average():
    rng = np.random.default_rng(10)
    for n in (3, 8):
        d = random_state(rng, n)
        result = geometric_entanglement(d)
        assert result.overlap_sq > average_overlap_quadrature(d)


# --- certified small-n values ---------------------------------------------------


def test_certified_roots_match_printed_digits():
    assert math.floor(certified_n5_entanglement() * 1e4) / 1e4 == 0.7011
    theta0 = math.acos(certified_n5_cos_theta0())
    assert math.floor(theta0 * 1e4) / 1e4 == 1.8737


def test_dicke_forms_of_maximal_states():
    r4 = geometric_entanglement(dicke_form_of_maximal_states(4))
    assert r4.e_g == pytest.approx(2 / 3, abs=1e-9)
    r6 = geometric_entanglement(dicke_form_of_maximal_states(6))
    assert r6.e_g == pytest.approx(7 / 9, abs=1e-9)
    r5 = geometric_entanglement(dicke_form_of_maximal_states(5))
    assert r5.e_g == pytest.approx(certified_n5_entanglement(), abs=1e-8)


def test_dicke_form_n5_geometry_matches_certificate():
    m5 = majorana_from_dicke(dicke_form_of_maximal_states(5))
    from geoment.entanglement import _apex_aligned_base_cos

    cos_mean, spread = _apex_aligned_base_cos(m5)
    assert spread < 1e-12
    assert cos_mean == pytest.approx(certified_n5_cos_theta0(), abs=1e-8)


def test_dicke_form_rejects_other_n():
    with pytest.raises(ValueError):
        dicke_form_of_maximal_states(3)


# --- Bures quantumness ----------------------------------------------------------


def test_quantumness_of_coherent_state_is_zero():
    d = dicke_basis_state(5, 0)
    assert bures_quantumness(d) == pytest.approx(0.0, abs=1e-7)


def test_quantumness_of_ghz():
    assert bures_quantumness(ghz(4)) == pytest.approx(
        math.sqrt(2 - math.sqrt(2)), abs=1e-8
    )
    assert bures_quantumness(ghz(4)) == pytest.approx(0.7653669, abs=1e-6)


def test_quantumness_of_six_qubit_maximal_state():
    q = bures_quantumness(dicke_form_of_maximal_states(6))
    assert q == pytest.approx(math.sqrt(2 - 2 * math.sqrt(2 / 9)), abs=1e-8)


def test_quantumness_identity_and_monotonicity():
    grid = np.linspace(0.0, 0.999, 400)
    values = [bures_from_entanglement(e) for e in grid]
    assert all(b > a for a, b in zip(values, values[1:]))
    rng = np.random.default_rng(3)
    for n in (3, 8):
        d = random_state(rng, n)
        e = geometric_entanglement(d).e_g
        assert bures_quantumness(d) == pytest.approx(
            math.sqrt(2 - 2 * math.sqrt(1 - e)), abs=1e-12
        )


def test_quantumness_rejects_out_of_range():
    with pytest.raises(ValueError):
        bures_from_entanglement(1.0)
