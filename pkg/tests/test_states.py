"""Tests for state representations and conversions."""

import itertools
import math

import numpy as np
import pytest

from geoment.errors import ParseError
from geoment.states import (
    BlochPoint,
    DickeVector,
    MajoranaSet,
    align_point_sets,
    apply_global_rotation,
    coherent_overlap,
    coherent_state,
    dicke_basis_state,
    dicke_from_majorana,
    majorana_from_dicke,
    rotation_matrix,
    sqrt_binomials,
)


def random_state(rng, n):
    return DickeVector(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))


def random_points(rng, n):
    pts = tuple(
        BlochPoint(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        for _ in range(n)
    )
    return MajoranaSet(pts)


# --- oracles -----------------------------------------------------------------


def dicke_by_permutation_sum(points):
    """Literal factorial-cost sum over qubit permutations."""
    n = len(points)
    amps = [p.amplitudes for p in points]
    coeffs = np.zeros(n + 1, dtype=complex)
    for k in range(n + 1):
        total = 0.0 + 0.0j
        for sigma in itertools.permutations(range(n)):
            term = 1.0 + 0.0j
            for pos in range(k):
                term *= amps[sigma[pos]][1]
            for pos in range(k, n):
                term *= amps[sigma[pos]][0]
            total += term
        coeffs[k] = math.sqrt(math.comb(n, k)) * total
    return coeffs / np.linalg.norm(coeffs)


def full_statevector(d):
    """Expand a symmetric state into the 2^n computational basis."""
    n = d.n_qubits
    vec = np.zeros(2**n, dtype=complex)
    for idx in range(2**n):
        k = bin(idx).count("1")
        vec[idx] = d.coeffs[k] / math.sqrt(math.comb(n, k))
    return vec


def product_statevector(point, n):
    alpha, beta = point.amplitudes
    one = np.array([alpha, beta])
    vec = one
    for _ in range(n - 1):
        vec = np.kron(vec, one)
    return vec


# --- BlochPoint --------------------------------------------------------------


def test_bloch_point_canonical_ranges():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = BlochPoint(rng.uniform(-10, 10), rng.uniform(-10, 10))
        assert 0.0 <= p.theta <= math.pi
        assert 0.0 <= p.phi < 2 * math.pi
        alpha, beta = p.amplitudes
        assert abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) < 1e-14


def test_bloch_point_pole_gauge():
    assert BlochPoint(0.0, 1.3).phi == 0.0
    assert BlochPoint(math.pi, 2.5).phi == 0.0


def test_bloch_point_negative_theta_wraps():
    p = BlochPoint(-0.4, 1.0)
    assert p.theta == pytest.approx(0.4)
    assert p.phi == pytest.approx(1.0 + math.pi)


def test_bloch_point_from_xyz_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = BlochPoint(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        q = BlochPoint.from_xyz(p.xyz)
        assert np.linalg.norm(p.xyz - q.xyz) < 1e-12


def test_bloch_point_p_accessor():
    p = BlochPoint(math.pi / 3, 0.1)
    assert p.p == pytest.approx(math.cos(math.pi / 6) ** 2)


# --- DickeVector -------------------------------------------------------------


def test_dicke_vector_normalizes():
    d = DickeVector([3.0, 0.0, 4.0])
    assert np.linalg.norm(d.coeffs) == pytest.approx(1.0, abs=1e-15)
    assert d.n_qubits == 2


def test_dicke_vector_rejects_zero():
    with pytest.raises(ValueError):
        DickeVector([0.0, 0.0, 0.0])


def test_dicke_vector_json_round_trip():
    rng = np.random.default_rng(11)
    d = random_state(rng, 5)
    d2 = DickeVector.from_json(d.to_json())
    assert d.fidelity(d2) > 1 - 1e-15


def test_dicke_vector_json_errors():
    with pytest.raises(ParseError):
        DickeVector.from_json("not json")
    with pytest.raises(ParseError):
        DickeVector.from_json('{"n": 2, "re": [1, 0], "im": [0, 0, 0]}')


# --- conversions -------------------------------------------------------------


def test_product_of_ground_states_is_no_excitation():
    m = MajoranaSet((BlochPoint(0.0), BlochPoint(0.0)))
    d = dicke_from_majorana(m)
    assert np.allclose(d.coeffs, [1.0, 0.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (5, 0), (6, 6), (7, 3)])
def test_pole_configurations_give_basis_states(n, k):
    pts = tuple([BlochPoint(0.0)] * (n - k) + [BlochPoint(math.pi)] * k)
    d = dicke_from_majorana(MajoranaSet(pts))
    expected = np.zeros(n + 1)
    expected[k] = 1.0
    assert np.allclose(np.abs(d.coeffs), expected, atol=1e-14)


def test_equatorial_pair_amplitudes():
    # Hand evaluation of the permutation sum with alpha=beta=1/sqrt(2) and
    # alpha=1/sqrt(2), beta=-1/sqrt(2) gives (1, 0, -1)/sqrt(2).
    m = MajoranaSet((BlochPoint(math.pi / 2, 0.0), BlochPoint(math.pi / 2, math.pi)))
    d = dicke_from_majorana(m)
    expected = np.array([1.0, 0.0, -1.0]) / math.sqrt(2)
    assert np.allclose(d.coeffs, expected, atol=1e-14)


def test_matches_permutation_sum_oracle():
    rng = np.random.default_rng(5)
    for n in range(2, 8):
        for _ in range(3):
            m = random_points(rng, n)
            fast = dicke_from_majorana(m).coeffs
            slow = dicke_by_permutation_sum(m.points)
            phase = np.vdot(fast, slow)
            phase /= abs(phase)
            assert np.max(np.abs(fast * phase - slow)) < 1e-10


def test_basis_state_points():
    m = majorana_from_dicke(dicke_basis_state(5, 2))
    thetas = sorted(p.theta for p in m.points)
    assert thetas[:3] == [0.0, 0.0, 0.0]
    assert thetas[3:] == [math.pi, math.pi]


def test_two_qubit_equal_superposition_points():
    d = DickeVector([1.0, 0.0, 1.0])
    m = majorana_from_dicke(d)
    expected = MajoranaSet(
        (BlochPoint(math.pi / 2, math.pi / 2), BlochPoint(math.pi / 2, 3 * math.pi / 2))
    )
    assert m == expected


def test_single_qubit_identity():
    p = BlochPoint(1.1, 2.2)
    d = DickeVector(np.array([math.cos(0.55), math.sin(0.55) * np.exp(2.2j)]))
    m = majorana_from_dicke(d)
    assert m.points[0].theta == pytest.approx(1.1, abs=1e-12)
    assert m.points[0].phi == pytest.approx(2.2, abs=1e-12)


@pytest.mark.parametrize("n", range(2, 21))
def test_round_trip_random_states(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(100):
        d = random_state(rng, n)
        back = dicke_from_majorana(majorana_from_dicke(d))
        assert d.fidelity(back) > 1 - 1e-8


# --- coherent overlap --------------------------------------------------------


def test_overlap_with_itself_is_one():
    d = dicke_basis_state(4, 0)
    assert coherent_overlap(d, BlochPoint(0.0)) == pytest.approx(1.0, abs=1e-15)


def test_ghz_pole_overlap():
    n = 6
    coeffs = np.zeros(n + 1)
    coeffs[0] = coeffs[n] = 1.0
    d = DickeVector(coeffs)
    assert abs(coherent_overlap(d, BlochPoint(0.0))) == pytest.approx(
        1 / math.sqrt(2), abs=1e-14
    )


def test_basis_state_overlap_profile():
    n, k = 6, 2
    d = dicke_basis_state(n, k)
    for theta in (0.3, 1.1, 2.5):
        expected = (
            math.sqrt(math.comb(n, k))
            * math.cos(theta / 2) ** (n - k)
            * math.sin(theta / 2) ** k
        )
        got = coherent_overlap(d, BlochPoint(theta, 0.0))
        assert got == pytest.approx(expected, abs=1e-14)


def test_overlap_against_tensor_contraction():
    rng = np.random.default_rng(9)
    for n in range(2, 7):
        d = random_state(rng, n)
        c = BlochPoint(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        direct = coherent_overlap(d, c)
        brute = np.vdot(full_statevector(d), product_statevector(c, n))
        assert abs(direct - brute) < 1e-12


def test_overlap_bounded_and_tight_only_for_coherent():
    rng = np.random.default_rng(13)
    for n in (2, 5, 9):
        for _ in range(20):
            d = random_state(rng, n)
            c = BlochPoint(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
            assert abs(coherent_overlap(d, c)) <= 1 + 1e-12
        point = BlochPoint(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        coh = DickeVector(coherent_state(n, point))
        assert abs(coherent_overlap(coh, point)) == pytest.approx(1.0, abs=1e-12)


def test_global_phase_moves_through_overlap():
    rng = np.random.default_rng(17)
    d = random_state(rng, 5)
    phase = np.exp(0.77j)
    d2 = DickeVector(d.coeffs * phase)
    c = BlochPoint(1.0, 2.0)
    assert coherent_overlap(d2, c) == pytest.approx(
        coherent_overlap(d, c) * np.conj(phase), abs=1e-14
    )


def test_sqrt_binomials_large_n():
    vals = sqrt_binomials(200)
    assert np.all(np.isfinite(vals))
    assert vals[100] == pytest.approx(math.sqrt(math.comb(200, 100)), rel=1e-12)


# --- rotations ---------------------------------------------------------------


def test_identity_rotation():
    rng = np.random.default_rng(23)
    m = random_points(rng, 4)
    assert apply_global_rotation(m, [0.0, 0.0, 1.0], 0.0) == m


def test_pole_flip():
    m = MajoranaSet((BlochPoint(0.0),))
    flipped = apply_global_rotation(m, [1.0, 0.0, 0.0], math.pi)
    assert flipped.points[0].theta == pytest.approx(math.pi, abs=1e-12)


def test_rotation_rejects_non_unit_axis():
    m = MajoranaSet((BlochPoint(1.0),))
    with pytest.raises(ValueError):
        apply_global_rotation(m, [1.0, 1.0, 0.0], 0.5)


def test_rotation_matrix_orthogonal():
    rng = np.random.default_rng(29)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    r = rotation_matrix(axis, 1.234)
    assert np.allclose(r @ r.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-14)


# --- multiset semantics and text form ---------------------------------------


def test_majorana_multiset_equality():
    rng = np.random.default_rng(31)
    m = random_points(rng, 5)
    shuffled = MajoranaSet(tuple(reversed(m.points)))
    assert m == shuffled
    nudged = MajoranaSet(
        (BlochPoint(m.points[0].theta + 1e-12, m.points[0].phi),) + m.points[1:]
    )
    assert m == nudged
    moved = MajoranaSet(
        (BlochPoint(m.points[0].theta + 1e-5, m.points[0].phi),) + m.points[1:]
    )
    assert m != moved


def test_majorana_text_round_trip():
    rng = np.random.default_rng(37)
    m = random_points(rng, 6)
    back = MajoranaSet.from_text(m.to_text())
    assert back == m


def test_majorana_text_errors():
    with pytest.raises(ParseError):
        MajoranaSet.from_text("1.0\n")
    with pytest.raises(ParseError):
        MajoranaSet.from_text("")


# --- alignment ---------------------------------------------------------------


def test_align_point_sets_recovers_rotation():
    rng = np.random.default_rng(41)
    pts = random_points(rng, 6)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    rotated = apply_global_rotation(pts, axis, 1.9)
    r, residual = align_point_sets(pts.vectors(), rotated.vectors())
    assert residual < 1e-9
    assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
