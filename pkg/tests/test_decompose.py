import numpy as np
import pytest

from qdecomp import (
    Decomposition,
    average_trace_distance,
    bounds,
    continuous_swap,
    eigen_decomposition,
    equalize,
    hs_inner_product,
    make_pair,
    max_mixed_pair,
    max_weight,
    maximally_mixed,
    mix,
    pure_sigma_pair,
    qubit_pair,
    random_density,
    random_unitary,
    rank2_sigma_pair,
    unbiased_against,
    validate_density,
    verify_pair,
)
from qdecomp.decompose import bloch_vector, deflate, state_from_bloch
from qdecomp.errors import IndexOutOfRange, NotUnitary, OutsideSupport
from qdecomp.linalg import PureState, hermitian_eig
from qdecomp.rng import generator
from tests.conftest import random_mixed_decomposition, random_state_pair

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
FOURIER2 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def qubit_from_bloch(vec):
    paulis = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    m = np.eye(2, dtype=complex) / 2
    for c, p in zip(vec, paulis):
        m = m + c * p / 2
    return validate_density(m)


def states_match(actual, expected_vectors, atol=1e-10):
    """Greedy match of decomposition states against expected vectors (any order)."""
    remaining = list(expected_vectors)
    for st in actual:
        scores = [abs(np.vdot(st.amplitudes, v)) ** 2 for v in remaining]
        k = int(np.argmax(scores))
        if scores[k] < 1 - atol:
            return False
        remaining.pop(k)
    return not remaining


class TestEigenDecomposition:
    def test_diagonal(self):
        d = eigen_decomposition(validate_density(np.diag([0.75, 0.25]).astype(complex)))
        np.testing.assert_allclose(d.weights, [0.75, 0.25])
        assert states_match(d.states, [KET0, KET1])
        assert d.minimal

    def test_maximally_mixed_qutrit(self):
        d = eigen_decomposition(maximally_mixed(3))
        np.testing.assert_allclose(d.weights, [1 / 3] * 3)
        gram = d.state_matrix.conj().T @ d.state_matrix
        np.testing.assert_allclose(gram, np.eye(3), atol=1e-12)

    def test_pure(self):
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        d = eigen_decomposition(validate_density(np.outer(plus, plus)))
        assert len(d) == 1
        assert d.weights[0] == pytest.approx(1.0)
        assert abs(np.vdot(d.states[0].amplitudes, plus)) ** 2 == pytest.approx(1.0)


class TestMix:
    def test_identity_is_noop(self):
        d = eigen_decomposition(random_density(3, 3, seed=4))
        d2 = mix(d, np.eye(3))
        np.testing.assert_allclose(d2.weights, d.weights)
        for a, b in zip(d.states, d2.states):
            np.testing.assert_allclose(a.amplitudes, b.amplitudes)

    def test_fourier_on_maximally_mixed(self):
        d = mix(eigen_decomposition(maximally_mixed(2)), FOURIER2)
        np.testing.assert_allclose(d.weights, [0.5, 0.5])
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        minus = np.array([1, -1], dtype=complex) / np.sqrt(2)
        assert states_match(d.states, [plus, minus])

    def test_reconstruction_invariant_bulk(self):
        for dim in range(2, 7):
            for trial in range(1000):
                rng = generator(dim * 100_000 + trial)
                rank = trial % dim + 1
                dm = random_density(dim, rank, seed=dim * 1000 + trial)
                d = eigen_decomposition(dm)
                u = random_unitary(len(d), rng)
                mixed = mix(d, u)
                assert mixed.reconstruction_error() <= 1e-9

    def test_rejects_non_unitary(self):
        d = eigen_decomposition(maximally_mixed(2))
        with pytest.raises(NotUnitary):
            mix(d, np.array([[1, 0], [1, 1]], dtype=complex))

    def test_rejects_wrong_shape(self):
        d = eigen_decomposition(maximally_mixed(2))
        with pytest.raises(NotUnitary):
            mix(d, np.eye(3))


class TestContinuousSwap:
    def test_theta_zero_is_identity(self):
        d = eigen_decomposition(random_density(3, 3, seed=8))
        d2 = continuous_swap(d, 0, 2, 0.0)
        np.testing.assert_allclose(d2.weights, d.weights)
        for a, b in zip(d.states, d2.states):
            np.testing.assert_allclose(a.amplitudes, b.amplitudes)

    def test_theta_pi_swaps_elements(self):
        d = eigen_decomposition(validate_density(np.diag([0.6, 0.3, 0.1]).astype(complex)))
        d2 = continuous_swap(d, 0, 1, np.pi)
        assert d2.weights[0] == pytest.approx(d.weights[1], abs=1e-14)
        assert d2.weights[1] == pytest.approx(d.weights[0], abs=1e-14)
        np.testing.assert_allclose(d2.states[0].amplitudes, d.states[1].amplitudes, atol=1e-14)
        np.testing.assert_allclose(d2.states[1].amplitudes, d.states[0].amplitudes, atol=1e-14)

    def test_theta_half_pi_on_maximally_mixed(self):
        d2 = continuous_swap(eigen_decomposition(maximally_mixed(2)), 0, 1, np.pi / 2)
        np.testing.assert_allclose(d2.weights, [0.5, 0.5])
        expected = [
            np.array([1, -1], dtype=complex) / np.sqrt(2),
            np.array([1, 1], dtype=complex) / np.sqrt(2),
        ]
        assert states_match(d2.states, expected)

    def test_invalid_indices(self):
        d = eigen_decomposition(maximally_mixed(2))
        with pytest.raises(IndexOutOfRange):
            continuous_swap(d, 0, 2, 0.5)
        with pytest.raises(IndexOutOfRange):
            continuous_swap(d, 1, 1, 0.5)


class TestEqualize:
    def test_maximally_mixed_against_projector(self):
        proj = np.diag([1.0, 0.0]).astype(complex)
        d = equalize(maximally_mixed(2), proj)
        assert len(d) == 2
        np.testing.assert_allclose(d.weights, [0.5, 0.5], atol=1e-9)
        for st in d.states:
            assert abs(st.amplitudes[0]) ** 2 == pytest.approx(0.5, abs=1e-9)

    def test_diagonal_against_projector(self):
        rho = validate_density(np.diag([0.75, 0.25]).astype(complex))
        d = equalize(rho, np.diag([1.0, 0.0]).astype(complex))
        for st in d.states:
            assert abs(st.amplitudes[0]) ** 2 == pytest.approx(0.75, abs=1e-9)

    def test_pure_state_trivial(self):
        rho = random_density(3, 1, seed=77)
        f = np.diag([0.3, 0.5, 0.2]).astype(complex)
        d = equalize(rho, f)
        assert len(d) == 1

    def test_output_contract_random(self):
        for seed in range(100):
            dim = 2 + seed % 5
            rank = seed % dim + 1
            rho = random_density(dim, rank, seed=seed + 50)
            rng = generator(seed)
            f = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            f = (f + f.conj().T) / 2
            d = equalize(rho, f, seed=seed)
            assert len(d) == rank
            assert d.minimal
            target = float(np.trace(rho.matrix @ f).real)
            for st in d.states:
                val = float(np.real(np.vdot(st.amplitudes, f @ st.amplitudes)))
                assert abs(val - target) <= 1e-9

    def test_weighted_merit_strictly_decreases(self):
        for seed in range(60):
            dim = 3 + seed % 3
            rho = random_density(dim, dim, seed=seed + 900)
            rng = generator(seed + 900)
            f = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            f = (f + f.conj().T) / 2
            history = []
            equalize(rho, f, seed=seed, history=history)
            weighted = [h["weighted_merit"] for h in history]
            for prev, cur in zip(weighted, weighted[1:]):
                assert cur <= prev + 1e-12

    def test_mean_conserved_every_round(self):
        rho = random_density(4, 4, seed=321)
        rng = generator(321)
        f = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        f = (f + f.conj().T) / 2
        target = float(np.trace(rho.matrix @ f).real)
        history = []
        equalize(rho, f, history=history)
        for h in history:
            assert abs(h["mean"] - target) <= 1e-10

    def test_sum_merit_can_rise_while_weighted_falls(self):
        # counterexample: a heavy element pinned at the minimum makes the
        # plain sum of deviations jump even though the weighted sum falls
        rho = validate_density(np.diag([0.989, 0.01, 0.001]).astype(complex))
        f = np.diag([0.001, 2.0, 0.0]).astype(complex)
        history = []
        d = equalize(rho, f, history=history)
        assert len(d) == 3
        merits = [h["merit"] for h in history]
        weighted = [h["weighted_merit"] for h in history]
        assert any(b > a + 1e-9 for a, b in zip(merits, merits[1:]))
        for prev, cur in zip(weighted, weighted[1:]):
            assert cur <= prev + 1e-12

    def test_rejects_non_hermitian_observable(self):
        from qdecomp.errors import NotHermitian

        with pytest.raises(NotHermitian):
            equalize(maximally_mixed(2), np.array([[0, 1], [0, 0]], dtype=complex))


class TestUnbiasedAgainst:
    def test_maximally_mixed_sigma_trivial(self):
        rho = random_density(3, 3, seed=31)
        d = unbiased_against(rho, maximally_mixed(3))
        hs = hs_inner_product(rho, maximally_mixed(3))
        for st in d.states:
            val = float(np.real(np.vdot(st.amplitudes, maximally_mixed(3).matrix @ st.amplitudes)))
            assert abs(val - hs) <= 1e-12

    def test_projector_sigma(self):
        d = unbiased_against(maximally_mixed(2), validate_density(np.outer(KET0, KET0)))
        for st in d.states:
            assert abs(st.amplitudes[0]) ** 2 == pytest.approx(0.5, abs=1e-9)

    def test_rho_equal_sigma(self):
        rho = random_density(3, 3, seed=44)
        purity = hs_inner_product(rho, rho)
        d = unbiased_against(rho, rho)
        for st in d.states:
            val = float(np.real(np.vdot(st.amplitudes, rho.matrix @ st.amplitudes)))
            assert abs(val - purity) <= 1e-9


class TestQubitPair:
    def test_both_maximally_mixed(self):
        pair = qubit_pair(maximally_mixed(2), maximally_mixed(2))
        assert pair.max_deviation <= 1e-9
        assert pair.delta_avg == pytest.approx(0.7071067811865476, abs=1e-9)
        overlaps = pair.overlaps()
        np.testing.assert_allclose(overlaps, 0.5, atol=1e-12)

    def test_mixed_against_x_pure(self):
        rho = maximally_mixed(2)
        sigma = qubit_from_bloch([1.0, 0.0, 0.0])
        pair = qubit_pair(rho, sigma)
        # rho splits across the two poles orthogonal to both axes
        for st in pair.left.states:
            b = bloch_vector(validate_density(np.outer(st.amplitudes, st.amplitudes.conj())))
            assert abs(b[0]) <= 1e-9
            assert abs(abs(b[1]) - 1.0) <= 1e-9
        np.testing.assert_allclose(pair.overlaps(), 0.5, atol=1e-9)

    def test_bloch_oracle_example(self):
        rho = qubit_from_bloch([0.0, 0.0, 0.5])
        sigma = qubit_from_bloch([0.6, 0.0, 0.3])
        pair = qubit_pair(rho, sigma)
        np.testing.assert_allclose(pair.overlaps(), 0.575, atol=1e-9)
        assert pair.hs_product == pytest.approx(0.575, abs=1e-12)

    def test_pure_inputs_collapse(self):
        rho = random_density(2, 1, seed=3)
        sigma = random_density(2, 1, seed=4)
        pair = qubit_pair(rho, sigma)
        assert len(pair.left) == 1 and len(pair.right) == 1
        assert pair.max_deviation <= 1e-9

    def test_random_qubit_pairs(self):
        for seed in range(300):
            rho, sigma = random_state_pair(2, seed + 60_000)
            pair = qubit_pair(rho, sigma)
            assert pair.max_deviation <= 1e-9
            assert abs(pair.delta_avg - bounds(rho, sigma).upper) <= 1e-8


class TestMaxMixedPair:
    def test_qubit_diagonal(self):
        pair = max_mixed_pair(validate_density(np.diag([0.75, 0.25]).astype(complex)))
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        minus = np.array([1, -1], dtype=complex) / np.sqrt(2)
        assert states_match(pair.right.states, [plus, minus])
        np.testing.assert_allclose(pair.overlaps(), 0.5, atol=1e-12)

    def test_qutrit_maximally_mixed(self):
        pair = max_mixed_pair(maximally_mixed(3))
        np.testing.assert_allclose(pair.overlaps(), 1 / 3, atol=1e-12)

    def test_random_full_rank(self):
        for seed in range(20):
            pair = max_mixed_pair(random_density(4, 4, seed=seed + 70))
            assert pair.max_deviation <= 1e-10
            assert pair.hs_product == pytest.approx(0.25, abs=1e-12)

    def test_rank_deficient(self):
        pair = max_mixed_pair(random_density(5, 2, seed=71))
        assert len(pair.left) == 2
        assert len(pair.right) == 5
        assert pair.max_deviation <= 1e-10


class TestMaxWeight:
    def test_diagonal_example(self):
        rho = validate_density(np.diag([0.75, 0.25]).astype(complex))
        psi = PureState(KET0)
        p = max_weight(rho, psi)
        assert p == pytest.approx(0.75, abs=1e-12)
        residual = deflate(rho, psi, p)
        assert residual.rank == 1
        assert abs(np.vdot(KET1, residual.matrix @ KET1).real - 1.0) <= 1e-10

    def test_maximally_mixed(self, rng):
        psi = PureState.from_vector(rng.standard_normal(4) + 1j * rng.standard_normal(4))
        assert max_weight(maximally_mixed(4), psi) == pytest.approx(0.25, abs=1e-10)

    def test_pure_state(self):
        rho = random_density(3, 1, seed=81)
        psi = hermitian_eig(rho).states()[0]
        assert max_weight(rho, psi) == pytest.approx(1.0, abs=1e-9)

    def test_residual_is_valid_and_rank_drops(self):
        for seed in range(50):
            dim = 3 + seed % 3
            rank = 2 + seed % (dim - 1)
            rho = random_density(dim, rank, seed=seed + 91)
            spec = hermitian_eig(rho)
            rng = generator(seed)
            coeff = rng.standard_normal(rank) + 1j * rng.standard_normal(rank)
            psi = PureState.from_vector(spec.vectors[:, :rank] @ coeff)
            p = max_weight(rho, psi)
            assert 0 < p < 1
            residual = deflate(rho, psi, p)
            validate_density(residual.matrix)
            assert residual.rank == rank - 1

    def test_deflate_preserves_functionals(self, rng):
        # algebraic identity: tr(residual F) = (tr(rho F) - p <psi|F|psi>) / (1 - p)
        rho = random_density(4, 3, seed=101)
        spec = hermitian_eig(rho)
        psi = PureState.from_vector(spec.vectors[:, :3] @ (rng.standard_normal(3) + 1j * rng.standard_normal(3)))
        p = max_weight(rho, psi)
        f = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        f = (f + f.conj().T) / 2
        residual = deflate(rho, psi, p)
        lhs = float(np.trace(residual.matrix @ f).real)
        rhs = (
            float(np.trace(rho.matrix @ f).real)
            - p * float(np.real(np.vdot(psi.amplitudes, f @ psi.amplitudes)))
        ) / (1 - p)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_outside_support_raises(self):
        rho = validate_density(np.outer(KET0, KET0))
        with pytest.raises(OutsideSupport):
            max_weight(rho, PureState(KET1))


class TestPureSigmaPair:
    def test_maximally_mixed_against_projector(self):
        pair = pure_sigma_pair(maximally_mixed(2), validate_density(np.outer(KET0, KET0)))
        assert pair.delta_avg == pytest.approx(np.sqrt(0.5), abs=1e-8)
        assert pair.max_deviation <= 1e-8

    def test_identical_pure(self):
        rho = random_density(3, 1, seed=55)
        pair = pure_sigma_pair(rho, rho)
        assert pair.delta_avg == pytest.approx(0.0, abs=1e-7)
        assert pair.hs_product == pytest.approx(1.0, abs=1e-12)

    def test_random_d4(self):
        for seed in range(30):
            rho = random_density(4, 1 + seed % 4, seed=seed + 200)
            sigma = random_density(4, 1, seed=seed + 300)
            pair = pure_sigma_pair(rho, sigma)
            assert pair.max_deviation <= 1e-8
            assert abs(pair.delta_avg - bounds(rho, sigma).upper) <= 1e-7


class TestRank2SigmaPair:
    def test_qubit_cross_check(self):
        for seed in range(30):
            rho = random_density(2, 2, seed=seed + 400)
            sigma = random_density(2, 2, seed=seed + 500)
            via_rank2 = rank2_sigma_pair(rho, sigma)
            via_qubit = qubit_pair(rho, sigma)
            upper = bounds(rho, sigma).upper
            assert via_rank2.max_deviation <= 1e-6
            assert via_qubit.max_deviation <= 1e-9
            assert abs(via_rank2.delta_avg - upper) <= 1e-6
            assert abs(via_qubit.delta_avg - upper) <= 1e-6

    def test_qutrit_maximally_mixed(self):
        for seed in range(20):
            sigma = random_density(3, 2, seed=seed + 600)
            pair = rank2_sigma_pair(maximally_mixed(3), sigma)
            assert pair.max_deviation <= 1e-6

    def test_d4_full_rank_rho(self):
        for seed in range(20):
            rho = random_density(4, 4, seed=seed + 700)
            sigma = random_density(4, 2, seed=seed + 800)
            pair = rank2_sigma_pair(rho, sigma)
            assert pair.max_deviation <= 1e-6
            assert len(pair.left) == 4
            assert len(pair.right) == 2

    def test_pure_rho_delegates(self):
        rho = random_density(3, 1, seed=901)
        sigma = random_density(3, 2, seed=902)
        pair = rank2_sigma_pair(rho, sigma)
        assert len(pair.left) == 1
        assert pair.max_deviation <= 1e-8


class TestVerifyPair:
    def test_constructed_pair_passes(self):
        pair = qubit_pair(random_density(2, 2, seed=21), random_density(2, 2, seed=22))
        rep = verify_pair(pair)
        assert rep.passed
        assert all(rep.checks.values())

    def test_identical_decompositions_fail(self):
        d = eigen_decomposition(maximally_mixed(2))
        rep = verify_pair(make_pair(d, d))
        assert not rep.passed
        assert not rep.checks["unbiased"]
        # overlaps are 0 or 1, nowhere near tr(rho sigma) = 1/2
        assert rep.max_deviation == pytest.approx(0.5, abs=1e-12)

    def test_hand_built_mutually_unbiased_bases(self):
        mm = maximally_mixed(2)
        z_basis = eigen_decomposition(mm)
        x_states = (
            PureState(np.array([1, 1], dtype=complex) / np.sqrt(2)),
            PureState(np.array([1, -1], dtype=complex) / np.sqrt(2)),
        )
        x_basis = Decomposition(weights=np.array([0.5, 0.5]), states=x_states, target=mm)
        rep = verify_pair(make_pair(z_basis, x_basis))
        assert rep.passed
        assert rep.max_deviation <= 1e-15


class TestBlochHelpers:
    def test_state_from_bloch_poles(self):
        np.testing.assert_allclose(state_from_bloch(np.array([0, 0, 1.0])).amplitudes, KET0, atol=1e-15)
        np.testing.assert_allclose(state_from_bloch(np.array([0, 0, -1.0])).amplitudes, KET1, atol=1e-15)

    def test_round_trip(self, rng):
        for _ in range(50):
            v = rng.standard_normal(3)
            v /= np.linalg.norm(v)
            st = state_from_bloch(v)
            dm = validate_density(np.outer(st.amplitudes, st.amplitudes.conj()))
            np.testing.assert_allclose(bloch_vector(dm), v, atol=1e-12)
