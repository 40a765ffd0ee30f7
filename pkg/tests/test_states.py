"""Tests for states, Born distributions, expectations, and spec parsing."""

import numpy as np
import pytest

from shadowlab.cliffords import (
    GlobalClifford,
    HaarUnitary,
    pauli_layer_from_indices,
    sample_global,
    sample_haar,
    to_unitary,
)
from shadowlab.paulis import PauliString
from shadowlab.states import (
    OutcomeDistribution,
    QuantumState,
    SpecError,
    born_distribution,
    expectation,
    ghz_projector,
    ghz_theta,
    load_operator,
    parse_observable,
    parse_state,
    partial_trace,
    sample_bitstrings,
    save_operator,
)


def random_density(d, rng):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


class TestQuantumState:
    """Validation and conversions of the state container."""

    def test_pure_normalization_enforced(self):
        """Unnormalized statevectors are rejected."""
        with pytest.raises(ValueError, match="unit norm"):
            QuantumState(1, "pure", np.array([1.0, 1.0]))

    def test_density_validation(self):
        """Non-PSD matrices are rejected."""
        bad = np.diag([1.5, -0.5])
        with pytest.raises(ValueError, match="positive semidefinite"):
            QuantumState(1, "density", bad)

    def test_density_matrix_of_pure(self):
        """density_matrix() of a pure state is the outer product."""
        s = ghz_theta(2)
        rho = s.density_matrix()
        assert np.max(np.abs(rho - np.outer(s.data, s.data.conj()))) < 1e-14

    def test_unknown_kind(self):
        """Unknown state kinds are rejected."""
        with pytest.raises(ValueError, match="unknown state kind"):
            QuantumState(1, "mixed", np.eye(2) / 2)


class TestGHZ:
    """The phased GHZ family."""

    def test_ghz_amplitudes(self):
        """Only the all-zeros and all-ones amplitudes are populated."""
        s = ghz_theta(3, 0.7)
        assert abs(s.data[0] - 1 / np.sqrt(2)) < 1e-14
        assert abs(s.data[-1] - np.exp(0.7j) / np.sqrt(2)) < 1e-14
        assert np.max(np.abs(s.data[1:-1])) == 0.0

    def test_theta_pi_is_orthogonal_to_theta_zero(self):
        """<GHZ_0|GHZ_pi> = 0."""
        a, b = ghz_theta(4, 0.0).data, ghz_theta(4, np.pi).data
        assert abs(np.vdot(a, b)) < 1e-14

    def test_projector(self):
        """ghz_projector is the rank-one projector onto the state."""
        p = ghz_projector(3, 0.3)
        assert np.max(np.abs(p @ p - p)) < 1e-14
        assert abs(np.trace(p) - 1.0) < 1e-14
        v = ghz_theta(3, 0.3).data
        assert abs(np.vdot(v, p @ v) - 1.0) < 1e-14


class TestBornDistribution:
    """Born probabilities under the three descriptor types."""

    def test_pauli_layer_pure_matches_dense(self):
        """Layer fast path equals the dense |U psi|^2."""
        rng = np.random.default_rng(0)
        for _ in range(10):
            layer = pauli_layer_from_indices(rng.integers(0, 24, 3))
            v = rng.normal(size=8) + 1j * rng.normal(size=8)
            s = QuantumState.pure(v / np.linalg.norm(v))
            p = born_distribution(s, layer).probabilities
            expect = np.abs(to_unitary(layer) @ s.data) ** 2
            assert np.max(np.abs(p - expect)) < 1e-12

    def test_pauli_layer_density_matches_dense(self):
        """Layer fast path on densities equals diag(U rho U^dag)."""
        rng = np.random.default_rng(1)
        layer = pauli_layer_from_indices(rng.integers(0, 24, 2))
        rho = random_density(4, rng)
        s = QuantumState.density(rho)
        p = born_distribution(s, layer).probabilities
        u = to_unitary(layer)
        assert np.max(np.abs(p - np.real(np.diag(u @ rho @ u.conj().T)))) < 1e-12

    def test_global_clifford_matches_dense(self):
        """Tableau fast path equals the dense computation."""
        rng = np.random.default_rng(2)
        tab = sample_global(3, rng)
        s = ghz_theta(3, 0.4)
        p = born_distribution(s, GlobalClifford(tab)).probabilities
        u = to_unitary(GlobalClifford(tab))
        assert np.max(np.abs(p - np.abs(u @ s.data) ** 2)) < 1e-12

    def test_haar_descriptor(self):
        """Haar descriptors go through the dense path."""
        rng = np.random.default_rng(3)
        h = HaarUnitary(sample_haar(4, rng))
        s = ghz_theta(2)
        p = born_distribution(s, h).probabilities
        assert abs(p.sum() - 1.0) < 1e-12

    def test_distribution_validation(self):
        """Probability vectors must be nonnegative and normalized."""
        with pytest.raises(ValueError, match="negative probability"):
            OutcomeDistribution(1, np.array([1.2, -0.2]))
        with pytest.raises(ValueError, match="sum to"):
            OutcomeDistribution(1, np.array([0.4, 0.4]))

    def test_sampling_frequencies(self):
        """Sampled outcome frequencies approach the distribution."""
        rng = np.random.default_rng(4)
        dist = OutcomeDistribution(2, np.array([0.4, 0.3, 0.2, 0.1]))
        draws = sample_bitstrings(dist, 200000, rng)
        freq = np.bincount(draws, minlength=4) / len(draws)
        assert np.max(np.abs(freq - dist.probabilities)) < 5e-3

    def test_sampling_deterministic(self):
        """Equal generators give equal outcome sequences."""
        dist = OutcomeDistribution(1, np.array([0.5, 0.5]))
        a = sample_bitstrings(dist, 50, np.random.default_rng(5))
        b = sample_bitstrings(dist, 50, np.random.default_rng(5))
        assert np.array_equal(a, b)


class TestExpectation:
    """tr(O rho) for both observable kinds."""

    def test_pauli_expectation_matches_dense(self):
        """PauliString path equals the dense trace."""
        rng = np.random.default_rng(6)
        for _ in range(10):
            rho = random_density(4, rng)
            s = QuantumState.density(rho)
            p = PauliString.from_codes(rng.integers(0, 4, 2))
            assert abs(expectation(s, p) - np.trace(p.to_matrix() @ rho).real) < 1e-12

    def test_ghz_stabilizer_values(self):
        """GHZ_0 expectation of ZZ:pad and XX...X stabilizers is 1."""
        s = ghz_theta(4)
        assert abs(expectation(s, PauliString.from_label("ZZII")) - 1.0) < 1e-14
        assert abs(expectation(s, PauliString.from_label("XXXX")) - 1.0) < 1e-14
        assert abs(expectation(s, PauliString.from_label("ZIII"))) < 1e-14

    def test_non_hermitian_rejected(self):
        """Dense observables must be Hermitian."""
        s = ghz_theta(1)
        with pytest.raises(ValueError, match="Hermitian"):
            expectation(s, np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_odd_phase_rejected(self):
        """PauliStrings with phase +-i are not observables."""
        s = ghz_theta(1)
        with pytest.raises(ValueError, match="phase"):
            expectation(s, PauliString.from_label("+iX"))


class TestPartialTrace:
    """Reduced density matrices via einsum."""

    def test_product_state_factorizes(self):
        """Partial trace of a product density recovers the factors."""
        rng = np.random.default_rng(7)
        a, b = random_density(2, rng), random_density(4, rng)
        rho = np.kron(a, b)
        assert np.max(np.abs(partial_trace(rho, [0], 3) - a)) < 1e-12
        assert np.max(np.abs(partial_trace(rho, [1, 2], 3) - b)) < 1e-12

    def test_trace_preserved(self):
        """The reduced matrix keeps unit trace."""
        rng = np.random.default_rng(8)
        rho = random_density(8, rng)
        red = partial_trace(rho, [1], 3)
        assert abs(np.trace(red).real - 1.0) < 1e-12


class TestPersistence:
    """Operator file round trips."""

    def test_save_load_round_trip(self, tmp_path):
        """Operators survive the text round trip exactly."""
        rng = np.random.default_rng(9)
        o = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        path = tmp_path / "op.txt"
        save_operator(path, o)
        back = load_operator(path)
        assert np.array_equal(back, o)

    def test_load_shape_errors(self, tmp_path):
        """Malformed files produce row-count errors."""
        path = tmp_path / "bad.txt"
        path.write_text("2\n1,0 0,0\n")
        with pytest.raises(ValueError, match="expected 2 matrix rows"):
            load_operator(path)


class TestSpecParsing:
    """The observable and state mini-grammars."""

    def test_pauli_spec(self):
        """pauli: specs give PauliStrings of the right length."""
        p = parse_observable("pauli:ZZIII", 5)
        assert isinstance(p, PauliString)
        assert p.weight == 2

    def test_pauli_length_mismatch(self):
        """Length mismatches carry the column offset."""
        with pytest.raises(SpecError, match="does not match n=5"):
            parse_observable("pauli:ZZ", 5)

    def test_ghz_proj_spec(self):
        """ghz_proj: specs give the dense projector."""
        o = parse_observable("ghz_proj:n=3,theta=0.5", 3)
        assert np.max(np.abs(o - ghz_projector(3, 0.5))) < 1e-14

    def test_ghz_proj_requires_n(self):
        """Missing n= is a spec error."""
        with pytest.raises(SpecError, match="requires n="):
            parse_observable("ghz_proj:theta=0.0", 3)

    def test_unknown_kind_position(self):
        """Unknown kinds report column 0."""
        with pytest.raises(SpecError, match="col 0"):
            parse_observable("spam:XX", 2)

    def test_bad_value_position(self):
        """Bad values report the column of the offending token."""
        with pytest.raises(SpecError, match="col 11: bad value 'two'"):
            parse_observable("ghz_proj:n=two", 2)

    def test_file_observable(self, tmp_path):
        """file: specs load and validate Hermiticity."""
        path = tmp_path / "op.txt"
        save_operator(path, np.diag([1.0, -1.0]))
        o = parse_observable(f"file:{path}", 1)
        assert np.max(np.abs(o - np.diag([1.0, -1.0]))) < 1e-14
        save_operator(path, np.array([[0, 1], [0, 0]], dtype=complex))
        with pytest.raises(SpecError, match="not Hermitian"):
            parse_observable(f"file:{path}", 1)

    def test_state_specs(self, tmp_path):
        """ghz: and file: state specs both produce valid states."""
        s = parse_state("ghz:n=4,theta=3.14159")
        assert s.n == 4 and s.kind == "pure"
        path = tmp_path / "vec.txt"
        path.write_text("0.6,0 0.8,0\n")
        s2 = parse_state(f"file:{path}")
        assert s2.kind == "pure"
        assert abs(abs(s2.data[0]) - 0.6) < 1e-12

    def test_state_density_file(self, tmp_path):
        """Density files are recognized by the leading dimension line."""
        rng = np.random.default_rng(10)
        rho = random_density(2, rng)
        path = tmp_path / "rho.txt"
        save_operator(path, rho)
        s = parse_state(f"file:{path}")
        assert s.kind == "density"
        assert np.max(np.abs(s.density_matrix() - rho)) < 1e-12
