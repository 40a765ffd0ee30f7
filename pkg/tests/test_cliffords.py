"""Tests for Clifford group elements, tableaux, sampling, and conversion."""

import numpy as np
import pytest

from shadowlab.cliffords import (
    CliffordTableau,
    CONJ_AXIS,
    CONJ_SIGN,
    DIAG_VAL,
    GlobalClifford,
    HaarUnitary,
    PauliLayer,
    SINGLE_CLIFFORDS,
    SINGLE_QUBIT_UNITARIES,
    apply_tableau_to_pure,
    compose,
    conjugate_pauli,
    is_symplectic,
    parse_descriptor,
    pauli_layer_from_indices,
    sample_global,
    sample_haar,
    sample_symplectic_batch,
    sample_tableau_batch,
    serialize_descriptor,
    stabilizer_column_state,
    symplectic_form,
    to_unitary,
    x_image_product,
)
from shadowlab.paulis import PAULI_1Q, PauliString


def phase_free_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over unit phases of max |a - e^{i phi} b|."""
    ov = np.vdot(b.ravel(), a.ravel())
    if abs(ov) < 1e-12:
        return float(np.max(np.abs(a - b)))
    return float(np.max(np.abs(a - (ov / abs(ov)) * b)))


class TestSingleQubitGroup:
    """The 24-element single-qubit Clifford group table."""

    def test_group_size_and_identity_first(self):
        """24 distinct unitaries with the identity at index 0."""
        assert SINGLE_QUBIT_UNITARIES.shape == (24, 2, 2)
        assert np.max(np.abs(SINGLE_QUBIT_UNITARIES[0] - np.eye(2))) < 1e-12

    def test_all_unitary(self):
        """Every element is unitary."""
        for u in SINGLE_QUBIT_UNITARIES:
            assert np.max(np.abs(u @ u.conj().T - np.eye(2))) < 1e-12

    def test_closed_under_multiplication(self):
        """Products land back in the set up to global phase."""
        rng = np.random.default_rng(0)
        for _ in range(40):
            a, b = rng.integers(0, 24, 2)
            prod = SINGLE_QUBIT_UNITARIES[a] @ SINGLE_QUBIT_UNITARIES[b]
            dists = [phase_free_distance(prod, u) for u in SINGLE_QUBIT_UNITARIES]
            assert min(dists) < 1e-9

    def test_conjugation_tables_match_dense(self):
        """CONJ_AXIS/CONJ_SIGN reproduce u P u^dag for all 24 x 3 cases."""
        for c in range(24):
            u = SINGLE_QUBIT_UNITARIES[c]
            for code, letter in ((1, "X"), (2, "Z"), (3, "Y")):
                img = u @ PAULI_1Q[letter] @ u.conj().T
                ax, sg = int(CONJ_AXIS[c, code]), int(CONJ_SIGN[c, code])
                target = sg * PauliString.from_codes([ax]).to_matrix()
                assert np.max(np.abs(img - target)) < 1e-12

    def test_diag_val_table(self):
        """DIAG_VAL holds the diagonal of u sigma u^dag in the Z basis."""
        for c in range(24):
            u = SINGLE_QUBIT_UNITARIES[c]
            for code, letter in ((0, "I"), (1, "X"), (2, "Z"), (3, "Y")):
                diag = np.real(np.diag(u @ PAULI_1Q[letter] @ u.conj().T))
                assert np.max(np.abs(diag - DIAG_VAL[c, code])) < 1e-12

    def test_image_properties(self):
        """SingleQubitClifford image accessors agree with the dense images."""
        g = SINGLE_CLIFFORDS[7]
        u = g.matrix
        imx = g.image_of_x
        assert np.max(np.abs(u @ PAULI_1Q["X"] @ u.conj().T - imx.to_matrix())) < 1e-12


class TestTableaux:
    """Tableau construction, conjugation, and composition."""

    def test_identity_tableau_rows(self):
        """Identity tableau maps X_i -> X_i and Z_i -> Z_i."""
        tab = CliffordTableau.identity(2)
        assert tab.row(0).label == "XI"
        assert tab.row(3).label == "IZ"

    def test_non_symplectic_rejected(self):
        """A non-symplectic bit matrix is rejected."""
        bad = np.eye(4, dtype=np.uint8)
        bad[0, 0] = 0
        with pytest.raises(ValueError, match="symplectic"):
            CliffordTableau(2, bad, np.zeros(4, dtype=np.uint8))

    def test_conjugate_matches_dense(self):
        """Tableau conjugation equals dense U P U^dag for n <= 3."""
        rng = np.random.default_rng(1)
        for n in (1, 2, 3):
            for _ in range(10):
                tab = sample_global(n, rng)
                u = to_unitary(GlobalClifford(tab))
                p = PauliString.from_codes(rng.integers(0, 4, n), 2 * int(rng.integers(0, 2)))
                img = tab.conjugate(p)
                dense = u @ p.to_matrix() @ u.conj().T
                assert np.max(np.abs(img.to_matrix() - dense)) < 1e-10

    def test_compose_matches_dense(self):
        """compose(a, b) realizes U_a U_b up to global phase."""
        rng = np.random.default_rng(2)
        for _ in range(10):
            a, b = sample_global(2, rng), sample_global(2, rng)
            ua = to_unitary(GlobalClifford(a))
            ub = to_unitary(GlobalClifford(b))
            uc = to_unitary(GlobalClifford(compose(a, b)))
            assert phase_free_distance(ua @ ub, uc) < 1e-10

    def test_single_qubit_class_round_trip(self):
        """n=1 tableaux map onto the canonical 24 group indices."""
        rng = np.random.default_rng(3)
        seen = set()
        for _ in range(200):
            tab = sample_global(1, rng)
            seen.add(tab.single_qubit_class())
        assert seen == set(range(24))


class TestSampling:
    """Uniform symplectic/tableau sampling."""

    def test_symplectic_batch_valid(self):
        """Batch sampler returns symplectic matrices of the right shape."""
        rng = np.random.default_rng(4)
        for n in (1, 2, 3, 5):
            batch = sample_symplectic_batch(n, 50, rng)
            assert batch.shape == (50, 2 * n, 2 * n)
            for m in batch:
                assert is_symplectic(m)

    def test_symplectic_form(self):
        """The GF(2) symplectic form has the block anti-identity layout."""
        J = symplectic_form(2)
        assert np.array_equal(J, np.block([
            [np.zeros((2, 2), dtype=np.uint8), np.eye(2, dtype=np.uint8)],
            [np.eye(2, dtype=np.uint8), np.zeros((2, 2), dtype=np.uint8)],
        ]))

    def test_tableau_batch_shapes(self):
        """Tableau batch sampler returns matching sym and sign arrays."""
        rng = np.random.default_rng(5)
        sym, signs = sample_tableau_batch(3, 20, rng)
        assert sym.shape == (20, 6, 6)
        assert signs.shape == (20, 6)

    def test_sample_global_deterministic(self):
        """Equal seeds give equal tableaux."""
        t1 = sample_global(4, np.random.default_rng(99))
        t2 = sample_global(4, np.random.default_rng(99))
        assert t1 == t2

    def test_n1_covers_group(self):
        """n=1 sampling reaches all 24 classes with both sign patterns."""
        rng = np.random.default_rng(6)
        classes = {sample_global(1, rng).single_qubit_class() for _ in range(600)}
        assert classes == set(range(24))

    def test_haar_unitary(self):
        """Haar samples are unitary and differ between draws."""
        rng = np.random.default_rng(7)
        u1 = sample_haar(8, rng)
        u2 = sample_haar(8, rng)
        assert np.max(np.abs(u1 @ u1.conj().T - np.eye(8))) < 1e-12
        assert np.max(np.abs(u1 - u2)) > 1e-3


class TestDescriptors:
    """Dense realization and serialization of unitary descriptors."""

    def test_pauli_layer_to_unitary(self):
        """A PauliLayer realizes the kron of its gate matrices."""
        layer = pauli_layer_from_indices([3, 0, 11])
        u = to_unitary(layer)
        expect = np.kron(
            np.kron(SINGLE_QUBIT_UNITARIES[3], SINGLE_QUBIT_UNITARIES[0]),
            SINGLE_QUBIT_UNITARIES[11],
        )
        assert np.max(np.abs(u - expect)) < 1e-12

    def test_global_clifford_to_unitary_is_clifford(self):
        """The dense tableau realization conjugates generators correctly."""
        rng = np.random.default_rng(8)
        tab = sample_global(2, rng)
        u = to_unitary(GlobalClifford(tab))
        assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-10
        for i, gen in enumerate(["XI", "IX", "ZI", "IZ"]):
            img = tab.row(i)
            dense = u @ PauliString.from_label(gen).to_matrix() @ u.conj().T
            assert np.max(np.abs(dense - img.to_matrix())) < 1e-10

    def test_stabilizer_column_state(self):
        """U|0...0> built from the tableau matches the dense column."""
        rng = np.random.default_rng(9)
        for n in (1, 2, 3):
            tab = sample_global(n, rng)
            psi = stabilizer_column_state(tab)
            u = to_unitary(GlobalClifford(tab))
            assert phase_free_distance(psi, u[:, 0]) < 1e-10

    def test_x_image_product(self):
        """The X-row image product realizes U X^b U^dag."""
        rng = np.random.default_rng(10)
        tab = sample_global(3, rng)
        u = to_unitary(GlobalClifford(tab))
        for b in (1, 5, 7):
            xb = PauliString(3, np.array([(b >> (2 - i)) & 1 for i in range(3)]), np.zeros(3, dtype=np.uint8))
            dense = u @ xb.to_matrix() @ u.conj().T
            assert np.max(np.abs(x_image_product(tab, b).to_matrix() - dense)) < 1e-10

    def test_apply_tableau_to_pure(self):
        """Tableau state application equals dense matrix application."""
        rng = np.random.default_rng(11)
        tab = sample_global(3, rng)
        u = to_unitary(GlobalClifford(tab))
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v /= np.linalg.norm(v)
        assert phase_free_distance(apply_tableau_to_pure(tab, v), u @ v) < 1e-10

    def test_serialize_round_trip(self):
        """Descriptors survive the text round trip exactly."""
        rng = np.random.default_rng(12)
        layer = pauli_layer_from_indices([5, 17])
        back = parse_descriptor(serialize_descriptor(layer), 2)
        assert isinstance(back, PauliLayer)
        assert to_unitary(back) is not None
        assert np.max(np.abs(to_unitary(back) - to_unitary(layer))) < 1e-14

        tab = sample_global(3, rng)
        desc = GlobalClifford(tab)
        back = parse_descriptor(serialize_descriptor(desc), 3)
        assert isinstance(back, GlobalClifford)
        assert back.tableau == tab

        h = HaarUnitary(sample_haar(4, rng))
        back = parse_descriptor(serialize_descriptor(h), 2)
        assert isinstance(back, HaarUnitary)
        assert np.max(np.abs(back.matrix - h.matrix)) == 0.0

    def test_conjugate_pauli_dispatch(self):
        """conjugate_pauli handles layers and global tableaux alike."""
        rng = np.random.default_rng(13)
        layer = pauli_layer_from_indices([4, 9])
        p = PauliString.from_label("XZ")
        u = to_unitary(layer)
        img = conjugate_pauli(layer, p)
        assert np.max(np.abs(img.to_matrix() - u @ p.to_matrix() @ u.conj().T)) < 1e-10
