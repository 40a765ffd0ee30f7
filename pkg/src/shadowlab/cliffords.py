"""Single-qubit and n-qubit Clifford unitaries: tableaux, sampling, conjugation.

The 24-element single-qubit group is enumerated once at import by closing
{H, S} under multiplication and canonicalizing global phase.  n-qubit
Cliffords are (2n x 2n) symplectic tableaux over GF(2) plus 2n sign bits; row
i is the conjugation image of X_{i+1}, row n+i the image of Z_{i+1}, columns
laid out [x | z].  Uniform sampling builds hyperbolic pairs row by row, which
is exactly uniform because the symplectic group acts simply transitively on
ordered hyperbolic bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .paulis import (
    DimensionError,
    PauliString,
    PAULI_1Q,
    bits_to_int,
    int_to_bits,
)

# ---------------------------------------------------------------------------
# single-qubit group table
# ---------------------------------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)


def _canonical_phase(u: np.ndarray) -> np.ndarray:
    flat = u.ravel()
    k = int(np.argmax(np.abs(flat) > 1e-9))
    return u * (np.abs(flat[k]) / flat[k])


def _matrix_key(u: np.ndarray) -> tuple:
    r = np.round(_canonical_phase(u), 9) + 0.0  # normalize -0.0
    return tuple(np.stack([r.real, r.imag], axis=-1).ravel())


def _close_group() -> np.ndarray:
    seen: dict[tuple, np.ndarray] = {}
    frontier = [np.eye(2, dtype=complex)]
    seen[_matrix_key(frontier[0])] = _canonical_phase(frontier[0])
    while frontier:
        nxt = []
        for u in frontier:
            for g in (_H, _S):
                w = _canonical_phase(g @ u)
                key = _matrix_key(w)
                if key not in seen:
                    seen[key] = w
                    nxt.append(w)
        frontier = nxt
    # identity first, the rest in canonical key order
    mats = sorted(seen.values(), key=lambda u: (np.max(np.abs(u - np.eye(2))) > 1e-9, _matrix_key(u)))
    assert len(mats) == 24, f"single-qubit closure found {len(mats)} elements"
    return np.stack(mats)


SINGLE_QUBIT_UNITARIES = _close_group()
SINGLE_QUBIT_UNITARIES.flags.writeable = False

_AXIS_MATS = {1: PAULI_1Q["X"], 2: PAULI_1Q["Z"], 3: PAULI_1Q["Y"]}


def _classify_signed_axis(m: np.ndarray) -> tuple[int, int]:
    for code, pm in _AXIS_MATS.items():
        for sign in (1, -1):
            if np.max(np.abs(m - sign * pm)) < 1e-9:
                return code, sign
    raise AssertionError("conjugation image is not a signed Pauli")


def _build_conj_tables():
    axis = np.zeros((24, 4), dtype=np.uint8)
    sign = np.ones((24, 4), dtype=np.int8)
    for c in range(24):
        u = SINGLE_QUBIT_UNITARIES[c]
        for code in (1, 2, 3):
            ax, sg = _classify_signed_axis(u @ _AXIS_MATS[code] @ u.conj().T)
            axis[c, code] = ax
            sign[c, code] = sg
    return axis, sign


CONJ_AXIS, CONJ_SIGN = _build_conj_tables()
CONJ_AXIS.flags.writeable = False
CONJ_SIGN.flags.writeable = False

# DIAG_VAL[c, code, b] = <b| u_c sigma_code u_c^dag |b>, always in {-1, 0, +1}
DIAG_VAL = np.zeros((24, 4, 2), dtype=np.int8)
DIAG_VAL[:, 0, :] = 1
for _c in range(24):
    for _code in (1, 2, 3):
        if CONJ_AXIS[_c, _code] == 2:  # image along Z: diagonal
            DIAG_VAL[_c, _code, 0] = CONJ_SIGN[_c, _code]
            DIAG_VAL[_c, _code, 1] = -CONJ_SIGN[_c, _code]
DIAG_VAL.flags.writeable = False

_IMAGE_KEY_TO_INDEX = {
    (int(CONJ_AXIS[c, 1]), int(CONJ_SIGN[c, 1]), int(CONJ_AXIS[c, 2]), int(CONJ_SIGN[c, 2])): c
    for c in range(24)
}
assert len(_IMAGE_KEY_TO_INDEX) == 24


@dataclass(frozen=True)
class SingleQubitClifford:
    """One of the 24 single-qubit Clifford classes (global phase dropped)."""

    index: int

    def __post_init__(self):
        if not 0 <= self.index < 24:
            raise ValueError("index must lie in [0, 24)")

    @property
    def matrix(self) -> np.ndarray:
        return SINGLE_QUBIT_UNITARIES[self.index]

    def _image(self, code: int) -> PauliString:
        ax = int(CONJ_AXIS[self.index, code])
        sg = int(CONJ_SIGN[self.index, code])
        return PauliString.from_codes([ax], 0 if sg == 1 else 2)

    @property
    def image_of_x(self) -> PauliString:
        return self._image(1)

    @property
    def image_of_z(self) -> PauliString:
        return self._image(2)


SINGLE_CLIFFORDS = tuple(SingleQubitClifford(i) for i in range(24))


def sample_single(rng: np.random.Generator) -> SingleQubitClifford:
    """Uniform draw over the 24 single-qubit Clifford classes."""
    return SINGLE_CLIFFORDS[int(rng.integers(24))]


# ---------------------------------------------------------------------------
# symplectic tableaux
# ---------------------------------------------------------------------------


def symplectic_form(n: int) -> np.ndarray:
    omega = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    omega[:n, n:] = np.eye(n, dtype=np.uint8)
    omega[n:, :n] = np.eye(n, dtype=np.uint8)
    return omega


def is_symplectic(sym: np.ndarray) -> bool:
    sym = np.asarray(sym, dtype=np.uint8)
    two_n = sym.shape[0]
    if sym.shape != (two_n, two_n) or two_n % 2:
        return False
    omega = symplectic_form(two_n // 2)
    return bool(np.array_equal((sym @ omega @ sym.T) % 2, omega))


@dataclass(frozen=True, eq=False)
class CliffordTableau:
    """Symplectic tableau + sign bits for an n-qubit Clifford (mod phase)."""

    n: int
    symplectic: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        sym = np.asarray(self.symplectic, dtype=np.uint8) % 2
        sgn = np.asarray(self.signs, dtype=np.uint8) % 2
        sym.flags.writeable = False
        sgn.flags.writeable = False
        object.__setattr__(self, "symplectic", sym)
        object.__setattr__(self, "signs", sgn)
        if sym.shape != (2 * self.n, 2 * self.n) or sgn.shape != (2 * self.n,):
            raise ValueError("tableau shape mismatch")
        if not is_symplectic(sym):
            raise ValueError("matrix is not symplectic over GF(2)")

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        return cls(n, np.eye(2 * n, dtype=np.uint8), np.zeros(2 * n, dtype=np.uint8))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.symplectic, other.symplectic)
            and np.array_equal(self.signs, other.signs)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.symplectic.tobytes(), self.signs.tobytes()))

    def row(self, i: int) -> PauliString:
        """Conjugation image of the i-th generator (X_1..X_n then Z_1..Z_n)."""
        return PauliString(
            self.n,
            self.symplectic[i, : self.n],
            self.symplectic[i, self.n :],
            2 * int(self.signs[i]),
        )

    def conjugate(self, P: PauliString) -> PauliString:
        """U P U^dagger as a PauliString (sign tracked exactly)."""
        if P.n != self.n:
            raise ValueError("qubit counts differ")
        acc = PauliString.identity(self.n)
        for j in np.nonzero(P.xbits)[0]:
            acc = acc * self.row(int(j))
        for j in np.nonzero(P.zbits)[0]:
            acc = acc * self.row(self.n + int(j))
        extra = P.phase_power + int(np.sum(P.xbits & P.zbits))
        return PauliString(self.n, acc.xbits, acc.zbits, acc.phase_power + extra)

    def single_qubit_class(self) -> int:
        """Canonical [0, 24) index of an n=1 tableau."""
        if self.n != 1:
            raise ValueError("only defined for n=1")
        imx, imz = self.row(0), self.row(1)
        key = (
            int(imx.codes[0]),
            1 if imx.phase_power == 0 else -1,
            int(imz.codes[0]),
            1 if imz.phase_power == 0 else -1,
        )
        return _IMAGE_KEY_TO_INDEX[key]


def compose(a: CliffordTableau, b: CliffordTableau) -> CliffordTableau:
    """Tableau of U_a U_b (apply b first, then a)."""
    if a.n != b.n:
        raise ValueError("qubit counts differ")
    n = a.n
    sym = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    signs = np.zeros(2 * n, dtype=np.uint8)
    for i in range(2 * n):
        img = a.conjugate(b.row(i))
        if img.phase_power % 2:
            raise AssertionError("composition produced a non-Hermitian image")
        sym[i, :n] = img.xbits
        sym[i, n:] = img.zbits
        signs[i] = img.phase_power // 2
    return CliffordTableau(n, sym, signs)


# ---------------------------------------------------------------------------
# uniform sampling
# ---------------------------------------------------------------------------


def _symp_rows(V: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Symplectic products of every spanning vector in V with w, batched.

    V: (R, m, 2n) bits, w: (R, 2n) bits -> (R, m) bits.
    """
    n = V.shape[-1] // 2
    prod = V[:, :, :n] @ w[:, n:, None] + V[:, :, n:] @ w[:, :n, None]
    return (prod[:, :, 0] & 1).astype(np.uint8)


def _symp_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[-1] // 2
    s = np.sum(a[:, :n] & b[:, n:], axis=1) + np.sum(a[:, n:] & b[:, :n], axis=1)
    return (s & 1).astype(np.uint8)


def _span_sample(V: np.ndarray, todo: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    c = rng.integers(0, 2, size=(todo.size, V.shape[1]), dtype=np.uint8)
    return np.einsum("rk,rkj->rj", c, V[todo]) & 1


def sample_symplectic_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` exactly uniform elements of Sp(2n, GF(2)), shape (count, 2n, 2n)."""
    two_n = 2 * n
    V = np.tile(np.eye(two_n, dtype=np.uint8), (count, 1, 1))
    rows = np.empty((count, two_n, two_n), dtype=np.uint8)
    for i in range(n):
        # image of X_{i+1}: uniform nonzero vector of the current complement
        alpha = np.zeros((count, two_n), dtype=np.uint8)
        todo = np.arange(count)
        while todo.size:
            v = _span_sample(V, todo, rng)
            alpha[todo] = v
            todo = todo[~v.any(axis=1)]
        # image of Z_{i+1}: uniform over the complement subject to <alpha, v> = 1
        beta = np.zeros((count, two_n), dtype=np.uint8)
        todo = np.arange(count)
        while todo.size:
            v = _span_sample(V, todo, rng)
            beta[todo] = v
            todo = todo[_symp_pair(alpha[todo], v) == 0]
        rows[:, i] = alpha
        rows[:, n + i] = beta
        # project the spanning set onto the symplectic complement of (alpha, beta)
        sa = _symp_rows(V, alpha)
        sb = _symp_rows(V, beta)
        V ^= sb[:, :, None] * alpha[:, None, :]
        V ^= sa[:, :, None] * beta[:, None, :]
    return rows


def sample_tableau_batch(
    n: int, count: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Raw arrays for `count` uniform Clifford tableaux: (sym, signs)."""
    sym = sample_symplectic_batch(n, count, rng)
    signs = rng.integers(0, 2, size=(count, 2 * n), dtype=np.uint8)
    return sym, signs


def sample_global(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Uniform n-qubit Clifford (mod global phase)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sym, signs = sample_tableau_batch(n, 1, rng)
    return CliffordTableau(n, sym[0], signs[0])


def sample_haar(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian, phase-corrected."""
    if dim > 2 ** 10:
        raise DimensionError("Haar sampling supports D <= 1024")
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# unitary descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PauliLayer:
    """Tensor product of independent single-qubit Cliffords."""

    gates: tuple[SingleQubitClifford, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def n(self) -> int:
        return len(self.gates)

    @property
    def indices(self) -> np.ndarray:
        return np.array([g.index for g in self.gates], dtype=np.uint8)


@dataclass(frozen=True)
class GlobalClifford:
    tableau: CliffordTableau

    @property
    def n(self) -> int:
        return self.tableau.n


@dataclass(frozen=True, eq=False)
class HaarUnitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        d = m.shape[0]
        if m.shape != (d, d) or d & (d - 1):
            raise ValueError("matrix must be square with power-of-two dimension")
        if np.max(np.abs(m.conj().T @ m - np.eye(d))) > 1e-10:
            raise ValueError("matrix is not unitary to 1e-10")

    @property
    def n(self) -> int:
        return int(np.log2(self.matrix.shape[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HaarUnitary):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)


UnitaryDescriptor = PauliLayer | GlobalClifford | HaarUnitary


def pauli_layer_from_indices(indices) -> PauliLayer:
    return PauliLayer(tuple(SINGLE_CLIFFORDS[int(i)] for i in indices))


def conjugate_pauli(C, P: PauliString) -> PauliString:
    """U P U^dagger for a tableau, a PauliLayer, or a gate list."""
    if isinstance(C, CliffordTableau):
        return C.conjugate(P)
    if isinstance(C, GlobalClifford):
        return C.tableau.conjugate(P)
    if isinstance(C, PauliLayer):
        gates = C.gates
    else:
        gates = tuple(C)
    if len(gates) != P.n:
        raise ValueError("qubit counts differ")
    codes = P.codes
    idx = np.array([g.index for g in gates])
    new_codes = CONJ_AXIS[idx, codes]
    sign_flips = int(np.sum(CONJ_SIGN[idx, codes] < 0))
    return PauliString.from_codes(new_codes, P.phase_power + 2 * sign_flips)


# ---------------------------------------------------------------------------
# dense realizations
# ---------------------------------------------------------------------------


def stabilizer_column_state(tab: CliffordTableau) -> np.ndarray:
    """U|0...0> for the tableau's Clifford U, i.e. the state stabilized by the
    signed Z-row images.  Phase convention: first nonzero amplitude is real
    positive."""
    n, d = tab.n, 2 ** tab.n
    for bstar in range(d):
        v = np.zeros(d, dtype=complex)
        v[bstar] = 1.0
        for j in range(n):
            v = (v + tab.row(n + j).apply_to_vector(v)) / 2.0
        nrm2 = float(np.sum(np.abs(v) ** 2))
        if nrm2 > 0.5 / d:
            v /= np.sqrt(nrm2)
            k = int(np.argmax(np.abs(v) > 1e-8))
            v *= np.abs(v[k]) / v[k]
            return v
    raise AssertionError("no basis state overlaps the stabilizer state")


def x_image_product(tab: CliffordTableau, b: int) -> PauliString:
    """Conjugation image of X^b = prod over set bits of X_j (qubit 1 = MSB)."""
    acc = PauliString.identity(tab.n)
    for j, bit in enumerate(int_to_bits(b, tab.n)):
        if bit:
            acc = acc * tab.row(j)
    return acc


def apply_tableau_to_pure(tab: CliffordTableau, psi: np.ndarray) -> np.ndarray:
    """U |psi> expanded over the nonzero computational amplitudes of psi."""
    d = 2 ** tab.n
    if len(psi) != d:
        raise ValueError("dimension mismatch")
    psi0 = stabilizer_column_state(tab)
    out = np.zeros(d, dtype=complex)
    for b in np.nonzero(np.abs(psi) > 1e-14)[0]:
        out += psi[b] * x_image_product(tab, int(b)).apply_to_vector(psi0)
    return out


def to_unitary(desc: UnitaryDescriptor) -> np.ndarray:
    """Dense matrix realizing the descriptor (global phase unconstrained)."""
    if isinstance(desc, PauliLayer):
        if desc.n > 14:
            raise DimensionError("PauliLayer dense limit is n <= 14")
        return reduce(np.kron, (g.matrix for g in desc.gates))
    if isinstance(desc, GlobalClifford):
        tab = desc.tableau
        if tab.n > 10:
            raise DimensionError("GlobalClifford dense limit is n <= 10")
        d = 2 ** tab.n
        psi0 = stabilizer_column_state(tab)
        u = np.empty((d, d), dtype=complex)
        for b in range(d):
            u[:, b] = x_image_product(tab, b).apply_to_vector(psi0)
        return u
    if isinstance(desc, HaarUnitary):
        return np.array(desc.matrix)
    raise TypeError(f"not a unitary descriptor: {type(desc).__name__}")


def descriptor_n(desc: UnitaryDescriptor) -> int:
    return desc.n


# ---------------------------------------------------------------------------
# descriptor serialization (bit-exact)
# ---------------------------------------------------------------------------


def serialize_descriptor(desc: UnitaryDescriptor) -> str:
    if isinstance(desc, PauliLayer):
        return "P:" + ",".join(str(g.index) for g in desc.gates)
    if isinstance(desc, GlobalClifford):
        tab = desc.tableau
        sym_hex = np.packbits(tab.symplectic.ravel()).tobytes().hex()
        sign_hex = np.packbits(tab.signs).tobytes().hex()
        return f"C:{sym_hex}:{sign_hex}"
    if isinstance(desc, HaarUnitary):
        return "H:" + desc.matrix.astype(np.complex128).tobytes().hex()
    raise TypeError(f"not a unitary descriptor: {type(desc).__name__}")


def parse_descriptor(token: str, n: int) -> UnitaryDescriptor:
    kind, _, body = token.partition(":")
    if kind == "P":
        idx = [int(t) for t in body.split(",")]
        if len(idx) != n:
            raise ValueError("PauliLayer length mismatch")
        return pauli_layer_from_indices(idx)
    if kind == "C":
        sym_hex, _, sign_hex = body.partition(":")
        two_n = 2 * n
        sym_bits = np.unpackbits(
            np.frombuffer(bytes.fromhex(sym_hex), dtype=np.uint8), count=two_n * two_n
        )
        sign_bits = np.unpackbits(
            np.frombuffer(bytes.fromhex(sign_hex), dtype=np.uint8), count=two_n
        )
        return GlobalClifford(CliffordTableau(n, sym_bits.reshape(two_n, two_n), sign_bits))
    if kind == "H":
        d = 2 ** n
        mat = np.frombuffer(bytes.fromhex(body), dtype=np.complex128).reshape(d, d)
        return HaarUnitary(mat)
    raise ValueError(f"unknown descriptor kind {kind!r}")
