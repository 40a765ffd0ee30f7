"""Exact algebra of n-qubit Pauli strings and small dense operators.

Pauli strings live in the (x, z) bit-pair encoding with an explicit quarter
phase: ``P = i^phase_power * (tensor of single-qubit factors)`` where the
factor on qubit k is I, X, Z or Y according to (x_k, z_k) = (0,0), (1,0),
(0,1), (1,1).  With this convention a string whose phase is +1 or -1 is
Hermitian.  Conjugation by Cliffords and multiplication are bit arithmetic;
dense matrices appear only at test/oracle boundaries.

Qubit 1 is the most significant bit of a computational-basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

PAULI_LABELS = "IXZY"  # label of per-qubit code c = x + 2z

# i**e phase exponent of the single-qubit product sigma_a * sigma_b,
# indexed by codes a, b in {I=0, X=1, Z=2, Y=3}.
_MUL_PHASE_EXP = np.array(
    [
        [0, 0, 0, 0],
        [0, 0, 3, 1],
        [0, 1, 0, 3],
        [0, 3, 1, 0],
    ],
    dtype=np.int64,
)

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE_TOKENS = {"+": 0, "+i": 1, "-": 2, "-i": 3}
_PHASE_LABELS = {0: "", 1: "+i", 2: "-", 3: "-i"}

MAX_DENSE_QUBITS = 14


class DimensionError(ValueError):
    """Requested dense realization exceeds the supported size."""


def _frozen_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8) % 2
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PauliString:
    """An n-qubit Pauli operator with a quarter phase.

    Attributes:
        n: qubit count, 1 <= n <= 14 for dense realization.
        xbits, zbits: length-n bit vectors (qubit 1 first).
        phase_power: exponent e of the global phase i**e, e in {0, 1, 2, 3}.
    """

    n: int
    xbits: np.ndarray
    zbits: np.ndarray
    phase_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "xbits", _frozen_bits(self.xbits))
        object.__setattr__(self, "zbits", _frozen_bits(self.zbits))
        object.__setattr__(self, "phase_power", int(self.phase_power) % 4)
        if len(self.xbits) != self.n or len(self.zbits) != self.n:
            raise ValueError("bit-vector lengths must equal n")
        if self.n < 1:
            raise ValueError("need at least one qubit")

    # -- construction ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse e.g. "ZZIII", "-XY", "+iY", "-iXZ"."""
        s = label.strip()
        phase_power = 0
        for token in ("+i", "-i", "+", "-"):
            if s.startswith(token):
                phase_power = _PHASE_TOKENS[token]
                s = s[len(token):]
                break
        if not s:
            raise ValueError(f"empty Pauli body in {label!r}")
        xbits, zbits = [], []
        for ch in s:
            if ch == "I":
                xbits.append(0); zbits.append(0)
            elif ch == "X":
                xbits.append(1); zbits.append(0)
            elif ch == "Z":
                xbits.append(0); zbits.append(1)
            elif ch == "Y":
                xbits.append(1); zbits.append(1)
            else:
                raise ValueError(f"invalid Pauli character {ch!r} in {label!r}")
        return cls(len(xbits), xbits, zbits, phase_power)

    @classmethod
    def from_codes(cls, codes, phase_power: int = 0) -> "PauliString":
        codes = np.asarray(codes, dtype=np.uint8)
        return cls(len(codes), codes & 1, codes >> 1, phase_power)

    # -- basic queries -----------------------------------------------------

    @property
    def codes(self) -> np.ndarray:
        """Per-qubit codes c = x + 2z in {I=0, X=1, Z=2, Y=3}."""
        return (self.xbits + 2 * self.zbits).astype(np.uint8)

    @property
    def phase(self) -> complex:
        return 1j ** self.phase_power

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.xbits | self.zbits))

    @property
    def label(self) -> str:
        body = "".join(PAULI_LABELS[c] for c in self.codes)
        return _PHASE_LABELS[self.phase_power] + body

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.n == other.n
            and self.phase_power == other.phase_power
            and np.array_equal(self.xbits, other.xbits)
            and np.array_equal(self.zbits, other.zbits)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.phase_power, self.xbits.tobytes(), self.zbits.tobytes()))

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        sym = np.sum(self.xbits & other.zbits) + np.sum(self.zbits & other.xbits)
        return int(sym) % 2 == 0

    # -- algebra -----------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        e = self.phase_power + other.phase_power
        e += int(_MUL_PHASE_EXP[self.codes, other.codes].sum())
        return PauliString(self.n, self.xbits ^ other.xbits, self.zbits ^ other.zbits, e)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n, self.xbits, self.zbits, self.phase_power + 2)

    def adjoint(self) -> "PauliString":
        return PauliString(self.n, self.xbits, self.zbits, -self.phase_power)

    # -- dense realization ---------------------------------------------------

    def to_matrix(self) -> np.ndarray:
        if self.n > MAX_DENSE_QUBITS:
            raise DimensionError(f"dense matrix for n={self.n} > {MAX_DENSE_QUBITS}")
        mat = reduce(np.kron, (PAULI_1Q[PAULI_LABELS[c]] for c in self.codes))
        return self.phase * mat

    def apply_to_vector(self, v: np.ndarray) -> np.ndarray:
        """P @ v without building the dense matrix (v indexed by bitstring)."""
        n, d = self.n, len(v)
        if d != 2 ** n:
            raise ValueError("vector length mismatch")
        xint = bits_to_int(self.xbits)
        zint = bits_to_int(self.zbits)
        e = self.phase_power + int(np.sum(self.xbits & self.zbits))
        b = np.arange(d)
        coeff = (1j ** e) * np.where(parity_table(n)[b & zint], -1.0, 1.0)
        out = np.empty_like(v, dtype=complex)
        out[b ^ xint] = coeff * v
        return out


def bits_to_int(bits) -> int:
    """Bit vector (qubit 1 first) -> integer with qubit 1 as the MSB."""
    out = 0
    for b in np.asarray(bits, dtype=np.uint8):
        out = (out << 1) | int(b)
    return out


def int_to_bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


_PARITY_CACHE: dict[int, np.ndarray] = {}


def parity_table(n: int) -> np.ndarray:
    """parity_table(n)[b] = popcount(b) mod 2 for b < 2^n."""
    if n not in _PARITY_CACHE:
        b = np.arange(2 ** n, dtype=np.int64)
        acc = np.zeros(2 ** n, dtype=np.int64)
        for k in range(n):
            acc ^= (b >> k) & 1
        table = acc.astype(bool)
        table.flags.writeable = False
        _PARITY_CACHE[n] = table
    return _PARITY_CACHE[n]


# -- DenseOperator helpers ---------------------------------------------------
#
# Dense operators are plain complex ndarrays; these helpers carry the
# observable-side contracts (Hermiticity tolerance, tracelessness).

HERMITIAN_ATOL = 1e-12


def as_operator(obj) -> np.ndarray:
    """Coerce a PauliString or array to a square complex matrix."""
    if isinstance(obj, PauliString):
        return obj.to_matrix()
    mat = np.asarray(obj, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("operator must be a square matrix")
    return mat


def is_hermitian(O: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    O = np.asarray(O)
    return bool(np.max(np.abs(O - O.conj().T)) <= atol)


def traceless_part(O) -> np.ndarray:
    """O - tr(O) I / D."""
    mat = as_operator(O)
    d = mat.shape[0]
    return mat - (np.trace(mat) / d) * np.eye(d)


def frobenius_norm(O) -> float:
    """sqrt(tr(O O^dagger))."""
    mat = as_operator(O)
    return float(np.sqrt(np.sum(np.abs(mat) ** 2)))


def pauli_enumerate(n: int):
    """All 4^n phase-free Pauli strings, each exactly once (n <= 3)."""
    if n > 3:
        raise DimensionError("pauli_enumerate supports n <= 3")
    out = []
    for idx in range(4 ** n):
        codes = [(idx >> (2 * (n - 1 - k))) & 3 for k in range(n)]
        out.append(PauliString.from_codes(codes))
    return out
