"""Small-system states, Born-rule simulation, expectations, and spec parsing.

Bitstring indexing convention: qubit 1 is the most significant bit of the
outcome integer, so outcome 0b10 on two qubits means qubit 1 read 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cliffords import (
    GlobalClifford,
    HaarUnitary,
    PauliLayer,
    UnitaryDescriptor,
    apply_tableau_to_pure,
    to_unitary,
)
from .paulis import PauliString, is_hermitian


class SpecError(ValueError):
    """Malformed observable/state spec; carries a 0-based column position."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"col {position}: {message}")
        self.position = position


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure statevector or density matrix on n qubits."""

    n: int
    kind: str  # "pure" | "density"
    data: np.ndarray

    def __post_init__(self):
        d = 2 ** self.n
        arr = np.asarray(self.data, dtype=complex)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        if self.kind == "pure":
            if arr.shape != (d,):
                raise ValueError("statevector length must be 2^n")
            if abs(np.linalg.norm(arr) - 1.0) > 1e-12:
                raise ValueError("statevector must have unit norm")
        elif self.kind == "density":
            if arr.shape != (d, d):
                raise ValueError("density matrix must be 2^n x 2^n")
            if not is_hermitian(arr, 1e-10):
                raise ValueError("density matrix must be Hermitian")
            if abs(np.trace(arr).real - 1.0) > 1e-10:
                raise ValueError("density matrix must have unit trace")
            if np.min(np.linalg.eigvalsh(arr)) < -1e-10:
                raise ValueError("density matrix must be positive semidefinite")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")

    @classmethod
    def pure(cls, vector) -> "QuantumState":
        vector = np.asarray(vector, dtype=complex)
        n = int(np.log2(len(vector)))
        return cls(n, "pure", vector)

    @classmethod
    def density(cls, matrix) -> "QuantumState":
        matrix = np.asarray(matrix, dtype=complex)
        n = int(np.log2(matrix.shape[0]))
        return cls(n, "density", matrix)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def density_matrix(self) -> np.ndarray:
        if self.kind == "density":
            return np.array(self.data)
        return np.outer(self.data, self.data.conj())


def ghz_theta(n: int, theta: float = 0.0) -> QuantumState:
    """(|0...0> + e^{i theta}|1...1>)/sqrt(2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = 1.0 / np.sqrt(2.0)
    v[-1] = np.exp(1j * theta) / np.sqrt(2.0)
    return QuantumState(n, "pure", v)


def ghz_projector(n: int, theta: float = 0.0) -> np.ndarray:
    g = ghz_theta(n, theta).data
    return np.outer(g, g.conj())


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Born probabilities over computational-basis outcomes."""

    n: int
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (2 ** self.n,):
            raise ValueError("probability vector length must be 2^n")
        if np.min(p) < -1e-12:
            raise ValueError(f"negative probability {np.min(p)}")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}, not 1")
        p = p / total
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)


def _apply_layer_to_vector(layer: PauliLayer, psi: np.ndarray) -> np.ndarray:
    v = psi
    n = layer.n
    for i, g in enumerate(layer.gates):
        v = v.reshape(2 ** i, 2, -1)
        v = np.einsum("xy,ayb->axb", g.matrix, v)
    return v.reshape(2 ** n)


def _apply_layer_to_density(layer: PauliLayer, rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    m = rho
    for i, g in enumerate(layer.gates):
        m = m.reshape(2 ** i, 2, d // 2 ** (i + 1), d)
        m = np.einsum("xy,aybc->axbc", g.matrix, m)
    m = m.reshape(d, d)
    for i, g in enumerate(layer.gates):
        m = m.reshape(d, 2 ** i, 2, d // 2 ** (i + 1))
        m = np.einsum("xy,cayb->caxb", g.matrix.conj(), m)
    return m.reshape(d, d)


def born_distribution(state: QuantumState, U: UnitaryDescriptor) -> OutcomeDistribution:
    """p(b) = <b| U rho U^dagger |b>."""
    if U.n != state.n:
        raise ValueError("qubit counts differ")
    if isinstance(U, PauliLayer):
        if state.kind == "pure":
            amps = _apply_layer_to_vector(U, state.data)
            p = np.abs(amps) ** 2
        else:
            p = np.real(np.diagonal(_apply_layer_to_density(U, state.data)))
    elif isinstance(U, GlobalClifford) and state.kind == "pure":
        amps = apply_tableau_to_pure(U.tableau, state.data)
        p = np.abs(amps) ** 2
    else:
        u = to_unitary(U)
        rho = state.density_matrix()
        p = np.real(np.einsum("bj,jk,bk->b", u, rho, u.conj()))
    return OutcomeDistribution(state.n, p)


def sample_bitstrings(
    dist: OutcomeDistribution, K: int, rng: np.random.Generator
) -> np.ndarray:
    """K i.i.d. outcome integers; shot j consumes the j-th uniform draw."""
    if K < 1:
        raise ValueError("K must be >= 1")
    cum = np.cumsum(dist.probabilities)
    draws = rng.random(K)
    return np.minimum(np.searchsorted(cum, draws, side="right"), len(cum) - 1)


def expectation(state: QuantumState, O) -> float:
    """tr(O rho) for a Hermitian observable (dense matrix or PauliString)."""
    if isinstance(O, PauliString):
        if O.phase_power % 2:
            raise ValueError("PauliString observable must have phase +1 or -1")
        if O.n != state.n:
            raise ValueError("dimension mismatch")
        if state.kind == "pure":
            val = np.vdot(state.data, O.apply_to_vector(state.data))
        else:
            val = np.trace(O.to_matrix() @ state.data)
    else:
        O = np.asarray(O, dtype=complex)
        if O.shape != (state.dim, state.dim):
            raise ValueError("dimension mismatch")
        if not is_hermitian(O, 1e-10):
            raise ValueError("observable must be Hermitian")
        if state.kind == "pure":
            val = np.vdot(state.data, O @ state.data)
        else:
            val = np.trace(O @ state.data)
    if abs(val.imag) > 1e-10:
        raise AssertionError(f"expectation has imaginary residue {val.imag}")
    return float(val.real)


def partial_trace(rho: np.ndarray, keep: list[int], n: int) -> np.ndarray:
    """Reduced density matrix on `keep` (0-based qubit positions, MSB first)."""
    drop = [q for q in range(n) if q not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = [letters[q] for q in range(n)]
    col = [letters[n + q] for q in range(n)]
    for q in drop:
        col[q] = row[q]
    out_row = [row[q] for q in keep]
    out_col = [col[q] for q in keep]
    expr = "".join(row + col) + "->" + "".join(out_row + out_col)
    d_keep = 2 ** len(keep)
    return np.einsum(expr, rho.reshape((2,) * (2 * n))).reshape(d_keep, d_keep)


# ---------------------------------------------------------------------------
# observable / state spec parsing
# ---------------------------------------------------------------------------


def save_operator(path: str | Path, O: np.ndarray) -> None:
    """Text layout: first line D, then D rows of D whitespace-separated re,im pairs."""
    O = np.asarray(O, dtype=complex)
    d = O.shape[0]
    lines = [str(d)]
    for row in O:
        lines.append(" ".join(f"{c.real:.17g},{c.imag:.17g}" for c in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_operator(path: str | Path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    d = int(lines[0])
    if len(lines) != d + 1:
        raise ValueError(f"expected {d} matrix rows, found {len(lines) - 1}")
    out = np.empty((d, d), dtype=complex)
    for i, ln in enumerate(lines[1:]):
        cells = ln.split()
        if len(cells) != d:
            raise ValueError(f"row {i}: expected {d} entries, found {len(cells)}")
        for j, cell in enumerate(cells):
            re, _, im = cell.partition(",")
            out[i, j] = complex(float(re), float(im or 0.0))
    return out


def _parse_kv(body: str, offset: int, allowed: dict[str, type]) -> dict:
    out = {}
    pos = offset
    for part in body.split(","):
        key, eq, val = part.partition("=")
        key = key.strip()
        if not eq or key not in allowed:
            raise SpecError(f"expected one of {sorted(allowed)}= , got {part!r}", pos)
        try:
            out[key] = allowed[key](val)
        except ValueError:
            raise SpecError(f"bad value {val!r} for {key}", pos + len(key) + 1) from None
        pos += len(part) + 1
    return out


def parse_observable(spec: str, n: int):
    """Parse "pauli:STRING" | "ghz_proj:n=INT[,theta=FLOAT]" | "file:PATH".

    Returns a PauliString for pauli specs, a dense Hermitian ndarray otherwise.
    """
    kind, sep, body = spec.partition(":")
    if not sep:
        raise SpecError("expected 'kind:body'", 0)
    offset = len(kind) + 1
    if kind == "pauli":
        try:
            p = PauliString.from_label(body)
        except ValueError as exc:
            raise SpecError(str(exc), offset) from None
        if p.phase_power % 2:
            raise SpecError("observable phase must be +1 or -1", offset)
        if p.n != n:
            raise SpecError(f"Pauli length {p.n} does not match n={n}", offset)
        return p
    if kind == "ghz_proj":
        kv = _parse_kv(body, offset, {"n": int, "theta": float})
        if "n" not in kv:
            raise SpecError("ghz_proj requires n=", offset)
        if kv["n"] != n:
            raise SpecError(f"ghz_proj n={kv['n']} does not match n={n}", offset)
        return ghz_projector(kv["n"], kv.get("theta", 0.0))
    if kind == "file":
        mat = load_operator(body)
        if mat.shape != (2 ** n, 2 ** n):
            raise SpecError(f"operator dimension {mat.shape[0]} != 2^{n}", offset)
        if not is_hermitian(mat, 1e-10):
            raise SpecError("operator file is not Hermitian", offset)
        return mat
    raise SpecError(f"unknown observable kind {kind!r}", 0)


def parse_state(spec: str) -> QuantumState:
    """Parse "ghz:n=INT[,theta=FLOAT]" | "file:PATH" (vector or density)."""
    kind, sep, body = spec.partition(":")
    if not sep:
        raise SpecError("expected 'kind:body'", 0)
    offset = len(kind) + 1
    if kind == "ghz":
        kv = _parse_kv(body, offset, {"n": int, "theta": float})
        if "n" not in kv:
            raise SpecError("ghz requires n=", offset)
        return ghz_theta(kv["n"], kv.get("theta", 0.0))
    if kind == "file":
        lines = [ln for ln in Path(body).read_text().splitlines() if ln.strip()]
        if len(lines) > 1 and len(lines[0].split()) == 1 and "," not in lines[0]:
            mat = load_operator(body)
            return QuantumState.density(mat)
        cells = " ".join(lines).split()
        vec = np.array(
            [complex(float(c.partition(",")[0]), float(c.partition(",")[2] or 0.0)) for c in cells]
        )
        return QuantumState.pure(vec / np.linalg.norm(vec))
    raise SpecError(f"unknown state kind {kind!r}", 0)
