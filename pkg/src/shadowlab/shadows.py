"""Multi-shot shadow protocol: data collection, snapshots, and estimators.

A record is one sampled unitary together with K computational-basis outcomes
from the rotated state. Snapshots are never materialized as dense matrices;
every estimator goes through snapshot_expectation, which evaluates
q(b) = <b| U Minv(O) U^dagger |b> with the inverse channel of the ensemble.

Seeding contract: record i of a set with master seed s uses the child
generator SeedSequence(entropy=s, spawn_key=(i,)); the unitary is drawn
first, then shot j consumes the j-th outcome draw. Serial and parallel
generation therefore produce identical sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cliffords import (
    GlobalClifford,
    HaarUnitary,
    PauliLayer,
    UnitaryDescriptor,
    DIAG_VAL,
    descriptor_n,
    pauli_layer_from_indices,
    parse_descriptor,
    sample_global,
    sample_haar,
    serialize_descriptor,
    to_unitary,
)
from .paulis import (
    MAX_DENSE_QUBITS,
    DimensionError,
    PauliString,
    as_operator,
    bits_to_int,
    is_hermitian,
)
from .states import QuantumState, born_distribution, sample_bitstrings

ENSEMBLES = ("pauli", "clifford", "haar")

# dense Haar/global-Clifford simulation is capped well below the Pauli cap
MAX_GLOBAL_QUBITS = 10


def _check_ensemble(ensemble: str) -> None:
    if ensemble not in ENSEMBLES:
        raise ValueError(f"unknown ensemble {ensemble!r}, expected one of {ENSEMBLES}")


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """One sampled unitary and its K outcome integers (qubit 1 = MSB)."""

    unitary: UnitaryDescriptor
    outcomes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.outcomes, dtype=np.int64)
        if arr.ndim != 1 or len(arr) < 1:
            raise ValueError("outcomes must be a nonempty 1-d array")
        n = descriptor_n(self.unitary)
        if np.min(arr) < 0 or np.max(arr) >= 2 ** n:
            raise ValueError("outcome out of range for n qubits")
        arr.flags.writeable = False
        object.__setattr__(self, "outcomes", arr)

    @property
    def K(self) -> int:
        return len(self.outcomes)


@dataclass(frozen=True, eq=False)
class ShadowSet:
    ensemble: str
    n: int
    records: tuple
    master_seed: int

    def __post_init__(self):
        _check_ensemble(self.ensemble)
        recs = tuple(self.records)
        if len(recs) < 1:
            raise ValueError("need at least one record")
        k0 = recs[0].K
        for r in recs:
            if descriptor_n(r.unitary) != self.n:
                raise ValueError("record qubit count differs from set")
            if r.K != k0:
                raise ValueError("records must share K")
        object.__setattr__(self, "records", recs)

    @property
    def M(self) -> int:
        return len(self.records)

    @property
    def K(self) -> int:
        return self.records[0].K


@dataclass(frozen=True)
class EstimateReport:
    value: float
    M: int
    K: int
    per_record_means: tuple


def record_child_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def sample_ensemble_unitary(ensemble: str, n: int, rng: np.random.Generator) -> UnitaryDescriptor:
    if ensemble == "pauli":
        return pauli_layer_from_indices(rng.integers(0, 24, n))
    if ensemble == "clifford":
        return GlobalClifford(sample_global(n, rng))
    return HaarUnitary(sample_haar(2 ** n, rng))


def run_multishot(
    state: QuantumState, ensemble: str, n: int, M: int, K: int, master_seed: int
) -> ShadowSet:
    """Collect M records of K shots each; deterministic in master_seed."""
    _check_ensemble(ensemble)
    if n != state.n:
        raise ValueError("n does not match state")
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    cap = MAX_DENSE_QUBITS if ensemble == "pauli" else MAX_GLOBAL_QUBITS
    if ensemble == "clifford" and state.kind == "pure":
        cap = MAX_DENSE_QUBITS
    if n > cap:
        raise DimensionError(f"n={n} exceeds the {ensemble} simulation cap {cap}")
    records = []
    for i in range(M):
        rng = record_child_rng(master_seed, i)
        u = sample_ensemble_unitary(ensemble, n, rng)
        dist = born_distribution(state, u)
        outcomes = sample_bitstrings(dist, K, rng)
        records.append(MeasurementRecord(u, outcomes))
    return ShadowSet(ensemble, n, tuple(records), master_seed)


# ---------------------------------------------------------------------------
# inverse channels and snapshots
# ---------------------------------------------------------------------------


def inverse_channel(O: np.ndarray, ensemble: str, n: int) -> np.ndarray:
    """Dense Minv(O): per qubit 3A - I tr_i(A) for pauli, (D+1)A - I tr(A) else."""
    _check_ensemble(ensemble)
    A = np.asarray(O, dtype=complex)
    d = 2 ** n
    if A.shape != (d, d):
        raise ValueError("operator dimension does not match n")
    if ensemble == "pauli":
        for i in range(n):
            t = A.reshape(2 ** i, 2, -1, 2 ** i, 2, d // 2 ** (i + 1))
            red = np.einsum("axbcxd->abcd", t)
            embed = np.einsum("abcd,xy->axbcyd", red, np.eye(2))
            A = 3.0 * A - embed.reshape(d, d)
        return A
    return (d + 1.0) * A - np.eye(d) * np.trace(A)


def _pauli_layer_pauli_snapshot(layer: PauliLayer, b: int, P: PauliString) -> float:
    n = P.n
    val = 1.0 if P.phase_power == 0 else -1.0
    codes = P.codes
    for i in range(n):
        c = codes[i]
        if c == 0:
            continue
        bit = (b >> (n - 1 - i)) & 1
        val *= 3.0 * DIAG_VAL[layer.indices[i], c, bit]
        if val == 0.0:
            return 0.0
    return val


def _global_pauli_snapshot(desc: GlobalClifford, b: int, P: PauliString) -> float:
    d = 2 ** P.n
    if P.weight == 0:
        return 1.0 if P.phase_power == 0 else -1.0
    Q = desc.tableau.conjugate(P)
    if Q.xbits.any():
        return 0.0
    sign = 1.0 if Q.phase_power == 0 else -1.0
    par = bin(bits_to_int(Q.zbits) & b).count("1") & 1
    return (d + 1.0) * sign * (-1.0 if par else 1.0)


def snapshot_expectation(ensemble: str, U: UnitaryDescriptor, b: int, O) -> float:
    """tr(O Minv(U^dagger |b><b| U)) for one (unitary, outcome) pair."""
    _check_ensemble(ensemble)
    n = descriptor_n(U)
    if isinstance(O, PauliString):
        if O.phase_power % 2:
            raise ValueError("PauliString observable must have phase +1 or -1")
        if O.n != n:
            raise ValueError("dimension mismatch")
        if ensemble == "pauli" and isinstance(U, PauliLayer):
            return _pauli_layer_pauli_snapshot(U, b, O)
        if ensemble != "pauli" and isinstance(U, GlobalClifford):
            return _global_pauli_snapshot(U, b, O)
        O = O.to_matrix()
    O = as_operator(O)
    if O.shape[0] != 2 ** n:
        raise ValueError("dimension mismatch")
    if not is_hermitian(O, 1e-10):
        raise ValueError("observable must be Hermitian")
    A = inverse_channel(O, ensemble, n)
    u = to_unitary(U)
    row = u[b, :]
    val = row @ A @ row.conj()
    return float(val.real)


def record_mean(ensemble: str, record: MeasurementRecord, O) -> float:
    vals = [snapshot_expectation(ensemble, record.unitary, int(b), O) for b in record.outcomes]
    return float(np.mean(vals))


def estimate(shadows: ShadowSet, O) -> EstimateReport:
    """Mean over records of the per-record K-shot mean."""
    means = tuple(record_mean(shadows.ensemble, r, O) for r in shadows.records)
    return EstimateReport(float(np.mean(means)), shadows.M, shadows.K, means)


def median_of_means(shadows: ShadowSet, O, groups: int) -> float:
    """Median of contiguous equal-size batch means; remainder records dropped."""
    if not 1 <= groups <= shadows.M:
        raise ValueError(f"groups must be in [1, {shadows.M}]")
    batch = shadows.M // groups
    means = np.array(
        [record_mean(shadows.ensemble, r, O) for r in shadows.records[: batch * groups]]
    )
    return float(np.median(means.reshape(groups, batch).mean(axis=1)))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def save_shadowset(path, shadows: ShadowSet) -> None:
    lines = [
        f"shadowset ensemble={shadows.ensemble} n={shadows.n} M={shadows.M} "
        f"K={shadows.K} seed={shadows.master_seed}"
    ]
    for r in shadows.records:
        bits = " ".join(format(int(b), f"0{shadows.n}b") for b in r.outcomes)
        lines.append(f"{serialize_descriptor(r.unitary)} {bits}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_shadowset(path) -> ShadowSet:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head = lines[0].split()
    if head[0] != "shadowset":
        raise ValueError("not a shadowset file")
    kv = dict(tok.split("=") for tok in head[1:])
    n, M, K = int(kv["n"]), int(kv["M"]), int(kv["K"])
    if len(lines) != M + 1:
        raise ValueError(f"expected {M} record lines, found {len(lines) - 1}")
    records = []
    for ln in lines[1:]:
        tok, *bits = ln.split()
        if len(bits) != K:
            raise ValueError(f"expected {K} outcomes per record, found {len(bits)}")
        outcomes = np.array([int(s, 2) for s in bits], dtype=np.int64)
        records.append(MeasurementRecord(parse_descriptor(tok, n), outcomes))
    return ShadowSet(kv["ensemble"], n, tuple(records), int(kv["seed"]))
