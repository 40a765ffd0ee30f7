"""Dense multi-copy operators: diagonal correlators, twirls, permutation ops.

Everything here lives on t copies of a small register (t <= 6, n <= 2), where
group averages over the 24 single-qubit Cliffords and related identities can
be checked entrywise.
"""

from __future__ import annotations

from functools import reduce
from itertools import permutations, product

import numpy as np

from .cliffords import SINGLE_QUBIT_UNITARIES
from .paulis import PAULI_1Q, PauliString


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def lambda_diagonal(n: int) -> np.ndarray:
    """sum_{b,b'} |b><b|^{x2} (x) |b'><b'|^{x2} on four copies of n qubits."""
    d = 2 ** n
    pair = np.zeros((d * d, d * d))
    idx = np.arange(d) * d + np.arange(d)
    pair[idx, idx] = 1.0
    return np.kron(pair, pair)


def f_operator(t: int, n: int = 1) -> np.ndarray:
    """2^{-tn/2} sum over I,X,Y,Z (n=1) or all Pauli strings of W^{xt}."""
    d = 2 ** n
    labels = ["".join(s) for s in product("IXYZ", repeat=n)]
    out = np.zeros((d ** t, d ** t), dtype=complex)
    for lab in labels:
        w = PauliString.from_label(lab).to_matrix()
        out += _kron_all([w] * t)
    return out / d ** (t / 2.0)


def twirl4_single(A: np.ndarray) -> np.ndarray:
    """(1/24) sum_u u^{dag x4} A u^{x4} over the single-qubit Clifford group."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (16, 16):
        raise ValueError("expected a 16 x 16 four-copy operator")
    acc = np.zeros_like(A)
    for u in SINGLE_QUBIT_UNITARIES:
        u4 = _kron_all([u] * 4)
        acc += u4.conj().T @ A @ u4
    return acc / 24.0


def twirl_t_single_pauli(P1: str, t: int) -> np.ndarray:
    """(1/24) sum_u u^{dag xt} P1^{xt} u^{xt} for P1 in {X, Y, Z}, t <= 6."""
    if P1 not in ("X", "Y", "Z"):
        raise ValueError("P1 must be one of X, Y, Z")
    if not 1 <= t <= 6:
        raise ValueError("t must lie in [1, 6]")
    p = PAULI_1Q[P1]
    acc = np.zeros((2 ** t, 2 ** t), dtype=complex)
    for u in SINGLE_QUBIT_UNITARIES:
        w = u @ p @ u.conj().T
        acc += _kron_all([w] * t)
    return acc / 24.0


def q_projector(n: int) -> np.ndarray:
    """D^{-2} sum over all D^2 Pauli strings W of W^{x4}; a projector."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    d = 2 ** n
    acc = np.zeros((d ** 4, d ** 4), dtype=complex)
    for lab in product("IXYZ", repeat=n):
        w = PauliString.from_label("".join(lab)).to_matrix()
        acc += _kron_all([w] * 4)
    return acc / d ** 2


def all_s4() -> tuple:
    return tuple(permutations(range(4)))


def permutation_operator(pi, D: int) -> np.ndarray:
    """T_pi |b_1..b_4> = |b_{pi(1)}..b_{pi(4)}> on (C^D)^{x4}."""
    pi = tuple(pi)
    if sorted(pi) != list(range(4)):
        raise ValueError("pi must be a permutation of (0, 1, 2, 3)")
    cols = np.arange(D ** 4)
    digits = np.stack(np.unravel_index(cols, (D,) * 4), axis=1)
    rows = np.ravel_multi_index(tuple(digits[:, pi].T), (D,) * 4)
    T = np.zeros((D ** 4, D ** 4))
    T[rows, cols] = 1.0
    return T


def cycle_count(pi) -> int:
    pi = tuple(pi)
    seen, cycles = set(), 0
    for start in range(len(pi)):
        if start in seen:
            continue
        cycles += 1
        k = start
        while k not in seen:
            seen.add(k)
            k = pi[k]
    return cycles


def check_pi_inequality(sigma: np.ndarray, O0: np.ndarray, pi) -> bool:
    """tr(sigma x O0 x sigma x O0 . T_pi) <= tr(O0^2), for traceless O0."""
    sigma = np.asarray(sigma, dtype=complex)
    O0 = np.asarray(O0, dtype=complex)
    if abs(np.trace(O0)) > 1e-10:
        raise ValueError("O0 must be traceless")
    D = sigma.shape[0]
    if D > 4:
        raise ValueError("dense 4-copy check limited to D <= 4")
    T = permutation_operator(pi, D)
    big = _kron_all([sigma, O0, sigma, O0])
    val = np.trace(big @ T).real
    return bool(val <= np.trace(O0 @ O0).real + 1e-10)
