"""Gamma functionals, variance predictors, and norm searches.

Gamma1(sigma, O) = E_U sum_b p(b|U) q(b|U)^2 and
Gamma2(sigma, O) = E_U [sum_b p(b|U) q(b|U)]^2 with
q(b|U) = <b| U Minv(O) U^dagger |b>. Exact enumeration covers the Pauli
ensemble up to three (support) qubits and the single-qubit Clifford ensemble;
everything else is Monte Carlo over unitaries with exact inner sums, so the
only sampling noise is the ensemble average itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .cliffords import GlobalClifford, HaarUnitary, SINGLE_QUBIT_UNITARIES, sample_global, sample_haar, to_unitary
from .paulis import PauliString, as_operator, frobenius_norm, traceless_part
from .shadows import inverse_channel
from .states import QuantumState, expectation, partial_trace

EXACT_PAULI_MAX_QUBITS = 3


@dataclass(frozen=True)
class GammaPair:
    gamma1: float
    gamma2: float
    method: str  # "exact_enumeration" | "monte_carlo"
    mc_error: tuple | None = None

    def __post_init__(self):
        if self.method not in ("exact_enumeration", "monte_carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        slack = 1e-9 if self.method == "exact_enumeration" else 1e-7
        if self.gamma1 < -slack or self.gamma2 < -slack:
            raise ValueError("gamma values must be nonnegative")
        if self.gamma2 > self.gamma1 + slack:
            raise ValueError("gamma2 exceeds gamma1 beyond tolerance")


@dataclass(frozen=True)
class VariancePrediction:
    value: float
    gamma1: float
    gamma2: float
    mean_sq: float
    M: int
    K: int

    def __post_init__(self):
        if self.value < -1e-9:
            raise ValueError("variance prediction must be nonnegative")


@lru_cache(maxsize=4)
def _layer_unitaries(w: int) -> np.ndarray:
    """All 24^w tensor products of single-qubit Cliffords, shape (24^w, D, D)."""
    out = SINGLE_QUBIT_UNITARIES
    for _ in range(w - 1):
        out = np.einsum("uab,vcd->uvacbd", out, SINGLE_QUBIT_UNITARIES).reshape(
            -1, out.shape[1] * 2, out.shape[1] * 2
        )
    return out


def _born_diag(us: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Rows of diag(u A u^dagger) for a batch of unitaries, shape (B, D)."""
    return np.real(np.einsum("ubj,jk,ubk->ub", us, A, us.conj(), optimize=True))


def _reduce_pauli_instance(sigma: QuantumState, P: PauliString):
    """Restrict a Pauli-observable instance to the observable's support."""
    support = [i for i in range(P.n) if P.codes[i] != 0]
    sign = 1.0 if P.phase_power == 0 else -1.0
    if not support:
        return None, None, sign
    red = partial_trace(sigma.density_matrix(), support, sigma.n)
    p_red = PauliString.from_codes(P.codes[support])
    return red, p_red, sign


def _gamma_from_batches(p: np.ndarray, q: np.ndarray, exact: bool):
    x1 = np.einsum("ub,ub->u", p, q * q)
    inner = np.einsum("ub,ub->u", p, q)
    x2 = inner * inner
    g1, g2 = float(x1.mean()), float(x2.mean())
    if exact:
        return GammaPair(g1, g2, "exact_enumeration")
    B = len(x1)
    se1 = float(np.std(x1, ddof=1) / np.sqrt(B))
    se2 = float(np.std(x2, ddof=1) / np.sqrt(B))
    return GammaPair(g1, g2, "monte_carlo", (se1, se2))


def gamma_brute(
    sigma: QuantumState, O, ensemble: str, budget: int = 0, seed: int = 0
) -> GammaPair:
    """Gamma1/Gamma2 by exact enumeration where feasible, else Monte Carlo."""
    n = sigma.n
    if ensemble == "pauli" and isinstance(O, PauliString):
        if O.n != n:
            raise ValueError("dimension mismatch")
        red, p_red, sign = _reduce_pauli_instance(sigma, O)
        if red is None:
            # O = +/- identity: q is constant, both moments are 1
            return GammaPair(1.0, 1.0, "exact_enumeration")
        w = p_red.n
        if w <= EXACT_PAULI_MAX_QUBITS:
            us = _layer_unitaries(w)
            A = inverse_channel(sign * p_red.to_matrix(), "pauli", w)
            return _gamma_from_batches(_born_diag(us, red), _born_diag(us, A), True)
    if ensemble == "pauli" and n <= EXACT_PAULI_MAX_QUBITS:
        us = _layer_unitaries(n)
        A = inverse_channel(as_operator(O), "pauli", n)
        return _gamma_from_batches(_born_diag(us, sigma.density_matrix()), _born_diag(us, A), True)
    if ensemble == "clifford" and n == 1:
        us = _layer_unitaries(1)
        A = inverse_channel(as_operator(O), "clifford", 1)
        return _gamma_from_batches(_born_diag(us, sigma.density_matrix()), _born_diag(us, A), True)

    if budget < 1:
        raise ValueError("budget must be >= 1 for Monte Carlo gamma estimation")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    A = inverse_channel(as_operator(O), ensemble, n)
    rho = sigma.density_matrix()
    if ensemble == "pauli":
        idx = rng.integers(0, 24, size=(budget, n))
        us = SINGLE_QUBIT_UNITARIES[idx[:, 0]]
        for i in range(1, n):
            nxt = SINGLE_QUBIT_UNITARIES[idx[:, i]]
            us = np.einsum("uab,ucd->uacbd", us, nxt).reshape(budget, us.shape[1] * 2, -1)
    elif ensemble == "clifford":
        us = np.stack([to_unitary(GlobalClifford(sample_global(n, rng))) for _ in range(budget)])
    elif ensemble == "haar":
        us = np.stack([sample_haar(2 ** n, rng) for _ in range(budget)])
    else:
        raise ValueError(f"unknown ensemble {ensemble!r}")
    return _gamma_from_batches(_born_diag(us, rho), _born_diag(us, A), False)


def gamma2_pauli_analytic(sigma: QuantumState, P: PauliString) -> float:
    """3^w tr(sigma P)^2."""
    if P.phase_power != 0:
        raise ValueError("P must carry phase +1")
    return 3.0 ** P.weight * expectation(sigma, P) ** 2


def xshadow_norm_pauli(P: PauliString) -> float:
    """3^{w/2}."""
    return 3.0 ** (P.weight / 2.0)


def _traceless_expectation(sigma: QuantumState, O) -> float:
    if isinstance(O, PauliString):
        return expectation(sigma, O) if O.weight > 0 else 0.0
    return expectation(sigma, traceless_part(O))


def variance_predict(
    sigma: QuantumState, O, ensemble: str, M: int, K: int, gammas: GammaPair
) -> VariancePrediction:
    """(1/M)[(1/K) gamma1 + (1 - 1/K) gamma2 - tr(O0 rho)^2] with given gammas."""
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    mean_sq = _traceless_expectation(sigma, O) ** 2
    raw = (gammas.gamma1 / K + (1.0 - 1.0 / K) * gammas.gamma2 - mean_sq) / M
    return VariancePrediction(max(raw, 0.0) if raw > -1e-9 else raw, gammas.gamma1, gammas.gamma2, mean_sq, M, K)


def variance_pauli_exact(P: PauliString, rho: QuantumState, M: int, K: int) -> float:
    """(1/M)[(1/K) 3^w + (1 - 1/K) 3^w t^2 - t^2] with t = tr(P rho)."""
    if P.phase_power != 0:
        raise ValueError("P must carry phase +1")
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    t2 = expectation(rho, P) ** 2
    pw = 3.0 ** P.weight
    return (pw / K + (1.0 - 1.0 / K) * pw * t2 - t2) / M


def clifford_variance_bound(O, M: int, K: int, c: float) -> float:
    """(1/M)[3/K + (1 - 1/K) c] ||O0||_2^2."""
    if c <= 0:
        raise ValueError("c must be positive")
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    if isinstance(O, PauliString):
        hs2 = 0.0 if O.weight == 0 else float(2 ** O.n)
    else:
        hs2 = frobenius_norm(traceless_part(O)) ** 2
    return (3.0 / K + (1.0 - 1.0 / K) * c) * hs2 / M


def moment_stats(values: np.ndarray):
    """(mean, unbiased variance, stderr of the variance via the 4th moment)."""
    x = np.asarray(values, dtype=float)
    T = len(x)
    mean = float(x.mean())
    if T < 2:
        return mean, 0.0, 0.0
    s2 = float(x.var(ddof=1))
    m4 = float(np.mean((x - mean) ** 4))
    var_s2 = (m4 - (T - 3) / (T - 1) * s2 * s2) / T
    return mean, s2, float(np.sqrt(max(var_s2, 0.0)))


def empirical_variance(
    state: QuantumState, O, ensemble: str, M: int, K: int, trials: int, seed: int = 0
):
    """Sample mean/variance of the estimator over independent shadow sets."""
    if trials < 2:
        raise ValueError("need at least 2 trials")
    from . import engine

    estimates = engine.estimator_samples(state, O, ensemble, M, K, trials, seed)
    return moment_stats(estimates)


def xshadow_norm_search(
    O, ensemble: str, candidates: int = 8, budget: int = 0, seed: int = 0
) -> float:
    """Lower bound on the cross-shadow norm: max sqrt(Gamma2) over candidates.

    Candidate states are the eigenvectors of the (tracelessed) observable plus
    `candidates` random pure states.
    """
    if candidates < 1:
        raise ValueError("candidates must be >= 1")
    if isinstance(O, PauliString):
        O0 = traceless_part(O.to_matrix())
    else:
        O0 = traceless_part(as_operator(O))
    d = O0.shape[0]
    n = int(np.log2(d))
    if frobenius_norm(O0) < 1e-14:
        return 0.0
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1,)))
    vecs = [v for v in np.linalg.eigh(O0)[1].T]
    for _ in range(candidates):
        g = rng.normal(size=d) + 1j * rng.normal(size=d)
        vecs.append(g / np.linalg.norm(g))
    best = 0.0
    for k, v in enumerate(vecs):
        sigma = QuantumState(n, "pure", v)
        pair = gamma_brute(sigma, O0, ensemble, budget=budget, seed=seed + 7 * k + 1)
        best = max(best, float(np.sqrt(max(pair.gamma2, 0.0))))
    return best
