"""Self-check registry: identity and inequality verifications with residuals.

Each check reports a single max residual. For an equality the residual is the
largest absolute deviation; for an inequality it is the largest signed
violation, so a negative residual means the inequality holds with margin.
A check passes when its residual is at most its tolerance.

The ``fast`` level sticks to single-qubit exact enumerations and dense
multi-copy identities (well under ten seconds); ``full`` adds the two-qubit
enumerations and the Monte Carlo bound checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cliffords import GlobalClifford, SINGLE_QUBIT_UNITARIES, sample_global, to_unitary
from .fourcopy import (
    all_s4,
    f_operator,
    lambda_diagonal,
    permutation_operator,
    q_projector,
    twirl4_single,
    twirl_t_single_pauli,
)
from .paulis import PAULI_1Q, PauliString, frobenius_norm, pauli_enumerate, traceless_part
from .shadows import inverse_channel
from .states import QuantumState, expectation
from .variance import gamma_brute, variance_predict


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_residual: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"CHECK {self.name} {status} max_residual={self.max_residual:.6g}"


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(tag,)))


def _random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _random_traceless(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (g + g.conj().T) / 2.0
    return traceless_part(h)


def _random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def _kron4(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.kron(a, b), np.kron(a, b))


# ---------------------------------------------------------------------------
# dense multi-copy identities
# ---------------------------------------------------------------------------


def check_twirl4_diagonal(seed: int) -> float:
    """Twirl of the 4-copy diagonal correlator against its three-term form."""
    lhs = twirl4_single(lambda_diagonal(1))
    eye2 = np.eye(4)
    f2, f4 = f_operator(2), f_operator(4)
    rhs = (0.5 * np.kron(eye2, f2) + 0.5 * np.kron(f2, eye2) + f4) / 3.0
    return float(np.max(np.abs(lhs - rhs)))


def check_pauli_twirls(seed: int) -> float:
    """t-copy twirls of X, Y, Z: symmetric average for even t, zero for odd."""
    worst = 0.0
    for t in range(2, 7):
        if t % 2 == 0:
            rhs = np.zeros((2 ** t, 2 ** t), dtype=complex)
            for m in (PAULI_1Q[c] for c in "XYZ"):
                acc = m.copy()
                for _ in range(t - 1):
                    acc = np.kron(acc, m)
                rhs += acc
            rhs /= 3.0
        else:
            rhs = np.zeros((2 ** t, 2 ** t))
        for c in "XYZ":
            worst = max(worst, float(np.max(np.abs(twirl_t_single_pauli(c, t) - rhs))))
    return worst


def check_q_projector(seed: int) -> float:
    """Q is a Hermitian projector commuting with every copy permutation."""
    worst = 0.0
    for n in (1, 2):
        q = q_projector(n)
        worst = max(worst, float(np.max(np.abs(q @ q - q))))
        worst = max(worst, float(np.max(np.abs(q - q.conj().T))))
        for pi in all_s4():
            t = permutation_operator(pi, 2 ** n)
            worst = max(worst, float(np.max(np.abs(q @ t - t @ q))))
    return worst


def _pi_inequality_worst(D: int, count: int, rng: np.random.Generator) -> float:
    perms = [permutation_operator(pi, D) for pi in all_s4()]
    worst = -np.inf
    for _ in range(count):
        sigma = _random_density(D, rng)
        o0 = _random_traceless(D, rng)
        big = _kron4(sigma, o0)
        bound = np.trace(o0 @ o0).real
        for t in perms:
            worst = max(worst, float(np.trace(big @ t).real - bound))
    return worst


def check_pi_inequality_d2(seed: int) -> float:
    return _pi_inequality_worst(2, 50, _rng(seed, 11))


def check_pi_inequality_d4(seed: int) -> float:
    return _pi_inequality_worst(4, 50, _rng(seed, 12))


# ---------------------------------------------------------------------------
# exact gamma and estimator identities
# ---------------------------------------------------------------------------


def _pauli_moments_worst(n: int, states: int, rng: np.random.Generator) -> float:
    worst = 0.0
    for _ in range(states):
        sigma = QuantumState.density(_random_density(2 ** n, rng))
        for p in pauli_enumerate(n):
            if p.weight == 0:
                continue
            pair = gamma_brute(sigma, p, "pauli")
            t = expectation(sigma, p)
            pw = 3.0 ** p.weight
            worst = max(worst, abs(pair.gamma1 - pw), abs(pair.gamma2 - pw * t * t))
    return worst


def check_pauli_moments_n1(seed: int) -> float:
    """Weight-w Pauli moments: gamma1 = 3^w, gamma2 = 3^w tr(sigma P)^2."""
    return _pauli_moments_worst(1, 20, _rng(seed, 21))


def check_pauli_moments_n2(seed: int) -> float:
    return _pauli_moments_worst(2, 20, _rng(seed, 22))


def _layer_products(n: int) -> np.ndarray:
    us = SINGLE_QUBIT_UNITARIES
    for _ in range(n - 1):
        us = np.einsum("uab,vcd->uvacbd", us, SINGLE_QUBIT_UNITARIES).reshape(
            -1, us.shape[1] * 2, us.shape[1] * 2
        )
    return us


def _unbiased_worst(n: int, ensemble: str, states: int, rng: np.random.Generator) -> float:
    # at n=1 the 24 single-qubit Cliffords exhaust both ensembles
    us = _layer_products(n)
    d = 2 ** n
    worst = 0.0
    for _ in range(states):
        rho = _random_density(d, rng)
        recon = np.zeros((d, d), dtype=complex)
        for u in us:
            probs = np.real(np.einsum("bj,jk,bk->b", u, rho, u.conj()))
            for b in range(d):
                a = np.outer(u[b].conj(), u[b])
                recon += probs[b] * inverse_channel(a, ensemble, n)
        recon /= len(us)
        worst = max(worst, float(np.max(np.abs(recon - rho))))
    return worst


def check_unbiased_pauli_n1(seed: int) -> float:
    """Exact channel average reproduces the state entrywise (Pauli, n=1)."""
    return _unbiased_worst(1, "pauli", 20, _rng(seed, 31))


def check_unbiased_clifford_n1(seed: int) -> float:
    return _unbiased_worst(1, "clifford", 20, _rng(seed, 32))


def check_unbiased_pauli_n2(seed: int) -> float:
    return _unbiased_worst(2, "pauli", 20, _rng(seed, 33))


def check_unbiased_clifford_n2_mc(seed: int) -> float:
    """Monte Carlo channel average at n=2: every entry within 3 stderr."""
    rng = _rng(seed, 34)
    d = 4
    rho = _random_density(d, rng)
    T = 2000
    samples = np.empty((T, d, d), dtype=complex)
    for t in range(T):
        u = to_unitary(GlobalClifford(sample_global(2, rng)))
        probs = np.real(np.einsum("bj,jk,bk->b", u, rho, u.conj()))
        acc = np.zeros((d, d), dtype=complex)
        for b in range(d):
            w = u[b].conj()
            acc += probs[b] * ((d + 1) * np.outer(w, w.conj()) - np.eye(d))
        samples[t] = acc
    delta = samples.mean(axis=0) - rho
    se_re = samples.real.std(axis=0, ddof=1) / np.sqrt(T)
    se_im = samples.imag.std(axis=0, ddof=1) / np.sqrt(T)
    worst_re = np.max(np.abs(delta.real) - 3.0 * np.maximum(se_re, 1e-15))
    worst_im = np.max(np.abs(delta.imag) - 3.0 * np.maximum(se_im, 1e-15))
    return float(max(worst_re, worst_im))


def check_jensen_lower_bound(seed: int) -> float:
    """gamma2 <= gamma1 and gamma2 >= tr(sigma O)^2 on exact instances."""
    rng = _rng(seed, 41)
    worst = -np.inf
    for ensemble in ("pauli", "clifford"):
        for _ in range(15):
            sigma = QuantumState.density(_random_density(2, rng))
            o = _random_traceless(2, rng) + rng.normal() * np.eye(2)
            pair = gamma_brute(sigma, o, ensemble)
            t = expectation(sigma, o)
            worst = max(worst, pair.gamma2 - pair.gamma1, t * t - pair.gamma2)
    return float(worst)


def check_gamma2_twirl_form(seed: int) -> float:
    """gamma2 at n=1 equals (D+1)^2 tr[(sigma x O0)^{x2} twirl4(Lambda)]."""
    rng = _rng(seed, 42)
    twirled = twirl4_single(lambda_diagonal(1))
    worst = 0.0
    for _ in range(10):
        sigma = _random_density(2, rng)
        o0 = _random_traceless(2, rng)
        form = 9.0 * np.trace(_kron4(sigma, o0) @ twirled).real
        pair = gamma_brute(QuantumState.density(sigma), o0, "clifford")
        worst = max(worst, abs(pair.gamma2 - form))
    return worst


def check_gamma1_clifford_form(seed: int) -> float:
    """gamma1 for the n=1 Clifford ensemble vs its closed form."""
    rng = _rng(seed, 43)
    worst = 0.0
    for _ in range(10):
        sigma = _random_density(2, rng)
        o0 = _random_traceless(2, rng)
        pair = gamma_brute(QuantumState.density(sigma), o0, "clifford")
        form = (3.0 / 4.0) * (np.trace(o0 @ o0).real + 2.0 * np.trace(sigma @ o0 @ o0).real)
        worst = max(worst, abs(pair.gamma1 - form))
    return worst


def check_prediction_shape(seed: int) -> float:
    """Variance prediction is nonnegative and non-increasing in K."""
    rng = _rng(seed, 44)
    worst = -np.inf
    for _ in range(10):
        sigma = QuantumState.density(_random_density(2, rng))
        o0 = _random_traceless(2, rng)
        pair = gamma_brute(sigma, o0, "pauli")
        preds = [variance_predict(sigma, o0, "pauli", 4, k, pair).value for k in range(1, 9)]
        worst = max(worst, -min(preds))
        worst = max(worst, max(b - a for a, b in zip(preds, preds[1:])))
    return float(worst)


def check_gamma2_homogeneity(seed: int) -> float:
    """gamma2(sigma, a O) = a^2 gamma2(sigma, O) for random scalars."""
    rng = _rng(seed, 45)
    worst = 0.0
    for _ in range(10):
        sigma = QuantumState.density(_random_density(2, rng))
        o = _random_traceless(2, rng)
        a = rng.uniform(-3.0, 3.0)
        base = gamma_brute(sigma, o, "pauli")
        scaled = gamma_brute(sigma, a * o, "pauli")
        worst = max(worst, abs(scaled.gamma2 - a * a * base.gamma2))
        worst = max(worst, abs(scaled.gamma1 - a * a * base.gamma1))
    return worst


def check_xshadow_subadditive(seed: int) -> float:
    """sqrt(gamma2) is subadditive in the observable at fixed sigma."""
    rng = _rng(seed, 46)
    worst = -np.inf
    for _ in range(15):
        sigma = QuantumState.density(_random_density(2, rng))
        o1 = _random_traceless(2, rng)
        o2 = _random_traceless(2, rng)
        g12 = np.sqrt(gamma_brute(sigma, o1 + o2, "pauli").gamma2)
        g1 = np.sqrt(gamma_brute(sigma, o1, "pauli").gamma2)
        g2 = np.sqrt(gamma_brute(sigma, o2, "pauli").gamma2)
        worst = max(worst, g12 - g1 - g2)
    return float(worst)


# ---------------------------------------------------------------------------
# Monte Carlo bound checks (full level)
# ---------------------------------------------------------------------------

BOUND_ENVELOPE = 10.0


def check_clifford_gamma2_envelope(seed: int) -> float:
    """Clifford gamma2 stays below 10 ||O0||_2^2 beyond 3 Monte Carlo sigma."""
    rng = _rng(seed, 51)
    budgets = {2: 300, 3: 250, 4: 200, 5: 120, 6: 80}
    worst = -np.inf
    for n, budget in budgets.items():
        d = 2 ** n
        for rep in range(2):
            sigma = QuantumState.pure(_random_pure(d, rng))
            o0 = _random_traceless(d, rng)
            pair = gamma_brute(
                sigma, o0, "clifford", budget=budget, seed=int(rng.integers(2 ** 40))
            )
            hs2 = frobenius_norm(o0) ** 2
            worst = max(worst, pair.gamma2 - BOUND_ENVELOPE * hs2 - 3.0 * pair.mc_error[1])
    return float(worst)


def check_haar_gamma2_envelope(seed: int) -> float:
    """Same envelope for Haar-sampled unitaries at D = 4 and 8."""
    rng = _rng(seed, 52)
    worst = -np.inf
    for n in (2, 3):
        d = 2 ** n
        for rep in range(2):
            sigma = QuantumState.pure(_random_pure(d, rng))
            o0 = _random_traceless(d, rng)
            pair = gamma_brute(sigma, o0, "haar", budget=400, seed=int(rng.integers(2 ** 40)))
            hs2 = frobenius_norm(o0) ** 2
            worst = max(worst, pair.gamma2 - BOUND_ENVELOPE * hs2 - 3.0 * pair.mc_error[1])
    return float(worst)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

FAST_CHECKS = (
    ("twirl4_diagonal", check_twirl4_diagonal, 1e-12),
    ("pauli_twirl_t2_t6", check_pauli_twirls, 1e-12),
    ("q_projector", check_q_projector, 1e-12),
    ("pi_inequality_d2", check_pi_inequality_d2, 1e-10),
    ("pauli_moments_n1", check_pauli_moments_n1, 1e-10),
    ("unbiased_pauli_n1", check_unbiased_pauli_n1, 1e-10),
    ("unbiased_clifford_n1", check_unbiased_clifford_n1, 1e-10),
    ("jensen_lower_bound", check_jensen_lower_bound, 1e-10),
    ("gamma2_twirl_form", check_gamma2_twirl_form, 1e-10),
    ("gamma1_clifford_form", check_gamma1_clifford_form, 1e-10),
    ("prediction_shape", check_prediction_shape, 1e-10),
    ("gamma2_homogeneity", check_gamma2_homogeneity, 1e-10),
    ("xshadow_subadditive", check_xshadow_subadditive, 1e-10),
)

FULL_CHECKS = FAST_CHECKS + (
    ("pauli_moments_n2", check_pauli_moments_n2, 1e-10),
    ("unbiased_pauli_n2", check_unbiased_pauli_n2, 1e-10),
    ("unbiased_clifford_n2_mc", check_unbiased_clifford_n2_mc, 0.0),
    ("pi_inequality_d4", check_pi_inequality_d4, 1e-10),
    ("clifford_gamma2_envelope", check_clifford_gamma2_envelope, 0.0),
    ("haar_gamma2_envelope", check_haar_gamma2_envelope, 0.0),
)


def run_checks(level: str = "fast", seed: int = 0) -> list[CheckResult]:
    if level == "fast":
        table = FAST_CHECKS
    elif level == "full":
        table = FULL_CHECKS
    else:
        raise ValueError(f"unknown level {level!r}")
    results = []
    for name, func, tol in table:
        residual = func(seed)
        results.append(CheckResult(name, residual <= tol, residual))
    return results
