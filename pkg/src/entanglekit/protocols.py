"""Concentration (distillation), dilution and teleportation protocols.

Binomial statistics are computed in the log domain throughout, so the
reports stay accurate for ``n`` in the tens of thousands.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import CapExceeded, InvariantViolation
from .schmidt import binary_entropy
from .states import NORM_TOL, PureState, bell_state

SK_MAX_N = 12
_WINDOW_SLACK = 1e-9
_LN2 = math.log(2.0)


def _check_alpha_sq(alpha_sq: float) -> float:
    alpha_sq = float(alpha_sq)
    if not 0.0 < alpha_sq < 1.0:
        raise ValueError(f"alpha_sq must lie strictly between 0 and 1, got {alpha_sq}")
    return alpha_sq


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return int(n)


def _log_binom(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _log_pk(alpha_sq: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(n + 1, dtype=float)
    lb = _log_binom(n, k)
    return lb, lb + k * math.log(alpha_sq) + (n - k) * math.log1p(-alpha_sq)


@dataclass(frozen=True)
class DistillationReport:
    n: int
    alpha_sq: float
    p_k: dict
    expected_yield_bits: float
    entropy_bound: float
    samples: list | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha_sq": self.alpha_sq,
            "p_k": {str(k): v for k, v in self.p_k.items()},
            "expected_yield_bits": self.expected_yield_bits,
            "entropy_bound": self.entropy_bound,
            "yield_per_copy": self.expected_yield_bits / self.n,
            "samples": self.samples,
        }


def _expected_log2_binom(alpha_sq: float, n: int) -> tuple[np.ndarray, float]:
    lb, lp = _log_pk(alpha_sq, n)
    # renormalise away the last few ulps of rounding
    lp = lp - logsumexp(lp)
    p = np.exp(lp)
    return p, float(np.dot(p, lb) / _LN2)


def distill_statistics(alpha_sq: float, n: int) -> DistillationReport:
    """Outcome distribution of the collective measurement on ``n`` copies.

    ``p_k = C(n,k) a^k (1-a)^(n-k)`` with ``a = alpha_sq``; outcome ``k``
    leaves a maximally entangled state of dimension ``C(n,k)``.
    """
    alpha_sq = _check_alpha_sq(alpha_sq)
    n = _check_n(n)
    p, expected = _expected_log2_binom(alpha_sq, n)
    return DistillationReport(
        n=n,
        alpha_sq=alpha_sq,
        p_k={k: float(p[k]) for k in range(n + 1)},
        expected_yield_bits=expected,
        entropy_bound=n * binary_entropy(alpha_sq),
    )


def dilution_cost(alpha_sq: float, n: int) -> float:
    """Expected singlet consumption for dilution into ``n`` copies."""
    alpha_sq = _check_alpha_sq(alpha_sq)
    n = _check_n(n)
    return _expected_log2_binom(alpha_sq, n)[1]


def distill_sample(alpha_sq: float, n: int, shots: int, seed: int = 0) -> list[float]:
    """Simulated yields ``log2 C(n,k)`` for ``shots`` independent runs."""
    alpha_sq = _check_alpha_sq(alpha_sq)
    n = _check_n(n)
    if shots < 0:
        raise ValueError("shots must be non-negative")
    if shots == 0:
        return []
    ks = np.random.default_rng(seed).binomial(n, alpha_sq, size=shots)
    return [float(v) for v in _log_binom(n, ks.astype(float)) / _LN2]


@dataclass(frozen=True)
class TypicalSetReport:
    n: int
    alpha_sq: float
    delta: float
    window: tuple[int, int]
    mass: float
    size_log2: float
    lower_bound_log2: float
    upper_bound_log2: float

    @property
    def epsilon(self) -> float:
        return 1.0 - self.mass

    @property
    def induced_delta(self) -> float:
        """Smallest ``d`` with ``size_log2`` inside ``n (H -+ d)``."""
        return abs(self.size_log2 / self.n - binary_entropy(self.alpha_sq))

    @property
    def within_bounds(self) -> bool:
        return self.lower_bound_log2 <= self.size_log2 <= self.upper_bound_log2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha_sq": self.alpha_sq,
            "delta": self.delta,
            "window": list(self.window),
            "mass": self.mass,
            "epsilon": self.epsilon,
            "size_log2": self.size_log2,
            "lower_bound_log2": self.lower_bound_log2,
            "upper_bound_log2": self.upper_bound_log2,
            "induced_delta": self.induced_delta,
            "within_bounds": self.within_bounds,
        }


def typical_set_report(alpha_sq: float, n: int, delta: float) -> TypicalSetReport:
    alpha_sq = _check_alpha_sq(alpha_sq)
    n = _check_n(n)
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    lo = max(0, math.floor(n * (alpha_sq - delta) + _WINDOW_SLACK))
    hi = min(n, math.ceil(n * (alpha_sq + delta) - _WINDOW_SLACK))
    lb, lp = _log_pk(alpha_sq, n)
    norm = logsumexp(lp)
    mass = float(min(1.0, math.exp(logsumexp(lp[lo : hi + 1]) - norm)))
    size_log2 = float(logsumexp(lb[lo : hi + 1]) / _LN2)
    h = binary_entropy(alpha_sq)
    lower = (math.log2(mass) if mass > 0 else -math.inf) + n * (h - delta)
    return TypicalSetReport(n, alpha_sq, float(delta), (lo, hi), mass, size_log2, lower, n * (h + delta))


def verify_sk_maximally_entangled(alpha_sq: float, n: int, k: int, tol: float = 1e-9) -> bool:
    """Build the post-measurement state for outcome ``k`` and check it is maximally entangled.

    The ``n``-copy state of ``sqrt(a)|00> + sqrt(1-a)|11>`` is projected on
    Alice's weight-``k`` subspace; only the supported block of the
    ``2^n x 2^n`` coefficient matrix is materialised.
    """
    alpha_sq = _check_alpha_sq(alpha_sq)
    n = _check_n(n)
    if n > SK_MAX_N:
        raise CapExceeded(f"statevector construction limited to n <= {SK_MAX_N}, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    single = np.diag([math.sqrt(alpha_sq), math.sqrt(1 - alpha_sq)])
    # the bit value 0 is the alpha branch, so "k" counts alpha outcomes
    seqs = [s for s in itertools.product((0, 1), repeat=n) if s.count(0) == k]
    rows = np.array(seqs, dtype=int)
    block = np.ones((len(seqs), len(seqs)))
    for i in range(n):
        block *= single[rows[:, i][:, None], rows[:, i][None, :]]
    block /= np.linalg.norm(block)
    sv = np.linalg.svd(block, compute_uv=False) ** 2
    sv = sv[sv > 1e-12]
    expected = 1.0 / math.comb(n, k)
    return sv.size == math.comb(n, k) and bool(np.all(np.abs(sv - expected) <= tol))


# ---------------------------------------------------------------------------
# teleportation
# ---------------------------------------------------------------------------

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Bell outcome on (A', A) -> (label, correction name, correction operator for B).
# Expanding |11> = (Φ⁺ - Φ⁻)/√2 leaves Bob with α|1> - β|0> after Φ⁺ and
# α|1> + β|0> after Φ⁻, hence σzσx and σx respectively.
_CORRECTIONS = {
    "psi-": ("Ψ⁻", "identity", _I2),
    "phi+": ("Φ⁺", "σzσx", _Z @ _X),
    "phi-": ("Φ⁻", "σx", _X),
    "psi+": ("Ψ⁺", "σz", _Z),
}
TELEPORT_TOL = 1e-12


@dataclass(frozen=True)
class TeleportOutcome:
    bell_result: str
    probability: float
    correction: str
    bob_state: PureState = field(repr=False)
    fidelity: float

    def to_dict(self) -> dict:
        amps = self.bob_state.amplitudes
        return {
            "bell_result": self.bell_result,
            "probability": self.probability,
            "correction": self.correction,
            "bob_state": {"re": amps.real.tolist(), "im": amps.imag.tolist()},
            "fidelity": self.fidelity,
        }


def _check_qubit(alpha: float, beta: float) -> np.ndarray:
    phi = np.array([alpha, beta], dtype=complex)
    err = abs(float(np.vdot(phi, phi).real) - 1.0)
    if err > NORM_TOL:
        raise InvariantViolation("alpha^2 + beta^2 = 1", f"deviation {err:.3e}")
    return phi


def teleport(alpha: float, beta: float) -> list[TeleportOutcome]:
    """All four branches of teleporting ``alpha|0> + beta|1>`` through a singlet."""
    phi = _check_qubit(alpha, beta)
    # qubit order A', A, B
    full = np.kron(phi, singlet_amplitudes()).reshape(4, 2)
    outcomes = []
    for key, (label, name, corr) in _CORRECTIONS.items():
        bell = bell_state(key).amplitudes
        bob = bell.conj() @ full
        prob = float(np.vdot(bob, bob).real)
        fixed = corr @ (bob / math.sqrt(prob))
        fid = float(abs(np.vdot(phi, fixed)) ** 2)
        outcomes.append(TeleportOutcome(label, prob, name, PureState.normalized(fixed, (1, 2)), fid))
    return outcomes


def singlet_amplitudes() -> np.ndarray:
    return bell_state("psi-").amplitudes


def teleport_sample(alpha: float, beta: float, seed: int = 0) -> TeleportOutcome:
    outcomes = teleport(alpha, beta)
    probs = np.array([o.probability for o in outcomes])
    idx = np.random.default_rng(seed).choice(len(outcomes), p=probs / probs.sum())
    return outcomes[int(idx)]
