"""Entanglement measures and the thermodynamic-analogy calculators.

The two optimisation-based measures (entanglement of formation and relative
entropy of entanglement) return certified *upper* bounds: every value they
report is attained by an explicit ensemble or separable state.  Restarts are
seeded from a single user seed and merged by taking the minimum, so results
do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import CapExceeded, MixedStateError
from .schmidt import entropy_of, osc
from .states import DensityMatrix, PureState, von_neumann_entropy

DEFAULT_RESTARTS = 32
DEFAULT_ITERS = 500
DEFAULT_TOL = 1e-7
EOF_MAX_SIDE = 16
REE_MAX_SIDE = 9
PURITY_TOL = 1e-9
_LOG_FLOOR = 1e-30


@dataclass(frozen=True)
class MeasureResult:
    value: float
    method: str
    iterations: int = 0
    converged: bool = True
    restarts: int = 0
    seed: int | None = None
    upper_witness: float | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "restarts": self.restarts,
            "seed": self.seed,
            "upper_witness": self.upper_witness,
        }


def _pure_from_density(rho: DensityMatrix) -> PureState:
    if rho.purity < 1 - PURITY_TOL:
        raise MixedStateError(
            f"state is mixed (purity {rho.purity:.6f}); use eof_mixed for mixed states"
        )
    w, v = np.linalg.eigh(rho.matrix)
    return PureState.normalized(v[:, -1], rho.dims)


def entropy_of_entanglement(state) -> MeasureResult:
    """Von Neumann entropy of either reduction of a pure state."""
    if isinstance(state, DensityMatrix):
        state = _pure_from_density(state)
    return MeasureResult(entropy_of(osc(state)), "closed_form")


def pure_rates(phi) -> tuple[float, float]:
    """Distillable entanglement and entanglement cost of a pure state (both ``E_S``)."""
    if isinstance(phi, DensityMatrix):
        phi = _pure_from_density(phi)
    e = entropy_of(osc(phi))
    return e, e


def sandwich_check(e: float, e_d: float, e_c: float, tol: float = 1e-9) -> bool:
    """Whether ``E_D - tol <= E <= E_C + tol``."""
    return e_d - tol <= e <= e_c + tol


def first_law_bound_entanglement(e_c: float, e_d: float) -> float:
    """Bound entanglement ``E_b = E_C - E_D``."""
    if not e_c >= e_d >= 0:
        raise ValueError(f"need E_C >= E_D >= 0, got E_C={e_c}, E_D={e_d}")
    return e_c - e_d


def entanglement_temperature(e_c: float, e_d: float, s_e: float) -> float:
    """``T_e = (E_C - E_D) / S_e``; the caller supplies the entropy ``S_e``."""
    if s_e <= 0:
        raise ValueError(f"entropy S_e must be positive, got {s_e} (temperature diverges)")
    return first_law_bound_entanglement(e_c, e_d) / s_e


# ---------------------------------------------------------------------------
# entanglement of formation (convex roof)
# ---------------------------------------------------------------------------


class _RoofObjective:
    """Average ensemble entanglement as a function of an isometry ``U`` (K x r).

    Ensemble members are the rows of ``U @ W`` where the rows of ``W`` are the
    scaled eigenvectors ``sqrt(lambda_i) e_i`` of rho; every pure-state
    ensemble of rho with at most K members arises this way.
    """

    def __init__(self, w: np.ndarray, dims: tuple[int, int]):
        self.w = w
        self.dims = dims
        self.reduce_b = dims[1] <= dims[0]

    def __call__(self, u: np.ndarray, grad: bool = False):
        da, db = self.dims
        m = (u @ self.w).reshape(u.shape[0], da, db)
        if self.reduce_b:
            # reduced on B (smaller side): sigma = M^T conj(M)
            sig = np.einsum("kai,kaj->kij", m, m.conj())
        else:
            sig = np.einsum("kia,kja->kij", m, m.conj())
        sig = (sig + sig.conj().transpose(0, 2, 1)) / 2
        lam, vec = np.linalg.eigh(sig)
        lam = np.clip(lam, 0.0, None)
        p = lam.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = -np.sum(np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1)), 0.0), axis=1)
            ent += np.where(p > 0, p * np.log2(np.where(p > 0, p, 1)), 0.0)
        f = float(ent.sum())
        if not grad:
            return f
        loglam = np.log2(np.maximum(lam, _LOG_FLOOR))
        logp = np.log2(np.maximum(p, _LOG_FLOOR))
        g = -np.einsum("kij,kj,klj->kil", vec, loglam, vec.conj())
        g += logp[:, None, None] * np.eye(sig.shape[1])[None]
        g[p <= 0] = 0.0
        if self.reduce_b:
            c = m @ g.conj()
        else:
            c = np.einsum("kij,kja->kia", g, m)
        c = c.reshape(u.shape[0], -1)
        return f, 2.0 * c @ self.w.conj().T


def _qf(a: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    return q * np.where(np.abs(d) > 0, d / np.abs(np.where(d == 0, 1, d)), 1.0)


def _stiefel_descent(obj: _RoofObjective, u: np.ndarray, iters: int, tol: float):
    """Armijo gradient descent on the complex Stiefel manifold (QR retraction).

    Accepted steps strictly decrease the objective.
    """
    f, g = obj(u, grad=True)
    step = 1.0
    history = [f]
    converged = False
    it = 0
    for it in range(1, iters + 1):
        uhg = u.conj().T @ g
        rg = g - u @ ((uhg + uhg.conj().T) / 2)
        gn2 = float(np.real(np.vdot(rg, rg)))
        if gn2 < 1e-24:
            converged = True
            break
        t = step
        accepted = False
        while t > 1e-14:
            cand = _qf(u - t * rg)
            fc = obj(cand)
            if fc <= f - 1e-4 * t * gn2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True
            break
        improvement = f - fc
        u = cand
        f, g = obj(u, grad=True)
        history.append(f)
        step = min(4.0 * t, 1e3)
        if improvement < tol:
            converged = True
            break
    return u, f, it, converged


def _random_isometry(k: int, r: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))
    return _qf(z)


def eof_decomposition(rho: DensityMatrix, tol: float = 1e-12):
    """Scaled eigenvectors of ``rho`` as rows: ``W[i] = sqrt(lambda_i) e_i``."""
    lam, vec = np.linalg.eigh(rho.matrix)
    keep = lam > tol
    return (vec[:, keep] * np.sqrt(lam[keep])).T


def ensemble_average(rho: DensityMatrix, u: np.ndarray) -> float:
    """Average entanglement of the ensemble generated by isometry ``u``."""
    return _RoofObjective(eof_decomposition(rho), rho.dims)(u)


def eof_mixed(
    rho,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    ensemble_size: int | None = None,
) -> MeasureResult:
    """Convex-roof upper estimate of the entanglement of formation.

    The first start is the eigendecomposition ensemble itself, so the
    result never exceeds its average; the other starts are random
    isometries of size ``ensemble_size`` (default ``rank**2``).
    """
    if isinstance(rho, PureState):
        rho = rho.projector()
    side = rho.dims[0] * rho.dims[1]
    if side > EOF_MAX_SIDE:
        raise CapExceeded(f"eof_mixed supports systems up to 4x4 (side {EOF_MAX_SIDE}), got {rho.dims}")
    w = eof_decomposition(rho)
    r = w.shape[0]
    if r == 1:
        value = entropy_of(osc(PureState.normalized(w[0], rho.dims)))
        return MeasureResult(value, "convex_roof", 0, True, 0, seed, upper_witness=value)
    k = max(r, ensemble_size or r * r)
    obj = _RoofObjective(w, rho.dims)
    rng = np.random.default_rng(seed)
    starts = [np.eye(k, r, dtype=complex)]
    starts += [_random_isometry(k, r, rng) for _ in range(max(0, restarts - 1))]
    eig_avg = obj(starts[0])
    best, best_it, best_conv = math.inf, 0, False
    for u0 in starts:
        _, f, it, conv = _stiefel_descent(obj, u0, iters, tol)
        if f < best:
            best, best_it, best_conv = f, it, conv
    return MeasureResult(max(best, 0.0), "convex_roof", best_it, best_conv, len(starts), seed,
                         upper_witness=eig_avg)


# ---------------------------------------------------------------------------
# relative entropy of entanglement
# ---------------------------------------------------------------------------


def relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``S(rho || sigma)`` in bits; ``inf`` when supp(rho) is not inside supp(sigma)."""
    lr = np.linalg.eigvalsh(rho)
    lr = lr[lr > 1e-15]
    neg_s = float(np.sum(lr * np.log2(lr)))
    mu, v = np.linalg.eigh(sigma)
    weights = np.real(np.einsum("ji,jk,ki->i", v.conj(), rho, v))
    if np.any((mu <= 1e-15) & (weights > 1e-12)):
        return math.inf
    mask = weights > 1e-15
    return neg_s - float(np.sum(weights[mask] * np.log2(np.maximum(mu[mask], 1e-300))))


class _SeparableFamily:
    """Separable states ``sum_k q_k |a_k><a_k| ⊗ |b_k><b_k|`` from a real vector."""

    def __init__(self, dims: tuple[int, int], terms: int):
        self.dims = dims
        self.terms = terms
        self.size = terms * (1 + 2 * dims[0] + 2 * dims[1])

    def sigma(self, x: np.ndarray) -> np.ndarray:
        da, db = self.dims
        k = self.terms
        logw = x[:k]
        q = np.exp(logw - logw.max())
        q /= q.sum()
        rest = x[k:].reshape(k, 2 * (da + db))
        a = rest[:, :da] + 1j * rest[:, da : 2 * da]
        b = rest[:, 2 * da : 2 * da + db] + 1j * rest[:, 2 * da + db :]
        a /= np.maximum(np.linalg.norm(a, axis=1, keepdims=True), 1e-300)
        b /= np.maximum(np.linalg.norm(b, axis=1, keepdims=True), 1e-300)
        v = np.einsum("ki,kj->kij", a, b).reshape(k, -1)
        return np.einsum("k,ki,kj->ij", q, v, v.conj())

    def from_diagonal(self, rho: np.ndarray) -> np.ndarray:
        """Parameters of the dephased state ``sum_ij rho_{ij,ij} |ij><ij|``."""
        da, db = self.dims
        diag = np.clip(np.real(np.diag(rho)), 0, None)
        order = np.argsort(-diag)[: self.terms]
        x = np.zeros(self.size)
        rest = np.zeros((self.terms, 2 * (da + db)))
        for t in range(self.terms):
            idx = order[t % order.size]
            i, j = divmod(int(idx), db)
            x[t] = math.log(max(diag[idx], 1e-12)) if t < order.size else math.log(1e-12)
            rest[t, i] = 1.0
            rest[t, 2 * da + j] = 1.0
        x[self.terms :] = rest.reshape(-1)
        return x


def relative_entropy_of_entanglement(
    rho,
    separable_terms: int | None = None,
    iters: int = DEFAULT_ITERS,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> MeasureResult:
    """Upper estimate of ``min_sigma S(rho || sigma)`` over separable ``sigma``.

    ``sigma`` ranges over mixtures of ``separable_terms`` product pure states
    (default ``d_A * d_B``) and is optimised with Powell's derivative-free
    method.  Start 0 is the product-basis dephasing of rho (always separable);
    the remaining starts are random.
    """
    if isinstance(rho, PureState):
        rho = rho.projector()
    side = rho.dims[0] * rho.dims[1]
    if side > REE_MAX_SIDE:
        raise CapExceeded(f"relative entropy of entanglement supports up to 3x3, got {rho.dims}")
    terms = separable_terms or side
    fam = _SeparableFamily(rho.dims, terms)
    mat = np.asarray(rho.matrix)
    rng = np.random.default_rng(seed)

    def f(x):
        val = relative_entropy(mat, fam.sigma(x))
        return val if math.isfinite(val) else 1e6

    starts = [fam.from_diagonal(mat)]
    for _ in range(max(0, restarts - 1)):
        x0 = rng.standard_normal(fam.size)
        x0[:terms] = 0.0
        starts.append(x0)
    best, best_it, best_conv = math.inf, 0, False
    for x0 in starts:
        f0 = f(x0)
        res = minimize(f, x0, method="Powell", options={"maxiter": iters, "xtol": 1e-6, "ftol": tol})
        val = min(float(res.fun), f0)
        if val < best:
            best, best_it, best_conv = val, int(res.nit), bool(res.success)
        if best <= tol:
            break
    return MeasureResult(max(best, 0.0), "relative_entropy_opt", best_it, best_conv, len(starts), seed)


def von_neumann(rho) -> float:
    return von_neumann_entropy(rho)
