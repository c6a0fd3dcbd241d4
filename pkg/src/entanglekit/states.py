"""Bipartite states, Kraus channels and the matrix functionals built on them.

Layout convention: a bipartite amplitude index is ``i_A * d_B + i_B`` (row
major over Alice, then Bob).  A density matrix element ``rho[p, q]`` with
``p = mu * d_B + m`` and ``q = nu * d_B + n`` is reshaped to
``rho4[mu, m, nu, n]``; partial transposition on A swaps ``mu`` and ``nu``,
on B swaps ``m`` and ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ChannelError, DimensionMismatch, InvariantViolation, KindMismatch

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9
KRAUS_TOL = 1e-8

Dims = tuple[int, int]


def _check_dims(dims) -> Dims:
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2 or min(dims) < 1:
        raise InvariantViolation("dims are two positive integers", f"got {dims}")
    return dims  # type: ignore[return-value]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: Dims

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != dims[0] * dims[1]:
            raise InvariantViolation(
                "length(amplitudes) = d_A*d_B", f"{amps.size} != {dims[0]}*{dims[1]}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvariantViolation("unit Euclidean norm", f"norm = {norm:.3e}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes, dims) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps), dims)

    def coefficient_matrix(self) -> np.ndarray:
        """Amplitudes as a ``d_A x d_B`` matrix."""
        return self.amplitudes.reshape(self.dims)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    dims: Dims

    def __post_init__(self):
        dims = _check_dims(self.dims)
        mat = np.asarray(self.matrix, dtype=complex)
        side = dims[0] * dims[1]
        if mat.shape != (side, side):
            raise InvariantViolation("square matrix of side d_A*d_B", f"shape {mat.shape}")
        herm_err = np.max(np.abs(mat - mat.conj().T)) if side else 0.0
        if herm_err > HERMITIAN_TOL:
            raise InvariantViolation("Hermitian", f"max deviation {herm_err:.3e}")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantViolation("unit trace", f"trace = {tr:.12g}")
        # symmetrise before the eigensolve so round-off does not leak in
        lo = np.linalg.eigvalsh((mat + mat.conj().T) / 2)[0]
        if lo < PSD_TOL:
            raise InvariantViolation("positive semidefinite", f"min eigenvalue {lo:.3e}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


State = Union[PureState, DensityMatrix]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Operator-sum channel ``rho -> sum_i E_i rho E_i^dagger``.

    ``out_dims`` is the bipartition of the output space; it defaults to the
    input bipartition when the operators are square.
    """

    operators: tuple
    trace_preserving: bool = True
    out_dims: Dims | None = None
    in_side: int = field(init=False, default=0)

    def __post_init__(self):
        ops = tuple(_frozen(op) for op in self.operators)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(op.shape != shape for op in ops):
            raise ChannelError("Kraus operators must share one matrix shape")
        deficit = np.eye(shape[1]) - sum(op.conj().T @ op for op in ops)
        if self.trace_preserving:
            err = np.max(np.abs(deficit))
            if err > KRAUS_TOL:
                raise InvariantViolation("sum E_i^dagger E_i = I", f"max deviation {err:.3e}")
        else:
            lo = np.linalg.eigvalsh((deficit + deficit.conj().T) / 2)[0]
            if lo < -KRAUS_TOL:
                raise InvariantViolation("sum E_i^dagger E_i <= I", f"min eigenvalue {lo:.3e}")
        if self.out_dims is not None:
            out = _check_dims(self.out_dims)
            if out[0] * out[1] != shape[0]:
                raise ChannelError(f"out_dims {out} do not match operator rows {shape[0]}")
            object.__setattr__(self, "out_dims", out)
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "in_side", shape[1])

    @classmethod
    def unitary(cls, u: np.ndarray) -> "KrausChannel":
        return cls((np.asarray(u, dtype=complex),), trace_preserving=True)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

_BELL = {
    "psi-": np.array([0, 1, -1, 0]) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "phi+": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / np.sqrt(2),
}
BELL_NAMES = tuple(_BELL)


def bell_state(which: str) -> PureState:
    """One of the four Bell states: ``psi-`` (the singlet), ``psi+``, ``phi+``, ``phi-``."""
    key = which.lower().replace("⁻", "-").replace("⁺", "+")
    key = key.replace("ψ", "psi").replace("φ", "phi").replace("Ψ", "psi").replace("Φ", "phi")
    if key not in _BELL:
        raise ValueError(f"unknown Bell state {which!r}; expected one of {BELL_NAMES}")
    return PureState(_BELL[key], (2, 2))


def singlet() -> PureState:
    return bell_state("psi-")


def max_entangled(d: int) -> PureState:
    """``(1/sqrt d) sum_i |ii>`` on a ``d x d`` system."""
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    d = int(d)
    amps = np.zeros(d * d, dtype=complex)
    amps[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return PureState(amps, (d, d))


def werner_antisym(d: int) -> DensityMatrix:
    """Antisymmetric Werner state ``(I - SWAP) / (d (d - 1))``."""
    if int(d) != d or d < 2:
        raise ValueError(f"Werner states need d >= 2, got {d}")
    d = int(d)
    return DensityMatrix((np.eye(d * d) - swap_operator(d)) / (d * (d - 1)), (d, d))


def swap_operator(d: int) -> np.ndarray:
    """``sum_ij |ij><ji|`` on ``C^d (x) C^d``."""
    sw = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            sw[i * d + j, j * d + i] = 1.0
    return sw


def product_state(a: Sequence[complex], b: Sequence[complex]) -> PureState:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return PureState(np.kron(a, b), (a.size, b.size))


def basis_state(i: int, j: int, dims: Dims) -> PureState:
    amps = np.zeros(dims[0] * dims[1], dtype=complex)
    amps[i * dims[1] + j] = 1.0
    return PureState(amps, dims)


def from_schmidt_coefficients(coeffs: Sequence[float], dims: Dims | None = None) -> PureState:
    """``sum_i sqrt(lambda_i) |ii>``; ``dims`` defaults to ``(len, len)``."""
    lam = np.asarray(coeffs, dtype=float)
    d = lam.size
    dims = dims or (d, d)
    if min(dims) < d:
        raise DimensionMismatch(f"{d} coefficients do not fit in dims {dims}")
    amps = np.zeros(dims[0] * dims[1], dtype=complex)
    for i, l in enumerate(lam):
        amps[i * dims[1] + i] = np.sqrt(max(l, 0.0))
    return PureState.normalized(amps, dims)


def maximally_mixed(dims: Dims) -> DensityMatrix:
    n = dims[0] * dims[1]
    return DensityMatrix(np.eye(n) / n, dims)


def random_pure(dims: Dims, rng: np.random.Generator) -> PureState:
    """Haar-random pure state (normalised complex Gaussian amplitudes)."""
    n = dims[0] * dims[1]
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState.normalized(z, dims)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dims: Dims, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state ``G G^dagger / Tr`` with Ginibre ``G`` of the given rank."""
    n = dims[0] * dims[1]
    k = rank or n
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)


def random_separable(dims: Dims, rng: np.random.Generator, terms: int = 4) -> DensityMatrix:
    """Random convex mixture of random product pure states."""
    weights = rng.dirichlet(np.ones(terms))
    n = dims[0] * dims[1]
    mat = np.zeros((n, n), dtype=complex)
    for w in weights:
        a = random_pure((dims[0], 1), rng).amplitudes
        b = random_pure((1, dims[1]), rng).amplitudes
        v = np.kron(a, b)
        mat += w * np.outer(v, v.conj())
    return DensityMatrix(_hermitize(mat), dims)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def local_unitary(state: State, ua: np.ndarray, ub: np.ndarray) -> State:
    u = np.kron(ua, ub)
    if isinstance(state, PureState):
        return PureState.normalized(u @ state.amplitudes, state.dims)
    return DensityMatrix(_hermitize(u @ state.matrix @ u.conj().T), state.dims)


def as_density(state: State) -> DensityMatrix:
    return state.projector() if isinstance(state, PureState) else state


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def tensor(a: State, b: State) -> State:
    """Tensor product regrouped as ``(A A') x (B B')``.

    The result keeps the bipartite cut: Alice holds both A factors, Bob both
    B factors, so dims multiply componentwise.
    """
    if type(a) is not type(b):
        raise KindMismatch(f"cannot tensor {type(a).__name__} with {type(b).__name__}")
    (da, db), (ea, eb) = a.dims, b.dims
    dims = (da * ea, db * eb)
    if isinstance(a, PureState):
        amps = np.einsum("ij,kl->ikjl", a.coefficient_matrix(), b.coefficient_matrix())
        return PureState.normalized(amps.reshape(-1), dims)
    r4 = a.matrix.reshape(da, db, da, db)
    s4 = b.matrix.reshape(ea, eb, ea, eb)
    m = np.einsum("abcd,efgh->aebfcgdh", r4, s4).reshape(dims[0] * dims[1], -1)
    return DensityMatrix(_hermitize(m), dims)


def partial_trace(rho: State, subsystem: str) -> DensityMatrix:
    """Trace out ``subsystem`` (``"A"`` or ``"B"``).

    Tracing A leaves a state with dims ``(1, d_B)``; tracing B leaves ``(d_A, 1)``.
    """
    if isinstance(rho, PureState):
        c = rho.coefficient_matrix()
        da, db = rho.dims
        if subsystem == "A":
            return DensityMatrix(_hermitize(c.T @ c.conj()), (1, db))
        if subsystem == "B":
            return DensityMatrix(_hermitize(c @ c.conj().T), (da, 1))
        raise ValueError("subsystem must be 'A' or 'B'")
    da, db = rho.dims
    r4 = rho.matrix.reshape(da, db, da, db)
    if subsystem == "A":
        return DensityMatrix(_hermitize(np.einsum("imin->mn", r4)), (1, db))
    if subsystem == "B":
        return DensityMatrix(_hermitize(np.einsum("mini->mn", r4)), (da, 1))
    raise ValueError("subsystem must be 'A' or 'B'")


def partial_transpose_matrix(m: np.ndarray, dims: Dims, subsystem: str) -> np.ndarray:
    """Partial transpose of an arbitrary operator on ``C^dA (x) C^dB``."""
    da, db = dims
    r4 = np.asarray(m).reshape(da, db, da, db)
    if subsystem == "A":
        out = r4.transpose(2, 1, 0, 3)
    elif subsystem == "B":
        out = r4.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 'A' or 'B'")
    return out.reshape(da * db, da * db)


def partial_transpose(rho: State, subsystem: str = "A") -> np.ndarray:
    rho = as_density(rho)
    return partial_transpose_matrix(rho.matrix, rho.dims, subsystem)


def trace_norm(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"trace norm needs a square matrix, got shape {m.shape}")
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def fidelity(phi: PureState, psi: PureState) -> float:
    """``|<phi|psi>|^2``."""
    if phi.dims != psi.dims:
        raise DimensionMismatch(f"dims differ: {phi.dims} vs {psi.dims}")
    return float(min(1.0, abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2))


def apply_kraus(operators: Sequence[np.ndarray], m: np.ndarray) -> np.ndarray:
    """Raw operator-sum action on any matrix (no invariant checks)."""
    return sum(e @ m @ e.conj().T for e in operators)


def apply_channel(ch: KrausChannel, rho: DensityMatrix):
    """Apply a Kraus channel.

    Trace-preserving channels return a :class:`DensityMatrix`.  A
    non-trace-preserving channel returns the sub-normalised output operator
    as a plain array; its trace is the success probability.
    """
    side = rho.dims[0] * rho.dims[1]
    if ch.in_side != side:
        raise DimensionMismatch(f"channel acts on side {ch.in_side}, state has side {side}")
    out = _hermitize(apply_kraus(ch.operators, rho.matrix))
    if not ch.trace_preserving:
        return out
    dims = ch.out_dims or rho.dims
    return DensityMatrix(out / np.trace(out).real, dims)


def branch_ensemble(ch: KrausChannel, rho: DensityMatrix) -> list[tuple[float, DensityMatrix | None]]:
    """Per-operator measurement branches ``(p_i, rho_i)`` with ``p_i = Tr(E_i rho E_i^dagger)``."""
    dims = ch.out_dims or rho.dims
    out = []
    for e in ch.operators:
        term = _hermitize(e @ rho.matrix @ e.conj().T)
        p = float(np.trace(term).real)
        out.append((p, DensityMatrix(term / p, dims) if p > 1e-15 else None))
    return out


def von_neumann_entropy(rho) -> float:
    """Base-2 von Neumann entropy, with ``0 log 0 = 0``."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    w = np.linalg.eigvalsh(_hermitize(m))
    w = w[w > 1e-15]
    return float(max(0.0, -np.sum(w * np.log2(w))))
