"""Schmidt decomposition and ordered-Schmidt-coefficient algebra.

A :class:`SchmidtVector` is stored run-length encoded in the log domain: a
descending array of distinct ``log2`` values with integer multiplicities.
Explicitly constructed vectors are just runs of length one; powers of rank-2
vectors collapse to ``n + 1`` runs with binomial multiplicities, which keeps
``n``-copy vectors usable long after ``2**n`` explicit entries would be.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvariantViolation
from .states import PureState

RANK_EPSILON = 1e-12
SUM_TOL = 1e-9
ENUMERATION_CAP = 2**22
# runs whose log2 values differ by less than this are merged
_MERGE_LOG2_TOL = 1e-12


def _as_count_array(counts) -> np.ndarray:
    counts = list(counts)
    if sum(counts) < 2**62:
        return np.array(counts, dtype=np.int64)
    arr = np.empty(len(counts), dtype=object)
    arr[:] = [int(c) for c in counts]
    return arr


def _log2_int(n) -> float:
    return math.log2(int(n)) if n > 0 else -math.inf


class SchmidtVector:
    """Ordered Schmidt coefficients: descending, nonnegative, summing to one.

    Build it from explicit coefficients (they are sorted for you); entries at
    or below ``RANK_EPSILON`` are stored as exact zeros and do not count
    towards the rank.
    """

    def __init__(self, coeffs: Iterable[float]):
        c = np.asarray(list(coeffs), dtype=float).reshape(-1)
        if c.size == 0:
            raise InvariantViolation("at least one coefficient")
        if np.any(~np.isfinite(c)):
            raise InvariantViolation("coefficients finite")
        if np.any(c < -RANK_EPSILON) or np.any(c > 1 + RANK_EPSILON):
            raise InvariantViolation("each coefficient in [0, 1]", f"got {c.tolist()}")
        total = math.fsum(c)
        if abs(total - 1.0) > SUM_TOL:
            raise InvariantViolation("coefficients sum to 1", f"sum = {total:.12g}")
        c = np.sort(np.where(c > RANK_EPSILON, c, 0.0))[::-1]
        with np.errstate(divide="ignore"):
            log2 = np.log2(c)
        self._init_runs(log2, np.ones(c.size, dtype=np.int64))

    @classmethod
    def _from_runs(cls, log2: Sequence[float], counts, merge: bool = True) -> "SchmidtVector":
        obj = cls.__new__(cls)
        log2 = np.asarray(log2, dtype=float)
        counts = _as_count_array(counts)
        order = np.argsort(-log2, kind="stable")
        log2, counts = log2[order], counts[order]
        if merge and log2.size > 1:
            log2, counts = _merge_runs(log2, counts)
        obj._init_runs(log2, counts)
        return obj

    def _init_runs(self, log2: np.ndarray, counts: np.ndarray):
        log2 = np.array(log2, dtype=float)
        log2.setflags(write=False)
        counts = counts.copy()
        counts.setflags(write=False)
        self._log2 = log2
        self._counts = counts

    @classmethod
    def uniform(cls, d: int) -> "SchmidtVector":
        """Coefficients of the ``d``-dimensional maximally entangled state."""
        d = int(d)
        if d < 1:
            raise InvariantViolation("rank is a positive integer")
        return cls._from_runs([-_log2_int(d)], [d])

    # -- representation -------------------------------------------------

    @property
    def log2_values(self) -> np.ndarray:
        return self._log2

    @property
    def counts(self) -> np.ndarray:
        return self._counts

    @cached_property
    def length(self) -> int:
        return int(sum(int(c) for c in self._counts))

    @cached_property
    def rank(self) -> int:
        finite = np.isfinite(self._log2)
        return int(sum(int(c) for c, f in zip(self._counts, finite) if f))

    @cached_property
    def run_masses(self) -> np.ndarray:
        """Total probability carried by each run."""
        out = np.zeros(self._log2.size)
        for j, (l, c) in enumerate(zip(self._log2, self._counts)):
            if np.isfinite(l):
                out[j] = 2.0 ** (l + _log2_int(c))
        return out

    @cached_property
    def total(self) -> float:
        return math.fsum(self.run_masses)

    @cached_property
    def boundaries(self) -> np.ndarray:
        """Cumulative entry counts at each run end (object array of ints)."""
        out = np.empty(self._counts.size + 1, dtype=object)
        out[0] = 0
        acc = 0
        for j, c in enumerate(self._counts):
            acc += int(c)
            out[j + 1] = acc
        return out

    @cached_property
    def _prefix_masses(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.run_masses)])

    @cached_property
    def _suffix_masses(self) -> np.ndarray:
        # _suffix_masses[j] = mass of runs j, j+1, ...
        return np.concatenate([np.cumsum(self.run_masses[::-1])[::-1], [0.0]])

    @property
    def coeffs(self) -> np.ndarray:
        """Explicit descending coefficients (refuses above ``ENUMERATION_CAP``)."""
        if self.length > ENUMERATION_CAP:
            raise CapExceeded(
                f"{self.length} coefficients exceed the enumeration cap {ENUMERATION_CAP}"
            )
        vals = np.exp2(self._log2)
        return np.repeat(vals, np.asarray(self._counts, dtype=np.int64))

    @property
    def largest(self) -> float:
        return float(2.0 ** self._log2[0])

    @property
    def smallest_nonzero(self) -> float:
        finite = self._log2[np.isfinite(self._log2)]
        return float(2.0 ** finite[-1])

    def is_uniform(self, tol: float = 1e-12) -> bool:
        finite = self._log2[np.isfinite(self._log2)]
        return bool(finite[0] - finite[-1] <= tol)

    # -- piecewise-linear prefix/suffix sums -----------------------------

    def _locate(self, k) -> int:
        """Index of the run containing (0-based) entry ``k``."""
        b = self.boundaries
        lo, hi = 0, len(b) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if b[mid] <= k:
                lo = mid
            else:
                hi = mid
        return lo

    def _partial(self, run: int, t) -> float:
        if t == 0 or not np.isfinite(self._log2[run]):
            return 0.0
        return 2.0 ** (self._log2[run] + _log2_int(t))

    def prefix_sum(self, k) -> float:
        """Sum of the ``k`` largest coefficients (zero-padded past the end)."""
        if k <= 0:
            return 0.0
        if k >= self.length:
            return self.total
        j = self._locate(k)
        return float(self._prefix_masses[j] + self._partial(j, k - self.boundaries[j]))

    def tail_sum(self, l) -> float:
        """Sum of coefficients ``l, l+1, ...`` (1-based), computed without cancellation."""
        k = l - 1
        if k <= 0:
            return self.total
        if k >= self.length:
            return 0.0
        j = self._locate(k)
        return float(self._suffix_masses[j + 1] + self._partial(j, self.boundaries[j + 1] - k))

    def prefix_sums(self, length: int | None = None) -> np.ndarray:
        """Explicit prefix-sum sequence ``k = 1..length``."""
        n = self.length if length is None else int(length)
        return np.array([self.prefix_sum(k) for k in range(1, n + 1)])

    # -- misc -------------------------------------------------------------

    def to_dict(self) -> dict:
        return {"coeffs": self.coeffs.tolist()}

    def __repr__(self) -> str:
        if self.length <= 12:
            return f"SchmidtVector({np.round(self.coeffs, 12).tolist()})"
        return f"SchmidtVector(<{self._log2.size} runs, length {self.length}>)"

    def __len__(self) -> int:
        return self.length


def _merge_runs(log2: np.ndarray, counts: np.ndarray):
    out_l, out_c = [log2[0]], [counts[0]]
    for l, c in zip(log2[1:], counts[1:]):
        prev = out_l[-1]
        same = (l == prev) or (np.isfinite(l) and np.isfinite(prev) and prev - l <= _MERGE_LOG2_TOL)
        if same:
            out_c[-1] = out_c[-1] + c
        else:
            out_l.append(l)
            out_c.append(c)
    return np.array(out_l), _as_count_array(out_c)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    schmidt: SchmidtVector
    basis_A: np.ndarray
    basis_B: np.ndarray
    singular_values: np.ndarray
    dims: tuple[int, int]

    def reconstruct(self) -> PureState:
        amps = sum(
            s * np.kron(self.basis_A[:, k], self.basis_B[:, k])
            for k, s in enumerate(self.singular_values)
        )
        return PureState.normalized(amps, self.dims)


def schmidt_decompose(phi: PureState) -> SchmidtDecomposition:
    """Schmidt decomposition via the SVD of the coefficient matrix.

    With ``C = U diag(s) V^dagger`` the state is ``sum_k s_k |u_k> |v_k^*>``;
    ``basis_B`` holds the columns ``v_k^*`` (rows of ``V^dagger``).
    """
    c = phi.coefficient_matrix()
    u, s, vh = np.linalg.svd(c, full_matrices=False)
    lam = s**2
    lam = lam / math.fsum(lam)
    return SchmidtDecomposition(
        schmidt=SchmidtVector(lam),
        basis_A=u,
        basis_B=vh.T.copy(),
        singular_values=s,
        dims=phi.dims,
    )


def schmidt_coefficients_of_matrix(c: np.ndarray) -> np.ndarray:
    """Squared singular values of a coefficient matrix, descending."""
    s = np.linalg.svd(np.asarray(c), compute_uv=False)
    return s**2


def osc(phi) -> SchmidtVector:
    """Ordered Schmidt coefficients of a pure state (identity on SchmidtVectors)."""
    if isinstance(phi, SchmidtVector):
        return phi
    return schmidt_decompose(phi).schmidt


def tensor_osc(x: SchmidtVector, y: SchmidtVector) -> SchmidtVector:
    """OSC of a tensor product: all pairwise products, sorted."""
    log2 = (x.log2_values[:, None] + y.log2_values[None, :]).reshape(-1)
    if x.counts.dtype == object or y.counts.dtype == object:
        counts = [int(a) * int(b) for a in x.counts for b in y.counts]
    else:
        counts = np.outer(x.counts, y.counts).reshape(-1)
        if x.length * y.length >= 2**62:
            counts = [int(a) * int(b) for a in x.counts for b in y.counts]
    return SchmidtVector._from_runs(log2, counts)


def power_osc(x: SchmidtVector, n: int, cap: int = ENUMERATION_CAP) -> SchmidtVector:
    """OSC of ``n`` copies.

    Rank-2 inputs use the closed form: value ``a1**k a2**(n-k)`` with
    multiplicity ``C(n, k)``, built in the log domain with exact integer
    binomials, so no cap applies.  Higher ranks are enumerated by repeated
    tensoring and must satisfy ``rank**n <= cap``.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    finite = x.log2_values[np.isfinite(x.log2_values)]
    counts = [int(c) for c, l in zip(x.counts, x.log2_values) if np.isfinite(l)]
    r = x.rank
    if r == 1:
        return SchmidtVector([1.0])
    if len(finite) == 1:
        return SchmidtVector.uniform(r**n)
    if r == 2:
        l1, l2 = finite
        log2, mult = [], []
        c = 1
        for j in range(n + 1):  # j copies of the smaller coefficient
            log2.append((n - j) * l1 + j * l2)
            mult.append(c)
            c = c * (n - j) // (j + 1)
        return SchmidtVector._from_runs(log2, mult)
    if r**n > cap:
        raise CapExceeded(
            f"rank {r} to the power {n} exceeds the enumeration cap {cap}; "
            "use fewer copies or a rank-2 input (closed-form path)"
        )
    base = SchmidtVector._from_runs(finite, counts)
    out = base
    for _ in range(n - 1):
        out = tensor_osc(out, base)
    return out


def entropy_of(x: SchmidtVector) -> float:
    """Shannon entropy (base 2) of the coefficients."""
    terms = [-m * l for m, l in zip(x.run_masses, x.log2_values) if m > 0]
    return float(max(0.0, math.fsum(terms)))


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def parse_schmidt(data: dict) -> SchmidtVector:
    if "coeffs" not in data:
        raise InvariantViolation("Schmidt vector JSON has a 'coeffs' list")
    return SchmidtVector(data["coeffs"])
