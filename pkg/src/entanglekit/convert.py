"""Pure-state LOCC convertibility: majorization, catalysis, stochastic and
asymptotic conversion, and finite-copy rate bounds.

All functions accept either :class:`~entanglekit.states.PureState` or
:class:`~entanglekit.schmidt.SchmidtVector` inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, RankMismatch, SeparableInput
from .schmidt import SchmidtVector, entropy_of, osc, power_osc, tensor_osc

MAJORIZATION_TOL = 1e-9
ENTROPY_TOL = 1e-12


# ---------------------------------------------------------------------------
# majorization
# ---------------------------------------------------------------------------


def _breakpoints(x: SchmidtVector, y: SchmidtVector) -> list:
    return sorted(set(x.boundaries[1:]) | set(y.boundaries[1:]))


def majorization_gap(x, y, tol: float = MAJORIZATION_TOL) -> tuple[float, int | None]:
    """Largest prefix-sum excess ``max_k (X_k - Y_k)`` and the first ``k`` where it exceeds ``tol``.

    Both prefix-sum sequences are linear between run boundaries, so the
    difference only needs checking at the union of boundaries; the first
    failing ``k`` inside a segment is then solved for directly.
    """
    x, y = osc(x), osc(y)
    worst = -math.inf
    first = None
    prev_k, prev_d = 0, 0.0
    for b in _breakpoints(x, y):
        d = x.prefix_sum(b) - y.prefix_sum(b)
        if d > worst:
            worst = d
        if first is None and d > tol:
            if b - prev_k == 1:
                first = int(b)
            else:
                slope = (d - prev_d) / float(b - prev_k)
                step = math.floor((tol - prev_d) / slope) + 1
                first = int(min(b, prev_k + max(1, step)))
        prev_k, prev_d = b, d
    return float(worst), first


def majorizes(x, y, tol: float = MAJORIZATION_TOL) -> tuple[bool, int | None]:
    """``x ≺ y``: every prefix sum of ``x`` is at most that of ``y``.

    Returns ``(holds, witness_k)`` where ``witness_k`` is the first failing
    prefix length (1-based) or ``None``.  The shorter vector is zero-padded.
    """
    _, first = majorization_gap(x, y, tol)
    return first is None, first


def prefix_comparison(x, y) -> list[tuple[float, float]]:
    """Explicit ``(X_k, Y_k)`` pairs for ``k = 1 .. max length``."""
    x, y = osc(x), osc(y)
    n = max(x.length, y.length)
    return [(x.prefix_sum(k), y.prefix_sum(k)) for k in range(1, n + 1)]


@dataclass(frozen=True)
class ConversionVerdict:
    forward: bool
    backward: bool
    witness_forward: int | None = None
    witness_backward: int | None = None
    gap_forward: float | None = None
    gap_backward: float | None = None

    @property
    def classification(self) -> str:
        if self.forward and self.backward:
            return "equivalent"
        if self.forward:
            return "forward"
        if self.backward:
            return "backward"
        return "incomparable"

    @property
    def comparable(self) -> bool:
        return self.forward or self.backward

    @property
    def witness_k(self) -> int | None:
        return self.witness_forward if not self.forward else self.witness_backward

    def to_dict(self) -> dict:
        return {
            "forward": self.forward,
            "backward": self.backward,
            "classification": self.classification,
            "witness_k": {"forward": self.witness_forward, "backward": self.witness_backward},
            "gap": {"forward": self.gap_forward, "backward": self.gap_backward},
        }


def nielsen_convertible(phi, psi, tol: float = MAJORIZATION_TOL) -> ConversionVerdict:
    """Deterministic LOCC convertibility in both directions (Nielsen's criterion)."""
    x, y = osc(phi), osc(psi)
    gf, wf = majorization_gap(x, y, tol)
    gb, wb = majorization_gap(y, x, tol)
    return ConversionVerdict(
        forward=wf is None,
        backward=wb is None,
        witness_forward=wf,
        witness_backward=wb,
        gap_forward=max(gf, 0.0),
        gap_backward=max(gb, 0.0),
    )


def max_entangled_reachable_dim(phi, tol: float = MAJORIZATION_TOL) -> int:
    """Largest ``d`` with ``phi -> Psi_d^+``: ``floor(1 / alpha_1)``."""
    return int(math.floor((1.0 + tol) / osc(phi).largest))


# ---------------------------------------------------------------------------
# common source / sink
# ---------------------------------------------------------------------------


def _prefix_table(x: SchmidtVector, n: int) -> np.ndarray:
    return np.concatenate([[0.0], [x.prefix_sum(k) for k in range(1, n + 1)]])


def _upper_concave_envelope(values: np.ndarray) -> np.ndarray:
    """Least concave majorant of points ``(k, values[k])``, evaluated at integers."""
    n = values.size
    hull = [0]
    for k in range(1, n):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # drop j if it lies on or under the chord i -> k
            if (values[j] - values[i]) * (k - i) <= (values[k] - values[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    return np.interp(np.arange(n), hull, values[hull])


def common_source_sink(phi1, phi2, tol: float = MAJORIZATION_TOL) -> tuple[SchmidtVector, SchmidtVector]:
    """States ``psi`` and ``psi'`` with ``psi -> phi_i`` and ``phi_i -> psi'`` for both inputs.

    The source's prefix sums are the pointwise minimum of the inputs' prefix
    sums (a minimum of concave sequences is concave, so its increments
    descend).  The sink uses the least concave majorant of the pointwise
    maximum, which reaches one by the smaller rank.
    """
    x, y = osc(phi1), osc(phi2)
    if x.rank < 2 or y.rank < 2:
        raise SeparableInput("common_source_sink needs two entangled inputs")
    n = max(x.length, y.length)
    px, py = _prefix_table(x, n), _prefix_table(y, n)

    lo = np.minimum(px, py)
    source = SchmidtVector(np.clip(np.diff(lo), 0.0, 1.0) / lo[-1])

    hi = _upper_concave_envelope(np.maximum(px, py))
    inc = np.clip(np.diff(hi), 0.0, 1.0)
    inc = inc[: min(x.rank, y.rank)]
    sink = SchmidtVector(inc / inc.sum())

    for s in (x, y):
        if not majorizes(source, s, tol)[0] or not majorizes(s, sink, tol)[0]:
            raise ArithmeticError("common source/sink construction failed verification")
    return source, sink


# ---------------------------------------------------------------------------
# catalysis
# ---------------------------------------------------------------------------


def catalytic_convertible(phi, psi, eta, tol: float = MAJORIZATION_TOL) -> bool:
    """Whether ``phi ⊗ eta -> psi ⊗ eta`` deterministically."""
    x, y, z = osc(phi), osc(psi), osc(eta)
    return majorizes(tensor_osc(x, z), tensor_osc(y, z), tol)[0]


def catalysis_impossible(phi, psi) -> bool:
    """Conservative screen: ``True`` means no catalyst exists in either direction.

    For equal Schmidt rank ``d``, if ``alpha_1 < beta_1`` and ``alpha_d < beta_d``
    then tensoring with any catalyst keeps the largest and smallest products
    in the same order, so the ``k = 1`` test fails one way and ``k = d - 1``
    the other.  ``False`` means "unknown".
    """
    x, y = osc(phi), osc(psi)
    if x.rank != y.rank:
        raise RankMismatch(f"Schmidt ranks differ: {x.rank} vs {y.rank}")
    a1, ad = x.largest, x.smallest_nonzero
    b1, bd = y.largest, y.smallest_nonzero
    return (a1 < b1 and ad < bd) or (b1 < a1 and bd < ad)


def find_catalyst(
    phi,
    psi,
    max_rank: int = 3,
    grid: int = 2000,
    simplex_grid: int = 60,
    tol: float = MAJORIZATION_TOL,
) -> SchmidtVector | None:
    """Grid search for a catalyst ``eta`` with ``phi ⊗ eta -> psi ⊗ eta``.

    Scans rank-2 catalysts ``(c, 1 - c)`` for ``c`` in the open interval
    ``(1/2, 1)``, then (if ``max_rank >= 3``) a triangular grid over the
    ordered rank-3 simplex.  The first hit in grid order is returned.  The
    search is incomplete: ``None`` does not prove that no catalyst exists.
    """
    x, y = osc(phi), osc(psi)
    if majorizes(x, y, tol)[0]:
        return SchmidtVector([1.0])
    if x.rank == y.rank and catalysis_impossible(x, y):
        return None
    for i in range(1, grid + 1):
        c = 0.5 + 0.5 * i / (grid + 1)
        eta = SchmidtVector([c, 1.0 - c])
        if catalytic_convertible(x, y, eta, tol):
            return eta
    if max_rank >= 3:
        g = simplex_grid + 1
        for i in range(1, g):
            for j in range(1, g - i):
                a, b = i / g, j / g
                c = 1.0 - a - b
                if not (a >= b >= c > 0):
                    continue
                eta = SchmidtVector([a, b, c])
                if catalytic_convertible(x, y, eta, tol):
                    return eta
    return None


# ---------------------------------------------------------------------------
# stochastic and asymptotic conversion
# ---------------------------------------------------------------------------


def stochastic_probability(phi, psi) -> float:
    """Optimal success probability of ``phi -> psi`` under stochastic LOCC.

    ``min_l E_l(phi) / E_l(psi)`` over tail sums ``E_l = sum_{i >= l} lambda_i``,
    restricted to ``l <= rank(psi)``; zero when ``rank(phi) < rank(psi)``.
    Tail sums are piecewise linear in ``l``, so their ratio is monotone
    between run boundaries and only boundaries need checking.
    """
    x, y = osc(phi), osc(psi)
    ry = y.rank
    if x.rank < ry:
        return 0.0
    candidates = {b + 1 for b in x.boundaries[:-1]} | {b + 1 for b in y.boundaries[:-1]} | {ry}
    best = 1.0
    for l in candidates:
        if l > ry:
            continue
        ty = y.tail_sum(l)
        if ty <= 0:
            continue
        best = min(best, x.tail_sum(l) / ty)
    return float(min(1.0, max(0.0, best)))


def second_law_verdict(phi, psi, tol: float = ENTROPY_TOL) -> bool:
    """Asymptotic accessibility of ``psi`` from ``phi``: ``E_S(phi) >= E_S(psi)``."""
    return entropy_of(osc(phi)) >= entropy_of(osc(psi)) - tol


@dataclass
class ProbeReport:
    points: list[tuple[int, float]]
    entropy_phi: float
    entropy_psi: float
    verdict: bool
    rank_verdict: bool
    trend: str
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "points": [{"n": n, "P_n": p} for n, p in self.points],
            "entropy": {"phi": self.entropy_phi, "psi": self.entropy_psi},
            "verdict": "asymptotically accessible" if self.verdict else "not accessible",
            "accessible": self.verdict,
            "rank_verdict": self.rank_verdict,
            "trend": self.trend,
            "notes": self.notes,
        }


def _trend(values: list[float], tol: float = 1e-12) -> str:
    if len(values) < 2 or all(abs(v - values[0]) <= tol for v in values):
        return "constant"
    diffs = np.diff(values)
    if np.all(diffs >= -tol):
        return "non-decreasing"
    if np.all(diffs <= tol):
        return "non-increasing"
    return "mixed"


def asymptotic_probe(phi, psi, n_schedule) -> ProbeReport:
    """Finite-``n`` evidence for asymptotic accessibility.

    ``P_n`` is the stochastic conversion probability between ``n``-copy
    states.  The verdict is the entropy criterion; the empirical trend and
    the rank-based ordering are reported alongside but never override it.
    """
    schedule = [int(n) for n in n_schedule]
    if not schedule:
        raise ValueError("n_schedule must be nonempty")
    x, y = osc(phi), osc(psi)
    points = [(n, stochastic_probability(power_osc(x, n), power_osc(y, n))) for n in schedule]
    ex, ey = entropy_of(x), entropy_of(y)
    verdict = ex >= ey - ENTROPY_TOL
    rank_verdict = x.rank >= y.rank
    notes = []
    if verdict != rank_verdict:
        notes.append(
            "Schmidt-rank ordering disagrees with the entropy ordering; the entropy verdict is reported"
        )
    return ProbeReport(points, ex, ey, verdict, rank_verdict, _trend([p for _, p in points]), notes)


# ---------------------------------------------------------------------------
# rate bounds and irreversibility
# ---------------------------------------------------------------------------

_FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class RateBounds:
    lower: float
    upper: float
    n: int
    m_lower: int
    m_upper: int

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "n": self.n,
                "m_lower": self.m_lower, "m_upper": self.m_upper}


def deterministic_rate_bounds(phi, n: int) -> RateBounds:
    """Best deterministic singlet rates at ``n`` copies.

    ``lower``: the most singlets ``m`` with ``phi^n -> Psi_2^{+ m}``, i.e.
    ``2**m <= alpha_1**-n``.  ``upper``: the fewest with ``Psi_2^{+ m} -> phi^n``,
    i.e. ``2**m >= rank**n``.  Both are reported as ``m / n``.
    """
    x = osc(phi)
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if x.rank < 2:
        raise SeparableInput("rate bounds are undefined for a product state")
    m_lo = math.floor(-n * math.log2(x.largest) + _FLOOR_SLACK)
    m_hi = math.ceil(n * math.log2(x.rank) - _FLOOR_SLACK)
    return RateBounds(m_lo / n, m_hi / n, n, m_lo, m_hi)


def equivalent_powers(x, y, n: int, m: int, tol: float = 1e-12) -> bool:
    """Whether ``x^{⊗n}`` and ``y^{⊗m}`` have identical OSCs.

    Cheap necessary screen first (equal rank, equal largest and smallest
    coefficients in log space), then a full run-by-run comparison.  When a
    power is too large to enumerate only the screen is applied.
    """
    x, y = osc(x), osc(y)
    if x.rank**n != y.rank**m:
        return False
    l1x, l1y = x.log2_values[0], y.log2_values[0]
    ldx, ldy = math.log2(x.smallest_nonzero), math.log2(y.smallest_nonzero)
    if abs(n * l1x - m * l1y) > tol or abs(n * ldx - m * ldy) > tol:
        return False
    px, py = _power_runs(x, n), _power_runs(y, m)
    if px is None or py is None:
        return True
    (lx, cx), (ly, cy) = px, py
    return len(lx) == len(ly) and all(int(a) == int(b) for a, b in zip(cx, cy)) and bool(
        np.all(np.abs(lx - ly) <= max(tol, 1e-9))
    )


def _power_runs(x: SchmidtVector, n: int):
    try:
        p = power_osc(x, n)
    except CapExceeded:
        return None
    keep = np.isfinite(p.log2_values)
    return p.log2_values[keep], [c for c, k in zip(p.counts, keep) if k]
