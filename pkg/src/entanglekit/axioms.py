"""Property harness for the thermodynamic-style axioms of pure-state LOCC.

Each axiom is checked at the level of ordered Schmidt coefficients.  A
``violated`` report always carries a counterexample that
:func:`verify_counterexample` re-checks from scratch using only the
conversion primitives.

Trial ``i`` of a sampler with seed ``s`` draws from
``numpy.random.default_rng([s, i])``, so reports are reproducible and
trials can be replayed individually.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convert import (
    catalytic_convertible,
    common_source_sink,
    equivalent_powers,
    majorizes,
    nielsen_convertible,
)
from .errors import SeparableInput
from .schmidt import SchmidtVector, entropy_of, osc, power_osc, schmidt_decompose, tensor_osc
from .states import PureState, random_pure

AXIOM_IDS = ("A4.1", "A4.2", "A4.3", "A4.4", "A4.5a", "A4.5b", "A4.6", "A4.7", "A4.8")
DISTRIBUTIONS = ("dirichlet_flat", "haar_amplitudes")

# the standard incomparable pair and its catalyst
PSI_1 = SchmidtVector([0.4, 0.4, 0.1, 0.1])
PSI_2 = SchmidtVector([0.5, 0.25, 0.25])
ETA = SchmidtVector([0.6, 0.4])
CATALYSIS_POWERS = (1, 2, 3, 4)


@dataclass(frozen=True)
class StateSampler:
    seed: int = 0
    dim_range: tuple[int, int] = (2, 4)
    distribution: str = "dirichlet_flat"

    def __post_init__(self):
        lo, hi = self.dim_range
        if not 1 <= lo <= hi:
            raise ValueError(f"dim_range must satisfy 1 <= min <= max, got {self.dim_range}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}, got {self.distribution!r}")

    def rng(self, trial: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, trial])

    def dim(self, rng: np.random.Generator) -> int:
        lo, hi = self.dim_range
        return int(rng.integers(lo, hi + 1))

    def schmidt(self, rng: np.random.Generator, d: int | None = None) -> SchmidtVector:
        d = self.dim(rng) if d is None else d
        if self.distribution == "dirichlet_flat":
            return SchmidtVector(rng.dirichlet(np.ones(d)))
        return osc(random_pure((d, d), rng))

    def state(self, rng: np.random.Generator) -> PureState:
        """A full pure state on a ``da x db`` system."""
        da, db = self.dim(rng), self.dim(rng)
        if self.distribution == "haar_amplitudes":
            return random_pure((da, db), rng)
        coeffs = rng.dirichlet(np.ones(min(da, db)))
        amps = np.zeros(da * db)
        for i, c in enumerate(coeffs):
            amps[i * db + i] = math.sqrt(c)
        return PureState.normalized(amps, (da, db))

    @property
    def regime(self) -> str:
        return "2xd" if self.dim_range[1] <= 2 else "general"

    def to_dict(self) -> dict:
        return {"seed": self.seed, "dim_range": list(self.dim_range), "distribution": self.distribution}


@dataclass(frozen=True)
class AxiomReport:
    axiom_id: str
    trials: int
    status: str
    seed: int
    regime: str
    hypothesis_hits: int = 0
    violations: int = 0
    counterexample: dict | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "axiom_id": self.axiom_id,
            "trials": self.trials,
            "status": self.status,
            "seed": self.seed,
            "regime": self.regime,
            "hypothesis_hits": self.hypothesis_hits,
            "violations": self.violations,
            "counterexample": self.counterexample,
            "notes": list(self.notes),
        }


def _ser(x: SchmidtVector) -> list[float]:
    return [float(v) for v in x.coeffs]


def _conv(x, y) -> bool:
    return majorizes(x, y)[0]


def _regime(vectors) -> str:
    return "2xd" if all(v.rank <= 2 for v in vectors) else "general"


def random_majorized(y: SchmidtVector, rng: np.random.Generator, moves: int = 3) -> SchmidtVector:
    """A vector ``x`` with ``x -> y``, built by random T-transforms (Robin Hood moves) on ``y``."""
    v = np.array(y.coeffs, dtype=float)
    if v.size < 2:
        return y
    for _ in range(moves):
        i, j = rng.choice(v.size, size=2, replace=False)
        t = rng.uniform()
        vi, vj = v[i], v[j]
        v[i], v[j] = t * vi + (1 - t) * vj, t * vj + (1 - t) * vi
    return SchmidtVector(v / v.sum())


# ---------------------------------------------------------------------------
# individual axioms
# ---------------------------------------------------------------------------


def _a41(sampler, trials):
    viol, cex = 0, None
    for i in range(trials):
        rng = sampler.rng(i)
        x, y, z = (sampler.schmidt(rng) for _ in range(3))
        comm = np.allclose(tensor_osc(x, y).coeffs, tensor_osc(y, x).coeffs, atol=1e-12)
        assoc = np.allclose(
            tensor_osc(tensor_osc(x, y), z).coeffs, tensor_osc(x, tensor_osc(y, z)).coeffs, atol=1e-12
        )
        if not (comm and assoc):
            viol += 1
            cex = cex or {"rho": _ser(x), "sigma": _ser(y), "tau": _ser(z)}
    return trials, viol, cex, []


def _a42(sampler, trials):
    viol, cex = 0, None
    for i in range(trials):
        x = sampler.schmidt(sampler.rng(i))
        if not _conv(x, x):
            viol += 1
            cex = cex or {"rho": _ser(x)}
    return trials, viol, cex, []


def _a43(sampler, trials):
    hits, viol, cex = 0, 0, None
    for i in range(trials):
        rng = sampler.rng(i)
        if i % 2 == 0:
            # a guaranteed chain rho -> sigma -> tau
            tau = sampler.schmidt(rng)
            sigma = random_majorized(tau, rng)
            rho = random_majorized(sigma, rng)
        else:
            rho, sigma, tau = (sampler.schmidt(rng) for _ in range(3))
        if _conv(rho, sigma) and _conv(sigma, tau):
            hits += 1
            if not _conv(rho, tau):
                viol += 1
                cex = cex or {"rho": _ser(rho), "sigma": _ser(sigma), "tau": _ser(tau)}
    return hits, viol, cex, []


def _a44(sampler, trials, canonical):
    hits, viol, cex, notes = 0, 0, None, []
    if canonical:
        hits += 1
        if catalytic_convertible(PSI_1, PSI_2, ETA) and not _conv(PSI_1, PSI_2):
            viol += 1
            cex = {"rho": _ser(PSI_1), "sigma": _ser(PSI_2), "tau": _ser(ETA)}
            notes.append("catalysis: rho ⊗ tau -> sigma ⊗ tau although rho -/-> sigma")
    for i in range(trials):
        rng = sampler.rng(i)
        x, y, t = (sampler.schmidt(rng) for _ in range(3))
        fwd = _conv(x, y)
        cat = catalytic_convertible(x, y, t)
        hits += 1
        if fwd != cat:
            viol += 1
            cex = cex or {"rho": _ser(x), "sigma": _ser(y), "tau": _ser(t)}
    return hits, viol, cex, notes


def _a45(sampler, trials, canonical, sink: bool):
    hits, viol, cex, notes = 0, 0, None, []
    pairs = [(PSI_1, PSI_2)] if canonical else []
    for i in range(trials):
        rng = sampler.rng(i)
        pairs.append((sampler.schmidt(rng), sampler.schmidt(rng)))
    for x, y in pairs:
        if nielsen_convertible(x, y).comparable:
            hits += 1
            continue
        try:
            source, target = common_source_sink(x, y)
        except SeparableInput:
            continue
        hits += 1
        viol += 1
        if cex is None:
            common = target if sink else source
            cex = {"rho": _ser(common), "sigma": _ser(x), "tau": _ser(y)}
    if viol:
        notes.append("common " + ("sink" if sink else "source") + " of an incomparable pair")
    return hits, viol, cex, notes


def _a46(sampler, trials):
    """Maximally entangled qubit pairs as the internal state (constructive)."""
    hits, viol, cex = 0, 0, None
    for i in range(trials):
        rng = sampler.rng(i)
        phi, xi = sampler.schmidt(rng), sampler.schmidt(rng)
        n = 1
        m = max(1, math.ceil(math.log2(phi.rank * xi.rank) - 1e-12))
        target = tensor_osc(power_osc(phi, n), xi)
        hits += 1
        if not _conv(SchmidtVector.uniform(2 ** (n * m)), target):
            viol += 1
            cex = cex or {"rho": _ser(phi), "tau": _ser(xi), "n": n, "m": m}
    return hits, viol, cex, ["internal state e = maximally entangled qubit pair"]


def _a47(sampler, trials, canonical):
    hits, viol, cex, notes = 0, 0, None, []
    cases = [(PSI_1, PSI_2, ETA)] if canonical else []
    for i in range(trials):
        rng = sampler.rng(i)
        cases.append((sampler.schmidt(rng), sampler.schmidt(rng), sampler.schmidt(rng, 2)))
    for x, y, t in cases:
        powers = [n for n in CATALYSIS_POWERS if x.rank**n * t.rank <= 4096]
        if not all(
            _conv(tensor_osc(power_osc(x, n), t), tensor_osc(power_osc(y, n), t)) for n in powers
        ):
            continue
        hits += 1
        if not _conv(x, y):
            viol += 1
            if cex is None:
                cex = {"rho": _ser(x), "sigma": _ser(y), "tau": _ser(t), "n": powers}
    if viol:
        notes.append("checked n in " + ",".join(map(str, CATALYSIS_POWERS)))
    return hits, viol, cex, notes


def _a48(sampler, trials):
    hits, viol, cex = 0, 0, None
    product = SchmidtVector([1.0])
    for i in range(trials):
        rng = sampler.rng(i)
        x = sampler.schmidt(rng)
        hits += 1
        if not (_conv(x, product) and tensor_osc(product, product).rank == 1):
            viol += 1
            cex = cex or {"rho": _ser(x)}
    return hits, viol, cex, ["equilibrium states = product states"]


def run_axiom(axiom_id: str, sampler: StateSampler, trials: int, include_canonical: bool = True) -> AxiomReport:
    """Run one axiom check for ``trials`` sampled instances.

    ``include_canonical`` prepends the standard incomparable pair (and its
    catalyst) for the axioms that fail in general, so seed 0 reproduces the
    textbook counterexample.
    """
    if axiom_id not in AXIOM_IDS:
        raise ValueError(f"unknown axiom {axiom_id!r}; choose from {', '.join(AXIOM_IDS)}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if axiom_id == "A4.1":
        hits, viol, cex, notes = _a41(sampler, trials)
    elif axiom_id == "A4.2":
        hits, viol, cex, notes = _a42(sampler, trials)
    elif axiom_id == "A4.3":
        hits, viol, cex, notes = _a43(sampler, trials)
    elif axiom_id == "A4.4":
        hits, viol, cex, notes = _a44(sampler, trials, include_canonical)
    elif axiom_id in ("A4.5a", "A4.5b"):
        hits, viol, cex, notes = _a45(sampler, trials, include_canonical, axiom_id == "A4.5b")
    elif axiom_id == "A4.6":
        hits, viol, cex, notes = _a46(sampler, trials)
    elif axiom_id == "A4.7":
        hits, viol, cex, notes = _a47(sampler, trials, include_canonical)
    else:
        hits, viol, cex, notes = _a48(sampler, trials)
    status = "violated" if viol else ("held" if hits else "vacuous")
    regime = sampler.regime
    if cex is not None:
        vecs = [SchmidtVector(v) for k, v in cex.items() if k in ("rho", "sigma", "tau")]
        regime = _regime(vecs)
    return AxiomReport(axiom_id, trials, status, sampler.seed, regime, hits, viol, cex, notes)


def verify_counterexample(report: AxiomReport) -> bool:
    """Independently re-check a ``violated`` report's counterexample."""
    cex = report.counterexample
    if report.status != "violated" or cex is None:
        return False
    get = lambda key: SchmidtVector(cex[key])  # noqa: E731
    a = report.axiom_id
    if a == "A4.1":
        x, y, z = get("rho"), get("sigma"), get("tau")
        return not np.allclose(tensor_osc(x, y).coeffs, tensor_osc(y, x).coeffs, atol=1e-12)
    if a == "A4.2":
        return not _conv(get("rho"), get("rho"))
    if a == "A4.3":
        x, y, z = get("rho"), get("sigma"), get("tau")
        return _conv(x, y) and _conv(y, z) and not _conv(x, z)
    if a == "A4.4":
        x, y, t = get("rho"), get("sigma"), get("tau")
        return _conv(x, y) != catalytic_convertible(x, y, t)
    if a in ("A4.5a", "A4.5b"):
        common, x, y = get("rho"), get("sigma"), get("tau")
        linked = (_conv(common, x) and _conv(common, y)) if a == "A4.5a" else (_conv(x, common) and _conv(y, common))
        return linked and not nielsen_convertible(x, y).comparable
    if a == "A4.6":
        phi, xi = get("rho"), get("tau")
        return not _conv(SchmidtVector.uniform(2 ** (cex["n"] * cex["m"])), tensor_osc(power_osc(phi, cex["n"]), xi))
    if a == "A4.7":
        x, y, t = get("rho"), get("sigma"), get("tau")
        ok = all(_conv(tensor_osc(power_osc(x, n), t), tensor_osc(power_osc(y, n), t)) for n in cex["n"])
        return ok and not _conv(x, y)
    if a == "A4.8":
        return not _conv(get("rho"), SchmidtVector([1.0]))
    return False


# ---------------------------------------------------------------------------
# monotones, irreversibility and the thermodynamic map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneReport:
    pairs: int
    violations: int
    worst_increase: float
    seed: int

    def to_dict(self) -> dict:
        return {"pairs": self.pairs, "violations": self.violations, "worst_increase": self.worst_increase, "seed": self.seed}


def monotone_suite(sampler: StateSampler, pairs: int, margin: float = 1e-12) -> MonotoneReport:
    """Entropy of entanglement along sampled convertible pairs ``x -> y``."""
    viol, worst = 0, -math.inf
    for i in range(pairs):
        rng = sampler.rng(i)
        y = sampler.schmidt(rng)
        x = random_majorized(y, rng, moves=int(rng.integers(1, 6)))
        if not _conv(x, y):
            raise ArithmeticError("sampled pair is not convertible")
        inc = entropy_of(y) - entropy_of(x)
        worst = max(worst, inc)
        if inc > margin:
            viol += 1
    return MonotoneReport(pairs, viol, float(worst), sampler.seed)


@dataclass(frozen=True)
class IrreversibilityReport:
    pairs: int
    n_max: int
    m_max: int
    nontrivial_reversible: list
    trivial: list
    seed: int

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "n_max": self.n_max,
            "m_max": self.m_max,
            "nontrivial_reversible": self.nontrivial_reversible,
            "trivial": self.trivial,
            "seed": self.seed,
        }


def _trivial_kind(x: SchmidtVector, y: SchmidtVector) -> str | None:
    if x.length == y.length and np.allclose(x.coeffs, y.coeffs, atol=1e-12, rtol=0):
        return "identical"
    if x.is_uniform() and y.is_uniform():
        return "maximally_entangled"
    return None


def irreversibility_search(
    sampler: StateSampler,
    n_max: int = 50,
    m_max: int = 50,
    pairs: int = 100,
    explicit_pairs=None,
) -> IrreversibilityReport:
    """Search for ``(n, m)`` with ``phi^{⊗n}`` and ``psi^{⊗m}`` mutually convertible.

    Random pairs are two-qubit states (rank 2).  Identical states and pairs
    of maximally entangled states are reported separately as trivial.
    """
    if n_max < 1 or m_max < 1:
        raise ValueError("n_max and m_max must be at least 1")
    cases = []
    for i in range(pairs):
        rng = sampler.rng(i)
        cases.append((sampler.schmidt(rng, 2), sampler.schmidt(rng, 2)))
    cases += [(osc(a), osc(b)) for a, b in (explicit_pairs or [])]
    nontrivial, trivial = [], []
    for idx, (x, y) in enumerate(cases):
        kind = _trivial_kind(x, y)
        for n in range(1, n_max + 1):
            found = [m for m in range(1, m_max + 1) if equivalent_powers(x, y, n, m)]
            if found:
                entry = {"pair": idx, "n": n, "m": found[0], "phi": _ser(x), "psi": _ser(y)}
                if kind is None:
                    nontrivial.append(entry)
                else:
                    trivial.append({**entry, "kind": kind})
                break
    return IrreversibilityReport(len(cases), n_max, m_max, nontrivial, trivial, sampler.seed)


@dataclass(frozen=True)
class ThermoPoint:
    log2_dim: float
    entropy: float
    dims: tuple[int, int]

    @property
    def below_line(self) -> bool:
        """``E_S <= log2 min(dA, dB) <= log2 dim H``."""
        return -1e-12 <= self.entropy <= math.log2(min(self.dims)) + 1e-12 <= self.log2_dim + 1e-12


def thermo_point(state: PureState) -> ThermoPoint:
    da, db = state.dims
    return ThermoPoint(math.log2(da * db), entropy_of(schmidt_decompose(state).schmidt), (da, db))


def thermo_map(sampler: StateSampler, count: int) -> list[ThermoPoint]:
    if count < 1:
        raise ValueError("count must be at least 1")
    return [thermo_point(sampler.state(sampler.rng(i))) for i in range(count)]
