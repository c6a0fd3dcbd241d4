"""End-to-end acceptance checks, one test per criterion.

The terminal summary prints a PASS/FAIL line for each criterion number.
"""

import json
import math
import time

import numpy as np
import pytest

from entanglekit import cli
from entanglekit.axioms import (
    StateSampler,
    irreversibility_search,
    monotone_suite,
    run_axiom,
    verify_counterexample,
)
from entanglekit.convert import (
    asymptotic_probe,
    catalytic_convertible,
    deterministic_rate_bounds,
    nielsen_convertible,
    prefix_comparison,
    stochastic_probability,
)
from entanglekit.measures import (
    eof_mixed,
    entropy_of_entanglement,
    pure_rates,
    relative_entropy_of_entanglement,
    sandwich_check,
)
from entanglekit.ppt import is_ppt, ppt_report
from entanglekit.protocols import distill_statistics, teleport, typical_set_report
from entanglekit.schmidt import SchmidtVector, binary_entropy, entropy_of, osc, tensor_osc
from entanglekit.stateio import dump_state
from entanglekit.states import (
    DensityMatrix,
    from_schmidt_coefficients,
    max_entangled,
    maximally_mixed,
    random_pure,
    random_separable,
    singlet,
    werner_antisym,
)

PSI1 = from_schmidt_coefficients([0.4, 0.4, 0.1, 0.1])
PSI2 = from_schmidt_coefficients([0.5, 0.25, 0.25])
ETA = SchmidtVector([0.6, 0.4])


@pytest.mark.criterion(1, "incomparable pair with witness k=2")
def test_incomparability(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    dump_state(PSI1, a)
    dump_state(PSI2, b)
    assert cli.main(["convert", "check", str(a), str(b)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["classification"] == "incomparable"
    assert rep["witness_k"]["forward"] == 2
    assert rep["prefix_sums"][1] == [0.8, 0.75]

    x, y = osc(PSI1), osc(PSI2)
    best = math.inf
    for _ in range(200):
        t0 = time.perf_counter()
        v = nielsen_convertible(x, y)
        best = min(best, time.perf_counter() - t0)
    assert v.classification == "incomparable" and v.witness_forward == 2
    assert best < 1e-3


@pytest.mark.criterion(2, "catalysis prefix sums")
def test_catalysis():
    assert catalytic_convertible(PSI1, PSI2, ETA)
    expected = [(0.24, 0.30), (0.48, 0.50), (0.64, 0.65), (0.80, 0.80),
                (0.86, 0.90), (0.92, 1.0), (0.96, 1.0), (1.0, 1.0)]
    got = prefix_comparison(tensor_osc(osc(PSI1), ETA), tensor_osc(osc(PSI2), ETA))
    assert len(got) == 8
    for (ga, gb), (ea, eb) in zip(got, expected):
        assert abs(ga - ea) <= 1e-9 and abs(gb - eb) <= 1e-9
        assert ga <= gb + 1e-9


@pytest.mark.criterion(3, "stochastic conversion probability")
def test_vidal_probability():
    assert abs(stochastic_probability(PSI1, PSI2) - 0.8) <= 1e-12
    assert stochastic_probability(PSI2, PSI1) == 0.0


@pytest.mark.criterion(4, "entropy of maximally entangled states")
def test_normalization():
    for d in range(2, 17):
        assert abs(entropy_of_entanglement(max_entangled(d)).value - math.log2(d)) <= 1e-12


@pytest.mark.criterion(5, "PPT spectra and verdicts")
def test_ppt():
    rng = np.random.default_rng(5)
    assert abs(ppt_report(singlet()).min_pt_eigenvalue + 0.5) <= 1e-10
    for d in range(2, 7):
        assert abs(ppt_report(werner_antisym(d)).min_pt_eigenvalue + 1 / d) <= 1e-9
    for _ in range(1000):
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        assert is_ppt(random_separable(dims, rng, terms=int(rng.integers(1, 6))))
    entangled = 0
    while entangled < 1000:
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        phi = random_pure(dims, rng)
        if osc(phi).rank < 2:
            continue
        entangled += 1
        assert not is_ppt(phi)


@pytest.mark.criterion(6, "distillation yield convergence")
def test_distillation():
    t0 = time.perf_counter()
    rep = distill_statistics(0.3, 2000)
    elapsed = time.perf_counter() - t0
    assert abs(rep.expected_yield_bits / 2000 - binary_entropy(0.3)) <= 0.02
    assert elapsed < 5


@pytest.mark.criterion(7, "typical-set bracket")
def test_typical_set():
    rep = typical_set_report(0.5, 100, 0.1)
    assert rep.mass >= 0.95
    assert rep.lower_bound_log2 <= rep.size_log2 <= rep.upper_bound_log2


@pytest.mark.criterion(8, "teleportation fidelity")
def test_teleportation():
    rng = np.random.default_rng(8)
    for _ in range(100):
        t = rng.uniform(0, 2 * math.pi)
        outcomes = teleport(math.cos(t), math.sin(t))
        assert len(outcomes) == 4
        for o in outcomes:
            assert abs(o.probability - 0.25) <= 1e-12
            assert abs(o.fidelity - 1) <= 1e-12


@pytest.mark.criterion(9, "irreversibility gap")
def test_irreversibility():
    phi = SchmidtVector([0.8, 0.2])
    rb = deterministic_rate_bounds(phi, 100)
    assert rb.lower == pytest.approx(0.32, abs=1e-12)
    assert rb.upper == pytest.approx(1.0, abs=1e-12)
    e = entropy_of(phi)
    assert e == pytest.approx(0.7219, abs=1e-4)
    assert rb.lower < e < rb.upper
    rep = irreversibility_search(StateSampler(seed=0), n_max=50, m_max=50, pairs=100)
    assert rep.pairs == 100
    assert rep.nontrivial_reversible == []


@pytest.mark.criterion(10, "axiom harness")
def test_axioms():
    sampler = StateSampler(seed=0)
    for axiom_id in ("A4.2", "A4.3"):
        rep = run_axiom(axiom_id, sampler, 10_000)
        assert rep.status == "held" and rep.trials == 10_000
    for axiom_id in ("A4.4", "A4.5a", "A4.7"):
        rep = run_axiom(axiom_id, sampler, 1000)
        assert rep.status == "violated"
        assert verify_counterexample(rep)
    cex = run_axiom("A4.4", sampler, 1000).counterexample
    assert cex["rho"] == [0.4, 0.4, 0.1, 0.1]
    assert cex["sigma"] == [0.5, 0.25, 0.25]
    assert cex["tau"] == [0.6, 0.4]


@pytest.mark.criterion(11, "entropy monotone suite")
def test_monotones():
    rep = monotone_suite(StateSampler(seed=0), 10_000, margin=1e-12)
    assert rep.pairs == 10_000
    assert rep.violations == 0


@pytest.mark.criterion(12, "numerical measures")
def test_measures():
    rng = np.random.default_rng(12)
    for _ in range(5):
        phi = random_pure((int(rng.integers(2, 5)), int(rng.integers(2, 5))), rng)
        r = eof_mixed(phi.projector())
        assert abs(r.value - entropy_of_entanglement(phi).value) <= 1e-6

    timings = []
    for rho, target, tol in [(singlet(), 1.0, 0.02), (maximally_mixed((2, 2)), 0.0, 1e-3),
                             (random_separable((2, 2), rng, terms=3), 0.0, 1e-3)]:
        t0 = time.perf_counter()
        r = relative_entropy_of_entanglement(rho)
        timings.append(time.perf_counter() - t0)
        assert abs(r.value - target) <= tol
    assert sandwich_check(relative_entropy_of_entanglement(singlet()).value, *pure_rates(singlet()), tol=0.02)

    t0 = time.perf_counter()
    mix = maximally_mixed((2, 2)).matrix * 0.3 + 0.7 * singlet().projector().matrix
    eof_mixed(DensityMatrix(mix, (2, 2)))
    timings.append(time.perf_counter() - t0)
    assert max(timings) < 60


@pytest.mark.criterion(13, "asymptotic second law probe")
def test_second_law_probe():
    up = asymptotic_probe(SchmidtVector([0.5, 0.5]), SchmidtVector([0.8, 0.2]), range(1, 11))
    assert up.verdict
    p_up = [p for _, p in up.points]
    assert all(b >= a - 1e-12 for a, b in zip(p_up, p_up[1:]))
    assert abs(p_up[-1] - 1) <= 1e-9

    down = asymptotic_probe(SchmidtVector([0.8, 0.2]), SchmidtVector([0.5, 0.5]), range(1, 11))
    assert not down.verdict
    p_down = [p for _, p in down.points]
    assert all(b < a for a, b in zip(p_down, p_down[1:]))
