import numpy as np
import pytest

from entanglekit.errors import ChannelError
from entanglekit.ppt import is_ppt, is_ppt_preserving_on, ppt_report, pt_spectrum
from entanglekit.states import (
    DensityMatrix,
    KrausChannel,
    maximally_mixed,
    product_state,
    random_density,
    random_pure,
    random_separable,
    random_unitary,
    singlet,
    werner_antisym,
)
from entanglekit.schmidt import osc

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def test_singlet():
    rep = ppt_report(singlet().projector())
    assert rep.min_pt_eigenvalue == pytest.approx(-0.5, abs=1e-12)
    assert rep.separability == "entangled"
    assert rep.distillability == "npt_candidate"
    assert not rep.is_ppt


def test_maximally_mixed():
    rep = ppt_report(maximally_mixed((2, 2)))
    assert rep.is_ppt and rep.separability == "separable"
    assert rep.distillability == "not_distillable"
    assert not rep.boundary


@pytest.mark.parametrize("d", range(2, 7))
def test_antisymmetric_werner(d):
    rep = ppt_report(werner_antisym(d))
    assert rep.min_pt_eigenvalue == pytest.approx(-1 / d, abs=1e-12)
    assert rep.separability == "entangled"


def test_brute_partial_transpose_oracle(rng):
    # explicit index loop, kept independent of the library implementation
    rho = random_density((2, 3), rng)
    m = rho.matrix
    pt = np.zeros_like(m)
    for i in range(2):
        for j in range(3):
            for k in range(2):
                for l in range(3):
                    pt[k * 3 + j, i * 3 + l] = m[i * 3 + j, k * 3 + l]
    np.testing.assert_allclose(pt_spectrum(rho, "A"), np.linalg.eigvalsh(pt), atol=1e-12)


def test_sides_agree(rng):
    for _ in range(50):
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        rho = random_density(dims, rng)
        np.testing.assert_allclose(pt_spectrum(rho, "A"), pt_spectrum(rho, "B"), atol=1e-9)


def test_separable_mixtures_are_ppt(rng):
    for _ in range(1000):
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        assert is_ppt(random_separable(dims, rng, terms=int(rng.integers(1, 6))))


def test_entangled_pure_states_are_npt(rng):
    n = 0
    for _ in range(1000):
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        phi = random_pure(dims, rng)
        if osc(phi).rank >= 2:
            n += 1
            assert not is_ppt(phi)
    assert n > 990


def test_undetermined_beyond_small_dims():
    assert ppt_report(maximally_mixed((3, 3))).separability == "undetermined"
    assert ppt_report(maximally_mixed((2, 3))).separability == "separable"
    assert ppt_report(maximally_mixed((1, 4))).separability == "separable"


def test_boundary_flag():
    p = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    p[0, 3] = p[3, 0] = 1e-10
    rep = ppt_report(DensityMatrix(p, (2, 2)))
    assert rep.is_ppt and rep.boundary
    assert rep.to_dict()["boundary"] is True


class TestPreserving:
    def test_identity(self, rng):
        ch = KrausChannel.unitary(np.eye(4))
        assert is_ppt_preserving_on(ch, [random_density((2, 2), rng) for _ in range(10)])

    def test_local_unitary(self, rng):
        ch = KrausChannel.unitary(np.kron(random_unitary(2, rng), random_unitary(2, rng)))
        assert is_ppt_preserving_on(ch, [random_density((2, 2), rng) for _ in range(100)])

    def test_entangling_gate(self):
        plus_zero = product_state([1, 1], [1, 0])
        assert is_ppt(plus_zero)
        assert not is_ppt_preserving_on(KrausChannel.unitary(CNOT), [plus_zero])

    def test_local_dephasing_channel(self, rng):
        z = np.diag([1, -1]).astype(complex)
        ops = (np.sqrt(0.7) * np.eye(4), np.sqrt(0.3) * np.kron(z, np.eye(2)))
        assert is_ppt_preserving_on(KrausChannel(ops), [random_density((2, 2), rng) for _ in range(50)])

    def test_rejects_trace_decreasing(self):
        ch = KrausChannel((0.5 * np.eye(4),), trace_preserving=False)
        with pytest.raises(ChannelError):
            is_ppt_preserving_on(ch, [maximally_mixed((2, 2))])

    def test_rejects_wrong_size(self):
        with pytest.raises(ChannelError):
            is_ppt_preserving_on(KrausChannel.unitary(np.eye(4)), [maximally_mixed((3, 3))])
