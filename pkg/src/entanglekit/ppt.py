"""Partial-transpose diagnostics: separability, distillability, PPT-preserving maps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ChannelError
from .states import DensityMatrix, KrausChannel, State, apply_kraus, as_density, partial_transpose_matrix

PPT_TOL = 1e-9
# dimensions where PPT is necessary and sufficient for separability
_DECIDABLE = {(2, 2), (2, 3), (3, 2)}


@dataclass(frozen=True)
class PptReport:
    min_pt_eigenvalue: float
    is_ppt: bool
    separability: str
    distillability: str
    boundary: bool
    dims: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "is_ppt": self.is_ppt,
            "separability": self.separability,
            "distillability": self.distillability,
            "boundary": self.boundary,
            "dims": list(self.dims),
        }


def pt_spectrum(rho: State, subsystem: str = "A") -> np.ndarray:
    rho = as_density(rho)
    m = partial_transpose_matrix(rho.matrix, rho.dims, subsystem)
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def ppt_report(rho: State, tol: float = PPT_TOL) -> PptReport:
    rho = as_density(rho)
    lo = float(pt_spectrum(rho, "A")[0])
    is_ppt = lo >= -tol
    if min(rho.dims) == 1:
        # no bipartite structure: every state is a product
        separability = "separable"
    elif not is_ppt:
        separability = "entangled"
    elif rho.dims in _DECIDABLE:
        separability = "separable"
    else:
        separability = "undetermined"
    return PptReport(
        min_pt_eigenvalue=lo,
        is_ppt=is_ppt,
        separability=separability,
        distillability="not_distillable" if is_ppt else "npt_candidate",
        boundary=abs(lo) <= tol and lo < 0,
        dims=rho.dims,
    )


def is_ppt(rho: State, tol: float = PPT_TOL) -> bool:
    return ppt_report(rho, tol).is_ppt


def _ppt_preserved_on(channel: KrausChannel, sigma: DensityMatrix, tol: float) -> bool:
    out_dims = channel.out_dims or sigma.dims
    for side in ("A", "B"):
        twisted = partial_transpose_matrix(sigma.matrix, sigma.dims, side)
        image = apply_kraus(channel.operators, twisted)
        back = partial_transpose_matrix(image, out_dims, side)
        if np.linalg.eigvalsh((back + back.conj().T) / 2)[0] < -tol:
            return False
    return True


def is_ppt_preserving_on(channel: KrausChannel, samples: Iterable[State], tol: float = PPT_TOL) -> bool:
    """Sampled test of ``Λ(σ^{T_X})^{T_X} >= 0`` for X = A and B.

    A ``False`` answer is a certificate (some listed sample fails); ``True``
    only says that no listed sample witnessed a violation.
    """
    if not channel.trace_preserving:
        raise ChannelError("PPT-preserving test needs a trace-preserving channel")
    for s in samples:
        s = as_density(s)
        if channel.in_side != s.dims[0] * s.dims[1]:
            raise ChannelError(f"channel acts on side {channel.in_side}, sample has dims {s.dims}")
        if not _ppt_preserved_on(channel, s, tol):
            return False
    return True
