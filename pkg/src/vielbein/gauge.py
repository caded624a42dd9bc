"""Local frame rotations combined with coordinate-chart changes.

A gauge element pairs a pseudo-orthogonal matrix field (given directly or as
the exponential of a generator with eta-antisymmetric entries) with an
optional coordinate map.  Transforms act on evaluated points; the new chart
derivatives come from the chain rule through jets.

Frame values, their first derivatives, and the transformed connection with
its first derivatives are exact for arbitrary smooth maps.  The transformed
second-derivative block additionally assumes the coordinate-map entries are
polynomials of degree <= 2 (the map Hessian is then exactly the top order
carried by the jets); the bundled generators respect this.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .frame import (
    CoframePoint,
    SpinConnectionPoint,
    _coframe_point_from_jets,
    eval_entry,
)
from .jets import jet_seed
from .jetlinalg import JetArray, chart_transfer, jet_einsum, jet_matexp, jet_matinv, stack_jets
from .tensors import Signature, eta

__all__ = [
    "GaugeError",
    "GaugeElement",
    "GaugePointData",
    "evaluate_gauge",
    "gauge_transform_frame",
    "gauge_transform_omega",
    "gauge_transform_E",
]


class GaugeError(Exception):
    pass


@dataclass(frozen=True)
class GaugeElement:
    """Lambda(x) in SO(p, q) plus a coordinate map x -> xbar.

    Exactly one of ``lam`` (explicit entry grid) and ``generator``
    (entry grid A with eta*A antisymmetric, exponentiated at evaluation)
    must be given; ``coord_map=None`` means the identity chart.
    """

    signature: Signature
    lam: tuple | None = None
    generator: tuple | None = None
    coord_map: tuple | None = None
    params: Mapping[str, float] | None = None

    def __post_init__(self):
        if (self.lam is None) == (self.generator is None):
            raise ValueError("give exactly one of lam / generator")


@dataclass(frozen=True)
class GaugePointData:
    """All gauge ingredients evaluated at one base point."""

    xbar: tuple[float, ...]
    lam: JetArray          # (m, m) second order
    j: np.ndarray          # dxbar^a / dx^i
    dj: np.ndarray         # d_j of j
    k: np.ndarray          # inverse Jacobian dx^i / dxbar^a
    dk: np.ndarray
    ddk: np.ndarray
    det_j: float


def _entry_grid_jets(entries, jets, params, shape) -> JetArray:
    grid = [[eval_entry(entry, jets, params) for entry in row] for row in entries]
    return stack_jets(grid, shape, jets[0].dim)


def evaluate_gauge(ge: GaugeElement, point: Sequence[float]) -> GaugePointData:
    m = ge.signature.m
    params = dict(ge.params or {})
    jets = jet_seed(point)

    if ge.lam is not None:
        lam = _entry_grid_jets(ge.lam, jets, params, (m, m))
    else:
        gen = _entry_grid_jets(ge.generator, jets, params, (m, m))
        lam = jet_matexp(gen)

    et = eta(ge.signature)
    defect = np.abs(lam.val.T @ et @ lam.val - et).max()
    if defect > 1e-12:
        raise GaugeError(f"Lambda not pseudo-orthogonal at {tuple(point)}: defect {defect:.2e}")

    if ge.coord_map is None:
        xbar = tuple(float(c) for c in point)
        j = np.eye(m)
        dj = np.zeros((m, m, m))
    else:
        if len(ge.coord_map) != m:
            raise ValueError(f"coordinate map needs {m} entries")
        mapped = [eval_entry(entry, jets, params) for entry in ge.coord_map]
        xbar = tuple(jj.value for jj in mapped)
        j = np.stack([jj.grad for jj in mapped])
        dj = np.stack([jj.hess for jj in mapped])

    det_j = float(np.linalg.det(j))
    if abs(det_j) < 1e-12:
        raise GaugeError(f"singular coordinate map at {tuple(point)}")
    k = np.linalg.inv(j)
    dk = -np.einsum("ib,bch,ca->iah", k, dj, k)
    t = np.einsum("ib,bcg,cd,deh,ea->iahg", k, dj, k, dj, k, optimize=True)
    ddk = t + t.transpose(0, 1, 3, 2)
    return GaugePointData(xbar=xbar, lam=lam, j=j, dj=dj, k=k, dk=dk, ddk=ddk,
                          det_j=det_j)


def gauge_transform_frame(cp: CoframePoint, ge: GaugeElement) -> CoframePoint:
    """Push the evaluated frame through e -> Lambda e K, re-expressing all
    derivative blocks in the new chart."""
    gp = evaluate_gauge(ge, cp.x)
    e2 = JetArray(cp.e, cp.de, cp.dde)
    k2 = JetArray(gp.k, gp.dk, gp.ddk)
    p = jet_einsum("ms,si,ib->mb", gp.lam, e2, k2)
    pbar = chart_transfer(p, gp.k, gp.dk)
    return _coframe_point_from_jets(gp.xbar, pbar, cp.signature)


def gauge_transform_omega(sp: SpinConnectionPoint, cp: CoframePoint,
                          ge: GaugeElement) -> SpinConnectionPoint:
    """Connection gauge law: homogeneous rotation plus the -Lambda^{-1} dLambda
    inhomogeneity, with the derivative block chained into the new chart."""
    gp = evaluate_gauge(ge, cp.x)
    et = eta(sp.signature)
    lam1 = gp.lam.drop_hess()
    dlam1 = JetArray(gp.lam.jac, gp.lam.hess)
    linv1 = jet_matinv(lam1)
    k1 = JetArray(gp.k, gp.dk)
    w1 = JetArray(sp.omega, sp.domega)
    t1 = jet_einsum("ms,ng,ji,jsg->imn", lam1, lam1, k1, w1)
    t2 = jet_einsum("ab,mah,hi,bn->imn", linv1, dlam1, k1, et)
    wbar = t1 - t2
    wbar = chart_transfer(wbar, gp.k, None)
    wbar = (wbar - wbar.transpose((0, 2, 1))) * 0.5
    return SpinConnectionPoint(omega=wbar.val, domega=wbar.jac, signature=sp.signature)


def gauge_transform_E(cp: CoframePoint, ge: GaugeElement) -> np.ndarray:
    """Gauge law acting on the antisymmetrized-derivative block directly."""
    gp = evaluate_gauge(ge, cp.x)
    lam, dlam = gp.lam.val, gp.lam.jac
    hom = np.einsum("sih,ms,hk,ij->mjk", cp.E, lam, gp.k, gp.k, optimize=True)
    inh = 0.5 * np.einsum("si,msh,hk,ij->mjk", cp.e, dlam, gp.k, gp.k, optimize=True)
    return hom + inh - inh.transpose(0, 2, 1)
