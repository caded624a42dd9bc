"""Frame geometry at a point: metric, spin connection, torsion, curvature.

Index conventions used throughout (0-based array axes, 1-based in prose):

* ``e[mu, i]``             frame components of the coframe, e^mu_i
* ``de[mu, i, j]``         d_j e^mu_i  (derivative axes last)
* ``dde[mu, i, j, k]``     d_k d_j e^mu_i
* ``einv[i, mu]``          inverse frame, e^i_mu
* ``E[mu, i, j]``          (d_j e^mu_i - d_i e^mu_j) / 2
* ``omega[i, mu, nu]``     spin connection with both frame indices up,
                           antisymmetric in (mu, nu)
* ``domega[i, mu, nu, j]`` d_j omega_i^{mu nu}
* ``R[j, i, lam, sig]``    curvature two-form components

Coordinate (Latin) indices are raised and lowered with the metric built from
the frame, frame (Greek) indices with the flat signature metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .expr import BinOp, Call, Coord, Neg, Num, Param, eval_jet
from .jets import Jet2, jet_const, jet_seed
from .jetlinalg import JetArray, jet_einsum, jet_matinv
from .tensors import Signature, eta, levi_civita

__all__ = [
    "DegenerateFrameError",
    "CoframeField",
    "CoframePoint",
    "SpinConnectionPoint",
    "CurvaturePoint",
    "OraclePoint",
    "evaluate_coframe",
    "metric",
    "metric_inverse",
    "sigma",
    "spin_connection",
    "torsion_residual",
    "curvature",
    "einstein_density",
    "coordinate_oracle",
    "spin_connection_via_christoffels",
    "curvature_to_coordinate",
    "kretschmann_scalar",
    "epsilon_pair_spec",
]

_EXPR_NODES = (Num, Coord, Param, Neg, BinOp, Call)

FieldEntry = Union[Num, Coord, Param, Neg, BinOp, Call, float, int, Callable]


class DegenerateFrameError(Exception):
    """Frame matrix numerically singular at the evaluated point."""


def eval_entry(entry: FieldEntry, jets: Sequence[Jet2], params: Mapping[str, float]):
    if isinstance(entry, _EXPR_NODES):
        out = eval_jet(entry, jets, params)
    elif isinstance(entry, (int, float)):
        return jet_const(float(entry), jets[0].dim)
    elif callable(entry):
        out = entry(jets, params)
    else:
        raise TypeError(f"unsupported field entry {entry!r}")
    if isinstance(out, Jet2):
        return out
    return jet_const(float(out), jets[0].dim)


class CoframeField:
    """An m x m grid of scalar entries defining a coframe e^mu = e^mu_i dx^i.

    Entries are expression ASTs, plain numbers, or callables
    ``(jets, params) -> Jet2``.  Fields are immutable and shareable;
    evaluation is a pure function of the point.
    """

    def __init__(self, entries, signature: Signature,
                 params: Mapping[str, float] | None = None):
        m = signature.m
        entries = tuple(tuple(row) for row in entries)
        if len(entries) != m or any(len(row) != m for row in entries):
            raise ValueError(f"expected a {m}x{m} entry grid")
        self.entries = entries
        self.signature = signature
        self.params = dict(params or {})

    @property
    def dim(self) -> int:
        return self.signature.m

    def eval_jets(self, jets: Sequence[Jet2]) -> JetArray:
        m = self.dim
        dim = jets[0].dim
        val = np.zeros((m, m))
        jac = np.zeros((m, m, dim))
        hess = np.zeros((m, m, dim, dim))
        for mu in range(m):
            for i in range(m):
                j = eval_entry(self.entries[mu][i], jets, self.params)
                val[mu, i] = j.value
                jac[mu, i] = j.grad
                hess[mu, i] = j.hess
        return JetArray(val, jac, hess)


@dataclass(frozen=True)
class CoframePoint:
    x: tuple[float, ...]
    e: np.ndarray
    de: np.ndarray
    dde: np.ndarray
    einv: np.ndarray
    E: np.ndarray
    signature: Signature

    @property
    def m(self) -> int:
        return self.signature.m

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.e))


@dataclass(frozen=True)
class SpinConnectionPoint:
    omega: np.ndarray    # [i, mu, nu], exactly antisymmetric in (mu, nu)
    domega: np.ndarray   # [i, mu, nu, j]
    signature: Signature


@dataclass(frozen=True)
class CurvaturePoint:
    R: np.ndarray        # [j, i, lam, sig]


@dataclass(frozen=True)
class OraclePoint:
    """Textbook coordinate-chart geometry computed directly from the metric."""

    gamma: np.ndarray          # [k, i, j] Levi-Civita connection
    riemann: np.ndarray        # [a, b, c, d] = R^a_{b c d}
    ricci: np.ndarray
    scalar: float
    einstein: np.ndarray       # mixed G^l_j
    g: np.ndarray
    ginv: np.ndarray


def _coframe_point_from_jets(point, ja: JetArray, signature: Signature) -> CoframePoint:
    e = ja.val
    det = float(np.linalg.det(e))
    scale = float(np.prod(np.linalg.norm(e, axis=1)))
    if abs(det) <= 1e-12 * max(scale, 1e-300):
        raise DegenerateFrameError(
            f"degenerate frame at {tuple(point)}: det={det:.3e}, scale={scale:.3e}"
        )
    einv = np.linalg.inv(e)
    E = 0.5 * (ja.jac - ja.jac.swapaxes(1, 2))
    return CoframePoint(
        x=tuple(float(c) for c in point),
        e=e, de=ja.jac, dde=ja.hess, einv=einv, E=E, signature=signature,
    )


def evaluate_coframe(field, point: Sequence[float]) -> CoframePoint:
    jets = jet_seed(point)
    ja = field.eval_jets(jets)
    return _coframe_point_from_jets(point, ja, field.signature)


def metric(cp: CoframePoint) -> np.ndarray:
    et = eta(cp.signature)
    return np.einsum("mn,mi,nj->ij", et, cp.e, cp.e)


def metric_inverse(cp: CoframePoint) -> np.ndarray:
    et = eta(cp.signature)
    return np.einsum("mn,im,jn->ij", et, cp.einv, cp.einv)


def sigma(cp: CoframePoint) -> np.ndarray:
    """Sigma^p_{ji} = e^p_lam E^lam_{ij} (note the flip of the lower pair)."""
    return np.einsum("pl,lij->pji", cp.einv, cp.E)


def _connection_jets(cp: CoframePoint) -> JetArray:
    et = eta(cp.signature)
    e1 = JetArray(cp.e, cp.de)
    de1 = JetArray(cp.de, cp.dde)
    einv1 = jet_matinv(e1)
    E1 = (de1 - de1.transpose((0, 2, 1))) * 0.5
    g1 = jet_einsum("mn,mi,nj->ij", et, e1, e1)
    ginv1 = jet_matinv(g1)
    sig1 = jet_einsum("pl,lij->pji", einv1, E1)
    # in-place raising/lowering of the displayed slots: Sigma_j^p_i, Sigma_ij^p
    t2 = jet_einsum("ja,pb,abi->pji", g1, ginv1, sig1)
    t3 = jet_einsum("ia,ajc,cp->pji", g1, sig1, ginv1)
    bracket = sig1 - t2 + t3
    w_mixed = jet_einsum("mp,pji,jn->imn", e1, bracket, einv1)
    w_up = jet_einsum("ims,sn->imn", w_mixed, et)
    return (w_up - w_up.transpose((0, 2, 1))) * 0.5


def spin_connection(cp: CoframePoint) -> SpinConnectionPoint:
    """Torsion-free metric-compatible connection of the frame, with first
    derivatives obtained by carrying jets through the whole assembly."""
    w = _connection_jets(cp)
    return SpinConnectionPoint(omega=w.val, domega=w.jac, signature=cp.signature)


def _omega_mixed(sp: SpinConnectionPoint) -> np.ndarray:
    return np.einsum("imn,ns->ims", sp.omega, eta(sp.signature))


def torsion_residual(cp: CoframePoint, sp: SpinConnectionPoint) -> np.ndarray:
    """2 E^mu_ij - (omega_i^mu_nu e^nu_j - omega_j^mu_nu e^nu_i); ~0 for the
    connection computed from the same frame point."""
    wmix = _omega_mixed(sp)
    a = np.einsum("imn,nj->mij", wmix, cp.e)
    return 2.0 * cp.E - (a - a.swapaxes(1, 2))


def curvature(sp: SpinConnectionPoint) -> CurvaturePoint:
    d1 = np.einsum("ilsj->jils", sp.domega)
    wmix = _omega_mixed(sp)
    quad = np.einsum("jle,ies->jils", wmix, sp.omega)
    r = d1 - d1.swapaxes(0, 1) + quad - quad.swapaxes(0, 1)
    # both antisymmetries hold exactly after explicit antisymmetrization
    r = 0.5 * (r - r.swapaxes(0, 1))
    r = 0.5 * (r - r.swapaxes(2, 3))
    return CurvaturePoint(R=r)


def epsilon_pair_spec(n_e: int, coord_tail: str, frame_tail: str,
                      extras: Sequence[str], out: str) -> str:
    """einsum spec for a double permutation-symbol block with ``n_e`` frame
    factors tied slotwise to the two symbols; extras follow the factors."""
    if n_e > 3:
        raise ValueError("at most three tied frame factors supported")
    qs = "abc"[:n_e]
    fs = "uvw"[:n_e]
    inputs = [qs + coord_tail, fs + frame_tail]
    inputs += [fs[r] + qs[r] for r in range(n_e)]
    inputs += list(extras)
    return ",".join(inputs) + "->" + out


def einstein_density(cp: CoframePoint, curv: CurvaturePoint) -> np.ndarray:
    """Double-epsilon contraction of the curvature against m-3 frame factors;
    vanishes exactly on Einstein-vacuum frames.  Free indices: coordinate
    (up) first, frame (down) second."""
    m = cp.m
    if m < 3:
        raise ValueError("einstein density needs dimension >= 3")
    eps = levi_civita(m)
    spec = epsilon_pair_spec(m - 3, "lij", "rst", ["jist"], "lr")
    pref = 1.0 / (math.factorial(m - 3) * 4.0)
    args = [eps, eps] + [cp.e] * (m - 3) + [curv.R]
    return pref * np.einsum(spec, *args, optimize=True)


def coordinate_oracle(field, point: Sequence[float]) -> OraclePoint:
    """Christoffel/Riemann/Einstein from the metric alone, independent of the
    frame-side connection assembly; serves as cross-check oracle."""
    cp = evaluate_coframe(field, point)
    et = eta(cp.signature)
    e2 = JetArray(cp.e, cp.de, cp.dde)
    g2 = jet_einsum("mn,mi,nj->ij", et, e2, e2)
    g1 = JetArray(g2.val, g2.jac)
    dg1 = JetArray(g2.jac, g2.hess)
    ginv1 = jet_matinv(g1)
    # d_i g_lj + d_j g_li - d_l g_ij   (dg[a, b, c] = d_c g_ab)
    s1 = dg1.transpose((0, 2, 1)) + dg1 - dg1.transpose((2, 0, 1))
    gamma1 = jet_einsum("kl,lij->kij", ginv1, s1) * 0.5
    gam, dgam = gamma1.val, gamma1.jac
    riem = (np.einsum("adbc->abcd", dgam) - np.einsum("acbd->abcd", dgam)
            + np.einsum("ace,edb->abcd", gam, gam)
            - np.einsum("ade,ecb->abcd", gam, gam))
    ricci = np.einsum("abad->bd", riem)
    scalar = float(np.einsum("bd,bd->", ginv1.val, ricci))
    einstein_lo = ricci - 0.5 * g1.val * scalar
    einstein_mixed = ginv1.val @ einstein_lo
    return OraclePoint(gamma=gam, riemann=riem, ricci=ricci, scalar=scalar,
                       einstein=einstein_mixed, g=g1.val, ginv=ginv1.val)


def spin_connection_via_christoffels(cp: CoframePoint, gamma: np.ndarray) -> np.ndarray:
    """omega_i^{mu nu} rebuilt from coordinate Christoffels; independent path
    used to validate the frame-side assembly."""
    deinv = -np.einsum("km,mli,ln->kni", cp.einv, cp.de, cp.einv)
    inner = np.einsum("kij,jn->kin", gamma, cp.einv) + np.einsum("kni->kin", deinv)
    w_mixed = np.einsum("mk,kin->imn", cp.e, inner)
    return np.einsum("ims,sn->imn", w_mixed, eta(cp.signature))


def curvature_to_coordinate(cp: CoframePoint, curv: CurvaturePoint) -> np.ndarray:
    """Frame curvature converted to R^a_{b j i} with coordinate indices only."""
    et = eta(cp.signature)
    mixed = np.einsum("jils,st->jilt", curv.R, et)
    return np.einsum("al,jilt,tb->abji", cp.einv, mixed, cp.e)


def kretschmann_scalar(cp: CoframePoint, curv: CurvaturePoint) -> float:
    gi = metric_inverse(cp)
    et = eta(cp.signature)
    return float(np.einsum("jils,JILS,jJ,iI,lL,sS->", curv.R, curv.R,
                           gi, gi, et, et, optimize=True))
