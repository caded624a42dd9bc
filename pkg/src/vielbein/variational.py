"""Section-level objects of the variational formulation.

A section point carries a frame point together with connection coordinates
that need not derive from the frame (non-holonomic data is first-class: the
algebraic identities here hold for arbitrary antisymmetric connection
values).  The module provides the contact two-form pullback, the Lagrangian
density, its gauge-invariance defect, a slot-exchange identity of the
double-epsilon block, and the two Euler-Lagrange residual blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .frame import (
    CoframePoint,
    SpinConnectionPoint,
    epsilon_pair_spec,
    evaluate_coframe,
    spin_connection,
)
from .gauge import GaugeElement, evaluate_gauge, gauge_transform_frame, gauge_transform_omega
from .tensors import eta, levi_civita

__all__ = [
    "SectionPoint",
    "section_point",
    "contact_pullback",
    "theta_density",
    "theta_gauge_invariance_check",
    "omega_shuffle_identity",
    "el_residual_connection",
    "el_residual_frame",
]


@dataclass(frozen=True)
class SectionPoint:
    cp: CoframePoint
    sp: SpinConnectionPoint
    holonomic: bool

    @property
    def m(self) -> int:
        return self.cp.m


def section_point(field, point: Sequence[float]) -> SectionPoint:
    """Holonomic section point: connection coordinates computed from the frame."""
    cp = evaluate_coframe(field, point)
    return SectionPoint(cp=cp, sp=spin_connection(cp), holonomic=True)


def _wmix(section: SectionPoint) -> np.ndarray:
    return np.einsum("imn,ns->ims", section.sp.omega, eta(section.sp.signature))


def contact_pullback(section: SectionPoint) -> np.ndarray:
    """Coefficients of the pulled-back contact two-forms over dx^a ^ dx^b;
    identically zero exactly when the section is holonomic."""
    cp, wmix = section.cp, _wmix(section)
    t = np.einsum("amn,nb->mab", wmix, cp.e)
    return cp.de.swapaxes(1, 2) - cp.de + t - t.swapaxes(1, 2)


def _quadratic_block(section: SectionPoint) -> np.ndarray:
    """W[i, j, lam, sig] = d_j omega_i^{lam sig} + omega_j^lam_eta omega_i^{eta sig}."""
    sp = section.sp
    wmix = _wmix(section)
    return (np.einsum("istj->ijst", sp.domega)
            + np.einsum("jse,iet->ijst", wmix, sp.omega))


def theta_density(section: SectionPoint) -> float:
    """Scalar coefficient L with the pulled-back Lagrangian m-form = L ds."""
    m = section.m
    cp = section.cp
    eps = levi_civita(m)
    spec = epsilon_pair_spec(m - 2, "ij", "st", ["ijst"], "")
    args = [eps, eps] + [cp.e] * (m - 2) + [_quadratic_block(section)]
    return float(np.einsum(spec, *args, optimize=True)) / (math.factorial(m - 2) * 2.0)


def theta_gauge_invariance_check(section: SectionPoint, ge: GaugeElement) -> float:
    """|Lbar(xbar) det(J) - L(x)|: the density transforms as a top-degree form
    coefficient, so the Jacobian-weighted values must agree."""
    l_here = theta_density(section)
    cp_bar = gauge_transform_frame(section.cp, ge)
    sp_bar = gauge_transform_omega(section.sp, section.cp, ge)
    l_bar = theta_density(SectionPoint(cp_bar, sp_bar, section.holonomic))
    det_j = evaluate_gauge(ge, section.cp.x).det_j
    return abs(l_bar * det_j - l_here)


def omega_shuffle_identity(section: SectionPoint) -> float:
    """Slot-exchange identity of the double-epsilon omega*domega block.

    Both sides are read as coefficient arrays of the independent connection
    differentials (antisymmetrized over the frame pair); returns the max
    deviation.  Holds for arbitrary, not necessarily holonomic, sections.
    """
    m = section.m
    cp, sp = section.cp, section.sp
    eps = levi_civita(m)
    wmix = _wmix(section)

    spec_l = epsilon_pair_spec(m - 2, "ij", "st", ["jsh"], "iht")
    lhs = np.einsum(spec_l, *([eps, eps] + [cp.e] * (m - 2) + [wmix]),
                    optimize=True) / math.factorial(m - 2)

    spec_r = epsilon_pair_spec(m - 3, "lij", "xst", ["yl", "jxy"], "ist")
    rhs = np.einsum(spec_r, *([eps, eps] + [cp.e] * (m - 3) + [cp.e, wmix]),
                    optimize=True) * (-1.0 / (math.factorial(m - 3) * 2.0))

    c_lhs = lhs - lhs.swapaxes(1, 2)
    c_rhs = rhs - rhs.swapaxes(1, 2)
    return float(np.abs(c_lhs - c_rhs).max())


def el_residual_connection(section: SectionPoint) -> np.ndarray:
    """Residual block multiplying the connection variations; vanishes exactly
    when the section is kinematically admissible (torsion-free closure)."""
    m = section.m
    cp = section.cp
    eps = levi_civita(m)
    wmix = _wmix(section)
    u = cp.de + np.einsum("jre,el->rlj", wmix, cp.e)
    spec = epsilon_pair_spec(m - 3, "lij", "rst", ["rlj"], "ist")
    args = [eps, eps] + [cp.e] * (m - 3) + [u]
    return np.einsum(spec, *args, optimize=True) / math.factorial(m - 3)


def el_residual_frame(section: SectionPoint) -> np.ndarray:
    """Residual block multiplying the frame variations; on holonomic sections
    it coincides with the curvature density (same contraction, with the
    quadratic block in place of the full curvature)."""
    m = section.m
    cp = section.cp
    eps = levi_civita(m)
    spec = epsilon_pair_spec(m - 3, "lij", "rst", ["ijst"], "lr")
    args = [eps, eps] + [cp.e] * (m - 3) + [_quadratic_block(section)]
    return np.einsum(spec, *args, optimize=True) / (math.factorial(m - 3) * 2.0)
