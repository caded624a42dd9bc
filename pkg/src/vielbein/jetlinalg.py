"""Arrays of truncated jets and einsum-style algebra over them.

A :class:`JetArray` bundles an array of values with its first derivatives
(``jac``, one appended axis over the base coordinates) and optionally its
second derivatives (``hess``, two appended axes).  All index gymnastics run
through :func:`jet_einsum`, which applies the product rule channel by
channel, so derivative bookkeeping lives in exactly one place.

First-order arrays (``hess=None``) are the workhorse wherever only one more
derivative order is needed, e.g. when the connection coefficients and their
first derivatives are assembled out of a frame known to second order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet2

__all__ = [
    "JetArray",
    "jet_einsum",
    "jet_matinv",
    "jet_matexp",
    "stack_jets",
    "chart_transfer",
]

# letters reserved for derivative axes inside jet_einsum specs
_DERIV_LETTERS = "ZYXWV"


@dataclass(frozen=True)
class JetArray:
    val: np.ndarray
    jac: np.ndarray
    hess: np.ndarray | None = None

    @property
    def dim(self) -> int:
        """Number of base coordinates the derivatives run over."""
        return self.jac.shape[-1]

    @property
    def order(self) -> int:
        return 2 if self.hess is not None else 1

    def __add__(self, other: "JetArray") -> "JetArray":
        h = None
        if self.hess is not None and other.hess is not None:
            h = self.hess + other.hess
        return JetArray(self.val + other.val, self.jac + other.jac, h)

    def __sub__(self, other: "JetArray") -> "JetArray":
        h = None
        if self.hess is not None and other.hess is not None:
            h = self.hess - other.hess
        return JetArray(self.val - other.val, self.jac - other.jac, h)

    def __neg__(self) -> "JetArray":
        return self * -1.0

    def __mul__(self, c: float) -> "JetArray":
        c = float(c)
        return JetArray(c * self.val, c * self.jac,
                        None if self.hess is None else c * self.hess)

    __rmul__ = __mul__

    def transpose(self, axes: tuple[int, ...]) -> "JetArray":
        n = self.val.ndim
        ax1 = tuple(axes) + (n,)
        h = None if self.hess is None else self.hess.transpose(tuple(axes) + (n, n + 1))
        return JetArray(self.val.transpose(axes), self.jac.transpose(ax1), h)

    def drop_hess(self) -> "JetArray":
        return JetArray(self.val, self.jac, None)


def stack_jets(grid, shape: tuple[int, ...], dim: int) -> JetArray:
    """Assemble a second-order JetArray from a nested sequence of Jet2
    (plain numbers are treated as constants)."""
    val = np.zeros(shape)
    jac = np.zeros(shape + (dim,))
    hess = np.zeros(shape + (dim, dim))
    for idx in np.ndindex(*shape):
        j = grid
        for k in idx:
            j = j[k]
        if isinstance(j, Jet2):
            val[idx] = j.value
            jac[idx] = j.grad
            hess[idx] = j.hess
        else:
            val[idx] = float(j)
    return JetArray(val, jac, hess)


def jet_einsum(spec: str, *ops) -> JetArray:
    """einsum over a mix of JetArray and plain ndarray operands.

    The spec addresses value axes only; derivative axes are appended
    internally.  Plain arrays are treated as constants.  The result carries
    a Hessian only when every JetArray operand does.
    """
    ins, out = spec.split("->")
    in_specs = ins.split(",")
    if len(in_specs) != len(ops):
        raise ValueError(f"spec {spec!r} does not match {len(ops)} operands")
    used = set(spec)
    free = [c for c in _DERIV_LETTERS if c not in used]
    dz, dy = free[0], free[1]

    vals = [op.val if isinstance(op, JetArray) else np.asarray(op) for op in ops]
    jet_ix = [i for i, op in enumerate(ops) if isinstance(op, JetArray)]
    if not jet_ix:
        raise ValueError("jet_einsum needs at least one JetArray operand")

    val = np.einsum(spec, *vals, optimize=True)

    jac = None
    for i in jet_ix:
        arrs = list(vals)
        arrs[i] = ops[i].jac
        specs = list(in_specs)
        specs[i] += dz
        term = np.einsum(",".join(specs) + "->" + out + dz, *arrs, optimize=True)
        jac = term if jac is None else jac + term

    hess = None
    if all(ops[i].hess is not None for i in jet_ix):
        hess = 0.0
        for i in jet_ix:
            arrs = list(vals)
            arrs[i] = ops[i].hess
            specs = list(in_specs)
            specs[i] += dz + dy
            hess = hess + np.einsum(",".join(specs) + "->" + out + dz + dy,
                                    *arrs, optimize=True)
        for i in jet_ix:
            for j in jet_ix:
                if i == j:
                    continue
                arrs = list(vals)
                arrs[i] = ops[i].jac
                arrs[j] = ops[j].jac
                specs = list(in_specs)
                specs[i] += dz
                specs[j] += dy
                hess = hess + np.einsum(",".join(specs) + "->" + out + dz + dy,
                                        *arrs, optimize=True)
    return JetArray(val, jac, hess)


def jet_matinv(a: JetArray) -> JetArray:
    """Inverse of a square matrix of jets."""
    iv = np.linalg.inv(a.val)
    jac = -np.einsum("ab,bcZ,cd->adZ", iv, a.jac, iv)
    hess = None
    if a.hess is not None:
        t1 = -np.einsum("ab,bcZY,cd->adZY", iv, a.hess, iv)
        t2 = np.einsum("ab,bcZ,cd,deY,ef->afZY", iv, a.jac, iv, a.jac, iv,
                       optimize=True)
        hess = t1 + t2 + t2.transpose(0, 1, 3, 2)
    return JetArray(iv, jac, hess)


def jet_matexp(a: JetArray, tol: float = 1e-17) -> JetArray:
    """Matrix exponential of a square matrix of jets (scaling and squaring)."""
    n = a.val.shape[0]
    norm = np.linalg.norm(a.val, ord=np.inf)
    squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 1.0 else 0
    x = a * (0.5 ** squarings)

    dim = a.dim
    ident = JetArray(np.eye(n), np.zeros((n, n, dim)),
                     None if a.hess is None else np.zeros((n, n, dim, dim)))
    total = ident
    term = ident
    k = 1
    while True:
        term = jet_einsum("ab,bc->ac", term, x) * (1.0 / k)
        total = total + term
        size = max(np.abs(term.val).max(), np.abs(term.jac).max(),
                   0.0 if term.hess is None else np.abs(term.hess).max())
        if size < tol or k > 80:
            break
        k += 1
    for _ in range(squarings):
        total = jet_einsum("ab,bc->ac", total, total)
    return total


def chart_transfer(q: JetArray, k_val: np.ndarray, k_jac: np.ndarray | None) -> JetArray:
    """Re-express derivative axes in new coordinates.

    ``k_val[i, a]`` holds the old-by-new inverse Jacobian dx^i/dy^a at the
    point; ``k_jac[i, a, h]`` its old-coordinate derivatives (required to
    transfer a Hessian).
    """
    jac = np.einsum("...i,ia->...a", q.jac, k_val)
    hess = None
    if q.hess is not None:
        if k_jac is None:
            raise ValueError("second-order transfer needs the Jacobian derivatives")
        dk_new = np.einsum("iah,hb->iab", k_jac, k_val)
        hess = (np.einsum("...ij,ia,jb->...ab", q.hess, k_val, k_val)
                + np.einsum("...i,iab->...ab", q.jac, dk_new))
    return JetArray(q.val, jac, hess)
