import numpy as np
import pytest


def fd_grad(f, x, h=1e-6):
    """Central-difference gradient of a scalar function of a point array."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        out[i] = (f(xp) - f(xm)) / (2 * h)
    return out


def fd_hess(f, x, h=1e-4):
    """Central-difference Hessian of a scalar function of a point array."""
    x = np.asarray(x, dtype=float)
    n = x.size
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                out[i, i] = (f(x + _unit(n, i, h)) - 2 * f(x) + f(x - _unit(n, i, h))) / h**2
            else:
                xpp = x.copy(); xpp[i] += h; xpp[j] += h
                xpm = x.copy(); xpm[i] += h; xpm[j] -= h
                xmp = x.copy(); xmp[i] -= h; xmp[j] += h
                xmm = x.copy(); xmm[i] -= h; xmm[j] -= h
                out[i, j] = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h**2)
    return out


def _unit(n, i, h):
    u = np.zeros(n)
    u[i] = h
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
