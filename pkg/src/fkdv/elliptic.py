"""Jacobi elliptic cn (and companions) plus the complete integral K, by AGM.

Conventions: all routines take the MODULUS k, not the parameter m = k^2.
(The quartic-cn wave profile uses modulus sqrt(2)/2, i.e. m = 1/2.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-15


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus k in [0, 1]."""

    k: float

    def __post_init__(self):
        if not 0.0 <= self.k <= 1.0:
            raise ValueError(f"modulus must lie in [0, 1], got {self.k}")


def _as_modulus(k):
    k = k.k if isinstance(k, EllipticModulus) else float(k)
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"modulus must lie in [0, 1], got {k}")
    return k


def agm(a, b):
    """Arithmetic-geometric mean, iterated to machine-epsilon differences."""
    a, b = float(a), float(b)
    while abs(a - b) > _EPS * abs(a):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return a


def elliptic_K(k):
    """Complete elliptic integral of the first kind; requires k < 1."""
    k = _as_modulus(k)
    if k == 1.0:
        raise ValueError("K(k) diverges as k -> 1")
    return np.pi / (2.0 * agm(1.0, np.sqrt(1.0 - k * k)))


def jacobi_sn_cn_dn(u, k):
    """sn, cn, dn at real argument u (scalar or array) for modulus k.

    Descending AGM with phase back-substitution; the argument is first
    reduced by the real period 4K so large inputs stay accurate.
    """
    k = _as_modulus(k)
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)

    if k == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    elif k == 1.0:
        sn, cn = np.tanh(u), 1.0 / np.cosh(u)
        dn = cn.copy()
    else:
        period = 4.0 * elliptic_K(k)
        u = u - period * np.round(u / period)

        a = [1.0]
        b = [np.sqrt(1.0 - k * k)]
        c = [k]
        while abs(c[-1]) > _EPS * abs(a[-1]):
            an = 0.5 * (a[-1] + b[-1])
            bn = np.sqrt(a[-1] * b[-1])
            cn_ = 0.5 * (a[-1] - b[-1])
            a.append(an)
            b.append(bn)
            c.append(cn_)
        n = len(a) - 1
        phi = (2.0**n) * a[n] * u
        phi_prev = phi
        for i in range(n, 0, -1):
            phi_prev = phi
            ratio = np.clip(c[i] / a[i] * np.sin(phi), -1.0, 1.0)
            phi = 0.5 * (phi + np.arcsin(ratio))
        sn = np.sin(phi)
        cn = np.cos(phi)
        dn = cn / np.cos(phi_prev - phi)

    if scalar:
        return float(sn[0]), float(cn[0]), float(dn[0])
    return sn, cn, dn


def jacobi_cn(u, k):
    """cn(u; k); interpolates between cos (k=0) and sech (k=1)."""
    return jacobi_sn_cn_dn(u, k)[1]
