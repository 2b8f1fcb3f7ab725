"""Closed-form quartic-cn wave family for reducible equations.

For any damping alpha(t) and constants (c1, c2) != (0, 0), the equation with
dispersion beta = -exp(-A) Z^3, Z = c1 S + c2 (A and S the damping
quadratures), has the exact solution

    u = [ (105/16) a cn^4( (sqrt2/4) a^(1/4) ((x+d)/Z - (21/8) a J) + b ; k )
          + c1 (x + d) ] / ( exp(A) Z ),       k = sqrt(2)/2,

with J(t) the integral of exp(-A)/Z^2 from the quadrature basepoint.  The
profile is x-periodic only when c1 = 0 (the affine ramp vanishes); use the
finite-difference residual path otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import elliptic_K, jacobi_cn
from .equivalence import EquationSpec
from .exprcalc import SmoothFn

CN4_AMPLITUDE = 105.0 / 16.0
CN4_MODULUS = np.sqrt(2.0) / 2.0


@dataclass
class Cn4Params:
    """Parameters of the quartic-cn family.

    a > 0 sets the amplitude scale, b and d are phase/space shifts, and
    (c1, c2) select the reducible dispersion; Z = c1 S + c2 must not vanish
    on the working interval.
    """

    alpha: SmoothFn
    a: float = 1.0
    b: float = 0.0
    d: float = 0.0
    c1: float = 0.0
    c2: float = 1.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("amplitude scale a must be positive")
        if self.c1 == 0.0 and self.c2 == 0.0:
            raise ValueError("(c1, c2) must not both vanish")


def _support(p):
    """Shared quadrature objects: the spec, S, Z and a Z-nonvanishing check."""
    one = SmoothFn.from_text("1", interval=p.alpha.interval, t_ref=p.alpha.t_ref)
    carrier = EquationSpec(p.alpha, one)
    S = carrier.time_stretch()

    def Z(t):
        return p.c1 * S(t) + p.c2

    zvals = Z(carrier.sample_points(33))
    if np.any(zvals == 0.0) or (np.max(zvals) > 0 and np.min(zvals) < 0):
        raise ValueError("Z = c1 S + c2 crosses zero on the working interval")
    return carrier, S, Z


def cn4_equation(p: Cn4Params) -> EquationSpec:
    """The member of the class solved by the quartic-cn field: beta = -exp(-A) Z^3."""
    carrier, S, Z = _support(p)
    A = carrier.damping_integral()
    expneg = carrier.exp_neg_damping()
    alpha = p.alpha

    def beta(t):
        return -expneg(t) * Z(t) ** 3

    def dbeta(t):
        e = expneg(t)
        z = Z(t)
        return alpha(t) * e * z**3 - 3.0 * p.c1 * e * e * z * z

    beta_fn = SmoothFn(beta, deriv=dbeta, interval=alpha.interval, t_ref=alpha.t_ref,
                       name=f"-exp(-A)*({p.c1!r}*S+{p.c2!r})^3")
    return EquationSpec(alpha, beta_fn, name="cn4 equation")


class Cn4Field:
    """Callable exact field u(t, x) of the quartic-cn family."""

    def __init__(self, p: Cn4Params):
        self.p = p
        carrier, S, Z = _support(p)
        self.carrier = carrier
        self.S = S
        self.Z = Z
        self.A = carrier.damping_integral()
        expneg = carrier.exp_neg_damping()
        integrand = SmoothFn(lambda t: expneg(t) / Z(t) ** 2,
                             interval=p.alpha.interval, t_ref=p.alpha.t_ref,
                             name="exp(-A)/Z^2")
        self.J = integrand.antiderivative_fn(name="J")
        self.theta = np.sqrt(2.0) / 4.0 * p.a**0.25

    def phase(self, t, x):
        p = self.p
        return self.theta * ((np.asarray(x, dtype=float) + p.d) / self.Z(t)
                             - (21.0 / 8.0) * p.a * self.J(t)) + p.b

    def __call__(self, t, x):
        p = self.p
        cn = jacobi_cn(self.phase(t, x), CN4_MODULUS)
        core = CN4_AMPLITUDE * p.a * cn**4 + p.c1 * (np.asarray(x, dtype=float) + p.d)
        return core / (np.exp(self.A(t)) * self.Z(t))

    def spatial_period(self, t):
        """x-period of the cn^4 factor: 2K(k)/theta scaled by Z(t)."""
        return 2.0 * elliptic_K(CN4_MODULUS) / self.theta * abs(self.Z(t))

    def is_periodic(self):
        return self.p.c1 == 0.0


def cn4_field(p: Cn4Params) -> Cn4Field:
    return Cn4Field(p)
