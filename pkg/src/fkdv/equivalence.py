"""Equivalence transformations of u_t + u u_x + alpha(t) u + beta(t) u_xxxxx = 0.

Two kinds of transformation act on the class:

* `EquivalenceTransform` — time reparametrization t -> T(t) combined with an
  x/u rescaling whose factor X1 = 1/(d3*S + d4) depends on the damping
  coefficient through the quadratures A = int(alpha) and S = int(exp(-A)).
  Setting d3 = 0, d4 = 1, T = S gauges the damping away entirely
  (`gauge_to_alpha_zero`).

* `MobiusEquivalence` — for the gauged subclass (alpha = 0): a Mobius map in
  t, an affine map in x, u, and the induced dispersion-coefficient action
  beta -> e2^5 * beta / ((c t + d)^3 * Delta), Delta = a d - b c = +-1.

An equation is point-equivalent to a constant-coefficient one exactly when
the signed cube root of beta * exp(A) is affine in S; `is_reducible_to_constant`
tests this and `map_to_constant` builds the explicit transform chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exprcalc import SmoothFn, chebyshev_nodes
from .pdesolve import Field, Grid1D


def _odd_cbrt(x):
    return np.sign(x) * np.abs(x) ** (1.0 / 3.0)


class EquationSpec:
    """One member of the class: damping alpha(t) and dispersion beta(t).

    beta must not vanish on the working interval (checked at sample points).
    """

    def __init__(self, alpha, beta, name=""):
        if alpha.interval != beta.interval:
            raise ValueError("alpha and beta must share one working interval")
        if alpha.t_ref != beta.t_ref:
            raise ValueError("alpha and beta must share one quadrature basepoint")
        self.alpha = alpha
        self.beta = beta
        self.name = name or f"(alpha={alpha.name}, beta={beta.name})"
        bvals = beta(self.sample_points(33))
        if not np.all(np.isfinite(bvals)):
            raise ValueError("beta is not finite on the working interval")
        if np.any(bvals == 0.0) or (np.max(bvals) > 0 and np.min(bvals) < 0):
            raise ValueError("beta must be nonzero on the working interval")
        self._A = None
        self._expnegA = None
        self._S = None

    @classmethod
    def from_text(cls, alpha="0", beta="1", interval=None, t_ref=None):
        return cls(
            SmoothFn.from_text(alpha, interval=interval, t_ref=t_ref),
            SmoothFn.from_text(beta, interval=interval, t_ref=t_ref),
        )

    @property
    def interval(self):
        return self.alpha.interval

    @property
    def t_lo(self):
        return self.alpha.t_lo

    @property
    def t_hi(self):
        return self.alpha.t_hi

    @property
    def t_ref(self):
        return self.alpha.t_ref

    def sample_points(self, n=33):
        return chebyshev_nodes(self.t_lo, self.t_hi, n)

    # quadrature building blocks shared by every transformation ------------

    def _const_alpha(self):
        expr = self.alpha.expr
        return expr.value if hasattr(expr, "value") else None

    def damping_integral(self):
        """A(t) = integral of alpha from t_ref, as a SmoothFn."""
        if self._A is None:
            c = self._const_alpha()
            if c is not None:
                self._A = SmoothFn.from_text(f"({c!r})*(t-({self.t_ref!r}))",
                                             interval=self.interval, t_ref=self.t_ref)
            else:
                self._A = self.alpha.antiderivative_fn(name="A")
        return self._A

    def exp_neg_damping(self):
        """exp(-A(t)) with exact first and second derivatives."""
        if self._expnegA is None:
            c = self._const_alpha()
            if c is not None:
                self._expnegA = SmoothFn.from_text(
                    f"exp(-({c!r})*(t-({self.t_ref!r})))",
                    interval=self.interval, t_ref=self.t_ref)
                return self._expnegA
            A = self.damping_integral()
            alpha = self.alpha

            def fn(t):
                return np.exp(-A(t))

            d2 = SmoothFn(
                lambda t: (alpha(t) ** 2 - alpha.deriv(t)) * np.exp(-A(t)),
                interval=self.interval, t_ref=self.t_ref, name="d2(exp(-A))")
            d1 = SmoothFn(
                lambda t: -alpha(t) * np.exp(-A(t)),
                deriv=d2, interval=self.interval, t_ref=self.t_ref, name="d(exp(-A))")
            self._expnegA = SmoothFn(fn, deriv=d1, interval=self.interval,
                                     t_ref=self.t_ref, name="exp(-A)")
        return self._expnegA

    def time_stretch(self):
        """S(t) = integral of exp(-A) from t_ref; strictly increasing."""
        if self._S is None:
            c = self._const_alpha()
            if c == 0.0:
                self._S = SmoothFn.from_text(f"t-({self.t_ref!r})",
                                             interval=self.interval, t_ref=self.t_ref)
            elif c is not None:
                self._S = SmoothFn.from_text(
                    f"(1-exp(-({c!r})*(t-({self.t_ref!r}))))/({c!r})",
                    interval=self.interval, t_ref=self.t_ref)
            else:
                self._S = self.exp_neg_damping().antiderivative_fn(name="S")
        return self._S

    def is_alpha_zero(self, tol=1e-10):
        return float(np.max(np.abs(self.alpha(self.sample_points(17))))) <= tol

    def __repr__(self):
        lo, hi = self.interval
        return f"EquationSpec({self.name} on [{lo}, {hi}])"


def _require_smoothfn_monotone(T, samples=64):
    dT = T.deriv(np.linspace(T.t_lo, T.t_hi, samples))
    if np.any(dT == 0) or (np.max(dT) > 0 and np.min(dT) < 0):
        raise ValueError("time map must have nonvanishing derivative of one sign")


class EquivalenceTransform:
    """General element: t -> T(t), x -> (x + d1) X1 + d2, with
    u -> (X1 u + X1_t (x + d1)) / T_t and X1 = 1/(d3 S + d4) built from the
    source equation's damping quadratures.
    """

    def __init__(self, T, d1, d2, d3, d4, source):
        if (d3, d4) == (0.0, 0.0):
            raise ValueError("(d3, d4) must not both vanish")
        _require_smoothfn_monotone(T)
        self.T = T
        self.d1, self.d2, self.d3, self.d4 = float(d1), float(d2), float(d3), float(d4)
        self.source = source
        den = self.d3 * source.time_stretch()(source.sample_points(33)) + self.d4
        if np.any(den == 0.0) or (np.max(den) > 0 and np.min(den) < 0):
            raise ValueError("X1 has a pole inside the working interval")
        self._Tinv = None

    @classmethod
    def identity(cls, eq):
        T = SmoothFn.from_text("t", interval=eq.interval, t_ref=eq.t_ref)
        return cls(T, 0.0, 0.0, 0.0, 1.0, eq)

    # scalar building blocks -------------------------------------------------

    def X1(self, t):
        return 1.0 / (self.d3 * self.source.time_stretch()(t) + self.d4)

    def X1_t(self, t):
        return -self.d3 * self.source.exp_neg_damping()(t) * self.X1(t) ** 2

    def Tinv(self):
        if self._Tinv is None:
            self._Tinv = self.T.inverse()
        return self._Tinv

    # actions -----------------------------------------------------------------

    def apply_to_points(self, t, x, u):
        t = np.asarray(t, dtype=float)
        X1 = self.X1(t)
        tt = self.T(t)
        xt = (x + self.d1) * X1 + self.d2
        ut = (X1 * u + self.X1_t(t) * (x + self.d1)) / self.T.deriv(t)
        return tt, xt, ut

    def apply_to_coefficients(self, eq=None):
        """The image equation (alpha~, beta~) on the image interval T([lo, hi])."""
        eq = self.source if eq is None else eq
        if eq is not self.source:
            # X1 depends on the damping of the equation being transformed
            return EquivalenceTransform(self.T, self.d1, self.d2, self.d3, self.d4,
                                        eq).apply_to_coefficients()
        T, Tinv = self.T, self.Tinv()
        Tt = T.derivative()
        Ttt = Tt.derivative()
        alpha, beta = eq.alpha, eq.beta
        lo_img, hi_img = sorted((T(eq.t_lo), T(eq.t_hi)))
        t_ref_img = float(T(eq.t_ref))

        def alpha_tilde_of_t(t):
            X1 = self.X1(t)
            return (alpha(t) - 2.0 * self.X1_t(t) / X1 + Ttt(t) / Tt(t)) / Tt(t)

        def beta_tilde_of_t(t):
            return self.X1(t) ** 5 * beta(t) / Tt(t)

        def dbeta_tilde_of_t(t):
            X1, X1t = self.X1(t), self.X1_t(t)
            tt = Tt(t)
            inner = (5.0 * X1**4 * X1t * beta(t) + X1**5 * beta.deriv(t)
                     - X1**5 * beta(t) * Ttt(t) / tt) / tt
            return inner / tt

        alpha_img = SmoothFn(lambda s: alpha_tilde_of_t(Tinv(s)),
                             interval=(lo_img, hi_img), t_ref=t_ref_img, name="alpha~")
        beta_img = SmoothFn(lambda s: beta_tilde_of_t(Tinv(s)),
                            deriv=lambda s: dbeta_tilde_of_t(Tinv(s)),
                            interval=(lo_img, hi_img), t_ref=t_ref_img, name="beta~")
        img = EquationSpec(alpha_img, beta_img, name=f"{eq.name} via transform")

        # The image quadratures have closed forms through the source ones;
        # installing them avoids quadrature-over-quadrature towers downstream.
        A_src = eq.damping_integral()
        X1r = self.X1(eq.t_ref)
        Ttr = float(Tt(eq.t_ref))
        d3 = self.d3

        def A_img_fn(s):
            t = Tinv(s)
            return (A_src(t) - 2.0 * np.log(np.abs(self.X1(t) / X1r))
                    + np.log(np.abs(Tt(t) / Ttr)))

        def expneg_img_fn(s):
            t = Tinv(s)
            return np.exp(-A_src(t)) * (self.X1(t) / X1r) ** 2 * (Ttr / Tt(t))

        if d3 != 0.0:
            def S_img_fn(s):
                t = Tinv(s)
                return Ttr * (X1r - self.X1(t)) / (d3 * X1r**2)
        else:
            S_src = eq.time_stretch()

            def S_img_fn(s):
                return Ttr * S_src(Tinv(s))

        img._A = SmoothFn(A_img_fn, deriv=alpha_img, interval=(lo_img, hi_img),
                          t_ref=t_ref_img, name="A~")
        img._expnegA = SmoothFn(expneg_img_fn, interval=(lo_img, hi_img),
                                t_ref=t_ref_img, name="exp(-A~)")
        img._S = SmoothFn(S_img_fn, deriv=img._expnegA, interval=(lo_img, hi_img),
                          t_ref=t_ref_img, name="S~")
        return img

    def apply_to_field_fn(self, ufn):
        """Transform a closed-form field u(t, x) into image coordinates."""
        Tinv = self.Tinv()

        def transformed(t_img, x_img):
            t = Tinv(t_img)
            X1 = self.X1(t)
            x = (x_img - self.d2) / X1 - self.d1
            return (X1 * np.asarray(ufn(t, x)) + self.X1_t(t) * (x + self.d1)) / self.T.deriv(t)

        return transformed

    def apply_to_fields(self, fields):
        """Transform sampled snapshots; exact FFT resampling onto offset-free grids.

        Requires d3 = 0: otherwise the u-transform gains a non-periodic ramp
        X1_t * x and sampled periodic data cannot represent the image (use
        apply_to_field_fn for those elements).
        """
        if self.d3 != 0.0:
            raise ValueError("sampled-field transform needs d3 = 0 (periodicity); "
                             "use apply_to_field_fn instead")
        X1 = 1.0 / self.d4
        out = []
        for f in fields:
            t = f.t
            tt = float(self.T(t))
            Tt = float(self.T.deriv(t))
            new_vals = (X1 * f.values) / Tt
            L_new = abs(X1) * f.grid.L
            if X1 < 0:
                new_vals = new_vals[::-1].copy()
            offset = (0.0 + self.d1) * X1 + self.d2 if X1 > 0 else \
                (f.grid.x[-1] + self.d1) * X1 + self.d2
            # shift so samples sit at j*L_new/N (exact spectral translation)
            grid_new = Grid1D(L=L_new, N=f.grid.N)
            k = grid_new.k
            shift = np.exp(-1j * k * offset)
            vals = np.fft.irfft(np.fft.rfft(new_vals) * shift, n=f.grid.N)
            out.append(Field(t=tt, values=vals, grid=grid_new))
        out.sort(key=lambda f: f.t)
        return out

    def inverse(self):
        """The inverse element, parametrized against the image equation."""
        img = self.apply_to_coefficients()
        Tinv = self.Tinv()
        S_img = img.time_stretch()
        ts_img = img.sample_points(9)
        # 1/X1~ = X1 must be affine in the image time stretch; fit the coefficients
        y = np.array([self.X1(Tinv(s)) for s in ts_img])
        M = np.column_stack([S_img(ts_img), np.ones_like(ts_img)])
        (d3_new, d4_new), res, *_ = np.linalg.lstsq(M, y, rcond=None)
        fit = M @ np.array([d3_new, d4_new]) - y
        if np.max(np.abs(fit)) > 1e-8 * max(1.0, np.max(np.abs(y))):
            raise RuntimeError("inverse element fit failed; transform may be invalid")
        return EquivalenceTransform(Tinv, -self.d2, -self.d1, d3_new, d4_new, img)

    def __repr__(self):
        return (f"EquivalenceTransform(T={self.T.name}, d=({self.d1}, {self.d2}, "
                f"{self.d3}, {self.d4}))")


def gauge_to_alpha_zero(eq):
    """Remove the damping term: t -> S(t), u -> exp(A) u, beta -> exp(A) beta.

    Returns the gauged equation (exact-derivative coefficient functions) and
    the transform realizing it, for composing with solution maps.
    """
    S = eq.time_stretch()
    g = EquivalenceTransform(S, 0.0, 0.0, 0.0, 1.0, eq)
    Sinv = g.Tinv()
    A = eq.damping_integral()
    alpha, beta = eq.alpha, eq.beta
    lo_img, hi_img = sorted((S(eq.t_lo), S(eq.t_hi)))

    def beta_hat(s):
        t = Sinv(s)
        return np.exp(A(t)) * beta(t)

    def dbeta_hat(s):
        t = Sinv(s)
        return np.exp(2.0 * A(t)) * (alpha(t) * beta(t) + beta.deriv(t))

    beta_img = SmoothFn(beta_hat, deriv=dbeta_hat, interval=(lo_img, hi_img),
                        t_ref=0.0, name=f"gauged({beta.name})")
    alpha_img = SmoothFn.from_text("0", interval=(lo_img, hi_img), t_ref=0.0)
    return EquationSpec(alpha_img, beta_img, name=f"gauged {eq.name}"), g


class MobiusEquivalence:
    """Element of the zero-damping equivalence group.

    Tuple (a, b, c, d, e0, e1, e2) with Delta = a d - b c != 0 and e2 != 0,
    defined up to a common nonzero multiplier; normalized so Delta = +-1.
    """

    def __init__(self, a, b, c, d, e0=0.0, e1=0.0, e2=1.0, normalize=True):
        delta = a * d - b * c
        if delta == 0.0:
            raise ValueError("a d - b c must be nonzero")
        if e2 == 0.0:
            raise ValueError("e2 must be nonzero")
        if normalize:
            s = 1.0 / np.sqrt(abs(delta))
            a, b, c, d, e0, e1, e2 = (v * s for v in (a, b, c, d, e0, e1, e2))
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)
        self.e0, self.e1, self.e2 = float(e0), float(e1), float(e2)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def delta(self):
        return self.a * self.d - self.b * self.c

    @property
    def tuple(self):
        return (self.a, self.b, self.c, self.d, self.e0, self.e1, self.e2)

    def time_map(self, t):
        return (self.a * np.asarray(t, dtype=float) + self.b) / (self.c * t + self.d)

    def time_map_inverse(self, s):
        return (self.d * np.asarray(s, dtype=float) - self.b) / (self.a - self.c * s)

    def apply_to_points(self, t, x, u):
        den = self.c * np.asarray(t, dtype=float) + self.d
        tt = (self.a * t + self.b) / den
        xt = (self.e2 * x + self.e1 * t + self.e0) / den
        ut = (self.e2 * den * u - self.e2 * self.c * x - self.e0 * self.c + self.e1 * self.d) / self.delta
        return tt, xt, ut

    def apply_to_coefficients(self, eq):
        """Image of a gauged equation: beta~ = e2^5 beta / ((c t + d)^3 Delta)."""
        if not eq.is_alpha_zero():
            raise ValueError("Mobius equivalence acts on the alpha = 0 subclass")
        den = self.c * eq.sample_points(33) + self.d
        if np.any(den == 0.0) or (np.max(den) > 0 and np.min(den) < 0):
            raise ValueError("time-map pole inside the working interval")
        beta = eq.beta
        a, b, c, d, e2, delta = self.a, self.b, self.c, self.d, self.e2, self.delta
        lo_img, hi_img = sorted(self.time_map(np.array(eq.interval)))
        t_ref_img = float(self.time_map(eq.t_ref))

        def beta_tilde(s):
            t = self.time_map_inverse(s)
            return e2**5 * beta(t) / ((c * t + d) ** 3 * delta)

        def dbeta_tilde(s):
            t = self.time_map_inverse(s)
            ct_d = c * t + d
            return e2**5 / delta**2 * (beta.deriv(t) / ct_d - 3.0 * c * beta(t) / ct_d**2)

        alpha_img = SmoothFn.from_text("0", interval=(lo_img, hi_img), t_ref=t_ref_img)
        beta_img = SmoothFn(beta_tilde, deriv=dbeta_tilde, interval=(lo_img, hi_img),
                            t_ref=t_ref_img, name=f"mobius({beta.name})")
        return EquationSpec(alpha_img, beta_img, name=f"{eq.name} via mobius")

    def apply_to_field_fn(self, ufn):
        def transformed(t_img, x_img):
            t = self.time_map_inverse(t_img)
            den = self.c * t + self.d
            x = (x_img * den - self.e1 * t - self.e0) / self.e2
            u = np.asarray(ufn(t, x))
            return (self.e2 * den * u - self.e2 * self.c * x
                    - self.e0 * self.c + self.e1 * self.d) / self.delta

        return transformed

    def compose(self, first):
        """Element equal to applying `first`, then self."""
        a1, b1, c1, d1, f0, f1, f2 = first.tuple
        a2, b2, c2, d2, g0, g1, g2 = self.tuple
        a = a2 * a1 + b2 * c1
        b = a2 * b1 + b2 * d1
        c = c2 * a1 + d2 * c1
        d = c2 * b1 + d2 * d1
        e2 = g2 * f2
        e1 = g2 * f1 + g1 * a1 + g0 * c1
        e0 = g2 * f0 + g1 * b1 + g0 * d1
        return MobiusEquivalence(a, b, c, d, e0, e1, e2)

    def inverse(self):
        a, b, c, d, e0, e1, e2 = self.tuple
        # matrix inverse up to scale: compose gives Delta * I, so the whole
        # inverse tuple carries the common multiplier Delta
        delta = self.delta
        ai, bi, ci, di = d, -b, -c, a
        e2i = delta / e2
        rhs = np.array([-e1 * e2i, -e0 * e2i])
        M = np.array([[a, c], [b, d]])
        e1i, e0i = np.linalg.solve(M, rhs)
        return MobiusEquivalence(ai, bi, ci, di, float(e0i), float(e1i), e2i)

    def __repr__(self):
        return f"MobiusEquivalence{self.tuple}"


# ---------------------------------------------------------------------------
# Reducibility to constant coefficients


@dataclass
class ReducibilityReport:
    reducible: bool
    c1: float = float("nan")
    c2: float = float("nan")
    residual: float = float("nan")  # normalized max |d^2 g / dS^2|
    mu: float = float("nan")
    note: str = ""


def is_reducible_to_constant(eq, tol=1e-6, samples=48):
    """Test whether (alpha, beta) is point-equivalent to constant dispersion.

    The signed cube root g of beta * exp(A) must be affine in S = int(exp(-A)):
    the statistic is max |d^2 g / dS^2| * (S-range)^2 / max |g|, with the
    S-derivative realized as exp(A) * d/dt (exact first derivatives, one
    finite difference for the outermost).
    """
    ts = eq.sample_points(max(samples, 32))
    A = eq.damping_integral()
    S = eq.time_stretch()
    alpha, beta = eq.alpha, eq.beta

    bvals = beta(ts)
    if np.max(bvals) > 0 and np.min(bvals) < 0:
        return ReducibilityReport(False, note="beta changes sign on the interval")

    h = bvals * np.exp(A(ts))
    g = _odd_cbrt(h)
    Svals = S(ts)

    def g_t(t):
        hv = beta(t) * np.exp(A(t))
        ht = np.exp(A(t)) * (beta.deriv(t) + alpha(t) * beta(t))
        return (1.0 / 3.0) * np.abs(hv) ** (-2.0 / 3.0) * ht

    def w(t):  # dg/dS = exp(A) * g_t
        return np.exp(A(t)) * g_t(t)

    span = eq.t_hi - eq.t_lo
    delta = 1e-3 * span
    inner = ts[(ts > eq.t_lo + 2 * delta) & (ts < eq.t_hi - 2 * delta)]
    d2g = np.array([
        np.exp(A(t)) * (-w(t + 2 * delta) + 8 * w(t + delta)
                        - 8 * w(t - delta) + w(t - 2 * delta)) / (12 * delta)
        for t in inner
    ])
    S_range = float(Svals.max() - Svals.min())
    g_scale = float(np.max(np.abs(g)))
    stat = float(np.max(np.abs(d2g))) * S_range**2 / g_scale

    if stat > tol:
        return ReducibilityReport(False, residual=stat)

    M = np.column_stack([Svals, np.ones_like(Svals)])
    (c1, c2), *_ = np.linalg.lstsq(M, g, rcond=None)
    c1, c2 = float(c1), float(c2)
    if abs(c1) * S_range <= 1e-12 * max(abs(c2), 1e-300):
        mu = c2**3
    else:
        mu = 1.0
    return ReducibilityReport(True, c1=c1, c2=c2, residual=stat, mu=mu)


@dataclass
class TransformChain:
    """Ordered transforms; apply_* folds them left to right."""

    steps: list = field(default_factory=list)

    def apply_to_coefficients(self, eq):
        for step_ in self.steps:
            eq = step_.apply_to_coefficients(eq) if isinstance(step_, MobiusEquivalence) \
                else step_.apply_to_coefficients()
        return eq

    def apply_to_points(self, t, x, u):
        for step_ in self.steps:
            t, x, u = step_.apply_to_points(t, x, u)
        return t, x, u

    def apply_to_field_fn(self, ufn):
        for step_ in self.steps:
            ufn = step_.apply_to_field_fn(ufn)
        return ufn

    def describe(self):
        out = []
        for step_ in self.steps:
            if isinstance(step_, MobiusEquivalence):
                out.append({"kind": "mobius", "tuple": list(step_.tuple)})
            else:
                out.append({"kind": "quadrature", "T": step_.T.name,
                            "d": [step_.d1, step_.d2, step_.d3, step_.d4]})
        return out


def map_to_constant(eq, tol=1e-6):
    """Explicit chain (gauge, then a Mobius element) onto constant dispersion mu.

    Verified by pushing the coefficients through the chain: max|beta~ - mu|
    and max|alpha~| below tol on the image interval.
    """
    report = is_reducible_to_constant(eq, tol=tol)
    if not report.reducible:
        raise ValueError(f"not reducible to constant coefficients: {report.note or report.residual}")
    _, g1 = gauge_to_alpha_zero(eq)
    c1, c2 = report.c1, report.c2
    S_range = eq.time_stretch()(eq.t_hi) - eq.time_stretch()(eq.t_lo)
    if abs(c1) * S_range <= 1e-9 * max(abs(c2), 1e-300):
        mobius = MobiusEquivalence.identity()
        mu = c2**3
    else:
        nrm = c1 * c1 + c2 * c2
        mobius = MobiusEquivalence(c2 / nrm, -c1 / nrm, c1, c2)
        mu = 1.0
    chain = TransformChain([g1, mobius])
    image = chain.apply_to_coefficients(eq)
    ts = image.sample_points(32)
    beta_err = float(np.max(np.abs(image.beta(ts) - mu)))
    alpha_err = float(np.max(np.abs(image.alpha(ts))))
    if beta_err > max(tol, 10 * report.residual) * max(1.0, abs(mu)) or alpha_err > tol:
        raise RuntimeError(
            f"chain verification failed: |beta-mu| = {beta_err:.3e}, |alpha| = {alpha_err:.3e}")
    return chain, mu
