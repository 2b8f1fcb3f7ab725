"""Lie symmetry classification for u_t + u u_x + beta(t) u_xxxxx = 0.

Every point symmetry of the gauged class has the six-constant structured form

    Q = (c2 t^2 + c1 t + c0) d/dt + ((c2 t + c3) x + c4 t + c5) d/dx
        + ((c3 - c1 - c2 t) u + c2 x + c4) d/du,

and the constants are tied to the dispersion coefficient by one residual
classifying equation  (c2 t^2 + c1 t + c0) beta_t = (3 c2 t - c1 + 5 c3) beta.
Sampling it at Chebyshev nodes turns classification into a numerical
null-space problem; the quadratic c2 t^2 + c1 t + c0 of a one-dimensional
null direction then discriminates the extension families (power /
exponential / arctan) through its root configuration.

Generators for equations with nonzero damping are obtained by conjugating
the gauged basis with the damping gauge (`ungauged_basis`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equivalence import gauge_to_alpha_zero
from .exprcalc import chebyshev_nodes
from .pdesolve import Field, Grid1D, fornberg_weights, spectral_derivative


class InconclusiveRankError(RuntimeError):
    """Null-space dimension fell in the dead zone between the rank thresholds."""

    def __init__(self, candidates, gap):
        super().__init__(
            f"classification inconclusive: null-space dimension could be "
            f"{candidates[0]} or {candidates[1]} (singular-value gap {gap:.3e})")
        self.candidates = candidates
        self.gap = gap


@dataclass(frozen=True)
class Generator:
    """Structured symmetry generator; constants (c0..c5) as in the module docstring."""

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0
    c5: float = 0.0

    def tau(self, t):
        return self.c2 * t * t + self.c1 * t + self.c0

    def xi(self, t, x):
        return (self.c2 * t + self.c3) * x + self.c4 * t + self.c5

    def eta(self, t, x, u):
        return (self.c3 - self.c1 - self.c2 * t) * u + self.c2 * x + self.c4

    @property
    def coeffs(self):
        return np.array([self.c0, self.c1, self.c2, self.c3, self.c4, self.c5])

    @classmethod
    def from_coeffs(cls, c):
        return cls(*(float(v) for v in c))

    def describe(self):
        def poly(pairs):
            terms = []
            for coef, sym in pairs:
                if abs(coef) < 1e-14:
                    continue
                if sym == "":
                    terms.append(f"{coef:g}")
                elif coef == 1.0:
                    terms.append(sym)
                elif coef == -1.0:
                    terms.append(f"-{sym}")
                else:
                    terms.append(f"{coef:g}*{sym}")
            return " + ".join(terms).replace("+ -", "- ") or "0"

        tau = poly([(self.c2, "t^2"), (self.c1, "t"), (self.c0, "")])
        xi = poly([(self.c2, "t*x"), (self.c3, "x"), (self.c4, "t"), (self.c5, "")])
        eta = poly([(self.c3 - self.c1, "u"), (-self.c2, "t*u"), (self.c2, "x"), (self.c4, "")])
        parts = []
        if tau != "0":
            parts.append(f"({tau}) d/dt")
        if xi != "0":
            parts.append(f"({xi}) d/dx")
        if eta != "0":
            parts.append(f"({eta}) d/du")
        return " + ".join(parts) if parts else "0"


def kernel_algebra():
    """The two symmetries admitted by every member: x-translation, Galilean boost."""
    return [Generator(c5=1.0), Generator(c4=1.0)]


# ---------------------------------------------------------------------------
# Null space of the sampled classifying equation


def classifying_matrix(beta, ts):
    ts = np.asarray(ts, dtype=float)
    b = beta(ts)
    bt = beta.deriv(ts)
    rows = np.column_stack([bt, ts * bt + b, ts**2 * bt - 3 * ts * b, -5 * b])
    norms = np.linalg.norm(rows, axis=1)
    if np.all(norms == 0.0):
        raise ValueError("beta vanishes identically; not a class member")
    return rows / norms[:, None]


def classifying_nullspace(beta, samples=64, low=1e-8, high=1e-4):
    """Null directions (c0, c1, c2, c3) of the sampled classifying equation.

    Rank policy: dimension k is accepted when the k smallest singular values
    are below low*sigma_max and the next one is above high*sigma_max; the
    dead zone in between raises InconclusiveRankError.
    """
    if samples < 8:
        raise ValueError("need at least 8 samples")
    ts = chebyshev_nodes(beta.t_lo, beta.t_hi, samples)
    M = classifying_matrix(beta, ts)
    _, sv, Vh = np.linalg.svd(M)
    rel = sv / sv[0]
    n_zero = int(np.sum(rel <= low))
    n_below_bar = int(np.sum(rel < high))
    if n_below_bar != n_zero:
        raise InconclusiveRankError((n_zero, n_below_bar), float(rel[4 - n_below_bar]))
    k = n_zero
    basis = Vh[4 - k:] if k > 0 else np.zeros((0, 4))
    residual = 0.0 if k == 0 else float(np.max(np.abs(M @ basis.T)))
    return basis, residual


# ---------------------------------------------------------------------------
# Classification


@dataclass
class ClassificationResult:
    extension_dim: int
    case_tag: str  # generic | power | exponential | arctan | constant
    rho: float | None = None
    nu: float | None = None
    lam: float | None = None
    basis: list = field(default_factory=list)  # kernel pair first
    nullspace_residual: float = 0.0

    @property
    def case_index(self):
        return CASE_INDEX[self.case_tag]


CASE_INDEX = {"generic": 0, "power": 1, "exponential": 2, "arctan": 3, "constant": 4}


def _rref(rows, tol=1e-12):
    R = np.array(rows, dtype=float)
    lead = 0
    for r in range(R.shape[0]):
        piv = None
        while lead < R.shape[1]:
            col = np.abs(R[r:, lead])
            if col.max() > tol:
                piv = r + int(np.argmax(col))
                break
            lead += 1
        if piv is None:
            break
        R[[r, piv]] = R[[piv, r]]
        R[r] /= R[r, lead]
        for i in range(R.shape[0]):
            if i != r:
                R[i] -= R[i, lead] * R[r]
        lead += 1
    return R


def _canonical_scale(v):
    """Scale a null direction to match the tabulated generator conventions."""
    c0, c1, c2, c3 = v
    scale = np.max(np.abs(v))
    if abs(c2) > 1e-10 * scale:
        return v / c2  # quadratic families: leading coefficient one
    if abs(c1) > 1e-10 * scale:
        return v * (5.0 / c1)  # power family: tau = 5 t + ...
    if abs(c3) > 1e-10 * scale:
        return v / c3  # exponential family: c3 = 1
    return v / c0


def _quadratic_case(v, beta, tol_rel=1e-8):
    """Discriminate the extension family from the null direction's quadratic."""
    c0, c1, c2, c3 = v
    m = float(0.5 * (beta.t_lo + beta.t_hi))
    scale = np.max(np.abs([c0, c1, c2]))
    lam = None
    if abs(c2) <= 1e-9 * np.max(np.abs(v)):
        if abs(c1) <= 1e-9 * np.max(np.abs(v)):
            # constant tau: beta = lam * e^{k t}, k = 5 c3 / c0
            k = 5.0 * c3 / c0
            lam = float(beta(m)) / np.exp(k * m)
            return "exponential", None, None, lam
        rho = 5.0 * c3 / c1 - 1.0
        t0 = -c0 / c1
        lam = float(beta(m)) / abs(m - t0) ** rho
        return "power", float(rho), None, float(lam)
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc > tol_rel * scale * scale:
        sq = np.sqrt(disc)
        r1 = (-c1 + sq) / (2 * c2)
        r2 = (-c1 - sq) / (2 * c2)
        p = (3 * c2 * r1 - c1 + 5 * c3) / (c2 * (r1 - r2))
        rho = min(p, 3.0 - p)  # root swap: the exponent pair is (rho, 3 - rho)
        q = 3.0 - p
        lam = float(beta(m)) / (abs(m - r1) ** p * abs(m - r2) ** q)
        return "power", float(rho), None, float(lam)
    if disc >= -tol_rel * scale * scale:
        r = -c1 / (2 * c2)
        kappa = (3 * c2 * r - c1 + 5 * c3) / c2
        lam = float(beta(m)) / (abs(m - r) ** 3 * np.exp(-kappa / (m - r)))
        return "exponential", None, None, float(lam)
    mc = -c1 / (2 * c2)
    w = np.sqrt(-disc) / (2 * abs(c2))
    nu_signed = (3 * c2 * mc - c1 + 5 * c3) / (5 * c2 * w)
    profile = ((m - mc) ** 2 + w * w) ** 1.5 * np.exp(5 * nu_signed * np.arctan((m - mc) / w))
    lam = float(beta(m)) / profile
    return "arctan", None, float(abs(nu_signed)), float(lam)


def classify(beta, samples=64):
    """Symmetry-extension classification of a gauged dispersion coefficient."""
    basis_vecs, residual = classifying_nullspace(beta, samples=samples)
    dim = basis_vecs.shape[0]
    kern = kernel_algebra()
    m = float(0.5 * (beta.t_lo + beta.t_hi))

    if dim == 0:
        return ClassificationResult(0, "generic", basis=kern, nullspace_residual=residual)
    if dim == 1:
        v = _canonical_scale(basis_vecs[0])
        case, rho, nu, lam = _quadratic_case(v, beta)
        gen = Generator(c0=v[0], c1=v[1], c2=v[2], c3=v[3])
        return ClassificationResult(1, case, rho=rho, nu=nu, lam=lam,
                                    basis=kern + [gen], nullspace_residual=residual)
    if dim == 2:
        rows = _rref(basis_vecs)
        gens = [Generator.from_coeffs(list(_canonical_scale(r)) + [0.0, 0.0]) for r in rows]
        lam = float(beta(m))
        return ClassificationResult(2, "constant", lam=lam, basis=kern + gens,
                                    nullspace_residual=residual)
    raise InconclusiveRankError((2, dim), residual)


# ---------------------------------------------------------------------------
# Determining system residuals for structured generators

DETERMINING_EQUATIONS = (
    "classifying",      # tau beta_t - (5 xi_x - tau_t) beta
    "eta1_x-2xi_xx",
    "eta1_xx-xi_xxx",
    "2eta1_xxx-xi_xxxx",
    "u^2-coefficient",  # eta1_x
    "u-coefficient",    # eta0_x + eta1_t + eta1_xxxxx beta
    "u^0-coefficient",  # eta0_t + eta0_xxxxx beta
    "tau_t-xi_x+eta1",
    "xi_t-eta0",        # (5 eta1_xxxx - xi_xxxxx) beta - xi_t + eta0
)


def determining_residuals(Q, beta, samples=33):
    """Max absolute residual of every determining equation at sample points.

    For the structured generator all equations except the classifying one are
    algebraic identities in the constants; they are still evaluated literally.
    """
    ts = chebyshev_nodes(beta.t_lo, beta.t_hi, samples)
    xs = np.linspace(-1.0, 1.0, 5)
    b = beta(ts)
    bt = beta.deriv(ts)
    c0, c1, c2, c3, c4, c5 = Q.coeffs

    tau = Q.tau(ts)
    tau_t = 2 * c2 * ts + c1
    xi_x = c2 * ts + c3
    eta1 = c3 - c1 - c2 * ts
    eta1_t = -c2 * np.ones_like(ts)
    eta0_x = c2 * np.ones_like(ts)

    res = {
        "classifying": np.max(np.abs(tau * bt - (5 * xi_x - tau_t) * b)),
        "eta1_x-2xi_xx": 0.0,
        "eta1_xx-xi_xxx": 0.0,
        "2eta1_xxx-xi_xxxx": 0.0,
        "u^2-coefficient": 0.0,
        "u-coefficient": np.max(np.abs(eta0_x + eta1_t)),
        "u^0-coefficient": 0.0,
        "tau_t-xi_x+eta1": np.max(np.abs(tau_t - xi_x + eta1)),
        "xi_t-eta0": max(
            np.max(np.abs(-(c2 * x + c4) + (c2 * x + c4))) for x in xs),
    }
    return {k: float(v) for k, v in res.items()}


# ---------------------------------------------------------------------------
# Flow verification on solved fields


def _series_residual(fields, eq, t_mid_index=None):
    """PDE residual from snapshots sharing a grid, arbitrary time stamps."""
    grid = fields[0].grid
    if any(f.grid != grid for f in fields):
        raise ValueError("snapshots must share one grid")
    mid = t_mid_index if t_mid_index is not None else len(fields) // 2
    ts = np.array([f.t for f in fields])
    wt = fornberg_weights(ts, ts[mid], 1)
    u_t = sum(w * f.values for w, f in zip(wt, fields))
    u = fields[mid].values
    u_x = spectral_derivative(u, grid.L, 1)
    u_5 = spectral_derivative(u, grid.L, 5)
    t_mid = ts[mid]
    res = u_t + u * u_x + float(eq.alpha(t_mid)) * u + float(eq.beta(t_mid)) * u_5
    return float(np.max(np.abs(res)))


def verify_invariance_by_flow(Q, eq, fields, epsilon):
    """Residual after a first-order characteristic push of the sampled series.

    Each sample point moves by one explicit Euler step of the characteristic
    system (dt, dx, du)/ds = (tau, xi, eta); for a true symmetry the pushed
    field fails to solve the equation only at second order, so the residual
    obeys  residual <= C * (r0 + epsilon^2)  and epsilon = 0 returns r0.

    Requires c2 = 0 (otherwise the pushed field gains a non-periodic x-ramp
    and sampled periodic data cannot represent it).
    """
    if Q.c2 != 0.0:
        raise ValueError("sampled-series flow verification requires c2 = 0")
    if len(fields) < 3:
        raise ValueError("need at least three snapshots")
    if epsilon == 0.0:
        return _series_residual(fields, eq)

    scale = 1.0 + epsilon * Q.c3
    if scale <= 0.0:
        raise ValueError("flow step too large: x-scale factor is not positive")
    out = []
    for f in fields:
        t = f.t
        t_new = t + epsilon * float(Q.tau(t))
        offset = epsilon * (Q.c4 * t + Q.c5)
        vals = f.values + epsilon * Q.eta(t, f.grid.x, f.values)
        grid_new = Grid1D(L=scale * f.grid.L, N=f.grid.N)
        shift = np.exp(-1j * grid_new.k * offset)
        vals = np.fft.irfft(np.fft.rfft(vals) * shift, n=f.grid.N)
        out.append(Field(t=t_new, values=vals, grid=grid_new))
    return _series_residual(out, eq)


def verify_invariance_by_flow_fn(Q, eq, ufn, ts, xs, epsilon, dt=1e-3, dx=0.05):
    """Closed-form variant: push a callable field and return its windowed residual.

    The pushed field is evaluated through the first-order inverse of the
    characteristic step, so the epsilon^2 contract matches the sampled path.
    """
    from .pdesolve import callable_residual

    def pushed(t_img, x_img):
        t = t_img - epsilon * Q.tau(t_img)
        x = x_img - epsilon * Q.xi(t_img, x_img)
        u = np.asarray(ufn(t, x))
        return u + epsilon * Q.eta(t, x, u)

    return callable_residual(pushed, eq, ts=ts, xs=xs, dt=dt, dx=dx)


# ---------------------------------------------------------------------------
# Generators for the damped class by gauge conjugation


@dataclass
class GeneralGenerator:
    """Vector field with free-form components (damped-class generators)."""

    tau: object  # callable t -> float
    xi: object   # callable (t, x) -> float
    eta: object  # callable (t, x, u) -> float
    label: str = ""


def ungauged_basis(eq, result=None, samples=64):
    """Symmetry basis of a damped equation, by conjugating the gauged basis.

    A gauged generator (tau^, xi^, eta^) in variables (t^, x, u^) with
    t^ = S(t), u^ = exp(A) u pulls back to
        tau = exp(A) tau^(S),  xi = xi^(S, x),
        eta = exp(-A) eta^(S, x, exp(A) u) - alpha exp(A) tau^(S) u.
    """
    gauged, _ = gauge_to_alpha_zero(eq)
    if result is None:
        result = classify(gauged.beta, samples=samples)
    A = eq.damping_integral()
    S = eq.time_stretch()
    alpha = eq.alpha

    out = []
    for idx, Qh in enumerate(result.basis):
        def tau(t, Qh=Qh):
            return np.exp(A(t)) * Qh.tau(S(t))

        def xi(t, x, Qh=Qh):
            return Qh.xi(S(t), x)

        def eta(t, x, u, Qh=Qh):
            eA = np.exp(A(t))
            return Qh.eta(S(t), x, eA * u) / eA - alpha(t) * eA * Qh.tau(S(t)) * u

        label = "kernel" if idx < 2 else f"extension-{idx - 1}"
        out.append(GeneralGenerator(tau=tau, xi=xi, eta=eta, label=label))
    return out


def determining_residuals_ungauged(Q, eq, samples=17):
    """Determining residuals of a free-form generator against (alpha, beta).

    Pushes the generator through the damping gauge; a symmetry of the damped
    equation must land on the six-constant structured form for the gauged
    one, so the residuals are structure-fit errors plus the classifying
    residual of the fitted constants.
    """
    gauged, g = gauge_to_alpha_zero(eq)
    A = eq.damping_integral()
    S = eq.time_stretch()
    Sinv = g.Tinv()
    alpha = eq.alpha

    def tau_hat(s):
        t = Sinv(s)
        return np.exp(-A(t)) * Q.tau(t)

    def xi_hat(s, x):
        return Q.xi(Sinv(s), x)

    def eta_hat(s, x, uh):
        t = Sinv(s)
        eA = np.exp(A(t))
        u = uh / eA
        return eA * Q.eta(t, x, u) + alpha(t) * Q.tau(t) * uh

    ss = chebyshev_nodes(gauged.t_lo, gauged.t_hi, samples)
    xs = np.linspace(-1.0, 1.0, 5)
    us = np.array([-1.0, 0.3, 1.0])

    # tau^ must be quadratic in the gauged time
    tau_vals = np.array([tau_hat(s) for s in ss])
    Vt = np.column_stack([np.ones_like(ss), ss, ss**2])
    coef_t, *_ = np.linalg.lstsq(Vt, tau_vals, rcond=None)
    c0, c1, c2 = coef_t
    res_tau = float(np.max(np.abs(Vt @ coef_t - tau_vals)))

    # xi^ must be (c2 t + c3) x + c4 t + c5 with the same c2
    rows, vals = [], []
    for s in ss:
        for x in xs:
            rows.append([s * x, x, s, 1.0])
            vals.append(xi_hat(s, x))
    rows = np.array(rows)
    vals = np.array(vals)
    coef_x, *_ = np.linalg.lstsq(rows, vals, rcond=None)
    c2x, c3, c4, c5 = coef_x
    res_xi = float(np.max(np.abs(rows @ coef_x - vals)))
    res_c2 = float(abs(c2x - c2))

    # eta^ must be (c3 - c1 - c2 t) u + c2 x + c4
    res_eta = 0.0
    for s in ss[:: max(1, len(ss) // 7)]:
        for x in xs:
            for u in us:
                pred = (c3 - c1 - c2 * s) * u + c2 * x + c4
                res_eta = max(res_eta, abs(eta_hat(s, x, u) - pred))

    Qfit = Generator(c0=c0, c1=c1, c2=c2, c3=c3, c4=c4, c5=c5)
    res_cls = determining_residuals(Qfit, gauged.beta, samples=max(17, samples))["classifying"]

    return {
        "tau-structure": res_tau,
        "xi-structure": res_xi,
        "tau-xi-consistency": res_c2,
        "eta-structure": float(res_eta),
        "classifying": res_cls,
    }
