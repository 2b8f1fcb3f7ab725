import numpy as np
import pytest

from fkdv.equivalence import EquationSpec, gauge_to_alpha_zero
from fkdv.exprcalc import SmoothFn
from fkdv.pdesolve import Field, Grid1D, SolverConfig, solve
from fkdv.symmetry import (
    GeneralGenerator,
    Generator,
    InconclusiveRankError,
    classify,
    classifying_nullspace,
    determining_residuals,
    determining_residuals_ungauged,
    kernel_algebra,
    ungauged_basis,
    verify_invariance_by_flow,
    verify_invariance_by_flow_fn,
)


def beta_fn(text, interval=(0.5, 5.0), t_ref=None):
    return SmoothFn.from_text(text, interval=interval, t_ref=t_ref)


def same_ray(v, w, tol=1e-8):
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    v = v / np.linalg.norm(v)
    w = w / np.linalg.norm(w)
    return min(np.linalg.norm(v - w), np.linalg.norm(v + w)) < tol


def same_span(B1, B2, tol=1e-8):
    # equal column spaces via projector comparison
    def proj(B):
        Q, _ = np.linalg.qr(np.asarray(B, dtype=float).T)
        return Q @ Q.T

    return np.max(np.abs(proj(B1) - proj(B2))) < tol


class TestKernel:
    def test_kernel_pair(self):
        k1, k2 = kernel_algebra()
        assert k1.coeffs.tolist() == [0, 0, 0, 0, 0, 1]
        assert k2.coeffs.tolist() == [0, 0, 0, 0, 1, 0]
        # x-translation: xi = 1; Galilean boost: xi = t, eta = 1
        assert k1.xi(2.0, 0.3) == 1.0 and k1.eta(2.0, 0.3, 0.1) == 0.0
        assert k2.xi(2.0, 0.3) == 2.0 and k2.eta(2.0, 0.3, 0.1) == 1.0

    def test_kernel_annihilates_classifying_equation(self):
        for beta_text in ["1", "t^2", "exp(t)"]:
            for Q in kernel_algebra():
                res = determining_residuals(Q, beta_fn(beta_text))
                assert all(v == 0.0 for v in res.values())


class TestNullspace:
    def test_constant_beta_dim2(self):
        basis, resid = classifying_nullspace(beta_fn("1"))
        assert basis.shape[0] == 2
        assert resid < 1e-12
        assert same_span(basis, [[1, 0, 0, 0], [0, 5, 0, 1]])

    def test_power_dim1(self):
        basis, _ = classifying_nullspace(beta_fn("t^2"))
        assert basis.shape[0] == 1
        assert same_ray(basis[0], [0, 5, 0, 3])  # (0, 5, 0, rho + 1)

    def test_exponential_dim1(self):
        basis, _ = classifying_nullspace(beta_fn("exp(t)"))
        assert basis.shape[0] == 1
        assert same_ray(basis[0], [5, 0, 0, 1])

    def test_generic_dim0(self):
        for text in ["exp(t)+t", "t^2+1"]:
            basis, _ = classifying_nullspace(beta_fn(text))
            assert basis.shape[0] == 0

    def test_requires_enough_samples(self):
        with pytest.raises(ValueError):
            classifying_nullspace(beta_fn("1"), samples=4)


class TestClassify:
    def test_power_three_halves(self):
        r = classify(beta_fn("t^1.5"))
        assert r.case_tag == "power" and r.extension_dim == 1
        assert r.rho == pytest.approx(1.5, abs=1e-9)
        ext = r.basis[2]
        assert same_ray(ext.coeffs[:4], [0, 5, 0, 2.5])
        assert ext.coeffs[1] == pytest.approx(5.0)

    @pytest.mark.parametrize("rho", [-3.0, -1.0, 0.5, 1.5])
    def test_power_parameter_recovery(self, rho):
        r = classify(beta_fn(f"t^({rho!r})"))
        assert r.case_tag == "power"
        assert r.rho == pytest.approx(rho, abs=1e-6)
        assert r.lam == pytest.approx(1.0, rel=1e-7)

    def test_exponential(self):
        r = classify(beta_fn("exp(t)"))
        assert r.case_tag == "exponential" and r.extension_dim == 1
        assert same_ray(r.basis[2].coeffs[:4], [5, 0, 0, 1])
        assert r.lam == pytest.approx(1.0, rel=1e-7)

    @pytest.mark.parametrize("nu", [0.0, 0.3, 1.0])
    def test_arctan_parameter_recovery(self, nu):
        r = classify(beta_fn(f"(t^2+1)^1.5*exp(5*{nu!r}*atan(t))"))
        assert r.case_tag == "arctan"
        assert r.nu == pytest.approx(nu, abs=1e-6)
        ext = r.basis[2]
        want = Generator(c0=1.0, c2=1.0, c3=nu)
        assert np.allclose(ext.coeffs, want.coeffs, atol=1e-7)

    def test_constant(self):
        r = classify(beta_fn("7"))
        assert r.case_tag == "constant" and r.extension_dim == 2
        assert r.lam == pytest.approx(7.0)
        coeff_rows = [g.coeffs[:4] for g in r.basis[2:]]
        assert same_span(coeff_rows, [[1, 0, 0, 0], [0, 5, 0, 1]])

    def test_generic(self):
        r = classify(beta_fn("exp(t)+t"))
        assert r.case_tag == "generic" and r.extension_dim == 0
        assert len(r.basis) == 2

    def test_shifted_cubic_is_constant_case(self):
        # (t+1)^3 is point-equivalent to constant dispersion: two extensions
        r = classify(beta_fn("(t+1)^3"))
        assert r.extension_dim == 2 and r.case_tag == "constant"

    def test_mobius_power_case(self):
        # beta = (t+2)(t+5)^2 has tau with distinct roots: power family,
        # exponents (1, 2), normalized representative rho = 1
        r = classify(beta_fn("(t+2)*(t+5)^2"))
        assert r.case_tag == "power"
        assert r.rho == pytest.approx(1.0, abs=1e-7)

    def test_double_root_is_exponential(self):
        # beta = (t+1)^3 exp(1/(t+1)): tau = (t+1)^2 double root
        r = classify(beta_fn("(t+1)^3*exp(1/(t+1))"))
        assert r.case_tag == "exponential" and r.extension_dim == 1

    def test_inconclusive_raises(self):
        # perturbation sized inside the dead zone between the rank thresholds
        with pytest.raises(InconclusiveRankError):
            classify(beta_fn("t^2*(1+0.000001*sin(t))"))


class TestDeterminingResiduals:
    def test_table_case2_on_exponential(self):
        Q = Generator(c0=5.0, c3=1.0)
        res = determining_residuals(Q, beta_fn("exp(t)"))
        assert res["classifying"] < 1e-10
        assert all(v < 1e-12 for k, v in res.items() if k != "classifying")

    def test_table_case2_on_power_fails(self):
        Q = Generator(c0=5.0, c3=1.0)
        res = determining_residuals(Q, beta_fn("t^2"))
        assert res["classifying"] > 1e-2

    def test_tabulated_bases_all_rows(self):
        cases = [
            ("t^1.5", Generator(c1=5.0, c3=2.5)),
            ("t^-1", Generator(c1=5.0, c3=0.0)),
            ("exp(t)", Generator(c0=5.0, c3=1.0)),
            ("(t^2+1)^1.5*exp(1.5*atan(t))", Generator(c0=1.0, c2=1.0, c3=0.3)),
            ("1", Generator(c0=1.0)),
            ("1", Generator(c1=5.0, c3=1.0)),
        ]
        for text, Q in cases:
            res = determining_residuals(Q, beta_fn(text), samples=32)
            assert res["classifying"] < 1e-9, (text, res)


class TestFlowVerification:
    @staticmethod
    def solved_series(beta_text="1", n_snap=5, dt=2e-3, amp=0.1):
        eq = EquationSpec.from_text("0", beta_text, interval=(0.0, 10.0), t_ref=0.0)
        g = Grid1D(L=2 * np.pi, N=64)
        u0 = Field(t=1.0, values=amp * np.sin(g.x) + 0.3 * amp * np.cos(2 * g.x), grid=g)
        fields, _ = solve(u0, eq, SolverConfig(dt=dt, t_end=1.0 + (n_snap - 1) * dt))
        return eq, fields

    def test_epsilon_zero_returns_r0(self):
        eq, fields = self.solved_series()
        Q = Generator(c0=1.0)  # time translation, a symmetry of constant dispersion
        r0 = verify_invariance_by_flow(Q, eq, fields, 0.0)
        assert r0 > 0
        assert verify_invariance_by_flow(Q, eq, fields, 0.0) == r0

    def test_time_translation_keeps_residual(self):
        eq, fields = self.solved_series()
        Q = Generator(c0=1.0)
        r0 = verify_invariance_by_flow(Q, eq, fields, 0.0)
        r = verify_invariance_by_flow(Q, eq, fields, 0.01)
        assert r <= 2.0 * r0 + 1e-12

    def test_epsilon_squared_excess(self):
        eq, fields = self.solved_series(beta_text="exp(t)")
        Q = Generator(c0=5.0, c3=1.0)  # the exponential-case extension
        r0 = verify_invariance_by_flow(Q, eq, fields, 0.0)
        eps = np.array([0.02, 0.04, 0.08])
        excess = np.array([verify_invariance_by_flow(Q, eq, fields, e) - r0 for e in eps])
        assert np.all(excess > 0)
        slope = np.polyfit(np.log(eps), np.log(excess), 1)[0]
        assert abs(slope - 2.0) < 0.3, (slope, excess)

    def test_non_symmetry_gives_first_order_excess(self):
        eq, fields = self.solved_series(beta_text="1")
        Q = Generator(c0=5.0, c3=1.0)  # exponential-case generator on wrong equation
        r0 = verify_invariance_by_flow(Q, eq, fields, 0.0)
        eps = np.array([0.02, 0.04, 0.08])
        excess = np.array([verify_invariance_by_flow(Q, eq, fields, e) - r0 for e in eps])
        slope = np.polyfit(np.log(eps), np.log(excess), 1)[0]
        assert abs(slope - 1.0) < 0.3

    def test_galilean_on_rational_solution(self):
        eq = EquationSpec.from_text("0", "1", interval=(0.5, 5.0))
        Q = Generator(c4=1.0)  # Galilean boost

        def u(t, x):
            return (x + 0.5) / (t + 1.0)

        r = verify_invariance_by_flow_fn(Q, eq, u, ts=[1.5, 2.0], xs=np.linspace(-1, 1, 5),
                                         epsilon=0.01, dt=5e-3, dx=0.4)
        assert r < 1e-6

    def test_c2_rejected_for_sampled_series(self):
        eq, fields = self.solved_series()
        with pytest.raises(ValueError):
            verify_invariance_by_flow(Generator(c2=1.0), eq, fields, 0.01)


class TestUngaugedBasis:
    def test_alpha_zero_reproduces_structured_basis(self):
        eq = EquationSpec.from_text("0", "exp(t)", interval=(0.5, 3.0), t_ref=0.0)
        gens = ungauged_basis(eq)
        gauged, _ = gauge_to_alpha_zero(eq)
        ref = classify(gauged.beta).basis
        ts = np.linspace(0.6, 2.9, 5)
        for g, q in zip(gens, ref):
            for t in ts:
                assert g.tau(t) == pytest.approx(q.tau(t), abs=1e-9)
                assert g.xi(t, 0.7) == pytest.approx(q.xi(t, 0.7), abs=1e-9)
                assert g.eta(t, 0.7, -0.2) == pytest.approx(q.eta(t, 0.7, -0.2), abs=1e-9)

    def test_case_4a_operator_any_alpha(self):
        # beta = lam * S_t = lam * exp(-A): first extension is (1/S_t)(d/dt - alpha u d/du)
        lam = 2.0
        eq = EquationSpec.from_text("0.4*t", f"{lam!r}*exp(-0.2*t^2)",
                                    interval=(0.0, 2.0), t_ref=0.0)
        gens = ungauged_basis(eq)
        assert len(gens) == 4
        ext1 = gens[2]
        A = eq.damping_integral()
        ts = np.linspace(0.1, 1.9, 6)
        for t in ts:
            eA = np.exp(A(t))
            assert ext1.tau(t) == pytest.approx(eA, rel=1e-9)
            assert ext1.xi(t, 0.8) == pytest.approx(0.0, abs=1e-10)
            assert ext1.eta(t, 0.8, 0.6) == pytest.approx(-eq.alpha(t) * eA * 0.6, rel=1e-8)
        res = determining_residuals_ungauged(ext1, eq)
        assert max(res.values()) < 1e-7, res

    def test_case1_matches_closed_form(self):
        # alpha = k const, T = (1 - e^{-kt})/k; dispersion of the power family
        k, lam, rho = 1.0, 0.7, 0.5
        a, b, c, d = 1.0, 0.3, 0.2, 1.0
        T_text = "(1-exp(-t))"
        beta_text = (f"{lam!r}*exp(-t)*({a!r}*{T_text}+{b!r})^({rho!r})"
                     f"*({c!r}*{T_text}+{d!r})^({3 - rho!r})")
        eq = EquationSpec.from_text(format(k, "g"), beta_text, interval=(0.0, 2.0), t_ref=0.0)
        gens = ungauged_basis(eq)
        assert len(gens) == 3
        ext = gens[2]

        def Tfun(t):
            return (1 - np.exp(-k * t)) / k

        def Tt(t):
            return np.exp(-k * t)

        def tau_ref(t):
            return 5.0 / Tt(t) * (a * Tfun(t) + b) * (c * Tfun(t) + d)

        def xi_ref(t, x):
            return (5 * a * c * Tfun(t) + a * d * (rho + 1) + b * c * (4 - rho)) * x

        def eta_ref(t, x, u):
            return 5 * a * c * x * Tt(t) - (
                5 * a * c * Tfun(t) + 5 * k / Tt(t) * (a * Tfun(t) + b) * (c * Tfun(t) + d)
                + b * c * (rho + 1) + a * d * (4 - rho)) * u

        ts = np.linspace(0.2, 1.8, 5)
        scale = ext.tau(1.0) / tau_ref(1.0)
        for t in ts:
            assert ext.tau(t) == pytest.approx(scale * tau_ref(t), rel=1e-6)
            assert ext.xi(t, 0.9) == pytest.approx(scale * xi_ref(t, 0.9), rel=1e-6)
            assert ext.eta(t, 0.9, -0.4) == pytest.approx(scale * eta_ref(t, 0.9, -0.4), rel=1e-6)

    def test_ungauged_residuals_reject_non_symmetry(self):
        eq = EquationSpec.from_text("1", "exp(-t)", interval=(0.0, 2.0), t_ref=0.0)
        bad = GeneralGenerator(tau=lambda t: t, xi=lambda t, x: 0.0,
                               eta=lambda t, x, u: 0.0, label="bad")
        res = determining_residuals_ungauged(bad, eq)
        assert res["classifying"] > 1e-3 or res["eta-structure"] > 1e-3
