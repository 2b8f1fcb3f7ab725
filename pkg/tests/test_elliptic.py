import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ellipj

from fkdv.elliptic import EllipticModulus, elliptic_K, jacobi_cn, jacobi_sn_cn_dn

SQRT_HALF = np.sqrt(2.0) / 2.0


def K_quadrature(k):
    # independent oracle: the defining integral
    val, _ = quad(lambda th: 1.0 / np.sqrt(1.0 - (k * np.sin(th)) ** 2), 0.0, np.pi / 2,
                  epsabs=1e-13, epsrel=1e-13)
    return val


class TestK:
    def test_K_zero(self):
        assert elliptic_K(0.0) == pytest.approx(np.pi / 2, abs=1e-14)

    def test_K_sqrt_half_vs_quadrature(self):
        assert elliptic_K(SQRT_HALF) == pytest.approx(K_quadrature(SQRT_HALF), abs=1e-12)
        assert elliptic_K(SQRT_HALF) == pytest.approx(1.85407467730137, abs=1e-11)

    def test_K_monotone(self):
        ks = np.linspace(0.0, 0.99, 34)
        vals = [elliptic_K(k) for k in ks]
        assert np.all(np.diff(vals) > 0)

    def test_K_diverges_at_one(self):
        with pytest.raises(ValueError):
            elliptic_K(1.0)

    def test_modulus_validation(self):
        with pytest.raises(ValueError):
            elliptic_K(1.5)
        with pytest.raises(ValueError):
            EllipticModulus(-0.1)
        assert elliptic_K(EllipticModulus(0.5)) == pytest.approx(elliptic_K(0.5))


class TestCn:
    def test_cn_at_zero(self):
        for k in [0.0, 0.3, SQRT_HALF, 0.95, 1.0]:
            assert jacobi_cn(0.0, k) == pytest.approx(1.0, abs=1e-14)

    def test_degenerate_cos(self):
        assert jacobi_cn(np.pi / 3, 0.0) == pytest.approx(0.5, abs=1e-14)

    def test_degenerate_sech(self):
        assert jacobi_cn(0.0, 1.0) == pytest.approx(1.0)
        assert jacobi_cn(20.0, 1.0) == pytest.approx(0.0, abs=1e-8)
        assert jacobi_cn(3.0, 1.0) == pytest.approx(1.0 / np.cosh(3.0), abs=1e-14)

    def test_pythagorean_identity(self):
        rng = np.random.default_rng(7)
        u = rng.uniform(-20, 20, size=1000)
        k = rng.uniform(0.01, 0.99, size=1000)
        for ui, ki in zip(u, k):
            sn, cn, dn = jacobi_sn_cn_dn(ui, ki)
            assert abs(sn * sn + cn * cn - 1.0) <= 1e-10
            assert abs(dn * dn + (ki * sn) ** 2 - 1.0) <= 1e-9

    def test_periodicity(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            k = rng.uniform(0.05, 0.95)
            u = rng.uniform(-5, 5)
            assert abs(jacobi_cn(u + 4 * elliptic_K(k), k) - jacobi_cn(u, k)) <= 1e-10

    def test_even_symmetry(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            k = rng.uniform(0.0, 0.99)
            u = rng.uniform(0, 8)
            assert jacobi_cn(-u, k) == pytest.approx(jacobi_cn(u, k), abs=1e-12)

    def test_against_scipy(self):
        rng = np.random.default_rng(17)
        u = rng.uniform(-15, 15, size=200)
        for ui in u:
            for k in [0.2, SQRT_HALF, 0.9]:
                sn, cn, dn = jacobi_sn_cn_dn(ui, k)
                s2, c2, d2, _ = ellipj(ui, k * k)
                assert abs(cn - c2) <= 1e-12
                assert abs(sn - s2) <= 1e-12
                assert abs(dn - d2) <= 1e-12

    def test_vectorized(self):
        u = np.linspace(-3, 3, 11)
        cn = jacobi_cn(u, SQRT_HALF)
        assert cn.shape == u.shape
        np.testing.assert_allclose(cn, [jacobi_cn(float(x), SQRT_HALF) for x in u])

    def test_first_zero_of_cn(self):
        K = elliptic_K(SQRT_HALF)
        assert jacobi_cn(K, SQRT_HALF) == pytest.approx(0.0, abs=1e-12)
