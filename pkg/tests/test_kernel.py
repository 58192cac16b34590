import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wedgewh.errors import BranchPointError, ConfigError, DomainError
from wedgewh.kernel import (KernelMethod, ProblemConfig, kernel, kernel_direct,
                            kernel_fast, kernel_tail)
from wedgewh.specfun import hankel0


class TestProblemConfig:
    def test_valid(self, cfg_ks1):
        assert cfg_ks1.ks == 1.0
        assert cfg_ks1.ka == pytest.approx(0.01)

    def test_radius_bound(self):
        with pytest.raises(ConfigError):
            ProblemConfig(k=1, s=1, a=0.6, alpha=np.pi / 2, theta_inc=0)

    def test_overlap_bound(self):
        with pytest.raises(ConfigError):
            ProblemConfig(k=1, s=1, a=0.2, alpha=0.05, theta_inc=0)

    def test_foldy_warnings(self):
        with pytest.warns(UserWarning):
            ProblemConfig(k=60.0, s=1.0, a=0.01, alpha=np.pi / 2, theta_inc=0)
        with pytest.warns(UserWarning):
            ProblemConfig(k=1.0, s=1.0, a=0.3, alpha=np.pi / 2, theta_inc=0)


class TestDirect:
    def test_truncation_definition(self, cfg_ks1):
        z = np.exp(0.7j)
        expect = hankel0(cfg_ks1.ka) + (z + 1 / z) * hankel0(cfg_ks1.ks)
        assert kernel_direct(cfg_ks1, z, 2) == pytest.approx(expect, abs=1e-15)

    def test_reciprocal_symmetry(self, cfg_ks1):
        rng = np.random.default_rng(0)
        for t in rng.uniform(0.1, np.pi - 0.1, 8):
            z = np.exp(1j * t)
            a = kernel_direct(cfg_ks1, z, 500)
            b = kernel_direct(cfg_ks1, 1 / z, 500)
            assert abs(a - b) <= 1e-12 * abs(a)

    def test_off_circle_rejected(self, cfg_ks1):
        with pytest.raises(DomainError):
            kernel_direct(cfg_ks1, 1.2, 100)

    def test_branch_point_rejected(self, cfg_ks1):
        with pytest.raises(BranchPointError):
            kernel_direct(cfg_ks1, np.exp(1j * (cfg_ks1.ks + 1e-10)), 100)

    def test_convergence_order(self, cfg_ks1):
        ref = kernel_fast(cfg_ks1, 0.0, corrections=2, L=100000)
        Ls = np.array([100, 1000, 10000])
        errs = [abs(kernel_direct(cfg_ks1, 1.0, L) - ref) for L in Ls]
        slope = np.polyfit(np.log(Ls), np.log(errs), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.2)


class TestTail:
    def test_agreement_with_fast(self, cfg_ks1):
        ref = kernel_fast(cfg_ks1, 0.0, corrections=2, L=100000)
        assert abs(kernel_tail(cfg_ks1, 1.0, 10000, 2) - ref) <= 1e-8

    @pytest.mark.parametrize("n,expected", [(1, -1.5), (2, -2.5)])
    def test_rates(self, cfg_ks1, n, expected):
        ref = kernel_fast(cfg_ks1, 0.0, corrections=2, L=100000)
        Ls = np.array([100, 1000, 10000])
        errs = [abs(kernel_tail(cfg_ks1, 1.0, L, n) - ref) for L in Ls]
        slope = np.polyfit(np.log(Ls), np.log(errs), 1)[0]
        assert slope == pytest.approx(expected, abs=0.15)

    def test_tail_vanishes(self, cfg_ks1):
        # the remainder scales like L^(-1/2) (phases |z e^{iks}| = 1 on the
        # circle), so 1e2 -> 1e6 shrinks it by exactly 1e-2
        from wedgewh.kernel import tail_estimate
        small = abs(tail_estimate(cfg_ks1, 1.0, 10 ** 6, 2))
        big = abs(tail_estimate(cfg_ks1, 1.0, 100, 2))
        assert small < 2e-2 * big

    def test_invalid_corrections(self, cfg_ks1):
        with pytest.raises(ConfigError):
            kernel_tail(cfg_ks1, 1.0, 100, 3)


class TestFast:
    def test_even_in_t(self, cfg_ks1):
        t = np.array([0.3, 0.9, 2.5])
        assert np.allclose(kernel_fast(cfg_ks1, t, 2, 200),
                           kernel_fast(cfg_ks1, -t, 2, 200), rtol=1e-14)

    def test_cross_method(self, cfg_ks1):
        a = kernel_fast(cfg_ks1, 0.0, 2, 200)
        b = kernel_tail(cfg_ks1, 1.0, 10 ** 6, 2)
        assert abs(a - b) <= 1e-7

    @pytest.mark.parametrize("n,Ls,expected", [
        (0, (8, 16, 32, 64, 128), -2.0),
        (1, (8, 16, 32, 64), -4.0),
        (2, (10, 14, 20, 28), -6.0),
    ])
    def test_rates(self, cfg_ks1, n, Ls, expected):
        ref = kernel_fast(cfg_ks1, 0.0, corrections=2, L=100000)
        errs = [abs(kernel_fast(cfg_ks1, 0.0, n, L) - ref) for L in Ls]
        slope = np.polyfit(np.log(Ls), np.log(errs), 1)[0]
        assert slope == pytest.approx(expected, abs=0.2)

    def test_branch_point_rejected(self, cfg_ks1):
        with pytest.raises(BranchPointError):
            kernel_fast(cfg_ks1, cfg_ks1.ks + 1e-9, 2, 100)

    def test_cauchy_riemann_probe(self, cfg_ks1):
        t0 = 0.5 + 0.02j
        h = 1e-4
        d_re = (kernel_fast(cfg_ks1, t0 + h, 2, 400)
                - kernel_fast(cfg_ks1, t0 - h, 2, 400)) / (2 * h)
        d_im = (kernel_fast(cfg_ks1, t0 + 1j * h, 2, 400)
                - kernel_fast(cfg_ks1, t0 - 1j * h, 2, 400)) / (2j * h)
        assert abs(d_re - d_im) <= 1e-6


class TestDispatch:
    def test_direct_vs_fast_within_budget(self, cfg_ks1):
        z = np.exp(0.4j)
        L = 2000
        a = kernel(cfg_ks1, z, KernelMethod("direct", 0, L))
        b = kernel(cfg_ks1, z, KernelMethod("fast", 2, 500))
        # direct converges like c L^(-1/2); generous envelope on c
        assert abs(a - b) <= 10.0 / np.sqrt(L)

    def test_default_plateau(self, cfg_ks1):
        vals = [kernel(cfg_ks1, np.exp(1j * 0.0 + 0j) * (1.0 + 0j),
                       KernelMethod("fast", 2, L)) for L in (100, 200, 500)]
        assert abs(vals[0] - vals[1]) < 1e-12
        assert abs(vals[1] - vals[2]) < 1e-12

    def test_symmetry_on_circle(self, cfg_ks1):
        rng = np.random.default_rng(2)
        m = KernelMethod("fast", 2, 300)
        count = 0
        for t in rng.uniform(-np.pi, np.pi, 64):
            if min(abs(abs(t) - cfg_ks1.ks), abs(2 * np.pi - abs(t) - cfg_ks1.ks)) < 0.02:
                continue
            z = np.exp(1j * t)
            a = kernel(cfg_ks1, z, m)
            b = kernel(cfg_ks1, 1 / z, m)
            assert abs(a - b) <= 1e-12 * abs(a)
            count += 1
            if count == 32:
                break
        assert count == 32

    def test_annulus_accepted_and_bounded(self, cfg_ks1):
        val = kernel(cfg_ks1, 0.95 * np.exp(0.5j), KernelMethod("fast", 2, 300))
        assert np.isfinite(val.real) and np.isfinite(val.imag)
        with pytest.raises(DomainError):
            kernel(cfg_ks1, 0.5, KernelMethod("fast", 2, 300))

    def test_zero_rejected(self, cfg_ks1):
        with pytest.raises(DomainError):
            kernel(cfg_ks1, 0.0, KernelMethod("fast", 2, 300))


def test_kernel_method_validation():
    with pytest.raises(ConfigError):
        KernelMethod("direct", 0, 1)
    with pytest.raises(ConfigError):
        KernelMethod("tail", 4, 100)
    with pytest.raises(ConfigError):
        KernelMethod("fast", 3, 100)
    with pytest.raises(ConfigError):
        KernelMethod("bogus", 0, 100)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.05, max_value=np.pi - 0.05))
def test_symmetry_property(t):
    cfg = ProblemConfig(k=1.0, s=1.0, a=0.01, alpha=np.pi / 2, theta_inc=0.0)
    if abs(t - cfg.ks) < 5e-3:
        return
    a = kernel_fast(cfg, t, 2, 150)
    b = kernel_fast(cfg, -t, 2, 150)
    assert abs(a - b) <= 1e-13 * abs(a)
