import numpy as np
import pytest

from wedgewh import arrays as ar
from wedgewh import factorization as fz
from wedgewh.errors import DomainError, ResonanceError
from wedgewh.kernel import ProblemConfig, kernel_tail


class TestInfiniteCoeff:
    def test_against_tail_corrected_series(self, cfg_wedge):
        # oracle: the quasi-periodic lattice sum evaluated directly at
        # L = 1e6 with two tail corrections
        a0 = ar.infinite_coeff(cfg_wedge)
        beta = cfg_wedge.ks * np.cos(cfg_wedge.theta_inc - cfg_wedge.alpha)
        denom = kernel_tail(cfg_wedge, np.exp(-1j * beta), 10 ** 6, 2)
        assert abs(-1.0 / a0 - denom) <= 1e-6 * abs(denom)

    def test_even_in_incidence_offset(self):
        # theta_inc - alpha = +-pi/3 at fixed alpha = pi/2: cosine is even
        a = ar.infinite_coeff(ProblemConfig(k=2.0, s=1.0, a=0.02,
                                            alpha=np.pi / 2, theta_inc=np.pi / 2 + np.pi / 3))
        b = ar.infinite_coeff(ProblemConfig(k=2.0, s=1.0, a=0.02,
                                            alpha=np.pi / 2, theta_inc=np.pi / 2 - np.pi / 3))
        assert a == pytest.approx(b, rel=1e-13)

    def test_resonant_rejected(self):
        cfg = ProblemConfig(k=2 * np.pi, s=1.0, a=0.01, alpha=np.pi / 2,
                            theta_inc=np.pi / 2)
        with pytest.raises(ResonanceError):
            ar.infinite_coeff(cfg)


class TestSemiCoeffs:
    def test_recurrence_equals_closed_form(self, cfg_wedge, lam_wedge):
        semi = ar.semi_coeffs(cfg_wedge, lam_wedge, 50, "top")
        beta = semi.beta
        m = np.arange(51)
        partial = np.cumsum(lam_wedge.values[:51] * np.exp(1j * beta * m))
        kp = complex(lam_wedge.kplus(ar.K_PLUS_RADIUS * np.exp(-1j * beta)))
        closed = -np.exp(-1j * beta * m) / kp * partial
        assert np.max(np.abs(semi.values - closed) / np.abs(closed)) <= 1e-12

    def test_limit_is_infinite_array(self, cfg_wedge, lam_wedge):
        semi = ar.semi_coeffs(cfg_wedge, lam_wedge, 1000, "top")
        a_inf = ar.infinite_coeff(cfg_wedge)
        beta = semi.beta
        dev10 = abs(semi.values[10] - a_inf * np.exp(-1j * beta * 10))
        dev1000 = abs(semi.values[1000] - a_inf * np.exp(-1j * beta * 1000))
        assert dev1000 < 0.1 * dev10

    def test_boundedness(self, cfg_wedge, lam_wedge):
        semi = ar.semi_coeffs(cfg_wedge, lam_wedge, 200, "top")
        lam = lam_wedge.values
        bound = np.sum(np.abs(lam)) * abs(semi.values[0] / lam[0])
        assert np.max(np.abs(semi.values)) <= bound * (1 + 1e-12)

    def test_needs_rational_route(self, cfg_wedge, lam_wedge):
        bare = fz.LambdaCoeffs(values=lam_wedge.values.copy(), source="integral", kplus=None)
        with pytest.raises(DomainError):
            ar.semi_coeffs(cfg_wedge, bare, 10, "top")

    def test_needs_enough_lambdas(self, cfg_wedge, lam_wedge):
        with pytest.raises(DomainError):
            ar.semi_coeffs(cfg_wedge, lam_wedge, len(lam_wedge.values) + 5, "top")

    def test_bad_branch_name(self, cfg_wedge, lam_wedge):
        with pytest.raises(DomainError):
            ar.semi_coeffs(cfg_wedge, lam_wedge, 10, "left")


class TestIsolatedGuess:
    def test_lengths(self, cfg_wedge, lam_wedge):
        top, bottom = ar.isolated_guess(cfg_wedge, lam_wedge, 100)
        assert len(top) == 101
        assert len(bottom) == 100
        assert top.kind == "isolated_top"
        assert bottom.kind == "isolated_bottom"

    def test_first_bottom_coefficient_at_normal_incidence(self, cfg_wedge, lam_wedge):
        # theta_inc = 0: both faces share beta, so B_{-1} = e^{-i beta} A_0
        top, bottom = ar.isolated_guess(cfg_wedge, lam_wedge, 10)
        assert top.beta == pytest.approx(bottom.beta, abs=1e-15)
        expect = np.exp(-1j * top.beta) * top.values[0]
        assert bottom.values[0] == pytest.approx(expect, rel=1e-13)

    def test_fig3_setup_runs(self, cfg_wedge, lam_wedge):
        top, bottom = ar.isolated_guess(cfg_wedge, lam_wedge, 1000)
        assert len(top) == 1001 and len(bottom) == 1000
        assert abs(top.values[0]) > 0
        assert np.all(np.isfinite(top.values.view(float)))
        assert np.all(np.isfinite(bottom.values.view(float)))
