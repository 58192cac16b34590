import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wedgewh import factorization as fz
from wedgewh import wedge as wg
from wedgewh.errors import DivergenceError
from wedgewh.kernel import ProblemConfig
from wedgewh.specfun import hankel0


class TestLambdaAlpha:
    def test_one_index_zero(self):
        for alpha in (0.3, 1.0, 2.5):
            assert wg.lambda_alpha(7, 0, alpha) == pytest.approx(7.0, abs=1e-14)

    def test_collinear(self):
        assert wg.lambda_alpha(3, 4, np.pi / 2) == pytest.approx(7.0, abs=1e-12)

    def test_right_angle(self):
        assert wg.lambda_alpha(1, 1, np.pi / 4) == pytest.approx(np.sqrt(2), abs=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 50), st.integers(0, 50),
           st.floats(min_value=0.01, max_value=np.pi - 0.01))
    def test_triangle_inequality(self, m, n, alpha):
        val = wg.lambda_alpha(m, n, alpha)
        assert abs(m - n) - 1e-9 <= val <= m + n + 1e-9


class TestBuildMatrices:
    def test_shapes(self, cfg_wedge, lam_wedge):
        mats = wg.build_matrices(cfg_wedge, lam_wedge, 10)
        assert mats.MA.shape == (10, 11)
        assert mats.MB.shape == (11, 10)

    def test_one_hot_lambda_collapses_sums(self, cfg_wedge):
        one_hot = fz.LambdaCoeffs(values=np.array([1.0 + 0j] + [0.0] * 10),
                                  source="rational")
        mats = wg.build_matrices(cfg_wedge, one_hot, 4)
        expect = hankel0(cfg_wedge.ks * wg.lambda_alpha(1, 1, cfg_wedge.alpha))
        assert mats.MA[0, 1] == pytest.approx(expect, rel=1e-14)

    def test_alpha_mirror_symmetry(self, lam_wedge):
        base = dict(k=5 * np.pi, s=0.1, a=0.01, theta_inc=0.0)
        m1 = wg.build_matrices(ProblemConfig(alpha=np.pi / 3, **base), lam_wedge, 12)
        m2 = wg.build_matrices(ProblemConfig(alpha=2 * np.pi / 3, **base), lam_wedge, 12)
        assert np.allclose(m1.MA, m2.MA, rtol=1e-14)
        assert np.allclose(m1.MB, m2.MB, rtol=1e-14)

    def test_matches_triple_loop(self, cfg_wedge, lam_wedge):
        M = 6
        mats = wg.build_matrices(cfg_wedge, lam_wedge, M)
        lv = lam_wedge.values[: M + 1]
        P = mats.P
        for m in range(1, M + 1):
            for q in range(M + 1):
                val = sum(lv[m - n] * lv[p]
                          * hankel0(cfg_wedge.ks * wg.lambda_alpha(q, p + n, cfg_wedge.alpha))
                          for p in range(P + 1) for n in range(1, m + 1))
                assert mats.MA[m - 1, q] == pytest.approx(val, rel=1e-12)
        for m in range(M + 1):
            for q in range(1, M + 1):
                val = sum(lv[m - n] * lv[p]
                          * hankel0(cfg_wedge.ks * wg.lambda_alpha(q, p + n, cfg_wedge.alpha))
                          for p in range(P + 1) for n in range(0, m + 1))
                assert mats.MB[m, q - 1] == pytest.approx(val, rel=1e-12)


class TestIterate:
    def test_zero_coupling_is_fixed_point(self, cfg_wedge, lam_wedge):
        from wedgewh import arrays as ar
        M = 20
        mats = wg.IterationMatrices(MA=np.zeros((M, M + 1), complex),
                                    MB=np.zeros((M + 1, M), complex), M=M, P=0)
        state = wg.iterate(cfg_wedge, lam_wedge, M, mats, j_max=5, check_rho=False)
        top, bottom = ar.isolated_guess(cfg_wedge, lam_wedge, M)
        assert np.array_equal(state.A, top.values)
        assert np.array_equal(state.B, bottom.values)
        assert all(h[1] == 0 for h in state.history[1:])

    def test_divergence_detected(self, cfg_wedge, lam_wedge):
        M = 5
        mats = wg.IterationMatrices(MA=3.0 * np.ones((M, M + 1), complex),
                                    MB=3.0 * np.ones((M + 1, M), complex), M=M, P=0)
        with pytest.raises(DivergenceError) as exc:
            wg.iterate(cfg_wedge, lam_wedge, M, mats, j_max=40, check_rho=False)
        assert len(exc.value.history) >= 6

    def test_warns_when_rho_at_least_one(self, cfg_wedge, lam_wedge):
        M = 5
        mats = wg.IterationMatrices(MA=1.2 * np.eye(M, M + 1, dtype=complex),
                                    MB=1.2 * np.eye(M + 1, M, dtype=complex), M=M, P=0)
        with pytest.warns(UserWarning):
            try:
                wg.iterate(cfg_wedge, lam_wedge, M, mats, j_max=8)
            except DivergenceError:
                pass

    def test_error_propagation_law(self, cfg_wedge, lam_wedge, wedge_mats):
        from wedgewh import arrays as ar
        M = wedge_mats.M
        top, bottom = ar.isolated_guess(cfg_wedge, lam_wedge, M)
        rng = np.random.default_rng(0)
        pert = (rng.standard_normal(M + 1) + 1j * rng.standard_normal(M + 1)) * 1e-3
        # one full cycle maps an A-perturbation through MB @ MA
        A0 = top.values
        B0 = bottom.values
        B_from = lambda A: B0 - wedge_mats.MA @ A
        A_next = lambda B: A0 - wedge_mats.MB @ B
        a_ref = A_next(B_from(A0))
        a_pert = A_next(B_from(A0 + pert))
        propagated = a_pert - a_ref
        expect = wedge_mats.MB @ (wedge_mats.MA @ pert)
        assert np.max(np.abs(propagated - expect)) <= 1e-10


class TestSpectralRadius:
    def test_rho_ab_close_to_rho_ba(self, cfg_wedge, lam_wedge):
        mats = wg.build_matrices(cfg_wedge, lam_wedge, 120)
        rho_ab, rho_ba, diff = wg.scheme_spectral_radius(mats)
        assert rho_ab > 0
        assert diff <= 1e-6 * rho_ab

    def test_alpha_mirror(self, lam_wedge):
        base = dict(k=5 * np.pi, s=0.1, a=0.01, theta_inc=0.0)
        r1, _, _ = wg.scheme_spectral_radius(
            wg.build_matrices(ProblemConfig(alpha=np.pi / 3, **base), lam_wedge, 60))
        r2, _, _ = wg.scheme_spectral_radius(
            wg.build_matrices(ProblemConfig(alpha=2 * np.pi / 3, **base), lam_wedge, 60))
        assert abs(r1 - r2) <= 1e-8


class TestResonance:
    def test_grazing_hit(self):
        cfg = ProblemConfig(k=2 * np.pi, s=1.0, a=0.01, alpha=np.pi / 2,
                            theta_inc=np.pi / 2)
        report = wg.resonance_check(cfg)
        assert report.resonant
        assert report.margin == 0.0
        faces = {h[0] for h in report.hits}
        assert faces == {"top", "bottom"}

    def test_paper_cases_clean(self):
        c1 = ProblemConfig(k=5 * np.pi, s=0.1, a=0.01, alpha=5 * np.pi / 6, theta_inc=0.0)
        c2 = ProblemConfig(k=15 * np.pi, s=0.1, a=0.01, alpha=5 * np.pi / 6,
                           theta_inc=np.pi / 2)
        assert not wg.resonance_check(c1).resonant
        assert not wg.resonance_check(c2).resonant
        assert wg.resonance_check(c1).margin > 1e-2
        assert wg.resonance_check(c2).margin > 1e-2

    def test_margin_grows_off_the_hit(self):
        # ks = 4 pi, psi -+ alpha at +-60/120 degrees: all four conditions
        # land on nonzero integers, so a ks perturbation moves every one
        hit = ProblemConfig(k=4 * np.pi, s=1.0, a=0.01, alpha=np.pi / 6,
                            theta_inc=np.pi / 2)
        off = ProblemConfig(k=4 * np.pi + 1e-6, s=1.0, a=0.01, alpha=np.pi / 6,
                            theta_inc=np.pi / 2)
        r_hit = wg.resonance_check(hit)
        assert r_hit.margin == 0.0 and len(r_hit.hits) == 4
        assert wg.resonance_check(off).margin > 0.0

    def test_margin_range(self):
        cfg = ProblemConfig(k=2.0, s=1.0, a=0.01, alpha=1.0, theta_inc=0.3)
        report = wg.resonance_check(cfg, angles=[0.3, 1.1, 2.0])
        assert 0.0 <= report.margin <= 0.5
