"""Receiver-chain statistics, error probabilities, and asymptotics."""
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qillum.receiver import (
    BeamsplitterMoments,
    ErrorProbabilities,
    ReceiverConfig,
    ReceiverStats,
    asymptotic_snr,
    beamsplitter_moments,
    erfc,
    error_prob_pc,
    half_erfc,
    homodyne_errors,
    homodyne_min_error,
    log_erfc,
    log_error_prob_pc,
    pc_transform,
    snr_from_moments,
    snr_pc,
)
from qillum.states import (
    ChannelParams,
    GaussianState,
    NoiseParams,
    SourceParams,
    conditional_states,
    make_source,
)
from qillum.symplectic import CovMatrix

REF_SRC = make_source(0.01, 0.01, "quantum")
REF_CH = ChannelParams(reflectivity=0.01, n_background=20.0)

SNR_QI_PC = 2.3575929806957360e-06
SNR_QI_CAL_PC = 2.3027656169736765e-06
SNR_QI_HET_PC = 1.1627852893770358e-06


class TestErfc:
    def test_basic_values(self):
        assert erfc(0.0) == 1.0
        assert erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-14)

    def test_reflection_identity(self):
        for x in [0.1, 0.7, 2.3, 5.0]:
            assert erfc(-x) == pytest.approx(2.0 - erfc(x), rel=1e-14)

    def test_against_high_precision_reference(self):
        mpmath.mp.dps = 40
        for x in np.linspace(-6.0, 30.0, 61):
            ref = float(mpmath.erfc(mpmath.mpf(float(x))))
            assert erfc(float(x)) == pytest.approx(ref, rel=1e-12)

    def test_log_variant_deep_tail(self):
        mpmath.mp.dps = 60
        for x in [0.0, 0.5, 1.0, 5.0, 8.0, 12.0, 26.5, 50.0, 120.0, -3.0]:
            ref = float(mpmath.log(mpmath.erfc(mpmath.mpf(x))))
            assert log_erfc(x) == pytest.approx(ref, rel=1e-13)

    def test_half_erfc_representable_at_exponent_700(self):
        p = half_erfc(math.sqrt(700.0))
        assert p > 0.0
        assert math.log(p) == pytest.approx(math.log(0.5) + log_erfc(math.sqrt(700.0)), rel=1e-12)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            erfc(math.nan)
        with pytest.raises(ValueError):
            log_erfc(math.inf)


class TestPcTransform:
    def test_vacuum_return_gains_one_unit(self):
        vac = GaussianState(np.zeros(4), CovMatrix(0.5 * np.eye(4)))
        out0, out1 = pc_transform((vac, vac))
        assert np.allclose(out0.cov.entries, np.diag([1.0, 1.0, 0.5, 0.5]))
        assert np.allclose(out1.cov.entries, np.diag([1.0, 1.0, 0.5, 0.5]))

    def test_reference_h1_return_block(self):
        pair = conditional_states(REF_SRC, REF_CH)
        _, out1 = pc_transform(pair)
        v = out1.cov.entries
        assert v[0, 0] == pytest.approx((41.0002 + 1.0) / 2.0, rel=1e-15)
        assert v[1, 1] == pytest.approx(21.0001, rel=1e-15)
        # cross block loses its diag(1,-1) structure: both entries positive
        cross = 0.5 * 0.1 * 0.20099751242241781
        assert v[0, 2] == pytest.approx(cross, rel=1e-14)
        assert v[1, 3] == pytest.approx(cross, rel=1e-14)
        assert v[0, 3] == 0.0 and v[1, 2] == 0.0

    def test_zero_reflectivity_makes_outputs_equal(self):
        pair = conditional_states(REF_SRC, ChannelParams(0.0, 20.0))
        out0, out1 = pc_transform(pair)
        assert np.allclose(out0.cov.entries, out1.cov.entries, atol=0)

    def test_mean_p_component_flips(self):
        state = GaussianState(np.array([0.3, 0.4, -0.2, 0.1]), CovMatrix(0.5 * np.eye(4)))
        out, _ = pc_transform((state, state))
        assert np.allclose(out.mean, [0.3, -0.4, -0.2, 0.1])

    def test_wrong_mode_count_rejected(self):
        one_mode = GaussianState(np.zeros(2), CovMatrix(0.5 * np.eye(2)))
        with pytest.raises(ValueError, match="two-mode"):
            pc_transform((one_mode, one_mode))


class TestBeamsplitterMoments:
    def test_no_target_symmetric_outputs(self):
        src = make_source(0.3, 0.3, "quantum")
        ch = ChannelParams(0.0, 5.0)
        m = beamsplitter_moments(src, ch)
        expected = (ch.omega + 1.0 + src.mu) / 4.0
        assert m.beta_plus == pytest.approx(expected, rel=1e-15)
        assert m.beta_minus == pytest.approx(expected, rel=1e-15)

    def test_reference_values(self):
        m = beamsplitter_moments(REF_SRC, REF_CH)
        assert m.gamma_star == pytest.approx((41.0002 + 1.0 - 1.02) / 4.0, rel=1e-14)
        assert m.gamma_star == pytest.approx(10.24505, rel=1e-10)
        assert m.beta_plus - m.beta_minus == pytest.approx(0.020099751242241781, rel=1e-12)
        assert m.alpha_plus == pytest.approx((41.0 + 1.0 + 1.02) / 4.0, rel=1e-15)
        assert m.alpha_minus == pytest.approx((41.0 + 1.0 - 1.02) / 4.0, rel=1e-15)

    def test_noise_replacements(self):
        clean = beamsplitter_moments(REF_SRC, REF_CH)
        noisy = beamsplitter_moments(REF_SRC, REF_CH, NoiseParams(1.0, 1.0))
        assert noisy.alpha_plus == pytest.approx(clean.alpha_plus + 0.5, rel=1e-15)
        assert noisy.gamma_star == pytest.approx(clean.gamma_star, rel=1e-15)

    def test_invariant_enforced(self):
        with pytest.raises(ValueError, match="beta_plus"):
            BeamsplitterMoments(1.0, 0.1, 0.5, 0.9, 0.2)
        with pytest.raises(ValueError, match="alpha_plus"):
            BeamsplitterMoments(-1.0, 0.1, 0.9, 0.5, 0.2)


class TestSnrPc:
    def test_reference_triple(self):
        assert snr_pc(REF_SRC, REF_CH).snr == pytest.approx(SNR_QI_PC, rel=1e-12)
        cal = snr_pc(REF_SRC, REF_CH, NoiseParams(eps_return=1.0))
        assert cal.snr == pytest.approx(SNR_QI_CAL_PC, rel=1e-12)
        het = snr_pc(REF_SRC, REF_CH, NoiseParams(1.0, 1.0))
        assert het.snr == pytest.approx(SNR_QI_HET_PC, rel=1e-12)

    def test_zero_correlation_gives_zero_snr(self):
        src = SourceParams(0.3, 0.3, 0.0)
        stats = snr_pc(src, REF_CH)
        assert stats.snr == 0.0
        assert stats.mean_h1 == 0.0

    def test_reference_moment_fields(self):
        stats = snr_pc(REF_SRC, REF_CH)
        assert stats.mean_h0 == 0.0
        assert stats.mean_h1 == pytest.approx(0.020099751242241781, rel=1e-14)
        assert stats.var_h0 == pytest.approx(21.42, rel=1e-14)
        assert stats.var_h1 == pytest.approx(21.420304, rel=1e-14)

    def test_moment_route_agrees_at_fig2_scale(self):
        for noise in [NoiseParams(), NoiseParams(1.0, 0.0), NoiseParams(1.0, 1.0)]:
            direct = snr_pc(REF_SRC, REF_CH, noise)
            recomputed = snr_from_moments(beamsplitter_moments(REF_SRC, REF_CH, noise))
            assert recomputed.snr == pytest.approx(direct.snr, rel=1e-12)
            assert recomputed.var_h0 == pytest.approx(direct.var_h0, rel=1e-12)
            assert recomputed.var_h1 == pytest.approx(direct.var_h1, rel=1e-12)

    @given(
        ns=st.floats(0.01, 1.0),
        extra=st.floats(0.0, 1.0),
        frac=st.floats(0.1, 1.0),
        kappa=st.floats(0.01, 1.0),
        nb=st.floats(0.0, 50.0),
        eps_r=st.floats(0.0, 2.0),
        eps_i=st.floats(0.0, 2.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_moment_route_identity_random(self, ns, extra, frac, kappa, nb, eps_r, eps_i):
        ni = ns + extra
        src = SourceParams(ns, ni, frac * 2.0 * math.sqrt(ns * (ni + 1.0)))
        ch = ChannelParams(kappa, nb)
        noise = NoiseParams(eps_r, eps_i)
        m = beamsplitter_moments(src, ch, noise)
        # numerator identity (beta+ - beta-)^2 = kappa*c^2 up to cancellation noise
        diff = m.beta_plus - m.beta_minus
        exact = math.sqrt(kappa) * src.corr
        eps = np.finfo(float).eps
        assert abs(diff - exact) <= 8.0 * eps * m.beta_plus
        direct = snr_pc(src, ch, noise)
        recomputed = snr_from_moments(m)
        tol = max(1e-12, 64.0 * eps * m.beta_plus / exact)
        assert abs(recomputed.snr - direct.snr) <= tol * direct.snr

    def test_monotone_increasing_in_corr(self):
        src0 = SourceParams(0.01, 0.01)
        cq = 2.0 * math.sqrt(0.01 * 1.01)
        values = [snr_pc(SourceParams(0.01, 0.01, f * cq), REF_CH).snr
                  for f in np.linspace(0.1, 1.0, 10)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert snr_pc(src0, REF_CH).snr == 0.0

    def test_monotone_decreasing_in_background(self):
        values = [snr_pc(REF_SRC, ChannelParams(0.01, nb)).snr
                  for nb in [1.0, 5.0, 20.0, 100.0, 1000.0]]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_monotone_decreasing_in_noise(self):
        for field in ("eps_return", "eps_idler"):
            values = [snr_pc(REF_SRC, REF_CH, NoiseParams(**{field: e})).snr
                      for e in [0.0, 0.5, 1.0, 2.0, 4.0]]
            assert all(b < a for a, b in zip(values, values[1:]))

    def test_stats_invariant_rejects_mismatch(self):
        with pytest.raises(ValueError, match="inconsistent"):
            ReceiverStats(0.0, 1.0, 1.0, 1.0, 0.5)


class TestErrorProbPc:
    def test_zero_snr_gives_half(self):
        stats = ReceiverStats(0.0, 0.0, 1.0, 1.0, 0.0)
        assert error_prob_pc(stats, 1) == 0.5
        assert error_prob_pc(stats, 10**9) == 0.5

    def test_unit_exponent(self):
        stats = ReceiverStats(0.0, math.sqrt(8.0), 1.0, 1.0, 1.0)
        assert error_prob_pc(stats, 1) == pytest.approx(0.5 * math.erfc(1.0), rel=1e-14)

    def test_reference_composition(self):
        stats = snr_pc(REF_SRC, REF_CH)
        p = error_prob_pc(stats, 10**7)
        assert p == pytest.approx(0.5 * math.erfc(math.sqrt(1e7 * stats.snr)), rel=1e-12)

    def test_non_increasing_in_m(self):
        stats = snr_pc(REF_SRC, REF_CH)
        ms = [10**k for k in range(3, 9)]
        ps = [error_prob_pc(stats, m) for m in ms]
        assert all(b < a for a, b in zip(ps, ps[1:]))

    def test_log_value_beyond_underflow(self):
        stats = ReceiverStats(0.0, math.sqrt(8.0), 1.0, 1.0, 1.0)
        lp = log_error_prob_pc(stats, 2000)
        assert -2100.0 < lp < -1900.0

    def test_bad_pulse_count_rejected(self):
        stats = snr_pc(REF_SRC, REF_CH)
        with pytest.raises(ValueError, match="positive integer"):
            error_prob_pc(stats, 0)
        with pytest.raises(ValueError, match="positive integer"):
            error_prob_pc(stats, 2.5)


class TestHomodyne:
    def test_zero_threshold_false_alarm_half(self):
        res = homodyne_errors(0.01, REF_CH, 100, 0.0)
        assert res.p_false_alarm == 0.5

    def test_symmetric_threshold_balances_errors(self):
        m = 1000
        shift = m * math.sqrt(2.0 * 0.01 * 0.01)
        res = homodyne_errors(0.01, REF_CH, m, shift / 2.0)
        assert res.p_false_alarm == pytest.approx(res.p_missed_detection, rel=1e-14)

    def test_zero_reflectivity_missed_detection_majority(self):
        res = homodyne_errors(0.01, ChannelParams(0.0, 20.0), 100, 5.0)
        assert res.p_missed_detection >= 0.5

    def test_error_is_average(self):
        res = homodyne_errors(0.3, REF_CH, 50, 1.7)
        assert res.p_error == pytest.approx(
            0.5 * (res.p_false_alarm + res.p_missed_detection), abs=1e-16)

    def test_min_error_fig2_single_pulse(self):
        opt = homodyne_min_error(0.01, REF_CH, 1)
        arg = math.sqrt(0.01 * 0.01 / 82.0)
        assert arg == pytest.approx(0.0011043152607484655, rel=1e-12)
        assert opt.p_error == pytest.approx(0.49937695708620238, rel=1e-12)

    def test_min_error_threshold_formula(self):
        m = 10**6
        opt = homodyne_min_error(0.01, REF_CH, m)
        assert opt.threshold == m * math.sqrt(2.0 * 0.01 * 0.01) / 2.0
        assert opt.p_error == pytest.approx(
            0.5 * math.erfc(math.sqrt(m * 1e-4 / 82.0)), rel=1e-12)

    def test_min_error_beats_other_thresholds(self):
        m = 10**6
        opt = homodyne_min_error(0.01, REF_CH, m)
        for frac in [0.0, 0.25, 0.75, 1.3]:
            other = homodyne_errors(0.01, REF_CH, m, frac * opt.threshold)
            assert other.p_error >= opt.p_error * (1.0 - 1e-12)

    def test_zero_reflectivity_gives_half(self):
        opt = homodyne_min_error(0.01, ChannelParams(0.0, 20.0), 10)
        assert opt.p_error == 0.5
        assert opt.threshold == 0.0

    def test_non_increasing_in_m(self):
        ps = [homodyne_min_error(0.01, REF_CH, 10**k).p_error for k in range(1, 9)]
        assert all(b < a for a, b in zip(ps, ps[1:]))

    def test_deep_tail_no_silent_failure(self):
        # m chosen so m*kappa*N_S/(4N_B+2) = 700
        m = round(700.0 * 82.0 / 1e-4)
        opt = homodyne_min_error(0.01, REF_CH, m)
        assert opt.p_error > 0.0
        assert opt.log_p_error == pytest.approx(
            math.log(0.5) + log_erfc(math.sqrt(m * 1e-4 / 82.0)), rel=1e-12)


class TestAsymptoticSnr:
    def test_expressions(self):
        src = REF_SRC
        val = asymptotic_snr(ReceiverConfig.QI_PC, src, REF_CH)
        assert val == pytest.approx(1.01 * 1e-4 / (2.0 * 20.0 * 1.02), rel=1e-14)
        assert asymptotic_snr(ReceiverConfig.QI_CAL_PC, src, REF_CH) == val
        hom = asymptotic_snr(ReceiverConfig.CS_HOM, src, REF_CH)
        assert hom == pytest.approx(1e-4 / 80.0, rel=1e-14)
        assert asymptotic_snr(ReceiverConfig.QI_HET_PC, src, REF_CH) == hom

    def test_advantage_ratio(self):
        ratio = (asymptotic_snr(ReceiverConfig.QI_PC, REF_SRC, REF_CH)
                 / asymptotic_snr(ReceiverConfig.CS_HOM, REF_SRC, REF_CH))
        assert ratio == pytest.approx(2.0 * 1.01 / 1.02, rel=1e-14)

    def test_small_idler_limit(self):
        src = make_source(0.01, 1e-9, "quantum")
        val = asymptotic_snr(ReceiverConfig.QI_PC, src, REF_CH)
        assert val == pytest.approx(1e-4 / 40.0, rel=1e-6)

    def test_requires_quantum_correlation(self):
        src = SourceParams(0.01, 0.01, 0.02)
        with pytest.raises(ValueError, match="quantum bound"):
            asymptotic_snr(ReceiverConfig.QI_PC, src, REF_CH)
        # the coherent benchmark ignores the source correlation
        asymptotic_snr(ReceiverConfig.CS_HOM, src, REF_CH)

    def test_requires_positive_background(self):
        with pytest.raises(ValueError, match="n_background"):
            asymptotic_snr(ReceiverConfig.QI_PC, REF_SRC, ChannelParams(0.01, 0.0))

    def test_exact_snr_converges_to_asymptote(self):
        ch = ChannelParams(0.01, 1e6)
        exact_pc = snr_pc(REF_SRC, ch).snr
        exact_cal = snr_pc(REF_SRC, ch, NoiseParams(eps_return=1.0)).snr
        exact_het = snr_pc(REF_SRC, ch, NoiseParams(1.0, 1.0)).snr
        assert exact_cal / exact_pc == pytest.approx(1.0, abs=1e-3)
        assert exact_pc / asymptotic_snr(ReceiverConfig.QI_PC, REF_SRC, ch) == pytest.approx(1.0, abs=1e-3)
        assert exact_het / asymptotic_snr(ReceiverConfig.QI_HET_PC, REF_SRC, ch) == pytest.approx(1.0, abs=1e-3)


class TestErrorProbabilitiesType:
    def test_range_enforced(self):
        with pytest.raises(ValueError, match="p_false_alarm"):
            ErrorProbabilities(1.2, 0.1, 0.65)

    def test_average_enforced(self):
        with pytest.raises(ValueError, match="average"):
            ErrorProbabilities(0.2, 0.4, 0.5)
