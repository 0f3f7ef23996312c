"""Channel models, LLR laws, mixture parameters, and Lloyd-Max quantization."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from pcfec.channel import (
    ChannelModel,
    LlrQuantizer,
    ebn0_to_sigma,
    esn0_db_to_sigma,
    exact_llr,
    lloyd_max_design,
    maxlog_llr,
    mixture_model,
    qfunc,
    quantize,
    quantizer_mse,
    sigma_to_esn0_db,
    transmit,
    uniform_quantizer,
)

# exact LLRs for M=4, sigma^2 = 0.25, y = delta (high-precision two-term sums)
ORACLE_M4_LLR_AT_DELTA = (1.084264513793828, -1.084264513793828)


class TestSnrBookkeeping:
    def test_biawgn_reference_point(self):
        assert ebn0_to_sigma(0.0, 0.5) ** 2 == pytest.approx(1.0, rel=1e-12)

    def test_table_operating_point(self):
        sigma = ebn0_to_sigma(4.62, 0.820)
        assert sigma**2 == pytest.approx(1.0 / (2 * 0.820 * 10**0.462), rel=1e-12)

    def test_esn0(self):
        assert sigma_to_esn0_db(math.sqrt(0.5)) == pytest.approx(0.0, abs=1e-12)
        assert esn0_db_to_sigma(0.0) == pytest.approx(math.sqrt(0.5), rel=1e-12)

    def test_bicm_pairs_with_published_esn0(self):
        # 16-QAM, R = 231^2/255^2: Eb/N0 = 7.76 dB lands at Es/N0 = 12.92 dB
        sigma = ebn0_to_sigma(7.76, (231 / 255) ** 2, bits_per_dim=2, kind="bicm")
        assert sigma_to_esn0_db(sigma) == pytest.approx(12.92, abs=0.005)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            ebn0_to_sigma(3.0, 0.0)


class TestTransmit:
    def test_zero_observation_zero_llr(self):
        model = ChannelModel.biawgn(0.7)
        assert model.llr_from_obs(np.array([0.0]))[0] == 0.0

    def test_noiseless_signs(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 600).astype(np.uint8)
        for model in (ChannelModel.biawgn(1e-3), ChannelModel.bicm(4, 1e-3), ChannelModel.bicm(8, 1e-3, "exact")):
            use = bits[: bits.size - bits.size % model.m]
            llr = transmit(model, use, np.random.default_rng(1))
            assert np.array_equal((llr < 0).astype(np.uint8), use)

    def test_biawgn_llr_moments(self):
        """Conditioned on bit 0 the LLR is N(2/sigma^2, 4/sigma^2)."""
        sigma = 1.0
        model = ChannelModel.biawgn(sigma)
        llr = transmit(model, np.zeros(10**6, dtype=np.uint8), np.random.default_rng(2))
        mean, var = 2 / sigma**2, 4 / sigma**2
        assert abs(llr.mean() - mean) < 3 * math.sqrt(var / llr.size)
        var_se = var * math.sqrt(2.0 / (llr.size - 1))
        assert abs(llr.var() - var) < 3 * var_se

    def test_indivisible_length_rejected(self):
        with pytest.raises(ValueError):
            transmit(ChannelModel.bicm(4, 0.5), np.zeros(7, dtype=np.uint8), np.random.default_rng(0))


class TestLlrComputation:
    def test_m2_collapses_to_linear(self):
        model = ChannelModel.bicm(2, 0.5)
        y = np.linspace(-2, 2, 41)
        expect = 2.0 * model.delta * y / model.sigma**2
        assert np.allclose(exact_llr(y, model).ravel(), expect, rtol=1e-12)
        assert np.allclose(maxlog_llr(y, model).ravel(), expect, rtol=1e-12)

    def test_first_bit_antisymmetry(self):
        model = ChannelModel.bicm(8, 0.4)
        y = np.linspace(0.01, 1.5, 50)
        assert np.allclose(exact_llr(y, model)[:, 0], -exact_llr(-y, model)[:, 0], rtol=1e-10)

    def test_m4_frozen_oracle(self):
        model = ChannelModel.bicm(4, 0.5)
        got = exact_llr(model.delta, model)
        assert got == pytest.approx(ORACLE_M4_LLR_AT_DELTA, rel=1e-12)

    def test_exact_matches_direct_summation(self):
        """Brute-force evaluation of the defining log-ratio on a y grid."""
        model = ChannelModel.bicm(4, 0.5)
        for y in np.linspace(-1.4, 1.4, 29):
            got = exact_llr(y, model)
            for k in range(model.m):
                num = sum(
                    math.exp(-((y - a) ** 2) / (2 * model.sigma**2))
                    for a, bit in zip(model.amplitudes, model.level_bit[k])
                    if bit == 0
                )
                den = sum(
                    math.exp(-((y - a) ** 2) / (2 * model.sigma**2))
                    for a, bit in zip(model.amplitudes, model.level_bit[k])
                    if bit == 1
                )
                assert got[k] == pytest.approx(math.log(num / den), rel=1e-10)

    def test_maxlog_converges_to_exact_at_low_noise(self):
        y = 0.37  # not a decision boundary for M=4
        for sigma in (0.2, 0.1, 0.05):
            model = ChannelModel.bicm(4, sigma)
            diff = np.abs(exact_llr(y, model) - maxlog_llr(y, model))
            rel = diff / np.abs(maxlog_llr(y, model))
            assert rel.max() < 10 * math.exp(-2 * model.delta**2 / sigma**2) + 1e-9

    def test_maxlog_piecewise_linear(self):
        """Second differences vanish away from constellation midpoints."""
        model = ChannelModel.bicm(4, 0.5)
        mids = 0.5 * (model.amplitudes[:-1] + model.amplitudes[1:])
        breaks = np.concatenate([mids, [0.0], model.amplitudes])
        y = np.linspace(-1.2, 1.2, 100)
        llr = maxlog_llr(y, model)
        h = y[1] - y[0]
        second = llr[2:] - 2 * llr[1:-1] + llr[:-2]
        interior = np.array(
            [np.all(np.abs(breaks - yy) > 1.5 * h) for yy in y[1:-1]]
        )
        assert np.all(np.abs(second[interior]) < 1e-9)


class TestMixtureModel:
    def test_m4_weights(self):
        model = mixture_model(ChannelModel.bicm(4, 0.3))
        assert model.weights == pytest.approx([0.75, 0.25], rel=1e-12)

    @pytest.mark.parametrize("M", [2, 4, 8, 16])
    def test_weights_sum_to_one(self, M):
        model = mixture_model(ChannelModel.bicm(M, 0.3))
        assert model.weights.sum() == pytest.approx(1.0, rel=1e-12)

    def test_parameter_consistency(self):
        model = mixture_model(ChannelModel.bicm(8, 0.27))
        assert np.allclose(model.sigmas**2, 2 * model.means, rtol=1e-12)
        chan = ChannelModel.bicm(8, 0.27)
        j = np.arange(4)
        assert np.allclose(model.means / model.sigmas, chan.delta * (j + 1) / 0.27, rtol=1e-12)

    def test_biawgn_degenerate(self):
        model = mixture_model(ChannelModel.biawgn(0.5))
        assert model.means == pytest.approx([8.0]) and model.sigmas == pytest.approx([4.0])
        assert model.p_ch == pytest.approx(float(qfunc(2.0)), rel=1e-12)

    def test_high_noise_limit(self):
        assert mixture_model(ChannelModel.biawgn(1e6)).p_ch == pytest.approx(0.5, abs=1e-6)

    def test_symmetric_pdf_normalized(self):
        model = mixture_model(ChannelModel.bicm(4, esn0_db_to_sigma(12.92)))
        total, err = quad(model.symmetric_pdf, -np.inf, np.inf, limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_pch_against_monte_carlo_light(self):
        model = ChannelModel.bicm(4, 0.16)
        mix = mixture_model(model)
        rng = np.random.default_rng(3)
        bits = rng.integers(0, 2, 400_000).astype(np.uint8)
        llr = transmit(model, bits, rng)
        err = np.mean((llr < 0) != bits)
        se = math.sqrt(mix.p_ch * (1 - mix.p_ch) / bits.size)
        assert abs(err - mix.p_ch) < 3 * se

    def test_brgc_adjacency(self):
        for M in (4, 8, 16):
            labels = ChannelModel.bicm(M, 0.3).labels
            for i in range(M - 1):
                assert bin(int(labels[i]) ^ int(labels[i + 1])).count("1") == 1


class TestLloydMax:
    def test_one_bit_standard_normal(self):
        from pcfec.channel import MixtureLlrModel

        target = MixtureLlrModel(
            weights=np.array([1.0]), means=np.array([0.0]), sigmas=np.array([1.0]),
            sigma=1.0, p_ch=0.5,
        )
        q = lloyd_max_design(target, 1)
        assert q.levels == pytest.approx([-math.sqrt(2 / math.pi), math.sqrt(2 / math.pi)], abs=2e-4)
        assert q.boundaries == pytest.approx([0.0], abs=1e-9)

    def test_two_point_distribution(self):
        from pcfec.channel import MixtureLlrModel

        a = 3.7
        target = MixtureLlrModel(
            weights=np.array([1.0]), means=np.array([a]), sigmas=np.array([1e-9]),
            sigma=1.0, p_ch=0.0,
        )
        q = lloyd_max_design(target, 1)
        assert q.levels == pytest.approx([-a, a], abs=1e-6)

    def test_16qam_3bit_nonuniform_and_beats_uniform(self):
        mix = mixture_model(ChannelModel.bicm(4, esn0_db_to_sigma(12.92)))
        q = lloyd_max_design(mix, 3)
        gaps = np.diff(q.levels)
        assert gaps.max() > 1.2 * gaps.min()  # visibly nonuniform
        # levels concentrate near the +-modes, not in the far tail
        inner = np.abs(q.levels) < 12.0
        assert inner.sum() >= 4
        best_uniform = min(
            quantizer_mse(uniform_quantizer(3, s), mix)
            for s in np.linspace(0.5, 20.0, 200)
        )
        assert quantizer_mse(q, mix) < best_uniform

    def test_mse_matches_quadrature(self):
        mix = mixture_model(ChannelModel.biawgn(0.6))
        q = lloyd_max_design(mix, 2)
        direct, _ = quad(
            lambda l: (l - q.quantize(l)) ** 2 * mix.symmetric_pdf(l),
            -np.inf, np.inf, limit=400,
        )
        assert quantizer_mse(q, mix) == pytest.approx(direct, rel=1e-6)

    def test_resolution_bounds(self):
        mix = mixture_model(ChannelModel.biawgn(0.6))
        with pytest.raises(ValueError):
            lloyd_max_design(mix, 0)
        with pytest.raises(ValueError):
            lloyd_max_design(mix, 9)


class TestQuantize:
    def _quantizer(self):
        return lloyd_max_design(mixture_model(ChannelModel.biawgn(0.55)), 3)

    def test_levels_are_fixed_points(self):
        q = self._quantizer()
        assert np.array_equal(q.quantize(q.levels), q.levels)

    def test_idempotent(self):
        q = self._quantizer()
        x = np.random.default_rng(4).normal(0, 10, 1000)
        once = quantize(q, x)
        assert np.array_equal(quantize(q, once), once)

    def test_monotone(self):
        q = self._quantizer()
        rng = np.random.default_rng(5)
        a = rng.normal(0, 12, 10_000)
        b = rng.normal(0, 12, 10_000)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        assert np.all(q.quantize(lo) <= q.quantize(hi))

    def test_json_roundtrip_bit_exact(self):
        q = self._quantizer()
        q2 = LlrQuantizer.from_json(q.to_json())
        assert q2.bits == q.bits
        assert np.array_equal(q2.boundaries, q.boundaries)
        assert np.array_equal(q2.levels, q.levels)
