"""Channel models and LLR machinery.

Covers binary antipodal transmission over AWGN and BICM with Gray-labeled
M-ASK per real dimension (two dimensions forming a square QAM symbol),
exact and max-log per-bit LLRs, the Gaussian-mixture law of the max-log
LLRs used by density evolution, SNR bookkeeping, and Lloyd-Max LLR
quantizer design.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, ndtr

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def qfunc(x):
    """Standard normal tail probability."""
    from scipy.special import erfc

    return 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)


def ebn0_to_sigma(ebn0_db: float, rate: float, bits_per_dim: int = 1, kind: str = "biawgn") -> float:
    """Per-dimension noise standard deviation for a target Eb/N0.

    biawgn: unit-energy antipodal symbols, sigma^2 = 1/(2 R Eb/N0).
    bicm:   the M-ASK pair forms a unit-energy QAM symbol carrying
            2*bits_per_dim code bits, so N0 = 1/(2 R m Eb/N0) with
            m = 2*bits_per_dim and sigma^2 = N0/2.
    """
    if rate <= 0:
        raise ValueError(f"code rate must be positive, got {rate}")
    if not math.isfinite(ebn0_db):
        raise ValueError("Eb/N0 must be finite")
    gamma = 10.0 ** (ebn0_db / 10.0)
    if kind == "biawgn":
        var = 1.0 / (2.0 * rate * gamma)
    elif kind == "bicm":
        var = 1.0 / (4.0 * rate * bits_per_dim * gamma)
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return math.sqrt(var)


def sigma_to_esn0_db(sigma: float) -> float:
    """Es/N0 in dB for one unit-energy symbol: Es/N0 = 1/(2 sigma^2)."""
    return 10.0 * math.log10(1.0 / (2.0 * sigma * sigma))


def esn0_db_to_sigma(esn0_db: float) -> float:
    return math.sqrt(1.0 / (2.0 * 10.0 ** (esn0_db / 10.0)))


class ChannelModel:
    """Immutable channel description: modulation, labeling, and noise level."""

    def __init__(self, kind: str, sigma: float, bits_per_dim: int = 1, llr_method: str = "maxlog"):
        if kind not in ("biawgn", "bicm"):
            raise ValueError(f"unknown channel kind {kind!r}")
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        if llr_method not in ("exact", "maxlog"):
            raise ValueError(f"unknown llr method {llr_method!r}")
        self.kind = kind
        self.sigma = float(sigma)
        self.llr_method = llr_method
        if kind == "biawgn":
            self.m = 1
            self.M = 2
            self.delta = 1.0
            self.amplitudes = np.array([-1.0, 1.0])
            self.labels = np.array([1, 0])
        else:
            m = int(bits_per_dim)
            if m < 1:
                raise ValueError("bits_per_dim must be >= 1")
            M = 1 << m
            self.m = m
            self.M = M
            # odd-spaced amplitudes scaled so the QAM pair has unit energy
            self.delta = math.sqrt(3.0 / (2.0 * (M * M - 1.0)))
            idx = np.arange(M)
            self.amplitudes = (2 * idx - (M - 1)) * self.delta
            # binary reflected Gray labels, all-zero label on the most positive
            # amplitude so bit 0 maps to a positive LLR (matches the 0 -> +1
            # convention of the binary channel)
            rev = (M - 1) - idx
            self.labels = rev ^ (rev >> 1)
        self._idx_from_label = np.zeros(self.M, dtype=np.int64)
        self._idx_from_label[self.labels] = np.arange(self.M)
        # level_bit[k, a]: bit k (MSB first) of the label of amplitude index a
        shifts = self.m - 1 - np.arange(self.m)
        self.level_bit = ((self.labels[None, :] >> shifts[:, None]) & 1).astype(np.uint8)

    @classmethod
    def biawgn(cls, sigma: float) -> "ChannelModel":
        return cls("biawgn", sigma)

    @classmethod
    def bicm(cls, points_per_dim: int, sigma: float, llr_method: str = "maxlog") -> "ChannelModel":
        m = int(round(math.log2(points_per_dim)))
        if 1 << m != points_per_dim:
            raise ValueError(f"constellation size {points_per_dim} is not a power of two")
        return cls("bicm", sigma, bits_per_dim=m, llr_method=llr_method)

    def map_bits(self, bits: np.ndarray) -> np.ndarray:
        """Map a bit vector to amplitudes, m bits per symbol, MSB first."""
        bits = np.asarray(bits, dtype=np.uint8)
        if self.kind == "biawgn":
            return 1.0 - 2.0 * bits.astype(np.float64)
        if bits.size % self.m:
            raise ValueError(f"bit count {bits.size} not divisible by {self.m}")
        groups = bits.reshape(-1, self.m).astype(np.int64)
        lab = np.zeros(groups.shape[0], dtype=np.int64)
        for k in range(self.m):
            lab = (lab << 1) | groups[:, k]
        return self.amplitudes[self._idx_from_label[lab]]

    def llr_from_obs(self, y: np.ndarray) -> np.ndarray:
        """Per-bit LLRs for channel observations (flattened, m per symbol)."""
        if self.kind == "biawgn":
            return 2.0 * np.asarray(y, dtype=np.float64) / (self.sigma * self.sigma)
        if self.llr_method == "exact":
            return exact_llr(y, self).ravel()
        return maxlog_llr(y, self).ravel()


def transmit(model: ChannelModel, bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Modulate, add Gaussian noise, and return per-bit channel LLRs."""
    bits = np.asarray(bits, dtype=np.uint8)
    x = model.map_bits(bits)
    y = x + model.sigma * rng.standard_normal(x.shape)
    return model.llr_from_obs(y)


def _bit_distances(y: np.ndarray, model: ChannelModel) -> np.ndarray:
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    return (y[:, None] - model.amplitudes[None, :]) ** 2 / (2.0 * model.sigma**2)


def exact_llr(y, model: ChannelModel) -> np.ndarray:
    """Exact per-bit-level LLRs: log-ratio of half-constellation likelihoods."""
    scalar = np.isscalar(y) or np.ndim(y) == 0
    dist = _bit_distances(y, model)
    out = np.empty((dist.shape[0], model.m))
    for k in range(model.m):
        zero_set = model.level_bit[k] == 0
        out[:, k] = logsumexp(-dist[:, zero_set], axis=1) - logsumexp(-dist[:, ~zero_set], axis=1)
    return out[0] if scalar else out


def maxlog_llr(y, model: ChannelModel) -> np.ndarray:
    """Max-log per-bit-level LLRs: nearest-point squared-distance difference."""
    scalar = np.isscalar(y) or np.ndim(y) == 0
    dist = _bit_distances(y, model)
    out = np.empty((dist.shape[0], model.m))
    for k in range(model.m):
        zero_set = model.level_bit[k] == 0
        out[:, k] = dist[:, ~zero_set].min(axis=1) - dist[:, zero_set].min(axis=1)
    return out[0] if scalar else out


@dataclass(frozen=True)
class MixtureLlrModel:
    """Gaussian-mixture law of the (symmetrized, max-log) channel LLRs.

    Conditioned on bit 0 the LLR density is sum_j weights[j] *
    N(means[j], sigmas[j]^2); bit 1 negates the means.  Degenerates to a
    single component N(2/sigma^2, 4/sigma^2) for binary transmission.
    ``p_ch`` is the induced hard-decision error probability.
    """

    weights: np.ndarray
    means: np.ndarray
    sigmas: np.ndarray
    sigma: float
    p_ch: float

    def pdf(self, l, bit: int = 0) -> np.ndarray:
        l = np.asarray(l, dtype=np.float64)
        sign = 1.0 if bit == 0 else -1.0
        acc = np.zeros_like(l, dtype=np.float64)
        for w, mu, sd in zip(self.weights, self.means, self.sigmas):
            z = (l - sign * mu) / sd
            acc += w * np.exp(-0.5 * z * z) / (sd * _SQRT2PI)
        return acc

    def symmetric_pdf(self, l) -> np.ndarray:
        return 0.5 * (self.pdf(l, 0) + self.pdf(l, 1))


def mixture_model(model: ChannelModel) -> MixtureLlrModel:
    """LLR mixture parameters and hard-decision error probability."""
    sigma = model.sigma
    if model.kind == "biawgn":
        weights = np.array([1.0])
        means = np.array([2.0 / sigma**2])
        sigmas = np.array([2.0 / sigma])
    else:
        m, M, delta = model.m, model.M, model.delta
        j = np.arange(M // 2)
        exponents = np.array([m - int(jj).bit_length() for jj in j])  # m - ceil(log2(j+1))
        weights = 2.0 * (np.exp2(exponents) - 1.0) / (m * M)
        means = 2.0 * delta**2 * (j + 1.0) ** 2 / sigma**2
        sigmas = 2.0 * delta * (j + 1.0) / sigma
    p_ch = float(np.sum(weights * qfunc(means / sigmas)))
    return MixtureLlrModel(weights=weights, means=means, sigmas=sigmas, sigma=sigma, p_ch=p_ch)


# ---------------------------------------------------------------------------
# Lloyd-Max quantization
# ---------------------------------------------------------------------------


class LloydMaxNonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class LlrQuantizer:
    """Scalar quantizer: 2^bits - 1 sorted thresholds, 2^bits output levels."""

    bits: int
    boundaries: np.ndarray
    levels: np.ndarray

    def quantize(self, llr):
        idx = np.searchsorted(self.boundaries, llr, side="right")
        return self.levels[idx]

    def to_json(self) -> str:
        return json.dumps(
            {"bits": self.bits, "boundaries": self.boundaries.tolist(), "levels": self.levels.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "LlrQuantizer":
        doc = json.loads(text)
        return cls(
            bits=int(doc["bits"]),
            boundaries=np.asarray(doc["boundaries"], dtype=np.float64),
            levels=np.asarray(doc["levels"], dtype=np.float64),
        )


def quantize(q: LlrQuantizer, llr):
    return q.quantize(llr)


def _folded_components(target: MixtureLlrModel):
    """Two-sided symmetric mixture: equal-probability bit-0/bit-1 conditionals."""
    w = np.concatenate([target.weights, target.weights]) * 0.5
    mu = np.concatenate([target.means, -target.means])
    sd = np.concatenate([target.sigmas, target.sigmas])
    return w, mu, sd


def _cell_stats(w, mu, sd, a, b):
    """Mass and first moment of the mixture restricted to (a, b]."""
    za = (a - mu) / sd
    zb = (b - mu) / sd
    pa = ndtr(za)
    pb = ndtr(zb)
    phi_a = np.where(np.isfinite(za), np.exp(-0.5 * za * za) / _SQRT2PI, 0.0)
    phi_b = np.where(np.isfinite(zb), np.exp(-0.5 * zb * zb) / _SQRT2PI, 0.0)
    mass = float(np.sum(w * (pb - pa)))
    moment = float(np.sum(w * (mu * (pb - pa) + sd * (phi_a - phi_b))))
    return mass, moment


def lloyd_max_design(
    target: MixtureLlrModel, bits: int, tol: float = 1e-9, max_iters: int = 100_000
) -> LlrQuantizer:
    """Minimum-MSE scalar quantizer for the symmetric two-sided LLR density.

    Alternates the two necessary conditions (thresholds at level midpoints,
    levels at cell centroids) from a symmetric initialization until the
    largest threshold movement drops below ``tol``.
    """
    if not 1 <= bits <= 8:
        raise ValueError(f"quantizer resolution {bits} outside 1..8")
    w, mu, sd = _folded_components(target)
    nlev = 1 << bits
    span = float(np.max(np.abs(mu)) + 4.0 * np.max(sd))
    levels = np.linspace(-span, span, nlev)
    bounds = 0.5 * (levels[:-1] + levels[1:])
    for _ in range(max_iters):
        edges = np.concatenate([[-np.inf], bounds, [np.inf]])
        new_levels = np.empty(nlev)
        for c in range(nlev):
            mass, moment = _cell_stats(w, mu, sd, edges[c], edges[c + 1])
            if mass <= 0.0:
                new_levels[c] = levels[c]
            else:
                new_levels[c] = moment / mass
        levels = 0.5 * (new_levels - new_levels[::-1])  # enforce exact symmetry
        new_bounds = 0.5 * (levels[:-1] + levels[1:])
        move = float(np.max(np.abs(new_bounds - bounds)))
        bounds = new_bounds
        if move < tol:
            return LlrQuantizer(bits=bits, boundaries=bounds, levels=levels)
    raise LloydMaxNonConvergence(
        f"Lloyd-Max did not reach threshold tolerance {tol} within {max_iters} iterations"
    )


def quantizer_mse(q: LlrQuantizer, target: MixtureLlrModel) -> float:
    """Mean squared quantization error under the symmetric LLR density."""
    w, mu, sd = _folded_components(target)
    edges = np.concatenate([[-np.inf], q.boundaries, [np.inf]])
    total = 0.0
    for c, lev in enumerate(q.levels):
        a, b = edges[c], edges[c + 1]
        za = (a - mu) / sd
        zb = (b - mu) / sd
        pa, pb = ndtr(za), ndtr(zb)
        phi_a = np.where(np.isfinite(za), np.exp(-0.5 * za * za) / _SQRT2PI, 0.0)
        phi_b = np.where(np.isfinite(zb), np.exp(-0.5 * zb * zb) / _SQRT2PI, 0.0)
        zphi_a = np.where(np.isfinite(za), za, 0.0) * phi_a
        zphi_b = np.where(np.isfinite(zb), zb, 0.0) * phi_b
        mass = pb - pa
        total += float(
            np.sum(
                w
                * (
                    (mu - lev) ** 2 * mass
                    + 2.0 * (mu - lev) * sd * (phi_a - phi_b)
                    + sd**2 * (mass + zphi_a - zphi_b)
                )
            )
        )
    return total


def uniform_quantizer(bits: int, step: float) -> LlrQuantizer:
    """Symmetric mid-rise uniform quantizer (comparison baseline)."""
    nlev = 1 << bits
    half = nlev // 2
    pos = (2.0 * np.arange(half) + 1.0) * step / 2.0
    levels = np.concatenate([-pos[::-1], pos])
    bounds = 0.5 * (levels[:-1] + levels[1:])
    return LlrQuantizer(bits=bits, boundaries=bounds, levels=levels)
