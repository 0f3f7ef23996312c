"""Density evolution for product-code ensembles under combining decoders.

Tracks the message error probability x of the extrinsic binary messages
through alternating row/column constraint processing.  Inputs are the
component code's conditional decoding-outcome probabilities (estimated by
Monte Carlo with the real extrinsic decoder, or exhaustively for tiny
codes), mixed binomially at the current x; outputs are per-iteration
reliability offsets and the x recursion, from which the decoder LUT is
exported and decoding thresholds are located.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.stats import binom

from . import _kernels
from .bch import BchCode
from .channel import MixtureLlrModel, qfunc
from .product import CombiningLut


@dataclass
class TransitionTable:
    """Conditional outcome probabilities of one extrinsic component decode.

    Entry i conditions on i errors among the other n-1 positions; the
    p_* rows condition on the target bit being received in error, the q_*
    rows on it being received correctly.  Within the decoding radius the
    entries are deterministic (p_cor = 1 for i <= t-1, q_cor = 1 for
    i <= t) and are pinned exactly rather than sampled.
    """

    v: int
    t: int
    n: int
    p_err: np.ndarray
    p_cor: np.ndarray
    p_eras: np.ndarray
    q_err: np.ndarray
    q_cor: np.ndarray
    q_eras: np.ndarray
    p_samples: np.ndarray
    q_samples: np.ndarray
    exhaustive: bool
    samples_per_weight: int
    seed: int | None

    def to_json(self) -> str:
        entries = []
        for i in range(self.n):
            entries.append(
                {
                    "i": i,
                    "p_err": self.p_err[i],
                    "p_cor": self.p_cor[i],
                    "p_eras": self.p_eras[i],
                    "q_err": self.q_err[i],
                    "q_cor": self.q_cor[i],
                    "q_eras": self.q_eras[i],
                    "p_samples": int(self.p_samples[i]),
                    "q_samples": int(self.q_samples[i]),
                }
            )
        doc = {
            "code": {"v": self.v, "t": self.t, "n": self.n},
            "exhaustive": self.exhaustive,
            "samples_per_weight": self.samples_per_weight,
            "seed": self.seed,
            "entries": entries,
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "TransitionTable":
        doc = json.loads(text)
        n = int(doc["code"]["n"])
        arrays = {k: np.zeros(n) for k in ("p_err", "p_cor", "p_eras", "q_err", "q_cor", "q_eras")}
        p_samples = np.zeros(n, dtype=np.int64)
        q_samples = np.zeros(n, dtype=np.int64)
        for e in doc["entries"]:
            i = int(e["i"])
            for k in arrays:
                arrays[k][i] = e[k]
            p_samples[i] = e["p_samples"]
            q_samples[i] = e["q_samples"]
        return cls(
            v=int(doc["code"]["v"]),
            t=int(doc["code"]["t"]),
            n=n,
            exhaustive=bool(doc["exhaustive"]),
            samples_per_weight=int(doc["samples_per_weight"]),
            seed=doc["seed"],
            p_samples=p_samples,
            q_samples=q_samples,
            **arrays,
        )


def _class_seed(seed: int, weight: int, target_in_error: bool) -> int:
    ss = np.random.SeedSequence((seed, weight, int(target_in_error)))
    return int(ss.generate_state(1)[0])


def estimate_transition_table(
    code: BchCode,
    samples_per_weight: int = 20_000,
    seed: int = 0,
    exhaustive: bool | None = None,
) -> TransitionTable:
    """Estimate the outcome table with the real extrinsic decoder.

    Codes with n <= 15 are enumerated exhaustively (every target position and
    every error pattern); larger codes draw ``samples_per_weight`` random
    patterns per weight class and per conditioning.
    """
    n, t = code.n, code.t
    if exhaustive is None:
        exhaustive = n <= 15
    tabs = _kernels.build_tables(code)
    args = (tabs["pow"], tabs["chien"], tabs["log"], tabs["alog"], tabs["qsolve"])
    cols = {k: np.zeros(n) for k in ("p_err", "p_cor", "p_eras", "q_err", "q_cor", "q_eras")}
    p_samples = np.zeros(n, dtype=np.int64)
    q_samples = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for target_in_error in (True, False):
            prefix = "p" if target_in_error else "q"
            radius = t - 1 if target_in_error else t
            if not exhaustive and i <= radius:
                cols[prefix + "_cor"][i] = 1.0
                continue
            if exhaustive:
                combo_list = list(combinations(range(n - 1), i))
                combos = np.array(combo_list, dtype=np.int64).reshape(len(combo_list), i)
                counts = _kernels._exhaustive_transition(n, t, combos, target_in_error, *args)
            else:
                counts = _kernels._sample_transition(
                    n, t, i, samples_per_weight, _class_seed(seed, i, target_in_error),
                    target_in_error, *args,
                )
            total = counts.sum()
            cols[prefix + "_err"][i] = counts[0] / total
            cols[prefix + "_cor"][i] = counts[1] / total
            cols[prefix + "_eras"][i] = counts[2] / total
            if prefix == "p":
                p_samples[i] = total
            else:
                q_samples[i] = total
    return TransitionTable(
        v=code.v, t=t, n=n, exhaustive=exhaustive,
        samples_per_weight=0 if exhaustive else samples_per_weight,
        seed=None if exhaustive else seed,
        p_samples=p_samples, q_samples=q_samples, **cols,
    )


@dataclass(frozen=True)
class OutcomeProbs:
    """The six decode-outcome probabilities at one message error rate x.

    p_* condition on the target bit received in error, q_* on it received
    correctly; each triple is a probability simplex.
    """

    p_err: float
    p_cor: float
    p_eras: float
    q_err: float
    q_cor: float
    q_eras: float

    def as_cells(self) -> np.ndarray:
        """Cell-ordered multipliers matching product.COMBINING_CELLS."""
        return np.array([self.p_err, self.p_cor, self.p_eras,
                         self.q_err, self.q_cor, self.q_eras])


def outcome_probs(table: TransitionTable, x: float) -> OutcomeProbs:
    """Binomial mixture of the table at error rate x over the n-1 companions."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    n = table.n
    if x == 0.0:
        weights = np.zeros(n)
        weights[0] = 1.0
    elif x == 1.0:
        weights = np.zeros(n)
        weights[-1] = 1.0
    else:
        weights = binom.pmf(np.arange(n), n - 1, x)
    return OutcomeProbs(
        p_err=float(weights @ table.p_err),
        p_cor=float(weights @ table.p_cor),
        p_eras=float(weights @ table.p_eras),
        q_err=float(weights @ table.q_err),
        q_cor=float(weights @ table.q_cor),
        q_eras=float(weights @ table.q_eras),
    )


def _log_ratio(num: float, den: float) -> float:
    if num == 0.0 and den == 0.0:
        return 0.0  # unreachable cell; neutral offset
    if num == 0.0:
        return -math.inf
    if den == 0.0:
        return math.inf
    return math.log(num / den)


def combining_table(probs: OutcomeProbs, clamp: float | None = None) -> np.ndarray:
    """Reliability offsets for the six cells (COMBINING_CELLS order).

    Each offset is the log-ratio of the two outcome probabilities consistent
    with the observed (decoder output, channel sign) pair under the two bit
    hypotheses; the table is antisymmetric under joint sign flips.
    """
    err_cell = _log_ratio(probs.p_err, probs.q_cor)
    cor_cell = _log_ratio(probs.p_cor, probs.q_err)
    eras_cell = _log_ratio(probs.p_eras, probs.q_eras)
    # the positive-sign cells are exact negations of the negative-sign ones
    mu = np.array([err_cell, cor_cell, eras_cell, -cor_cell, -err_cell, -eras_cell])
    if clamp is not None:
        mu = np.clip(mu, -clamp, clamp)
    return mu


def tail_wrong_given_negative(offset: float, model: MixtureLlrModel) -> float:
    """P(l < min(-offset, 0) | bit 0) under the mixture LLR law.

    This is the probability that the combined value offset + l stays
    negative when the channel sign is already negative.  The interval is
    truncated at zero by the conditioning, so only a positive offset can
    shrink it; the truncation also makes x = 0 an exact fixed point of the
    recursion.
    """
    if offset == -math.inf:
        return float(np.sum(model.weights * qfunc(model.means / model.sigmas)))
    a = max(offset, 0.0)
    return float(np.sum(model.weights * qfunc((model.means + a) / model.sigmas)))


def tail_wrong_given_positive(offset: float, model: MixtureLlrModel) -> float:
    """P(0 < l < -offset | bit 0): a positive channel sign flips to an error
    only when the offset is negative and dominates the LLR."""
    if offset >= 0.0:
        return 0.0
    hi = qfunc((model.means + offset) / model.sigmas)
    lo = qfunc(model.means / model.sigmas)
    return float(np.sum(model.weights * np.maximum(hi - lo, 0.0)))


def de_step_from_probs(probs: OutcomeProbs, model: MixtureLlrModel) -> float:
    mults = probs.as_cells()
    mu = combining_table(probs)
    x_out = 0.0
    for c in range(3):
        if mults[c] > 0.0:
            x_out += mults[c] * tail_wrong_given_negative(mu[c], model)
    for c in range(3, 6):
        if mults[c] > 0.0:
            x_out += mults[c] * tail_wrong_given_positive(mu[c], model)
    return x_out


def de_step(table: TransitionTable, x_in: float, llr_model: MixtureLlrModel) -> float:
    """One half-iteration of the x recursion (row or column stage)."""
    return de_step_from_probs(outcome_probs(table, x_in), llr_model)


@dataclass
class DeTrajectory:
    """Recorded density-evolution run: x values and per-iteration offsets."""

    x0: float
    x_row: list[float]
    x_col: list[float]
    row_probs: list[OutcomeProbs]
    col_probs: list[OutcomeProbs]
    row_mu: list[np.ndarray]
    col_mu: list[np.ndarray]
    converged: bool
    stalled: bool

    @property
    def iterations(self) -> int:
        return len(self.x_col)

    @property
    def final_x(self) -> float:
        return self.x_col[-1] if self.x_col else self.x0


def de_run(
    table: TransitionTable,
    llr_model: MixtureLlrModel,
    max_iters: int,
    min_iters: int = 1,
    stop_x: float = 1e-12,
    stall_tol: float = 1e-12,
) -> DeTrajectory:
    """Iterate row/column steps from x = p_ch, recording offsets per iteration.

    Stops early on success (x < stop_x) or on a stalled fixed point, but
    never before ``min_iters`` iterations so callers can export a LUT of a
    required depth.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    traj = DeTrajectory(
        x0=llr_model.p_ch, x_row=[], x_col=[], row_probs=[], col_probs=[],
        row_mu=[], col_mu=[], converged=False, stalled=False,
    )
    x = llr_model.p_ch
    prev = x
    for it in range(max_iters):
        probs_r = outcome_probs(table, x)
        traj.row_probs.append(probs_r)
        traj.row_mu.append(combining_table(probs_r))
        x_r = de_step_from_probs(probs_r, llr_model)
        probs_c = outcome_probs(table, x_r)
        traj.col_probs.append(probs_c)
        traj.col_mu.append(combining_table(probs_c))
        x = de_step_from_probs(probs_c, llr_model)
        traj.x_row.append(x_r)
        traj.x_col.append(x)
        if it + 1 >= min_iters:
            if x < stop_x:
                traj.converged = True
                break
            if abs(x - prev) < stall_tol:
                traj.stalled = True
                break
        prev = x
    return traj


def threshold_search(
    table: TransitionTable,
    model_family: Callable[[float], MixtureLlrModel],
    bracket: tuple[float, float],
    target_x: float = 1e-10,
    tol_db: float = 0.005,
    max_iters: int = 5000,
) -> float:
    """Bisect the Eb/N0 boundary where density evolution converges to zero.

    ``model_family`` maps an Eb/N0 in dB to the LLR mixture at that SNR.
    The run must fail at bracket[0] and succeed at bracket[1].
    """

    def succeeds(ebn0_db: float) -> bool:
        traj = de_run(table, model_family(ebn0_db), max_iters, stop_x=target_x, stall_tol=1e-15)
        return traj.converged

    lo, hi = bracket
    if lo >= hi:
        raise ValueError(f"bracket {bracket} is not increasing")
    ok_lo, ok_hi = succeeds(lo), succeeds(hi)
    if ok_lo == ok_hi:
        raise ValueError(
            f"bracket endpoints agree (both {'converge' if ok_lo else 'fail'}); "
            f"widen [{lo}, {hi}] dB"
        )
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if succeeds(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def export_lut(
    trajectory: DeTrajectory,
    iterations: int,
    shared_row_col: bool = True,
    clamp: float = 64.0,
    design_snr_db: float | None = None,
) -> CombiningLut:
    """Package per-iteration offsets for the real decoder.

    With ``shared_row_col`` the row-stage table of each iteration is reused
    for column decoding.  Unbounded log-ratios saturate at +-clamp.
    """
    if trajectory.iterations < iterations:
        raise ValueError(
            f"trajectory records {trajectory.iterations} iterations < requested {iterations}"
        )
    rows = np.array([np.clip(mu, -clamp, clamp) for mu in trajectory.row_mu[:iterations]])
    if shared_row_col:
        cols = rows
    else:
        cols = np.array([np.clip(mu, -clamp, clamp) for mu in trajectory.col_mu[:iterations]])
    return CombiningLut(
        row_tables=rows, col_tables=cols, shared_row_col=shared_row_col,
        design_snr_db=design_snr_db, clamp=clamp,
    )
