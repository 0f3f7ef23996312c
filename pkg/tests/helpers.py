"""Shared test oracles: brute-force decoding, mirror decoders, curve probes.

The mirror decoders re-implement the iterative decoders directly from their
definitions on top of the pure Python component decoder, without any of the
batching/early-exit machinery, and are the ground truth the fast kernels are
compared against.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from pcfec.bch import BchCode, bdd_decode
from pcfec.sim import SimConfig, SimResult, run_ber_sweep


def enumerate_codewords(code: BchCode) -> np.ndarray:
    msgs = ((np.arange(1 << code.k)[:, None] >> np.arange(code.k)) & 1).astype(np.uint8)
    return np.array([code.encode(m) for m in msgs])


def brute_bdd(codewords: np.ndarray, word: np.ndarray, t: int):
    """Nearest-codeword search: the defining semantics of bounded-distance
    decoding (the codeword within distance t is unique when it exists)."""
    d = (codewords ^ word).sum(axis=1)
    i = int(d.argmin())
    if d[i] <= t:
        return True, codewords[i]
    return False, None


# -- mirror decoders ---------------------------------------------------------


def mirror_plain_pass(code: BchCode, psi: np.ndarray, rowwise: bool, truth=None) -> np.ndarray:
    out = psi.copy()
    for i in range(code.n):
        word = psi[i, :] if rowwise else psi[:, i]
        res = bdd_decode(code, word)
        if not res.corrected:
            continue
        if truth is not None:
            tw = truth[i, :] if rowwise else truth[:, i]
            if not np.array_equal(res.codeword, tw):
                continue
        if rowwise:
            out[i, :] = res.codeword
        else:
            out[:, i] = res.codeword
    return out


def mirror_ibdd(code: BchCode, hard: np.ndarray, iters: int, truth=None) -> np.ndarray:
    psi = hard.copy()
    for _ in range(iters):
        nxt = mirror_plain_pass(code, psi, True, truth)
        nxt = mirror_plain_pass(code, nxt, False, truth)
        if np.array_equal(nxt, psi):
            return nxt
        psi = nxt
    return psi


def mirror_combine_pass(code, psi, llr, mu_cells, weight, rowwise) -> np.ndarray:
    out = psi.copy()
    for i in range(code.n):
        word = psi[i, :] if rowwise else psi[:, i]
        res = bdd_decode(code, word)
        for j in range(code.n):
            l = llr[i, j] if rowwise else llr[j, i]
            mu = 0 if not res.corrected else (1 - 2 * int(res.codeword[j]))
            if mu_cells is None:
                off = weight * mu
            else:
                cell = (0 if l < 0 else 3) + (0 if mu < 0 else (1 if mu > 0 else 2))
                off = mu_cells[cell]
            soft = off + l
            bit = 0 if soft > 0 else (1 if soft < 0 else (1 if l < 0 else 0))
            if rowwise:
                out[i, j] = bit
            else:
                out[j, i] = bit
    return out


def mirror_cr(code, llr, row_tables, col_tables, cr_iters, app_iters) -> np.ndarray:
    psi = (llr < 0).astype(np.uint8)
    for it in range(cr_iters):
        psi = mirror_combine_pass(code, psi, llr, row_tables[it], 0.0, True)
        psi = mirror_combine_pass(code, psi, llr, col_tables[it], 0.0, False)
    return mirror_ibdd(code, psi, app_iters)


def mirror_sr(code, llr, weights, sr_iters, app_iters) -> np.ndarray:
    psi = (llr < 0).astype(np.uint8)
    for it in range(sr_iters):
        psi = mirror_combine_pass(code, psi, llr, None, weights[it], True)
        psi = mirror_combine_pass(code, psi, llr, None, weights[it], False)
    return mirror_ibdd(code, psi, app_iters)


# -- cached sweep points and waterfall probing -------------------------------


def run_point_cached(cfg: SimConfig, cache_dir: Path, threads: int = 2) -> SimResult:
    """One-SNR-point sweep, memoized on disk by the full configuration."""
    assert len(cfg.snr_points_db) == 1
    key = hashlib.sha256(json.dumps(asdict(cfg), sort_keys=True, default=str).encode()).hexdigest()[:24]
    path = cache_dir / "points" / f"{key}.json"
    if path.exists():
        return SimResult(**json.loads(path.read_text()))
    res = run_ber_sweep(cfg, threads=threads)[0]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(asdict(res)))
    return res


def ebn0_at_ber(make_cfg, grid_db, target_ber, cache_dir, threads: int = 2,
                require_frame_errors: int | None = None):
    """Walk an ascending Eb/N0 grid until BER crosses below the target and
    log-interpolate the crossing.  Returns (ebn0_db, list of results)."""
    results = []
    prev = None
    for db in grid_db:
        res = run_point_cached(make_cfg(db), cache_dir, threads)
        results.append(res)
        if res.ber <= target_ber:
            if prev is None:
                raise AssertionError(
                    f"grid starts below target: BER({db} dB) = {res.ber:.3e} <= {target_ber:.1e}"
                )
            if res.ber <= 0.0:
                raise AssertionError(
                    f"BER({db} dB) = 0; grid too coarse to interpolate the {target_ber:.0e} crossing"
                )
            if require_frame_errors is not None:
                for r in (prev, res):
                    assert r.frame_errors >= require_frame_errors, (
                        f"bracket point {r.ebn0_db} dB has {r.frame_errors} frame errors "
                        f"< {require_frame_errors}"
                    )
            lo_db, hi_db = prev.ebn0_db, res.ebn0_db
            f = (np.log10(prev.ber) - np.log10(target_ber)) / (np.log10(prev.ber) - np.log10(res.ber))
            return lo_db + f * (hi_db - lo_db), results
        prev = res
    raise AssertionError(
        f"no BER <= {target_ber:.1e} on grid {list(grid_db)}; last BER {results[-1].ber:.3e}"
    )
