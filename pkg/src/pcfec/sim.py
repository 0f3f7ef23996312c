"""Monte Carlo BER harness: configuration, sweeps, deterministic seeding, CSV.

Reproducibility contract: every frame draws its message and noise from a
dedicated stream seeded by (master_seed, snr_index, frame_index), batches
have a fixed size, and the stop rule is evaluated at batch boundaries, so a
sweep's output is bit-identical for any worker count.  The CSV ``seconds``
column is written as 0.000 unless timing output is explicitly requested,
keeping default output byte-stable across reruns.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bch import cached_code
from .channel import ChannelModel, LlrQuantizer, ebn0_to_sigma, esn0_db_to_sigma, lloyd_max_design, mixture_model
from .product import CombiningLut, DecoderConfig, ProductCode, hard_decisions

CSV_HEADER = "ebn0_db,frames,bit_errors,frame_errors,ber,fer,seconds,seed,truncated"

DECODERS = ("ibdd", "ideal_ibdd", "ibdd_sr", "ibdd_cr")


class ConfigError(ValueError):
    """Invalid simulation configuration; the message names the offending key."""


@dataclass
class SimConfig:
    v: int
    t: int
    decoder: str
    snr_points_db: list[float]
    cr_iterations: int = 10
    appended_ibdd_iterations: int = 2
    sr_weights: list[float] | float | None = None
    channel_kind: str = "biawgn"
    bicm_points_per_dim: int = 4
    llr_method: str = "maxlog"
    quantizer_bits: int | None = None
    quantizer_design_esn0_db: float | None = None
    quantizer_path: str | None = None
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    batch_frames: int = 32
    master_seed: int = 1
    lut_path: str | None = None

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> "SimConfig":
        def need(d, key, ctx):
            if key not in d:
                raise ConfigError(f"{ctx}{key}: missing required key")
            return d[key]

        if not isinstance(doc, dict):
            raise ConfigError("top level: expected a JSON object")
        code = need(doc, "code", "")
        v = int(need(code, "v", "code."))
        t = int(need(code, "t", "code."))
        decoder = need(doc, "decoder", "")
        if decoder not in DECODERS:
            raise ConfigError(f"decoder: unknown value {decoder!r} (expected one of {DECODERS})")
        snr = need(doc, "snr", "")
        if "points_db" in snr:
            points = [float(p) for p in snr["points_db"]]
        elif {"start_db", "stop_db", "step_db"} <= snr.keys():
            start, stop, step = (float(snr[k]) for k in ("start_db", "stop_db", "step_db"))
            if step <= 0:
                raise ConfigError("snr.step_db: must be positive")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            points = [round(start + i * step, 10) for i in range(count)]
        else:
            raise ConfigError("snr: need either points_db or start_db/stop_db/step_db")
        if not points:
            raise ConfigError("snr: empty grid")

        cfg = cls(v=v, t=t, decoder=decoder, snr_points_db=points)
        sched = doc.get("schedule", {})
        cfg.cr_iterations = int(sched.get("cr_iterations", cfg.cr_iterations))
        cfg.appended_ibdd_iterations = int(
            sched.get("appended_ibdd_iterations", cfg.appended_ibdd_iterations)
        )
        if cfg.cr_iterations < 0 or cfg.appended_ibdd_iterations < 0:
            raise ConfigError("schedule: iteration counts must be nonnegative")
        cfg.sr_weights = doc.get("sr_weights")
        chan = doc.get("channel", {"kind": "biawgn"})
        kind = chan.get("kind", "biawgn")
        if kind not in ("biawgn", "bicm"):
            raise ConfigError(f"channel.kind: unknown value {kind!r}")
        cfg.channel_kind = kind
        if kind == "bicm":
            M = int(need(chan, "M", "channel."))
            if M < 2 or M & (M - 1):
                raise ConfigError(f"channel.M: {M} is not a power of two >= 2")
            cfg.bicm_points_per_dim = M
        cfg.llr_method = chan.get("llr", "maxlog")
        if cfg.llr_method not in ("exact", "maxlog"):
            raise ConfigError(f"channel.llr: unknown value {cfg.llr_method!r}")
        quant = chan.get("quantizer")
        if quant is not None:
            if "path" in quant:
                cfg.quantizer_path = str(quant["path"])
            else:
                bits = int(need(quant, "bits", "channel.quantizer."))
                if not 1 <= bits <= 8:
                    raise ConfigError(f"channel.quantizer.bits: {bits} outside 1..8")
                cfg.quantizer_bits = bits
                if "design_esn0_db" not in quant:
                    raise ConfigError(
                        "channel.quantizer.design_esn0_db: required when designing from bits"
                    )
                cfg.quantizer_design_esn0_db = float(quant["design_esn0_db"])
        stop = doc.get("stop", {})
        cfg.min_frame_errors = int(stop.get("min_frame_errors", cfg.min_frame_errors))
        cfg.max_frames = int(stop.get("max_frames", cfg.max_frames))
        if cfg.min_frame_errors < 1:
            raise ConfigError("stop.min_frame_errors: must be >= 1")
        if cfg.max_frames < 1:
            raise ConfigError("stop.max_frames: must be >= 1")
        cfg.batch_frames = int(doc.get("batch_frames", cfg.batch_frames))
        if cfg.batch_frames < 1:
            raise ConfigError("batch_frames: must be >= 1")
        cfg.master_seed = int(doc.get("master_seed", cfg.master_seed))
        lut = doc.get("lut_path")
        if decoder == "ibdd_cr":
            if lut is None:
                raise ConfigError("lut_path: required for decoder ibdd_cr")
        if lut is not None and base_dir is not None and not Path(lut).is_absolute():
            lut = str(base_dir / lut)
        cfg.lut_path = lut
        if cfg.quantizer_path and base_dir is not None and not Path(cfg.quantizer_path).is_absolute():
            cfg.quantizer_path = str(base_dir / cfg.quantizer_path)
        if decoder == "ibdd_sr" and cfg.sr_weights is None:
            raise ConfigError("sr_weights: required for decoder ibdd_sr")
        return cfg

    @classmethod
    def from_json_file(cls, path: str | Path) -> "SimConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(doc, base_dir=path.parent)


@dataclass
class SimResult:
    ebn0_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    seconds: float
    seed: int
    truncated: bool


def format_csv(results: list[SimResult], timing: bool = False) -> str:
    lines = [CSV_HEADER]
    for r in results:
        secs = f"{r.seconds:.3f}" if timing else "0.000"
        lines.append(
            f"{r.ebn0_db:g},{r.frames},{r.bit_errors},{r.frame_errors},"
            f"{r.ber:.6e},{r.fer:.6e},{secs},{r.seed},{int(r.truncated)}"
        )
    return "\n".join(lines) + "\n"


def write_csv(results: list[SimResult], path: str | Path, timing: bool = False) -> None:
    Path(path).write_text(format_csv(results, timing))


def _load_lut(cfg: SimConfig) -> CombiningLut | None:
    if cfg.decoder != "ibdd_cr":
        return None
    if cfg.lut_path is None:
        raise ConfigError("lut_path: required for decoder ibdd_cr")
    path = Path(cfg.lut_path)
    if not path.exists():
        raise ConfigError(f"lut_path: file not found: {path}")
    return CombiningLut.from_json(path.read_text())


def _load_quantizer(cfg: SimConfig) -> LlrQuantizer | None:
    if cfg.quantizer_path is not None:
        path = Path(cfg.quantizer_path)
        if not path.exists():
            raise ConfigError(f"channel.quantizer.path: file not found: {path}")
        return LlrQuantizer.from_json(path.read_text())
    if cfg.quantizer_bits is None:
        return None
    sigma = esn0_db_to_sigma(cfg.quantizer_design_esn0_db)
    if cfg.channel_kind == "biawgn":
        model = ChannelModel.biawgn(sigma)
    else:
        model = ChannelModel.bicm(cfg.bicm_points_per_dim, sigma, cfg.llr_method)
    return lloyd_max_design(mixture_model(model), cfg.quantizer_bits)


def _frame_rng(master_seed: int, snr_index: int, frame_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, snr_index, frame_index))))


def _transmit_batch(chan: ChannelModel, cws: np.ndarray, noise: np.ndarray,
                    quantizer: LlrQuantizer | None) -> np.ndarray:
    """Per-bit LLR matrices for a batch of codeword arrays."""
    b, n, _ = cws.shape
    nbits = n * n
    bits = cws.reshape(b, nbits)
    if chan.kind == "biawgn":
        y = (1.0 - 2.0 * bits.astype(np.float64)) + chan.sigma * noise
        llr = 2.0 * y / chan.sigma**2
    else:
        m = chan.m
        nsym = -(-nbits // m)  # frame bits padded with zeros to fill the last symbol
        padded = np.zeros((b, nsym * m), dtype=np.uint8)
        padded[:, :nbits] = bits
        amps = chan.map_bits(padded.reshape(-1)).reshape(b, nsym)
        y = amps + chan.sigma * noise
        llr = chan.llr_from_obs(y.reshape(-1)).reshape(b, nsym * m)[:, :nbits]
    if quantizer is not None:
        llr = quantizer.quantize(llr)
    return np.ascontiguousarray(llr.reshape(b, n, n))


def _noise_len(chan: ChannelModel, nbits: int) -> int:
    if chan.kind == "biawgn":
        return nbits
    return -(-nbits // chan.m)


def run_ber_sweep(config: SimConfig, threads: int | None = None,
                  progress: bool = False) -> list[SimResult]:
    """Run the configured sweep; one result row per SNR point."""
    import numba

    if threads is not None:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
    code = cached_code(config.v, config.t)
    pc = ProductCode(code)
    lut = _load_lut(config)
    quantizer = _load_quantizer(config)
    dec_cfg = DecoderConfig(
        cr_iterations=config.cr_iterations,
        appended_ibdd_iterations=config.appended_ibdd_iterations,
        sr_weights=config.sr_weights,
    )
    if config.decoder == "ibdd_cr" and lut.iterations < dec_cfg.cr_iterations:
        raise ConfigError(
            f"lut_path: LUT has {lut.iterations} iterations < schedule.cr_iterations="
            f"{dec_cfg.cr_iterations}"
        )
    n, k = pc.n, pc.k
    nbits = n * n
    results = []
    for si, ebn0_db in enumerate(config.snr_points_db):
        sigma = ebn0_to_sigma(
            ebn0_db, pc.rate,
            bits_per_dim=1 if config.channel_kind == "biawgn" else int(math.log2(config.bicm_points_per_dim)),
            kind=config.channel_kind,
        )
        if config.channel_kind == "biawgn":
            chan = ChannelModel.biawgn(sigma)
        else:
            chan = ChannelModel.bicm(config.bicm_points_per_dim, sigma, config.llr_method)
        nnoise = _noise_len(chan, nbits)
        t0 = time.perf_counter()
        frames = bit_errors = frame_errors = 0
        while frames < config.max_frames and frame_errors < config.min_frame_errors:
            b = min(config.batch_frames, config.max_frames - frames)
            msgs = np.empty((b, k, k), dtype=np.uint8)
            noise = np.empty((b, nnoise), dtype=np.float64)
            for fi in range(b):
                rng = _frame_rng(config.master_seed, si, frames + fi)
                msgs[fi] = rng.integers(0, 2, (k, k), dtype=np.uint8)
                noise[fi] = rng.standard_normal(nnoise)
            cws = pc.encode_batch(msgs)
            llrs = _transmit_batch(chan, cws, noise, quantizer)
            psis = hard_decisions(llrs)
            if config.decoder == "ibdd":
                pc.decode_batch_plain(psis, dec_cfg.total_iterations, None)
            elif config.decoder == "ideal_ibdd":
                pc.decode_batch_plain(psis, dec_cfg.total_iterations, cws)
            elif config.decoder == "ibdd_sr":
                w = dec_cfg.weights_array()
                dummy = np.zeros((max(dec_cfg.cr_iterations, 1), 6))
                pc.decode_batch_combine(psis, llrs, dummy, dummy, w, True,
                                        dec_cfg.cr_iterations, dec_cfg.appended_ibdd_iterations)
            else:
                wd = np.zeros(max(dec_cfg.cr_iterations, 1))
                pc.decode_batch_combine(
                    psis, llrs, np.ascontiguousarray(lut.row_tables),
                    np.ascontiguousarray(lut.col_tables), wd, False,
                    dec_cfg.cr_iterations, dec_cfg.appended_ibdd_iterations)
            errs = (psis ^ cws).reshape(b, -1).sum(axis=1)
            bit_errors += int(errs.sum())
            frame_errors += int(np.count_nonzero(errs))
            frames += b
        seconds = time.perf_counter() - t0
        truncated = frame_errors < config.min_frame_errors
        results.append(
            SimResult(
                ebn0_db=ebn0_db, frames=frames, bit_errors=bit_errors,
                frame_errors=frame_errors, ber=bit_errors / (frames * nbits),
                fer=frame_errors / frames, seconds=seconds,
                seed=config.master_seed, truncated=truncated,
            )
        )
        if progress:
            r = results[-1]
            print(
                f"  {ebn0_db:g} dB: frames={r.frames} ber={r.ber:.3e} fer={r.fer:.3e} "
                f"({seconds:.1f}s)", flush=True,
            )
    return results
