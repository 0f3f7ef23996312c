"""Product codes and the iterative bounded-distance decoder family.

Decoders share one internal data flow: every message passed between the row
and column stages is a single hard bit.  They differ only in how a stage
turns the component decoding result and the channel LLR into that bit:

  * ibdd:       accept the decoded word, keep the input on failure;
  * ideal_ibdd: genie variant that also keeps the input whenever the decoded
                word differs from the transmitted one (no miscorrections);
  * ibdd_sr:    bit = sign(weight * bdd_output + llr);
  * ibdd_cr:    bit = sign(offset(bdd_output, sign llr) + llr) with
                per-iteration offsets from a lookup table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bch import BchCode

# index order for the six combining cells: (bdd_output, channel_sign) with
# channel_sign -1 first, bdd_output in order (-1, +1, erased).
COMBINING_CELLS: tuple[tuple[int, int], ...] = (
    (-1, -1),
    (1, -1),
    (0, -1),
    (-1, 1),
    (1, 1),
    (0, 1),
)


def cell_index(bdd_output: int, channel_sign: int) -> int:
    return COMBINING_CELLS.index((bdd_output, channel_sign))


@dataclass(frozen=True)
class CombiningLut:
    """Per-iteration reliability offsets indexed by (BDD output, channel sign).

    ``row_tables[i, c]`` is the offset applied during row decoding of
    iteration i+1 for cell c (see COMBINING_CELLS); ``col_tables`` likewise
    for column decoding and equals ``row_tables`` when ``shared_row_col``.
    ``design_snr_db`` records the single Eb/N0 the tables were derived at.
    """

    row_tables: np.ndarray
    col_tables: np.ndarray
    shared_row_col: bool
    design_snr_db: float | None = None
    clamp: float = 64.0

    @property
    def iterations(self) -> int:
        return self.row_tables.shape[0]

    def check_antisymmetry(self, tol: float = 0.0) -> bool:
        """offset(b, s) == -offset(-b, -s) for every iteration and cell."""
        pair = {0: 4, 1: 3, 2: 5, 4: 0, 3: 1, 5: 2}
        for tabs in (self.row_tables, self.col_tables):
            for c, c2 in pair.items():
                if not np.all(np.abs(tabs[:, c] + tabs[:, c2]) <= tol):
                    return False
        return True

    def to_json(self) -> str:
        doc = {
            "design_snr_db": self.design_snr_db,
            "shared_row_col": self.shared_row_col,
            "clamp": self.clamp,
            "iterations": [
                {"mu": self.row_tables[i].tolist()}
                if self.shared_row_col
                else {"mu": self.row_tables[i].tolist(), "mu_col": self.col_tables[i].tolist()}
                for i in range(self.iterations)
            ],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "CombiningLut":
        doc = json.loads(text)
        rows = np.array([it["mu"] for it in doc["iterations"]], dtype=np.float64)
        shared = bool(doc["shared_row_col"])
        if shared:
            cols = rows
        else:
            cols = np.array([it["mu_col"] for it in doc["iterations"]], dtype=np.float64)
        return cls(
            row_tables=rows,
            col_tables=cols,
            shared_row_col=shared,
            design_snr_db=doc.get("design_snr_db"),
            clamp=float(doc.get("clamp", 64.0)),
        )


@dataclass
class DecoderConfig:
    """Iteration schedule and combining parameters.

    Default schedule is 10 combining iterations followed by 2 conventional
    iBDD iterations (12 total); plain and genie iBDD run the total count.
    ``tie_break`` fixes the bit when the combined soft value is exactly zero;
    the only supported policy keeps the channel hard decision.
    """

    cr_iterations: int = 10
    appended_ibdd_iterations: int = 2
    sr_weights: np.ndarray | float | None = None
    tie_break: str = "channel"

    def __post_init__(self):
        if self.tie_break != "channel":
            raise ValueError(f"unsupported tie-break policy {self.tie_break!r}")

    @property
    def total_iterations(self) -> int:
        return self.cr_iterations + self.appended_ibdd_iterations

    def weights_array(self) -> np.ndarray:
        if self.sr_weights is None:
            raise ValueError("scaled-reliability decoding needs sr_weights")
        w = np.asarray(self.sr_weights, dtype=np.float64)
        if w.ndim == 0:
            w = np.full(self.cr_iterations, float(w))
        if w.shape != (self.cr_iterations,):
            raise ValueError(
                f"need one weight per iteration ({self.cr_iterations}), got shape {w.shape}"
            )
        if np.any(w < 0):
            raise ValueError("sr_weights must be nonnegative")
        return w


@dataclass
class DecodeReport:
    decoded: np.ndarray
    iterations_run: int
    converged: bool
    bit_errors: int | None = None


class ProductCode:
    """Two-dimensional product code with one BCH component for rows and columns."""

    def __init__(self, component: BchCode):
        self.component = component
        self.n = component.n
        self.k = component.k
        self.rate = (component.k / component.n) ** 2
        self._tables = _kernels.build_tables(component)
        # systematic generator [P | I_k]; message occupies the last k indices
        gen = np.zeros((self.k, self.n), dtype=np.uint8)
        for j in range(self.k):
            unit = np.zeros(self.k, dtype=np.uint8)
            unit[j] = 1
            gen[j] = component.encode(unit)
        self._gen = gen
        self._gen_f = gen.astype(np.float32)

    def encode(self, message: np.ndarray) -> np.ndarray:
        """Encode a k x k message; rows and columns all become codewords.

        The message block sits in the bottom-right k x k corner (indices
        n-k..n-1 along both axes), matching the component convention.
        """
        message = np.asarray(message, dtype=np.uint8)
        if message.shape != (self.k, self.k):
            raise ValueError(f"message shape {message.shape} != ({self.k}, {self.k})")
        rows = (message.astype(np.float32) @ self._gen_f) % 2.0
        full = (self._gen_f.T @ rows) % 2.0
        return full.astype(np.uint8)

    def encode_batch(self, messages: np.ndarray) -> np.ndarray:
        messages = np.asarray(messages, dtype=np.float32)
        b = messages.shape[0]
        rows = (messages.reshape(b * self.k, self.k) @ self._gen_f) % 2.0
        rows = rows.reshape(b, self.k, self.n)
        full = (self._gen_f.T[None] @ rows) % 2.0  # batched BLAS matmul
        return full.astype(np.uint8)

    # -- batch decoding entry points (used by the simulator) ----------------

    def _tabs(self):
        t = self._tables
        return t["pow"], t["chien"], t["log"], t["alog"], t["qsolve"]

    def decode_batch_plain(self, hards: np.ndarray, iters: int, truths: np.ndarray | None = None):
        genie = truths is not None
        truth_arr = truths if genie else hards
        out_iters = np.zeros(hards.shape[0], dtype=np.int64)
        out_conv = np.zeros(hards.shape[0], dtype=np.bool_)
        _kernels._batch_ibdd(hards, iters, genie, truth_arr, out_iters, out_conv,
                             *self._tabs(), self.component.t)
        return out_iters, out_conv

    def decode_batch_combine(self, hards, llrs, mu_row, mu_col, weights, use_weight,
                             main_iters, app_iters):
        out_iters = np.zeros(hards.shape[0], dtype=np.int64)
        out_conv = np.zeros(hards.shape[0], dtype=np.bool_)
        _kernels._batch_combine(hards, llrs, mu_row, mu_col, weights, use_weight,
                                main_iters, app_iters, out_iters, out_conv,
                                *self._tabs(), self.component.t)
        return out_iters, out_conv


def pc_encode(pc: ProductCode, message: np.ndarray) -> np.ndarray:
    return pc.encode(message)


def hard_decisions(llrs: np.ndarray) -> np.ndarray:
    """Sign-to-bit map: negative LLR -> 1, nonnegative -> 0."""
    return (np.asarray(llrs) < 0).astype(np.uint8)


def _report(pc, decoded, iters, conv, truth):
    errs = None if truth is None else int(np.count_nonzero(decoded ^ truth))
    return DecodeReport(decoded=decoded, iterations_run=int(iters), converged=bool(conv),
                        bit_errors=errs)


def _check_square(pc: ProductCode, mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.asarray(mat)
    if mat.shape != (pc.n, pc.n):
        raise ValueError(f"{name} shape {mat.shape} != ({pc.n}, {pc.n})")
    return mat


def ibdd_decode(pc: ProductCode, hard: np.ndarray, config: DecoderConfig | None = None,
                truth: np.ndarray | None = None) -> DecodeReport:
    """Iterative BDD: alternate row/column decoding of hard decisions."""
    config = config or DecoderConfig()
    psi = _check_square(pc, hard, "hard").astype(np.uint8)[None].copy()
    iters, conv = pc.decode_batch_plain(psi, config.total_iterations, None)
    return _report(pc, psi[0], iters[0], conv[0], truth)


def ideal_ibdd_decode(pc: ProductCode, hard: np.ndarray, truth: np.ndarray,
                      config: DecoderConfig | None = None) -> DecodeReport:
    """Genie-aided iBDD: component decodings that disagree with the
    transmitted word are treated as failures, so miscorrections never enter."""
    config = config or DecoderConfig()
    psi = _check_square(pc, hard, "hard").astype(np.uint8)[None].copy()
    truths = _check_square(pc, truth, "truth").astype(np.uint8)[None]
    iters, conv = pc.decode_batch_plain(psi, config.total_iterations, truths)
    return _report(pc, psi[0], iters[0], conv[0], truth)


def ibdd_sr_decode(pc: ProductCode, llrs: np.ndarray, config: DecoderConfig,
                   truth: np.ndarray | None = None) -> DecodeReport:
    """Scaled-reliability decoding: bit = sign(w * bdd_output + llr)."""
    llrs = _check_square(pc, llrs, "llrs").astype(np.float64)
    weights = config.weights_array()
    psi = hard_decisions(llrs)[None].copy()
    mu_dummy = np.zeros((max(config.cr_iterations, 1), 6), dtype=np.float64)
    iters, conv = pc.decode_batch_combine(
        psi, llrs[None], mu_dummy, mu_dummy, weights, True,
        config.cr_iterations, config.appended_ibdd_iterations)
    return _report(pc, psi[0], iters[0], conv[0], truth)


def ibdd_cr_decode(pc: ProductCode, llrs: np.ndarray, lut: CombiningLut,
                   config: DecoderConfig | None = None,
                   truth: np.ndarray | None = None) -> DecodeReport:
    """Combined-reliability decoding with per-iteration LUT offsets."""
    config = config or DecoderConfig()
    if lut.iterations < config.cr_iterations:
        raise ValueError(
            f"LUT covers {lut.iterations} iterations < cr_iterations={config.cr_iterations}"
        )
    llrs = _check_square(pc, llrs, "llrs").astype(np.float64)
    psi = hard_decisions(llrs)[None].copy()
    w_dummy = np.zeros(max(config.cr_iterations, 1), dtype=np.float64)
    iters, conv = pc.decode_batch_combine(
        psi, llrs[None], np.ascontiguousarray(lut.row_tables),
        np.ascontiguousarray(lut.col_tables), w_dummy, False,
        config.cr_iterations, config.appended_ibdd_iterations)
    return _report(pc, psi[0], iters[0], conv[0], truth)
