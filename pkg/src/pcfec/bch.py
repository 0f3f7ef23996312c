"""Galois fields GF(2^v) and narrow-sense binary BCH component codes.

This module is the readable reference implementation: table-driven field
arithmetic, generator construction from cyclotomic cosets, systematic
encoding, and exact bounded-distance decoding (BDD) via Berlekamp-Massey
plus Chien search.  The hot batch decoders used by the product-code
simulator live in ``pcfec._kernels`` and are tested against this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# One canonical primitive polynomial per extension degree, so codewords are
# reproducible across machines.  Bit i of the mask is the coefficient of x^i.
PRIMITIVE_POLYS: dict[int, int] = {
    3: 0b1011,                 # x^3 + x + 1
    4: 0b10011,                # x^4 + x + 1
    5: 0b100101,               # x^5 + x^2 + 1
    6: 0b1000011,              # x^6 + x + 1
    7: 0b10001001,             # x^7 + x^3 + 1
    8: 0b100011101,            # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,           # x^9 + x^4 + 1
    10: 0b10000001001,         # x^10 + x^3 + 1
    11: 0b100000000101,        # x^11 + x^2 + 1
    12: 0b1000001010011,       # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,      # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,     # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,    # x^15 + x + 1
    16: 0b10001000000001011,   # x^16 + x^12 + x^3 + x + 1
}


class GaloisField:
    """GF(2^v) arithmetic through log/antilog tables."""

    def __init__(self, v: int, primitive_poly: int | None = None):
        if not 2 <= v <= 16:
            raise ValueError(f"extension degree v={v} outside supported range 2..16")
        if primitive_poly is None:
            primitive_poly = PRIMITIVE_POLYS.get(v)
            if primitive_poly is None:
                raise ValueError(f"no canonical primitive polynomial for v={v}")
        self.v = v
        self.primitive_polynomial = primitive_poly
        self.order = 1 << v
        self.n = self.order - 1
        alog = np.zeros(self.n, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(self.n):
            alog[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= primitive_poly
        if x != 1:
            raise ValueError(f"polynomial {primitive_poly:#x} is not primitive for v={v}")
        log[0] = -1  # log of zero is undefined; sentinel
        self.antilog_table = alog
        self.log_table = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog_table[(self.log_table[a] + self.log_table[b]) % self.n])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^v)")
        return int(self.antilog_table[(self.n - self.log_table[a]) % self.n])

    def pow_alpha(self, e: int) -> int:
        """alpha^e for the primitive element alpha."""
        return int(self.antilog_table[e % self.n])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e != 0 else 1
        return int(self.antilog_table[(self.log_table[a] * e) % self.n])


# -- polynomials over GF(2), stored as int bit masks (bit i = coeff of x^i) --

def gf2_degree(p: int) -> int:
    return p.bit_length() - 1


def gf2_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_mod(a: int, m: int) -> int:
    dm = gf2_degree(m)
    da = gf2_degree(a)
    while da >= dm:
        a ^= m << (da - dm)
        da = gf2_degree(a)
    return a


def _minimal_polynomial(gf: GaloisField, exponent: int) -> int:
    """Minimal polynomial over GF(2) of alpha^exponent, as a bit mask."""
    n = gf.n
    coset = []
    e = exponent % n
    while e not in coset:
        coset.append(e)
        e = (e * 2) % n
    # multiply (x - alpha^e) over the coset; coefficients live in GF(2^v)
    coeffs = [1]  # coeffs[i] is the coefficient of x^i, highest degree last
    for e in coset:
        root = gf.pow_alpha(e)
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] ^= c
            nxt[i] ^= gf.mul(c, root)
        coeffs = nxt
    mask = 0
    for i, c in enumerate(coeffs):
        if c not in (0, 1):
            raise AssertionError("minimal polynomial has a coefficient outside GF(2)")
        if c:
            mask |= 1 << i
    return mask


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of bounded-distance decoding.

    ``corrected`` distinguishes a decoding success (possibly a miscorrection)
    from a failure, so callers can implement either the pass-the-input or the
    erasure convention.  ``codeword`` is None on failure; ``flips`` counts the
    positions changed (0..t on success).
    """

    corrected: bool
    codeword: np.ndarray | None
    flips: int


class BchCode:
    """Narrow-sense binary BCH code of length n = 2^v - 1.

    Systematic encoding convention: index i of a codeword array is the
    coefficient of x^i, parity occupies indices 0..n-k-1 and the message
    occupies indices n-k..n-1.
    """

    def __init__(self, v: int, t: int, gf: GaloisField, generator_polynomial: int):
        self.v = v
        self.t = t
        self.gf = gf
        self.n = gf.n
        self.generator_polynomial = generator_polynomial
        self.k = self.n - gf2_degree(generator_polynomial)
        self.d_min = 2 * t + 1

    def __repr__(self) -> str:
        return f"BchCode(n={self.n}, k={self.k}, t={self.t})"

    def encode(self, message: np.ndarray) -> np.ndarray:
        """Systematic encoding of a length-k bit vector."""
        message = np.asarray(message, dtype=np.uint8)
        if message.shape != (self.k,):
            raise ValueError(f"message length {message.shape} != ({self.k},)")
        m = 0
        for j in range(self.k):
            if message[j]:
                m |= 1 << j
        shifted = m << (self.n - self.k)
        cw_mask = shifted ^ gf2_mod(shifted, self.generator_polynomial)
        out = np.zeros(self.n, dtype=np.uint8)
        for i in range(self.n):
            if (cw_mask >> i) & 1:
                out[i] = 1
        return out

    def syndromes(self, word: np.ndarray) -> list[int]:
        """S_1..S_2t with S_j = word(alpha^j)."""
        gf = self.gf
        synds = [0] * (2 * self.t)
        for pos in np.flatnonzero(np.asarray(word, dtype=np.uint8)):
            p = int(pos)
            for j in range(2 * self.t):
                synds[j] ^= gf.pow_alpha(p * (j + 1))
        return synds

    def is_codeword(self, word: np.ndarray) -> bool:
        return all(s == 0 for s in self.syndromes(word))


def bch_construct(v: int, t: int) -> BchCode:
    """Build the narrow-sense BCH code with n = 2^v - 1, k = 2^v - v*t - 1.

    Rejects parameter sets whose cyclotomic cosets degenerate, i.e. where the
    realized parity degree differs from v*t.
    """
    if v < 3:
        raise ValueError(f"v={v} too small; need v >= 3")
    if t < 1:
        raise ValueError(f"t={t} must be positive")
    if v * t >= (1 << v) - 1:
        raise ValueError(f"v*t={v * t} must be below n={(1 << v) - 1}")
    gf = GaloisField(v)
    minimal_polys: list[int] = []
    for j in range(1, 2 * t + 1):
        mp = _minimal_polynomial(gf, j)
        if mp not in minimal_polys:
            minimal_polys.append(mp)
    generator = 1
    for mp in minimal_polys:
        generator = gf2_mul(generator, mp)
    if gf2_degree(generator) != v * t:
        raise ValueError(
            f"(v={v}, t={t}) realizes n-k={gf2_degree(generator)} != v*t={v * t}; "
            "cyclotomic cosets are degenerate for this parameter set"
        )
    return BchCode(v, t, gf, generator)


def _berlekamp_massey(gf: GaloisField, synds: list[int]) -> tuple[list[int], int]:
    """Minimal LFSR (error locator) for a syndrome sequence over GF(2^v)."""
    ns = len(synds)
    cur = [0] * (ns + 1)
    prev = [0] * (ns + 1)
    cur[0] = prev[0] = 1
    length, shift, prev_disc = 0, 1, 1
    for i in range(ns):
        disc = synds[i]
        for j in range(1, length + 1):
            disc ^= gf.mul(cur[j], synds[i - j])
        if disc == 0:
            shift += 1
            continue
        scale = gf.mul(disc, gf.inv(prev_disc))
        if 2 * length <= i:
            saved = cur.copy()
            for j in range(ns + 1 - shift):
                if prev[j]:
                    cur[j + shift] ^= gf.mul(scale, prev[j])
            length = i + 1 - length
            prev = saved
            prev_disc = disc
            shift = 1
        else:
            for j in range(ns + 1 - shift):
                if prev[j]:
                    cur[j + shift] ^= gf.mul(scale, prev[j])
            shift += 1
    return cur[: length + 1], length


def bdd_decode(code: BchCode, word: np.ndarray) -> DecodeOutcome:
    """Exact bounded-distance decoding.

    Returns the unique codeword within Hamming distance t of ``word`` when one
    exists (a miscorrection is a legal success), otherwise a failure.  The
    corrected word is re-verified against all 2t syndromes, so a success
    always returns a true codeword.
    """
    word = np.asarray(word, dtype=np.uint8)
    if word.shape != (code.n,):
        raise ValueError(f"word length {word.shape} != ({code.n},)")
    gf = code.gf
    synds = code.syndromes(word)
    if all(s == 0 for s in synds):
        return DecodeOutcome(True, word.copy(), 0)
    locator, length = _berlekamp_massey(gf, synds)
    if length > code.t:
        return DecodeOutcome(False, None, 0)
    # Chien search: position p is in error iff locator(alpha^-p) == 0
    positions = []
    for p in range(code.n):
        acc = 1
        for j in range(1, length + 1):
            if locator[j]:
                acc ^= gf.mul(locator[j], gf.pow_alpha((code.n - p) * j))
        if acc == 0:
            positions.append(p)
            if len(positions) == length:
                break
    if len(positions) != length:
        return DecodeOutcome(False, None, 0)
    for j in range(2 * code.t):
        upd = synds[j]
        for p in positions:
            upd ^= gf.pow_alpha(p * (j + 1))
        if upd != 0:
            return DecodeOutcome(False, None, 0)
    out = word.copy()
    out[positions] ^= 1
    return DecodeOutcome(True, out, length)


def extrinsic_bdd_decode(
    code: BchCode, decoder_input: np.ndarray, position: int, channel_bit: int
) -> int:
    """Ternary extrinsic message for one code bit.

    Substitutes the iterative input at ``position`` with the channel hard
    decision, decodes, and maps the decoded bit 0 -> +1, 1 -> -1; a decoding
    failure yields 0.  The message is extrinsic: it does not depend on the
    original value of ``decoder_input[position]``.
    """
    if not 0 <= position < code.n:
        raise IndexError(f"position {position} out of range 0..{code.n - 1}")
    word = np.asarray(decoder_input, dtype=np.uint8).copy()
    word[position] = channel_bit
    outcome = bdd_decode(code, word)
    if not outcome.corrected:
        return 0
    return 1 if outcome.codeword[position] == 0 else -1


@lru_cache(maxsize=None)
def cached_code(v: int, t: int) -> BchCode:
    """Shared immutable code instances (field tables are read-only)."""
    return bch_construct(v, t)
