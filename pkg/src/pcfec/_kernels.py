"""Numba kernels: batch bounded-distance decoding and product-code decoders.

Everything here is throughput plumbing.  Semantics are pinned by the pure
Python reference in ``pcfec.bch`` and by the mirror decoders in the test
suite; the kernels must agree with them bit for bit.

Shared conventions:
  * bit arrays are uint8, LLRs float64, field tables int64;
  * ``pow_tab[j, i]`` is alpha^(i*(j+1)), used for syndromes S_1..S_2t;
  * ``chien_tab[j, p]`` is alpha^(-p*j), used to evaluate locators;
  * a decode returns the flip count (>= 0, word corrected in place) or -1
    for a failure (word untouched);
  * combining-cell index: (sign<0 ? 0 : 3) + {bdd=-1: 0, +1: 1, erased: 2}.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, inline="always")
def _gmul(a, b, log_tab, alog_tab, n):
    if a == 0 or b == 0:
        return np.int64(0)
    return alog_tab[(log_tab[a] + log_tab[b]) % n]


@njit(cache=True, inline="always")
def _ginv(a, log_tab, alog_tab, n):
    return alog_tab[(n - log_tab[a]) % n]


@njit(cache=True)
def _syndromes(word, pow_tab, synd):
    n = word.shape[0]
    twot = pow_tab.shape[0]
    for j in range(twot):
        synd[j] = 0
    for i in range(n):
        if word[i]:
            for j in range(twot):
                synd[j] ^= pow_tab[j, i]


@njit(cache=True)
def _solve_quadratic(lam1, lam2, flips, base, log_tab, alog_tab, qsolve, n):
    """Distinct roots of lam2*x^2 + lam1*x + 1; writes error positions."""
    if lam1 == 0 or lam2 == 0:
        return -1
    b_over_a = _gmul(lam1, _ginv(lam2, log_tab, alog_tab, n), log_tab, alog_tab, n)
    binv = _ginv(lam1, log_tab, alog_tab, n)
    u = _gmul(lam2, _gmul(binv, binv, log_tab, alog_tab, n), log_tab, alog_tab, n)
    z = qsolve[u]
    if z <= 0:
        return -1
    x1 = _gmul(b_over_a, z, log_tab, alog_tab, n)
    x2 = x1 ^ b_over_a
    flips[base] = (n - log_tab[x1]) % n
    flips[base + 1] = (n - log_tab[x2]) % n
    return 2


@njit(cache=True)
def _chien(locator, degree, flips, chien_tab, log_tab, alog_tab, n):
    """Collect error positions p with locator(alpha^-p) == 0."""
    count = 0
    for p in range(n):
        acc = np.int64(1)
        for j in range(1, degree + 1):
            c = locator[j]
            if c:
                acc ^= _gmul(c, chien_tab[j, p], log_tab, alog_tab, n)
        if acc == 0:
            flips[count] = p
            count += 1
            if count == degree:
                break
    return count if count == degree else -1


@njit(cache=True)
def _berlekamp_massey_nb(synd, cur, prev, saved, log_tab, alog_tab, n):
    ns = synd.shape[0]
    for j in range(ns + 1):
        cur[j] = 0
        prev[j] = 0
    cur[0] = 1
    prev[0] = 1
    length = 0
    shift = 1
    prev_disc = np.int64(1)
    for i in range(ns):
        disc = synd[i]
        for j in range(1, length + 1):
            disc ^= _gmul(cur[j], synd[i - j], log_tab, alog_tab, n)
        if disc == 0:
            shift += 1
            continue
        scale = _gmul(disc, _ginv(prev_disc, log_tab, alog_tab, n), log_tab, alog_tab, n)
        if 2 * length <= i:
            for j in range(ns + 1):
                saved[j] = cur[j]
            for j in range(ns + 1 - shift):
                if prev[j]:
                    cur[j + shift] ^= _gmul(scale, prev[j], log_tab, alog_tab, n)
            length = i + 1 - length
            for j in range(ns + 1):
                prev[j] = saved[j]
            prev_disc = disc
            shift = 1
        else:
            for j in range(ns + 1 - shift):
                if prev[j]:
                    cur[j + shift] ^= _gmul(scale, prev[j], log_tab, alog_tab, n)
            shift += 1
    return length


@njit(cache=True)
def _bdd_inplace(word, synd, flips, scratch_poly, pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t):
    """Exact BDD: corrects up to t errors, else leaves the word untouched.

    The candidate flip set is always re-verified against all 2t syndromes, so
    a nonnegative return guarantees the word is now a codeword within
    distance t of the input.
    """
    _syndromes(word, pow_tab, synd)
    twot = 2 * t
    zero = True
    for j in range(twot):
        if synd[j] != 0:
            zero = False
            break
    if zero:
        return 0

    count = -1
    if t == 2:
        s1 = synd[0]
        s3 = synd[2]
        s1sq = _gmul(s1, s1, log_tab, alog_tab, n)
        t1 = s3 ^ _gmul(s1sq, s1, log_tab, alog_tab, n)
        if t1 == 0:
            flips[0] = log_tab[s1]
            count = 1
        elif s1 == 0:
            count = -1
        else:
            lam2 = _gmul(t1, _ginv(s1, log_tab, alog_tab, n), log_tab, alog_tab, n)
            count = _solve_quadratic(s1, lam2, flips, 0, log_tab, alog_tab, qsolve, n)
    elif t == 3:
        s1 = synd[0]
        s3 = synd[2]
        s5 = synd[4]
        s1sq = _gmul(s1, s1, log_tab, alog_tab, n)
        s1cu = _gmul(s1sq, s1, log_tab, alog_tab, n)
        t1 = s3 ^ s1cu
        t2 = s5 ^ _gmul(s1sq, s1cu, log_tab, alog_tab, n)
        if t1 == 0:
            if t2 != 0:
                count = -1
            else:
                flips[0] = log_tab[s1]
                count = 1
        else:
            r = _gmul(t2, _ginv(t1, log_tab, alog_tab, n), log_tab, alog_tab, n)
            lam1 = s1
            lam2 = s1sq ^ r
            lam3 = _gmul(s1, r, log_tab, alog_tab, n) ^ s3
            if lam3 == 0:
                count = _solve_quadratic(lam1, lam2, flips, 0, log_tab, alog_tab, qsolve, n)
            else:
                scratch_poly[0] = 1
                scratch_poly[1] = lam1
                scratch_poly[2] = lam2
                scratch_poly[3] = lam3
                count = _chien(scratch_poly, 3, flips, chien_tab, log_tab, alog_tab, n)
    else:
        cur = np.zeros(twot + 1, dtype=np.int64)
        prev = np.zeros(twot + 1, dtype=np.int64)
        saved = np.zeros(twot + 1, dtype=np.int64)
        length = _berlekamp_massey_nb(synd, cur, prev, saved, log_tab, alog_tab, n)
        if length > t:
            count = -1
        else:
            count = _chien(cur, length, flips, chien_tab, log_tab, alog_tab, n)

    if count < 0:
        return -1
    for j in range(twot):
        upd = synd[j]
        for c in range(count):
            upd ^= pow_tab[j, flips[c]]
        if upd != 0:
            return -1
    for c in range(count):
        word[flips[c]] ^= 1
    return count


# ---------------------------------------------------------------------------
# product-code frame decoders
# ---------------------------------------------------------------------------


@njit(cache=True)
def _plain_pass(psi, rowwise, genie, truth, scratch, synd, flips, poly,
                pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t):
    """One iBDD half-iteration (row- or column-wise).  Returns change flag."""
    changed = False
    for i in range(n):
        if rowwise:
            for j in range(n):
                scratch[j] = psi[i, j]
        else:
            for j in range(n):
                scratch[j] = psi[j, i]
        cnt = _bdd_inplace(scratch, synd, flips, poly, pow_tab, chien_tab,
                           log_tab, alog_tab, qsolve, n, t)
        if cnt <= 0:
            continue
        if genie:
            ok = True
            for j in range(n):
                tv = truth[i, j] if rowwise else truth[j, i]
                if scratch[j] != tv:
                    ok = False
                    break
            if not ok:
                continue
        changed = True
        if rowwise:
            for j in range(n):
                psi[i, j] = scratch[j]
        else:
            for j in range(n):
                psi[j, i] = scratch[j]
    return changed


@njit(cache=True)
def _combine_pass(psi, llr, mu_cells, weight, use_weight, rowwise,
                  scratch, synd, flips, poly,
                  pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t):
    """One combining half-iteration: new bit = sign of offset(bdd, sign l) + l.

    ``mu_cells`` holds the six offsets in cell order; with ``use_weight`` the
    offset is instead weight * bdd_output (scaled-reliability rule).  Ties
    fall back to the channel hard decision.
    """
    changed = False
    for i in range(n):
        if rowwise:
            for j in range(n):
                scratch[j] = psi[i, j]
        else:
            for j in range(n):
                scratch[j] = psi[j, i]
        cnt = _bdd_inplace(scratch, synd, flips, poly, pow_tab, chien_tab,
                           log_tab, alog_tab, qsolve, n, t)
        for j in range(n):
            l = llr[i, j] if rowwise else llr[j, i]
            if cnt >= 0:
                mu = 1 - 2 * np.int64(scratch[j])
            else:
                mu = np.int64(0)
            if use_weight:
                offset = weight * mu
            else:
                cell = (0 if l < 0.0 else 3) + (0 if mu < 0 else (1 if mu > 0 else 2))
                offset = mu_cells[cell]
            soft = offset + l
            if soft > 0.0:
                bit = np.uint8(0)
            elif soft < 0.0:
                bit = np.uint8(1)
            else:
                bit = np.uint8(1) if l < 0.0 else np.uint8(0)
            if rowwise:
                if psi[i, j] != bit:
                    changed = True
                psi[i, j] = bit
            else:
                if psi[j, i] != bit:
                    changed = True
                psi[j, i] = bit
    return changed


@njit(cache=True)
def _plain_phase(psi, iters, genie, truth, scratch, synd, flips, poly,
                 pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t):
    done = 0
    fixed = False
    for _ in range(iters):
        ch_r = _plain_pass(psi, True, genie, truth, scratch, synd, flips, poly,
                           pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t)
        ch_c = _plain_pass(psi, False, genie, truth, scratch, synd, flips, poly,
                           pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t)
        done += 1
        if not (ch_r or ch_c):
            fixed = True
            break
    return done, fixed


@njit(cache=True)
def _frame_ibdd(psi, iters, genie, truth, pow_tab, chien_tab, log_tab, alog_tab, qsolve, t):
    n = psi.shape[0]
    scratch = np.empty(n, dtype=np.uint8)
    synd = np.empty(2 * t, dtype=np.int64)
    flips = np.empty(t, dtype=np.int64)
    poly = np.empty(t + 1, dtype=np.int64)
    return _plain_phase(psi, iters, genie, truth, scratch, synd, flips, poly,
                        pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t)


@njit(cache=True)
def _frame_combine(psi, llr, mu_row, mu_col, weights, use_weight, main_iters, app_iters,
                   pow_tab, chien_tab, log_tab, alog_tab, qsolve, t):
    """Combining decoder frame: main combining phase plus appended iBDD.

    Early exit from the main phase is taken only when a full iteration made
    no change and every later iteration would apply identical offsets, which
    keeps the final output bit-identical to a full-length run.
    """
    n = psi.shape[0]
    scratch = np.empty(n, dtype=np.uint8)
    synd = np.empty(2 * t, dtype=np.int64)
    flips = np.empty(t, dtype=np.int64)
    poly = np.empty(t + 1, dtype=np.int64)
    done = 0
    fixed = False
    for it in range(main_iters):
        wt = weights[it] if use_weight else 0.0
        ch_r = _combine_pass(psi, llr, mu_row[it], wt, use_weight, True,
                             scratch, synd, flips, poly,
                             pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t)
        ch_c = _combine_pass(psi, llr, mu_col[it], wt, use_weight, False,
                             scratch, synd, flips, poly,
                             pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t)
        done += 1
        if ch_r or ch_c:
            continue
        stable = True
        for later in range(it + 1, main_iters):
            if use_weight:
                if weights[later] != weights[it]:
                    stable = False
            else:
                for c in range(6):
                    if mu_row[later, c] != mu_row[it, c] or mu_col[later, c] != mu_col[it, c]:
                        stable = False
                        break
            if not stable:
                break
        if stable:
            fixed = True
            break
    app_done, app_fixed = _plain_phase(psi, app_iters, False, psi, scratch, synd, flips, poly,
                                       pow_tab, chien_tab, log_tab, alog_tab, qsolve, n, t)
    if app_done > 0:
        fixed = app_fixed
    return done + app_done, fixed


# ---------------------------------------------------------------------------
# batch drivers (frame-parallel; frames are independent)
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _batch_ibdd(psis, iters, genie, truths, out_iters, out_conv,
                pow_tab, chien_tab, log_tab, alog_tab, qsolve, t):
    for b in prange(psis.shape[0]):
        done, fixed = _frame_ibdd(psis[b], iters, genie, truths[b],
                                  pow_tab, chien_tab, log_tab, alog_tab, qsolve, t)
        out_iters[b] = done
        out_conv[b] = fixed


@njit(cache=True, parallel=True)
def _batch_combine(psis, llrs, mu_row, mu_col, weights, use_weight, main_iters, app_iters,
                   out_iters, out_conv, pow_tab, chien_tab, log_tab, alog_tab, qsolve, t):
    for b in prange(psis.shape[0]):
        done, fixed = _frame_combine(psis[b], llrs[b], mu_row, mu_col, weights, use_weight,
                                     main_iters, app_iters,
                                     pow_tab, chien_tab, log_tab, alog_tab, qsolve, t)
        out_iters[b] = done
        out_conv[b] = fixed


# ---------------------------------------------------------------------------
# transition-table estimation
# ---------------------------------------------------------------------------


@njit(cache=True)
def _classify(word, tpos, cnt):
    """Outcome class of one extrinsic decode: 0 error, 1 correct, 2 erasure."""
    if cnt < 0:
        return 2
    return 1 if word[tpos] == 0 else 0


@njit(cache=True)
def _sample_transition(n, t, weight, nsamples, seed, target_in_error,
                       pow_tab, chien_tab, log_tab, alog_tab, qsolve):
    """Monte Carlo outcome counts for one error-weight class.

    Each draw places ``weight`` errors uniformly on the n-1 positions other
    than a uniformly chosen target bit of the all-zero codeword, sets the
    target per the conditioning, decodes, and tallies the target's fate.
    """
    np.random.seed(seed)
    word = np.zeros(n, dtype=np.uint8)
    synd = np.empty(2 * t, dtype=np.int64)
    flips = np.empty(t, dtype=np.int64)
    poly = np.empty(t + 1, dtype=np.int64)
    perm = np.arange(n - 1, dtype=np.int64)
    counts = np.zeros(3, dtype=np.int64)
    for _ in range(nsamples):
        tpos = np.random.randint(0, n)
        for c in range(weight):
            r = c + np.random.randint(0, n - 1 - c)
            tmp = perm[c]
            perm[c] = perm[r]
            perm[r] = tmp
            p = perm[c]
            word[p if p < tpos else p + 1] = 1
        if target_in_error:
            word[tpos] = 1
        cnt = _bdd_inplace(word, synd, flips, poly, pow_tab, chien_tab,
                           log_tab, alog_tab, qsolve, n, t)
        counts[_classify(word, tpos, cnt)] += 1
        for c in range(weight):
            p = perm[c]
            word[p if p < tpos else p + 1] = 0
        word[tpos] = 0
        if cnt > 0:
            for c in range(cnt):
                word[flips[c]] = 0
    return counts


@njit(cache=True)
def _exhaustive_transition(n, t, combos, target_in_error,
                           pow_tab, chien_tab, log_tab, alog_tab, qsolve):
    """Exact outcome counts: every target position x every error pattern."""
    word = np.zeros(n, dtype=np.uint8)
    synd = np.empty(2 * t, dtype=np.int64)
    flips = np.empty(t, dtype=np.int64)
    poly = np.empty(t + 1, dtype=np.int64)
    counts = np.zeros(3, dtype=np.int64)
    ncombo, weight = combos.shape
    for tpos in range(n):
        for ci in range(ncombo):
            for c in range(weight):
                p = combos[ci, c]
                word[p if p < tpos else p + 1] = 1
            if target_in_error:
                word[tpos] = 1
            cnt = _bdd_inplace(word, synd, flips, poly, pow_tab, chien_tab,
                               log_tab, alog_tab, qsolve, n, t)
            counts[_classify(word, tpos, cnt)] += 1
            for c in range(weight):
                p = combos[ci, c]
                word[p if p < tpos else p + 1] = 0
            word[tpos] = 0
            if cnt > 0:
                for c in range(cnt):
                    word[flips[c]] = 0
    return counts


def build_tables(code) -> dict[str, np.ndarray]:
    """Precomputed int64 tables for the kernels, one set per component code."""
    gf = code.gf
    n, t = code.n, code.t
    alog = gf.antilog_table.astype(np.int64)
    log = gf.log_table.astype(np.int64)
    pow_tab = np.empty((2 * t, n), dtype=np.int64)
    for j in range(2 * t):
        for i in range(n):
            pow_tab[j, i] = alog[(i * (j + 1)) % n]
    chien_tab = np.zeros((t + 1, n), dtype=np.int64)
    for j in range(1, t + 1):
        for p in range(n):
            chien_tab[j, p] = alog[(((n - p) % n) * j) % n]
    qsolve = np.full(gf.order, -1, dtype=np.int64)
    for z in range(gf.order):
        u = gf.mul(z, z) ^ z
        if qsolve[u] < 0:
            qsolve[u] = z
    return {
        "pow": pow_tab,
        "chien": chien_tab,
        "log": log,
        "alog": alog,
        "qsolve": qsolve,
    }
