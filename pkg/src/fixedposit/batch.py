"""Vectorized NumPy mirrors of the scalar codec and datapath multiplier.

These exist so conversion sweeps and multiply-substituted workloads run in
array passes instead of per-scalar Python calls.  They implement the same
algorithms as the scalar functions and are pinned to them by exhaustive
small-width and sampled 32-bit equivalence tests.  Carrier is int64, which
limits batch formats to n <= 32 (plenty for every stock configuration).
"""

from __future__ import annotations

import numpy as np

from .formats import FixedPositFormat, scale_range

_I64 = np.int64


def _check_fmt(fmt: FixedPositFormat) -> None:
    if fmt.n > 32:
        raise ValueError(f"batch codec carries at most 32-bit words, got {fmt}")


def _rne_shift_right(num: np.ndarray, drop: np.ndarray | int) -> np.ndarray:
    """Elementwise right shift with round-to-nearest, ties-to-even.

    Negative drops are treated as zero; drops past 62 bits saturate (the
    remainder comparison still rounds such lanes to zero correctly).
    """
    drop = np.clip(np.asarray(drop, dtype=_I64), 0, 62)
    kept = num >> drop
    rem = num & ((_I64(1) << drop) - 1)
    half = (_I64(1) << drop) >> 1
    round_up = (drop > 0) & ((rem > half) | ((rem == half) & ((kept & 1) == 1)))
    return kept + round_up.astype(_I64)


def _bit_length(x: np.ndarray) -> np.ndarray:
    # frexp's exponent is the bit length for positive ints (and 0 for 0).
    return np.frexp(x.astype(np.float64))[1].astype(_I64)


def _split_sign(words: np.ndarray, fmt: FixedPositFormat) -> tuple[np.ndarray, np.ndarray]:
    n = fmt.n
    mask = (1 << n) - 1
    sign = (words >> (n - 1)) & 1
    mag = np.where(sign == 1, (-words) & mask, words)
    return sign, mag


def _decode_fields(mag: np.ndarray, fmt: FixedPositFormat) -> tuple[np.ndarray, ...]:
    """(k, exponent, significand, scale) of positive magnitudes."""
    es, rs, f = fmt.es, fmt.rs, fmt.fraction_bits
    regime = (mag >> (es + f)) & ((1 << rs) - 1)
    lead = regime >> (rs - 1)
    inverted = np.where(lead == 1, regime ^ ((1 << rs) - 1), regime)
    run = rs - _bit_length(inverted)
    k = np.where(lead == 1, run - 1, -run)
    exponent = (mag >> f) & ((1 << es) - 1)
    significand = (mag & ((1 << f) - 1)) | (1 << f)
    return k, exponent, significand, (k << es) + exponent


def _assemble(scale: np.ndarray, significand: np.ndarray, fmt: FixedPositFormat) -> np.ndarray:
    """Pack (scale, significand) into positive magnitudes, saturating the scale."""
    es, rs, f = fmt.es, fmt.rs, fmt.fraction_bits
    rng = scale_range(fmt)
    k = scale >> es
    exponent = scale - (k << es)
    k_pos = np.clip(k, 0, rs - 1)
    k_neg = np.clip(k, -rs, -1)
    reg_pos = ((_I64(1) << (k_pos + 1)) - 1) << (rs - k_pos - 1)
    reg_neg = (_I64(1) << (rs + k_neg)) - 1
    regime = np.where(k >= 0, reg_pos, reg_neg)
    mag = (regime << (es + f)) | (exponent << f) | (significand & ((1 << f) - 1))
    mag = np.where(mag == 0, 1, mag)  # zero pattern is reserved; nudge up
    mag = np.where(scale > rng.max_scale, (1 << (fmt.n - 1)) - 1, mag)
    mag = np.where(scale < rng.min_scale, 1, mag)
    return mag


def from_binary32_batch(x_bits: np.ndarray, fmt: FixedPositFormat) -> np.ndarray:
    """Vector version of codec.from_binary32; returns int64 word patterns."""
    _check_fmt(fmt)
    x = np.asarray(x_bits).astype(_I64) & 0xFFFFFFFF
    n, f = fmt.n, fmt.fraction_bits
    sign = (x >> 31) & 1
    exp_field = (x >> 23) & 0xFF
    scale = exp_field - 127
    sig = (x & 0x7FFFFF) | (1 << 23)
    if f >= 23:
        sig = sig << (f - 23)
    else:
        sig = _rne_shift_right(sig, 23 - f)
        carried = sig >> (f + 1)
        sig = np.where(carried == 1, sig >> 1, sig)
        scale = scale + carried
    mag = _assemble(scale, sig, fmt)
    words = np.where(sign == 1, (-mag) & ((1 << n) - 1), mag)
    words = np.where(exp_field == 0, 0, words)  # zeros and subnormals flush
    words = np.where(exp_field == 0xFF, 1 << (n - 1), words)
    return words


def to_binary64_batch(words: np.ndarray, fmt: FixedPositFormat) -> np.ndarray:
    """Vector version of codec.to_binary64; exact float64 values."""
    _check_fmt(fmt)
    w = np.asarray(words).astype(_I64)
    n, f = fmt.n, fmt.fraction_bits
    sign, mag = _split_sign(w, fmt)
    _, _, significand, scale = _decode_fields(mag, fmt)
    value = np.ldexp(significand.astype(np.float64), (scale - f).astype(np.int32))
    value = np.where(sign == 1, -value, value)
    value = np.where(w == 0, 0.0, value)
    value = np.where(w == (1 << (n - 1)), np.nan, value)
    return value


def to_binary32_batch(words: np.ndarray, fmt: FixedPositFormat) -> np.ndarray:
    """Vector version of codec.to_binary32; returns int64 bit patterns."""
    _check_fmt(fmt)
    w = np.asarray(words).astype(_I64)
    n, f = fmt.n, fmt.fraction_bits
    sign, mag = _split_sign(w, fmt)
    _, _, significand, scale = _decode_fields(mag, fmt)
    s_bit = sign << 31

    # Normal path: round to a 24-bit significand.
    sig24 = _rne_shift_right(significand, f - 23) if f > 23 else significand << (23 - f)
    carried = sig24 >> 24
    sig24 = np.where(carried == 1, sig24 >> 1, sig24)
    nscale = scale + carried
    normal = s_bit | ((nscale + 127) << 23) | (sig24 & 0x7FFFFF)
    normal = np.where(nscale > 127, s_bit | 0x7F800000, normal)

    # Subnormal path: round onto the 2**-149 grid.
    sub_drop = f - scale - 149
    left = np.clip(-sub_drop, 0, 62)
    mantissa = np.where(
        sub_drop > 0, _rne_shift_right(significand, sub_drop), significand << left
    )
    subnormal = s_bit | mantissa

    bits = np.where(scale >= -126, normal, subnormal)
    bits = np.where(w == 0, 0, bits)
    bits = np.where(w == (1 << (n - 1)), 0x7FC00000, bits)
    return bits


def mul_batch(a_words: np.ndarray, b_words: np.ndarray, fmt: FixedPositFormat) -> np.ndarray:
    """Vector version of multiplier.mul_datapath."""
    _check_fmt(fmt)
    a = np.asarray(a_words).astype(_I64)
    b = np.asarray(b_words).astype(_I64)
    n, es, f = fmt.n, fmt.es, fmt.fraction_bits
    nar = 1 << (n - 1)

    sa, mag_a = _split_sign(a, fmt)
    sb, mag_b = _split_sign(b, fmt)
    sc = sa ^ sb
    k_a, exp_a, frac_a, _ = _decode_fields(mag_a, fmt)
    k_b, exp_b, frac_b, _ = _decode_fields(mag_b, fmt)

    product = frac_a * frac_b  # <= 2f+2 bits, fine in int64 for n <= 32
    carry = (product >> (2 * f + 1)) & 1
    raw_scale = (k_a << es) + exp_a + (k_b << es) + exp_b + carry

    kept = _rne_shift_right(product, f + carry)
    carried = kept >> (f + 1)
    kept = np.where(carried == 1, kept >> 1, kept)
    result_scale = raw_scale + carried

    mag_c = _assemble(result_scale, kept, fmt)
    words = np.where(sc == 1, (-mag_c) & ((1 << n) - 1), mag_c)
    words = np.where((a == 0) | (b == 0), 0, words)
    words = np.where((a == nar) | (b == nar), nar, words)
    return words


def mul_binary32_batch(
    fmt: FixedPositFormat, a_bits: np.ndarray, b_bits: np.ndarray
) -> np.ndarray:
    """Substituted binary32 multiply over arrays of bit patterns."""
    wa = from_binary32_batch(a_bits, fmt)
    wb = from_binary32_batch(b_bits, fmt)
    return to_binary32_batch(mul_batch(wa, wb, fmt), fmt)


def mul_float32_batch(fmt: FixedPositFormat, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Substituted multiply over float32 arrays (any broadcastable shapes)."""
    a32, b32 = np.broadcast_arrays(np.asarray(a, np.float32), np.asarray(b, np.float32))
    shape = a32.shape
    a_bits = np.ascontiguousarray(a32).view(np.uint32).ravel()
    b_bits = np.ascontiguousarray(b32).view(np.uint32).ravel()
    out_bits = mul_binary32_batch(fmt, a_bits, b_bits).astype(np.uint32)
    return out_bits.view(np.float32).reshape(shape)
