"""Packed-lane kernels: lane ordering, saturating sign-magnitude arithmetic,
and the associative (min, submin, signs) reduction.

8-bit mode packs rho=4 unsigned magnitude lanes into one 32-bit word, lane l
at bits [8l, 8l+8); signs travel in a companion word holding 0x00 (positive)
or 0xFF (negative) per lane. Magnitudes never exceed 127, so single adds and
subtracts cannot carry across lanes. 16-bit mode packs rho=2 IEEE half
floats, whose native sign bit plays the sign-magnitude role.

All functions are pure and operate elementwise on numpy uint32 arrays of any
shape, mirroring a warp of independent SIMD words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

U8X4 = "u8x4"
F16X2 = "f16x2"

U8_SAT = 127

_B0 = np.uint32(0x00FF00FF)      # even-lane byte fields
_HI = np.uint32(0x01000100)      # borrow-guard bit per 16-bit field
_S127 = np.uint32(0x7F7F7F7F)    # saturation value in every lane
_ONES = np.uint32(0x01010101)
_FULL = np.uint32(0xFFFFFFFF)


def pack_u8(lanes) -> np.ndarray:
    """Pack (..., 4) uint8 lanes into uint32 words, lane 0 at the low byte."""
    arr = np.asarray(lanes, dtype=np.uint32)
    if arr.shape[-1] != 4:
        raise ValueError("u8x4 packing needs 4 lanes")
    return (arr[..., 0] | (arr[..., 1] << 8) | (arr[..., 2] << 16)
            | (arr[..., 3] << 24))


def unpack_u8(words) -> np.ndarray:
    w = np.asarray(words, dtype=np.uint32)
    out = np.empty(w.shape + (4,), dtype=np.uint8)
    for lane in range(4):
        out[..., lane] = (w >> np.uint32(8 * lane)) & np.uint32(0xFF)
    return out


def pack_f16(values) -> np.ndarray:
    """Pack (..., 2) float16 values into uint32 words, lane 0 low."""
    arr = np.asarray(values, dtype=np.float16)
    if arr.shape[-1] != 2:
        raise ValueError("f16x2 packing needs 2 lanes")
    raw = arr.view(np.uint16).astype(np.uint32)
    return raw[..., 0] | (raw[..., 1] << 16)


def unpack_f16(words) -> np.ndarray:
    w = np.asarray(words, dtype=np.uint32)
    out = np.empty(w.shape + (2,), dtype=np.uint16)
    out[..., 0] = w & np.uint32(0xFFFF)
    out[..., 1] = w >> 16
    return out.view(np.float16)


def vcmplt_u8(a, b) -> np.ndarray:
    """Per-lane unsigned a < b: 0xFF in matching lanes, 0x00 elsewhere.

    Even and odd lanes are compared in separate 16-bit fields; the guard bit
    0x100 survives the subtraction exactly when the lane does not borrow.
    """
    a = np.asarray(a, dtype=np.uint32)
    b = np.asarray(b, dtype=np.uint32)
    lt_even = ((((a & _B0) | _HI) - (b & _B0)) ^ _HI) & _HI
    lt_odd = (((((a >> 8) & _B0) | _HI) - ((b >> 8) & _B0)) ^ _HI) & _HI
    return ((lt_even >> 8) * np.uint32(0xFF)) | (((lt_odd >> 8) * np.uint32(0xFF)) << 8)


def _select(mask, when_set, when_clear):
    return (mask & when_set) | (~mask & when_clear)


def ord_vec(a, b, mode: str = U8X4) -> tuple[np.ndarray, np.ndarray]:
    """Per-lane (min, max) of two packed words.

    8-bit lanes compare unsigned; 16-bit lanes compare as half-precision
    values (sign included). Mirrors a compare-then-two-bit-selects sequence.
    """
    a = np.asarray(a, dtype=np.uint32)
    b = np.asarray(b, dtype=np.uint32)
    if mode == U8X4:
        mask = vcmplt_u8(a, b)
        return _select(mask, a, b), _select(mask, b, a)
    if mode == F16X2:
        av, bv = unpack_f16(a), unpack_f16(b)
        le = av <= bv
        lo = np.where(le, av, bv)
        hi = np.where(le, bv, av)
        return pack_f16(lo), pack_f16(hi)
    raise ValueError(f"unknown packing mode {mode!r}")


@dataclass
class PackedWord:
    """rho=4 sign-magnitude lanes: magnitude word plus 0x00/0xFF sign word."""

    mag: np.ndarray
    sign: np.ndarray

    def values(self) -> np.ndarray:
        """Per-lane signed integers, for inspection and tests."""
        mags = unpack_u8(self.mag).astype(np.int32)
        neg = unpack_u8(self.sign) != 0
        return np.where(neg, -mags, mags)


def pack_values(values) -> PackedWord:
    """PackedWord from (..., 4) signed lane values in [-127, 127]."""
    v = np.asarray(values, dtype=np.int32)
    if np.abs(v).max(initial=0) > U8_SAT:
        raise ValueError("lane magnitude exceeds saturation")
    mag = pack_u8(np.abs(v).astype(np.uint8))
    sign = pack_u8(np.where(v < 0, 0xFF, 0).astype(np.uint8))
    return PackedWord(mag, sign)


def _canonical(mag: np.ndarray, sign: np.ndarray) -> PackedWord:
    # Zero magnitudes carry the positive sign — keeps hard decisions and
    # stored messages identical between packed and scalar paths.
    return PackedWord(mag, sign & vcmplt_u8(np.uint32(0), mag))


def negate(a: PackedWord) -> PackedWord:
    return _canonical(a.mag, ~a.sign)


def sat_add(a: PackedWord, b: PackedWord, mode: str = U8X4) -> PackedWord:
    """Per-lane saturating signed add of sign-magnitude operands."""
    if mode != U8X4:
        raise ValueError("sat_add operates on u8x4 packed words")
    same = ~(a.sign ^ b.sign)
    total = a.mag + b.mag                       # lanes <= 254: no carry-out
    over = vcmplt_u8(_S127, total)
    total_sat = _select(over, _S127, total)
    lo, hi = ord_vec(a.mag, b.mag)
    diff = hi - lo                              # lanes >= 0: no borrow
    b_bigger = vcmplt_u8(a.mag, b.mag)
    sign_diff = _select(b_bigger, b.sign, a.sign)
    mag = _select(same, total_sat, diff)
    sign = _select(same, a.sign, sign_diff)
    return _canonical(mag, sign)


def sat_sub(a: PackedWord, b: PackedWord, mode: str = U8X4) -> PackedWord:
    """Per-lane saturating signed subtract, a - b."""
    return sat_add(a, negate(b), mode)


def sat_add_f16(a, b) -> np.ndarray:
    """f16x2 add clamped to the largest finite half-precision magnitude."""
    with np.errstate(over="ignore"):   # transient inf clips to the saturation
        s = unpack_f16(a) + unpack_f16(b)
        return pack_f16(np.clip(s, np.float16(-65504.0), np.float16(65504.0)))


def sat_sub_f16(a, b) -> np.ndarray:
    with np.errstate(over="ignore"):
        d = unpack_f16(a) - unpack_f16(b)
        return pack_f16(np.clip(d, np.float16(-65504.0), np.float16(65504.0)))


def apply_lut_u8(words, lut) -> np.ndarray:
    """Map every 8-bit lane through a 256-entry table (e.g. the beta scale)."""
    w = np.asarray(words, dtype=np.uint32)
    table = np.asarray(lut, dtype=np.uint32)
    if table.shape != (256,):
        raise ValueError("lane lookup table must have 256 entries")
    out = table[w & np.uint32(0xFF)]
    out |= table[(w >> 8) & np.uint32(0xFF)] << 8
    out |= table[(w >> 16) & np.uint32(0xFF)] << 16
    out |= table[w >> 24] << 24
    return out


@dataclass
class PackedAccumulator:
    """Per-lane (m1, m2, message sign, variable sign, argmin tag) words."""

    m1: np.ndarray
    m2: np.ndarray
    s_vc: np.ndarray
    s_v: np.ndarray
    tag: np.ndarray

    def merge(self, other: "PackedAccumulator") -> "PackedAccumulator":
        # Strictly smaller m1 wins; ties keep self (the lower partition).
        y_wins = vcmplt_u8(other.m1, self.m1)
        m1 = _select(y_wins, other.m1, self.m1)
        loser = _select(y_wins, self.m1, other.m1)
        m2 = ord_vec(loser, ord_vec(self.m2, other.m2)[0])[0]
        return PackedAccumulator(
            m1=m1,
            m2=m2,
            s_vc=self.s_vc ^ other.s_vc,
            s_v=self.s_v ^ other.s_v,
            tag=_select(y_wins, other.tag, self.tag),
        )


def packed_identity(shape) -> PackedAccumulator:
    """Merge identity: saturated magnitudes, positive signs, sentinel tag."""
    full = np.full(shape, _S127, dtype=np.uint32)
    zero = np.zeros(shape, dtype=np.uint32)
    return PackedAccumulator(
        m1=full.copy(), m2=full.copy(), s_vc=zero.copy(), s_v=zero.copy(),
        tag=np.full(shape, _FULL, dtype=np.uint32),
    )


def packed_edge_acc(mag, sign, s_v, edge_index: int, shape) -> PackedAccumulator:
    """Single-edge accumulator for the packed reduce."""
    return PackedAccumulator(
        m1=np.asarray(mag, dtype=np.uint32).copy(),
        m2=np.full(shape, _S127, dtype=np.uint32),
        s_vc=np.asarray(sign, dtype=np.uint32).copy(),
        s_v=np.asarray(s_v, dtype=np.uint32).copy(),
        tag=np.full(shape, np.uint32(edge_index) * _ONES, dtype=np.uint32),
    )


@dataclass
class ValueAccumulator:
    """Scalar-domain accumulator over plain numpy arrays.

    Signs are boolean (True = negative) so products become xor; tags are the
    contributing edge index, -1 for the identity.
    """

    m1: np.ndarray
    m2: np.ndarray
    s_vc: np.ndarray
    s_v: np.ndarray
    tag: np.ndarray

    def merge(self, other: "ValueAccumulator") -> "ValueAccumulator":
        y_wins = other.m1 < self.m1
        m1 = np.where(y_wins, other.m1, self.m1)
        loser = np.where(y_wins, self.m1, other.m1)
        m2 = np.minimum(loser, np.minimum(self.m2, other.m2))
        return ValueAccumulator(
            m1=m1,
            m2=m2,
            s_vc=self.s_vc ^ other.s_vc,
            s_v=self.s_v ^ other.s_v,
            tag=np.where(y_wins, other.tag, self.tag),
        )


def value_identity(shape, sat) -> ValueAccumulator:
    m = np.full(shape, sat)
    return ValueAccumulator(
        m1=m.copy(), m2=m.copy(),
        s_vc=np.zeros(shape, dtype=bool), s_v=np.zeros(shape, dtype=bool),
        tag=np.full(shape, -1, dtype=np.int64),
    )


def value_edge_acc(mag, sign, s_v, edge_index: int, sat) -> ValueAccumulator:
    mag = np.asarray(mag)
    return ValueAccumulator(
        m1=mag.copy(),
        m2=np.full(mag.shape, sat, dtype=mag.dtype),
        s_vc=np.asarray(sign, dtype=bool).copy(),
        s_v=np.asarray(s_v, dtype=bool).copy(),
        tag=np.full(mag.shape, edge_index, dtype=np.int64),
    )


Accumulator = Union[PackedAccumulator, ValueAccumulator]


def acc_merge(x: Accumulator, y: Accumulator) -> Accumulator:
    """Associative merge; on m1 ties the x (lower-partition) tag survives."""
    return x.merge(y)


def tree_reduce(partials) -> list:
    """Butterfly-merge alpha partials in log2(alpha) rounds.

    Every output slot holds the identical fully merged value; the merge
    order is the fixed binary tree, so results are deterministic.
    """
    n = len(partials)
    if n == 0 or n & (n - 1):
        raise ValueError(f"partial count must be a power of two, got {n}")
    cur = list(partials)
    step = 1
    while step < n:
        nxt = []
        for p in range(n):
            q = p ^ step
            lo, hi = (p, q) if p < q else (q, p)
            nxt.append(acc_merge(cur[lo], cur[hi]))
        cur = nxt
        step <<= 1
    return cur
