"""Layered and flooding min-sum decoders over the quasi-cyclic structure.

Two datapaths produce bit-identical results on identical quantized inputs:

* a batched scalar engine (int8 widened to int32, f16, or f32) that serves
  as the reference and the fast simulation path, and
* a packed engine (rho=4 codeword lanes per 32-bit word) built on the
  sign-magnitude SWAR kernels.

Row processing supports the high-throughput shape (one sequential scan over
the row's columns) and the low-latency shape (alpha strided partitions
folded independently, then butterfly-merged in log2(alpha) rounds). Both
shapes compute the same (m1, m2, signs); only the argmin tag may differ on
ties, where m1 = m2 makes the outputs tie-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ldpclab import kernels
from ldpclab.basegraph import BaseGraph
from ldpclab.codec import crc_check

INT8_SAT = 127
F16_SAT = np.float16(65504.0)


class Strategy(str, Enum):
    HIGH_THROUGHPUT = "high_throughput"
    LOW_LATENCY = "low_latency"


class Precision(str, Enum):
    INT8 = "int8"
    F16 = "f16"
    F32 = "f32"


class EarlyStop(str, Enum):
    SYNDROME = "syndrome"
    CRC = "crc"
    NONE = "none"


@dataclass(frozen=True)
class DecodeConfig:
    """Decoder knobs; validated against the precision/lane rules."""

    beta: float = 0.75
    max_iter: int = 20
    strategy: Strategy = Strategy.HIGH_THROUGHPUT
    alpha: int = 4
    rho: int = 1
    precision: Precision = Precision.INT8
    early_stop: EarlyStop = EarlyStop.SYNDROME
    crc_kind: str = "crc24b"

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        strategy = Strategy(self.strategy)
        precision = Precision(self.precision)
        early = EarlyStop(self.early_stop)
        object.__setattr__(self, "strategy", strategy)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "early_stop", early)
        if strategy is Strategy.LOW_LATENCY:
            if self.alpha < 1 or self.alpha & (self.alpha - 1):
                raise ValueError("alpha must be a power of two for low latency")
        allowed_rho = {
            Precision.INT8: (1, 4),
            Precision.F16: (1, 2),
            Precision.F32: (1,),
        }[precision]
        if self.rho not in allowed_rho:
            raise ValueError(
                f"rho={self.rho} is inconsistent with precision {precision.value} "
                f"(allowed: {allowed_rho})"
            )


@dataclass
class DecodeResult:
    """Per-codeword outcome; arrays indexed by lane/batch position."""

    bits: np.ndarray              # (B, K) hard decisions on information bits
    iterations: np.ndarray        # (B,) iterations run until exit
    success: np.ndarray           # (B,) zero syndrome (and CRC in crc mode)
    syndrome_weight: np.ndarray   # (B,) unsatisfied checks at exit
    crc_ok: np.ndarray | None = None


@dataclass
class DecodeWorkspace:
    """Mutable decode state for one batch (or packed lane group)."""

    bg: BaseGraph
    rows_used: int
    lanes: int
    packed: bool
    iteration: int = 0
    # scalar path: (B, n_blocks, Z) posteriors and (B, E, Z) messages
    l_b: np.ndarray | None = None
    l_v: np.ndarray | None = None
    messages: np.ndarray | None = None
    # packed path: sign-magnitude words over (n_blocks, Z) and (E, Z)
    l_v_pk: kernels.PackedWord | None = None
    messages_pk: kernels.PackedWord | None = None
    row_gather: list = field(default_factory=list, repr=False)

    @property
    def n_edges(self) -> int:
        return int(self.bg.w_r[: self.rows_used].sum())


# ---------------------------------------------------------------------------
# Row-level check node updates


def _partition_indices(w: int, alpha: int) -> list[np.ndarray]:
    """Strided column assignment: partition p takes edges p, p+alpha, ..."""
    return [np.arange(p, w, alpha) for p in range(alpha)]


def _reduce_values(mags, signs, sv, strategy: Strategy, alpha: int, sat):
    """(m1, m2, tag, s_vc, s_v) over the edge axis (axis 1) of (B, w, Z).

    Accumulator fields here are views and scalars, never copies: acc_merge
    allocates its outputs and leaves inputs untouched.
    """
    w = mags.shape[1]
    sat_val = mags.dtype.type(sat)

    def fold(indices):
        acc = kernels.ValueAccumulator(m1=sat_val, m2=sat_val,
                                       s_vc=False, s_v=False, tag=-1)
        for j in indices:
            edge = kernels.ValueAccumulator(
                m1=mags[:, j], m2=sat_val,
                s_vc=signs[:, j], s_v=sv[:, j], tag=int(j),
            )
            acc = kernels.acc_merge(acc, edge)
        return acc

    if strategy is Strategy.HIGH_THROUGHPUT or alpha == 1:
        acc = fold(range(w))
    else:
        partials = [fold(idx) for idx in _partition_indices(w, alpha)]
        acc = kernels.tree_reduce(partials)[0]
    return acc.m1, acc.m2, acc.tag, acc.s_vc, acc.s_v


def check_node_minsum(inputs, beta: float = 0.75, strategy=Strategy.HIGH_THROUGHPUT,
                      alpha: int = 1) -> np.ndarray:
    """Min-sum check update over the last axis (the row's edges).

    Edge i receives beta-scaled m2 if it contributed the minimum, m1
    otherwise, with the product of the other edges' signs. Integer inputs
    use the fixed-point rule floor(beta * magnitude); float inputs scale in
    their own dtype.
    """
    arr = np.asarray(inputs)
    w = arr.shape[-1]
    if w < 2:
        raise ValueError("a check row needs at least two edges")
    integer = np.issubdtype(arr.dtype, np.integer)
    work = (arr.astype(np.int32) if integer else arr).reshape(-1, w)
    mags = np.abs(work)
    signs = work < 0
    sat = INT8_SAT if integer else _float_sat(arr.dtype)
    m1, m2, tag, s_vc, _ = _reduce_values(mags, signs, signs, Strategy(strategy), alpha, sat)
    out = np.empty_like(work)
    for j in range(w):
        mag = _beta_mag(np.where(tag == j, m2, m1), beta, integer, work.dtype)
        out[:, j] = np.where(s_vc ^ signs[:, j], -mag, mag)
    out = out.reshape(arr.shape)
    return out.astype(arr.dtype) if integer else out


def check_node_exact(inputs) -> np.ndarray:
    """Exact boxplus update 2*atanh(prod tanh(L/2)) over the last axis.

    Float64 oracle; outputs clamp where the product saturates to +/-1.
    """
    arr = np.asarray(inputs, dtype=np.float64)
    if arr.shape[-1] < 2:
        raise ValueError("a check row needs at least two edges")
    t = np.tanh(arr / 2.0)
    out = np.empty_like(arr)
    w = arr.shape[-1]
    for i in range(w):
        others = np.prod(np.delete(t, i, axis=-1), axis=-1)
        others = np.clip(others, -1.0 + 1e-15, 1.0 - 1e-15)
        out[..., i] = 2.0 * np.arctanh(others)
    return out


def _float_sat(dtype):
    return F16_SAT if dtype == np.float16 else np.float32(np.inf)


def _beta_mag(mag, beta, integer: bool, dtype):
    if integer:
        return np.floor(beta * mag).astype(np.int32)
    b = dtype.type(beta) if hasattr(dtype, "type") else np.dtype(dtype).type(beta)
    return b * mag


# ---------------------------------------------------------------------------
# Scalar engine (reference path, batched over codewords)


def _engine_dtype(precision: Precision):
    return {
        Precision.INT8: np.int32,
        Precision.F16: np.float16,
        Precision.F32: np.float32,
    }[precision]


def _clamp(x, precision: Precision):
    if precision is Precision.INT8:
        return np.clip(x, -INT8_SAT, INT8_SAT)
    if precision is Precision.F16:
        return np.clip(x, -F16_SAT, F16_SAT)
    return x


def _sat_value(precision: Precision):
    if precision is Precision.INT8:
        return INT8_SAT
    if precision is Precision.F16:
        return F16_SAT
    return np.float32(np.inf)


def _build_row_gather(bg: BaseGraph, rows_used: int) -> list:
    """Per row: (cols, shifts, edge offset, gather index (w, Z))."""
    meta = []
    offset = 0
    zi = np.arange(bg.z)
    for r in range(rows_used):
        cols, shifts = bg.row_entries(r)
        idx = (zi[None, :] + shifts[:, None]) % bg.z
        meta.append((cols.astype(np.int64), shifts, offset, idx))
        offset += len(cols)
    return meta


def init_workspace(llrs, bg: BaseGraph, cfg: DecodeConfig) -> DecodeWorkspace:
    """Workspace from quantized decoder-domain LLRs of shape (B, n_c) or (n_c,)."""
    arr = np.asarray(llrs)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.shape[-1] % bg.z:
        raise ValueError("LLR block length must be a multiple of Z")
    rows_used = arr.shape[-1] // bg.z - bg.k_b
    if not 4 <= rows_used <= bg.m_bg:
        raise ValueError(
            f"LLR block length implies rows_used={rows_used}, outside [4, {bg.m_bg}]"
        )
    batch = arr.shape[0]
    packed = cfg.precision is Precision.INT8 and cfg.rho == 4
    if packed and batch != 4:
        raise ValueError("packed int8 decoding packs exactly rho=4 lanes per group")
    n_blocks = bg.k_b + rows_used
    ws = DecodeWorkspace(bg=bg, rows_used=rows_used, lanes=batch, packed=packed)
    ws.row_gather = _build_row_gather(bg, rows_used)
    n_edges = ws.n_edges
    if packed:
        vals = arr.astype(np.int32).reshape(4, n_blocks, bg.z)
        if np.abs(vals).max(initial=0) > INT8_SAT:
            raise ValueError("int8 LLR magnitudes must be at most 127")
        ws.l_v_pk = kernels.pack_values(np.moveaxis(vals, 0, -1))
        zeros = np.zeros((n_edges, bg.z), dtype=np.uint32)
        ws.messages_pk = kernels.PackedWord(zeros, zeros.copy())
        ws.l_b = vals  # retained for flooding/trace symmetry
    else:
        dtype = _engine_dtype(cfg.precision)
        lv = arr.astype(dtype).reshape(batch, n_blocks, bg.z)
        if cfg.precision is Precision.INT8 and np.abs(lv).max(initial=0) > INT8_SAT:
            raise ValueError("int8 LLR magnitudes must be at most 127")
        ws.l_b = lv.copy()
        ws.l_v = lv
        ws.messages = np.zeros((batch, n_edges, bg.z), dtype=dtype)
    return ws


def _scalar_layer(ws: DecodeWorkspace, cfg: DecodeConfig, r: int) -> None:
    cols, shifts, e0, idx = ws.row_gather[r]
    w = len(cols)
    lv_rows = ws.l_v[:, cols[:, None], idx]            # (B, w, Z), check-aligned
    with np.errstate(over="ignore"):                   # f16 saturates via clamp
        lvc = _clamp(lv_rows - ws.messages[:, e0:e0 + w, :], cfg.precision)
    mags = np.abs(lvc)
    signs = lvc < 0
    sv = lv_rows < 0
    sat = _sat_value(cfg.precision)
    m1, m2, tag, s_vc, _ = _reduce_values(
        mags, signs, sv, cfg.strategy, cfg.alpha, sat
    )
    integer = cfg.precision is Precision.INT8
    b1 = _beta_mag(m1, cfg.beta, integer, ws.l_v.dtype)
    b2 = _beta_mag(m2, cfg.beta, integer, ws.l_v.dtype)
    new_lv = np.empty_like(lv_rows)
    outs = np.empty_like(lvc)
    with np.errstate(over="ignore"):
        for j in range(w):
            mag = np.where(tag == j, b2, b1)
            out = np.where(s_vc ^ signs[:, j], -mag, mag).astype(ws.l_v.dtype)
            outs[:, j] = out
            new_lv[:, j] = _clamp(lvc[:, j] + out, cfg.precision)
    ws.messages[:, e0:e0 + w, :] = outs
    ws.l_v[:, cols[:, None], idx] = new_lv


def _scalar_syndrome(ws: DecodeWorkspace) -> np.ndarray:
    hard = ws.l_v < 0
    weight = np.zeros(ws.lanes, dtype=np.int64)
    for cols, _, _, idx in ws.row_gather:
        parity = np.bitwise_xor.reduce(hard[:, cols[:, None], idx], axis=1)
        weight += parity.sum(axis=-1)
    return weight


def _scalar_hard_bits(ws: DecodeWorkspace) -> np.ndarray:
    bits = (ws.l_v[:, : ws.bg.k_b, :] < 0).astype(np.uint8)
    return bits.reshape(ws.lanes, -1)


def _scalar_flood(ws: DecodeWorkspace, cfg: DecodeConfig) -> None:
    """One flooding iteration: every row consumes the previous posteriors."""
    lv_prev = ws.l_v.copy()
    new_msgs = np.empty_like(ws.messages)
    sat = _sat_value(cfg.precision)
    integer = cfg.precision is Precision.INT8
    for cols, shifts, e0, idx in ws.row_gather:
        w = len(cols)
        lv_rows = lv_prev[:, cols[:, None], idx]
        with np.errstate(over="ignore"):
            lvc = _clamp(lv_rows - ws.messages[:, e0:e0 + w, :], cfg.precision)
        mags = np.abs(lvc)
        signs = lvc < 0
        m1, m2, tag, s_vc, _ = _reduce_values(
            mags, signs, signs, cfg.strategy, cfg.alpha, sat
        )
        b1 = _beta_mag(m1, cfg.beta, integer, ws.l_v.dtype)
        b2 = _beta_mag(m2, cfg.beta, integer, ws.l_v.dtype)
        for j in range(w):
            mag = np.where(tag == j, b2, b1)
            new_msgs[:, e0 + j] = np.where(s_vc ^ signs[:, j], -mag, mag)
    ws.messages = new_msgs
    # Variable update: L_v = L_b + sum of incoming messages, widened then
    # saturated once per iteration.
    acc = ws.l_b.astype(np.int64 if integer else np.float64).copy()
    for cols, shifts, e0, idx in ws.row_gather:
        for j, (c, s) in enumerate(zip(cols, shifts)):
            acc[:, c, :] += np.roll(ws.messages[:, e0 + j, :], s, axis=-1).astype(acc.dtype)
    ws.l_v = _clamp(acc, cfg.precision).astype(ws.l_v.dtype)


# ---------------------------------------------------------------------------
# Packed engine (rho=4 int8 lanes per word)


def _beta_lut(beta: float) -> np.ndarray:
    lut = np.floor(beta * np.arange(256)).astype(np.uint32)
    return np.minimum(lut, 255)


def _packed_gather(word: np.ndarray, cols, idx) -> np.ndarray:
    return word[cols[:, None], idx]


def _packed_layer(ws: DecodeWorkspace, cfg: DecodeConfig, r: int, lut: np.ndarray) -> None:
    cols, shifts, e0, idx = ws.row_gather[r]
    w = len(cols)
    lv = kernels.PackedWord(
        _packed_gather(ws.l_v_pk.mag, cols, idx),
        _packed_gather(ws.l_v_pk.sign, cols, idx),
    )
    msg = kernels.PackedWord(
        ws.messages_pk.mag[e0:e0 + w], ws.messages_pk.sign[e0:e0 + w]
    )
    lvc = kernels.sat_sub(lv, msg)

    # field views and scalar identity words: acc_merge never mutates inputs
    sat_w = np.uint32(0x7F7F7F7F)
    zero_w = np.uint32(0)
    ident = kernels.PackedAccumulator(m1=sat_w, m2=sat_w, s_vc=zero_w,
                                      s_v=zero_w, tag=np.uint32(0xFFFFFFFF))

    def edge_acc(j):
        return kernels.PackedAccumulator(
            m1=lvc.mag[j], m2=sat_w, s_vc=lvc.sign[j], s_v=lv.sign[j],
            tag=np.uint32(j) * np.uint32(0x01010101),
        )

    if cfg.strategy is Strategy.HIGH_THROUGHPUT or cfg.alpha == 1:
        acc = ident
        for j in range(w):
            acc = kernels.acc_merge(acc, edge_acc(j))
    else:
        partials = []
        for part in _partition_indices(w, cfg.alpha):
            p_acc = ident
            for j in part:
                p_acc = kernels.acc_merge(p_acc, edge_acc(int(j)))
            partials.append(p_acc)
        acc = kernels.tree_reduce(partials)[0]

    b1 = kernels.apply_lut_u8(acc.m1, lut)
    b2 = kernels.apply_lut_u8(acc.m2, lut)
    # all per-edge selects are elementwise: run them on the (w, Z) block
    jw = (np.arange(w, dtype=np.uint32) * np.uint32(0x01010101))[:, None]
    is_min = ~kernels.vcmplt_u8(np.uint32(0), acc.tag[None, :] ^ jw)
    mag = (is_min & b2[None, :]) | (~is_min & b1[None, :])
    sign = (acc.s_vc[None, :] ^ lvc.sign) & kernels.vcmplt_u8(np.uint32(0), mag)
    out = kernels.PackedWord(mag, sign)
    upd = kernels.sat_add(lvc, out)
    ws.messages_pk.mag[e0:e0 + w] = out.mag
    ws.messages_pk.sign[e0:e0 + w] = out.sign
    ws.l_v_pk.mag[cols[:, None], idx] = upd.mag
    ws.l_v_pk.sign[cols[:, None], idx] = upd.sign


def _packed_syndrome(ws: DecodeWorkspace) -> np.ndarray:
    weight = np.zeros(4, dtype=np.int64)
    for cols, _, _, idx in ws.row_gather:
        parity = np.bitwise_xor.reduce(
            _packed_gather(ws.l_v_pk.sign, cols, idx), axis=0
        )
        lanes = kernels.unpack_u8(parity)
        weight += (lanes != 0).sum(axis=tuple(range(lanes.ndim - 1)))
    return weight


def _packed_hard_bits(ws: DecodeWorkspace) -> np.ndarray:
    lanes = kernels.unpack_u8(ws.l_v_pk.sign[: ws.bg.k_b])
    bits = (lanes != 0).astype(np.uint8)          # (k_b, Z, 4)
    return np.moveaxis(bits, -1, 0).reshape(4, -1)


def _packed_min_abs(ws: DecodeWorkspace) -> np.ndarray:
    mags = kernels.unpack_u8(ws.l_v_pk.mag)
    return mags.min(axis=tuple(range(mags.ndim - 1)))


# ---------------------------------------------------------------------------
# Public decoding entry points


def layered_iteration(ws: DecodeWorkspace, bg: BaseGraph, cfg: DecodeConfig) -> DecodeWorkspace:
    """One full layered pass: rows in ascending order, each feeding the next."""
    if ws.packed:
        lut = _beta_lut(cfg.beta)
        for r in range(ws.rows_used):
            _packed_layer(ws, cfg, r, lut)
    else:
        for r in range(ws.rows_used):
            _scalar_layer(ws, cfg, r)
    ws.iteration += 1
    return ws


def _syndrome_weights(ws: DecodeWorkspace) -> np.ndarray:
    return _packed_syndrome(ws) if ws.packed else _scalar_syndrome(ws)


def _hard_bits(ws: DecodeWorkspace) -> np.ndarray:
    return _packed_hard_bits(ws) if ws.packed else _scalar_hard_bits(ws)


def _min_abs_lv(ws: DecodeWorkspace) -> np.ndarray:
    if ws.packed:
        return _packed_min_abs(ws).astype(np.float64)
    return np.abs(ws.l_v).min(axis=(1, 2)).astype(np.float64)


def _run_schedule(llrs, bg, cfg, trace, step) -> DecodeResult:
    ws = init_workspace(llrs, bg, cfg)
    batch = ws.lanes
    k = bg.k_b * bg.z
    bits = np.zeros((batch, k), dtype=np.uint8)
    iterations = np.full(batch, cfg.max_iter, dtype=np.int64)
    weights_out = np.zeros(batch, dtype=np.int64)
    success = np.zeros(batch, dtype=bool)
    crc_ok = np.zeros(batch, dtype=bool) if cfg.early_stop is EarlyStop.CRC else None
    done = np.zeros(batch, dtype=bool)

    for it in range(1, cfg.max_iter + 1):
        step(ws)
        weights = _syndrome_weights(ws)
        margins = _min_abs_lv(ws)
        if trace is not None:
            for b in range(batch):
                trace.append((b, it, int(weights[b]), float(margins[b])))
        if cfg.early_stop is EarlyStop.NONE:
            continue
        # a zero-margin posterior is an undecided bit (erasure fixed point):
        # the all-zero hard decision it implies is not a found codeword
        candidates = ~done & (weights == 0) & (margins > 0)
        if candidates.any():
            hard = _hard_bits(ws)
            for b in np.flatnonzero(candidates):
                if cfg.early_stop is EarlyStop.CRC:
                    ok = crc_check(hard[b], cfg.crc_kind)
                    crc_ok[b] = ok
                    if not ok:
                        continue
                bits[b] = hard[b]
                iterations[b] = it
                weights_out[b] = 0
                success[b] = True
                done[b] = True
        if done.all():
            break

    if not done.all():
        hard = _hard_bits(ws)
        weights = _syndrome_weights(ws)
        margins = _min_abs_lv(ws)
        for b in np.flatnonzero(~done):
            bits[b] = hard[b]
            iterations[b] = ws.iteration
            weights_out[b] = int(weights[b])
            success[b] = weights[b] == 0 and margins[b] > 0
            if crc_ok is not None and success[b]:
                crc_ok[b] = crc_check(hard[b], cfg.crc_kind)
                success[b] = bool(crc_ok[b])
    return DecodeResult(
        bits=bits, iterations=iterations, success=success,
        syndrome_weight=weights_out, crc_ok=crc_ok,
    )


def decode(llrs, bg: BaseGraph, cfg: DecodeConfig, trace: list | None = None) -> DecodeResult:
    """Layered min-sum decode of one batch of quantized LLR blocks.

    `llrs` has shape (n_c,) or (B, n_c); packed int8 (rho=4) requires B to
    be a multiple of 4 and processes each group of four codewords in lanes.
    Early termination is checked after every full iteration. The optional
    `trace` list collects (codeword, iteration, syndrome weight, min |L_v|).
    """
    arr = np.asarray(llrs)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if cfg.precision is Precision.INT8 and cfg.rho == 4:
        if arr.shape[0] % 4:
            raise ValueError("packed int8 decode needs a multiple of 4 codewords")
        results = []
        for g in range(0, arr.shape[0], 4):
            group_trace = None if trace is None else []
            results.append(_run_schedule(arr[g:g + 4], bg, cfg, group_trace,
                                         lambda ws: layered_iteration(ws, bg, cfg)))
            if trace is not None:
                trace.extend((b + g, *rest) for b, *rest in group_trace)
        return _concat_results(results)
    return _run_schedule(arr, bg, cfg, trace, lambda ws: layered_iteration(ws, bg, cfg))


def decode_flooding(llrs, bg: BaseGraph, cfg: DecodeConfig, trace: list | None = None) -> DecodeResult:
    """Flooding-schedule decode: all rows consume the previous iteration."""
    if cfg.precision is Precision.INT8 and cfg.rho == 4:
        raise ValueError("flooding decoding runs on the scalar path (rho < 4)")
    arr = np.asarray(llrs)
    if arr.ndim == 1:
        arr = arr[None, :]

    def step(ws):
        _scalar_flood(ws, cfg)
        ws.iteration += 1

    return _run_schedule(arr, bg, cfg, trace, step)


def _concat_results(results: list[DecodeResult]) -> DecodeResult:
    return DecodeResult(
        bits=np.concatenate([r.bits for r in results]),
        iterations=np.concatenate([r.iterations for r in results]),
        success=np.concatenate([r.success for r in results]),
        syndrome_weight=np.concatenate([r.syndrome_weight for r in results]),
        crc_ok=(np.concatenate([r.crc_ok for r in results])
                if results[0].crc_ok is not None else None),
    )
