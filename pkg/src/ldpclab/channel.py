"""BPSK modulation, AWGN, LLR demapping, and decoder-domain quantization.

Sign convention: positive LLR means bit 0 is more likely. BPSK maps bit b to
symbol 1 - 2b, so the ML demapper is L = 2y / sigma^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ldpclab.basegraph import CodeParams

INT8_MAX = 127
F16_MAX = 65504.0


@dataclass(frozen=True)
class QuantConfig:
    """Decoder-domain representation of channel LLRs.

    `scale` is quantization steps per LLR unit (int8 mode only); int8
    magnitudes saturate at 127, i.e. at 127/scale LLR units. `clip` bounds
    float-mode magnitudes; f16 additionally saturates at the largest
    representable half-precision value.
    """

    mode: str = "int8"
    scale: float = 8.0
    clip: float = math.inf

    def __post_init__(self):
        if self.mode not in ("int8", "f16", "f32"):
            raise ValueError(f"unknown quantization mode {self.mode!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")


def bpsk_exact(bits) -> np.ndarray:
    """Noise-disabled limit: exact +/-1 symbols."""
    b = np.asarray(bits, dtype=np.float64)
    return 1.0 - 2.0 * b


def bpsk_awgn(bits, sigma: float, rng) -> np.ndarray:
    """BPSK symbols with N(0, sigma^2) noise, deterministic under the rng."""
    if sigma <= 0:
        raise ValueError("sigma must be positive (use bpsk_exact for the "
                         "noise-disabled limit)")
    rng = np.random.default_rng(rng)
    symbols = bpsk_exact(bits)
    return symbols + rng.normal(0.0, sigma, size=symbols.shape)


def demap_llr(symbols, sigma: float) -> np.ndarray:
    """Bit LLRs from received BPSK symbols: L = 2y / sigma^2."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return 2.0 * np.asarray(symbols, dtype=np.float64) / (sigma * sigma)


def quantize(llrs, cfg: QuantConfig, params: CodeParams) -> np.ndarray:
    """Depuncture and quantize channel LLRs into the decoder domain.

    Input is one LLR per transmitted bit (length n_tx, possibly batched as
    (..., n_tx)); output has length n_c with the 2Z punctured positions set
    to exact zero. int8 values are round(L*scale) clamped to [-127, 127];
    f16 rounds to nearest-even half precision.
    """
    arr = np.asarray(llrs, dtype=np.float64)
    if arr.shape[-1] != params.n_tx:
        raise ValueError(f"expected {params.n_tx} LLRs, got {arr.shape[-1]}")
    full = np.zeros(arr.shape[:-1] + (params.n_c,), dtype=np.float64)
    full[..., 2 * params.z:] = arr
    if cfg.mode == "int8":
        steps = np.rint(full * cfg.scale)
        return np.clip(steps, -INT8_MAX, INT8_MAX).astype(np.int8)
    clipped = np.clip(full, -cfg.clip, cfg.clip)
    if cfg.mode == "f16":
        return np.clip(clipped, -F16_MAX, F16_MAX).astype(np.float16)
    return clipped.astype(np.float32)


def ebn0_to_sigma(ebn0_db: float, rate_eff: float) -> float:
    """Noise sigma for a target Eb/N0 over transmitted bits.

    rate_eff = K / N_tx accounts for puncturing: energy per information bit
    is spread over the bits actually sent. Es = 1, N0 = 2 sigma^2.
    """
    if rate_eff <= 0:
        raise ValueError("effective rate must be positive")
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return math.sqrt(1.0 / (2.0 * rate_eff * ebn0))
