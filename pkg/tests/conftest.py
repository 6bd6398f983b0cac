"""Shared fixtures: cached graph loads and noisy-block generation."""

from __future__ import annotations

import numpy as np
import pytest

from ldpclab.basegraph import code_params, load_basegraph
from ldpclab.channel import QuantConfig, bpsk_awgn, demap_llr, ebn0_to_sigma, quantize
from ldpclab.codec import encode_batch

_GRAPH_CACHE: dict = {}


def get_graph(bg_id, z):
    key = (bg_id, z)
    if key not in _GRAPH_CACHE:
        _GRAPH_CACHE[key] = load_basegraph(bg_id, z)
    return _GRAPH_CACHE[key]


@pytest.fixture(scope="session")
def bg1_z4():
    return get_graph("BG1", 4)


@pytest.fixture(scope="session")
def bg2_z2():
    return get_graph("BG2", 2)


@pytest.fixture(scope="session")
def bg2_z16():
    return get_graph("BG2", 16)


def make_noisy_blocks(bg, rows_used, ebn0_db, count, seed, mode="int8", scale=8.0):
    """Encode random messages, push through BPSK/AWGN, quantize.

    Returns (messages (count, K), blocks (count, n_c)).
    """
    params = code_params(bg, bg.z, rows_used)
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, 2, size=(count, params.k), dtype=np.uint8)
    tx = encode_batch(msgs, bg, bg.z, rows_used)[:, 2 * bg.z:]
    sigma = ebn0_to_sigma(ebn0_db, params.k / params.n_tx)
    llr = demap_llr(bpsk_awgn(tx, sigma, rng), sigma)
    blocks = quantize(llr, QuantConfig(mode=mode, scale=scale), params)
    return msgs, blocks
