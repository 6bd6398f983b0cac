#!/usr/bin/env python3
"""Generate the quasi-cyclic base graph CSV assets shipped with ldpclab.

The entry positions, dimensions, and encoding structure (double-diagonal
parity core in the first four rows, identity extension columns below) follow
the 5G NR base graphs BG1 (46x68, 316 entries) and BG2 (42x52, 197 entries)
as specified in 3GPP TS 38.212. The per-entry circulant shift coefficients of
the standard are not redistributed here; instead this script synthesizes a
deterministic, girth-aware coefficient assignment per lifting set that
preserves every structural property the codec relies on:

  * entry positions and counts identical to the standard's tables,
  * parity-core shifts chosen so the four core rows sum to a single
    circulant in the first parity column (fast systematic encoding works
    for every lifting size, including the special-cased lifting sets),
  * extension rows carry a shift-0 identity in their own parity column,
  * remaining shifts picked greedily to avoid short cycles in the lifted
    graph across all lifting sizes of the set (larger sizes weighted).

Drop-in replacement with the standard's coefficient tables is possible: the
CSV schema (row,col,s0..s7) matches the standard's layout of eight shift
values per entry, one per lifting set index.

Run from the repository root:  python tools/make_basegraph_assets.py
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "ldpclab" / "assets"

ASSET_VERSION = "1.0"

# Z = a * 2^j with Z <= 384; one shift column per set index.
LIFTING_SETS = [
    [2, 4, 8, 16, 32, 64, 128, 256],
    [3, 6, 12, 24, 48, 96, 192, 384],
    [5, 10, 20, 40, 80, 160, 320],
    [7, 14, 28, 56, 112, 224],
    [9, 18, 36, 72, 144, 288],
    [11, 22, 44, 88, 176, 352],
    [13, 26, 52, 104, 208],
    [15, 30, 60, 120, 240],
]

# Entry positions per base row (columns carrying a circulant), BG1: K_b=22,
# 46 rows, 68 columns, 316 entries. Parity core = columns 22..25, extension
# identity column for row r>=4 is 26+(r-4).
BG1_ROW_COLS = [
    [0, 1, 2, 3, 5, 6, 9, 10, 11, 12, 13, 15, 16, 18, 19, 20, 21, 22, 23],
    [0, 2, 3, 4, 5, 7, 8, 9, 11, 12, 14, 15, 16, 17, 19, 21, 22, 23, 24],
    [0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 13, 14, 15, 17, 18, 19, 20, 24, 25],
    [0, 1, 3, 4, 6, 7, 8, 10, 11, 12, 13, 14, 16, 17, 18, 20, 21, 22, 25],
    [0, 1, 26],
    [0, 1, 3, 12, 16, 21, 22, 27],
    [0, 6, 10, 11, 13, 17, 18, 20, 28],
    [0, 1, 4, 7, 8, 14, 29],
    [0, 1, 3, 12, 16, 19, 21, 22, 24, 30],
    [0, 1, 10, 11, 13, 17, 18, 20, 31],
    [1, 2, 4, 7, 8, 14, 32],
    [0, 1, 12, 16, 21, 22, 23, 33],
    [0, 1, 10, 11, 13, 18, 34],
    [0, 3, 7, 20, 23, 35],
    [0, 12, 15, 16, 17, 21, 36],
    [0, 1, 10, 13, 18, 25, 37],
    [1, 3, 11, 20, 22, 38],
    [0, 14, 16, 17, 21, 39],
    [1, 12, 13, 18, 19, 40],
    [0, 1, 7, 8, 10, 41],
    [0, 3, 9, 11, 22, 42],
    [1, 5, 16, 20, 21, 43],
    [0, 12, 13, 17, 44],
    [1, 2, 10, 18, 45],
    [0, 3, 4, 11, 22, 46],
    [1, 6, 7, 14, 47],
    [0, 2, 4, 15, 48],
    [1, 6, 8, 49],
    [0, 4, 19, 21, 50],
    [1, 14, 18, 25, 51],
    [0, 10, 13, 24, 52],
    [1, 7, 22, 25, 53],
    [0, 12, 14, 24, 54],
    [1, 2, 11, 21, 55],
    [0, 7, 15, 17, 56],
    [1, 6, 12, 22, 57],
    [0, 14, 15, 18, 58],
    [1, 13, 23, 59],
    [0, 9, 10, 12, 60],
    [1, 3, 7, 19, 61],
    [0, 8, 17, 62],
    [1, 3, 9, 18, 63],
    [0, 4, 24, 64],
    [1, 16, 18, 25, 65],
    [0, 7, 9, 22, 66],
    [1, 6, 10, 67],
]

# BG2: K_b=10, 42 rows, 52 columns, 197 entries. Parity core = columns
# 10..13, extension identity column for row r>=4 is 14+(r-4).
BG2_ROW_COLS = [
    [0, 1, 2, 3, 6, 9, 10, 11],
    [0, 3, 4, 5, 6, 7, 8, 9, 11, 12],
    [0, 1, 3, 4, 8, 10, 12, 13],
    [1, 2, 4, 5, 6, 7, 8, 9, 10, 13],
    [0, 1, 11, 14],
    [0, 1, 5, 7, 11, 15],
    [0, 5, 7, 9, 11, 16],
    [1, 5, 7, 11, 13, 17],
    [0, 1, 12, 18],
    [1, 8, 10, 11, 19],
    [0, 1, 6, 7, 20],
    [0, 7, 9, 13, 21],
    [1, 3, 11, 22],
    [0, 1, 8, 13, 23],
    [1, 6, 11, 13, 24],
    [0, 10, 11, 25],
    [1, 9, 11, 12, 26],
    [1, 5, 11, 12, 27],
    [0, 6, 7, 28],
    [0, 1, 10, 29],
    [1, 4, 11, 30],
    [0, 8, 13, 31],
    [1, 2, 32],
    [0, 3, 5, 33],
    [1, 2, 9, 34],
    [0, 5, 35],
    [2, 7, 12, 13, 36],
    [0, 6, 37],
    [1, 2, 5, 38],
    [0, 4, 39],
    [2, 5, 7, 9, 40],
    [1, 13, 41],
    [0, 5, 12, 42],
    [2, 7, 10, 43],
    [0, 12, 13, 44],
    [1, 5, 11, 45],
    [0, 2, 7, 46],
    [10, 13, 47],
    [1, 5, 11, 48],
    [0, 7, 12, 49],
    [2, 10, 13, 50],
    [1, 5, 11, 51],
]


def _core_fixed_shifts(bg_id: int) -> dict[tuple[int, int], list[int]]:
    """Fixed shifts for the parity core and extension identity columns.

    Shapes the first parity column so the XOR of the four core rows collapses
    to one circulant: its three entries hold shifts {1,0,1} (sum P^0), except
    the special lifting sets where the pattern is {0,105,0} (BG1, set 6) or
    {1,0,0} (BG2, sets 3 and 7), mirroring the per-set encoding quirk of the
    NR graphs. Remaining core diagonals and all extension columns are 0.
    """
    n_sets = len(LIFTING_SETS)
    fixed: dict[tuple[int, int], list[int]] = {}
    if bg_id == 1:
        fixed[(0, 22)] = [1] * n_sets
        fixed[(1, 22)] = [0] * n_sets
        fixed[(3, 22)] = [1] * n_sets
        fixed[(0, 22)][6] = 0
        fixed[(1, 22)][6] = 105
        fixed[(3, 22)][6] = 0
        for rc in [(0, 23), (1, 23), (1, 24), (2, 24), (2, 25), (3, 25)]:
            fixed[rc] = [0] * n_sets
        ext_first_col = 26
        row_cols = BG1_ROW_COLS
    else:
        fixed[(0, 10)] = [0] * n_sets
        fixed[(2, 10)] = [0] * n_sets
        fixed[(3, 10)] = [0] * n_sets
        fixed[(0, 10)][3] = 1
        fixed[(0, 10)][7] = 1
        for rc in [(0, 11), (1, 11), (1, 12), (2, 12), (2, 13), (3, 13)]:
            fixed[rc] = [0] * n_sets
        ext_first_col = 14
        row_cols = BG2_ROW_COLS
    for r in range(4, len(row_cols)):
        fixed[(r, ext_first_col + r - 4)] = [0] * n_sets
    return fixed


def _cycle_score(
    shift: int,
    row: int,
    col: int,
    assigned: dict[tuple[int, int], int],
    col_rows: dict[int, list[int]],
    row_cols: list[list[int]],
    z_values: list[int],
) -> int:
    """Weighted count of length-4 cycles a candidate shift would create.

    A 4-cycle in the lifted graph between entries (row,col),(row,c2),
    (r2,col),(r2,c2) exists for lifting size Z when the alternating shift sum
    is 0 mod Z. Violations at larger Z weigh more: short cycles are
    unavoidable at tiny lifting sizes but costly at realistic ones.
    """
    score = 0
    for r2 in col_rows[col]:
        if r2 == row or (r2, col) not in assigned:
            continue
        s_r2_col = assigned[(r2, col)]
        common = set(row_cols[row]) & set(row_cols[r2])
        for c2 in common:
            if c2 == col:
                continue
            if (row, c2) not in assigned or (r2, c2) not in assigned:
                continue
            delta = shift - assigned[(row, c2)] + assigned[(r2, c2)] - s_r2_col
            for z in z_values:
                if delta % z == 0:
                    score += z
    return score


def synthesize(bg_id: int) -> list[tuple[int, int, list[int]]]:
    """Return [(row, col, [shift per lifting set])] for one base graph."""
    row_cols = BG1_ROW_COLS if bg_id == 1 else BG2_ROW_COLS
    fixed = _core_fixed_shifts(bg_id)
    col_rows: dict[int, list[int]] = {}
    for r, cols in enumerate(row_cols):
        for c in cols:
            col_rows.setdefault(c, []).append(r)

    # Per set: greedy assignment over free entries in (row, col) order.
    per_set: list[dict[tuple[int, int], int]] = []
    for set_idx, z_values in enumerate(LIFTING_SETS):
        z_max = max(z_values)
        rng = np.random.default_rng(0xBA5E + 1000 * bg_id + set_idx)
        assigned = {rc: shifts[set_idx] for rc, shifts in fixed.items()}
        for r, cols in enumerate(row_cols):
            for c in cols:
                if (r, c) in assigned:
                    continue
                candidates = rng.integers(0, z_max, size=96)
                best, best_score = None, None
                for cand in candidates:
                    cand = int(cand)
                    score = _cycle_score(
                        cand, r, c, assigned, col_rows, row_cols, z_values
                    )
                    if best_score is None or score < best_score:
                        best, best_score = cand, score
                        if score == 0:
                            break
                assigned[(r, c)] = best
        per_set.append(assigned)

    entries = []
    for r, cols in enumerate(row_cols):
        for c in cols:
            entries.append((r, c, [per_set[i][(r, c)] for i in range(len(LIFTING_SETS))]))
    return entries


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, object] = {"version": ASSET_VERSION, "graphs": {}}
    for bg_id, expected in ((1, 316), (2, 197)):
        entries = synthesize(bg_id)
        assert len(entries) == expected, (bg_id, len(entries))
        path = OUT_DIR / f"bg{bg_id}.csv"
        lines = ["row,col,s0,s1,s2,s3,s4,s5,s6,s7"]
        for r, c, shifts in entries:
            lines.append(f"{r},{c}," + ",".join(str(s) for s in shifts))
        text = "\n".join(lines) + "\n"
        path.write_text(text)
        digest = hashlib.sha256(text.encode()).hexdigest()
        manifest["graphs"][f"bg{bg_id}"] = {
            "file": path.name,
            "entries": expected,
            "sha256": digest,
        }
        print(f"wrote {path} ({expected} entries, sha256 {digest[:12]})")
    (OUT_DIR / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {OUT_DIR / 'manifest.json'}")


if __name__ == "__main__":
    main()
