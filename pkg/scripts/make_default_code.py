#!/usr/bin/env python3
"""Regenerate the bundled default LDPC matrix.

Builds the rate-1/2, length-1296 parity-check matrix shipped in
``src/oblink/codes/`` with progressive edge growth (PEG): variables are
added one at a time with degree 3, each new edge reaching for the check
farthest from the variable in the current graph (unreached checks
first), ties broken by lowest degree and then a seeded shuffle. The
result is checked for girth >= 6 (no 4-cycles) and full GF(2) rank, so
k_info is exactly n/2. The construction is deterministic: rerunning this
script reproduces the committed file byte for byte.

The length and rate follow the common wifi-family 1296/648 geometry, but
the matrix itself is this construction, not any standardized table.
"""

from __future__ import annotations

import argparse
from collections import deque
from pathlib import Path

import numpy as np

from oblink.fec import _gf2_row_reduce, parse_alist, write_alist

N_CODE = 1296
M_CHECKS = 648
VAR_DEGREE = 3
SEED = 20240811


def peg_construct(n: int, m: int, dv: int, rng: np.random.Generator) -> np.ndarray:
    var_adj: list[list[int]] = [[] for _ in range(n)]
    chk_adj: list[list[int]] = [[] for _ in range(m)]
    chk_deg = np.zeros(m, dtype=np.int64)

    def bfs_reached(v: int) -> np.ndarray:
        """Checks reachable from v in the current graph (all depths)."""
        seen_v = np.zeros(n, dtype=bool)
        seen_c = np.zeros(m, dtype=bool)
        seen_v[v] = True
        frontier = deque(var_adj[v])
        for c in var_adj[v]:
            seen_c[c] = True
        while frontier:
            c = frontier.popleft()
            for v2 in chk_adj[c]:
                if not seen_v[v2]:
                    seen_v[v2] = True
                    for c2 in var_adj[v2]:
                        if not seen_c[c2]:
                            seen_c[c2] = True
                            frontier.append(c2)
        return seen_c

    def pick(candidates: np.ndarray) -> int:
        degs = chk_deg[candidates]
        pool = candidates[degs == degs.min()]
        return int(rng.choice(pool))

    for v in range(n):
        for edge in range(dv):
            if edge == 0:
                candidates = np.arange(m)
            else:
                reached = bfs_reached(v)
                unreached = np.nonzero(~reached)[0]
                if unreached.size:
                    candidates = unreached
                else:
                    # fully connected: take checks at maximal BFS depth from v
                    candidates = _deepest_checks(v, var_adj, chk_adj, m, n)
            candidates = candidates[~np.isin(candidates, var_adj[v])]
            c = pick(candidates)
            var_adj[v].append(c)
            chk_adj[c].append(v)
            chk_deg[c] += 1

    h = np.zeros((m, n), dtype=np.uint8)
    for v, checks in enumerate(var_adj):
        h[checks, v] = 1
    return h


def _deepest_checks(v, var_adj, chk_adj, m, n) -> np.ndarray:
    depth_c = np.full(m, -1, dtype=np.int64)
    seen_v = np.zeros(n, dtype=bool)
    seen_v[v] = True
    frontier_c = list(var_adj[v])
    for c in frontier_c:
        depth_c[c] = 0
    d = 0
    while frontier_c:
        next_vs = []
        for c in frontier_c:
            for v2 in chk_adj[c]:
                if not seen_v[v2]:
                    seen_v[v2] = True
                    next_vs.append(v2)
        d += 1
        frontier_c = []
        for v2 in next_vs:
            for c2 in var_adj[v2]:
                if depth_c[c2] < 0:
                    depth_c[c2] = d
                    frontier_c.append(c2)
    deepest = depth_c.max()
    return np.nonzero(depth_c == deepest)[0]


def has_4cycle(h: np.ndarray) -> bool:
    g = h.astype(np.int64)
    overlap = g @ g.T
    np.fill_diagonal(overlap, 0)
    return bool((overlap > 1).any())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=None, help="output alist path (default: the bundled file)")
    args = parser.parse_args()

    out = Path(args.out) if args.out else Path(__file__).resolve().parent.parent / "src" / "oblink" / "codes" / "ldpc_n1296_k648.alist"

    for attempt in range(20):
        rng = np.random.default_rng(SEED + attempt)
        h = peg_construct(N_CODE, M_CHECKS, VAR_DEGREE, rng)
        _, pivots = _gf2_row_reduce(h)
        rank = len(pivots)
        cyc = has_4cycle(h)
        print(f"attempt {attempt}: rank={rank}/{M_CHECKS}, 4-cycles={cyc}")
        if rank == M_CHECKS and not cyc:
            text = write_alist(h)
            parsed = parse_alist(text)  # self-check before writing
            assert parsed.k_info == N_CODE - M_CHECKS
            out.write_text(text, encoding="ascii")
            row_deg = h.sum(axis=1)
            print(f"wrote {out} (check degrees {row_deg.min()}..{row_deg.max()})")
            return 0
    raise SystemExit("no full-rank 4-cycle-free construction found")


if __name__ == "__main__":
    raise SystemExit(main())
