"""Binary LDPC codec plus the rate-1 passthrough path.

Parity-check matrices load from alist text (header ``n m``, the two max
degrees, per-column and per-row degree lists, then 1-based adjacency
lines, zero-padded entries ignored). The systematic encoder comes from
Gaussian elimination over GF(2): pivot columns become parity positions
and the remaining columns carry information bits verbatim. Decoding is
flooding-schedule sum-product with tanh/arctanh check updates on channel
LLRs (positive favours bit 0), early exit once the hard decision
satisfies every check, and clamped message magnitudes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .falling_storage import Frame, frames_to_arrays

# Variable-to-check magnitudes are clipped here before the tanh product;
# the arctanh argument clip below caps check messages near 13.9. Both
# bounds are echoed into harness reports.
LLR_CLAMP = 25.0
_ATANH_LIMIT = 1.0 - 1e-12


class AlistError(ValueError):
    """Malformed alist text."""


@dataclass(frozen=True)
class LdpcCode:
    """A parity-check code with its factor-graph layout and optional encoder.

    ``edge_var`` lists the variable of every edge, grouped by check;
    ``chk_edge``/``chk_var`` are ``(m_checks, max_chk_deg)`` gather tables
    padded with the one-past-the-end sentinel (edge ``n_edges``, variable
    ``n_code``); ``var_edge`` is the variable-side table. The encoder
    fields stay None until :func:`derive_encoder` runs. Instances are
    immutable and safe to share across threads.
    """

    h: np.ndarray
    n_code: int
    m_checks: int
    k_info: int
    edge_var: np.ndarray
    chk_edge: np.ndarray
    chk_var: np.ndarray
    var_edge: np.ndarray
    info_cols: np.ndarray | None = None
    parity_cols: np.ndarray | None = None
    parity_map: np.ndarray | None = None

    @property
    def n_edges(self) -> int:
        return len(self.edge_var)

    @property
    def rate(self) -> float:
        return self.k_info / self.n_code


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of one sum-product decode.

    ``bits`` are the information bits of the posterior hard decision (in
    ``info_cols`` order), ``codeword`` the full hard decision. A parity
    consistent word with any exactly-zero posterior is not declared
    converged: a zero posterior means the decoder holds no evidence for
    that bit, as with all-zero input LLRs.
    """

    bits: np.ndarray
    converged: bool
    iterations_used: int
    codeword: np.ndarray


def _ints(line: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise AlistError(f"non-integer token in alist line: {line!r}") from exc


def parse_alist(text: str) -> LdpcCode:
    """Parse alist text into an :class:`LdpcCode` (decoder-ready, no encoder).

    Cross-checks the variable and check adjacency lists against each
    other and computes ``k_info = n_code - rank(H)`` over GF(2).
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise AlistError("alist needs a header, max degrees, and two degree lists")
    header = _ints(lines[0])
    if len(header) != 2 or header[0] < 1 or header[1] < 1:
        raise AlistError(f"bad alist header: {lines[0]!r}")
    n, m = header
    maxdeg = _ints(lines[1])
    if len(maxdeg) != 2 or maxdeg[0] < 0 or maxdeg[1] < 0:
        raise AlistError(f"bad max-degree line: {lines[1]!r}")
    col_deg = _ints(lines[2])
    row_deg = _ints(lines[3])
    if len(col_deg) != n:
        raise AlistError(f"expected {n} column degrees, got {len(col_deg)}")
    if len(row_deg) != m:
        raise AlistError(f"expected {m} row degrees, got {len(row_deg)}")
    if len(lines) != 4 + n + m:
        raise AlistError(f"expected {4 + n + m} non-blank lines, got {len(lines)}")

    var_to_chk: list[list[int]] = []
    for v in range(n):
        entries = [e for e in _ints(lines[4 + v]) if e != 0]
        if len(entries) != col_deg[v]:
            raise AlistError(f"variable {v + 1}: {len(entries)} entries, degree says {col_deg[v]}")
        if any(not 1 <= e <= m for e in entries):
            raise AlistError(f"variable {v + 1}: check index out of range 1..{m}")
        if len(set(entries)) != len(entries):
            raise AlistError(f"variable {v + 1}: repeated check index")
        var_to_chk.append([e - 1 for e in entries])

    chk_to_var: list[list[int]] = []
    for c in range(m):
        entries = [e for e in _ints(lines[4 + n + c]) if e != 0]
        if len(entries) != row_deg[c]:
            raise AlistError(f"check {c + 1}: {len(entries)} entries, degree says {row_deg[c]}")
        if any(not 1 <= e <= n for e in entries):
            raise AlistError(f"check {c + 1}: variable index out of range 1..{n}")
        if len(set(entries)) != len(entries):
            raise AlistError(f"check {c + 1}: repeated variable index")
        chk_to_var.append([e - 1 for e in entries])

    if max(col_deg, default=0) > maxdeg[0] or max(row_deg, default=0) > maxdeg[1]:
        raise AlistError("a degree list exceeds the declared maxima")
    for v, checks in enumerate(var_to_chk):
        for c in checks:
            if v not in chk_to_var[c]:
                raise AlistError(f"adjacency mismatch: variable {v + 1} lists check {c + 1} but not vice versa")
    if sum(col_deg) != sum(row_deg):
        raise AlistError("column and row degree sums disagree")

    h = np.zeros((m, n), dtype=np.uint8)
    for c, variables in enumerate(chk_to_var):
        h[c, variables] = 1

    code = _with_graph(h)
    _, pivots = _gf2_row_reduce(h)
    return replace(code, k_info=n - len(pivots))


def load_alist(path) -> LdpcCode:
    """Read and parse an alist file."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_alist(fh.read())


def write_alist(h: np.ndarray) -> str:
    """Render a dense binary H as alist text (no zero padding)."""
    h = np.asarray(h, dtype=np.uint8)
    m, n = h.shape
    col_deg = h.sum(axis=0)
    row_deg = h.sum(axis=1)
    lines = [
        f"{n} {m}",
        f"{int(col_deg.max(initial=0))} {int(row_deg.max(initial=0))}",
        " ".join(str(int(d)) for d in col_deg),
        " ".join(str(int(d)) for d in row_deg),
    ]
    for v in range(n):
        lines.append(" ".join(str(int(c) + 1) for c in np.nonzero(h[:, v])[0]))
    for c in range(m):
        lines.append(" ".join(str(int(v) + 1) for v in np.nonzero(h[c])[0]))
    return "\n".join(lines) + "\n"


def _with_graph(h: np.ndarray) -> LdpcCode:
    """Build the padded gather tables the decoder kernel works on."""
    m, n = h.shape
    chk_to_var = [np.nonzero(h[c])[0] for c in range(m)]
    row_deg = np.array([len(vs) for vs in chk_to_var])
    n_edges = int(row_deg.sum())

    edge_var = np.concatenate(chk_to_var).astype(np.int64) if n_edges else np.zeros(0, dtype=np.int64)
    max_dc = int(row_deg.max(initial=1))
    chk_edge = np.full((m, max_dc), n_edges, dtype=np.int64)
    chk_var = np.full((m, max_dc), n, dtype=np.int64)
    pos = 0
    for c, vs in enumerate(chk_to_var):
        chk_edge[c, : len(vs)] = np.arange(pos, pos + len(vs))
        chk_var[c, : len(vs)] = vs
        pos += len(vs)

    col_deg = h.sum(axis=0)
    max_dv = int(col_deg.max(initial=1))
    var_edge = np.full((n, max_dv), n_edges, dtype=np.int64)
    fill = np.zeros(n, dtype=np.int64)
    for e, v in enumerate(edge_var):
        var_edge[v, fill[v]] = e
        fill[v] += 1

    return LdpcCode(
        h=h,
        n_code=n,
        m_checks=m,
        k_info=n - m,  # provisional; parse_alist replaces it with n - rank
        edge_var=edge_var,
        chk_edge=chk_edge,
        chk_var=chk_var,
        var_edge=var_edge,
    )


def _gf2_row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (rref, pivot columns)."""
    a = np.array(mat, dtype=np.uint8)
    rows, cols = a.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        hits = np.nonzero(a[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + int(hits[0])
        if p != row:
            a[[row, p]] = a[[p, row]]
        others = np.nonzero(a[:, col])[0]
        others = others[others != row]
        a[others] ^= a[row]
        pivots.append(col)
        row += 1
    return a, pivots


def derive_encoder(code: LdpcCode) -> LdpcCode:
    """Attach a systematic encoder to a parsed code.

    Gaussian elimination over GF(2) picks ``rank(H)`` pivot columns as
    parity positions; the other columns carry information bits verbatim.
    A rank-deficient H is tolerated with a warning, the effective
    ``k_info`` growing to ``n_code - rank``.
    """
    rref, pivots = _gf2_row_reduce(code.h)
    rank = len(pivots)
    if rank < code.m_checks:
        warnings.warn(
            f"H is rank-deficient ({rank} < {code.m_checks}); effective k_info = {code.n_code - rank}",
            stacklevel=2,
        )
    pivot_cols = np.array(pivots, dtype=np.int64)
    info_cols = np.setdiff1d(np.arange(code.n_code, dtype=np.int64), pivot_cols)
    # row i of rref has its pivot at pivot_cols[i]; parity bits solve
    # c[pivot] = sum over info columns of rref[i, info] * c[info] (mod 2)
    parity_map = rref[:rank][:, info_cols].astype(np.uint8)
    return replace(
        code,
        k_info=code.n_code - rank,
        info_cols=info_cols,
        parity_cols=pivot_cols,
        parity_map=parity_map,
    )


def encode(code: LdpcCode, info_bits: np.ndarray) -> np.ndarray:
    """Systematic encode: info bits land verbatim on ``info_cols``.

    Accepts one block of ``k_info`` bits or a ``(batch, k_info)`` matrix;
    every returned word satisfies ``H c = 0`` over GF(2).
    """
    if code.info_cols is None or code.parity_map is None:
        raise ValueError("run derive_encoder before encoding")
    u = np.asarray(info_bits, dtype=np.uint8)
    single = u.ndim == 1
    if single:
        u = u[None, :]
    if u.shape[1] != code.k_info:
        raise ValueError(f"expected {code.k_info} info bits per block, got {u.shape[1]}")
    parity = (u.astype(np.int32) @ code.parity_map.T.astype(np.int32)) & 1
    words = np.zeros((len(u), code.n_code), dtype=np.uint8)
    words[:, code.info_cols] = u
    words[:, code.parity_cols] = parity.astype(np.uint8)
    return words[0] if single else words


def syndrome(code: LdpcCode, words: np.ndarray) -> np.ndarray:
    """``H w`` over GF(2) for one word or a batch of rows."""
    w = np.asarray(words, dtype=np.uint8)
    single = w.ndim == 1
    if single:
        w = w[None, :]
    s = (w.astype(np.int32) @ code.h.T.astype(np.int32)) & 1
    return (s[0] if single else s).astype(np.uint8)


def rate1_passthrough(bits: np.ndarray) -> np.ndarray:
    """The uncoded path: bits map to themselves."""
    return np.asarray(bits, dtype=np.uint8)


def sum_product_decode_batch(
    code: LdpcCode, llr_matrix: np.ndarray, max_iters: int = 50
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flooding sum-product over a batch of LLR rows.

    Returns ``(codewords, converged, iterations)`` with one row per input.
    Each row stops at the first iteration whose hard decision satisfies
    every check (and shows no exactly-zero posterior); its bits are
    frozen there while the rest of the batch keeps iterating.
    """
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    llr = np.atleast_2d(np.asarray(llr_matrix, dtype=np.float64))
    if llr.shape[1] != code.n_code:
        raise ValueError(f"expected {code.n_code} LLRs per row, got {llr.shape[1]}")
    batch = llr.shape[0]
    n_e = code.n_edges

    # one sentinel slot past the real edges keeps the padded gathers branch-free
    v2c = np.zeros((batch, n_e + 1), dtype=np.float64)
    c2v = np.zeros((batch, n_e + 1), dtype=np.float64)
    v2c[:, :n_e] = llr[:, code.edge_var]

    out_words = np.zeros((batch, code.n_code), dtype=np.uint8)
    conv_iter = np.full(batch, -1, dtype=np.int64)
    bits_ext = np.zeros((batch, code.n_code + 1), dtype=np.uint8)

    for it in range(1, max_iters + 1):
        # check update: exclusive tanh product per edge via prefix/suffix
        t = np.tanh(np.clip(v2c, -LLR_CLAMP, LLR_CLAMP) / 2.0)
        t[:, n_e] = 1.0
        tt = t[:, code.chk_edge]  # (batch, m, max_dc)
        dc = tt.shape[-1]
        pre = np.ones_like(tt)
        for j in range(1, dc):
            pre[..., j] = pre[..., j - 1] * tt[..., j - 1]
        suf = np.ones_like(tt)
        for j in range(dc - 2, -1, -1):
            suf[..., j] = suf[..., j + 1] * tt[..., j + 1]
        excl = np.clip(pre * suf, -_ATANH_LIMIT, _ATANH_LIMIT)
        c2v[:, code.chk_edge.reshape(-1)] = (2.0 * np.arctanh(excl)).reshape(batch, -1)
        c2v[:, n_e] = 0.0

        # variable update and posterior
        cc = c2v[:, code.var_edge]  # (batch, n, max_dv)
        post = llr + cc.sum(axis=-1)
        v2c[:, code.var_edge.reshape(-1)] = (post[:, :, None] - cc).reshape(batch, -1)

        bits = (post < 0).astype(np.uint8)
        bits_ext[:, : code.n_code] = bits
        synd = bits_ext[:, code.chk_var].sum(axis=-1) & 1  # (batch, m)
        parity_ok = ~synd.any(axis=1)
        informative = ~(post == 0.0).any(axis=1)
        newly = (conv_iter < 0) & parity_ok & informative
        if newly.any():
            out_words[newly] = bits[newly]
            conv_iter[newly] = it
        if (conv_iter >= 0).all():
            break

    pending = conv_iter < 0
    if pending.any():
        out_words[pending] = bits[pending]
    converged = conv_iter >= 0
    iters = np.where(converged, conv_iter, max_iters)
    return out_words, converged, iters


def sum_product_decode(code: LdpcCode, llrs: np.ndarray, max_iters: int = 50) -> DecodeResult:
    """Decode one codeword's channel LLRs; see :class:`DecodeResult`."""
    if code.info_cols is None:
        raise ValueError("run derive_encoder first so info positions are defined")
    words, converged, iters = sum_product_decode_batch(code, np.asarray(llrs)[None, :], max_iters)
    return DecodeResult(
        bits=words[0][code.info_cols],
        converged=bool(converged[0]),
        iterations_used=int(iters[0]),
        codeword=words[0],
    )


def pack_bits_into_blocks(bits: np.ndarray, block_len: int) -> tuple[np.ndarray, int]:
    """Chunk a bit stream into ``block_len`` rows, zero-padding the tail.

    Returns ``(blocks, pad_len)``; the pad length travels as stream
    metadata so the receive side can strip it after decoding.
    """
    if block_len < 1:
        raise ValueError(f"block_len must be >= 1, got {block_len}")
    b = np.asarray(bits, dtype=np.uint8).ravel()
    pad = (-len(b)) % block_len
    if pad:
        b = np.concatenate([b, np.zeros(pad, dtype=np.uint8)])
    return b.reshape(-1, block_len), pad


def unpack_blocks(blocks: np.ndarray, pad_len: int) -> np.ndarray:
    """Undo :func:`pack_bits_into_blocks`."""
    flat = np.asarray(blocks, dtype=np.uint8).reshape(-1)
    if pad_len < 0 or pad_len > len(flat):
        raise ValueError(f"pad_len {pad_len} outside 0..{len(flat)}")
    return flat[: len(flat) - pad_len] if pad_len else flat


def pack_frames_into_codewords(frames: list[Frame], code: LdpcCode) -> tuple[np.ndarray, int]:
    """Concatenate frame payloads and chunk them into ``k_info`` info blocks."""
    if not frames:
        return np.zeros((0, code.k_info), dtype=np.uint8), 0
    bits = np.concatenate([p.bits for f in frames for p in f.payloads])
    return pack_bits_into_blocks(bits, code.k_info)
