"""Monte Carlo harness.

Wires source -> falling storage -> FEC -> BPSK/AWGN -> demodulation ->
receiver for the proposed scheme, runs the flat per-BU baseline for the
conventional scheme, measures the unload probability of the storage,
checks lossless round trips, and reads SNR gaps off measured curves.

Determinism policy: every random draw comes from numpy PCG64 generators
seeded through SeedSequence keys derived from the master seed, the
scheme, the stream role (BU source vs channel noise), the SNR point
index and the segment number. Identical configuration and seed give
byte-identical reports and CSV output; the paired-noise flag drops the
scheme from the keys so both schemes see the same BU data and noise
stream seeds.
"""

from __future__ import annotations

import importlib.resources
import math
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from .analysis import AnalyticCurve, binomial_ci, unload_curve
from .bitunit import SchemeParams, ob_to_index_batch
from .falling_storage import FallingStorage, RandomBuSource, frames_to_arrays, new_storage
from .fec import (
    LLR_CLAMP,
    LdpcCode,
    derive_encoder,
    encode,
    load_alist,
    pack_bits_into_blocks,
    sum_product_decode_batch,
)
from .phy import NoiseModel, Scheme, SnrConvention, SnrSpec, awgn, bpsk_modulate, hard_decision, noise_sigma, soft_llr
from .receiver import receive_stream

RNG_ALGO = "numpy-pcg64-ziggurat"

_SCHEME_ID = {Scheme.CONVENTIONAL: 0, Scheme.PROPOSED: 1}
_SHARED_ID = 2
_STREAM_SOURCE = 0
_STREAM_NOISE = 1
_DECODE_BATCH = 256


def default_alist_path() -> str:
    """Path of the bundled rate-1/2 length-1296 parity-check matrix."""
    return str(importlib.resources.files("oblink").joinpath("codes/ldpc_n1296_k648.alist"))


@dataclass(frozen=True)
class CodeConfig:
    """FEC selection: the uncoded path or an LDPC matrix from an alist file."""

    kind: str = "rate1"
    alist_path: str | None = None
    max_iters: int = 50

    def __post_init__(self):
        if self.kind not in ("rate1", "ldpc"):
            raise ValueError(f"code kind must be 'rate1' or 'ldpc', got {self.kind!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def load(self) -> LdpcCode | None:
        if self.kind == "rate1":
            return None
        path = self.alist_path or default_alist_path()
        return derive_encoder(load_alist(path))


@dataclass(frozen=True)
class ExperimentConfig:
    """One BER sweep: scheme, split geometry, SNR grid, code, seeds, stop rule.

    ``n_bus`` caps the BUs spent per SNR point; the run stops earlier once
    ``min_errors`` bit errors have been tallied. ``segment_bus`` is the
    pipeline chunk size and part of the deterministic stream layout.
    """

    scheme: Scheme
    params: SchemeParams
    snr_grid: tuple[SnrSpec, ...]
    code: CodeConfig = field(default_factory=CodeConfig)
    n_bus: int = 400_000
    master_seed: int = 12345
    min_errors: int = 100
    paired_noise: bool = False
    segment_bus: int = 32_768

    def __post_init__(self):
        if not self.snr_grid:
            raise ValueError("snr_grid must not be empty")
        conventions = {s.convention for s in self.snr_grid}
        if len(conventions) > 1:
            raise ValueError("snr_grid mixes SNR conventions")
        if self.scheme is Scheme.PROPOSED and self.n_bus < self.params.m_storage:
            raise ValueError(
                f"n_bus={self.n_bus} cannot even fill the storage (m_storage={self.params.m_storage})"
            )
        if self.n_bus < 1:
            raise ValueError("n_bus must be >= 1")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.segment_bus < 1:
            raise ValueError("segment_bus must be >= 1")

    @property
    def convention(self) -> SnrConvention:
        return self.snr_grid[0].convention


@dataclass(frozen=True)
class PointResult:
    """Tallies of one (scheme, SNR) Monte Carlo point.

    ``bits`` counts all n_total bits of every accounted BU, so the k_ob
    index bits sit in the denominator and contribute zero errors under
    slot synchronization. ``genuine_payload_bits`` are the pre-FEC bits
    that came from real BUs (padding and code overhead excluded);
    ``channel_symbols`` is everything actually modulated.
    """

    snr_db: float
    scheme: Scheme
    bits: int
    errors: int
    ber: float
    ci_lo: float
    ci_hi: float
    bu_count: int
    bu_errors: int
    padding: int
    converged_frac: float
    channel_symbols: int
    genuine_payload_bits: int
    codewords: int
    low_confidence: bool


@dataclass(frozen=True)
class BerReport:
    """A full sweep for one scheme plus the configuration echo."""

    config: ExperimentConfig
    rows: tuple[PointResult, ...]
    rng_algo: str = RNG_ALGO
    llr_clamp: float = LLR_CLAMP


@dataclass(frozen=True)
class RoundtripResult:
    """Outcome of a noiseless end-to-end run at rate 1."""

    n_bus: int
    slots: int
    padding: int
    phantoms_ok: bool
    multiset_ok: bool
    class_order_ok: bool
    bit_exact: bool
    mean_residency_rounds: float

    @property
    def ok(self) -> bool:
        return self.phantoms_ok and self.multiset_ok and self.class_order_ok and self.bit_exact


@dataclass(frozen=True)
class UnloadResult:
    """Empirical vs closed-form column-empty frequency for one phi."""

    phi: int
    m_values: np.ndarray
    events: np.ndarray
    trials: int
    empirical: AnalyticCurve
    analytic: AnalyticCurve


def _stream_seed(master_seed: int, stream: int, scheme_id: int, snr_idx: int, segment: int = 0) -> int:
    ss = np.random.SeedSequence(entropy=(int(master_seed), stream, scheme_id, snr_idx, segment))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _scheme_key(config: ExperimentConfig) -> int:
    return _SHARED_ID if config.paired_noise else _SCHEME_ID[config.scheme]


class _StreamComparer:
    """Running bit-error count between a tx stream and the rx stream chasing it."""

    def __init__(self):
        self._pending: deque[np.ndarray] = deque()
        self.errors = 0

    def push_tx(self, bits: np.ndarray) -> None:
        if len(bits):
            self._pending.append(bits)

    def push_rx(self, bits: np.ndarray) -> None:
        offset = 0
        while offset < len(bits):
            if not self._pending:
                raise ValueError("rx stream ran ahead of tx stream")
            head = self._pending[0]
            take = min(len(head), len(bits) - offset)
            self.errors += int(np.count_nonzero(head[:take] != bits[offset : offset + take]))
            if take == len(head):
                self._pending.popleft()
            else:
                self._pending[0] = head[take:]
            offset += take


class _ChannelPath:
    """Per-point FEC + channel pipeline shared by both scheme runners."""

    def __init__(self, config: ExperimentConfig, code: LdpcCode | None, snr: SnrSpec, snr_idx: int):
        self.config = config
        self.code = code
        rate = 1.0 if code is None else code.rate
        self.sigma, self.amplitude = noise_sigma(snr, config.params, rate, config.scheme)
        self._snr_idx = snr_idx
        self._segment = 0
        self._pending = np.zeros(0, dtype=np.uint8)
        self.pad_len = 0
        self.channel_symbols = 0
        self.codewords = 0
        self.converged = 0

    def _noise(self) -> NoiseModel:
        seed = _stream_seed(
            self.config.master_seed, _STREAM_NOISE, _scheme_key(self.config), self._snr_idx, self._segment
        )
        self._segment += 1
        return NoiseModel(sigma=self.sigma, rng_seed=seed)

    def _transmit(self, bits: np.ndarray) -> np.ndarray:
        """Modulate, add noise, return received values."""
        block = bpsk_modulate(bits, self.amplitude)
        self.channel_symbols += len(bits)
        return awgn(block, self._noise())

    def push(self, tx_bits: np.ndarray, final: bool) -> np.ndarray:
        """Feed payload bits; returns whatever decoded bits became available."""
        if self.code is None:
            if not len(tx_bits):
                return np.zeros(0, dtype=np.uint8)
            return hard_decision(self._transmit(tx_bits))
        self._pending = np.concatenate([self._pending, np.asarray(tx_bits, dtype=np.uint8)])
        k = self.code.k_info
        if final:
            blocks, self.pad_len = pack_bits_into_blocks(self._pending, k)
            self._pending = np.zeros(0, dtype=np.uint8)
        else:
            n_full = len(self._pending) // k
            blocks = self._pending[: n_full * k].reshape(n_full, k)
            self._pending = self._pending[n_full * k :]
        if not len(blocks):
            return np.zeros(0, dtype=np.uint8)
        words_tx = encode(self.code, blocks)
        y = self._transmit(words_tx.reshape(-1))
        llrs = soft_llr(y, self.sigma, self.amplitude).reshape(len(blocks), self.code.n_code)
        # decode in bounded sub-batches so message arrays stay small
        out = np.empty((len(blocks), len(self.code.info_cols)), dtype=np.uint8)
        for start in range(0, len(blocks), _DECODE_BATCH):
            chunk = llrs[start : start + _DECODE_BATCH]
            words, conv, _ = sum_product_decode_batch(self.code, chunk, self.config.code.max_iters)
            out[start : start + len(chunk)] = words[:, self.code.info_cols]
            self.converged += int(conv.sum())
        self.codewords += len(blocks)
        return out.reshape(-1)

    @property
    def converged_frac(self) -> float:
        return self.converged / self.codewords if self.codewords else 1.0


def _finish_point(
    config: ExperimentConfig,
    snr: SnrSpec,
    path: _ChannelPath,
    tx_flat: np.ndarray,
    rx_flat: np.ndarray,
    slot_mask: np.ndarray,
    slot_len: int,
    bu_count: int,
    padding: int,
    genuine_payload_bits: int,
) -> PointResult:
    tx_slots = tx_flat.reshape(-1, slot_len)
    rx_slots = rx_flat.reshape(-1, slot_len)
    errs_per_slot = np.count_nonzero(tx_slots != rx_slots, axis=1)
    genuine = ~slot_mask
    errors = int(errs_per_slot[genuine].sum())
    bu_errors = int((errs_per_slot[genuine] > 0).sum())
    bits = bu_count * config.params.n_total
    ber = errors / bits if bits else 0.0
    # errors are binomial over the compared payload bits; rescale the CI
    # onto the all-bits denominator
    compared = int(genuine.sum()) * slot_len
    lo_q, hi_q = binomial_ci(errors, compared) if compared else (0.0, 1.0)
    scale = compared / bits if bits else 0.0
    return PointResult(
        snr_db=snr.value_db,
        scheme=config.scheme,
        bits=bits,
        errors=errors,
        ber=ber,
        ci_lo=lo_q * scale,
        ci_hi=hi_q * scale,
        bu_count=bu_count,
        bu_errors=bu_errors,
        padding=padding,
        converged_frac=path.converged_frac,
        channel_symbols=path.channel_symbols,
        genuine_payload_bits=genuine_payload_bits,
        codewords=path.codewords,
        low_confidence=errors < config.min_errors,
    )


def _run_point_proposed(config: ExperimentConfig, code: LdpcCode | None, snr_idx: int, snr: SnrSpec) -> PointResult:
    params = config.params
    src_rng = np.random.default_rng(
        _stream_seed(config.master_seed, _STREAM_SOURCE, _scheme_key(config), snr_idx)
    )
    source = RandomBuSource(params, config.n_bus, src_rng)
    storage = new_storage(params)
    storage.accumulate(source)
    path = _ChannelPath(config, code, snr, snr_idx)
    comparer = _StreamComparer()
    rounds_per_seg = max(1, -(-config.segment_bus // params.phi))

    tx_parts: list[np.ndarray] = []
    mask_parts: list[np.ndarray] = []
    rx_parts: list[np.ndarray] = []
    while True:
        final = source.exhausted or comparer.errors >= config.min_errors
        if final:
            frames = storage.drain()
        else:
            frames = []
            for _ in range(rounds_per_seg):
                frames.append(storage.inject_round(source))
                if source.exhausted:
                    break
        bits_mtx, pad_mask = frames_to_arrays(frames, params)
        tx_bits = bits_mtx.reshape(-1)
        tx_parts.append(tx_bits)
        mask_parts.append(pad_mask)
        comparer.push_tx(tx_bits)
        decoded = path.push(tx_bits, final=final)
        rx_parts.append(decoded)
        if final and path.pad_len:
            decoded = decoded[: len(decoded) - path.pad_len]
        comparer.push_rx(decoded)
        if final:
            break

    tx_flat = np.concatenate(tx_parts)
    slot_mask = np.concatenate(mask_parts)
    rx_flat = np.concatenate(rx_parts)
    # route the decoded stream through the receiver so reconstruction runs
    # end to end; its payload columns are what we compare
    rx_bus = receive_stream(rx_flat, params, pad_len=path.pad_len)
    assert rx_bus.shape[0] == len(slot_mask)
    bu_count = int((~slot_mask).sum())
    assert bu_count == source.taken
    return _finish_point(
        config,
        snr,
        path,
        tx_flat,
        rx_bus[:, params.k_ob :].reshape(-1),
        slot_mask,
        params.cb_len,
        bu_count,
        storage.padding_count,
        bu_count * params.cb_len,
    )


def _run_point_conventional(config: ExperimentConfig, code: LdpcCode | None, snr_idx: int, snr: SnrSpec) -> PointResult:
    params = config.params
    src_rng = np.random.default_rng(
        _stream_seed(config.master_seed, _STREAM_SOURCE, _scheme_key(config), snr_idx)
    )
    source = RandomBuSource(params, config.n_bus, src_rng)
    path = _ChannelPath(config, code, snr, snr_idx)
    comparer = _StreamComparer()

    tx_parts: list[np.ndarray] = []
    rx_parts: list[np.ndarray] = []
    while True:
        final = source.exhausted or comparer.errors >= config.min_errors
        rows = []
        if not final:
            for _ in range(config.segment_bus):
                bu = source.take()
                if bu is None:
                    break
                rows.append(bu)
            final = source.exhausted or not rows
        tx_bits = np.array(rows, dtype=np.uint8).reshape(-1) if rows else np.zeros(0, dtype=np.uint8)
        tx_parts.append(tx_bits)
        comparer.push_tx(tx_bits)
        decoded = path.push(tx_bits, final=final)
        rx_parts.append(decoded)
        if final and path.pad_len:
            decoded = decoded[: len(decoded) - path.pad_len]
        comparer.push_rx(decoded)
        if final:
            break

    tx_flat = np.concatenate(tx_parts)
    rx_flat = np.concatenate(rx_parts)
    if path.pad_len:
        rx_flat = rx_flat[: len(rx_flat) - path.pad_len]
    bu_count = source.taken
    slot_mask = np.zeros(bu_count, dtype=bool)
    return _finish_point(
        config,
        snr,
        path,
        tx_flat,
        rx_flat,
        slot_mask,
        params.n_total,
        bu_count,
        0,
        bu_count * params.n_total,
    )


def run_proposed(config: ExperimentConfig) -> BerReport:
    """Sweep the proposed scheme over the configured SNR grid."""
    if config.scheme is not Scheme.PROPOSED:
        raise ValueError("config.scheme must be PROPOSED")
    code = config.code.load()
    rows = tuple(_run_point_proposed(config, code, i, snr) for i, snr in enumerate(config.snr_grid))
    return BerReport(config=config, rows=rows)


def run_conventional(config: ExperimentConfig) -> BerReport:
    """Sweep the conventional per-BU baseline over the configured SNR grid."""
    if config.scheme is not Scheme.CONVENTIONAL:
        raise ValueError("config.scheme must be CONVENTIONAL")
    code = config.code.load()
    rows = tuple(_run_point_conventional(config, code, i, snr) for i, snr in enumerate(config.snr_grid))
    return BerReport(config=config, rows=rows)


def run_roundtrip(params: SchemeParams, n_bus: int, seed: int = 12345) -> RoundtripResult:
    """Noiseless rate-1 end-to-end run with full multiset reconciliation.

    The recovered BU multiset, minus one phantom per padding slot, must
    equal the transmitted multiset, and within each OB class the arrival
    order must match the drop order.
    """
    if n_bus < params.m_storage:
        raise ValueError("n_bus must be at least m_storage")
    source = RandomBuSource(params, n_bus, np.random.default_rng(int(seed)))
    storage = new_storage(params)
    storage.accumulate(source)
    frames = []
    while not source.exhausted:
        frames.append(storage.inject_round(source))
    frames.extend(storage.drain())
    bits_mtx, slot_mask = frames_to_arrays(frames, params)

    tx_stream = bits_mtx.reshape(-1)
    block = bpsk_modulate(tx_stream, 1.0)
    rx_stream = hard_decision(block.values)
    rx_bus = receive_stream(rx_stream, params)

    tx_rows = source.taken_matrix()
    genuine_rows = rx_bus[~slot_mask]
    phantom_rows = rx_bus[slot_mask]
    phantoms_ok = not phantom_rows[:, params.k_ob :].any() if len(phantom_rows) else True

    tx_counter = Counter(r.tobytes() for r in tx_rows)
    rx_counter = Counter(r.tobytes() for r in rx_bus)
    rx_counter.subtract(r.tobytes() for r in phantom_rows)
    multiset_ok = +rx_counter == tx_counter and not -rx_counter

    # order within each OB class: emission order must equal drop order
    tx_idx = ob_to_index_batch(tx_rows[:, : params.k_ob])
    by_class: dict[int, deque] = {}
    for row, idx in zip(tx_rows, tx_idx):
        by_class.setdefault(int(idx), deque()).append(row[params.k_ob :])
    class_order_ok = True
    rx_idx = ob_to_index_batch(genuine_rows[:, : params.k_ob]) if len(genuine_rows) else np.zeros(0, np.int64)
    for row, idx in zip(genuine_rows, rx_idx):
        expected = by_class.get(int(idx))
        if not expected or not np.array_equal(row[params.k_ob :], expected.popleft()):
            class_order_ok = False
            break
    class_order_ok = class_order_ok and all(not rest for rest in by_class.values())

    return RoundtripResult(
        n_bus=n_bus,
        slots=len(rx_bus),
        padding=storage.padding_count,
        phantoms_ok=phantoms_ok,
        multiset_ok=multiset_ok,
        class_order_ok=class_order_ok,
        bit_exact=bool((rx_stream == tx_stream).all()),
        mean_residency_rounds=storage.mean_residency_rounds,
    )


def run_unload_experiment(phi_list, m_grid, trials: int, seed: int = 12345) -> list[UnloadResult]:
    """Empirical column-empty frequency over fresh accumulations vs closed form.

    For each (phi, m) grid point the storage is notionally filled with m
    uniform BUs `trials` independent times, and the fraction of fills
    that left slot 1's column empty is recorded. The fill is vectorized
    through the OB-to-index mapping (uniform OB bits, the exact
    distribution accumulate() sees); the storage object itself is
    cross-checked against the same closed form in the test suite.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = []
    for phi in phi_list:
        k = int(phi).bit_length() - 1
        if 2**k != phi:
            raise ValueError(f"phi must be a power of two, got {phi}")
        m_values = np.asarray(sorted(set(int(m) for m in m_grid)), dtype=np.int64)
        if m_values.size == 0 or m_values[0] < 0:
            raise ValueError("m_grid must hold non-negative integers")
        events = np.zeros(len(m_values), dtype=np.int64)
        for j, m_val in enumerate(m_values):
            m = int(m_val)
            if m == 0:
                events[j] = trials  # nothing dropped: the column is certainly empty
                continue
            if k == 0:
                events[j] = 0  # phi = 1: every drop lands in the lone column
                continue
            rng = np.random.default_rng(np.random.SeedSequence(entropy=(int(seed), int(phi), m)))
            remaining = trials
            empty = 0
            chunk_trials = max(1, min(trials, 4_000_000 // (m * k)))
            while remaining:
                c = min(chunk_trials, remaining)
                ob_bits = rng.integers(0, 2, size=(c * m, k), dtype=np.uint8)
                idx = ob_to_index_batch(ob_bits).reshape(c, m)
                empty += int((idx != 1).all(axis=1).sum())
                remaining -= c
            events[j] = empty
        empirical = AnalyticCurve(
            x_values=m_values.astype(np.float64),
            y_values=events / trials,
            label=f"empirical phi={phi}",
        )
        results.append(
            UnloadResult(
                phi=int(phi),
                m_values=m_values,
                events=events,
                trials=trials,
                empirical=empirical,
                analytic=unload_curve(int(phi), m_values),
            )
        )
    return results


def snr_at_ber(snr_db_values, ber_values, target_ber: float) -> float:
    """SNR where a measured curve crosses ``target_ber``, by log-linear interpolation.

    Scans adjacent grid points for the first pair with
    ``ber[i] >= target >= ber[i+1]`` (both positive) and interpolates
    linearly in (snr, log10 ber). Raises if the target is not bracketed.
    """
    if not 0 < target_ber < 1:
        raise ValueError("target_ber must lie in (0, 1)")
    x = np.asarray(snr_db_values, dtype=np.float64)
    y = np.asarray(ber_values, dtype=np.float64)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two aligned points at least")
    order = np.argsort(x)
    x, y = x[order], y[order]
    for i in range(len(x) - 1):
        a, b = y[i], y[i + 1]
        if a > 0 and b > 0 and a >= target_ber >= b and a != b:
            la, lb, lt = math.log10(a), math.log10(b), math.log10(target_ber)
            return float(x[i] + (x[i + 1] - x[i]) * (lt - la) / (lb - la))
    raise ValueError(f"target BER {target_ber} not bracketed by the curve")


def measure_snr_gap(report_a: BerReport, report_b: BerReport, target_ber: float) -> float:
    """dB gap between two measured curves at ``target_ber``.

    Positive when ``report_a``'s curve reaches the target at lower SNR
    than ``report_b``'s; identical reports give 0.
    """
    def crossing(report: BerReport) -> float:
        return snr_at_ber(
            [row.snr_db for row in report.rows],
            [row.ber for row in report.rows],
            target_ber,
        )

    return crossing(report_b) - crossing(report_a)


# ---------------- CSV rendering ----------------

CSV_HEADER = "snr_db,scheme,bits,errors,ber,ci_lo,ci_hi,bu_errors,padding,converged_frac"


def _g(x: float) -> str:
    return f"{x:.10g}"


def render_ber_csv(reports: list[BerReport], gap_targets=(), gap_references=None) -> str:
    """Pinned CSV: one row per (SNR, scheme), sorted, plus optional gap footers.

    Gap footer lines are comments (leading '#') so the tabular block stays
    machine readable; they appear only when ``gap_targets`` is non-empty
    and both schemes are present.
    """
    rows = [(row, rep) for rep in reports for row in rep.rows]
    rows.sort(key=lambda pair: (pair[0].snr_db, pair[0].scheme.value))
    lines = [CSV_HEADER]
    for row, _ in rows:
        lines.append(
            ",".join(
                [
                    _g(row.snr_db),
                    row.scheme.value,
                    str(row.bits),
                    str(row.errors),
                    _g(row.ber),
                    _g(row.ci_lo),
                    _g(row.ci_hi),
                    str(row.bu_errors),
                    str(row.padding),
                    _g(row.converged_frac),
                ]
            )
        )
    if gap_targets:
        by_scheme = {rep.config.scheme: rep for rep in reports}
        prop = by_scheme.get(Scheme.PROPOSED)
        conv = by_scheme.get(Scheme.CONVENTIONAL)
        refs = list(gap_references or [])
        for i, target in enumerate(gap_targets):
            if prop is None or conv is None:
                break
            try:
                gap = measure_snr_gap(prop, conv, target)
                text = f"# snr_gap_db,target_ber={_g(target)},measured={_g(gap)}"
            except ValueError as exc:
                text = f"# snr_gap_db,target_ber={_g(target)},error={exc}"
            if i < len(refs):
                text += f",reference={_g(refs[i])}"
            lines.append(text)
    return "\n".join(lines) + "\n"


UNLOAD_CSV_HEADER = "phi,m,trials,events,empirical,analytic,ci_lo,ci_hi"


def render_unload_csv(results: list[UnloadResult]) -> str:
    lines = [UNLOAD_CSV_HEADER]
    for res in results:
        for m, ev, rho in zip(res.m_values, res.events, res.analytic.y_values):
            lo, hi = binomial_ci(int(ev), res.trials)
            lines.append(
                ",".join(
                    [
                        str(res.phi),
                        str(int(m)),
                        str(res.trials),
                        str(int(ev)),
                        _g(ev / res.trials),
                        _g(float(rho)),
                        _g(lo),
                        _g(hi),
                    ]
                )
            )
    return "\n".join(lines) + "\n"
