"""Transmit-side falling-model storage.

The storage keeps one FIFO column per time slot. Dropping a BU pushes
its CB payload onto the column selected by its OB pattern, bottom first.
A transmission round walks the columns in slot order and pops the bottom
payload of each; a column that is empty at its turn emits an all-zero
padding payload instead. Immediately after every injected slot one fresh
BU is pulled from the source and dropped, so a BU pulled mid-round can
itself be injected later in the same round when its column lies ahead of
the cursor. Transmission begins only after ``m_storage`` payloads have
been accumulated; with a live source the occupancy therefore stays at
that level except for the rare rounds in which padding fired (each
padding event leaves one extra payload behind).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .bitunit import CbPayload, SchemeParams, ob_to_index, segment


class BuSource:
    """Ordered BU supplier backed by an explicit ``(count, n_total)`` matrix.

    ``take`` hands out each row exactly once, in order, and returns None
    forever after; ``exhausted`` is observable without consuming anything.
    """

    def __init__(self, matrix: np.ndarray):
        rows = np.asarray(matrix, dtype=np.uint8)
        if rows.ndim != 2:
            raise ValueError("BU matrix must be two-dimensional")
        self._rows = rows
        self._pos = 0

    @property
    def exhausted(self) -> bool:
        return self._pos >= len(self._rows)

    @property
    def taken(self) -> int:
        """Number of BUs handed out so far."""
        return self._pos

    def take(self) -> np.ndarray | None:
        if self._pos >= len(self._rows):
            return None
        row = self._rows[self._pos]
        self._pos += 1
        return row

    def taken_matrix(self) -> np.ndarray:
        """All BUs handed out so far, in order, as one matrix."""
        return self._rows[: self._pos]


class RandomBuSource(BuSource):
    """Seeded stream of i.i.d. uniform BUs with a hard length limit.

    Rows are generated in fixed-size chunks so the per-BU cost stays at
    one row handoff; a fixed seed yields a fixed stream.
    """

    _CHUNK = 4096

    def __init__(self, params: SchemeParams, limit: int, rng: np.random.Generator):
        if limit < 0:
            raise ValueError("limit must be >= 0")
        super().__init__(np.zeros((0, params.n_total), dtype=np.uint8))
        self._params = params
        self._limit = limit
        self._rng = rng
        self._chunks: list[np.ndarray] = []
        self._cur = self._rows
        self._cur_pos = 0
        self._generated = 0

    @property
    def exhausted(self) -> bool:
        return self._pos >= self._limit

    def take(self) -> np.ndarray | None:
        if self._pos >= self._limit:
            return None
        if self._cur_pos >= len(self._cur):
            want = min(self._CHUNK, self._limit - self._generated)
            self._cur = self._rng.integers(0, 2, size=(want, self._params.n_total), dtype=np.uint8)
            self._cur_pos = 0
            self._chunks.append(self._cur)
            self._generated += want
        row = self._cur[self._cur_pos]
        self._cur_pos += 1
        self._pos += 1
        return row

    def taken_matrix(self) -> np.ndarray:
        if not self._chunks:
            return np.zeros((0, self._params.n_total), dtype=np.uint8)
        return np.concatenate(self._chunks)[: self._pos]


@dataclass
class Frame:
    """One round of slot contents; ``payloads[j]`` rides time slot ``j + 1``."""

    payloads: list[CbPayload]

    def padding_mask(self) -> np.ndarray:
        return np.fromiter((p.is_padding for p in self.payloads), dtype=bool, count=len(self.payloads))


def frames_to_arrays(frames: list[Frame], params: SchemeParams) -> tuple[np.ndarray, np.ndarray]:
    """Flatten frames into a ``(slots, cb_len)`` bit matrix plus a padding mask."""
    rows = [p.bits for f in frames for p in f.payloads]
    if not rows:
        return (
            np.zeros((0, params.cb_len), dtype=np.uint8),
            np.zeros(0, dtype=bool),
        )
    mask = np.fromiter(
        (p.is_padding for f in frames for p in f.payloads), dtype=bool, count=len(rows)
    )
    return np.array(rows, dtype=np.uint8), mask


class FallingStorage:
    """``phi`` FIFO columns of CB payloads plus padding and load counters."""

    def __init__(self, params: SchemeParams):
        self.params = params
        self.columns: list[deque] = [deque() for _ in range(params.phi)]
        self.padding_count = 0
        self.loaded_count = 0
        self.emitted_genuine = 0
        self.round_counter = 0
        self._occupancy = 0
        self._residency_rounds = 0

    def occupancy(self) -> int:
        """Payloads currently queued across all columns."""
        return self._occupancy

    def column_depths(self) -> np.ndarray:
        return np.fromiter((len(c) for c in self.columns), dtype=np.int64, count=self.params.phi)

    @property
    def mean_residency_rounds(self) -> float:
        """Mean rounds an emitted payload spent queued (accumulation counts as round 0)."""
        if not self.emitted_genuine:
            return 0.0
        return self._residency_rounds / self.emitted_genuine

    def drop_cb(self, bu: np.ndarray) -> int:
        """Segment one BU and queue its payload; returns the chosen slot index."""
        ob, cb = segment(bu, self.params)
        idx = ob_to_index(ob)
        self.columns[idx - 1].append((cb, self.round_counter))
        self.loaded_count += 1
        self._occupancy += 1
        return idx

    def accumulate(self, source) -> int:
        """Pull up to ``m_storage`` BUs into a freshly constructed storage.

        Returns the number actually loaded (the source may run dry first).
        """
        if self.loaded_count:
            raise ValueError("accumulate requires a fresh storage")
        loaded = 0
        while loaded < self.params.m_storage:
            bu = source.take()
            if bu is None:
                break
            self.drop_cb(bu)
            loaded += 1
        return loaded

    def inject_round(self, source) -> Frame:
        """Emit one frame: pop every column in slot order, refilling as it goes.

        Each slot pops the bottom payload of its column, or synthesizes an
        all-zero padding payload when the column is empty; right after each
        slot one BU is pulled from the source (if any remain) and dropped.
        """
        self.round_counter += 1
        payloads = []
        cb_len = self.params.cb_len
        for col in self.columns:
            if col:
                cb, dropped_round = col.popleft()
                self._occupancy -= 1
                self.emitted_genuine += 1
                self._residency_rounds += self.round_counter - dropped_round
                payloads.append(cb)
            else:
                payloads.append(CbPayload(bits=np.zeros(cb_len, dtype=np.uint8), is_padding=True))
                self.padding_count += 1
            bu = source.take()
            if bu is not None:
                self.drop_cb(bu)
        return Frame(payloads=payloads)

    def drain(self) -> list[Frame]:
        """Flush after the source is exhausted: inject rounds until empty.

        The tail frames mix leftover genuine payloads with padding; every
        queued payload is emitted exactly once and the storage ends empty.
        """
        frames = []
        empty = BuSource(np.zeros((0, self.params.n_total), dtype=np.uint8))
        while self._occupancy:
            frames.append(self.inject_round(empty))
        return frames


def new_storage(params: SchemeParams) -> FallingStorage:
    """Fresh all-empty storage for ``params``."""
    return FallingStorage(params)
