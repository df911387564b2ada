"""Receive-side reconstruction.

Under perfect slot synchronization the receiver never sees the OB bits
on the channel; it recovers them from position alone. A running global
slot counter psi (1-based) splits into a round number and the slot index
within the round, the slot index maps back to the OB pattern, and the
decoded payload fills in the rest of the BU. Padding slots come back as
phantom all-zero-payload BUs; only the transmit side knows which slots
those were, so callers reconcile phantoms themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitunit import SchemeParams, index_to_ob_batch


@dataclass(frozen=True)
class ReceivedSlot:
    """One demodulated slot: counter value, its round/slot split, payload."""

    psi: int
    round_no: int
    slot_index: int
    payload_bits: np.ndarray


def recover_ts_index(psi: int, phi: int) -> tuple[int, int]:
    """Round number and slot index for global slot counter ``psi``.

    ``round_no = (psi - 1) // phi`` and ``slot = psi - round_no * phi``,
    i.e. ``slot = ((psi - 1) % phi) + 1``: psi values ``1 .. phi`` are round
    0 with slots ``1 .. phi``, psi ``phi + 1`` wraps to slot 1 of round 1.
    """
    if psi < 1:
        raise ValueError(f"psi must be >= 1, got {psi}")
    if phi < 1:
        raise ValueError(f"phi must be >= 1, got {phi}")
    round_no = (psi - 1) // phi
    return round_no, psi - round_no * phi


def receive_stream(
    decoded_bits: np.ndarray,
    params: SchemeParams,
    pad_len: int = 0,
    psi_start: int = 1,
) -> np.ndarray:
    """Rebuild BUs from a decoded payload bit stream.

    Strips ``pad_len`` trailing pad bits first, then chunks the stream
    into slot payloads and prepends each slot's OB pattern. Returns a
    ``(slot_count, n_total)`` matrix, one reconstructed BU per slot in
    arrival order (padding slots included as phantoms). ``psi_start``
    lets callers feed the stream in pieces; it must sit on a slot
    boundary of the running counter.
    """
    bits = np.asarray(decoded_bits, dtype=np.uint8).ravel()
    if pad_len < 0 or pad_len > len(bits):
        raise ValueError(f"pad_len {pad_len} outside 0..{len(bits)}")
    if psi_start < 1:
        raise ValueError(f"psi_start must be >= 1, got {psi_start}")
    if pad_len:
        bits = bits[: len(bits) - pad_len]
    cb = params.cb_len
    if len(bits) % cb:
        raise ValueError(f"stream of {len(bits)} bits is not whole slots of {cb}")
    payloads = bits.reshape(-1, cb)
    psis = np.arange(psi_start, psi_start + len(payloads), dtype=np.int64)
    slot_idx = ((psis - 1) % params.phi) + 1
    obs = index_to_ob_batch(slot_idx, params)
    return np.hstack([obs, payloads])


def slots_from_stream(
    decoded_bits: np.ndarray,
    params: SchemeParams,
    pad_len: int = 0,
    psi_start: int = 1,
) -> list[ReceivedSlot]:
    """Per-slot view of :func:`receive_stream` with the psi bookkeeping kept."""
    bits = np.asarray(decoded_bits, dtype=np.uint8).ravel()
    if pad_len:
        bits = bits[: len(bits) - pad_len]
    cb = params.cb_len
    if len(bits) % cb:
        raise ValueError(f"stream of {len(bits)} bits is not whole slots of {cb}")
    slots = []
    for i, payload in enumerate(bits.reshape(-1, cb)):
        psi = psi_start + i
        round_no, slot_index = recover_ts_index(psi, params.phi)
        slots.append(ReceivedSlot(psi=psi, round_no=round_no, slot_index=slot_index, payload_bits=payload))
    return slots
