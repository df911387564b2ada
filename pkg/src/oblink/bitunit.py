"""Bit-units and the opportunistic/conventional bit split.

A bit-unit (BU) is a fixed-length binary message whose delivery order
carries no meaning, so part of the message can be moved out of the
symbol stream entirely: the leading ``k_ob`` bits (the opportunistic
bits, OB) select which time slot carries the rest (the conventional
bits, CB) and are never modulated themselves. Transmitter and receiver
share one mapping: an OB pattern read as a big-endian unsigned integer
``v`` selects slot index ``v + 1``, so patterns enumerate the slots
``1 .. 2**k_ob`` exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# 2**24 columns is already far past anything this simulator can hold;
# the guard keeps slot indices comfortably inside exact integer range.
MAX_K_OB = 24


@dataclass(frozen=True)
class SchemeParams:
    """Static shape of the split: ``n_total`` bits per BU, ``k_ob`` of them OB.

    ``phi`` is the number of time slots per transmission round and always
    equals ``2**k_ob``; ``m_storage`` is the number of CB payloads the
    transmit storage accumulates before the first injection.
    """

    n_total: int
    k_ob: int
    phi: int
    m_storage: int

    @property
    def cb_len(self) -> int:
        return self.n_total - self.k_ob


def make_scheme_params(n_total: int, k_ob: int, m_storage: int) -> SchemeParams:
    """Validate and build a :class:`SchemeParams`; ``phi`` is derived."""
    if n_total < 1:
        raise ValueError(f"n_total must be >= 1, got {n_total}")
    if not 0 <= k_ob < n_total:
        raise ValueError(f"need 0 <= k_ob < n_total, got k_ob={k_ob}, n_total={n_total}")
    if k_ob > MAX_K_OB:
        raise ValueError(f"k_ob={k_ob} implies 2**{k_ob} slots, beyond the supported range")
    if m_storage < 1:
        raise ValueError(f"m_storage must be >= 1, got {m_storage}")
    return SchemeParams(n_total=n_total, k_ob=k_ob, phi=2**k_ob, m_storage=m_storage)


@dataclass(frozen=True)
class CbPayload:
    """Slot content: the trailing ``n_total - k_ob`` bits of one BU.

    ``is_padding`` marks the all-zero filler synthesized when a storage
    column is empty at its turn; padding never originates from a real BU.
    """

    bits: np.ndarray
    is_padding: bool = False


def as_bits(seq) -> np.ndarray:
    """Coerce a bit sequence to a 1-D uint8 array, rejecting non-binary values."""
    bits = np.asarray(seq, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("bit sequence must be one-dimensional")
    if bits.size and bits.max() > 1:
        raise ValueError("bit values must be 0 or 1")
    return bits


def random_bu_matrix(rng: np.random.Generator, count: int, params: SchemeParams) -> np.ndarray:
    """``count`` i.i.d. uniform BUs as a ``(count, n_total)`` uint8 matrix."""
    return rng.integers(0, 2, size=(count, params.n_total), dtype=np.uint8)


def segment(bu: np.ndarray, params: SchemeParams) -> tuple[np.ndarray, CbPayload]:
    """Split one BU into its OB pattern and CB payload.

    Both halves are views into ``bu``: nothing is copied, dropped or
    reordered, so ``concat(ob, cb.bits) == bu`` position for position.
    """
    if len(bu) != params.n_total:
        raise ValueError(f"BU has {len(bu)} bits, expected {params.n_total}")
    return bu[: params.k_ob], CbPayload(bits=bu[params.k_ob :])


def ob_to_index(ob) -> int:
    """Slot index for an OB pattern: big-endian binary value plus one.

    The empty pattern (k_ob = 0) maps to index 1, the only slot.
    """
    if isinstance(ob, np.ndarray):
        if ob.dtype != np.uint8:
            ob = ob.astype(np.uint8)
        data = ob.tobytes()
    else:
        data = bytes(ob)
    v = 0
    for b in data:
        if b > 1:
            raise ValueError("OB bits must be 0 or 1")
        v = (v << 1) | b
    return v + 1


def ob_to_index_batch(ob_matrix: np.ndarray) -> np.ndarray:
    """Vectorized :func:`ob_to_index` over the rows of a ``(count, k_ob)`` matrix."""
    k = ob_matrix.shape[1]
    if k == 0:
        return np.ones(len(ob_matrix), dtype=np.int64)
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    return ob_matrix.astype(np.int64) @ weights + 1


def index_to_ob(i: int, params: SchemeParams) -> np.ndarray:
    """Inverse mapping: slot index ``1 .. phi`` back to its k_ob-bit pattern."""
    if not 1 <= i <= params.phi:
        raise ValueError(f"slot index {i} outside 1..{params.phi}")
    v = i - 1
    k = params.k_ob
    return np.array([(v >> (k - 1 - j)) & 1 for j in range(k)], dtype=np.uint8)


def index_to_ob_batch(indices: np.ndarray, params: SchemeParams) -> np.ndarray:
    """Vectorized :func:`index_to_ob`: ``(count,)`` indices to ``(count, k_ob)`` bits."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > params.phi):
        raise ValueError("slot index outside 1..phi")
    k = params.k_ob
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return (((idx - 1)[:, None] >> shifts) & 1).astype(np.uint8)


def reassemble(i: int, cb: CbPayload, params: SchemeParams) -> np.ndarray:
    """Rebuild the BU carried by slot ``i`` with payload ``cb``.

    Padding payloads reassemble like any other; callers that need to
    tell phantoms apart keep their own padding bookkeeping.
    """
    bits = np.asarray(cb.bits, dtype=np.uint8)
    if len(bits) != params.cb_len:
        raise ValueError(f"payload has {len(bits)} bits, expected {params.cb_len}")
    return np.concatenate([index_to_ob(i, params), bits])
