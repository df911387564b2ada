"""BPSK over real AWGN: modulation, calibrated noise, hard and soft demodulation.

Mapping is bit 0 -> +a, bit 1 -> -a. Noise is white Gaussian with per
dimension variance sigma**2; draws come from numpy's PCG64 generator
(ziggurat normal sampling) seeded explicitly, so identical seeds and
inputs reproduce identical output bit for bit.

Two SNR conventions exist and must be chosen explicitly:

* ``ES_N0``: ``value_db`` is energy per transmitted symbol over N0. The
  amplitude is fixed at 1 and ``sigma = sqrt(1 / (2 * 10**(db/10)))``.
* ``EB_N0_INFO``: ``value_db`` is energy per information bit of the BU
  over N0, with Eb normalized to 1. Index-carried bits consume no
  channel symbols, so the proposed scheme packs ``n_total`` information
  bits into ``(n_total - k_ob) / code_rate`` symbols and its per-symbol
  energy is ``Es = code_rate * n_total / (n_total - k_ob)``; the
  conventional scheme uses ``Es = code_rate``. Either way a BU costs the
  same total transmitted energy, which is what makes the BER comparison
  fair.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bitunit import SchemeParams


class Scheme(enum.Enum):
    PROPOSED = "proposed"
    CONVENTIONAL = "conventional"


class SnrConvention(enum.Enum):
    EB_N0_INFO = "ebn0"
    ES_N0 = "esn0"


@dataclass(frozen=True)
class SnrSpec:
    """One operating point: a dB value plus the convention it is quoted in."""

    value_db: float
    convention: SnrConvention = SnrConvention.EB_N0_INFO


@dataclass(frozen=True)
class SymbolBlock:
    """Modulated symbols plus the amplitude they were scaled with."""

    values: np.ndarray
    amplitude: float


@dataclass(frozen=True)
class NoiseModel:
    """Noise level plus the seed that makes a channel pass reproducible."""

    sigma: float
    rng_seed: int

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")


def bpsk_modulate(bits: np.ndarray, amplitude: float) -> SymbolBlock:
    """Map bits to antipodal symbols: 0 -> +amplitude, 1 -> -amplitude."""
    if not (amplitude > 0 and math.isfinite(amplitude)):
        raise ValueError(f"amplitude must be positive and finite, got {amplitude}")
    b = np.asarray(bits, dtype=np.uint8)
    if b.size and b.max() > 1:
        raise ValueError("bit values must be 0 or 1")
    return SymbolBlock(values=amplitude * (1.0 - 2.0 * b.astype(np.float64)), amplitude=amplitude)


def noise_sigma(
    snr: SnrSpec, params: SchemeParams, code_rate: float, scheme: Scheme
) -> tuple[float, float]:
    """Per-dimension noise sigma and symbol amplitude for a scheme at ``snr``.

    Returns ``(sigma, amplitude)``. See the module docstring for how each
    convention fixes the two values; at 0 dB EB_N0_INFO with rate 1 the
    proposed scheme gets amplitude sqrt(n_total / (n_total - k_ob)).
    """
    if not 0 < code_rate <= 1:
        raise ValueError(f"code_rate must lie in (0, 1], got {code_rate}")
    if not math.isfinite(snr.value_db):
        raise ValueError(f"SNR must be finite, got {snr.value_db} dB")
    lin = 10.0 ** (snr.value_db / 10.0)
    if snr.convention is SnrConvention.ES_N0:
        return math.sqrt(1.0 / (2.0 * lin)), 1.0
    # EB_N0_INFO: Eb = 1, N0 = 1 / lin
    n0 = 1.0 / lin
    boost = params.n_total / params.cb_len if scheme is Scheme.PROPOSED else 1.0
    es = code_rate * boost
    return math.sqrt(n0 / 2.0), math.sqrt(es)


def awgn(block: SymbolBlock, noise: NoiseModel) -> np.ndarray:
    """Add seeded white Gaussian noise to a symbol block."""
    rng = np.random.default_rng(noise.rng_seed)
    return block.values + rng.normal(0.0, noise.sigma, size=block.values.shape)


def hard_decision(received: np.ndarray) -> np.ndarray:
    """Threshold at zero: value >= 0 decodes to bit 0, below zero to bit 1."""
    return (np.asarray(received) < 0).astype(np.uint8)


def soft_llr(received: np.ndarray, sigma: float, amplitude: float) -> np.ndarray:
    """Channel LLRs ``2 * amplitude * y / sigma**2``; positive favours bit 0."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not amplitude > 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    return (2.0 * amplitude / (sigma * sigma)) * np.asarray(received, dtype=np.float64)
