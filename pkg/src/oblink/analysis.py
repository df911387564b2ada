"""Closed-form reference curves and small statistical helpers.

These are the analytic counterparts the Monte Carlo harness is checked
against: the unload (column-empty) probability of the falling storage,
the spectral and SNR gains of carrying k_ob bits per BU on the slot
index, the Gaussian tail, and uncoded BPSK BER for both schemes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitunit import SchemeParams
from .phy import Scheme, SnrConvention, SnrSpec

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class AnalyticCurve:
    """A labelled (x, y) curve; y values that are probabilities stay in [0, 1]."""

    x_values: np.ndarray
    y_values: np.ndarray
    label: str

    def __post_init__(self):
        if len(self.x_values) != len(self.y_values):
            raise ValueError("x and y lengths differ")


@dataclass(frozen=True)
class DelayStorageReport:
    """Static cost of the falling model at one parameter set.

    ``bus_before_first_injection`` BUs must arrive before the first frame;
    expressed in whole rounds of ``phi`` arrivals that is
    ``rounds_to_first_injection``. ``storage_bits`` is the steady-state
    buffer size. The matching empirical quantity (mean rounds a payload
    actually spends queued) is measured by the harness round-trip runner
    and reported alongside, not here.
    """

    bus_before_first_injection: int
    rounds_to_first_injection: int
    storage_bits: int


def unload_probability(phi: int, m: int) -> float:
    """Probability that a fixed column is empty after loading m uniform CBs.

    Each CB lands outside a given column with probability (phi-1)/phi, so
    the column stays empty with probability ((phi-1)/phi)**m. Decreasing
    in m, increasing in phi; exactly 0 for phi = 1.
    """
    if phi < 1:
        raise ValueError(f"phi must be >= 1, got {phi}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return ((phi - 1) / phi) ** m


def unload_curve(phi: int, m_values) -> AnalyticCurve:
    m = np.asarray(m_values, dtype=np.int64)
    y = np.array([unload_probability(phi, int(v)) for v in m])
    return AnalyticCurve(x_values=m, y_values=y, label=f"unload phi={phi}")


def spectral_gain(n_total: int, k_ob: int) -> float:
    """Symbols saved per BU: n_total / (n_total - k_ob), > 1 whenever k_ob > 0."""
    if not 0 <= k_ob < n_total:
        raise ValueError(f"need 0 <= k_ob < n_total, got k_ob={k_ob}, n_total={n_total}")
    return n_total / (n_total - k_ob)


def snr_gain_db(n_total: int, k_ob: int) -> float:
    """The spectral gain expressed in dB of per-symbol energy at equal Eb."""
    return 10.0 * math.log10(spectral_gain(n_total, k_ob))


def q_function(x: float) -> float:
    """Upper tail of the standard normal, 0.5 * erfc(x / sqrt(2))."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def analytic_ber(scheme: Scheme, snr: SnrSpec, params: SchemeParams, code_rate: float = 1.0) -> float:
    """Uncoded BPSK BER closed form for either scheme.

    Counted over all n_total bits of a BU: the conventional scheme errors
    on any bit with Q(sqrt(2 Es/N0)); the proposed scheme's k_ob index
    bits are error-free under slot synchronization, so its BER carries a
    (n_total - k_ob)/n_total prefactor, and under EB_N0_INFO its payload
    symbols run hotter by n_total/(n_total - k_ob). Only rate 1 has a
    closed form here; coded rates are rejected.
    """
    if code_rate != 1.0:
        raise ValueError("closed-form BER is only defined for code rate 1")
    lin = 10.0 ** (snr.value_db / 10.0)
    if scheme is Scheme.CONVENTIONAL:
        return q_function(math.sqrt(2.0 * lin))
    boost = (
        params.n_total / params.cb_len
        if snr.convention is SnrConvention.EB_N0_INFO
        else 1.0
    )
    return (params.cb_len / params.n_total) * q_function(math.sqrt(2.0 * boost * lin))


def ber_curve(
    scheme: Scheme,
    snr_db_values,
    convention: SnrConvention,
    params: SchemeParams,
) -> AnalyticCurve:
    x = np.asarray(snr_db_values, dtype=np.float64)
    y = np.array([analytic_ber(scheme, SnrSpec(float(db), convention), params) for db in x])
    return AnalyticCurve(x_values=x, y_values=y, label=f"analytic {scheme.value}")


def analytic_snr_gap_db(
    params: SchemeParams,
    convention: SnrConvention,
    target_ber: float,
    lo_db: float = -5.0,
    hi_db: float = 20.0,
) -> float:
    """SNR gap (conventional minus proposed) at ``target_ber`` by bisection.

    Positive means the proposed scheme reaches the target at lower SNR.
    """
    if not 0 < target_ber < 0.5:
        raise ValueError("target_ber must lie in (0, 0.5)")

    def crossing(scheme: Scheme) -> float:
        f = lambda db: analytic_ber(scheme, SnrSpec(db, convention), params) - target_ber
        lo, hi = lo_db, hi_db
        if f(lo) < 0 or f(hi) > 0:
            raise ValueError("target BER not bracketed on the search interval")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    return crossing(Scheme.CONVENTIONAL) - crossing(Scheme.PROPOSED)


def delay_storage_report(params: SchemeParams) -> DelayStorageReport:
    """Storage cost summary: first-injection delay and steady buffer size."""
    return DelayStorageReport(
        bus_before_first_injection=params.m_storage,
        rounds_to_first_injection=math.ceil(params.m_storage / params.phi),
        storage_bits=params.m_storage * params.cb_len,
    )


def binomial_ci(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; always brackets the point estimate."""
    if n < 0 or successes < 0 or successes > n:
        raise ValueError("need 0 <= successes <= n")
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return lo, hi
