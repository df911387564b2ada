"""oblink: link-level simulator for opportunistic-bit transmission.

The scheme splits each fixed-length bit-unit into index-carried bits
(which pick a time slot and are never modulated) and payload bits
(carried inside that slot). The package provides the transmit-side
falling-model storage, a BPSK/AWGN channel with calibrated noise, a
rate-1 path and an LDPC codec, the receive-side reconstruction, closed
form reference curves, and a Monte Carlo harness with a CLI.
"""

from .bitunit import (
    CbPayload,
    SchemeParams,
    index_to_ob,
    make_scheme_params,
    ob_to_index,
    reassemble,
    segment,
)
from .falling_storage import BuSource, FallingStorage, Frame, RandomBuSource, new_storage
from .phy import NoiseModel, Scheme, SnrConvention, SnrSpec, awgn, bpsk_modulate, hard_decision, noise_sigma, soft_llr
from .fec import LdpcCode, DecodeResult, derive_encoder, encode, parse_alist, rate1_passthrough, sum_product_decode
from .receiver import recover_ts_index, receive_stream
from .analysis import analytic_ber, q_function, snr_gain_db, spectral_gain, unload_probability
from .harness import (
    BerReport,
    CodeConfig,
    ExperimentConfig,
    PointResult,
    RoundtripResult,
    UnloadResult,
    default_alist_path,
    measure_snr_gap,
    render_ber_csv,
    render_unload_csv,
    run_conventional,
    run_proposed,
    run_roundtrip,
    run_unload_experiment,
    snr_at_ber,
)

__version__ = "0.1.0"
