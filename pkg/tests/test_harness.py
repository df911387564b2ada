"""Harness tests: determinism, accounting identities, stop rule, gap readout, CSV."""

import numpy as np
import pytest

from oblink.analysis import analytic_ber, analytic_snr_gap_db, unload_probability
from oblink.bitunit import make_scheme_params
from oblink.harness import (
    CSV_HEADER,
    UNLOAD_CSV_HEADER,
    BerReport,
    CodeConfig,
    ExperimentConfig,
    PointResult,
    _StreamComparer,
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
from oblink.phy import Scheme, SnrConvention, SnrSpec

PARAMS = make_scheme_params(36, 4, 256)
SMALL = make_scheme_params(36, 4, 64)


def grid(*values, convention=SnrConvention.EB_N0_INFO):
    return tuple(SnrSpec(v, convention) for v in values)


def config(scheme, *, params=SMALL, snr=(4.0,), n_bus=5_000, seed=99, **kw):
    return ExperimentConfig(
        scheme=scheme, params=params, snr_grid=grid(*snr), n_bus=n_bus, master_seed=seed, **kw
    )


# ---------------- config validation ----------------


def test_code_config_rejects_unknown_kind():
    with pytest.raises(ValueError):
        CodeConfig(kind="turbo")


def test_code_config_rejects_bad_iters():
    with pytest.raises(ValueError):
        CodeConfig(kind="ldpc", max_iters=0)


def test_experiment_config_rejects_empty_grid():
    with pytest.raises(ValueError):
        ExperimentConfig(scheme=Scheme.PROPOSED, params=SMALL, snr_grid=())


def test_experiment_config_rejects_mixed_conventions():
    mixed = (SnrSpec(1.0, SnrConvention.EB_N0_INFO), SnrSpec(2.0, SnrConvention.ES_N0))
    with pytest.raises(ValueError):
        ExperimentConfig(scheme=Scheme.PROPOSED, params=SMALL, snr_grid=mixed)


def test_experiment_config_rejects_source_smaller_than_storage():
    with pytest.raises(ValueError):
        config(Scheme.PROPOSED, n_bus=63)


def test_runner_rejects_mismatched_scheme():
    with pytest.raises(ValueError):
        run_proposed(config(Scheme.CONVENTIONAL))
    with pytest.raises(ValueError):
        run_conventional(config(Scheme.PROPOSED))


# ---------------- determinism ----------------


def test_repeat_runs_are_bit_identical():
    cfg = config(Scheme.PROPOSED, snr=(3.0, 5.0))
    a = run_proposed(cfg)
    b = run_proposed(cfg)
    assert render_ber_csv([a]) == render_ber_csv([b])
    assert a.rows == b.rows


def test_master_seed_changes_the_outcome():
    a = run_proposed(config(Scheme.PROPOSED, seed=1))
    b = run_proposed(config(Scheme.PROPOSED, seed=2))
    assert a.rows[0].errors != b.rows[0].errors


def test_schemes_use_independent_noise_unless_paired():
    # same master seed: the two schemes' streams are distinct by default,
    # while paired mode reuses one shared key
    plain = run_conventional(config(Scheme.CONVENTIONAL))
    paired = run_conventional(config(Scheme.CONVENTIONAL, paired_noise=True))
    assert plain.rows[0].errors != paired.rows[0].errors


# ---------------- accounting identities ----------------


def test_proposed_symbol_accounting_identity():
    cfg = config(Scheme.PROPOSED, snr=(6.0,), n_bus=3_000)
    row = run_proposed(cfg).rows[0]
    cb = SMALL.cb_len
    assert row.genuine_payload_bits == row.bu_count * cb
    assert row.channel_symbols == row.genuine_payload_bits + row.padding * cb
    assert row.bits == row.bu_count * SMALL.n_total
    assert row.converged_frac == 1.0  # rate-1 path


def test_conventional_symbol_accounting_identity():
    cfg = config(Scheme.CONVENTIONAL, snr=(6.0,), n_bus=3_000, min_errors=10**9)
    row = run_conventional(cfg).rows[0]
    assert row.padding == 0
    assert row.bu_count == 3_000
    assert row.genuine_payload_bits == row.channel_symbols == 3_000 * SMALL.n_total


def test_all_bus_accounted_when_budget_exhausted():
    cfg = config(Scheme.PROPOSED, snr=(30.0,), n_bus=2_000)
    row = run_proposed(cfg).rows[0]
    assert row.bu_count == 2_000  # high SNR: the error stop never fires


def test_stop_rule_halts_early_at_low_snr():
    cfg = config(Scheme.PROPOSED, snr=(0.0,), n_bus=300_000, min_errors=50)
    row = run_proposed(cfg).rows[0]
    assert row.errors >= 50
    assert row.bu_count < 300_000
    assert not row.low_confidence


def test_quiet_point_is_flagged_low_confidence():
    cfg = config(Scheme.PROPOSED, snr=(40.0,), n_bus=1_000)
    row = run_proposed(cfg).rows[0]
    assert row.errors == 0
    assert row.ber == 0.0
    assert row.ci_lo == 0.0 and row.ci_hi > 0.0
    assert row.low_confidence
    assert row.bu_errors == 0


def test_uncoded_points_track_the_closed_form():
    cfg = config(Scheme.CONVENTIONAL, params=PARAMS, snr=(3.0, 5.0), n_bus=40_000, seed=11, min_errors=10**9)
    for row in run_conventional(cfg).rows:
        p = analytic_ber(Scheme.CONVENTIONAL, SnrSpec(row.snr_db, SnrConvention.EB_N0_INFO), PARAMS)
        sigma = (p * (1 - p) / row.bits) ** 0.5
        assert abs(row.ber - p) < 4 * sigma


def test_coded_run_is_clean_at_high_snr():
    cfg = config(
        Scheme.PROPOSED,
        snr=(8.0,),
        n_bus=1_500,
        code=CodeConfig(kind="ldpc", alist_path=default_alist_path(), max_iters=30),
    )
    row = run_proposed(cfg).rows[0]
    assert row.errors == 0
    assert row.converged_frac == 1.0
    assert row.codewords > 0
    # parity/pad overhead makes the channel longer than the payload alone
    assert row.channel_symbols > row.genuine_payload_bits + row.padding * SMALL.cb_len


def test_es_n0_convention_run_matches_its_closed_form():
    g = grid(6.0, convention=SnrConvention.ES_N0)
    cfg = ExperimentConfig(
        scheme=Scheme.PROPOSED, params=PARAMS, snr_grid=g, n_bus=60_000, master_seed=4, min_errors=10**9
    )
    row = run_proposed(cfg).rows[0]
    p = analytic_ber(Scheme.PROPOSED, g[0], PARAMS)
    sigma = (p * (1 - p) / row.bits) ** 0.5
    assert abs(row.ber - p) < 4 * sigma


# ---------------- roundtrip ----------------


def test_roundtrip_small_run_is_lossless():
    res = run_roundtrip(SMALL, 2_000, seed=21)
    assert res.ok
    assert res.phantoms_ok and res.multiset_ok and res.class_order_ok and res.bit_exact
    assert res.slots * 1 >= res.n_bus
    assert res.padding == res.slots - res.n_bus
    assert res.mean_residency_rounds > 0.0


def test_roundtrip_rejects_source_below_storage():
    with pytest.raises(ValueError):
        run_roundtrip(SMALL, 10)


# ---------------- unload experiment ----------------


def test_unload_matches_closed_form_within_ci():
    (res,) = run_unload_experiment([8], [1, 8, 24], trials=30_000, seed=17)
    for m, ev in zip(res.m_values, res.events):
        rho = unload_probability(8, int(m))
        half = 3.5 * (rho * (1 - rho) / res.trials) ** 0.5
        assert abs(ev / res.trials - rho) <= half


def test_unload_edge_cases():
    (res,) = run_unload_experiment([1], [0, 1, 5], trials=500, seed=1)
    assert list(res.events) == [500, 0, 0]  # m=0 always empty; phi=1 never after a drop
    assert res.analytic.y_values[0] == 1.0
    assert res.analytic.y_values[1] == 0.0


def test_unload_rejects_bad_inputs():
    with pytest.raises(ValueError):
        run_unload_experiment([3], [1], trials=100)
    with pytest.raises(ValueError):
        run_unload_experiment([8], [1], trials=0)
    with pytest.raises(ValueError):
        run_unload_experiment([8], [], trials=100)


def test_unload_is_deterministic():
    a = run_unload_experiment([16], [4, 16], trials=5_000, seed=5)
    b = run_unload_experiment([16], [4, 16], trials=5_000, seed=5)
    assert render_unload_csv(a) == render_unload_csv(b)


# ---------------- SNR-at-BER and gap ----------------


def test_snr_at_ber_exact_on_synthetic_log_linear_curve():
    # ber = 10^(-x/2): crossing 1e-3 at exactly x = 6
    x = np.array([2.0, 4.0, 8.0, 6.0])  # unsorted on purpose
    y = 10.0 ** (-x / 2)
    assert snr_at_ber(x, y, 1e-3) == pytest.approx(6.0, abs=1e-12)


def test_snr_at_ber_refuses_unbracketed_target():
    with pytest.raises(ValueError):
        snr_at_ber([0.0, 1.0], [1e-2, 1e-3], 1e-5)


def test_snr_at_ber_skips_zero_ber_points():
    with pytest.raises(ValueError):
        snr_at_ber([0.0, 1.0, 2.0], [1e-3, 0.0, 1e-5], 1e-4)
    # but a later valid bracket is still found
    got = snr_at_ber([0.0, 1.0, 2.0, 3.0], [1e-2, 0.0, 1e-3, 1e-5], 1e-4)
    assert 2.0 < got < 3.0


def test_snr_at_ber_rejects_bad_target():
    with pytest.raises(ValueError):
        snr_at_ber([0, 1], [1e-2, 1e-3], 0.0)


def _stub_report(scheme, points):
    cfg = ExperimentConfig(
        scheme=scheme,
        params=SMALL,
        snr_grid=grid(*[p[0] for p in points]),
        n_bus=64,
    )
    rows = tuple(
        PointResult(
            snr_db=s,
            scheme=scheme,
            bits=10**9,
            errors=int(b * 10**9),
            ber=b,
            ci_lo=b,
            ci_hi=b,
            bu_count=1,
            bu_errors=1,
            padding=0,
            converged_frac=1.0,
            channel_symbols=1,
            genuine_payload_bits=1,
            codewords=0,
            low_confidence=False,
        )
        for s, b in points
    )
    return BerReport(config=cfg, rows=rows)


def test_measure_snr_gap_zero_for_identical_reports():
    rep = _stub_report(Scheme.PROPOSED, [(0.0, 1e-3), (2.0, 1e-5)])
    assert measure_snr_gap(rep, rep, 1e-4) == 0.0


def test_measure_snr_gap_recovers_a_pure_shift():
    left = _stub_report(Scheme.PROPOSED, [(0.0, 1e-3), (2.0, 1e-5)])
    right = _stub_report(Scheme.CONVENTIONAL, [(0.75, 1e-3), (2.75, 1e-5)])
    assert measure_snr_gap(left, right, 1e-4) == pytest.approx(0.75, abs=1e-12)
    assert measure_snr_gap(right, left, 1e-4) == pytest.approx(-0.75, abs=1e-12)


def test_gap_of_sampled_closed_forms_matches_bisection():
    snrs = [7.0, 7.5, 8.0, 8.5, 9.0]
    reports = []
    for scheme in (Scheme.PROPOSED, Scheme.CONVENTIONAL):
        pts = [
            (s, analytic_ber(scheme, SnrSpec(s, SnrConvention.EB_N0_INFO), PARAMS))
            for s in snrs
        ]
        reports.append(_stub_report(scheme, pts))
    sampled = measure_snr_gap(reports[0], reports[1], 1e-4)
    exact = analytic_snr_gap_db(PARAMS, SnrConvention.EB_N0_INFO, 1e-4)
    assert sampled == pytest.approx(exact, abs=0.02)


# ---------------- stream comparer ----------------


def test_stream_comparer_counts_across_chunk_boundaries():
    cmp_ = _StreamComparer()
    cmp_.push_tx(np.array([0, 1, 1, 0, 1], dtype=np.uint8))
    cmp_.push_tx(np.array([1, 1], dtype=np.uint8))
    cmp_.push_rx(np.array([0, 1], dtype=np.uint8))
    assert cmp_.errors == 0
    cmp_.push_rx(np.array([0, 0, 0, 1, 1], dtype=np.uint8))  # 2 flips
    assert cmp_.errors == 2


def test_stream_comparer_rejects_rx_overrun():
    cmp_ = _StreamComparer()
    cmp_.push_tx(np.array([0, 1], dtype=np.uint8))
    with pytest.raises(ValueError):
        cmp_.push_rx(np.array([0, 1, 0], dtype=np.uint8))


# ---------------- CSV rendering ----------------


def test_ber_csv_header_and_shape():
    reports = [
        run_proposed(config(Scheme.PROPOSED, snr=(4.0, 5.0))),
        run_conventional(config(Scheme.CONVENTIONAL, snr=(4.0, 5.0))),
    ]
    text = render_ber_csv(reports)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert CSV_HEADER == "snr_db,scheme,bits,errors,ber,ci_lo,ci_hi,bu_errors,padding,converged_frac"
    assert len(lines) == 1 + 4  # two SNRs x two schemes
    # sorted by (snr, scheme): conventional before proposed at each SNR
    assert [ln.split(",")[1] for ln in lines[1:]] == ["conventional", "proposed"] * 2
    for ln in lines[1:]:
        assert len(ln.split(",")) == 10


def test_ber_csv_gap_footer_present_and_prefixed():
    snrs = (7.0, 8.0, 9.0)
    reports = [
        run_proposed(config(Scheme.PROPOSED, params=PARAMS, snr=snrs, n_bus=150_000, seed=31, min_errors=60)),
        run_conventional(config(Scheme.CONVENTIONAL, params=PARAMS, snr=snrs, n_bus=150_000, seed=31, min_errors=60)),
    ]
    text = render_ber_csv(reports, gap_targets=[1e-4], gap_references=[2.0])
    footer = text.strip().split("\n")[-1]
    assert footer.startswith("# snr_gap_db,target_ber=0.0001,")
    assert footer.endswith(",reference=2")
    assert ("measured=" in footer) or ("error=" in footer)


def test_unload_csv_shape():
    res = run_unload_experiment([8, 16], [1, 4], trials=1_000, seed=2)
    lines = render_unload_csv(res).strip().split("\n")
    assert lines[0] == UNLOAD_CSV_HEADER
    assert len(lines) == 1 + 4
    assert lines[1].startswith("8,1,1000,")
