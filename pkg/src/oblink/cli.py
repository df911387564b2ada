"""Command-line front end.

Subcommands:
  ber        Monte Carlo BER sweep (proposed + conventional), CSV out
  unload     column-empty frequency experiment vs the closed form, CSV out
  analytic   closed-form BER curves (no simulation), CSV out
  roundtrip  noiseless end-to-end fidelity check

Every flag can also be given in a flat ``key = value`` config file passed
via ``--config``; explicit flags override file entries. Keys mirror the
long flag names with either dashes or underscores.
"""

from __future__ import annotations

import argparse
import sys

from .analysis import analytic_ber, analytic_snr_gap_db
from .bitunit import make_scheme_params
from .harness import (
    CodeConfig,
    ExperimentConfig,
    measure_snr_gap,
    render_ber_csv,
    render_unload_csv,
    run_conventional,
    run_proposed,
    run_roundtrip,
    run_unload_experiment,
)
from .phy import Scheme, SnrConvention, SnrSpec

_CONVENTIONS = {"ebn0": SnrConvention.EB_N0_INFO, "esn0": SnrConvention.ES_N0}


def _parse_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment; keys match flag names."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_").lstrip("_")
            val = val.strip()
            if not key or not val:
                raise ValueError(f"{path}:{lineno}: empty key or value")
            values[key] = val
    return values


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(key: str, text: str, kind):
    if kind is bool:
        low = text.lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ValueError(f"config key {key}: expected a boolean, got {text!r}")
    if isinstance(kind, list):  # list of floats/ints, comma or space separated
        items = [t for chunk in text.split(",") for t in chunk.split()]
        return [kind[0](t) for t in items]
    return kind(text)


def _resolve(args: argparse.Namespace, spec: dict[str, tuple]) -> dict:
    """Merge CLI flags over config-file values over defaults.

    ``spec`` maps key -> (type, default); argparse stores None for flags
    the user did not pass, so non-None always means an explicit flag.
    """
    file_vals = _parse_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_vals) - set(spec)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = {}
    for key, (kind, default) in spec.items():
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            out[key] = flag_val
        elif key in file_vals:
            out[key] = _coerce(key, file_vals[key], kind)
        else:
            out[key] = default
    return out


def _snr_values(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("snr-step must be > 0")
    if stop < start:
        raise ValueError("snr-stop must be >= snr-start")
    count = int((stop - start) / step + 0.5) + 1
    return [round(start + i * step, 10) for i in range(count)]


def _write_out(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common_flags(p: argparse.ArgumentParser, *, storage: bool) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--n-total", type=int, help="BU length N in bits (default 36)")
    p.add_argument("--k-ob", type=int, help="index-carried bits K per BU (default 4)")
    if storage:
        p.add_argument("--m-storage", type=int, help="BUs accumulated before transmitting (default 256)")
    p.add_argument("--seed", type=int, help="master seed (default 12345)")
    p.add_argument("--out", help="output path (default: stdout)")


def _add_snr_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--snr-start", type=float, help="first SNR in dB (default 0)")
    p.add_argument("--snr-stop", type=float, help="last SNR in dB (default 9)")
    p.add_argument("--snr-step", type=float, help="grid step in dB (default 1)")
    p.add_argument("--convention", choices=sorted(_CONVENTIONS), help="SNR convention (default ebn0)")
    p.add_argument("--summary", action="store_const", const=True, help="append SNR-gap footer lines")
    p.add_argument("--gap-ber", type=float, action="append", help="BER target(s) for the summary gap (default 1e-4)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oblink", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="Monte Carlo BER sweep over an SNR grid")
    _add_common_flags(ber, storage=True)
    _add_snr_flags(ber)
    ber.add_argument("--code", choices=["rate1", "ldpc"], help="FEC selection (default rate1)")
    ber.add_argument("--alist", help="parity-check matrix file (default: bundled 1296-bit code)")
    ber.add_argument("--max-iters", type=int, help="sum-product iteration cap (default 50)")
    ber.add_argument("--min-errors", type=int, help="bit errors to collect per point (default 100)")
    ber.add_argument("--n-bus", type=int, help="BU budget per point (default 400000)")
    ber.add_argument("--segment-bus", type=int, help="pipeline chunk in BUs (default 32768)")
    ber.add_argument("--scheme", choices=["both", "proposed", "conventional"], help="which curves to run (default both)")
    ber.add_argument("--paired-noise", action="store_const", const=True,
                     help="share BU data and noise seeds between schemes")
    ber.add_argument("--gap-ref", type=float, action="append",
                     help="reference gap value(s) echoed next to measured gaps")

    unload = sub.add_parser("unload", help="column-empty frequency vs the closed form")
    _add_common_flags(unload, storage=False)
    unload.add_argument("--phi", type=int, action="append", help="column count(s); repeatable (default 8 16 32)")
    unload.add_argument("--m-grid", help="comma-separated occupancy values (default: spans 1..12*phi)")
    unload.add_argument("--trials", type=int, help="independent fills per grid point (default 20000)")

    analytic = sub.add_parser("analytic", help="closed-form BER curves, no simulation")
    _add_common_flags(analytic, storage=False)
    _add_snr_flags(analytic)

    rt = sub.add_parser("roundtrip", help="noiseless end-to-end fidelity check")
    _add_common_flags(rt, storage=True)
    rt.add_argument("--n-bus", type=int, help="BUs to push through (default 10000)")
    return parser


def default_m_grid(phi: int) -> list[int]:
    """Occupancy grid spanning [1, 12*phi]: dense at the knee, sparse in the tail."""
    base = [1, 2, 4, phi // 2, phi, 2 * phi, 3 * phi, 4 * phi, 6 * phi, 8 * phi, 10 * phi, 12 * phi]
    return sorted({m for m in base if m >= 1})


_GEOM_SPEC = {
    "n_total": (int, 36),
    "k_ob": (int, 4),
    "seed": (int, 12345),
    "out": (str, None),
}

_SNR_SPEC = {
    "snr_start": (float, 0.0),
    "snr_stop": (float, 9.0),
    "snr_step": (float, 1.0),
    "convention": (str, "ebn0"),
    "summary": (bool, False),
    "gap_ber": ([float], None),
}


def _cmd_ber(args) -> int:
    spec = {
        **_GEOM_SPEC,
        **_SNR_SPEC,
        "m_storage": (int, 256),
        "code": (str, "rate1"),
        "alist": (str, None),
        "max_iters": (int, 50),
        "min_errors": (int, 100),
        "n_bus": (int, 400_000),
        "segment_bus": (int, 32_768),
        "scheme": (str, "both"),
        "paired_noise": (bool, False),
        "gap_ref": ([float], None),
    }
    opt = _resolve(args, spec)
    params = make_scheme_params(opt["n_total"], opt["k_ob"], opt["m_storage"])
    convention = _CONVENTIONS[opt["convention"]]
    grid = tuple(SnrSpec(v, convention) for v in _snr_values(opt["snr_start"], opt["snr_stop"], opt["snr_step"]))
    code = CodeConfig(kind=opt["code"], alist_path=opt["alist"], max_iters=opt["max_iters"])

    def config_for(scheme: Scheme) -> ExperimentConfig:
        return ExperimentConfig(
            scheme=scheme,
            params=params,
            snr_grid=grid,
            code=code,
            n_bus=opt["n_bus"],
            master_seed=opt["seed"],
            min_errors=opt["min_errors"],
            paired_noise=opt["paired_noise"],
            segment_bus=opt["segment_bus"],
        )

    reports = []
    if opt["scheme"] in ("both", "proposed"):
        reports.append(run_proposed(config_for(Scheme.PROPOSED)))
    if opt["scheme"] in ("both", "conventional"):
        reports.append(run_conventional(config_for(Scheme.CONVENTIONAL)))
    targets = (opt["gap_ber"] or [1e-4]) if opt["summary"] else ()
    text = render_ber_csv(reports, gap_targets=targets, gap_references=opt["gap_ref"])
    _write_out(text, opt["out"])
    return 0


def _cmd_unload(args) -> int:
    spec = {
        **_GEOM_SPEC,
        "phi": ([int], None),
        "m_grid": (str, None),
        "trials": (int, 20_000),
    }
    opt = _resolve(args, spec)
    phi_list = opt["phi"] or [8, 16, 32]
    results = []
    for phi in phi_list:
        if opt["m_grid"]:
            m_grid = [int(t) for chunk in opt["m_grid"].split(",") for t in chunk.split()]
        else:
            m_grid = default_m_grid(phi)
        results.extend(run_unload_experiment([phi], m_grid, trials=opt["trials"], seed=opt["seed"]))
    _write_out(render_unload_csv(results), opt["out"])
    return 0


def _cmd_analytic(args) -> int:
    opt = _resolve(args, {**_GEOM_SPEC, **_SNR_SPEC})
    params = make_scheme_params(opt["n_total"], opt["k_ob"], 1)
    convention = _CONVENTIONS[opt["convention"]]
    values = _snr_values(opt["snr_start"], opt["snr_stop"], opt["snr_step"])
    lines = ["snr_db,scheme,ber"]
    for v in values:
        for scheme in (Scheme.CONVENTIONAL, Scheme.PROPOSED):
            ber = analytic_ber(scheme, SnrSpec(v, convention), params)
            lines.append(f"{v:.10g},{scheme.value},{ber:.10g}")
    if opt["summary"]:
        for target in opt["gap_ber"] or [1e-4]:
            gap = analytic_snr_gap_db(params, convention, target)
            lines.append(f"# analytic_snr_gap_db,target_ber={target:.10g},value={gap:.10g}")
    _write_out("\n".join(lines) + "\n", opt["out"])
    return 0


def _cmd_roundtrip(args) -> int:
    spec = {**_GEOM_SPEC, "m_storage": (int, 256), "n_bus": (int, 10_000)}
    opt = _resolve(args, spec)
    params = make_scheme_params(opt["n_total"], opt["k_ob"], opt["m_storage"])
    res = run_roundtrip(params, opt["n_bus"], seed=opt["seed"])
    lines = [
        f"n_bus = {res.n_bus}",
        f"slots = {res.slots}",
        f"padding = {res.padding}",
        f"phantoms_ok = {res.phantoms_ok}",
        f"multiset_ok = {res.multiset_ok}",
        f"class_order_ok = {res.class_order_ok}",
        f"bit_exact = {res.bit_exact}",
        f"mean_residency_rounds = {res.mean_residency_rounds:.10g}",
        f"ok = {res.ok}",
    ]
    _write_out("\n".join(lines) + "\n", opt["out"])
    return 0 if res.ok else 1


_COMMANDS = {
    "ber": _cmd_ber,
    "unload": _cmd_unload,
    "analytic": _cmd_analytic,
    "roundtrip": _cmd_roundtrip,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
