"""Command-line front end: optimize grids, run sensing/BER campaigns, self-verify.

Subcommands
-----------
optimize   per-trial sidelobe optimization; writes a summary CSV and one grid CSV
sense      CFAR detection probability vs sensing SNR for the selected variants
ber        uncoded BER vs SNR, original grid vs its optimized counterpart
verify     dense-matrix and statistical self-checks; exit code 2 on failure

Exit codes: 0 success, 1 configuration error, 2 verification failure.
All randomness is keyed by (seed, trial) so any single trial is reproducible
in isolation and results do not depend on the worker count.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import comms, oracle, sensing
from .config import ConfigError, ExperimentConfig, load_config, trial_rng
from .constellation import orthogonal_interleaved_grid, random_reference_grid
from .optimizer import optimize
from .spectrum import LagWeights, SymbolGrid, cyclic_correlations, psl_db

VARIANTS = ("original", "optimized", "orthogonal")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    os.makedirs(cfg.out_dir, exist_ok=True)
    try:
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pslwave")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (
        ("optimize", _cmd_optimize),
        ("sense", _cmd_sense),
        ("ber", _cmd_ber),
        ("verify", _cmd_verify),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="INI config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument(
            "--no-timestamp", action="store_true",
            help="omit the generation-time comment from CSV output",
        )
        p.add_argument(
            "--variant", choices=VARIANTS, action="append", default=None,
            help="restrict to a variant (repeatable); default depends on the subcommand",
        )
        p.set_defaults(func=func)
    return parser


def _overrides(args) -> dict:
    over = {
        "seed": args.seed,
        "trials": args.trials,
        "out_dir": args.out,
        "workers": args.workers,
    }
    if args.no_timestamp:
        over["timestamp"] = False
    return over


def _write_csv(cfg: ExperimentConfig, name: str, header: list[str], rows: list[list]) -> str:
    path = os.path.join(cfg.out_dir, name)
    with open(path, "w", newline="") as fh:
        if cfg.timestamp:
            fh.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _trial_grids(cfg: ExperimentConfig, trial: int, variants: tuple[str, ...]):
    """Reference/optimized/orthogonal grids (plus bits and mask) for one trial."""
    rng = trial_rng(cfg.seed, trial)
    spec = cfg.constellation()
    mask = cfg.mask(rng)
    reference, bits = random_reference_grid(rng, spec, mask)
    out = {"original": reference}
    report = None
    if "optimized" in variants:
        report = optimize(reference, spec, mask, cfg.lag_weights(), cfg.optimizer())
        out["optimized"] = report.grid
    if "orthogonal" in variants:
        out["orthogonal"] = orthogonal_interleaved_grid(
            rng, spec, cfg.n_subcarriers, cfg.n_antennas
        )
    return out, bits, mask, report


def _map_trials(cfg: ExperimentConfig, worker, payloads: list):
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(worker, payloads))
    return [worker(p) for p in payloads]


def _optimize_trial(payload) -> dict:
    cfg, trial = payload
    _, _, _, report = _trial_grids(cfg, trial, ("optimized",))
    return {
        "trial": trial,
        "psl_db_before": report.psl_db_before,
        "psl_db_after": report.psl_db_after,
        "iterations": report.iterations,
        "stop_reason": report.stop_reason,
    }


def _cmd_optimize(cfg: ExperimentConfig, args) -> int:
    rows = _map_trials(cfg, _optimize_trial, [(cfg, t) for t in range(cfg.trials)])
    path = _write_csv(
        cfg,
        "optimize_summary.csv",
        ["trial", "psl_db_before", "psl_db_after", "iterations", "stop_reason"],
        [[r["trial"], f"{r['psl_db_before']:.6f}", f"{r['psl_db_after']:.6f}",
          r["iterations"], r["stop_reason"]] for r in rows],
    )
    gains = [r["psl_db_before"] - r["psl_db_after"] for r in rows]
    print(f"wrote {path}")
    print(f"median PSL gain over {cfg.trials} trials: {np.median(gains):.2f} dB")

    variants = tuple(args.variant) if args.variant else ("optimized",)
    grids, _, _, _ = _trial_grids(cfg, 0, variants)
    for variant in variants:
        grid = grids[variant]
        rows = [
            [m, n, f"{grid.symbols[n, m].real:.12g}", f"{grid.symbols[n, m].imag:.12g}"]
            for m in range(grid.n_antennas)
            for n in range(grid.n_subcarriers)
        ]
        path = _write_csv(
            cfg, f"grid_{variant}.csv", ["antenna", "subcarrier", "re", "im"], rows
        )
        print(f"wrote {path}")
    return 0


def _sense_trial(payload) -> dict:
    cfg, trial, variants = payload
    grids, _, _, _ = _trial_grids(cfg, trial, variants)
    hits = {}
    for si, snr_db in enumerate(cfg.sense_snr_db):
        noise_rng = np.random.default_rng(
            np.random.SeedSequence(cfg.seed, spawn_key=(trial, si))
        )
        for variant in variants:
            dp = sensing.detection_campaign(
                [grids[variant]], snr_db, cfg.cfar(), noise_rng, n_targets=cfg.n_targets
            )
            hits[(si, variant)] = dp
    return hits


def _cmd_sense(cfg: ExperimentConfig, args) -> int:
    variants = tuple(args.variant) if args.variant else VARIANTS
    results = _map_trials(
        cfg, _sense_trial, [(cfg, t, variants) for t in range(cfg.trials)]
    )
    rows = []
    for si, snr_db in enumerate(cfg.sense_snr_db):
        for variant in variants:
            dp = float(np.mean([r[(si, variant)] for r in results]))
            rows.append([f"{snr_db:.2f}", variant, f"{dp:.6f}", cfg.trials])
    path = _write_csv(cfg, "sense.csv", ["snr_db", "variant", "dp", "trials"], rows)
    print(f"wrote {path}")
    return 0


def _ber_trial(payload) -> dict:
    cfg, trial = payload
    grids, bits, mask, _ = _trial_grids(cfg, trial, ("optimized",))
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(trial, 10**6)))
    ber = comms.ber_campaign(
        [(grids["original"], grids["optimized"], bits)],
        list(cfg.ber_snr_db),
        cfg.constellation(),
        mask,
        rng,
        n_rx=cfg.n_rx,
    )
    return {"ber": ber, "n_bits": bits.size}


def _cmd_ber(cfg: ExperimentConfig, args) -> int:
    results = _map_trials(cfg, _ber_trial, [(cfg, t) for t in range(cfg.trials)])
    total_bits = sum(r["n_bits"] for r in results)
    rows = []
    for si, snr_db in enumerate(cfg.ber_snr_db):
        for variant in ("original", "optimized"):
            errs = sum(r["ber"][variant][si] * r["n_bits"] for r in results)
            rows.append(
                [f"{snr_db:.2f}", variant, f"{cfg.rho:.3f}",
                 f"{errs / total_bits:.8e}", cfg.trials]
            )
    path = _write_csv(cfg, "ber.csv", ["snr_db", "variant", "rho", "ber", "trials"], rows)
    print(f"wrote {path}")
    return 0


def _cmd_verify(cfg: ExperimentConfig, args) -> int:
    failures = []
    rng = trial_rng(cfg.seed, 0)

    n, m = 8, 2
    spec = cfg.constellation()
    grid = SymbolGrid(spec.points[rng.integers(0, spec.order, size=(n, m))])
    w = LagWeights(n, 4)
    fast = cyclic_correlations(grid).values
    slow = oracle.brute_correlations(grid).values
    if not np.allclose(fast, slow, rtol=1e-9, atol=1e-7):
        failures.append("fast correlations disagree with the brute-force sum")

    for p in (2, 4):
        try:
            oracle.majorization_chain_check(grid, w, p, rng, n_trials=25)
        except AssertionError as exc:
            failures.append(f"majorization chain (p={p}): {exc}")

    beta = sensing.cfar_threshold_factor(1e-4, 7)
    if abs(beta - 13.03) > 0.01:
        failures.append(f"CFAR threshold factor off: {beta:.4f}")

    cells = rng.exponential(size=200_000)
    det = sensing.cfar_detect(cells, sensing.CfarConfig(p_fa=1e-2, n_ref=7, n_guard=1))
    rate = det.mean()
    if not 0.5e-2 <= rate <= 2e-2:
        failures.append(f"empirical false-alarm rate {rate:.2e} outside [0.5, 2] x 1e-2")

    report = optimize(grid, spec, _full_mask(n, m), w, cfg.optimizer())
    if any(b > a for a, b in zip(report.eta_trace, report.eta_trace[1:])):
        failures.append("accepted objective trace is not non-increasing")

    if failures:
        for f in failures:
            print(f"FAIL {f}")
        return 2
    print("all verification checks passed")
    return 0


def _full_mask(n: int, m: int):
    from .constellation import SubcarrierMask

    return SubcarrierMask.all_used(n, m)


if __name__ == "__main__":
    raise SystemExit(main())
