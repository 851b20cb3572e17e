"""
Bodies of the CLI subcommands. Each takes a validated RunConfig and returns the paths it wrote.
"""

import csv
import math
from pathlib import Path

import numpy as np

from filtered_lrd.config import RunConfig, write_resolved_config
from filtered_lrd.errors import InconclusiveScanError, OutputError
from filtered_lrd.experiments.report import (
    write_cells_csv,
    write_json,
    write_plot_data,
    write_report_json,
    write_samples_csv,
)
from filtered_lrd.experiments.scaling import run_scaling
from filtered_lrd.field.covariance import CovarianceModel
from filtered_lrd.field.dump import write_field
from filtered_lrd.field.synthesis import synthesize
from filtered_lrd.limit.covariance import limit_covariance
from filtered_lrd.limit.integrability import integrability_scan
from filtered_lrd.limit.params import admissibility, hurst
from filtered_lrd.limit.sampler import sample_limit
from filtered_lrd.logger import logging
from filtered_lrd.rng import derive_seed
from filtered_lrd.stats import variance_stderr

logger = logging.getLogger(__name__)

# seed stream of the limit-covariance cross-check in limit-sample runs
_COVARIANCE_STREAM = 1


def run_synth(cfg: RunConfig) -> list[Path]:
    model = CovarianceModel(n=cfg.params.n, alpha=cfg.params.alpha)
    out = cfg.run.out
    resolved, _ = write_resolved_config(cfg, out)
    field = synthesize(model, tuple(cfg.synth.shape), spacing=cfg.synth.spacing, seed=cfg.run.seed)
    dump, header = write_field(field, out / "field.bin")
    return [dump, header, resolved]


def run_scaling_command(cfg: RunConfig) -> list[Path]:
    experiment = cfg.scaling_experiment()
    out = cfg.run.out
    resolved, _ = write_resolved_config(cfg, out)
    report = run_scaling(experiment, threads=cfg.run.threads, resolved_config=cfg.resolved())
    plot, fit = write_plot_data(report, out / "plot_data.csv")
    return [
        write_report_json(report, out / "report.json"),
        write_cells_csv(report, out / "cells.csv"),
        plot,
        fit,
        resolved,
    ]


def run_limit_sample(cfg: RunConfig) -> list[Path]:
    p = cfg.scaling_params()
    mode = cfg.run.validity_mode
    out = cfg.run.out
    resolved, _ = write_resolved_config(cfg, out)
    t_grid = cfg.limit.t_grid
    samples = sample_limit(p, t_grid, cfg.limit_grid(), seed=cfg.run.seed, count=cfg.limit.count, mode=mode)

    budget = cfg.covariance_budget(derive_seed(cfg.run.seed, _COVARIANCE_STREAM))
    per_t = []
    for i, t in enumerate(t_grid):
        column = samples[:, i]
        covariance = limit_covariance(p, t, t, budget, mode)
        variance = float(np.var(column, ddof=1))
        per_t.append(
            {
                "t": t,
                "count": int(column.size),
                "mean": float(column.mean()),
                "mean_stderr": float(np.std(column, ddof=1) / math.sqrt(column.size)),
                "variance": variance,
                "variance_stderr": variance_stderr(column),
                "limit_covariance": covariance.value,
                "limit_covariance_stderr": covariance.stderr,
                "limit_covariance_samples": covariance.samples,
            }
        )
    summary = {
        "kappa": p.kappa,
        "hurst": hurst(p, mode),
        "validity_mode": str(mode),
        "theorem_mode_admissible": admissibility(p).theorem,
        "seed": cfg.run.seed,
        "truncation_radius": cfg.limit.truncation_radius,
        "bins_per_axis": cfg.limit.bins_per_axis,
        "per_t": per_t,
    }
    header = [f"t={t:g}" for t in t_grid]
    return [
        write_samples_csv(header, samples, out / "samples.csv"),
        write_json(summary, out / "summary.json"),
        resolved,
    ]


def run_integrability(cfg: RunConfig) -> list[Path]:
    out = cfg.run.out
    resolved, _ = write_resolved_config(cfg, out)
    scan = cfg.scan_spec()
    path = out / "integrability.csv"
    rows = []
    for section in cfg.integrability.windows:
        window = section.build(cfg.params.n)
        for exponent in cfg.integrability.exponents:
            try:
                result = integrability_scan(window, exponent, scan)
                classification = str(result.classification)
                power = "" if result.fitted_power is None else repr(result.fitted_power)
                r_squared = "" if result.r_squared is None else repr(result.r_squared)
            except InconclusiveScanError as e:
                logger.warning("Inconclusive scan: %s", e, extra=e.diagnostics)
                classification, power, r_squared = "inconclusive", "", ""
            hurst_equivalent = 1.0 - exponent / (2.0 * window.n)
            rows.append(
                [window.describe(), repr(exponent), repr(hurst_equivalent), classification, power, r_squared]
            )

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(("window", "exponent", "hurst", "classification", "fitted_power", "r_squared"))
            writer.writerows(rows)
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return [path, resolved]
