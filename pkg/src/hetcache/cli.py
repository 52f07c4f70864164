"""Command-line experiment runner.

Each command evaluates one study and writes a CSV (RFC-4180-style, CRLF
line ends, 12 significant digits).  Analytic columns never require the
simulator; with ``--no-sim`` the simulation columns are left empty.  Exit
codes: 0 success, 2 configuration/validation problem, 3 infeasible
operating point.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import backhaul as bh
from . import delivery as dv
from . import load as ld
from . import montecarlo as mc
from .config_io import (
    ConfigError,
    ExperimentConfig,
    apply_override,
    default_config,
    format_real,
    load_config,
)
from .content import hit_probability
from .exceptions import InfeasibleError

COMMANDS = (
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "kmax",
    "scd",
    "densities",
    "backhaul-rate",
    "delay",
    "hit-bounds",
    "regime",
)

# commands whose schema carries simulator columns
_SIM_COMMANDS = {"fig2", "fig5", "fig6"}

_SCHEMAS = {
    "fig2": ("k", "rate_threshold_bps", "ccdf_analytic", "ccdf_sim", "sim_ci"),
    "fig3": ("eps", "cache_size", "q_hit", "kmax_a", "scd_a"),
    "fig4": ("rho", "kmax", "density_ratio", "lambda_s_min"),
    "fig5": ("n", "s_o", "rate_exact_bps", "rate_lower_bps", "rate_sim_bps", "sim_ci"),
    "fig6": (
        "cache_size",
        "q_hit",
        "t1_s",
        "delay_cached_s",
        "delay_backhaul_s",
        "delay_s",
        "delay_sim_s",
        "sim_ci",
    ),
    "kmax": ("sweep_value", "q_hit", "t1_s", "kmax_a", "kmax_b"),
    "scd": (
        "sweep_value",
        "q_hit",
        "t1_s",
        "kmax_a",
        "kmax_b",
        "psi_a",
        "psi_b",
        "psi_total",
        "regime",
    ),
    "densities": ("sweep_value", "q_hit", "kmax_a", "s_max", "lambda_s_min", "lambda_m_min"),
    "backhaul-rate": ("sweep_value", "s_o", "n", "rate_exact_bps", "rate_lower_bps", "t1_s"),
    "delay": (
        "sweep_value",
        "k",
        "pmf_weight",
        "e_ra_bps",
        "e_rap_bps",
        "t1_s",
        "delay_s",
        "eta_o",
        "theta",
    ),
    "hit-bounds": ("sweep_value", "q_hit", "q_hit_max", "q_hit_min", "t1_s", "feasible"),
    "regime": ("sweep_value", "regime", "l_min", "l_max", "feasible", "psi_approx"),
}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def _write_csv(path: str, header: tuple[str, ...], rows: list[tuple]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\r\n".join(lines) + "\r\n")


def _backhaul_t1(cfg: ExperimentConfig) -> float:
    rate = bh.backhaul_rate_exact(cfg.radio, cfg.deploy, cfg.experiment.s_o)
    return bh.backhaul_time(cfg.delivery.content_bits, rate)


def _cmd_fig2(cfg, sim, workers):
    q_hit = hit_probability(cfg.content)
    threshold = cfg.delivery.target_rate
    ks = cfg.experiment.k_values
    estimates = (
        mc.simulate_access_ccdf_multi(
            cfg.radio, cfg.deploy, cfg.content, ks, threshold, sim, workers
        )
        if sim is not None
        else [None] * len(ks)
    )
    rows = []
    for k, est in zip(ks, estimates):
        analytic = ld.lambda_cached(k, q_hit, cfg.delivery, cfg.radio)
        if est is not None:
            rows.append((k, threshold, analytic, est.mean, est.ci_half_width_95))
        else:
            rows.append((k, threshold, analytic, None, None))
    return rows


def _cmd_fig3(cfg, sim, workers):
    rows = []
    for eps in cfg.experiment.eps_values:
        delivery = dataclasses.replace(cfg.delivery, scd_threshold=eps)
        for cache in cfg.experiment.cache_sizes:
            content = dataclasses.replace(cfg.content, cache_size=cache)
            q_hit = hit_probability(content)
            kmax_a = ld.kmax_cached(q_hit, delivery, cfg.radio)
            psi = ld.scd_cached(q_hit, cfg.deploy, delivery, cfg.radio)
            rows.append((eps, cache, q_hit, kmax_a, psi))
    return rows


def _cmd_fig4(cfg, sim, workers):
    kmax = cfg.experiment.kmax_load
    rows = []
    for rho in cfg.experiment.rho_values:
        ratio = ld.min_load_ratio(kmax, rho, cfg.deploy.gamma_load)
        rows.append((rho, kmax, ratio, cfg.deploy.lambda_u / ratio))
    return rows


def _cmd_fig5(cfg, sim, workers):
    rows = []
    for n in cfg.experiment.n_values:
        deploy = dataclasses.replace(cfg.deploy, antennas=n)
        for s_o in cfg.experiment.s_o_values:
            exact = bh.backhaul_rate_exact(cfg.radio, deploy, s_o)
            lower = bh.backhaul_rate_lower(cfg.radio, deploy, s_o)
            if sim is not None:
                est = mc.simulate_backhaul_rate(cfg.radio, deploy, s_o, sim, workers)
                rows.append((n, s_o, exact, lower, est.mean, est.ci_half_width_95))
            else:
                rows.append((n, s_o, exact, lower, None, None))
    return rows


def _cmd_fig6(cfg, sim, workers):
    t1 = _backhaul_t1(cfg)
    kmax_used = cfg.experiment.kmax_load
    rows = []
    for cache in cfg.experiment.cache_sizes:
        content = dataclasses.replace(cfg.content, cache_size=cache)
        q_hit = hit_probability(content)
        report = dv.avg_delay(
            cfg.deploy, cfg.radio, cfg.delivery, content, kmax_used, t1,
            compute_balance=False,
        )
        if sim is not None:
            est = mc.simulate_delay_weighted(
                cfg.radio, cfg.deploy, content, cfg.delivery,
                kmax_used, cfg.experiment.s_o, sim, workers,
            )
            sim_mean, sim_ci = est.mean, est.ci_half_width_95
        else:
            sim_mean = sim_ci = None
        rows.append(
            (
                cache,
                q_hit,
                t1,
                report.delay_cached,
                report.delay_backhaul,
                report.delay,
                sim_mean,
                sim_ci,
            )
        )
    return rows


def _cmd_kmax(cfg, sim, workers):
    q_hit = hit_probability(cfg.content)
    t1 = _backhaul_t1(cfg)
    kmax_a = ld.kmax_cached(q_hit, cfg.delivery, cfg.radio)
    kmax_b = dv.kmax_backhaul(q_hit, t1, cfg.delivery, cfg.radio)
    return [(q_hit, t1, kmax_a, kmax_b)]


def _cmd_scd(cfg, sim, workers):
    t1 = _backhaul_t1(cfg)
    report = dv.scd_total(cfg.deploy, cfg.radio, cfg.delivery, cfg.content, t1)
    return [
        (
            report.q_hit,
            t1,
            report.kmax_a,
            report.kmax_b,
            report.psi_a,
            report.psi_b,
            report.psi_total,
            report.regime,
        )
    ]


def _cmd_densities(cfg, sim, workers):
    q_hit = hit_probability(cfg.content)
    kmax_a = ld.kmax_cached(q_hit, cfg.delivery, cfg.radio)
    if kmax_a < 1:
        raise InfeasibleError("cached delivery infeasible even at load 1")
    s_max = bh.max_backhaul_load(cfg.radio, cfg.deploy, cfg.delivery.min_backhaul_rate)
    lam_s = ld.min_sbs_density(
        cfg.deploy.lambda_u, kmax_a, cfg.delivery.overload_rho, cfg.deploy.gamma_load
    )
    lam_m = bh.min_mbs_density(
        cfg.deploy.lambda_s, q_hit, s_max, cfg.delivery.overload_rho, cfg.deploy.gamma_load
    )
    return [(q_hit, kmax_a, s_max, lam_s, lam_m)]


def _cmd_backhaul_rate(cfg, sim, workers):
    s_o = cfg.experiment.s_o
    exact = bh.backhaul_rate_exact(cfg.radio, cfg.deploy, s_o)
    lower = bh.backhaul_rate_lower(cfg.radio, cfg.deploy, s_o)
    t1 = bh.backhaul_time(cfg.delivery.content_bits, exact)
    return [(s_o, cfg.deploy.antennas, exact, lower, t1)]


def _cmd_delay(cfg, sim, workers):
    t1 = _backhaul_t1(cfg)
    report = dv.avg_delay(
        cfg.deploy, cfg.radio, cfg.delivery, cfg.content, cfg.experiment.kmax_load, t1
    )
    rows = []
    for i in range(report.kmax_used):
        rows.append(
            (
                i + 1,
                float(report.pmf_weights[i]),
                float(report.e_ra_per_k[i]),
                float(report.e_rap_per_k[i]),
                report.t1,
                report.delay,
                report.eta_o,
                report.theta,
            )
        )
    return rows


def _cmd_hit_bounds(cfg, sim, workers):
    t1 = _backhaul_t1(cfg)
    q_hit = hit_probability(cfg.content)
    upper = ld.hit_upper_bound(cfg.delivery, cfg.radio)
    lower = dv.hit_lower_bound(t1, cfg.delivery, cfg.radio)
    return [(q_hit, upper, lower, t1, lower <= upper)]


def _cmd_regime(cfg, sim, workers):
    t1 = _backhaul_t1(cfg)
    report = dv.cache_size_regime(
        cfg.content, cfg.radio, cfg.delivery, cfg.deploy, t1
    )
    return [(report.regime, report.l_min, report.l_max, report.feasible, report.psi_approx)]


_HANDLERS = {
    "fig2": _cmd_fig2,
    "fig3": _cmd_fig3,
    "fig4": _cmd_fig4,
    "fig5": _cmd_fig5,
    "fig6": _cmd_fig6,
    "kmax": _cmd_kmax,
    "scd": _cmd_scd,
    "densities": _cmd_densities,
    "backhaul-rate": _cmd_backhaul_rate,
    "delay": _cmd_delay,
    "hit-bounds": _cmd_hit_bounds,
    "regime": _cmd_regime,
}

_SWEEPABLE = {"kmax", "scd", "densities", "backhaul-rate", "delay", "hit-bounds", "regime"}


def run(
    command: str,
    cfg: ExperimentConfig,
    out_path: str,
    no_sim: bool = False,
    workers: int = 1,
) -> str:
    """Evaluate one command and write its CSV; returns the output path."""
    if command not in _HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    sim = None if no_sim else cfg.sim
    if command in _SIM_COMMANDS and sim is None and not no_sim:
        raise ConfigError(
            f"command {command!r} needs the simulator; enable sim or pass --no-sim"
        )
    handler = _HANDLERS[command]
    if command in _SWEEPABLE:
        rows: list[tuple] = []
        if cfg.sweep is None:
            rows = [(None, *row) for row in handler(cfg, sim, workers)]
        else:
            for value in cfg.sweep.values:
                swept = apply_override(cfg, cfg.sweep.parameter, value)
                rows.extend(
                    (float(value), *row) for row in handler(swept, sim, workers)
                )
    else:
        rows = handler(cfg, sim, workers)
    _write_csv(out_path, _SCHEMAS[command], rows)
    return out_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hetcache",
        description="Delivery analysis and Monte Carlo validation for "
        "cache-enabled dense networks with massive-MIMO self-backhaul.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key-value config file (defaults apply if omitted)")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--seed", type=int, help="override the simulation seed")
    parser.add_argument("--trials", type=int, help="override the simulation trial count")
    parser.add_argument("--no-sim", action="store_true", help="analytic columns only")
    parser.add_argument("--workers", type=int, default=1, help="simulation worker count")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config) if args.config else default_config()
        if cfg.sim is not None and (args.seed is not None or args.trials is not None):
            updates = {}
            if args.seed is not None:
                updates["seed"] = args.seed
            if args.trials is not None:
                updates["trials"] = args.trials
            cfg = dataclasses.replace(cfg, sim=dataclasses.replace(cfg.sim, **updates))
        if args.workers < 1:
            raise ConfigError("workers: must be >= 1")
        run(args.command, cfg, args.out, no_sim=args.no_sim, workers=args.workers)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"write failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
