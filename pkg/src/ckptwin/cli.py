"""Command-line front end.

Subcommands: ``analytic`` (closed-form periods and waste), ``simulate`` (one
run against one trace), ``table`` (the full strategy/platform/window grid),
``sweep`` (one axis walked, CSV out), and ``best-period`` (brute-force search
vs the closed form). Global flags select the fault law, predictor preset,
proactive-cost mode, seed, and output path; a flat JSON config file supplies
the same fields by name, with flags taking precedence.

Exit codes: 0 on success, 1 on invalid configuration or I/O failure, 2 when
the analytic model or a strategy is inapplicable under the requested
parameters (outside a sweep, where such cells are reported in-band).
"""

from __future__ import annotations

import json

import click

from .core import (
    SECONDS_PER_DAY,
    ConfigError,
    ModelValidityError,
    PolicyConfig,
    Strategy,
)
from .engine import ReplicationConfig, simulate
from .harness import (
    ExperimentConfig,
    analytic_policy,
    analytic_waste_at,
    emit_csv,
    run_sweep,
    run_table,
)
from .search import SearchSpec, best_period, best_period_analytic, make_trace_set
from .tracegen import generate

_STRATEGY_NAMES = [s.value for s in Strategy]


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Flat JSON config file; keys mirror the experiment config fields.",
)
@click.option("--seed", type=int, default=None, help="Base seed for trace generation.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output CSV path.")
@click.option("--dist", default=None, help="Fault law: exp | weibull:<shape> | uniform.")
@click.option(
    "--predictor", default=None, help="accurate | weak | '<precision>,<recall>'."
)
@click.option(
    "--cp-mode",
    type=click.Choice(sorted(("eq", "0.1", "2"))),
    default=None,
    help="Proactive checkpoint cost: eq (C), 0.1 (C/10), or 2 (2C).",
)
@click.option("--reps", type=int, default=None, help="Replications per cell.")
@click.pass_context
def cli(ctx, config_path, seed, out, dist, predictor, cp_mode, reps):
    """Checkpoint scheduling under fault-prediction windows."""
    overrides = {
        "base_seed": seed,
        "out_path": out,
        "dist": dist,
        "predictor": predictor,
        "cp_mode": cp_mode,
        "n_reps": reps,
    }
    ctx.obj = {
        "config_path": config_path,
        "overrides": {k: v for k, v in overrides.items() if v is not None},
    }


def _experiment_config(ctx_obj: dict, **extra) -> ExperimentConfig:
    values: dict = {}
    path = ctx_obj.get("config_path")
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        values.update(loaded)
    values.update(ctx_obj.get("overrides", {}))
    values.update({k: v for k, v in extra.items() if v is not None})
    return ExperimentConfig.from_mapping(values)


def _echo_pairs(pairs) -> None:
    click.echo(" ".join(f"{key}={value}" for key, value in pairs))


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@cli.command()
@click.option("--n", "n_procs", type=int, default=None, help="Processor count.")
@click.option("--i", "i_window", type=float, default=None, help="Prediction window (s).")
@click.option("--t-r", "t_r", type=float, default=None, help="Evaluate this period instead of the optimum.")
@click.option(
    "--strategy", type=click.Choice(_STRATEGY_NAMES), default=None,
    help="Restrict output to one strategy.",
)
@click.pass_obj
def analytic(ctx_obj, n_procs, i_window, t_r, strategy):
    """Closed-form optimal periods and expected waste."""
    cfg = _experiment_config(ctx_obj)
    n = n_procs if n_procs is not None else cfg.n_list[0]
    i_win = i_window if i_window is not None else cfg.i_list[0]
    platform = cfg.platform_for(n)
    _echo_pairs(
        [
            ("n_procs", n),
            ("mu_s", repr(platform.mtbf)),
            ("t_base_s", repr(cfg.t_base_for(n))),
            ("i_window_s", repr(i_win)),
        ]
    )
    targets = [Strategy(strategy)] if strategy else list(Strategy)
    single = strategy is not None
    for strat in targets:
        predictor = cfg.predictor_for(i_win) if strat.uses_predictions else None
        try:
            policy, clamped = analytic_policy(strat, platform, predictor)
            if t_r is not None:
                policy = PolicyConfig(
                    strat, t_r, t_proactive=policy.t_proactive,
                    trust_prob=policy.trust_prob,
                )
                policy.check(platform, predictor)
        except (ConfigError, ModelValidityError) as exc:
            if single:
                raise
            _echo_pairs([("strategy", strat.value), ("status", f"{type(exc).__name__}")])
            continue
        waste = analytic_waste_at(
            strat, policy.t_regular, policy.t_proactive, platform, predictor
        )
        _echo_pairs(
            [
                ("strategy", strat.value),
                ("t_regular_s", _fmt(policy.t_regular)),
                ("t_proactive_s", _fmt(policy.t_proactive)),
                ("analytic_waste", _fmt(waste)),
                ("clamped", "true" if clamped else "false"),
            ]
        )


@cli.command("simulate")
@click.option("--strategy", type=click.Choice(_STRATEGY_NAMES), required=True)
@click.option("--n", "n_procs", type=int, default=None, help="Processor count.")
@click.option("--i", "i_window", type=float, default=None, help="Prediction window (s).")
@click.option("--t-r", "t_r", type=float, default=None, help="Regular period (default: closed-form optimum).")
@click.option("--t-p", "t_p", type=float, default=None, help="Proactive period (default: closed-form optimum).")
@click.option("--q", "trust", type=float, default=None, help="Trust probability override.")
@click.option("--horizon", type=float, default=None, help="Trace horizon (s).")
@click.pass_obj
def simulate_cmd(ctx_obj, strategy, n_procs, i_window, t_r, t_p, trust, horizon):
    """Simulate one job on one generated trace and print the result fields."""
    cfg = _experiment_config(ctx_obj)
    strat = Strategy(strategy)
    n = n_procs if n_procs is not None else cfg.n_list[0]
    i_win = i_window if i_window is not None else cfg.i_list[0]
    platform = cfg.platform_for(n)
    t_base = cfg.t_base_for(n)
    predictor = cfg.predictor_for(i_win) if strat.uses_predictions else None
    policy, _ = analytic_policy(strat, platform, predictor)
    policy = PolicyConfig(
        strat,
        t_r if t_r is not None else policy.t_regular,
        t_proactive=t_p if t_p is not None else policy.t_proactive,
        trust_prob=trust if trust is not None else policy.trust_prob,
    )
    policy.check(platform, predictor)
    rep_cfg = ReplicationConfig(
        platform=platform,
        dist=cfg.fault_dist(),
        t_base=t_base,
        predictor=predictor,
        uniform_false=cfg.uniform_false,
    )
    span = horizon if horizon is not None else 2.5 * t_base
    trace = generate(rep_cfg.trace_config(), span, cfg.base_seed)
    result = simulate(policy, trace, t_base, platform)
    _echo_pairs(
        [
            ("strategy", strat.value),
            ("seed", cfg.base_seed),
            ("t_regular_s", repr(policy.t_regular)),
            ("t_proactive_s", _fmt(policy.t_proactive)),
            ("trust_prob", repr(policy.trust_prob)),
            ("makespan_s", repr(result.makespan)),
            ("makespan_days", repr(result.makespan / SECONDS_PER_DAY)),
            ("waste", repr(result.waste)),
            ("lost_work_s", repr(result.lost_work)),
            ("unpredicted_faults", result.n_unpredicted_faults),
            ("true_predictions", result.n_true_predictions),
            ("false_predictions", result.n_false_predictions),
            ("predictions_trusted", result.n_predictions_trusted),
            ("regular_ckpts", result.n_regular_ckpts),
            ("proactive_ckpts", result.n_proactive_ckpts),
        ]
    )


@cli.command()
@click.pass_obj
def table(ctx_obj):
    """Run the full table grid and write it as CSV."""
    cfg = _experiment_config(ctx_obj)
    rows = run_table(cfg)
    path = cfg.out_path or "table.csv"
    emit_csv(rows, path, cfg)
    for row in rows:
        if row.reference_days is None or row.makespan_days is None:
            continue
        _echo_pairs(
            [
                ("strategy", row.strategy),
                ("n_procs", row.n_procs),
                ("i_window_s", _fmt(row.i_window)),
                ("makespan_days", f"{row.makespan_days:.2f}"),
                ("reference_days", f"{row.reference_days:.2f}"),
                ("abs_err_days", f"{row.abs_err_days:.2f}"),
            ]
        )
    click.echo(f"wrote {len(rows)} rows to {path}")


@cli.command()
@click.option(
    "--axis", type=click.Choice(["n", "tr", "i"]), required=True,
    help="Sweep axis: processor count, regular period, or window length.",
)
@click.option("--values", default=None, help="Comma-separated axis values.")
@click.option(
    "--best-period", "with_best", is_flag=True, default=False,
    help="Add brute-force best-period columns.",
)
@click.pass_obj
def sweep(ctx_obj, axis, values, with_best):
    """Walk one axis and write analytic vs simulated waste as CSV."""
    cfg = _experiment_config(ctx_obj)
    axis_values = None
    if values:
        try:
            axis_values = [float(v) for v in values.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --values list: {values!r}") from exc
    rows = run_sweep(cfg, axis, axis_values, include_best_period=with_best)
    path = cfg.out_path or f"sweep_{axis}.csv"
    emit_csv(rows, path, cfg)
    n_failed = sum(1 for row in rows if row.status != "ok")
    click.echo(f"wrote {len(rows)} rows to {path} ({n_failed} cells skipped)")


@cli.command("best-period")
@click.option("--strategy", type=click.Choice(_STRATEGY_NAMES), required=True)
@click.option("--n", "n_procs", type=int, default=None, help="Processor count.")
@click.option("--i", "i_window", type=float, default=None, help="Prediction window (s).")
@click.option("--traces", type=int, default=20, help="Shared evaluation traces.")
@click.option("--grid", type=int, default=64, help="Coarse grid points.")
@click.option("--rounds", type=int, default=3, help="Refinement rounds.")
@click.pass_obj
def best_period_cmd(ctx_obj, strategy, n_procs, i_window, traces, grid, rounds):
    """Brute-force the best regular period and compare to the closed form."""
    cfg = _experiment_config(ctx_obj)
    strat = Strategy(strategy)
    n = n_procs if n_procs is not None else cfg.n_list[0]
    i_win = i_window if i_window is not None else cfg.i_list[0]
    platform = cfg.platform_for(n)
    t_base = cfg.t_base_for(n)
    predictor = cfg.predictor_for(i_win) if strat.uses_predictions else None
    analytic_pol, _ = analytic_policy(strat, platform, predictor)
    rep_cfg = ReplicationConfig(
        platform=platform,
        dist=cfg.fault_dist(),
        t_base=t_base,
        predictor=predictor,
        uniform_false=cfg.uniform_false,
    )
    spec = SearchSpec(
        t_r_range=(1.1 * platform.c_regular, min(20.0 * platform.mtbf, t_base)),
        n_grid=grid,
        refinement_rounds=rounds,
        trace_set=make_trace_set(rep_cfg, traces, cfg.base_seed),
        t_base=t_base,
        extra_candidates=(analytic_pol.t_regular,),
    )
    t_star, w_star = best_period(strat, platform, predictor, spec)
    t_form, w_form = best_period_analytic(strat, platform, predictor, spec)
    _echo_pairs(
        [
            ("strategy", strat.value),
            ("searched_t_regular_s", repr(t_star)),
            ("searched_waste", repr(w_star)),
            ("analytic_t_regular_s", repr(t_form)),
            ("analytic_waste", repr(w_form)),
        ]
    )


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, prog_name="ckptwin", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except ModelValidityError as exc:
        click.echo(f"model validity error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(str(exc), err=True)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
