"""
mcalloc command-line entrypoint
- generate: synthetic p-values from the uniform/Beta mixture.
- allocate: KT, greedy, Thompson or constant sample budgets (or all side by side).
- report:   theoretical vs. empirical misclassifications.
- converge: correct-classification ratio of Thompson over a budget grid.
- profile:  g_i(k) for one hypothesis, for plotting.
Every output file gets a `<file>.meta.json` sidecar with its provenance.
"""
# main.py
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import click
from pydantic import ValidationError

from mc_allocation import __version__
from mc_allocation.application import experiments
from mc_allocation.application.allocators import build_allocator
from mc_allocation.application.dto.reports import Provenance
from mc_allocation.application.dto.requests import CliConfig
from mc_allocation.application.hypotheses import generate_mixture
from mc_allocation.config.experiment import Estimator
from mc_allocation.domain.errors import AllocationError, InvalidInputError
from mc_allocation.domain.values import MixtureConfig, PValueSet
from mc_allocation.infrastructure import storage
from mc_allocation.infrastructure.rng import RNG_ID
from mc_allocation.logging_setup import configure_logging
from mc_allocation.settings import Settings, load_settings

log = logging.getLogger("mc_allocation.cli")

_REPORT_LABEL = {"kt": "optimal_kt", "greedy": "greedy", "thompson": "thompson", "constant": "constant"}


@dataclass
class CliContext:
    settings: Settings
    argv: list[str] = field(default_factory=list)

    def provenance(self, cfg: CliConfig, **kwargs: Any) -> Provenance:
        return Provenance(version=__version__, command=["mcalloc", *self.argv], seed=cfg.seed, rng=RNG_ID, **kwargs)


def _validated(**fields: Any) -> CliConfig:
    """CliConfig from raw options; validation errors name the offending field."""
    try:
        return CliConfig(**fields)
    except ValidationError as exc:
        err = exc.errors()[0]
        name = ".".join(str(part) for part in err.get("loc", ())) or None
        raise InvalidInputError(err.get("msg", str(exc)), field=name) from exc


def _threshold(ctx: CliContext, alpha: float | None, alpha_star: float | None) -> dict[str, float | None]:
    if alpha is None and alpha_star is None:
        alpha_star = ctx.settings.experiment.alpha_star
    return {"alpha": alpha, "alpha_star": alpha_star}


def _load_pvalues(cfg: CliConfig) -> PValueSet:
    if cfg.input is None:
        raise InvalidInputError("a p-value CSV is required", field="input")
    values = storage.read_pvalues(cfg.input)
    return PValueSet(values, cfg.effective_alpha(values.size))


def _with_overrides(settings: Settings, cfg: CliConfig) -> Settings:
    """Settings with CLI flags applied on top (flags win over env and defaults)."""
    thompson = settings.thompson.model_copy(
        update={
            k: v
            for k, v in {
                "iterations": cfg.iterations,
                "posterior_draws": cfg.posterior_draws,
                "warm_up": cfg.warm_up or None,
            }.items()
            if v is not None
        }
    )
    greedy = settings.greedy.model_copy(update={"literal_argmax": cfg.literal_argmax or settings.greedy.literal_argmax})
    return settings.model_copy(update={"thompson": thompson, "greedy": greedy})


def threshold_options(fn: Callable) -> Callable:
    fn = click.option("--alpha-star", "alpha_star", type=float, default=None, help="Family-wise level; alpha = alpha* / m.")(fn)
    fn = click.option("--alpha", type=float, default=None, help="Absolute Bonferroni threshold.")(fn)
    return fn


def output_options(fn: Callable) -> Callable:
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)(fn)
    fn = click.option("--seed", type=int, default=None, help="Seed; defaults to the configured experiment seed.")(fn)
    return fn


def _seed(ctx: CliContext, seed: int | None) -> int:
    return ctx.settings.experiment.seed if seed is None else seed


@click.group(name="mcalloc")
@click.version_option(__version__, prog_name="mcalloc")
@click.option("--log-level", default=None, help="Overrides APP__LOG_LEVEL.")
@click.pass_context
def cli(ctx: click.Context, log_level: str | None) -> None:
    """Monte-Carlo sample allocation for Bonferroni-tested hypotheses."""
    settings = load_settings()
    configure_logging(log_level or settings.LOG_LEVEL, settings.NOISY_LEVEL)
    argv = ctx.meta.get("mcalloc.argv", [])
    ctx.obj = CliContext(settings=settings, argv=list(argv))


@cli.command()
@click.option("--m", "m", type=int, default=None)
@click.option("--pi0", type=float, default=None)
@click.option("--beta-shape1", type=float, default=None)
@click.option("--beta-shape2", type=float, default=None)
@click.option("--sorted/--unsorted", "sort_output", default=True, show_default=True)
@threshold_options
@output_options
@click.pass_obj
def generate(obj: CliContext, m, pi0, beta_shape1, beta_shape2, sort_output, alpha, alpha_star, seed, out, fmt):
    """Write m p-values drawn from pi0 * U[0,1] + (1 - pi0) * Beta(a, b)."""
    exp = obj.settings.experiment
    cfg = _validated(
        command="generate",
        out=out,
        fmt=fmt,
        m=exp.m if m is None else m,
        pi0=exp.pi0 if pi0 is None else pi0,
        seed=_seed(obj, seed),
        sort_output=sort_output,
        **_threshold(obj, alpha, alpha_star),
    )
    mixture = MixtureConfig(
        m=cfg.m,
        pi0=cfg.pi0,
        beta_shape1=exp.beta_shape1 if beta_shape1 is None else beta_shape1,
        beta_shape2=exp.beta_shape2 if beta_shape2 is None else beta_shape2,
        seed=cfg.seed,
        sort_output=cfg.sort_output,
    )
    p = generate_mixture(mixture, cfg.effective_alpha(mixture.m))
    storage.write_pvalues(cfg.out, p, cfg.fmt)
    storage.write_metadata(
        cfg.out,
        obj.provenance(
            cfg,
            alpha=p.alpha,
            m=p.m,
            parameters={
                "pi0": mixture.pi0,
                "beta_shape1": mixture.beta_shape1,
                "beta_shape2": mixture.beta_shape2,
                "sorted": mixture.sort_output,
                "nulls": mixture.null_count,
            },
        ),
    )
    log.info("p-values written", extra={"out": str(cfg.out), "m": p.m, "seed": cfg.seed})


@cli.command()
@click.option("--input", "input_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--strategy", type=click.Choice(["kt", "greedy", "thompson", "constant", "all"]), default="kt", show_default=True)
@click.option("--K", "budget", type=float, default=None, help="Total budget; scientific notation accepted.")
@click.option("--it", "iterations", type=int, default=None)
@click.option("--d", "posterior_draws", type=int, default=None)
@click.option("--warm-up", is_flag=True, default=False)
@click.option("--literal-argmax", is_flag=True, default=False, help="Greedy compatibility flag: rank by d/b literally.")
@click.option("--oracle", type=click.Choice(["simulate"]), default="simulate", show_default=True)
@threshold_options
@output_options
@click.pass_obj
def allocate(obj: CliContext, input_path, strategy, budget, iterations, posterior_draws, warm_up, literal_argmax, oracle,
             alpha, alpha_star, seed, out, fmt):
    """Compute a sample allocation for the p-values in --input."""
    cfg = _validated(
        command="allocate",
        input=input_path,
        out=out,
        fmt=fmt,
        strategy=strategy,
        K=obj.settings.experiment.budget if budget is None else budget,
        it=iterations,
        d=posterior_draws,
        warm_up=warm_up,
        literal_argmax=literal_argmax,
        seed=_seed(obj, seed),
        **_threshold(obj, alpha, alpha_star),
    )
    p = _load_pvalues(cfg)
    settings = _with_overrides(obj.settings, cfg)

    if cfg.strategy == "all":
        budget_int = cfg.integer_budget()
        cmp = experiments.compare_allocations(p, budget_int, solver=settings.solver, greedy=settings.greedy)
        storage.write_allocation_table(
            cfg.out,
            p,
            {
                "k_kt_continuous": cmp.kt.allocation.budgets,
                "k_kt_rounded": cmp.kt_rounded.budgets,
                "k_greedy": cmp.greedy.allocation.budgets,
                "k_constant": cmp.constant.budgets,
            },
            cfg.fmt,
        )
        parameters = {
            "strategy": "all",
            "kt": experiments.kt_parameters(cmp.kt, settings.solver),
            "greedy": experiments.greedy_parameters(cmp.greedy),
        }
        total: int | float = budget_int
    else:
        total = cfg.budget if cfg.strategy == "kt" else cfg.integer_budget()
        allocator = build_allocator(cfg.strategy, settings=settings, seed=cfg.seed)
        result = allocator.allocate(p, total)
        if cfg.strategy == "thompson":
            storage.write_thompson_state(cfg.out, result.detail.state, cfg.fmt)
        else:
            storage.write_allocation(cfg.out, p, result.allocation, cfg.fmt)
        parameters = {"strategy": cfg.strategy, "oracle": oracle, **result.metadata}
    storage.write_metadata(cfg.out, obj.provenance(cfg, alpha=p.alpha, m=p.m, K=total, parameters=parameters))
    log.info("allocation written", extra={"out": str(cfg.out), "strategy": cfg.strategy, "K": total})


@cli.command()
@click.option("--input", "input_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--allocation", "allocation_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Precomputed allocation CSV to evaluate instead of running the protocol.")
@click.option("--strategy", type=click.Choice(["kt", "greedy", "thompson", "constant"]), default="constant",
              help="Label for a precomputed allocation.")
@click.option("--K", "budget", type=float, default=None)
@click.option("--r", "repetitions", type=int, default=None)
@click.option("--estimator", type=click.Choice([e.value for e in Estimator]), default=None)
@click.option("--include-greedy", is_flag=True, default=False)
@click.option("--it", "iterations", type=int, default=None)
@click.option("--d", "posterior_draws", type=int, default=None)
@click.option("--warm-up", is_flag=True, default=False)
@threshold_options
@output_options
@click.pass_obj
def report(obj: CliContext, input_path, allocation_path, strategy, budget, repetitions, estimator, include_greedy,
           iterations, posterior_draws, warm_up, alpha, alpha_star, seed, out, fmt):
    """Theoretical vs. empirical misclassifications (the r-repetition protocol)."""
    exp = obj.settings.experiment
    cfg = _validated(
        command="report",
        input=input_path,
        allocation_input=allocation_path,
        out=out,
        fmt=fmt,
        strategy=strategy,
        K=exp.budget if budget is None else budget,
        r=exp.repetitions if repetitions is None else repetitions,
        estimator=exp.estimator if estimator is None else estimator,
        it=iterations,
        d=posterior_draws,
        warm_up=warm_up,
        seed=_seed(obj, seed),
        **_threshold(obj, alpha, alpha_star),
    )
    p = _load_pvalues(cfg)
    settings = _with_overrides(obj.settings, cfg)

    if cfg.allocation_input is not None:
        allocation = storage.read_allocation(cfg.allocation_input)
        if allocation.m != p.m:
            raise InvalidInputError(f"{allocation.m} budgets for {p.m} p-values", field="allocation")
        rep = experiments.misclassification_report(
            _REPORT_LABEL[cfg.strategy], p, allocation, int(allocation.total()), cfg.repetitions, cfg.seed, cfg.estimator
        )
        rep = rep.model_copy(update={"allocation_file": str(cfg.allocation_input)})
        reports = [rep]
    else:
        reports = experiments.table1_protocol(
            p,
            cfg.integer_budget(),
            cfg.repetitions,
            seed=cfg.seed,
            solver=settings.solver,
            thompson_settings=settings.thompson,
            greedy=settings.greedy,
            estimator=cfg.estimator,
            include_greedy=include_greedy,
        )

    if cfg.fmt == "json":
        storage.write_json(cfg.out, reports)
    else:
        storage.write_rows(
            cfg.out,
            ("strategy", "theoretical", "theoretical_continuous", "empirical_mean", "r", "estimator"),
            (
                (
                    rep.strategy,
                    rep.theoretical,
                    "" if rep.theoretical_continuous is None else rep.theoretical_continuous,
                    rep.empirical_mean,
                    rep.r,
                    rep.estimator.value,
                )
                for rep in reports
            ),
        )
    storage.write_metadata(
        cfg.out,
        obj.provenance(
            cfg,
            alpha=p.alpha,
            m=p.m,
            K=reports[0].budget,
            parameters={"estimator": cfg.estimator.value, "r": cfg.repetitions, "strategies": [r.strategy for r in reports]},
        ),
    )
    for rep in reports:
        click.echo(f"{rep.strategy}\ttheoretical={rep.theoretical!r}\tempirical_mean={rep.empirical_mean!r}")


@cli.command()
@click.option("--input", "input_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="p-value CSV; without it a mixture is generated from --m/--pi0/--seed.")
@click.option("--m", "m", type=int, default=None)
@click.option("--pi0", type=float, default=None)
@click.option("--k-min", type=int, default=None)
@click.option("--k-max", type=int, default=None)
@click.option("--steps", type=int, default=None)
@click.option("--full-grid", is_flag=True, default=False, help="K from 1e5 to 1e7 in 100 steps.")
@click.option("--r", "repetitions", type=int, default=None)
@click.option("--estimator", type=click.Choice([e.value for e in Estimator]), default=None)
@click.option("--it", "iterations", type=int, default=None)
@click.option("--d", "posterior_draws", type=int, default=None)
@click.option("--threads", type=int, default=None, help="Worker threads; default is available parallelism.")
@threshold_options
@output_options
@click.pass_obj
def converge(obj: CliContext, input_path, m, pi0, k_min, k_max, steps, full_grid, repetitions, estimator, iterations,
             posterior_draws, alpha, alpha_star, seed, threads, out, fmt):
    """Quantiles of the correct-classification ratio over a log-spaced K grid."""
    exp = obj.settings.experiment
    if full_grid:
        grid_defaults = (exp.full_grid_k_min, exp.full_grid_k_max, exp.full_grid_steps)
    else:
        grid_defaults = (exp.grid_k_min, exp.grid_k_max, exp.grid_steps)
    cfg = _validated(
        command="converge",
        input=input_path,
        out=out,
        fmt=fmt,
        m=exp.m if m is None else m,
        pi0=exp.pi0 if pi0 is None else pi0,
        k_min=grid_defaults[0] if k_min is None else k_min,
        k_max=grid_defaults[1] if k_max is None else k_max,
        steps=grid_defaults[2] if steps is None else steps,
        full_grid=full_grid,
        r=exp.repetitions if repetitions is None else repetitions,
        estimator=exp.estimator if estimator is None else estimator,
        it=iterations,
        d=posterior_draws,
        seed=_seed(obj, seed),
        threads=threads if threads is not None else exp.threads,
        **_threshold(obj, alpha, alpha_star),
    )
    if cfg.input is not None:
        p = _load_pvalues(cfg)
    else:
        mixture = MixtureConfig(
            m=cfg.m, pi0=cfg.pi0, beta_shape1=exp.beta_shape1, beta_shape2=exp.beta_shape2, seed=cfg.seed
        )
        p = generate_mixture(mixture, cfg.effective_alpha(cfg.m))
    settings = _with_overrides(obj.settings, cfg)
    grid = experiments.budget_grid(cfg.k_min, cfg.k_max, cfg.steps)
    points = experiments.convergence_study(
        p,
        grid,
        cfg.repetitions,
        seed=cfg.seed,
        solver=settings.solver,
        thompson_settings=settings.thompson,
        estimator=cfg.estimator,
        threads=cfg.threads,
    )
    storage.write_convergence(cfg.out, points, cfg.fmt)
    storage.write_metadata(
        cfg.out,
        obj.provenance(
            cfg,
            alpha=p.alpha,
            m=p.m,
            parameters={
                "grid": grid,
                "r": cfg.repetitions,
                "estimator": cfg.estimator.value,
                "it": settings.thompson.iterations,
                "d": settings.thompson.posterior_draws,
                "solver": settings.solver.model_dump(),
            },
        ),
    )
    log.info("convergence study written", extra={"out": str(cfg.out), "points": len(points)})


@cli.command()
@click.option("--p", "p_value", type=float, required=True)
@click.option("--k-max", "k_max", type=int, required=True)
@click.option("--m", "m", type=int, default=None, help="Divisor for --alpha-star.")
@threshold_options
@output_options
@click.pass_obj
def profile(obj: CliContext, p_value, k_max, m, alpha, alpha_star, seed, out, fmt):
    """g_i(k) for k = 0..k_max."""
    cfg = _validated(
        command="profile",
        out=out,
        fmt=fmt,
        p=p_value,
        profile_k_max=k_max,
        m=obj.settings.experiment.m if m is None else m,
        seed=_seed(obj, seed),
        **_threshold(obj, alpha, alpha_star),
    )
    alpha_eff = cfg.effective_alpha(cfg.m)
    rows = experiments.profile_g(cfg.p, alpha_eff, cfg.profile_k_max)
    storage.write_profile(cfg.out, rows, cfg.fmt)
    storage.write_metadata(
        cfg.out,
        obj.provenance(cfg, alpha=alpha_eff, parameters={"p": cfg.p, "k_max": cfg.profile_k_max}),
    )


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and return its exit code (0 ok, 1 config, 2 I/O, 3 infeasible, 4 convergence)."""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        with cli.make_context("mcalloc", args) as ctx:
            ctx.meta["mcalloc.argv"] = args
            result = cli.invoke(ctx)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except AllocationError as exc:
        log.error("command failed", extra={"error": type(exc).__name__, "exit_code": exc.exit_code})
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
