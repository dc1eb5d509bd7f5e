"""
Command-line interface for pirls.

Exit codes: 0 success, 1 usage or I/O error, 2 iteration limit reached,
3 verification failed.
"""
import sys

import click
from pydantic import ValidationError

from ..config.logging import configure_logging
from ..core.exceptions import PirlsError
from ..core.models import SweepSpec
from ..services import solve_service, sweep_service

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ITERATION_LIMIT = 2
EXIT_VERIFICATION_FAILED = 3


class PirlsGroup(click.Group):
    """Click group that reports usage errors with exit code 1 instead of click's 2."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            code = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as exc:
            exc.show()
            code = EXIT_ERROR
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_ERROR
        if not standalone_mode:
            return code
        sys.exit(code if isinstance(code, int) else EXIT_OK)


def _fail(ctx: click.Context, exc: Exception) -> None:
    click.echo(f"Error: {exc}", err=True)
    ctx.exit(EXIT_ERROR)


def _parse_values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as exc:
        raise click.BadParameter(f"expected a comma-separated list of numbers, got {text!r}") from exc


@click.group(cls=PirlsGroup)
@click.version_option(version="0.1.0", prog_name="pirls")
@click.option("-v", "--verbose", is_flag=True, help="Show debug logging on stderr")
@click.option("-q", "--quiet", is_flag=True, help="Only log errors")
def cli(verbose, quiet):
    """pirls - p-IRLS solver for lp-norm regression."""
    configure_logging(quiet=quiet, verbose=verbose)


@cli.command()
@click.argument("instance_path", type=click.Path(dir_okay=False))
@click.option("--p", "p", type=click.FloatRange(min=2.0), default=None, help="Override the instance's p")
@click.option("--eps", "epsilon", type=click.FloatRange(min=0.0, max=1.0, min_open=True), default=None,
              help="Relative accuracy (default from PIRLS_EPSILON)")
@click.option("--max-iters", "max_iterations", type=click.IntRange(min=1), default=None, help="Iteration cap")
@click.option("--trace-out", type=click.Path(dir_okay=False), default=None, help="Per-iteration CSV trace")
@click.option("--solution-out", type=click.Path(dir_okay=False), default=None, help="Solution JSON for `verify`")
@click.option("--json", "as_json", is_flag=True, help="Print the full result as JSON")
@click.pass_context
def solve(ctx, instance_path, p, epsilon, max_iterations, trace_out, solution_out, as_json):
    """Solve a matrix or graph instance file."""
    try:
        result = solve_service.solve_file(
            instance_path,
            p=p,
            epsilon=epsilon,
            max_iterations=max_iterations,
            trace_path=trace_out,
            solution_path=solution_out,
        )
    except (PirlsError, OSError) as exc:
        _fail(ctx, exc)

    if as_json:
        click.echo(result.model_dump_json())
    else:
        click.echo(f"objective: {result.objective!r}")
        click.echo(f"iterations: {result.iterations}")
        click.echo(f"halvings: {result.halvings}")
        click.echo(f"converged: {str(result.converged).lower()}")
    ctx.exit(EXIT_OK if result.converged else EXIT_ITERATION_LIMIT)


@cli.command()
@click.argument("kind", type=click.Choice(["matrix", "graph"]))
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=0, show_default=True)
@click.option("--m", type=click.IntRange(min=1), default=None, help="Rows (matrix)")
@click.option("--n", type=click.IntRange(min=1), default=None, help="Columns (matrix)")
@click.option("--vertices", type=click.IntRange(min=2), default=None, help="Vertex count (graph)")
@click.option("--dim", type=click.IntRange(min=1), default=None, help="Point dimension (graph)")
@click.option("--k", type=click.IntRange(min=2), default=None, help="Nearest neighbours per vertex, itself included (graph)")
@click.option("--labels", type=click.IntRange(min=1), default=None, help="Labeled vertices (graph)")
@click.option("--p", "p", type=click.FloatRange(min=2.0), default=None, help="Norm exponent")
@click.pass_context
def generate(ctx, kind, out_path, seed, m, n, vertices, dim, k, labels, p):
    """Generate a random instance file."""
    if kind == "matrix":
        params = {"m": m, "n": n, "p": p}
        stray = {"vertices": vertices, "dim": dim, "k": k, "labels": labels}
    else:
        params = {"vertices": vertices, "dim": dim, "k": k, "labels": labels, "p": p}
        stray = {"m": m, "n": n}
    given = [f"--{name}" for name, value in stray.items() if value is not None]
    if given:
        _fail(ctx, PirlsError(f"{', '.join(given)} do not apply to {kind} instances"))

    try:
        instance = solve_service.generate_file(kind, seed, out_path, **params)
    except (PirlsError, OSError) as exc:
        _fail(ctx, exc)
    click.echo(f"Wrote {kind} instance to {out_path}")
    if kind == "graph":
        click.echo(f"vertices: {instance.num_vertices}, edges: {len(instance.edges)}")
    else:
        click.echo(f"m: {instance.m}, n: {instance.n}")


@cli.command()
@click.option("--kind", type=click.Choice(["matrix", "graph"]), default="matrix", show_default=True)
@click.option("--axis", type=click.Choice(["size", "p", "epsilon"]), required=True)
@click.option("--values", required=True, help="Comma-separated axis values, increasing (decreasing for epsilon)")
@click.option("--m", type=click.IntRange(min=1), default=400, show_default=True)
@click.option("--n", type=click.IntRange(min=1), default=300, show_default=True)
@click.option("--vertices", type=click.IntRange(min=3), default=1000, show_default=True)
@click.option("--p", "p", type=click.FloatRange(min=2.0), default=8.0, show_default=True)
@click.option("--eps", "epsilon", type=float, default=1e-8, show_default=True)
@click.option("--reps", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=0, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker cap (default PIRLS_THREADS)")
@click.option("--out", type=click.File("w"), default="-", help="CSV destination (default stdout)")
@click.pass_context
def sweep(ctx, kind, axis, values, m, n, vertices, p, epsilon, reps, seed, threads, out):
    """Run a one-axis parameter sweep and write CSV rows."""
    try:
        spec = SweepSpec(
            kind=kind,
            axis=axis,
            values=_parse_values(values),
            m=m,
            n=n,
            vertices=vertices,
            p=p,
            epsilon=epsilon,
            repetitions=reps,
            seed_base=seed,
        )
    except ValidationError as exc:
        _fail(ctx, PirlsError(f"invalid sweep: {exc.errors()[0]['msg']}"))

    try:
        sweep_service.run(spec, out, threads=threads)
    except (PirlsError, OSError) as exc:
        _fail(ctx, exc)


@cli.command()
@click.argument("instance_path", type=click.Path(dir_okay=False))
@click.argument("solution_path", type=click.Path(dir_okay=False))
@click.option("--tol", type=click.FloatRange(min=0.0, min_open=True), default=1e-8, show_default=True)
@click.pass_context
def verify(ctx, instance_path, solution_path, tol):
    """Check first-order optimality of a solution file."""
    try:
        certificate = solve_service.verify_files(instance_path, solution_path, tol)
    except (PirlsError, OSError) as exc:
        _fail(ctx, exc)

    click.echo(f"projected_gradient_norm: {certificate.projected_gradient_norm!r}")
    click.echo(f"constraint_violation: {certificate.constraint_violation!r}")
    click.echo(f"objective: {certificate.objective!r}")
    click.echo(f"passed: {str(certificate.passed).lower()}")
    ctx.exit(EXIT_OK if certificate.passed else EXIT_VERIFICATION_FAILED)


@cli.command()
def info():
    """Show the resolved configuration."""
    details = solve_service.get_info()
    click.echo("pirls configuration:")
    for key, value in details.items():
        click.echo(f"• {key}: {value}")


def main():
    """Main CLI entry point."""
    cli()


if __name__ == "__main__":
    main()
