"""Command-line interface.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 training failure.
"""

from __future__ import annotations

import functools
import logging
import sys
import warnings

import click

from . import pipeline, synthetic
from .errors import UavIdsError


def _common(func):
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), help="TOML run configuration.")
    @click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory (overrides config).")
    @click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Seed for split, autoencoder and classifiers.")
    @click.option("--dataset", type=click.Path(dir_okay=False), help="Dataset CSV (overrides config).")
    @click.option("--label-column", help="Name of the class label column.")
    @functools.wraps(func)
    def wrapper(config_path, out_dir, seed, dataset, label_column, **kwargs):
        cfg = pipeline.load_config(
            config_path, out_dir=out_dir, seed=seed, dataset=dataset, label_column=label_column
        )
        n = kwargs.pop("n", None)
        if n is not None:
            cfg.n_values = [n]
        return func(pipeline.Run(cfg), **kwargs)

    return wrapper


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase log verbosity.")
def cli(verbose):
    """Autoencoder-based intrusion detection for UAV cyber traffic."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("uavids").setLevel(min(level, logging.INFO))


@cli.command()
@_common
def preprocess(run):
    """Drop columns, encode, split, impute and scale the dataset."""
    pipeline.cmd_preprocess(run)
    click.echo(f"preprocessed -> {run.out / 'preprocess'}")


@cli.command("train-ae")
@click.option("--n", type=int, help="Bottleneck size (default: every configured N).")
@_common
def train_ae(run):
    """Train the autoencoder for each N."""
    for n in run.config.n_values:
        pipeline.cmd_train_ae(run, n)
        click.echo(f"autoencoder N={n} -> {run.out / f'n{n}' / 'ae_model.json'}")


@cli.command()
@click.option("--n", type=int, help="Bottleneck size (default: every configured N).")
@_common
def extract(run):
    """Encode train/test features into latent CSVs."""
    for n in run.config.n_values:
        pipeline.cmd_extract(run, n)
        click.echo(f"latent features N={n} -> {run.out / f'n{n}'}")


@cli.command("train-eval")
@click.option("--n", type=int, help="Bottleneck size (default: every configured N).")
@click.option("--task", type=click.Choice(["binary", "multiclass"]), help="Task (default: configured tasks).")
@_common
def train_eval(run, task):
    """Train and evaluate every configured classifier."""
    tasks = [task] if task else run.config.tasks
    for n in run.config.n_values:
        for t in tasks:
            pipeline.cmd_train_eval(run, n, t)
            click.echo((run.out / f"n{n}" / t / "table.md").read_text())


@cli.command()
@_common
def compare(run):
    """Render model tables and the comparison against baseline numbers."""
    pipeline.cmd_compare(run)
    click.echo((run.out / "tables.md").read_text())


@cli.command("run-all")
@click.option("--n", type=int, help="Restrict to a single bottleneck size.")
@_common
def run_all(run):
    """Run every stage; stages with unchanged inputs are skipped."""
    pipeline.cmd_run_all(run)
    click.echo((run.out / "tables.md").read_text())


@cli.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--records", default=10_000, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--separation", default=3.0, show_default=True)
def synth(path, records, seed, separation):
    """Write a synthetic 5-class dataset shaped like the UAV cyber data."""
    synthetic.write_csv(path, n_records=records, seed=seed, separation=separation)
    click.echo(f"wrote {records} records -> {path}")


def main(argv=None) -> int:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            logging.captureWarnings(True)
            cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except UavIdsError as exc:
        stage = getattr(exc, "stage", None)
        where = f" in stage {stage}" if stage else ""
        click.echo(f"error{where}: {type(exc).__name__}: {exc}", err=True)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
