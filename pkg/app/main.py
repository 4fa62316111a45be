"""
Command-line entry point for LinGapE campaigns
"""

import functools
import logging
import os
import uuid

import click
import numpy as np

from app import __version__
from app.databases.results import make_session_factory, run_migrations
from app.services.bench.config_file import dump_instance, load_config, load_instance
from app.services.bench.reproduce import FIGURES, SCALES, ReproduceService
from app.services.bench.service import BenchService
from app.services.bench.store import RecordStore
from app.services.complexity.service import ComplexityService
from app.services.datasets.service import DatasetService
from app.services.instances.service import InstanceService
from app.utils.config import BENCH_OUTPUT_DIR, LOG_LEVEL, RESULTS_DATABASE_URL
from app.utils.exceptions import LinBanditError
from app.utils.metrics import CampaignMetrics
from app.utils.seeding import make_rng

# Set up logging
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def handle_errors(command):
    """Turn domain errors into a message and a non-zero exit status"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except LinBanditError as e:
            logger.error(f"❌ {e.detail}")
            click.echo(f"Error: {e.detail}", err=True)
            raise click.exceptions.Exit(e.exit_code)
    return wrapper


@click.group()
@click.version_option(__version__, prog_name="lingape-bench")
def cli():
    """Best-arm identification in linear bandits: LinGapE and XY baselines"""


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--output-dir", default=BENCH_OUTPUT_DIR, show_default=True)
@click.option("--store/--no-store", default=False,
              help="Also save the records in the results database")
@click.option("--database-url", default=RESULTS_DATABASE_URL,
              show_default=True)
@handle_errors
def run(config_path, output_dir, store, database_url):
    """Run the campaign described by CONFIG_PATH"""
    config = load_config(config_path)
    metrics = CampaignMetrics()
    records = BenchService.run_batch(config, metrics)

    name = os.path.splitext(os.path.basename(config_path))[0]
    files = ReproduceService.write_campaign(config, records, metrics,
                                           output_dir, name)
    records_path = os.path.join(output_dir, "records.jsonl")
    with open(records_path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(record.model_dump_json() + "\n")
    files.append(records_path)

    if store:
        campaign_id = str(uuid.uuid4())
        run_migrations(database_url)
        db = make_session_factory(database_url)()
        try:
            RecordStore.save_records(db, campaign_id,
                                     config.experiment.value, records)
        finally:
            db.close()
        click.echo(f"campaign {campaign_id}")

    for path in files:
        click.echo(path)


@cli.command()
@click.argument("figure", type=click.Choice(FIGURES))
@click.option("--scale", type=click.Choice(SCALES), default="ci",
              show_default=True)
@click.option("--output-dir", default=BENCH_OUTPUT_DIR, show_default=True)
@click.option("--dataset", default=None,
              help="Feature/outcome table for fig3")
@click.option("--repetitions", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@handle_errors
def reproduce(figure, scale, output_dir, dataset, repetitions, seed, workers):
    """Run a preset campaign for FIGURE"""
    overrides = {"repetitions": repetitions, "seed": seed, "workers": workers}
    files = ReproduceService.reproduce(figure, scale, output_dir, dataset,
                                       overrides)
    for path in files:
        click.echo(path)


@cli.command()
@click.argument("instance_path", type=click.Path(dir_okay=False))
@click.option("--epsilon", type=float, default=0.0, show_default=True)
@click.option("--delta", type=float, default=0.05, show_default=True)
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True)
@handle_errors
def complexity(instance_path, epsilon, delta, lam):
    """Print the complexities of the instance in INSTANCE_PATH as JSON"""
    instance = load_instance(instance_path)
    report = ComplexityService.report(instance, epsilon, lam, delta)
    click.echo(report.model_dump_json(indent=2))


@cli.command("surrogate-data")
@click.option("--rows", type=int, required=True)
@click.option("--dim", type=int, default=36, show_default=True)
@click.option("--out", "out_path", required=True)
@click.option("--seed", type=int, default=None)
@handle_errors
def surrogate_data(rows, dim, out_path, seed):
    """Write a synthetic feature/outcome table"""
    table, theta0 = DatasetService.generate_surrogate(rows, dim, seed)
    DatasetService.save_table(table, out_path)
    click.echo(f"{out_path}: {table.n_rows} rows, dim {table.dim}, "
               f"||theta0|| = {np.linalg.norm(theta0):.3f}")


@cli.command()
@click.argument("table_path", type=click.Path(dir_okay=False))
@click.option("--k", "k", type=int, required=True)
@click.option("--min-gap", type=float, default=0.05, show_default=True)
@click.option("--lambda-fit", type=float, default=0.01, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None,
              help="Write the instance file here")
@handle_errors
def ingest(table_path, k, min_gap, lambda_fit, seed, out_path):
    """Build a K-arm sign-flip instance from TABLE_PATH"""
    table = DatasetService.load_table(table_path)
    instance = InstanceService.build_real_instance(
        table, k, lambda_fit, min_gap, make_rng(seed) if seed is not None
        else None)
    gaps, best = ComplexityService.instance_gaps(instance)
    click.echo(f"K={instance.n_arms} d={instance.dim} S={instance.S:g} "
               f"best arm {best + 1}, smallest gap {gaps[best]:.4f}")
    if out_path:
        dump_instance(instance, out_path)
        click.echo(out_path)


if __name__ == "__main__":
    cli()
