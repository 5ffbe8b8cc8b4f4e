"""
Module for orchestrating the analyze, simulate and pool pipelines.
"""
import logging
import time

# Import project modules
import config
from core.grid import Orientation
from extractors.csv_extractor import extract_dataset_from_csv
from extractors.grid_extractor import extract_grid_from_csv
from loaders.csv_exporter import export_grid_to_csv, export_records_to_csv
from loaders.json_exporter import export_to_json
from loaders.sql_loader import load_summaries_to_sqlite
from pooling.dispatch import pool_grid
from run_config import RunConfig
from simlab.battery import apply_overrides, default_battery, run_battery
from simlab.scenarios import load_scenario
from simlab.study import run_study
from validators.data_validator import validate_analysis_inputs

logger = logging.getLogger(__name__)

RUN_COLUMNS = ["seed", "config_hash", "version"]


class Task:
    """Simple class to represent one pipeline step."""

    def __init__(self, name, function, **kwargs):
        """
        Initialize a task.

        Args:
            name (str): Task name
            function (callable): Function to execute
            **kwargs: Arguments to pass to the function
        """
        self.name = name
        self.function = function
        self.kwargs = kwargs
        self.result = None
        self.success = None
        self.duration = None

    def run(self):
        """Run the task, log its duration and re-raise any failure."""
        logger.info(f"Starting task: {self.name}")
        start_time = time.perf_counter()

        try:
            self.result = self.function(**self.kwargs)
            self.success = True
            logger.info(f"Task completed successfully: {self.name}")
        except Exception as e:
            self.success = False
            logger.error(f"Task failed: {self.name} - {e}")
            raise
        finally:
            self.duration = time.perf_counter() - start_time
            logger.info(f"Task duration: {self.name} - {self.duration:.2f} seconds")

        return self.result


def _stamp(records, run: RunConfig, config_hash):
    return [{**record, "seed": run.seed, "config_hash": config_hash, "version": config.VERSION}
            for record in records]


def write_results(records, columns, run: RunConfig, config_hash):
    """
    Write result rows as CSV or JSON; both carry seed, config hash and version.

    Returns:
        str: Path written
    """
    records = _stamp(records, run, config_hash)
    if run.format == "json":
        payload = {
            "command": run.command,
            "seed": run.seed,
            "config_hash": config_hash,
            "version": config.VERSION,
            "results": [{k: r[k] for k in columns} for r in records],
        }
        return Task("Export JSON", export_to_json, payload=payload, file_path=run.out).run()
    return Task("Export CSV", export_records_to_csv, records=records,
                columns=list(columns) + RUN_COLUMNS, file_path=run.out).run()


def run_analysis_pipeline(run: RunConfig, config_hash):
    """
    Ingest a CSV, run the engine the method needs, pool and write the result.

    Returns:
        PooledResult: The pooled result
    """
    logger.info("Starting analysis pipeline")
    imputer = run.imputer_spec()
    analyzer = run.analyzer_spec()
    spec = run.method_spec()

    data = Task("Extract dataset", extract_dataset_from_csv, file_path=run.data_path).run()
    Task("Validate inputs", validate_analysis_inputs, data=data, imputer=imputer, analyzer=analyzer).run()
    battery_run = Task(
        f"Run {spec.label}", run_battery,
        data=data, imputer=imputer, analyzer=analyzer, battery=[spec], seed=run.seed,
        alpha=run.alpha, n_jobs=run.n_jobs, point=run.point,
    ).run()
    result = battery_run.results[spec]

    if run.grid_out:
        orientation = Orientation.BOOTSTRAP_OUTER if spec.method.bootstraps_first else Orientation.IMPUTATION_OUTER
        Task("Export grid", export_grid_to_csv, grid=battery_run.grids[orientation], file_path=run.grid_out).run()

    write_results([result.to_record()], config.POOLED_RESULT_COLUMNS, run, config_hash)
    logger.info(f"Analysis complete: {spec.label} point {result.point:.6g}, "
                f"CI ({result.ci_lower:.6g}, {result.ci_upper:.6g})")
    return result


def run_simulation_pipeline(run: RunConfig, config_hash):
    """
    Run a simulation study and write one summary row per method.

    Returns:
        list of SimulationSummary: Summaries in battery order
    """
    logger.info("Starting simulation pipeline")
    scenario = Task("Load scenario", load_scenario, scenario_id=run.scenario).run()

    battery = run.method_battery()
    if battery is None:
        battery = apply_overrides(default_battery(), run.m, run.b)
    elif run.battery is not None:
        battery = apply_overrides(battery, run.m, run.b)

    summaries = Task(
        f"Simulate '{scenario.name}'", run_study,
        scenario=scenario, battery=battery, nsim=int(run.nsim), master_seed=run.seed,
        alpha=run.alpha, n_jobs=run.n_jobs,
    ).run()
    records = [s.to_record() for s in summaries]

    if run.db:
        Task("Load summaries to database", load_summaries_to_sqlite,
             records=_stamp(records, run, config_hash), db_uri=run.db).run()

    write_results(records, config.SUMMARY_COLUMNS, run, config_hash)
    return summaries


def run_pool_pipeline(run: RunConfig, config_hash):
    """
    Pool a pre-computed grid file with the requested method.

    Returns:
        PooledResult: The pooled result
    """
    logger.info("Starting pool pipeline")
    grid = Task("Extract grid", extract_grid_from_csv, file_path=run.grid_path).run()
    result = Task(f"Pool with {run.method}", pool_grid, method=run.method, grid=grid, alpha=run.alpha).run()
    write_results([result.to_record()], config.POOLED_RESULT_COLUMNS, run, config_hash)
    return result


PIPELINES = {
    "analyze": run_analysis_pipeline,
    "simulate": run_simulation_pipeline,
    "pool": run_pool_pipeline,
}
