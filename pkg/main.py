"""
Main entry point for the bootstrap/multiple-imputation toolkit.

    python main.py analyze  --config run.json --data trial.csv --method von-hippel --m 2 --b 200 --out result.csv
    python main.py simulate --scenario trial-mar --nsim 10 --m 2 --b 10 --out summary.csv
    python main.py pool     --grid grid.csv --method von-hippel --out result.json --format json
"""
import argparse
import logging
import platform
import sys
import time

import joblib
import numpy as np
import pandas as pd
import scipy
import sqlalchemy

# Import project modules
import config
from core.exceptions import BootMIError
from core.results import Method
from core.streams import generate_seed
from loaders.json_exporter import export_to_json
from orchestrator import PIPELINES
from run_config import FORMATS, RunConfig
from simlab.battery import POINT_CHOICES

logger = logging.getLogger(__name__)


def _shared_arguments():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--config', type=str, default=None,
                        help='JSON run configuration; flags override its values')
    parent.add_argument('--out', type=str, default=None,
                        help='Output file; metadata goes to <out>.meta.json')
    parent.add_argument('--format', choices=FORMATS, default=None,
                        help='Output format (default csv)')
    parent.add_argument('--seed', type=int, default=None,
                        help='Master seed; generated and printed when absent')
    parent.add_argument('--threads', type=int, default=None,
                        help='Parallel workers (default: all cores; results do not depend on it)')
    parent.add_argument('--alpha', type=float, default=None,
                        help='Two-sided level, nominal coverage 1 - alpha (default 0.05)')
    parent.add_argument('--m', type=int, default=None, help='Number of imputations')
    parent.add_argument('--b', type=int, default=None, help='Number of bootstrap samples')
    parent.add_argument('--nsim', type=int, default=None, help='Simulation replicates')
    parent.add_argument('--method', choices=[m.value for m in Method], default=None,
                        help='Pooling method')
    parent.add_argument('--log-level', dest='log_level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level (default INFO)')
    return parent


def parse_arguments(argv=None):
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(description='Bootstrap and multiple imputation confidence intervals')
    subparsers = parser.add_subparsers(dest='command', required=True)
    shared = _shared_arguments()

    analyze = subparsers.add_parser('analyze', parents=[shared], help='Pool an analysis of a CSV dataset')
    analyze.add_argument('--data', dest='data_path', type=str, default=None,
                         help='CSV with a header row; empty cells are missing')
    analyze.add_argument('--point', choices=POINT_CHOICES, default=None,
                         help='Point estimate of the percentile and Boot MI normal methods (default grand)')
    analyze.add_argument('--grid-out', dest='grid_out', type=str, default=None,
                         help='Also write the estimate grid for later pooling')

    simulate = subparsers.add_parser('simulate', parents=[shared], help='Run a simulation study')
    simulate.add_argument('--scenario', type=str, default=None,
                          help=f"Scenario id: {', '.join(sorted(config.SCENARIO_FILES))}")
    simulate.add_argument('--db', type=str, default=None,
                          help='SQLAlchemy URI to append summaries to, e.g. sqlite:///studies.db')

    pool = subparsers.add_parser('pool', parents=[shared], help='Pool a pre-computed estimate grid')
    pool.add_argument('--grid', dest='grid_path', type=str, default=None,
                      help='Grid CSV with a "# orientation: ..." first line')

    return parser.parse_args(argv)


def library_versions():
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "joblib": joblib.__version__,
        "sqlalchemy": sqlalchemy.__version__,
    }


def write_metadata(run: RunConfig, config_hash, argv, runtime_seconds):
    """Write <out>.meta.json with everything needed to reproduce the output."""
    metadata = {
        "command": ["main.py", *argv],
        "config": run.to_dict(),
        "config_hash": config_hash,
        "seed": run.seed,
        "version": config.VERSION,
        "libraries": library_versions(),
        "runtime_seconds": runtime_seconds,
    }
    return export_to_json(metadata, f"{run.out}.meta.json")


def main(argv=None):
    """Run one subcommand and return its exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parse_arguments(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ('command', 'config')}

    config.configure_logging(level=getattr(logging, args.log_level or 'INFO'))
    start_time = time.perf_counter()

    try:
        run = RunConfig.build(args.command, config_path=args.config, **overrides)
        logging.getLogger().setLevel(getattr(logging, run.log_level, logging.INFO))

        if run.seed is None and run.command != 'pool':
            run.seed = generate_seed()
            print(f"seed: {run.seed}")
        config_hash = run.hash()
        logger.info(f"Running '{run.command}' with config hash {config_hash}")

        PIPELINES[run.command](run, config_hash)
        write_metadata(run, config_hash, argv, round(time.perf_counter() - start_time, 3))
    except BootMIError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        print(f"error: unexpected failure: {e}", file=sys.stderr)
        return 1

    logger.info("Run complete")
    return 0


if __name__ == "__main__":
    sys.exit(main())
