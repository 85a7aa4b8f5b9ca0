#!/usr/bin/env python3
"""
Property Sweep
Runs the randomized invariant sweeps over generated cube complexes, measures and
signed-permutation groups, and prints one summary row per sweep.

Usage:
    python3 scripts/property_sweep.py --trials 200 --seed 0
    python3 scripts/property_sweep.py --acceptance

Exit code is 1 when any trial of any sweep fails.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from services.suite_service import run_sweeps, sweep_table  # noqa: E402
from utils.config import load_config  # noqa: E402


def setup_logging(level: str, log_file: Optional[str] = None):
    """Sweep progress to stderr, and to log_file when given"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=handlers,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="cubist property sweeps")
    parser.add_argument("--trials", type=int, help="Trials per sweep (default from config)")
    parser.add_argument("--seed", type=int, help="Random seed (default from config)")
    parser.add_argument(
        "--acceptance",
        action="store_true",
        help="Raise every sweep to its acceptance trial count",
    )
    parser.add_argument("--config", help="JSON or YAML configuration file")
    parser.add_argument(
        "--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )
    parser.add_argument("--log-file", help="Also write logs to this file")
    args = parser.parse_args(argv)

    setup_logging(args.log_level, args.log_file)
    load_config(args.config)
    logger = logging.getLogger(__name__)

    results = run_sweeps(args.trials, args.seed, args.acceptance)
    print(sweep_table(results).to_string(index=False))

    failed = [result.name for result in results if not result.passed]
    if failed:
        logger.error(f"Failing sweeps: {', '.join(failed)}")
        return 1
    logger.info("All sweeps passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
