import argparse
import logging
import os
import sys
import uuid
from typing import List, Optional

# Attempt to load dotenv, warn if missing
try:
    from dotenv import load_dotenv
except ImportError:
    load_dotenv = None

# Ensure src can be imported
sys.path.append(os.getcwd())

from langgraph.errors import GraphRecursionError
from src.config import cli_overrides, load_config
from src.errors import HiercastError
from src.graph import COMMANDS, run_command

logger = logging.getLogger("main")


def setup_logging(run_id: str, level: Optional[str] = None):
    dev_mode = (os.getenv("DEV_MODE") or os.getenv("HIERCAST_DEV_MODE") or "false").lower() == "true"
    level = level or os.getenv("HIERCAST_LOG_LEVEL")
    log_level = logging.DEBUG if dev_mode else getattr(logging, (level or "INFO").upper(), logging.INFO)

    logging.basicConfig(
        level=log_level,
        format=f"%(asctime)s [{run_id}] %(levelname)s %(name)s: %(message)s",
        handlers=[logging.StreamHandler(sys.stdout)],
        force=True,
    )
    for noisy in ("langgraph", "arviz", "matplotlib", "numba"):
        logging.getLogger(noisy).setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, help="Seed for simulation, split and sampler")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--backend", choices=["gibbs", "mwg", "metropolis-within-gibbs"], help="MCMC backend")
    common.add_argument("--chains", type=int, help="Number of MCMC chains")
    common.add_argument("--iters", type=int, help="MCMC iterations per chain, warmup included")
    common.add_argument("--input", help="transactions CSV (disables synthetic generation)")
    common.add_argument("--hier-data", help="HierData CSV for infer (day_index, location_index, y)")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(description="Hierarchical demand-curve forecasting from POS transactions.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "generate": "Simulate a synthetic transaction CSV",
        "bin": "Parse transactions into 15-minute count grids",
        "fit": "Fit log-quadratic coefficients per location-day",
        "infer": "Sample the hierarchical model for each coefficient",
        "eval": "Score the hierarchy against group-mean baselines",
        "pipeline": "Run every stage in order",
    }
    for command in COMMANDS:
        sub.add_parser(command, parents=[common], help=helps[command])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    # 1. Load env first so DEV_MODE is available for logging
    if load_dotenv:
        load_dotenv()

    run_id = str(uuid.uuid4())[:8]
    setup_logging(run_id, args.log_level)

    if not load_dotenv:
        logger.warning("python-dotenv not installed. Relying on existing env vars.")

    try:
        cfg = load_config(
            args.config,
            overrides=cli_overrides(
                seed=args.seed,
                out=args.out,
                backend=args.backend,
                chains=args.chains,
                iters=args.iters,
                input_csv=args.input,
                hier_data=args.hier_data,
            ),
        )
        logger.info(f"Run ID: {run_id}; command '{args.command}'; output in {cfg.out_dir}")
        result = run_command(args.command, cfg)
    except HiercastError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except GraphRecursionError:
        logger.critical("Stage graph exceeded its recursion limit")
        return 1
    except Exception as e:
        logger.critical(f"Unexpected failure: {e}", exc_info=True)
        return 1

    logger.info("--- Run Complete ---")
    for stage in result["completed"]:
        logger.info(f"{stage}: {result['outputs'].get(stage)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
