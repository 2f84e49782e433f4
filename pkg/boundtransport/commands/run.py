import argparse
import logging
from pathlib import Path

from boundtransport.fileio.run_config import parse_config, validate_config
from boundtransport.pipeline import run
from boundtransport.schemas.requests.run_config import RunConfig

logger = logging.getLogger(__name__)


def with_output_dir(config: RunConfig, out: str | None) -> RunConfig:
    if out is None:
        return config
    output = config.output.model_copy(update={"dir": Path(out).resolve()})
    return config.model_copy(update={"output": output})


def load_run_config(args: argparse.Namespace) -> RunConfig:
    path = getattr(args, "config", None)
    if path is None:
        logger.info("no --config given, running the channel quick-start")
        config = validate_config({})
    else:
        config = parse_config(path)
    return with_output_dir(config, getattr(args, "out", None))


def handle(args: argparse.Namespace) -> int:
    summary = run(load_run_config(args))
    for path in summary.artifacts:
        logger.info(f"wrote {path}")
    return 0


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "run", parents=parents, help="Solve the problem described by --config"
    )
    parser.set_defaults(handler=handle)
