import argparse
import logging
import sys

from boundtransport.commands import channel, run, sample, stats
from boundtransport.common.constants import ExitCode
from boundtransport.common.errors import BoundTransportError
from boundtransport.config import config
from boundtransport.dependencies import initialize_executor, shutdown_executor

logger = logging.getLogger(__name__)


def global_options() -> argparse.ArgumentParser:
    """Flags accepted before or after the subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", default=argparse.SUPPRESS, help="Run configuration (JSON)")
    parser.add_argument("--out", default=argparse.SUPPRESS, help="Output directory")
    parser.add_argument(
        "--threads", type=int, default=argparse.SUPPRESS, help="Assembly worker threads"
    )
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = global_options()
    parser = argparse.ArgumentParser(
        prog="boundtransport",
        description="Bound-preserving SUPG solver for advection-reaction transport",
        parents=[common],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (run, channel, stats, sample):
        command.register(subparsers, [common])
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=config.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)
    threads = getattr(args, "threads", None) or config.BT_THREADS
    try:
        initialize_executor(threads)
        return int(args.handler(args))
    except BoundTransportError as e:
        logger.error(f"❌ {e}")
        return int(e.exit_code)
    except Exception as e:
        logger.error(f"❌ unexpected {type(e).__name__}: {e}")
        logger.debug("traceback", exc_info=True)
        return int(ExitCode.UNEXPECTED)
    finally:
        shutdown_executor()


if __name__ == "__main__":
    sys.exit(main())
