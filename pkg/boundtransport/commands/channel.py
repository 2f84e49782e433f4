import argparse
import logging

from boundtransport.commands.run import with_output_dir
from boundtransport.common.constants import DC_VARIANTS, TRANSFORM_VARIANTS
from boundtransport.fileio.run_config import (
    deep_update,
    expand_dotted,
    parse_config,
    validate_config,
)
from boundtransport.pipeline import run

logger = logging.getLogger(__name__)


def channel_overrides(args: argparse.Namespace) -> dict:
    """Dotted-key overrides for the channel flags that were given."""
    overrides: dict = {"mesh.source": "channel", "velocity.source": "channel"}
    if args.nx is not None:
        overrides["channel.nx"] = args.nx
    if args.ny is not None:
        overrides["channel.ny"] = args.ny
    if args.dc is not None:
        operator, diffusivity = DC_VARIANTS[args.dc]
        overrides["dc.operator"] = operator.value
        overrides["dc.diffusivity"] = diffusivity.value
    if args.transform is not None:
        overrides["transform.kind"] = TRANSFORM_VARIANTS[args.transform].value
    return overrides


def handle(args: argparse.Namespace) -> int:
    data = {}
    if getattr(args, "config", None) is not None:
        data = parse_config(args.config).model_dump(mode="json", exclude={"mesh", "velocity"})
    # flags win over the config file
    config = validate_config(deep_update(data, expand_dotted(channel_overrides(args))))
    config = with_output_dir(config, getattr(args, "out", None))
    summary = run(config)
    logger.info(
        f"channel nx={config.channel.nx} ny={config.channel.ny}: "
        f"min={summary.stats.min:.6e} max={summary.stats.max:.6e}"
    )
    return 0


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "channel", parents=parents, help="Run the channel verification case"
    )
    parser.add_argument("--nx", type=int, help="Cells along the channel")
    parser.add_argument("--ny", type=int, help="Cells across the channel")
    parser.add_argument("--dc", choices=sorted(DC_VARIANTS), help="Discontinuity capturing")
    parser.add_argument("--transform", choices=sorted(TRANSFORM_VARIANTS))
    parser.set_defaults(handler=handle)
