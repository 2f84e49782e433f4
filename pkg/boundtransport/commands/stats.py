import argparse
import logging

from boundtransport.analysis.postproc import field_stats
from boundtransport.common.errors import FieldFileError
from boundtransport.fileio.fields import write_stats_csv
from boundtransport.fileio.vtk import read_vtk

logger = logging.getLogger(__name__)


def handle(args: argparse.Namespace) -> int:
    mesh, fields = read_vtk(args.vtk)
    if args.field not in fields:
        raise FieldFileError(
            f"{args.vtk} has no field {args.field!r}; found {sorted(fields)}", module="io_cli"
        )
    stats = field_stats(mesh, fields[args.field])
    print(stats.model_dump_json(indent=2))
    out = getattr(args, "out", None)
    if out is not None:
        path = write_stats_csv(f"{out}/stats.csv", stats)
        logger.info(f"wrote {path}")
    return 0


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "stats", parents=parents, help="Extrema and negativity of a solution field"
    )
    parser.add_argument("vtk", help="VTK file written by a run")
    parser.add_argument("--field", default="c", help="Point-data field name")
    parser.set_defaults(handler=handle)
