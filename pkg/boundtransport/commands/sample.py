import argparse
import logging
from pathlib import Path

from boundtransport.analysis.postproc import sample_line
from boundtransport.common.errors import FieldFileError
from boundtransport.fileio.fields import write_line_csv
from boundtransport.fileio.vtk import read_vtk

logger = logging.getLogger(__name__)


def handle(args: argparse.Namespace) -> int:
    mesh, fields = read_vtk(args.vtk)
    if args.field not in fields:
        raise FieldFileError(
            f"{args.vtk} has no field {args.field!r}; found {sorted(fields)}", module="io_cli"
        )
    samples = sample_line(mesh, fields[args.field], args.p0, args.p1, args.n)
    out = Path(getattr(args, "out", None) or Path(args.vtk).parent)
    path = write_line_csv(out / f"line_{args.name}.csv", samples)
    logger.info(f"wrote {len(samples)} samples to {path}")
    return 0


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "sample", parents=parents, help="Sample a solution field along a segment"
    )
    parser.add_argument("vtk", help="VTK file written by a run")
    parser.add_argument("--p0", type=float, nargs="+", required=True, metavar="X")
    parser.add_argument("--p1", type=float, nargs="+", required=True, metavar="X")
    parser.add_argument("--n", type=int, default=101, help="Number of samples")
    parser.add_argument("--field", default="c")
    parser.add_argument("--name", default="probe", help="Output is line_<name>.csv")
    parser.set_defaults(handler=handle)
