"""Write the rotating-vortex annulus as mesh CSVs, nodal velocity and a run
config, ready for `boundtransport run --config <dir>/config.json`."""

import sys

from boundtransport.cases.vortex import write_vortex_case

target = sys.argv[1] if len(sys.argv) > 1 else "vortex_case"
path = write_vortex_case(target)
print(f"✅ vortex case written, run it with:\n   boundtransport run --config {path}")
