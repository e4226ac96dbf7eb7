"""Writing every curve table for a prior to a directory.

The files are plain CSV with a one-line ``# curve:`` comment naming what
they contain, ready for any plotting tool.
"""

import sys
from pathlib import Path

import rctshrink as rs
from rctshrink import io as rio

out = Path(sys.argv[1] if len(sys.argv) > 1 else "curves")
grid = rio.GridSpec(power_draws=200_000, seed=0)
paths = rio.emit_curves(rs.cochrane_prior(), out, grid)

for path in paths:
    with open(path) as fh:
        lines = fh.read().splitlines()
    print(f"{path}  ({len(lines) - 2} rows)")
    print("   ", lines[0])
    print("   ", lines[1])
    print("   ", lines[2])
