#!/usr/bin/env python3
"""Export the NMES 1987-88 subsample (4406 individuals) to CSV.

The data frame is the NMES1988 set of the R package AER, read through the
`rdatasets` Python package (pip install rdatasets). Column names are AER's;
data/nmes_columns.toml maps them onto the analysis names.

Usage: scripts/fetch_nmes.py [OUTPUT_DIR]   (default: $UNB_NMES_DIR or data/nmes)
"""

import hashlib
import os
import sys
from pathlib import Path


def main() -> int:
    root = Path(__file__).resolve().parent.parent
    default = os.environ.get("UNB_NMES_DIR", str(root / "data" / "nmes"))
    out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else default)
    try:
        import rdatasets
    except ImportError:
        print("rdatasets is not installed; run `pip install rdatasets`", file=sys.stderr)
        return 1

    df = rdatasets.data("AER", "NMES1988")
    if len(df) != 4406:
        print(f"unexpected row count {len(df)}", file=sys.stderr)
        return 1
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "NMES1988.csv"
    df.to_csv(path, index=False)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    print(f"wrote {path} ({len(df)} rows, sha256 {digest})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
