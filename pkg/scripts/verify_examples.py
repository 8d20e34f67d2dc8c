#!/usr/bin/env python3
"""Check the bundled worked examples and a few generated lines against the brute-force oracle."""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

from brt_pareto.cli import main as cli

DATA = Path(__file__).resolve().parents[1] / "data"


def main() -> int:
    codes = [cli(["verify", str(DATA / name)]) for name in ("example1.json", "example2.json")]
    with tempfile.TemporaryDirectory() as tmp:
        for family, stations in (("intractable", 8), ("unimodal-weights", 12), ("scenario", 12)):
            path = Path(tmp) / f"{family}.json"
            cli(["generate", "--family", family, "--stations", str(stations), "-o", str(path)])
            codes.append(cli(["verify", str(path), "--components", "1", "--components", "inf"]))
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
