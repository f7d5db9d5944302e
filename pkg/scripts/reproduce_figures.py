"""Render every config under configs/ to SVG (plus its CSV) in an output directory.

    python scripts/reproduce_figures.py [OUT_DIR]
"""

import configparser
import sys
from pathlib import Path

from discgeo.cli import main

ROOT = Path(__file__).resolve().parent.parent
COMMANDS = ("compare", "orbit", "extremal")


def command_of(path):
    cp = configparser.ConfigParser()
    cp.read(path)
    for name in COMMANDS:
        if cp.has_section(name):
            return name
    raise SystemExit(f"{path}: no command section")


def run(out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    failed = 0
    for cfg in sorted((ROOT / "configs").glob("*.ini")):
        target = out_dir / f"{cfg.stem}.svg"
        code = main([command_of(cfg), "--config", str(cfg), "--out", str(target)])
        failed += code != 0
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1] if len(sys.argv) > 1 else "figures")))
