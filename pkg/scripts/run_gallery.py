"""Run every built-in preset and print the gallery index.

    python scripts/run_gallery.py [--out DIR] [--points-per-decade N]
"""
import json
import sys
from pathlib import Path

from subordination.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:]
    out = Path(argv[argv.index("--out") + 1]) if "--out" in argv else Path("out")
    code = main(["gallery", *argv] if "--out" in argv else ["gallery", "--out", str(out), *argv])
    if code == 0:
        for e in json.loads((out / "gallery.json").read_text())["presets"]:
            c = "-" if e["C"] is None else f"{e['C']:.3g}"
            print(f"{e['name']:<28} {e['criterion']:<20} {e['verdict']:<16} C={c}")
    sys.exit(code)
