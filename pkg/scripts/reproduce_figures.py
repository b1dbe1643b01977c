"""Write the CSV data behind every fidelity figure into one directory.

    python3 scripts/reproduce_figures.py [OUTDIR]

Curves: three-qubit F_opt(t) for both boundaries, gamma in {4, 20}.
Sweeps: F_max against N for open chains (N = 3..10), closed odd and closed
even chains, gamma in {4, 20}.  Everything goes through the CLI so the files
are byte-identical to what ``qchain`` itself emits.
"""
import sys
import time
from pathlib import Path

from qchain.cli import main

CURVES = [
    (boundary, topology, gamma)
    for boundary in ("open", "closed")
    for gamma in (4, 20)
    for topology in ("chained", "local")
]
SWEEPS = {
    "open": "3..10",
    "closed_odd": "3,5,7,9",
    "closed_even": "4,6,8,10",
}


def run(argv):
    code = main(argv)
    if code:
        raise SystemExit(f"qchain {' '.join(argv)} exited with {code}")


def reproduce(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    for boundary, topology, gamma in CURVES:
        path = outdir / f"curve_{boundary}_{topology}_g{gamma}.csv"
        run(["curve", "--n", "3", "--boundary", boundary, "--topology", topology,
             "--xi", "1", "--gamma", str(gamma), "--t-max", "3", "--grid", "300", "--output", str(path)])
        print(path)
    for label, n_list in SWEEPS.items():
        boundary = label.split("_")[0]
        for gamma in (4, 20):
            path = outdir / f"sweep_{label}_g{gamma}.csv"
            run(["sweep", "--n-list", n_list, "--boundary", boundary, "--xi", "1",
                 "--gamma", str(gamma), "--workers", "4", "--output", str(path)])
            print(path)


if __name__ == "__main__":
    start = time.perf_counter()
    reproduce(Path(sys.argv[1] if len(sys.argv) > 1 else "figures"))
    print(f"done in {time.perf_counter() - start:.1f}s", file=sys.stderr)
