"""Where does the odd/even closed-chain ordering hold?

For each damping rate, prints F_max(local) - F_max(chained) for closed
chains N = 3..10 at xi = 1.  A positive entry means local noise wins.

    python3 scripts/parity_scan.py [gamma ...]
"""
import sys

from qchain import ChainSpec
from qchain.fidelity import sweep

NS = range(3, 11)


def gaps(gamma):
    specs = [ChainSpec(n, "closed", top, 1.0, gamma) for n in NS for top in ("local", "chained")]
    rows = sweep(specs, workers=4)
    return [rows[i].f_max - rows[i + 1].f_max for i in range(0, len(rows), 2)]


def main(rates):
    print("gamma " + " ".join(f"{'N=' + str(n):>8}" for n in NS) + "  parity pattern")
    for g in rates:
        d = gaps(g)
        pattern = all((x > 0) == (n % 2 == 1) for n, x in zip(NS, d))
        print(f"{g:5g} " + " ".join(f"{x:+8.4f}" for x in d) + f"  {'yes' if pattern else 'no'}")


if __name__ == "__main__":
    main([float(a) for a in sys.argv[1:]] or [0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 20.0])
