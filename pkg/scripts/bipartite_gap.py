"""Error-vs-rank on complete bipartite graphs: AR against the A-only model.

Prints one CSV row per (n_per, k) with both normalized errors.

    python3 scripts/bipartite_gap.py --sizes 4 8 16
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from ardecomp.complete import complete_nuclear_min, complete_psd_nuclear_min
from ardecomp.spectral import eigendecompose, reconstruction_error, split_ar
from ardecomp.synth import generate_bipartite


@dataclass
class Config:
    sizes: tuple = (4, 8, 16)


def run(cfg: Config, out=sys.stdout):
    w = csv.writer(out)
    w.writerow(["n_per", "k", "ar_error", "a_only_error"])
    for n_per in cfg.sizes:
        net = generate_bipartite(n_per)
        ar = eigendecompose(complete_nuclear_min(net))
        psd = eigendecompose(complete_psd_nuclear_min(net))
        for k in range(1, 2 * n_per + 1):
            w.writerow([n_per, k,
                        f"{reconstruction_error(net, split_ar(ar, k)):.3e}",
                        f"{reconstruction_error(net, split_ar(psd, k)):.3e}"])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=list(Config.sizes))
    args = p.parse_args(argv)
    run(Config(tuple(args.sizes)))


if __name__ == "__main__":
    main()
