#!/usr/bin/env python3
"""Regenerate every canned study CSV in one go.

At the default budgets the simulation-backed studies (5, 8, 9, 10) take a
few minutes total; pass --replications/--slots to trade accuracy for time.
"""

import argparse
import sys
import time

from rfharvest.cli import main as cli_main

ALL_IDS = (5, 6, 7, 8, 9, 10, 11, 12, 13)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--ids", type=int, nargs="*", default=list(ALL_IDS))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--replications", type=int, default=None)
    ap.add_argument("--slots", type=int, default=None)
    args = ap.parse_args()

    for fig_id in args.ids:
        t0 = time.time()
        argv = ["figure", "--id", str(fig_id), "--out-dir", args.out_dir,
                "--seed", str(args.seed)]
        if args.replications is not None:
            argv += ["--replications", str(args.replications)]
        if args.slots is not None:
            argv += ["--slots", str(args.slots)]
        rc = cli_main(argv)
        if rc != 0:
            return rc
        print(f"study {fig_id}: {time.time() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
