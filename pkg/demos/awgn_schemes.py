"""Frame error rate of hard decision, GMD, SED(8,8), RD and RDE patterns on AWGN.

All schemes see the same frames (same seed), so differences come from the
erasure patterns alone. A few thousand frames per point take a few minutes.
"""

import argparse
import sys

from rsrde.harness import ExperimentConfig, run_experiment, write_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--snr", default="4.5, 5.0, 5.5")
    ap.add_argument("--frames", type=int, default=2000)
    ap.add_argument("--csv", action="store_true", help="print full CSV per scheme")
    args = ap.parse_args()

    results = {}
    for scheme in ("hd", "gmd", "sed", "rd", "rde"):
        cfg = ExperimentConfig.from_mapping({
            "channel": "awgn", "params": args.snr, "scheme": scheme, "rate": "8",
            "trials": str(args.frames), "min_errors": str(args.frames), "seed": "5"})
        results[scheme] = run_experiment(cfg)
        if args.csv:
            write_curve(results[scheme], cfg, sys.stdout)

    snrs = [p.channel_param for p in results["hd"]]
    print("Eb/N0  " + "".join(f"{s:>10}" for s in results))
    for i, snr in enumerate(snrs):
        print(f"{snr:5.2f}  " + "".join(f"{results[s][i].fer:10.2e}" for s in results))


if __name__ == "__main__":
    main()
