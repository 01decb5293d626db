"""Write the packet error rate versus SNIR of the random-coding-bound decoder as CSV."""

import argparse

import numpy as np

from ecrasim import DecodeModel
from ecrasim.decoder import per_curve_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rate", type=float, default=1.0)
    ap.add_argument("--block", type=int, default=1000, help="codeword length in symbols")
    ap.add_argument("--model", default="RCB", choices=["RCB", "SB"])
    ap.add_argument("--lo", type=float, default=-2.0)
    ap.add_argument("--hi", type=float, default=10.0)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    model = DecodeModel(args.model, args.rate, args.block)
    text = per_curve_csv(model, np.arange(args.lo, args.hi + args.step / 2, args.step))
    if args.out == "-":
        print(text, end="")
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
