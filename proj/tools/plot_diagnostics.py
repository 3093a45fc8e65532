#!/usr/bin/env python3
"""Render the TSVs written by `sumprobe diagnose --out-dir` as PNGs."""
import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("plot_dir", type=pathlib.Path)
    ap.add_argument("--out-dir", type=pathlib.Path, default=None)
    args = ap.parse_args()
    out = args.out_dir or args.plot_dir
    out.mkdir(parents=True, exist_ok=True)

    rep = pd.read_csv(args.plot_dir / "repetition.tsv", sep="\t")
    ax = rep.plot.bar(x="n", y="rep_n", legend=False, ylim=(0, 1.05))
    ax.set_ylabel("REP_n (distinct / total n-grams)")
    ax.figure.savefig(out / "repetition.png", bbox_inches="tight", dpi=150)
    plt.close(ax.figure)

    lp = pd.read_csv(args.plot_dir / "length_profile.tsv", sep="\t")
    ax = lp.plot(x="step", y="mean_tokens", marker="o", legend=False)
    ax.set_ylabel("mean tokens of k-th extracted sentence")
    ax.figure.savefig(out / "length_profile.png", bbox_inches="tight", dpi=150)
    plt.close(ax.figure)

    pb = pd.read_csv(args.plot_dir / "pos_bias.tsv", sep="\t")
    entropy = float(pb.loc[pb["bucket"] == "entropy", "p"].iloc[0])
    dist = pb[pb["bucket"] != "entropy"].astype({"bucket": int, "p": float})
    ax = dist.plot.bar(x="bucket", y="p", legend=False)
    ax.set_ylabel("p(first labeled sentence in bucket)")
    ax.set_title(f"positional bias = {entropy:.3f} nats")
    ax.figure.savefig(out / "pos_bias.png", bbox_inches="tight", dpi=150)
    plt.close(ax.figure)
    print(f"wrote 3 plots to {out}")


if __name__ == "__main__":
    main()
