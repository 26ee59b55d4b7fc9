#!/usr/bin/env python3
"""Regenerate the bundled synthetic monthly price files.

The files mimic the layout of the World Bank monthly commodity series
(cotton A index in USD/kg, crude oil average in USD/bbl, Jan 1960 - Dec 2018)
but the values are simulated: a piecewise trend-stationary log process with
one structural break per series. Replace them with real extracts in the same
layout (date,<column>) to reproduce published numbers.
"""
import numpy as np

MONTHS = [f"{y}-{m:02d}" for y in range(1960, 2019) for m in range(1, 13)]
N = len(MONTHS)  # 708


def simulate(seed, base, slope, break_at, jump, slope_after, ar, sigma):
    rng = np.random.default_rng(seed)
    t = np.arange(N)
    trend = base + slope * t
    after = t >= break_at
    trend = trend + after * (jump + slope_after * (t - break_at))
    dev = np.zeros(N)
    eps = rng.normal(0.0, sigma, N)
    for i in range(N):
        prev1 = dev[i - 1] if i >= 1 else 0.0
        prev2 = dev[i - 2] if i >= 2 else 0.0
        dev[i] = ar[0] * prev1 + ar[1] * prev2 + eps[i]
    return np.exp(trend + dev)


def write(path, column, values):
    with open(path, "w") as fh:
        fh.write(f"date,{column}\n")
        for month, v in zip(MONTHS, values):
            fh.write(f"{month},{v:.4f}\n")


if __name__ == "__main__":
    cotton = simulate(1960, np.log(0.65), 0.0009, 240, 0.35, 0.0002,
                      (1.25, -0.32), 0.035)
    oil = simulate(1973, np.log(1.7), 0.0005, 168, 1.9, 0.0012,
                   (1.20, -0.26), 0.055)
    write("cotton.csv", "cotton", cotton)
    write("oil.csv", "oil", oil)
