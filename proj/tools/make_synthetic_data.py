#!/usr/bin/env python3
"""Generate the bundled synthetic hourly price and wind capacity-factor series.

Prices follow a daily/weekly shape around 40 EUR/MWh with AR(1) noise, sparse
spikes and occasional negative hours. Capacity factors follow a logistic AR(1)
process with mean near 0.44. Output is deterministic for a given seed.
"""

import argparse
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np


def generate(hours, seed):
    rng = np.random.default_rng(seed)
    t = np.arange(hours)
    hod = t % 24
    dow = (t // 24) % 7
    daily = 8.0 * np.sin((hod - 7) / 24 * 2 * np.pi) + 6.0 * np.exp(-((hod - 18) ** 2) / 6.0)
    weekly = np.where(dow >= 5, -7.0, 0.0)
    noise = np.zeros(hours)
    for k in range(1, hours):
        noise[k] = 0.85 * noise[k - 1] + rng.normal(0.0, 3.5)
    prices = 38.0 + daily + weekly + noise
    spikes = rng.random(hours) < 0.01
    prices[spikes] += rng.uniform(30.0, 90.0, spikes.sum())
    dips = rng.random(hours) < 0.01
    prices[dips] = rng.uniform(-15.0, 5.0, dips.sum())

    z = np.zeros(hours)
    for k in range(1, hours):
        z[k] = 0.95 * z[k - 1] + rng.normal(0.0, 0.45)
    cf = 1.0 / (1.0 + np.exp(-(z - 0.65) * 1.6))
    cf = np.clip(cf * 1.05 - 0.02, 0.0, 1.0)
    return np.round(prices, 2), np.round(cf, 4)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--hours", type=int, default=24 * 28)
    ap.add_argument("--seed", type=int, default=2019)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = ap.parse_args()

    prices, cf = generate(args.hours, args.seed)
    start = datetime(2019, 1, 1, tzinfo=timezone.utc)
    stamps = [(start + timedelta(hours=k)).strftime("%Y-%m-%dT%H:%M:%SZ") for k in range(args.hours)]
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "prices_synthetic.csv", "w") as f:
        f.write("timestamp,price_eur_mwh\n")
        for s, v in zip(stamps, prices):
            f.write(f"{s},{v:.2f}\n")
    with open(args.out / "wind_synthetic.csv", "w") as f:
        f.write("timestamp,capacity_factor\n")
        for s, v in zip(stamps, cf):
            f.write(f"{s},{v:.4f}\n")
    print(f"{args.hours} hours: mean price {prices.mean():.2f} EUR/MWh, mean capacity factor {cf.mean():.3f}")


if __name__ == "__main__":
    main()
