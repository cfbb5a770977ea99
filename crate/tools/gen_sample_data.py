#!/usr/bin/env python3
"""Regenerate data/vt_bnd_bndx.csv, the bundled sample price history.

The file is synthetic but deliberately shaped like a two-year daily
history of a diversified three-fund lineup: a volatile global equity
fund (VT) that sells off late in year one and rallies through year two,
next to two quiet bond funds (BND, BNDX) with correlated moves and a
small persistent drift. That shape gives the bundled backtest something
to disagree about: the full-history solve settles on the steadiest
grower, while short rolling windows chase the equity rebound.

Deterministic: a fixed seed produces the identical CSV byte for byte.
"""

import datetime as dt

import numpy as np

SEED = 20180214
START = dt.date(2018, 2, 14)
END = dt.date(2020, 2, 14)
OUT = "data/vt_bnd_bndx.csv"

# Per-regime daily log-return drift and volatility for the equity fund:
# grind up, sharp selloff, recovery rally, brief dip, long rally.
VT_REGIMES = [
    (dt.date(2018, 9, 28), 0.0004, 0.007),
    (dt.date(2018, 12, 24), -0.0030, 0.012),
    (dt.date(2019, 4, 30), 0.0020, 0.007),
    (dt.date(2019, 5, 31), -0.0025, 0.009),
    (dt.date(2019, 12, 31), 0.0012, 0.005),
    (END, 0.0010, 0.006),
]

def vt_params(day):
    for end, mu, sigma in VT_REGIMES:
        if day <= end:
            return mu, sigma
    return VT_REGIMES[-1][1], VT_REGIMES[-1][2]

def bnd_params(day):
    # Flat in year one, then a steady bond rally.
    if day < dt.date(2019, 1, 1):
        return 0.0, 0.0012
    return 0.0003, 0.0014

def bndx_params(day):
    # The steadiest fund: small positive drift throughout, strongest in
    # the first half of year two.
    if day < dt.date(2019, 1, 1):
        return 0.00016, 0.0008
    if day < dt.date(2019, 7, 1):
        return 0.00035, 0.0008
    return 0.00018, 0.0007

def weekdays(start, end):
    day = start
    while day <= end:
        if day.weekday() < 5:
            yield day
        day += dt.timedelta(days=1)

def main():
    rng = np.random.default_rng(SEED)
    days = list(weekdays(START, END))

    prices = {"VT": 74.0, "BND": 77.0, "BNDX": 52.0}
    rows = [(days[0], dict(prices))]
    for day in days[1:]:
        z_vt = rng.standard_normal()
        z_bnd = rng.standard_normal()
        z_own = rng.standard_normal()
        # The two bond funds share a rate factor (correlation 0.6).
        z_bndx = 0.6 * z_bnd + 0.8 * z_own

        mu, sigma = vt_params(day)
        prices["VT"] *= float(np.exp(mu + sigma * z_vt))
        mu, sigma = bnd_params(day)
        prices["BND"] *= float(np.exp(mu + sigma * z_bnd))
        mu, sigma = bndx_params(day)
        prices["BNDX"] *= float(np.exp(mu + sigma * z_bndx))
        rows.append((day, dict(prices)))

    with open(OUT, "w") as f:
        f.write("date,VT,BND,BNDX\n")
        for day, p in rows:
            f.write(f"{day},{p['VT']:.4f},{p['BND']:.4f},{p['BNDX']:.4f}\n")

    returns = {
        name: np.diff([p[name] for _, p in rows]) / [p[name] for _, p in rows][:-1]
        for name in prices
    }
    split = dt.date(2019, 2, 13)
    in_sample = sum(1 for day, _ in rows if day <= split)
    print(f"wrote {OUT}: {len(rows)} rows, split {split} -> "
          f"{in_sample} in-sample / {len(rows) - in_sample} after")
    for name, r in returns.items():
        ins = r[: in_sample - 1]
        oos = r[in_sample - 1 :]
        print(f"  {name}: in-sample mean {ins.mean():+.2e} sd {ins.std():.2e} | "
              f"out-of-sample total {(1 + oos).prod() - 1:+.2%}")

if __name__ == "__main__":
    main()
