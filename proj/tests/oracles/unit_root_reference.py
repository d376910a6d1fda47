"""Reference statistics for the unit-root test fixtures.

Regenerates tests/data/unit_root_*.csv and prints the values frozen into
tests/unit/test_stationarity.cpp. Uses statsmodels (ADF, KPSS) and arch (PP) with
constant-only regressions, Schwert lags for ADF and floor(4*(n/100)^(2/9))
Bartlett bandwidth for PP/KPSS.
"""
import math
import pathlib

import numpy as np
from arch.unitroot import PhillipsPerron
from statsmodels.tsa.adfvalues import mackinnonp
from statsmodels.tsa.stattools import adfuller, kpss

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def fixtures():
    rng = np.random.default_rng(20240611)
    yield "iid", rng.standard_normal(200)
    yield "walk", np.cumsum(rng.standard_normal(300))
    ar = np.zeros(250)
    e = rng.standard_normal(250)
    for t in range(1, 250):
        ar[t] = 0.7 * ar[t - 1] + e[t]
    yield "ar1", ar


for name, y in fixtures():
    n = len(y)
    path = DATA / f"unit_root_{name}.csv"
    path.write_text("".join(f"{float(v)!r}\n" for v in y))
    p = math.floor(12 * (n / 100) ** 0.25)
    bw = math.floor(4 * (n / 100) ** (2 / 9))
    adf = adfuller(y, maxlag=p, regression="c", autolag=None)
    pp = PhillipsPerron(y, lags=bw, trend="c", test_type="tau")
    kp = kpss(y, regression="c", nlags=bw)
    print(f"{name}: n={n} adf_lags={p} bw={bw}")
    print(f"  adf  stat={adf[0]!r} p={adf[1]!r}")
    print(f"  pp   stat={pp.stat!r} p(MacKinnon 1994)={mackinnonp(pp.stat)!r}")
    print(f"  kpss stat={kp[0]!r} p={kp[1]!r}")
