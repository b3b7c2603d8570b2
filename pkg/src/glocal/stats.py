"""Welch's unequal-variance t-test."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as _st


def welch_t_test(a, b) -> tuple[float, float]:
    """Return ``(t, p)`` with a two-sided p-value from Welch-Satterthwaite df.

    Two zero-variance samples give ``(0, 1)`` when their means agree and an
    infinite t with p = 0 otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least two observations")
    ma, mb = a.mean(), b.mean()
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    se2 = va + vb
    if se2 == 0:
        if ma == mb:
            return 0.0, 1.0
        return math.copysign(math.inf, ma - mb), 0.0
    t = (ma - mb) / math.sqrt(se2)
    df = se2 ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    p = 2.0 * _st.t.sf(abs(t), df)
    return float(t), float(min(p, 1.0))


def welch_df(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    return float((va + vb) ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1)))
