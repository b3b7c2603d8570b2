"""Two-dimensional Gaussian mixtures fitted by expectation-maximisation, with
BIC model selection.

Points are (task parameter, learning progress) pairs, so everything is
written in closed form for 2x2 covariances.  Covariances are held at or above
``cov_floor`` by clipping eigenvalues in the M-step; that is the exact
constrained maximiser, so the log-likelihood still never decreases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class GaussianMixture:
    weights: np.ndarray      # (k,)
    means: np.ndarray        # (k, 2)
    covariances: np.ndarray  # (k, 2, 2)
    log_likelihood: float = float("nan")
    bic: float = float("nan")

    @property
    def k(self) -> int:
        return len(self.weights)

    def log_prob_components(self, x) -> np.ndarray:
        """(n, k) matrix of log(weight_j * N(x_i | mean_j, cov_j))."""
        x = _as_points(x)
        cov = self.covariances
        return _log_joint(x, self.weights[None], self.means[None], cov[None, :, 0, 0],
                          cov[None, :, 0, 1], cov[None, :, 1, 1])[0]

    def responsibilities(self, x) -> np.ndarray:
        lp = self.log_prob_components(x)
        return np.exp(lp - _logsumexp(lp))

    def score(self, x) -> float:
        """Total log-likelihood of ``x``."""
        return float(_logsumexp(self.log_prob_components(x))[..., 0].sum())

    def sample(self, rng: np.random.Generator, component: int | None = None) -> np.ndarray:
        if component is None:
            component = int(rng.choice(self.k, p=self.weights))
        return rng.multivariate_normal(self.means[component], self.covariances[component])


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of points, got shape {x.shape}")
    return x


def _logsumexp(a: np.ndarray) -> np.ndarray:
    m = a.max(axis=-1, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    return m + np.log(np.exp(a - m).sum(axis=-1, keepdims=True))


def _log_joint(x, w, mu, sxx, sxy, syy):
    """Batched over restarts; w, sxx, sxy, syy are (r, k), mu is (r, k, 2). Returns (r, n, k)."""
    det = sxx * syy - sxy * sxy
    dx = x[None, :, None, 0] - mu[:, None, :, 0]
    dy = x[None, :, None, 1] - mu[:, None, :, 1]
    maha = (syy[:, None] * dx * dx - 2 * sxy[:, None] * dx * dy + sxx[:, None] * dy * dy) / det[:, None]
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    return (logw - 0.5 * (2 * LOG_2PI + np.log(det)))[:, None, :] - 0.5 * maha


def _clip_cov(sxx, sxy, syy, floor):
    """Raise every eigenvalue of [[sxx, sxy], [sxy, syy]] to at least ``floor``."""
    half_tr = 0.5 * (sxx + syy)
    disc = np.sqrt(np.maximum(0.25 * (sxx - syy) ** 2 + sxy * sxy, 0.0))
    lo, hi = half_tr - disc, half_tr + disc
    both = hi < floor
    # unit eigenvector of the smaller eigenvalue
    vx = np.where(np.abs(sxy) > 0, sxy, np.where(sxx <= syy, 1.0, 0.0))
    vy = np.where(np.abs(sxy) > 0, lo - sxx, np.where(sxx <= syy, 0.0, 1.0))
    norm = np.hypot(vx, vy)
    vx, vy = vx / norm, vy / norm
    bump = np.where(lo < floor, floor - lo, 0.0)
    sxx, sxy, syy = sxx + bump * vx * vx, sxy + bump * vx * vy, syy + bump * vy * vy
    return (np.where(both, floor, sxx), np.where(both, 0.0, sxy), np.where(both, floor, syy))


def em(points, k: int, rng: np.random.Generator, restarts: int = 10, max_iter: int = 100,
       tol: float = 1e-6, cov_floor: float = 1e-6):
    """Run ``restarts`` EM fits of a k-component mixture side by side.

    Each restart starts from k data points as means, the data covariance and
    equal weights.  Returns ``(best, traces)``: ``traces[r]`` holds the mean
    per-point log-likelihood at each E-step of restart ``r``, which stops once
    it improves by less than ``tol``.
    """
    x = _as_points(points)
    n = len(x)
    if n < 2:
        raise ValueError("EM needs at least two points")
    c = np.cov(x, rowvar=False)
    bxx, bxy, byy = _clip_cov(np.array(c[0, 0]), np.array(c[0, 1]), np.array(c[1, 1]), cov_floor)

    mu = np.stack([x[rng.choice(n, size=k, replace=n < k)] for _ in range(restarts)])
    sxx = np.full((restarts, k), float(bxx))
    sxy = np.full((restarts, k), float(bxy))
    syy = np.full((restarts, k), float(byy))
    w = np.full((restarts, k), 1.0 / k)
    feats = np.column_stack([np.ones(n), x[:, 0], x[:, 1]])
    traces: list[list[float]] = [[] for _ in range(restarts)]
    active = np.ones(restarts, dtype=bool)

    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        lp = _log_joint(x, w[idx], mu[idx], sxx[idx], sxy[idx], syy[idx])
        norm = _logsumexp(lp)
        ll = norm[..., 0].mean(axis=1)
        for j, r in enumerate(idx):
            tr = traces[r]
            if tr and ll[j] - tr[-1] < tol:
                active[r] = False
            tr.append(float(ll[j]))
        keep = active[idx]
        if not keep.any():
            break
        idx = idx[keep]
        resp = np.exp(lp[keep] - norm[keep])                     # (a, n, k)
        mom = np.einsum("ank,nf->akf", resp, feats)              # counts and first moments
        nk = mom[..., 0]
        safe = np.maximum(nk, 1e-300)
        mx, my = mom[..., 1] / safe, mom[..., 2] / safe
        dx = x[None, :, None, 0] - mx[:, None, :]
        dy = x[None, :, None, 1] - my[:, None, :]
        cxx = (resp * dx * dx).sum(axis=1) / safe
        cxy = (resp * dx * dy).sum(axis=1) / safe
        cyy = (resp * dy * dy).sum(axis=1) / safe
        empty = nk <= 1e-12
        cxx, cxy, cyy = (np.where(empty, float(b), v) for b, v in ((bxx, cxx), (bxy, cxy), (byy, cyy)))
        sxx[idx], sxy[idx], syy[idx] = _clip_cov(cxx, cxy, cyy, cov_floor)
        mu[idx, :, 0], mu[idx, :, 1] = mx, my
        w[idx] = nk / n

    best = int(np.argmax([tr[-1] for tr in traces]))
    live = w[best] > 0
    cov = np.stack([np.stack([sxx[best], sxy[best]], -1), np.stack([sxy[best], syy[best]], -1)], -2)
    mix = GaussianMixture(w[best][live] / w[best][live].sum(), mu[best][live], cov[live])
    total_ll = mix.score(x)
    n_params = 6 * k - 1
    bic = -2.0 * total_ll + n_params * math.log(n)
    return GaussianMixture(mix.weights, mix.means, mix.covariances, total_ll, bic), traces


def fit_gmm(points, rng: np.random.Generator, k_range=range(1, 6), restarts: int = 10,
            max_iter: int = 100, tol: float = 1e-6, cov_floor: float = 1e-6) -> GaussianMixture:
    """Fit each candidate k by EM and keep the lowest-BIC mixture (ties: smaller k)."""
    x = _as_points(points)
    if len(x) < 2:
        raise ValueError("need at least two points to fit a mixture")
    best = None
    for k in k_range:
        if k > len(x):
            break
        mix, _ = em(x, k, rng, restarts=restarts, max_iter=max_iter, tol=tol, cov_floor=cov_floor)
        if best is None or mix.bic < best.bic:
            best = mix
    return best
