"""Smooth, sampleable distributions fit to empirical CCDFs.

Degrees, capacities and propagation delays of the network being shrunk are
each summarized by their complementary CDF, fit with a cubic smoothing
spline in (log x, log ccdf) space, projected to be non-increasing, and then
sampled by inverse transform. Fewer than 4 distinct support points fall
back to the empirical step function; a single support point becomes a point
mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import BSpline, make_smoothing_spline

GRID_POINTS = 2048
MAX_FIT_POINTS = 256


@dataclass(frozen=True)
class EmpiricalCCDF:
    """P(X >= x) evaluated at every distinct observed value, descending from 1."""

    xs: np.ndarray
    ccdf: np.ndarray

    def __post_init__(self):
        if len(self.xs) == 0:
            raise ValueError("empty support")
        if self.ccdf[0] != 1.0:
            raise ValueError("ccdf must start at 1")
        if np.any(np.diff(self.ccdf) > 0):
            raise ValueError("ccdf must be non-increasing")


def empirical_ccdf(values) -> EmpiricalCCDF:
    """Empirical CCDF of positive values: F(x) = #(values >= x) / n."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise ValueError("no values given")
    if not np.all(np.isfinite(vals)):
        raise ValueError("values must be finite")
    if np.any(vals <= 0):
        raise ValueError("values must be positive")
    svals = np.sort(vals)
    xs = np.unique(svals)
    n_ge = vals.size - np.searchsorted(svals, xs, side="left")
    return EmpiricalCCDF(xs=xs, ccdf=n_ge / vals.size)


class SmoothedDist:
    """A fitted 1-D distribution, evaluated through its CCDF.

    kind is "spline" (the normal case), "step" (too few points to fit,
    empirical step CCDF used as-is) or "point" (degenerate point mass).
    The spline lives in (log x, log ccdf) space; evaluation goes through a
    dense monotone grid obtained by projecting the spline to be
    non-increasing with ccdf(x_lo) = 1.
    """

    def __init__(
        self,
        kind: str,
        x_lo: float,
        x_hi: float,
        integer_valued: bool = False,
        spline: BSpline | None = None,
        step_xs: np.ndarray | None = None,
        step_ccdf: np.ndarray | None = None,
        smoothing: float | None = None,
    ):
        self.kind = kind
        self.x_lo = float(x_lo)
        self.x_hi = float(x_hi)
        self.integer_valued = bool(integer_valued)
        self.spline = spline
        self.step_xs = step_xs
        self.step_ccdf = step_ccdf
        self.smoothing = smoothing
        if kind == "spline":
            self._grid_logx = np.linspace(np.log(self.x_lo), np.log(self.x_hi), GRID_POINTS)
            y = spline(self._grid_logx)
            y[0] = 0.0  # ccdf(x_lo) = 1 by definition
            y = np.minimum(y, 0.0)
            self._grid_logc = np.minimum.accumulate(y)

    # -- evaluation ------------------------------------------------------

    def ccdf(self, x):
        """P(X >= x). Below the domain this is 1; above it, the mass that the
        sampler clamps onto x_hi (0 only for step/point kinds past the top)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if self.kind == "point":
            out = np.where(x <= self.x_lo, 1.0, 0.0)
        elif self.kind == "step":
            idx = np.searchsorted(self.step_xs, x, side="right") - 1
            out = np.where(idx < 0, 1.0, self.step_ccdf[np.clip(idx, 0, len(self.step_xs) - 1)])
            out = np.where(x > self.step_xs[-1], 0.0, out)
        else:
            lx = np.log(np.clip(x, self.x_lo, self.x_hi))
            out = np.exp(np.interp(lx, self._grid_logx, self._grid_logc))
            out = np.where(x < self.x_lo, 1.0, out)
        return float(out[0]) if scalar else out

    def quantile(self, u):
        """Inverse CCDF: smallest x with ccdf(x) <= u, clamped to the domain."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        if np.any((u <= 0) | (u > 1)):
            raise ValueError("u must lie in (0, 1]")
        if self.kind == "point":
            out = np.full_like(u, self.x_lo)
        elif self.kind == "step":
            # largest support point whose ccdf is still >= u
            desc = -self.step_ccdf
            idx = np.searchsorted(desc, -u, side="right") - 1
            out = self.step_xs[np.clip(idx, 0, len(self.step_xs) - 1)]
        else:
            logu = np.log(u)
            y = self._grid_logc
            # y is non-increasing; find first grid index with y <= logu
            idx = np.searchsorted(-y, -logu, side="left")
            idx = np.clip(idx, 1, GRID_POINTS - 1)
            y0, y1 = y[idx - 1], y[idx]
            x0, x1 = self._grid_logx[idx - 1], self._grid_logx[idx]
            frac = np.where(y1 < y0, (y0 - logu) / np.where(y1 < y0, y0 - y1, 1.0), 1.0)
            lx = x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0)
            out = np.exp(lx)
            out = np.where(logu >= 0.0, self.x_lo, out)
            out = np.where(logu <= y[-1], self.x_hi, out)
        return float(out[0]) if scalar else out

    def integer_ccdf(self, k):
        """CCDF of the integer-discretized variable: P(round(X) >= k)."""
        k = np.asarray(k, dtype=float)
        scalar = k.ndim == 0
        k = np.atleast_1d(k)
        out = np.where(k - 0.5 > self.x_hi, 0.0, self.ccdf(np.maximum(k - 0.5, self.x_lo)))
        out = np.where(k <= 1, 1.0, out)
        return float(out[0]) if scalar else out

    def sample(self, n: int, rng_seed: int) -> np.ndarray:
        """Draw n values by inverse transform; deterministic given the seed."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = np.random.default_rng(rng_seed)
        u = 1.0 - rng.random(n)  # uniform on (0, 1]
        x = self.quantile(u)
        if self.integer_valued:
            x = np.maximum(1, np.rint(x)).astype(int)
        return x

    # -- serialization ---------------------------------------------------

    def save(self, path: str | Path) -> None:
        lines = ["# netshrink fitted distribution"]
        lines.append(f"kind {self.kind}")
        lines.append(f"integer_valued {int(self.integer_valued)}")
        lines.append(f"smoothing {'gcv' if self.smoothing is None else repr(self.smoothing)}")
        lines.append(f"domain {self.x_lo!r} {self.x_hi!r}")
        if self.kind == "spline":
            lines.append("knots " + " ".join(repr(v) for v in self.spline.t))
            lines.append("coeffs " + " ".join(repr(v) for v in self.spline.c))
            lines.append(f"degree {self.spline.k}")
        else:
            lines.append("points " + " ".join(repr(v) for v in self.step_xs))
            lines.append("ccdf " + " ".join(repr(v) for v in self.step_ccdf))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SmoothedDist":
        fields: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(" ")
            fields[key] = rest
        kind = fields["kind"]
        x_lo, x_hi = (float(v) for v in fields["domain"].split())
        integer_valued = bool(int(fields["integer_valued"]))
        smoothing = None if fields["smoothing"] == "gcv" else float(fields["smoothing"])
        if kind == "spline":
            t = np.array([float(v) for v in fields["knots"].split()])
            c = np.array([float(v) for v in fields["coeffs"].split()])
            spl = BSpline(t, c, int(fields["degree"]))
            return cls(kind, x_lo, x_hi, integer_valued, spline=spl, smoothing=smoothing)
        xs = np.array([float(v) for v in fields["points"].split()])
        cc = np.array([float(v) for v in fields["ccdf"].split()])
        return cls(kind, x_lo, x_hi, integer_valued, step_xs=xs, step_ccdf=cc,
                   smoothing=smoothing)


def fit_smoothing_spline(
    e: EmpiricalCCDF,
    smoothing: float | None = None,
    integer_valued: bool = False,
    extrapolation_factor: float = 1.0,
) -> SmoothedDist:
    """Fit a smooth CCDF to an empirical one.

    smoothing is the spline regularization weight; None selects it by
    generalized cross-validation. extrapolation_factor > 1 extends the
    domain above the largest observation (useful only when upscaling).
    """
    if extrapolation_factor < 1.0:
        raise ValueError("extrapolation_factor must be >= 1")
    xs, cc = e.xs, e.ccdf
    if len(xs) == 1:
        return SmoothedDist("point", xs[0], xs[0], integer_valued,
                            step_xs=xs.copy(), step_ccdf=cc.copy())
    if len(xs) < 4:
        return SmoothedDist("step", xs[0], xs[-1], integer_valued,
                            step_xs=xs.copy(), step_ccdf=cc.copy(), smoothing=smoothing)
    if len(xs) > MAX_FIT_POINTS:
        xs, cc = _thin_support(xs, cc, MAX_FIT_POINTS)
    spl = _fit_spline(np.log(xs), np.log(cc), smoothing)
    x_hi = e.xs[-1] * extrapolation_factor
    return SmoothedDist("spline", e.xs[0], x_hi, integer_valued, spline=spl,
                        smoothing=smoothing)


def _thin_support(xs: np.ndarray, cc: np.ndarray, n_keep: int):
    """Keep about n_keep support points, evenly spaced in log x, endpoints
    always included. Mirrors how R's smooth.spline thins its knot set."""
    targets = np.geomspace(xs[0], xs[-1], n_keep)
    idx = np.unique(np.searchsorted(xs, targets).clip(0, len(xs) - 1))
    idx[0], idx[-1] = 0, len(xs) - 1
    idx = np.unique(idx)
    return xs[idx], cc[idx]


def _fit_spline(lx: np.ndarray, ly: np.ndarray, smoothing: float | None) -> BSpline:
    """GCV-selected smoothing by default; fall back to fixed regularization
    when the GCV system is ill-conditioned for this support."""
    candidates = [smoothing] if smoothing is not None else [None, 1e-6, 1e-3, 1.0]
    last_err = None
    for lam in candidates:
        try:
            return make_smoothing_spline(lx, ly, lam=lam)
        except (ValueError, np.linalg.LinAlgError) as exc:
            last_err = exc
    raise ValueError(f"could not fit smoothing spline: {last_err}")
