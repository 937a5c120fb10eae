"""Bracketing, bisection and half-maximum width for scalar curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, OpenSupportError

MAX_BISECT_ITER = 200


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if math.isnan(self.f_lo) or math.isnan(self.f_hi):
            raise ValueError("bracket endpoint value is NaN")
        if np.sign(self.f_lo) == np.sign(self.f_hi):
            raise ValueError(
                f"no sign change on [{self.lo}, {self.hi}]: f = ({self.f_lo}, {self.f_hi})"
            )


class BracketList(list):
    """List of brackets that also reports how many grid samples were non-finite."""

    nonfinite: int = 0


def _sample(f, xs, vectorized):
    if vectorized:
        try:
            ys = np.asarray(f(xs), dtype=float)
            if ys.shape == xs.shape:
                return ys
        except ValueError:
            pass  # fall back to per-sample evaluation to isolate the bad points
    ys = np.empty_like(xs)
    for k, x in enumerate(xs):
        try:
            ys[k] = float(f(float(x)))
        except ValueError:
            ys[k] = math.nan
    return ys


def scan_brackets(f, lo, hi, samples, vectorized=False):
    """Sample ``f`` on ``samples`` evenly spaced points and bracket each sign change.

    Non-finite samples (including ones whose evaluation raises ``ValueError``)
    are skipped and counted in ``result.nonfinite``. A sample that is exactly
    zero yields one bracket reaching to its neighbour. With ``vectorized=True``
    ``f`` is first called once on the whole grid.
    """
    if not lo < hi:
        raise ValueError(f"scan interval needs lo < hi, got [{lo}, {hi}]")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    xs = np.linspace(lo, hi, int(samples))
    ys = _sample(f, xs, vectorized)
    ok = np.isfinite(ys)
    out = BracketList()
    out.nonfinite = int((~ok).sum())
    pts = list(zip(xs[ok].tolist(), ys[ok].tolist()))

    for i in range(len(pts) - 1):
        (xa, ya), (xb, yb) = pts[i], pts[i + 1]
        if ya == 0.0 and (i > 0 or yb == 0.0):
            continue  # already emitted as the right end of the previous pair
        if ya == 0.0 or yb == 0.0 or (ya < 0) != (yb < 0):
            out.append(Bracket(xa, xb, ya, yb))
    return out


def bisect(f, bracket: Bracket, x_tol):
    """Bisection to within ``x_tol`` of a root inside ``bracket``."""
    if not x_tol > 0:
        raise ValueError("x_tol must be positive")
    lo, hi, f_lo = bracket.lo, bracket.hi, bracket.f_lo
    if f_lo == 0.0:
        return lo
    if bracket.f_hi == 0.0:
        return hi
    for _ in range(MAX_BISECT_ITER):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 2.0 * x_tol or mid in (lo, hi):
            return mid
        f_mid = float(f(mid))
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise ConvergenceError(
        f"bisection did not reach x_tol={x_tol} in {MAX_BISECT_ITER} steps; "
        f"last interval [{lo!r}, {hi!r}]",
        [bracket],
    )


def find_roots(f, lo, hi, samples, x_tol):
    return [bisect(f, b, x_tol) for b in scan_brackets(f, lo, hi, samples)]


def _crossing(x0, y0, x1, y1, level):
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def fwhm(x, y=None):
    """Full width at half maximum by linear interpolation of the outermost crossings.

    Takes either two arrays ``x, y`` or a single sequence of ``(x, y)`` pairs.
    """
    if y is None:
        pairs = np.asarray(x, dtype=float)
        x, y = pairs[:, 0], pairs[:, 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3 or x.shape != y.shape:
        raise ValueError("fwhm needs at least 3 (x, y) samples")
    if np.any(np.diff(x) <= 0):
        raise ValueError("fwhm needs strictly increasing x")
    peak = y.max()
    if not peak > 0:
        raise ValueError("fwhm needs max(y) > 0")
    half = peak / 2.0
    above = np.flatnonzero(y >= half)
    i, j = above[0], above[-1]
    if i == 0:
        raise OpenSupportError("curve does not drop below half maximum on the left", "left")
    if j == x.size - 1:
        raise OpenSupportError("curve does not drop below half maximum on the right", "right")
    left = _crossing(x[i - 1], y[i - 1], x[i], y[i], half)
    right = _crossing(x[j], y[j], x[j + 1], y[j + 1], half)
    return float(right - left)
