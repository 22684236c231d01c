"""Box dimension and Minkowski contents at infinity from tube scans.

A finite scan cannot realise ``limsup``/``liminf``; the contents reported here
are extrema of ``V(t) / t**(N + r)`` over the tail window of the scan, with a
drift flag computed on the right half of that window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .regions import SCHEMA_VERSION
from .tube import TubeScan

# Slopes of log V against log t below this are reported as dimension -inf.
SLOPE_FLOOR = -50.0
# Relative noise floor of analytic scans (quadrature/root tolerance).
ANALYTIC_NOISE = 1e-9
MIN_POINTS = 8


@dataclass(frozen=True)
class Oscillation:
    amplitude: float
    period_log_t: float | None = None
    r_squared: float = 0.0
    stable: bool = False


@dataclass(frozen=True)
class DimensionEstimate:
    """Result of :func:`estimate_dimension`.

    ``D_hat`` is ``-inf`` when the volume decays faster than any power in the
    window (slope below the floor, or underflow to zero).
    """

    D_hat: float
    window: tuple
    content_upper: float
    content_lower: float
    measurable_verdict: str
    residual_oscillation: Oscillation
    N: int
    slope_stderr: float = 0.0
    drift: bool = False
    noise: float = 0.0
    right_ratio: float = math.nan
    notes: tuple = field(default_factory=tuple)

    @property
    def minus_infinity(self) -> bool:
        return self.D_hat == -math.inf

    def to_dict(self) -> dict:
        def num(v):
            if v is None:
                return None
            if math.isinf(v):
                return "inf" if v > 0 else "-inf"
            if math.isnan(v):
                return None
            return float(v)

        osc = self.residual_oscillation
        return {
            "schema": SCHEMA_VERSION,
            "D_hat": num(self.D_hat),
            "minus_infinity": self.minus_infinity,
            "N": self.N,
            "window": [float(self.window[0]), float(self.window[1])],
            "content_upper": num(self.content_upper),
            "content_lower": num(self.content_lower),
            "measurable_verdict": self.measurable_verdict,
            "residual_oscillation": {
                "amplitude": num(osc.amplitude),
                "period_log_t": num(osc.period_log_t),
                "r_squared": num(osc.r_squared),
                "stable": osc.stable,
            },
            "slope_stderr": num(self.slope_stderr),
            "drift": self.drift,
            "notes": list(self.notes),
        }


def _tail(scan: TubeScan, tail_fraction: float):
    if not 0.0 < tail_fraction <= 1.0:
        raise DomainError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    n = len(scan)
    k = max(1, int(math.ceil(tail_fraction * n)))
    return scan.t[n - k:], scan.volume[n - k:], scan.stderr[n - k:]


def _noise(scan_method, v, err):
    if scan_method == "analytic":
        return ANALYTIC_NOISE
    rel = err[v > 0] / v[v > 0]
    return float(np.median(rel)) if rel.size else ANALYTIC_NOISE


def _sinusoid_fit(x, r, period):
    w = 2.0 * math.pi / period
    A = np.column_stack([np.ones_like(x), np.cos(w * x), np.sin(w * x)])
    coef, *_ = np.linalg.lstsq(A, r, rcond=None)
    fit = A @ coef
    ss = float(np.sum((r - r.mean()) ** 2))
    r2 = 1.0 - float(np.sum((r - fit) ** 2)) / ss if ss > 0 else 0.0
    return r2, math.hypot(coef[1], coef[2])


def detect_oscillation(logt, resid, noise) -> Oscillation:
    """Dominant log-periodic component of regression residuals.

    The period is found by scanning sinusoid fits; it counts as stable when the
    fit explains at least half of the residual variance and both halves of the
    window carry comparable amplitude at that period.
    """
    amp = 0.5 * float(np.ptp(resid)) if resid.size else 0.0
    if resid.size < MIN_POINTS or amp <= 3.0 * noise:
        return Oscillation(amp)
    span = float(logt[-1] - logt[0])
    step = float(np.min(np.diff(logt)))
    periods = np.geomspace(2.5 * step, span / 2.0, 600) if span / 2.0 > 2.5 * step else []
    best = (0.0, None, 0.0)
    for p in periods:
        r2, a = _sinusoid_fit(logt, resid, p)
        if r2 > best[0]:
            best = (r2, float(p), a)
    r2, period, _ = best
    if period is None or r2 < 0.5:
        return Oscillation(amp, None, r2, False)
    h = len(logt) // 2
    _, a_left = _sinusoid_fit(logt[:h], resid[:h] - resid[:h].mean(), period)
    _, a_right = _sinusoid_fit(logt[h:], resid[h:] - resid[h:].mean(), period)
    stable = min(a_left, a_right) > 0.5 * max(a_left, a_right) and min(a_left, a_right) > 3 * noise
    return Oscillation(amp, period, r2, bool(stable))


def estimate_dimension(scan: TubeScan, N: int, tail_fraction: float = 0.5,
                       delta: float = 0.05, slope_floor: float = SLOPE_FLOOR,
                       degenerate_tol: float = 0.05) -> DimensionEstimate:
    """Estimate ``dim_B(inf, Ω)`` and the contents at that exponent.

    Parameters
    ----------
    scan : TubeScan
        Tube volumes on a geometric grid.
    N : int
        Ambient dimension.
    tail_fraction : float
        Fraction of the scan (from the right) used as the fit window.
    delta : float
        Content ratio tolerance for the "yes" measurability verdict.

    Returns
    -------
    DimensionEstimate
    """
    t, v, err = _tail(scan, tail_fraction)
    window = (float(t[0]), float(t[-1]))
    pos = v > 0
    if not pos.all():
        # the volume underflows inside the window: faster than any power law
        return DimensionEstimate(-math.inf, window, 0.0, 0.0, "inconclusive",
                                 Oscillation(0.0), N,
                                 notes=("volume vanishes inside the tail window",))
    if pos.sum() < MIN_POINTS:
        raise DomainError(f"need at least {MIN_POINTS} positive volumes in the tail window, "
                          f"got {int(pos.sum())}")
    logt = np.log(t)
    logv = np.log(v)
    A = np.column_stack([np.ones_like(logt), logt])
    coef, res, *_ = np.linalg.lstsq(A, logv, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])
    resid = logv - (intercept + slope * logt)
    dof = max(len(logt) - 2, 1)
    s2 = float(np.sum(resid ** 2)) / dof
    slope_se = math.sqrt(s2 / float(np.sum((logt - logt.mean()) ** 2)))
    if slope < slope_floor:
        return DimensionEstimate(-math.inf, window, 0.0, 0.0, "inconclusive",
                                 Oscillation(0.0), N, slope_stderr=slope_se,
                                 notes=(f"slope {slope:.4g} below floor {slope_floor}",))
    D_hat = slope - N
    ratio = np.exp(logv - slope * logt)
    upper, lower = float(ratio.max()), float(ratio.min())
    h = len(ratio) // 2
    ru, rl = float(ratio[h:].max()), float(ratio[h:].min())
    drift = abs(ru / upper - 1.0) > 0.05 or abs(rl / lower - 1.0) > 0.05
    noise = _noise(scan.method, v, err)
    osc = detect_oscillation(logt, resid, noise)
    right_ratio = ru / rl
    notes = []
    if abs(D_hat + N) <= degenerate_tol:
        verdict = "no (degenerate)"
        notes.append("D within tolerance of -N: Minkowski degenerate")
    elif osc.stable and osc.amplitude > 3.0 * noise:
        verdict = "no"
    elif right_ratio <= 1.0 + delta:
        verdict = "yes"
    else:
        verdict = "inconclusive"
    return DimensionEstimate(D_hat, window, upper, lower, verdict, osc, N, slope_se, drift,
                             noise, right_ratio, tuple(notes))


def content_at_exponent(scan: TubeScan, N: int, r: float, tail_fraction: float = 0.5,
                        window: slice | None = None) -> tuple:
    """Upper and lower ``r``-dimensional content proxies over a window.

    Returns ``(max, min)`` of ``V(t_i) / t_i**(N + r)``. ``window`` selects
    scan indices explicitly and overrides ``tail_fraction``.
    """
    if window is not None:
        t, v = scan.t[window], scan.volume[window]
    else:
        t, v, _ = _tail(scan, tail_fraction)
    if len(t) == 0:
        raise DomainError("empty content window")
    with np.errstate(divide="ignore"):
        q = np.exp(np.log(v) - (N + r) * np.log(t))
    return float(q.max()), float(q.min())


@dataclass(frozen=True)
class MeasurabilityReport:
    verdict: str
    content_ratio: float
    oscillation: Oscillation
    expected_period: float | None = None
    period_matches: bool | None = None


def measurability_diagnostic(scan: TubeScan, N: int, delta: float = 0.05,
                             tail_fraction: float = 0.5,
                             expected_period: float | None = None) -> MeasurabilityReport:
    """Measurability verdict with the detected log-periodic oscillation.

    ``expected_period`` (e.g. ``log(1/a)`` for a Cantor drum) is compared with
    the detected period at 5% relative tolerance.
    """
    est = estimate_dimension(scan, N, tail_fraction, delta)
    if est.minus_infinity:
        raise DomainError("measurability needs a finite dimension estimate")
    osc = est.residual_oscillation
    match = None
    if expected_period is not None:
        match = (osc.period_log_t is not None
                 and abs(osc.period_log_t / expected_period - 1.0) <= 0.05)
    return MeasurabilityReport(est.measurable_verdict, est.content_upper / est.content_lower,
                               osc, expected_period, match)
