"""Complex dimensions: poles of closed-form zeta functions and their residues.

Poles are isolated by recursive bisection of a rectangular window, using the
argument principle ``(1/2πi) ∮ ζ'/ζ`` (zeros minus poles) and the zeroth
moment ``(1/2πi) ∮ ζ`` to decide which cells are active. Cells that shrink to
one simple pole are refined with circle moment ratios; residues come from the
trapezoid rule on a circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    AccumulationBoundaryError,
    DepthExhaustedError,
    DomainError,
    PoleError,
    UnsupportedError,
)
from .minkowski import content_at_exponent, estimate_dimension
from .regions import SCHEMA_VERSION, IntervalChain, Norm, StackedPower
from .tube import Grid, tube_scan
from .zeta import ZetaEvaluator, closed_form_array, has_closed_form, zeta_closed_form, zeta_numeric

# split point of a cell, kept off the midpoint so symmetric poles avoid edges
SPLIT = 0.5 + 0.0731
LEAF_DIAMETER = 1e-2
NUDGE_MAX = 1e-3
ACCUMULATION_GAP = 1e-3


@dataclass(frozen=True)
class WindowSpec:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    depth: int = 40
    points: int = 256

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DomainError("window needs re_min < re_max and im_min < im_max")

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, s: complex) -> bool:
        return self.re_min <= s.real <= self.re_max and self.im_min <= s.imag <= self.im_max

    def as_tuple(self):
        return (self.re_min, self.re_max, self.im_min, self.im_max)


@dataclass(frozen=True)
class PoleReport:
    location: complex
    residue: complex
    order: int
    window: WindowSpec
    method: str = "contour"
    residue_error: float = 0.0

    def to_dict(self) -> dict:
        return {"re": self.location.real, "im": self.location.imag,
                "res_re": self.residue.real, "res_im": self.residue.imag,
                "order": self.order}


def _require_closed_form(ev: ZetaEvaluator) -> ZetaEvaluator:
    if isinstance(ev.region, IntervalChain):
        raise UnsupportedError("the interval-chain series has no continuation past its "
                               "abscissa, so there are no poles to find")
    if not has_closed_form(ev.region, ev.norm):
        raise UnsupportedError("pole finding needs a closed-form evaluator")
    if ev.mode != "closed_form":
        ev = ev.with_mode("closed_form")
    return ev


def _func(ev):
    return lambda s: closed_form_array(ev, s)


def _derivative(f, s):
    """``f'`` by fourth-order central differences along both axes, averaged."""
    h = 1e-5 * (1.0 + np.abs(s))
    dr = (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * h)
    ih = 1j * h
    di = (f(s - 2 * ih) - 8 * f(s - ih) + 8 * f(s + ih) - f(s + 2 * ih)) / (12 * ih)
    return 0.5 * (dr + di)


_GL_CACHE: dict = {}


def _gl(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _rect_nodes(box, n):
    """Quadrature nodes and weights (``ds``) along the positively oriented boundary."""
    x0, x1, y0, y1 = box
    x, w = _gl(n)
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    nodes, weights = [], []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass
class _Moments:
    W: float
    m0: complex
    m1: complex
    fmax: float
    converged: bool


def _rect_moments(f, box, n0=32, nmax=2048) -> _Moments:
    prev = None
    n = n0
    while True:
        s, w = _rect_nodes(box, n)
        fs = f(s)
        if not np.all(np.isfinite(fs)):
            raise PoleError(complex(s[~np.isfinite(fs)][0]), "pole on a cell boundary")
        d = _derivative(f, s)
        W = complex(np.sum(w * d / fs) / (2j * math.pi))
        m0 = complex(np.sum(w * fs) / (2j * math.pi))
        m1 = complex(np.sum(w * s * fs) / (2j * math.pi))
        cur = _Moments(W.real, m0, m1, float(np.max(np.abs(fs))), False)
        if prev is not None and abs(cur.W - prev.W) < 1e-4 and abs(cur.W - round(cur.W)) < 1e-3 \
                and abs(cur.m0 - prev.m0) <= 1e-9 * (1.0 + cur.fmax):
            cur.converged = True
            return cur
        if n >= nmax:
            return cur
        prev = cur
        n *= 2


def _circle(f, c, r, n):
    theta = 2.0 * math.pi * np.arange(n) / n
    e = np.exp(1j * theta)
    s = c + r * e
    return s, e, f(s)


def _circle_moments(f, c, r, n=128):
    s, e, fs = _circle(f, c, r, n)
    m0 = r * np.mean(fs * e)
    m1 = r * np.mean(s * fs * e)
    d = _derivative(f, s)
    W = (r * np.mean(d / fs * e)).real
    return complex(m0), complex(m1), float(W)


def _check_accumulation(ev, box):
    if isinstance(ev.region, StackedPower):
        x0, x1, y0, y1 = box
        # distance from -2 to the closed window
        dx = max(x0 - (-2.0), 0.0, -2.0 - x1)
        dy = max(y0, 0.0, -y1)
        if math.hypot(dx, dy) < ACCUMULATION_GAP:
            raise AccumulationBoundaryError(
                -2.0, "window touches s = -2, an accumulation point of poles; keep windows "
                f"at least {ACCUMULATION_GAP} away")


def _nudge(f, window: WindowSpec):
    """Expand the window slightly until its boundary is comfortably pole-free."""
    box = window.as_tuple()
    step = NUDGE_MAX / 8
    for i in range(9):
        grow = i * step
        b = (box[0] - grow, box[1] + grow, box[2] - grow, box[3] + grow)
        s, _ = _rect_nodes(b, max(64, window.points))
        with np.errstate(all="ignore"):
            fs = f(s)
        if np.all(np.isfinite(fs)):
            med = float(np.median(np.abs(fs)))
            if float(np.max(np.abs(fs))) <= 1e8 * (med + 1e-300):
                return b
    raise PoleError(complex(0.5 * (box[0] + box[1]), 0.5 * (box[2] + box[3])),
                    "could not move the window boundary off a pole within 1e-3")


def count_window(ev: ZetaEvaluator, window: WindowSpec) -> float:
    """Counting integral ``(1/2πi) ∮ ζ'/ζ`` over the (nudged) window: zeros minus poles."""
    ev = _require_closed_form(ev)
    f = _func(ev)
    box = _nudge(f, window)
    return _rect_moments(f, box, n0=max(32, window.points // 4), nmax=8192).W


def _refine(f, box, m: _Moments):
    """Pole location from moment ratios, first on the cell then on shrinking circles."""
    c = m.m1 / m.m0
    x0, x1, y0, y1 = box
    r = max(x1 - x0, y1 - y0)
    for _ in range(6):
        m0, m1, _ = _circle_moments(f, c, r)
        new = m1 / m0
        done = abs(new - c) <= 1e-13 * (1.0 + abs(c))
        c = new
        if done:
            break
        r = max(r / 4.0, 1e-4)
    return c


def _split(f, cell):
    """Bisect the longer side, moving the cut until both halves integrate cleanly."""
    x0, x1, y0, y1 = cell
    best = None
    for frac in (SPLIT, 1.0 - SPLIT, 0.5 + 0.1713, 0.5 - 0.1713, 0.5 + 0.0377):
        if (x1 - x0) >= (y1 - y0):
            xm = x0 + frac * (x1 - x0)
            kids = [(x0, xm, y0, y1), (xm, x1, y0, y1)]
        else:
            ym = y0 + frac * (y1 - y0)
            kids = [(x0, x1, y0, ym), (x0, x1, ym, y1)]
        try:
            out = [(c, _rect_moments(f, c)) for c in kids]
        except PoleError:
            continue
        if all(mc.converged for _, mc in out):
            return out
        best = best or out
    if best is None:
        raise PoleError(complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), "every cut hits a pole")
    return best


def find_poles(ev: ZetaEvaluator, window: WindowSpec, residue_radius: float | None = None):
    """All poles of a closed-form zeta function inside ``window``.

    Returns a list of :class:`PoleReport` sorted by ``(Re, Im)``.

    Raises
    ------
    AccumulationBoundaryError
        The window touches an accumulation point of poles.
    DepthExhaustedError
        A cell stays unresolved at the depth limit.
    """
    ev = _require_closed_form(ev)
    _check_accumulation(ev, window.as_tuple())
    f = _func(ev)
    box = _nudge(f, window)
    _check_accumulation(ev, box)
    stack = [(box, 0, _rect_moments(f, box))]
    found = []
    while stack:
        cell, depth, m = stack.pop()
        k = int(round(m.W))
        thresh = 1e-9 * (1.0 + m.fmax) * (abs(cell[1] - cell[0]) + abs(cell[3] - cell[2]))
        active = k != 0 or abs(m.m0) > thresh or not m.converged
        if not active:
            continue
        diam = math.hypot(cell[1] - cell[0], cell[3] - cell[2])
        if k == -1 and m.converged and diam < LEAF_DIAMETER:
            found.append((_refine(f, cell, m), cell))
            continue
        if k > 0 and abs(m.m0) <= thresh and m.converged:
            continue  # zeros only
        if depth >= window.depth:
            raise DepthExhaustedError(cell)
        stack.extend((c, depth + 1, mc) for c, mc in _split(f, cell))
    reports = []
    for loc, cell in found:
        if any(abs(loc - p.location) < 1e-8 for p in reports):
            continue
        r = residue_radius or min(1e-2, 0.25 * max(cell[1] - cell[0], cell[3] - cell[2]) + 1e-4)
        res, err, _, order = _residue(ev, loc, r, window.points)
        reports.append(PoleReport(complex(loc), res, order, window, "contour", err))
    reports.sort(key=lambda p: (round(p.location.real, 10), round(p.location.imag, 10)))
    return reports


def _residue(ev, location, radius, points):
    f = _func(_require_closed_form(ev))
    r = float(radius)
    for _ in range(4):
        m0, _, W = _circle_moments(f, location, r, points)
        order = -int(round(W))
        if order == 1 and abs(W + 1) < 1e-3:
            s, e, fs = _circle(f, location, r, 2 * points)
            m0_2 = complex(r * np.mean(fs * e))
            return m0_2, abs(m0_2 - m0), r, order
        r *= 0.5
    raise DomainError(f"circle around {location} does not enclose exactly one simple pole")


def residue_at(ev: ZetaEvaluator, location: complex, radius: float = 1e-2,
               points: int = 256) -> complex:
    """Residue ``(1/2πi) ∮ ζ ds`` on a circle, trapezoid rule.

    The radius is halved (up to three times) until the circle encloses exactly
    one simple pole.
    """
    return residue_with_error(ev, location, radius, points)[0]


def residue_with_error(ev, location, radius=1e-2, points=256):
    """``(residue, error_estimate, radius_used)``; the error compares n and 2n points."""
    res, err, r, _ = _residue(ev, complex(location), radius, points)
    return res, err, r


def principal_dimensions(ev: ZetaEvaluator, im_range: float):
    """Poles on the critical line ``Re s = D`` with ``|Im s| <= im_range``.

    The stacked set has no pole at its dimension (``-2`` is an accumulation
    point of poles), so the list is empty there.
    """
    ev = _require_closed_form(ev)
    D = ev.abscissa
    if isinstance(ev.region, StackedPower):
        return []
    win = WindowSpec(D - 0.05, D + 0.05, -float(im_range), float(im_range))
    return [p for p in find_poles(ev, win) if abs(p.location.real - D) <= 1e-8]


# ---------------------------------------------------------------------------
# residue versus Minkowski content


@dataclass(frozen=True)
class ResidueContentReport:
    family: str
    N: int
    D: float
    D_hat: float | None
    residue: complex | None
    residue_error: float
    lower_bound: float | None
    upper_bound: float | None
    measurable: bool
    passed: bool
    skipped: bool
    reason: str = ""
    method: str = ""
    content_upper: float | None = None
    content_lower: float | None = None

    def to_dict(self) -> dict:
        def c(z):
            return None if z is None else {"re": z.real, "im": z.imag}
        return {"schema": SCHEMA_VERSION, "family": self.family, "N": self.N, "D": self.D,
                "D_hat": self.D_hat, "residue": c(self.residue),
                "residue_error": self.residue_error, "lower_bound": self.lower_bound,
                "upper_bound": self.upper_bound, "content_upper": self.content_upper,
                "content_lower": self.content_lower, "measurable": self.measurable,
                "passed": self.passed, "skipped": self.skipped, "reason": self.reason,
                "method": self.method}


def _neville_zero(xs, ys):
    """Polynomial extrapolation of ``ys(xs)`` to 0; returns value and last correction."""
    p = list(ys)
    n = len(xs)
    last = 0.0
    for k in range(1, n):
        for i in range(n - k):
            new = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
            if i == 0:
                last = abs(new - p[0])
            p[i] = new
    return p[0], last


def residue_by_scaling(ev: ZetaEvaluator, D: float, epsilons=(0.2, 0.1, 0.05, 0.025)):
    """Residue at the real pole ``D`` from ``ε ζ(D + ε)`` extrapolated to ``ε = 0``."""
    vals = []
    for e in epsilons:
        if ev.mode == "closed_form":
            z = complex(zeta_closed_form(ev, D + e))
        else:
            z = zeta_numeric(ev, D + e, margin=min(epsilons) / 2)
        vals.append(e * z)
    return _neville_zero(list(epsilons), vals)


def residue_content_check(region, norm=Norm.SUP, scan=None, delta: float = 0.05,
                          widen: float = 1e-3) -> ResidueContentReport:
    """Check ``-(N+D) M_lower <= res(ζ, D) <= -(N+D) M_upper``.

    ``D`` is the exact abscissa of the catalog family; the contents come from
    a tube scan (default: 64-point analytic scan at ratio ``2**(1/4)``). For
    families judged Minkowski measurable the residue must equal
    ``-(N+D) M`` within ``delta``.
    """
    norm = Norm.parse(norm)
    N = region.ambient_dim
    D = float(region.box_dimension)
    fam = region.family
    if not math.isfinite(D):
        return ResidueContentReport(fam, N, D, None, None, 0.0, None, None, False, False, True,
                                    "dimension is -inf")
    if abs(D + N) <= 0.05:
        return ResidueContentReport(fam, N, D, None, None, 0.0, None, None, False, False, True,
                                    "D = -N: Minkowski degenerate, theorem does not apply")
    if scan is None:
        scan = tube_scan(region, norm, Grid(region.t_min, 2 ** 0.25, 64))
    est = estimate_dimension(scan, N)
    upper, lower = content_at_exponent(scan, N, D)
    if has_closed_form(region, norm) and not isinstance(region, IntervalChain):
        ev = ZetaEvaluator(region, norm, None, "closed_form")
        res, err, _ = residue_with_error(ev, D, 0.1)
        method = "contour"
    else:
        mode = "closed_form" if has_closed_form(region, norm) else "numeric"
        ev = ZetaEvaluator(region, norm, None, mode)
        res, err = residue_by_scaling(ev, D)
        method = f"epsilon-scaling ({mode})"
    k = -(N + D)
    lo_b, up_b = k * lower, k * upper
    measurable = est.measurable_verdict == "yes"
    if measurable:
        target = k * math.sqrt(upper * lower)
        passed = abs(res - target) <= delta * abs(target)
    else:
        passed = lo_b * (1 - widen) - err <= res.real <= up_b * (1 + widen) + err \
            and abs(res.imag) <= 1e-8 + err
    return ResidueContentReport(fam, N, D, est.D_hat, complex(res), float(err), lo_b, up_b,
                                measurable, bool(passed), False, "", method, upper, lower)
