"""Tube function at infinity ``V(t) = |{|x| >= t} ∩ Ω|``.

Analytic evaluators cover the catalog families (sup norm for the planar
families, Euclidean norm for the single-profile subgraphs, both norms for the
interval chain, where they coincide). Everything else goes through stratified
Monte Carlo over the envelope's stacked components.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.special import zeta as hurwitz

from .errors import ConvergenceWarning, DomainError, RegionError, UnsupportedError
from .regions import (
    SCHEMA_VERSION,
    CantorDrum,
    ExpSubgraph,
    Generic,
    IntervalChain,
    Norm,
    PowerSubgraph,
    StackedPower,
    component_groups,
    contains_many,
    total_measure,
)

# StackedPower sums stop here; the omitted tail is below 2**-64.
STACKED_TERMS = 64
# IntervalChain Monte Carlo samples intervals up to this index; beyond it the
# remaining intervals are counted exactly (they lie entirely outside the ball).
INTERVAL_CAP = 2 ** 22


@dataclass(frozen=True)
class TubeSample:
    t: float
    volume: float
    stderr: float = 0.0
    norm: Norm = Norm.SUP


@dataclass(frozen=True)
class Grid:
    T0: float
    ratio: float
    count: int

    def __post_init__(self):
        if not self.T0 > 0:
            raise DomainError(f"T0 must be positive, got {self.T0}")
        if not self.ratio > 1:
            raise DomainError(f"grid ratio must exceed 1, got {self.ratio}")
        if int(self.count) < 1:
            raise DomainError("grid needs at least one point")

    def radii(self) -> np.ndarray:
        return self.T0 * self.ratio ** np.arange(int(self.count), dtype=np.float64)


@dataclass
class TubeScan:
    samples: tuple
    grid: Grid
    method: str = "analytic"
    warnings: list = field(default_factory=list)

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def volume(self) -> np.ndarray:
        return np.array([s.volume for s in self.samples])

    @property
    def stderr(self) -> np.ndarray:
        return np.array([s.stderr for s in self.samples])

    @property
    def norm(self) -> Norm:
        return self.samples[0].norm

    def __len__(self):
        return len(self.samples)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "volume", "stderr", "norm"])
        for s in self.samples:
            w.writerow([repr(float(s.t)), repr(float(s.volume)), repr(float(s.stderr)),
                        s.norm.value])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, grid: Grid | None = None) -> "TubeScan":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows or set(rows[0]) != {"t", "volume", "stderr", "norm"}:
            raise RegionError("tube CSV must have header t,volume,stderr,norm")
        samples = tuple(TubeSample(float(r["t"]), float(r["volume"]), float(r["stderr"]),
                                   Norm.parse(r["norm"])) for r in rows)
        if grid is None:
            t = [s.t for s in samples]
            ratio = t[1] / t[0] if len(t) > 1 else 2.0
            grid = Grid(t[0], ratio, len(t))
        return cls(samples, grid, "file")

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "grid": {"T0": self.grid.T0, "ratio": self.grid.ratio, "count": self.grid.count},
            "method": self.method,
            "samples": [{"t": s.t, "volume": s.volume, "stderr": s.stderr,
                         "norm": s.norm.value} for s in self.samples],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TubeScan":
        d = json.loads(text)
        g = d["grid"]
        samples = tuple(TubeSample(s["t"], s["volume"], s["stderr"], Norm.parse(s["norm"]))
                        for s in d["samples"])
        return cls(samples, Grid(g["T0"], g["ratio"], g["count"]), d.get("method", "file"))


# ---------------------------------------------------------------------------
# analytic evaluators


def interval_chain_volume(region: IntervalChain, t):
    """Vectorised tube function of the interval chain for ``t >= a_{j0}``."""
    t = np.asarray(t, dtype=np.float64)
    j = np.floor(t ** (1.0 / region.alpha))
    j = np.maximum(j, 1.0)
    # repair floating floor at exact powers
    j = np.where(region.left(j) > t, j - 1.0, j)
    j = np.where(region.left(j + 1.0) <= t, j + 1.0, j)
    ramp = np.maximum(region.right(j) - t, 0.0)
    return hurwitz(region.beta, j + 1.0) + ramp


def _cantor_sup(region: CantorDrum, t):
    t = np.maximum(np.asarray(t, dtype=np.float64), 1.0)
    b = region.b
    lr = region.log_ratio
    logt = np.log(t)
    M = np.floor(logt / lr + 1e-13)
    q = region.a ** (b - 1.0)
    # levels with threshold <= t contribute t**(1-b) each copy; the rest their full area
    head = np.exp((1.0 - b) * logt + M * math.log(2.0)) - np.exp((1.0 - b) * logt)
    tail = 0.5 * np.exp((M + 1.0) * math.log(2.0 * q)) / (1.0 - 2.0 * q)
    return (head + tail) / (b - 1.0)


def sup_volume(region, t):
    """Vectorised sup-norm tube function of a planar catalog region.

    All planar catalog regions live in ``{x > 1, 0 < y < 1}`` so the sup norm
    of a point equals its abscissa.
    """
    t = np.asarray(t, dtype=np.float64)
    tt = np.maximum(t, 1.0)
    if isinstance(region, PowerSubgraph):
        return tt ** (1.0 - region.alpha) / (region.alpha - 1.0)
    if isinstance(region, ExpSubgraph):
        return np.exp(-tt)
    if isinstance(region, StackedPower):
        k = np.arange(1, STACKED_TERMS + 1, dtype=np.float64)
        lt = np.log(tt)[..., None]
        return np.sum(np.exp(-k * math.log(2.0) - lt / k), axis=-1)
    if isinstance(region, CantorDrum):
        return _cantor_sup(region, t)
    raise UnsupportedError(f"no sup-norm tube formula for {type(region).__name__}")


def _subgraph_profile(region):
    if isinstance(region, PowerSubgraph):
        a = region.alpha
        return (lambda x: x ** (-a)), (lambda x: x ** (1.0 - a) / (a - 1.0))
    if isinstance(region, ExpSubgraph):
        return (lambda x: math.exp(-x)), (lambda x: math.exp(-x))
    raise UnsupportedError(f"no Euclidean tube formula for {type(region).__name__}")


def euclidean_subgraph_volume(region, t: float) -> float:
    """Euclidean tube function of ``{x > 1, 0 < y < f(x)}``, ``f`` decreasing, ``f(1) <= 1``.

    Full columns beyond ``x = t`` plus the columns in ``[x(t), t)`` clipped by
    the circle, where ``x(t)**2 + f(x(t))**2 = t**2``.
    """
    f, tail = _subgraph_profile(region)
    t = float(t)
    if t <= 1.0:
        return tail(1.0)
    f1 = f(1.0)
    lo = math.sqrt(max(1.0, t * t - f1 * f1))

    # work in w = t - x so the circle height sqrt(w (2t - w)) keeps full precision
    def clipped(w):
        return f(t - w) - math.sqrt(max(w * (2.0 * t - w), 0.0))

    # the clipped column height can change sign more than once for t near 1
    wmax = t - lo
    grid = np.linspace(0.0, wmax, 65)
    vals = np.array([clipped(w) for w in grid])
    edges = [0.0]
    tiny = np.finfo(float).smallest_subnormal
    for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        if i == 0:
            # the first root can sit hundreds of decades below the grid step
            if clipped(tiny) <= 0.0:
                edges.append(tiny)
                continue
            z = optimize.brentq(lambda z: clipped(math.exp(z)), math.log(tiny),
                                math.log(grid[1]), xtol=1e-14, rtol=4 * np.finfo(float).eps)
            edges.append(math.exp(z))
        else:
            edges.append(optimize.brentq(clipped, grid[i], grid[i + 1],
                                         xtol=1e-300, rtol=4 * np.finfo(float).eps))
    edges.append(wmax)
    part = 0.0
    full = tail(t)
    with warnings.catch_warnings():
        # roundoff warnings only mean 1e-12 relative is below double resolution here
        warnings.filterwarnings("ignore", message="The occurrence of roundoff",
                                category=integrate.IntegrationWarning)
        for w0, w1 in zip(edges[:-1], edges[1:]):
            if w1 > w0 and clipped(0.5 * (w0 + w1)) > 0.0:
                # sqrt endpoint behaviour: substitute w = w0 + (w1 - w0) v**2
                span = w1 - w0
                part += integrate.quad(lambda v: clipped(w0 + span * v * v) * 2.0 * span * v,
                                       0.0, 1.0, epsabs=1e-16 * full, epsrel=1e-12,
                                       limit=200)[0]
    return full + part


def tube_volume_analytic(region, t: float, norm=Norm.EUCLIDEAN) -> TubeSample:
    norm = Norm.parse(norm)
    t = float(t)
    if not t > 0:
        raise DomainError(f"radius must be positive, got {t}")
    if isinstance(region, IntervalChain):
        if t < region.t_min:
            raise UnsupportedError(
                f"radius {t} below a_j0 = {region.t_min}: intervals may overlap there")
        return TubeSample(t, float(interval_chain_volume(region, t)), 0.0, norm)
    if isinstance(region, Generic):
        raise UnsupportedError("Generic regions only support Monte Carlo tube volumes")
    if norm is Norm.SUP:
        return TubeSample(t, float(sup_volume(region, t)), 0.0, norm)
    return TubeSample(t, euclidean_subgraph_volume(region, t), 0.0, norm)


def supports_analytic(region, norm) -> bool:
    norm = Norm.parse(norm)
    if isinstance(region, IntervalChain):
        return True
    if isinstance(region, (PowerSubgraph, ExpSubgraph)):
        return True
    if isinstance(region, (StackedPower, CantorDrum)):
        return norm is Norm.SUP
    return False


def breakpoints(region, norm, t_lo: float, t_hi: float) -> list:
    """Radii in ``(t_lo, t_hi)`` where the analytic tube function has a kink."""
    pts = []
    if isinstance(region, CantorDrum) and Norm.parse(norm) is Norm.SUP:
        m0 = max(1, int(math.floor(math.log(max(t_lo, 1.0)) / region.log_ratio)))
        m = m0
        while True:
            x = region.a ** (-m)
            if x >= t_hi:
                break
            if x > t_lo:
                pts.append(x)
            m += 1
    if isinstance(region, (PowerSubgraph, ExpSubgraph, StackedPower)) and t_lo < 1.0 < t_hi:
        pts.append(1.0)
    if isinstance(region, (PowerSubgraph, ExpSubgraph)) and Norm.parse(norm) is Norm.EUCLIDEAN:
        pts.extend(p for p in euclidean_kinks(region) if t_lo < p < t_hi)
    return sorted(pts)


def euclidean_kinks(region) -> list:
    """Radii where the Euclidean tube function of a subgraph is not smooth.

    One is where the root ``x(t)`` leaves ``x = 1``; the other is the distance
    from the origin to the graph, where the circle first touches the curve.
    """
    f, _ = _subgraph_profile(region)
    f1 = f(1.0)
    res = optimize.minimize_scalar(lambda x: x * x + f(x) ** 2, bounds=(1.0, 4.0),
                                   method="bounded", options={"xatol": 1e-13})
    touch = math.sqrt(min(res.fun, 1.0 + f1 * f1))
    out = {math.sqrt(1.0 + f1 * f1), touch}
    return sorted(out)


# ---------------------------------------------------------------------------
# Monte Carlo


def _rng(seed, index):
    entropy = list(seed) if isinstance(seed, (tuple, list)) else [int(seed)]
    return np.random.default_rng(np.random.SeedSequence(entropy + [int(index)]))


def _allocate(weights, samples):
    w = np.asarray(weights, dtype=np.float64)
    W = w.sum()
    n = np.floor(samples * w / W).astype(np.int64)
    keep = w > 1e-13 * W
    n = np.where(keep, np.maximum(n, 2), 0)
    return n


def _planar_mc(region, envelope, t, norm, samples, seed):
    groups, _ = component_groups(envelope, tol=1e-15)
    strata = []
    for g in groups:
        if norm is Norm.SUP:
            x_lo = t if t > g.top else 0.0
        else:
            x_lo = math.sqrt(max(t * t - g.top * g.top, 0.0))
        X = max(x_lo, g.start)
        w = g.copies * g.tail_measure(X)
        if w > 0.0:
            strata.append((g, X, w))
    if not strata:
        return 0.0, 0.0
    n = _allocate([s[2] for s in strata], samples)
    est = 0.0
    var = 0.0
    for idx, ((g, X, w), ni) in enumerate(zip(strata, n)):
        if ni == 0:
            continue
        rng = _rng(seed, idx)
        u = 1.0 - rng.random(ni)
        if g.exponent is None:
            x = X - np.log(u)
        else:
            x = X * u ** (-1.0 / (g.exponent - 1.0))
        copy = np.floor(rng.random(ni) * g.copies)
        y = g.offset + copy * g.height + rng.random(ni) * g.profile(x)
        pts = np.column_stack([x, y])
        hit = norm(pts) >= t
        if region is not envelope:
            # catalog samples are members by construction
            hit &= contains_many(region, pts)
        p = hit.mean()
        est += w * p
        var += w * w * p * (1.0 - p) / max(ni - 1, 1)
    return est, math.sqrt(var)


def _interval_pieces(region: IntervalChain, t: float):
    """Disjoint pieces of the chain (merged head, then single intervals) clipped at ``t``."""
    j0 = region.j0
    lo_list, hi_list = [], []
    if j0 > 1:
        lo, hi = float(region.left(1)), float(region.right(1))
        for j in range(2, j0):
            a, b = float(region.left(j)), float(region.right(j))
            if a < hi:
                hi = max(hi, b)
            else:
                lo_list.append(lo)
                hi_list.append(hi)
                lo, hi = a, b
        lo_list.append(lo)
        hi_list.append(hi)
    jmax = INTERVAL_CAP
    j = np.arange(j0, jmax + 1, dtype=np.float64)
    lo = np.concatenate([lo_list, region.left(j)])
    hi = np.concatenate([hi_list, region.right(j)])
    exact = np.concatenate([np.asarray(hi_list) - np.asarray(lo_list), region.length(j)])
    clipped = lo < t
    lo = np.maximum(lo, t)
    # hi - lo would lose j**-beta against j**alpha for large j
    length = np.where(clipped, np.maximum(hi - lo, 0.0), exact)
    if float(region.left(jmax + 1)) < t:
        raise UnsupportedError(f"radius {t} beyond the Monte Carlo interval cap")
    exact_tail = float(hurwitz(region.beta, jmax + 1))
    return lo, length, exact_tail


def _interval_mc(region, envelope, t, samples, seed):
    lo, length, exact_tail = _interval_pieces(envelope, t)
    W = length.sum()
    if W == 0.0:
        return exact_tail, 0.0
    rng = _rng(seed, 0)
    cdf = np.cumsum(length)
    idx = np.searchsorted(cdf, rng.random(samples) * W, side="right")
    idx = np.minimum(idx, len(length) - 1)
    x = lo[idx] + rng.random(samples) * length[idx]
    hit = np.abs(x) >= t
    if region is not envelope:
        hit &= contains_many(region, x.reshape(-1, 1))
    p = hit.mean()
    return W * p + exact_tail, W * math.sqrt(p * (1.0 - p) / max(samples - 1, 1))


def tube_volume_mc(region, t: float, norm=Norm.EUCLIDEAN, samples: int = 100_000,
                   seed=0) -> TubeSample:
    """Stratified Monte Carlo estimate of the tube function.

    Points are drawn from the envelope's own parameterisation (each stacked
    component sampled by inverse CDF in ``x`` and uniformly in ``y``), restricted
    to the part that can lie outside the ball, and tested for membership.
    """
    norm = Norm.parse(norm)
    t = float(t)
    samples = int(samples)
    if samples < 1000:
        raise DomainError(f"Monte Carlo needs at least 1000 samples, got {samples}")
    if not t > 0:
        raise DomainError(f"radius must be positive, got {t}")
    envelope = region.envelope if isinstance(region, Generic) else region
    if isinstance(envelope, IntervalChain):
        vol, err = _interval_mc(region, envelope, t, samples, seed)
    else:
        vol, err = _planar_mc(region, envelope, t, norm, samples, seed)
    return TubeSample(t, vol, err, norm)


# ---------------------------------------------------------------------------
# scans


def tube_scan(region, norm=Norm.EUCLIDEAN, grid: Grid | tuple = (1.0, 2 ** 0.25, 64),
              method: str = "analytic", samples: int = 100_000, seed=0) -> TubeScan:
    norm = Norm.parse(norm)
    if not isinstance(grid, Grid):
        grid = Grid(*grid)
    if grid.T0 < region.t_min:
        raise UnsupportedError(f"T0 = {grid.T0} below t_min = {region.t_min}")
    radii = grid.radii()
    notes = []
    if method == "analytic":
        if isinstance(region, IntervalChain):
            vols = interval_chain_volume(region, radii)
            out = tuple(TubeSample(float(t), float(v), 0.0, norm) for t, v in zip(radii, vols))
        elif norm is Norm.SUP and supports_analytic(region, norm):
            vols = sup_volume(region, radii)
            out = tuple(TubeSample(float(t), float(v), 0.0, norm) for t, v in zip(radii, vols))
        else:
            out = tuple(tube_volume_analytic(region, t, norm) for t in radii)
        v = np.array([s.volume for s in out])
        if np.any(np.diff(v) > 0):
            raise RuntimeError("analytic tube scan is not monotone")
    elif method == "mc":
        seeds = seed if isinstance(seed, (tuple, list)) else (int(seed),)
        out = tuple(tube_volume_mc(region, t, norm, samples, tuple(seeds) + (i,))
                    for i, t in enumerate(radii))
        v = np.array([s.volume for s in out])
        e = np.array([s.stderr for s in out])
        bad = np.nonzero(np.diff(v) > 3.0 * np.hypot(e[1:], e[:-1]))[0]
        if bad.size:
            msg = f"Monte Carlo scan non-monotone beyond 3 sigma at t = {radii[bad + 1].tolist()}"
            notes.append(msg)
            warnings.warn(msg, ConvergenceWarning, stacklevel=2)
    else:
        raise DomainError(f"unknown scan method {method!r}")
    return TubeScan(out, grid, method, notes)


def volume_bound_check(region, scan: TubeScan) -> bool:
    return bool(np.all(scan.volume <= total_measure(region) * (1 + 1e-12)))
