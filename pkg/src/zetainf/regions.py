"""Catalog of unbounded regions of finite measure.

Five closed-form families are provided, plus :class:`Generic` for arbitrary
membership predicates enclosed in a catalog envelope:

``IntervalChain(alpha, beta)``
    union of the intervals ``(j**alpha, j**alpha + j**-beta)``, ``j >= 1``.
``PowerSubgraph(alpha)``
    ``{x > 1, 0 < y < x**-alpha}``.
``StackedPower()``
    the subgraphs ``0 < y < 2**-k / k * x**-(1 + 1/k)`` stacked vertically.
``ExpSubgraph()``
    ``{x > 1, 0 < y < exp(-x)}``.
``CantorDrum(a, b)``
    ``2**(m-1)`` stacked copies of ``{x > a**-m, 0 < y < x**-b}`` per level ``m``.

All regions are immutable.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.special import zeta as hurwitz

from . import _backend
from .errors import RegionError, UnsupportedError

SCHEMA_VERSION = 1


class Norm(enum.Enum):
    EUCLIDEAN = "euclidean"
    SUP = "sup"

    def __call__(self, points):
        """Norm of each row of ``points`` (last axis is the coordinate axis)."""
        p = np.asarray(points, dtype=np.float64)
        if self is Norm.SUP:
            return np.max(np.abs(p), axis=-1)
        if p.shape[-1] == 2:
            return np.hypot(p[..., 0], p[..., 1])  # no overflow for huge samples
        return np.sqrt(np.sum(p * p, axis=-1))

    @classmethod
    def parse(cls, value) -> "Norm":
        if isinstance(value, Norm):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise RegionError(f"unknown norm {value!r}; expected 'euclidean' or 'sup'") from None


@dataclass(frozen=True)
class Component:
    """Vertical translate of ``{x > start, 0 < y < coef * profile(x)}``.

    ``exponent=None`` selects the profile ``exp(-x)``, otherwise ``x**-exponent``.
    ``copies`` identical components are stacked directly on top of each other,
    each occupying a horizontal band of height ``height``.
    """

    offset: float
    start: float
    coef: float
    exponent: float | None
    copies: int = 1
    height: float = 0.0

    def profile(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.exponent is None:
            return self.coef * np.exp(-x)
        return self.coef * x ** (-self.exponent)

    def tail_measure(self, x0) -> float:
        """Area of one copy restricted to ``x >= x0``."""
        X = max(float(x0), self.start)
        if self.exponent is None:
            return self.coef * math.exp(-X)
        p = self.exponent
        return self.coef * math.exp((1.0 - p) * math.log(X)) / (p - 1.0)

    @property
    def top(self) -> float:
        return self.offset + self.copies * self.height


def _check_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise RegionError(f"{name} must be a finite real, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class IntervalChain:
    alpha: float
    beta: float

    ambient_dim = 1
    family = "interval_chain"

    def __post_init__(self):
        a = _check_positive("alpha", self.alpha)
        b = _check_positive("beta", self.beta)
        if a <= 0.0:
            raise RegionError(f"IntervalChain needs alpha > 0, got {a}")
        if b <= 1.0:
            raise RegionError(f"IntervalChain needs beta > 1, got {b}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def left(self, j):
        return np.asarray(j, dtype=np.float64) ** self.alpha

    def length(self, j):
        return np.asarray(j, dtype=np.float64) ** (-self.beta)

    def right(self, j):
        return self.left(j) + self.length(j)

    @cached_property
    def j0(self) -> int:
        """First index from which the chain is pairwise disjoint.

        Smallest ``j0`` with ``b_j < a_{j+1}`` for every ``j >= max(j0 - 1, 1)``,
        so that the part of the region beyond ``a_{j0}`` is exactly the
        disjoint union of ``I_j``, ``j >= j0``.
        """
        a, b = self.alpha, self.beta
        # beyond j_safe the mean value bound on (j+1)**a - j**a settles it
        c = a * min(1.0, 2.0 ** (a - 1.0))
        j_safe = int(math.ceil(c ** (1.0 / (1.0 - a - b)))) + 2
        j = np.arange(1, j_safe + 1, dtype=np.float64)
        overlap = self.right(j) >= self.left(j + 1)
        if not overlap.any():
            return 1
        last = int(j[overlap][-1])
        return last + 2

    @property
    def t_min(self) -> float:
        return float(self.left(self.j0))

    @property
    def box_dimension(self) -> float:
        return (1.0 - (self.alpha + self.beta)) / self.alpha

    def params(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class PowerSubgraph:
    alpha: float

    ambient_dim = 2
    family = "power_subgraph"

    def __post_init__(self):
        a = _check_positive("alpha", self.alpha)
        if a <= 1.0:
            raise RegionError(f"PowerSubgraph needs alpha > 1, got {a}")
        object.__setattr__(self, "alpha", a)

    @property
    def box_dimension(self) -> float:
        return -1.0 - self.alpha

    t_min = 1.0

    def params(self) -> dict:
        return {"alpha": self.alpha}


@dataclass(frozen=True)
class StackedPower:
    ambient_dim = 2
    family = "stacked_power"
    box_dimension = -2.0
    t_min = 1.0

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class ExpSubgraph:
    ambient_dim = 2
    family = "exp_subgraph"
    box_dimension = -math.inf
    t_min = 1.0

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class CantorDrum:
    a: float
    b: float

    ambient_dim = 2
    family = "cantor_drum"
    t_min = 1.0

    def __post_init__(self):
        a = _check_positive("a", self.a)
        b = _check_positive("b", self.b)
        if not 0.0 < a < 0.5:
            raise RegionError(f"CantorDrum needs 0 < a < 1/2, got {a}")
        if b <= 1.0 + math.log(2.0) / math.log(1.0 / a):
            raise RegionError(f"CantorDrum needs b > 1 + log_(1/a) 2, got b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def log_ratio(self) -> float:
        """``log(1/a)``: the log-scale period of the construction."""
        return math.log(1.0 / self.a)

    @property
    def box_dimension(self) -> float:
        return math.log(2.0) / self.log_ratio - (self.b + 1.0)

    def level_offset(self, m: int) -> float:
        q = self.a ** self.b
        return q * (1.0 - (2.0 * q) ** (m - 1)) / (1.0 - 2.0 * q)

    def params(self) -> dict:
        return {"a": self.a, "b": self.b}


CATALOG = (IntervalChain, PowerSubgraph, StackedPower, ExpSubgraph, CantorDrum)


@dataclass(frozen=True)
class Generic:
    """Region given by a membership predicate inside a catalog envelope.

    ``indicator`` receives an ``(n, ambient_dim)`` array and returns ``n``
    booleans. It must describe a subset of ``envelope``.
    """

    ambient_dim: int
    indicator: Callable = field(compare=False)
    envelope: object = None

    family = "generic"

    def __post_init__(self):
        if not isinstance(self.envelope, CATALOG):
            raise RegionError("Generic region needs a catalog region as envelope")
        if int(self.ambient_dim) != self.envelope.ambient_dim:
            raise RegionError("envelope ambient dimension does not match")
        if not callable(self.indicator):
            raise RegionError("indicator must be callable")

    @property
    def t_min(self) -> float:
        return self.envelope.t_min

    box_dimension = None


def is_catalog(region) -> bool:
    return isinstance(region, CATALOG)


# ---------------------------------------------------------------------------
# measure and membership


def total_measure(region) -> float:
    """Exact Lebesgue measure of a catalog region."""
    if isinstance(region, IntervalChain):
        j0 = region.j0
        # overlapping head: merge explicitly
        head = 0.0
        if j0 > 1:
            lo, hi = float(region.left(1)), float(region.right(1))
            for j in range(2, j0):
                a, b = float(region.left(j)), float(region.right(j))
                if a < hi:
                    hi = max(hi, b)
                else:
                    head += hi - lo
                    lo, hi = a, b
            head += hi - lo
        return head + float(hurwitz(region.beta, j0))
    if isinstance(region, PowerSubgraph):
        return 1.0 / (region.alpha - 1.0)
    if isinstance(region, StackedPower):
        return 1.0
    if isinstance(region, ExpSubgraph):
        return math.exp(-1.0)
    if isinstance(region, CantorDrum):
        q = region.a ** (region.b - 1.0)
        return q / ((region.b - 1.0) * (1.0 - 2.0 * q))
    if isinstance(region, Generic):
        raise UnsupportedError("total_measure is not available for Generic regions; "
                               "estimate it with tube.tube_volume_mc")
    raise RegionError(f"not a region: {region!r}")


def _as_points(region, point):
    p = np.asarray(point, dtype=np.float64)
    N = region.ambient_dim
    if N == 1 and p.ndim == 0:
        p = p.reshape(1, 1)
    if p.ndim == 1:
        if p.shape[0] != N:
            raise RegionError(f"point has dimension {p.shape[0]}, region needs {N}")
        p = p.reshape(1, N)
    if p.ndim != 2 or p.shape[1] != N:
        raise RegionError(f"points must have shape (n, {N}), got {p.shape}")
    return p


def contains_many(region, points) -> np.ndarray:
    """Vectorised membership test on an ``(n, N)`` array."""
    p = _as_points(region, points)
    if isinstance(region, IntervalChain):
        return np.asarray(_backend.interval_chain_contains(
            p[:, 0], region.alpha, region.beta, region.j0), dtype=bool)
    x, y = p[:, 0], p[:, 1]
    if isinstance(region, PowerSubgraph):
        with np.errstate(divide="ignore", invalid="ignore"):
            return (x > 1.0) & (y > 0.0) & (y < np.where(x > 1.0, x, 1.0) ** (-region.alpha))
    if isinstance(region, ExpSubgraph):
        return (x > 1.0) & (y > 0.0) & (y < np.exp(-x))
    if isinstance(region, StackedPower):
        return np.asarray(_backend.stacked_power_contains(x, y), dtype=bool)
    if isinstance(region, CantorDrum):
        return np.asarray(_backend.cantor_contains(x, y, region.a, region.b), dtype=bool)
    if isinstance(region, Generic):
        inside = np.asarray(region.indicator(p), dtype=bool).reshape(-1)
        return inside & contains_many(region.envelope, p)
    raise RegionError(f"not a region: {region!r}")


def contains(region, point) -> bool:
    """Membership of a single point."""
    p = _as_points(region, point)
    if p.shape[0] != 1:
        raise RegionError("contains() takes one point; use contains_many()")
    return bool(contains_many(region, p)[0])


# ---------------------------------------------------------------------------
# stacked structure


def strip_height(region) -> float:
    """Height of the horizontal strip ``0 <= y <= S`` holding a 2-D catalog region."""
    if isinstance(region, CantorDrum):
        q = region.a ** region.b
        return q / (1.0 - 2.0 * q)
    if isinstance(region, StackedPower):
        return math.log(2.0)
    if isinstance(region, (PowerSubgraph, ExpSubgraph)):
        return 1.0 if isinstance(region, PowerSubgraph) else math.exp(-1.0)
    raise UnsupportedError(f"{type(region).__name__} is not strip-contained in the plane")


def component_groups(region, tol: float = 1e-15, max_groups: int = 400):
    """Stacked components of a 2-D catalog region, grouped by identical shape.

    Groups are emitted until the remaining area drops below ``tol`` times the
    total; returns ``(groups, omitted_area)``.
    """
    if isinstance(region, PowerSubgraph):
        return [Component(0.0, 1.0, 1.0, region.alpha, 1, 1.0)], 0.0
    if isinstance(region, ExpSubgraph):
        return [Component(0.0, 1.0, 1.0, None, 1, math.exp(-1.0))], 0.0
    total = total_measure(region)
    groups = []
    acc = 0.0
    if isinstance(region, StackedPower):
        offset = 0.0
        for k in range(1, max_groups + 1):
            w = 2.0 ** (-k) / k
            groups.append(Component(offset, 1.0, w, 1.0 + 1.0 / k, 1, w))
            offset += w
            acc += 2.0 ** (-k)
            if total - acc <= tol * total:
                break
        return groups, max(total - acc, 0.0)
    if isinstance(region, CantorDrum):
        a, b = region.a, region.b
        for m in range(1, max_groups + 1):
            h = a ** (m * b)
            c = Component(region.level_offset(m), a ** (-m), 1.0, b, 2 ** (m - 1), h)
            groups.append(c)
            acc += c.copies * c.tail_measure(c.start)
            if total - acc <= tol * total:
                break
        return groups, max(total - acc, 0.0)
    raise UnsupportedError(f"{type(region).__name__} has no stacked structure")


def stacking_offsets(region, count: int | None = None):
    """Ordered ``(offset, Component)`` pairs, one per stacked copy.

    ``count`` bounds the number of StackedPower components (default 10) or
    CantorDrum levels (default 6).
    """
    if isinstance(region, StackedPower):
        groups, _ = component_groups(region, tol=0.0, max_groups=count or 10)
        return [(g.offset, g) for g in groups]
    if isinstance(region, CantorDrum):
        groups, _ = component_groups(region, tol=0.0, max_groups=count or 6)
        out = []
        for g in groups:
            for c in range(g.copies):
                off = g.offset + c * g.height
                out.append((off, Component(off, g.start, g.coef, g.exponent, 1, g.height)))
        return out
    raise UnsupportedError("stacking_offsets needs a CantorDrum or StackedPower region")


# ---------------------------------------------------------------------------
# region-spec files

_FIELDS = {
    "interval_chain": (IntervalChain, ("alpha", "beta")),
    "power_subgraph": (PowerSubgraph, ("alpha",)),
    "stacked_power": (StackedPower, ()),
    "exp_subgraph": (ExpSubgraph, ()),
    "cantor_drum": (CantorDrum, ("a", "b")),
}


def region_from_dict(spec: dict, allow_extra: tuple = ()):
    """Build a catalog region from ``{"family": ..., "params": {...}}``.

    Unknown keys are rejected; ``allow_extra`` lists top-level keys that a
    caller handles itself (the evaluator descriptor adds norm, T and mode).
    """
    if not isinstance(spec, dict):
        raise RegionError("region spec must be a JSON object")
    extra = set(spec) - {"family", "params", "schema"} - set(allow_extra)
    if extra:
        raise RegionError(f"unknown region-spec fields: {sorted(extra)}")
    fam = spec.get("family")
    if fam not in _FIELDS:
        raise RegionError(f"unknown family {fam!r}; expected one of {sorted(_FIELDS)}")
    cls, names = _FIELDS[fam]
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise RegionError("params must be a JSON object")
    unknown = set(params) - set(names)
    if unknown:
        raise RegionError(f"unknown params for {fam}: {sorted(unknown)}")
    missing = [n for n in names if n not in params]
    if missing:
        raise RegionError(f"missing params for {fam}: {missing}")
    try:
        return cls(*(params[n] for n in names))
    except TypeError as exc:
        raise RegionError(str(exc)) from None


def region_to_dict(region) -> dict:
    if not is_catalog(region):
        raise RegionError("only catalog regions serialise")
    return {"family": region.family, "params": region.params()}


def load_region(path):
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise RegionError(f"cannot read region file {path}: {exc}") from None
    return region_from_dict(spec)
