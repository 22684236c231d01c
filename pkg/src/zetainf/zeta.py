"""Distance zeta function at infinity ``ζ(s; T) = ∫_{|x| >= T, x ∈ Ω} |x|**(-s-N) dx``.

Two independent routes are provided:

* ``numeric``: the tube identity
  ``ζ(s) = T**(-s-N) V(T) - (s+N) ∫_T^∞ t**(-s-N-1) V(t) dt`` integrated
  after the substitution ``t = T e**u`` with composite Gauss-Legendre rules on
  kink-aligned segments, valid for ``Re s > D``;
* ``closed_form``: the explicit meromorphic continuations of the four catalog
  families that have one (sup norm for the planar families).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError, PoleError, UnsupportedError
from .regions import (
    SCHEMA_VERSION,
    CantorDrum,
    ExpSubgraph,
    IntervalChain,
    Norm,
    PowerSubgraph,
    StackedPower,
    region_from_dict,
    region_to_dict,
)
from .tube import breakpoints, euclidean_subgraph_volume, interval_chain_volume, sup_volume

SEGMENT = 0.25
GL_HI = 16
GL_LO = 8
# largest log-radius offset used before switching to the power-law tail
U_REPR = 650.0
IC_DIRECT = 2000

_X_HI, _W_HI = np.polynomial.legendre.leggauss(GL_HI)
_X_LO, _W_LO = np.polynomial.legendre.leggauss(GL_LO)


@dataclass(frozen=True)
class ZetaEvaluator:
    """Distance zeta function of ``region`` outside the ball of radius ``T``.

    ``T=None`` picks the default radius: ``a_{j0}`` for the interval chain,
    1 for the planar families.
    """

    region: object
    norm: Norm = Norm.SUP
    T: float | None = None
    mode: str = "numeric"

    def __post_init__(self):
        object.__setattr__(self, "norm", Norm.parse(self.norm))
        if self.T is None:
            object.__setattr__(self, "T", float(self.region.t_min))
        T = float(self.T)
        if not T > 0:
            raise DomainError(f"T must be positive, got {T}")
        if T < self.region.t_min:
            raise UnsupportedError(f"T = {T} below the region's t_min = {self.region.t_min}")
        object.__setattr__(self, "T", T)
        if self.mode not in ("numeric", "closed_form"):
            raise DomainError(f"mode must be 'numeric' or 'closed_form', got {self.mode!r}")
        if self.mode == "closed_form" and not has_closed_form(self.region, self.norm):
            raise UnsupportedError(
                f"no closed form for {type(self.region).__name__} in the {self.norm.value} norm")

    @property
    def N(self) -> int:
        return self.region.ambient_dim

    @property
    def abscissa(self) -> float:
        """Abscissa of convergence (the upper box dimension at infinity)."""
        return float(self.region.box_dimension)

    def __call__(self, s):
        if self.mode == "closed_form":
            return zeta_closed_form(self, s)
        return zeta_numeric(self, s)

    def with_mode(self, mode: str) -> "ZetaEvaluator":
        return ZetaEvaluator(self.region, self.norm, self.T, mode)

    def to_dict(self) -> dict:
        d = region_to_dict(self.region)
        d.update({"schema": SCHEMA_VERSION, "norm": self.norm.value, "T": self.T,
                  "mode": self.mode})
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ZetaEvaluator":
        region = region_from_dict(d, allow_extra=("norm", "T", "mode"))
        return cls(region, Norm.parse(d.get("norm", "sup")), d.get("T"), d.get("mode", "numeric"))


def has_closed_form(region, norm) -> bool:
    norm = Norm.parse(norm)
    if isinstance(region, IntervalChain):
        return True
    return isinstance(region, (PowerSubgraph, StackedPower, CantorDrum)) and norm is Norm.SUP


# ---------------------------------------------------------------------------
# closed forms


def _stacked_series(s: complex, tol: float = 1e-13):
    """Series ``Σ 2**-k / (k (s + 2 + 1/k))`` with a certified tail bound.

    Writing ``z = s + 2`` the terms are ``2**-k / (1 + k z)``. For ``k > K`` the
    tail is at most ``2**-K / L`` with ``L`` a lower bound of ``|1 + k z|`` over
    ``k > K``.
    """
    z = complex(s) + 2.0
    x, y = z.real, abs(z.imag)

    def lower(K):
        best = (K + 1) * y
        if x >= 0.0:
            return max(best, 1.0)
        kstar = -1.0 / x
        if kstar <= K + 1:
            cand = abs(1.0 + (K + 1) * x)
        else:
            cand = min(abs(1.0 + math.floor(kstar) * x), abs(1.0 + math.ceil(kstar) * x))
        return max(best, cand)

    K = 40
    while True:
        L = lower(K)
        if L > 0.0 and 2.0 ** (-K) / L <= tol:
            break
        if K >= 1100:
            break
        K += 20
    k = np.arange(1, K + 1, dtype=np.float64)
    den = 1.0 + k * z
    if np.any(den == 0.0):
        kk = int(k[den == 0.0][0])
        raise PoleError(-2.0 - 1.0 / kk, f"s = -2 - 1/{kk} is a pole")
    L = lower(K)
    if L == 0.0:
        raise PoleError(complex(s), "s is a pole of the stacked series")
    return complex(np.sum(2.0 ** (-k) / den)), 2.0 ** (-K) / L


def stacked_power_series(s: complex):
    """Value and tail bound of the StackedPower zeta function at ``s`` (``T = 1``)."""
    return _stacked_series(s)


def _ic_tail(region: IntervalChain, s: complex, J: int) -> complex:
    """``Σ_{j>=J} (j**(-αs) - (j**α + j**-β)**(-s)) / s`` via Hurwitz zeta values.

    Expands ``(1 + j**-(α+β))**(-s)`` binomially; ``C(-s, n) / s`` stays finite
    at ``s = 0``.
    """
    a, b = region.alpha, region.beta
    with mpmath.workdps(30):
        sm = mpmath.mpc(s)
        total = mpmath.mpc(0)
        coef = mpmath.mpf(-1)  # C(-s, 1) / s
        n = 1
        while True:
            term = coef * mpmath.zeta(a * sm + n * (a + b), J)
            total += term
            if abs(term) < 1e-20 * (abs(total) + 1e-300) or n > 60:
                break
            coef *= (-sm - n) / (n + 1)
            n += 1
        return complex(-total)


def _interval_chain_closed(region: IntervalChain, s: complex, k: int) -> complex:
    a, b = region.alpha, region.beta
    J = k + IC_DIRECT
    j = np.arange(k, J, dtype=np.float64)
    L = np.log1p(j ** (-(a + b)))
    lj = np.log(j)
    if s == 0:
        body = L
    else:
        # (j**(-as) - (j**a + j**-b)**(-s)) / s without cancellation
        body = np.exp(-a * s * lj) * (-np.expm1(-s * L)) / s
    return complex(np.sum(body)) + _ic_tail(region, s, J)


def _interval_chain_index(region: IntervalChain, T: float) -> int:
    k = int(round(T ** (1.0 / region.alpha)))
    for cand in (k - 1, k, k + 1):
        if cand >= 1 and abs(float(region.left(cand)) - T) <= 1e-12 * T:
            return cand
    return -1


def zeta_closed_form(ev: ZetaEvaluator, s):
    """Closed-form value of the zeta function (meromorphic continuation).

    Raises
    ------
    PoleError
        ``s`` is a declared pole.
    DomainError
        ``s`` lies outside the convergence region of a series representation,
        or ``T`` is not covered by the closed form.
    """
    region = ev.region
    s = complex(s)
    if isinstance(region, IntervalChain):
        k = _interval_chain_index(region, ev.T)
        if k < region.j0:
            raise DomainError("the interval-chain series needs T = a_k with k >= j0")
        if not s.real > ev.abscissa:
            raise DomainError(f"series diverges for Re s <= {ev.abscissa}")
        return _interval_chain_closed(region, s, k)
    if isinstance(region, PowerSubgraph):
        u = s + region.alpha + 1.0
        if u == 0:
            raise PoleError(-region.alpha - 1.0)
        return np.exp(-u * math.log(ev.T)) / u
    if isinstance(region, StackedPower):
        if ev.T != 1.0:
            raise DomainError("StackedPower closed form is given for T = 1")
        return _stacked_series(s)[0]
    if isinstance(region, CantorDrum):
        if not 1.0 <= ev.T <= 1.0 / region.a:
            raise DomainError("CantorDrum closed form holds for 1 <= T <= 1/a")
        u = s + region.b + 1.0
        if u == 0:
            raise PoleError(-(region.b + 1.0))
        den = np.exp(u * region.log_ratio) - 2.0
        if den == 0:
            raise PoleError(s, "s lies on the complex-dimension lattice")
        return 1.0 / (u * den)
    raise UnsupportedError(f"no closed form for {type(region).__name__}")


def closed_form_array(ev: ZetaEvaluator, s):
    """Vectorised closed form for the planar families (used by contour integrals)."""
    s = np.asarray(s, dtype=np.complex128)
    region = ev.region
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if isinstance(region, PowerSubgraph):
            u = s + region.alpha + 1.0
            return np.exp(-u * math.log(ev.T)) / u
        if isinstance(region, CantorDrum) and 1.0 <= ev.T <= 1.0 / region.a:
            u = s + region.b + 1.0
            return 1.0 / (u * (np.exp(u * region.log_ratio) - 2.0))
        if isinstance(region, StackedPower) and ev.T == 1.0:
            k = np.arange(1, 61, dtype=np.float64)
            z = s[..., None] + 2.0
            return np.sum(2.0 ** (-k) / (1.0 + k * z), axis=-1)
    out = np.empty(s.shape, dtype=np.complex128)
    for idx, v in np.ndenumerate(s):
        try:
            out[idx] = zeta_closed_form(ev, v)
        except PoleError:
            out[idx] = np.inf
    return out


# ---------------------------------------------------------------------------
# numeric route (tube identity)


def _volume_vec(region, norm, t):
    if isinstance(region, IntervalChain):
        return interval_chain_volume(region, t)
    if norm is Norm.SUP:
        return sup_volume(region, t)
    if isinstance(region, (PowerSubgraph, ExpSubgraph)):
        return np.array([euclidean_subgraph_volume(region, float(x)) for x in np.ravel(t)])
    raise UnsupportedError(
        f"no analytic {norm.value}-norm tube function for {type(region).__name__}")


@lru_cache(maxsize=65536)
def _segment_volumes(region, norm, T, u0, u1, order):
    x = _X_HI if order == GL_HI else _X_LO
    u = 0.5 * (u1 - u0) * x + 0.5 * (u1 + u0)
    v = np.asarray(_volume_vec(region, norm, T * np.exp(u)), dtype=np.float64)
    v.setflags(write=False)
    return u, v


def _kinks(region, norm, T, U):
    """Kink locations of ``V(T e**u)`` in ``u`` on ``(0, U)``."""
    pts = [math.log(p / T) for p in breakpoints(region, norm, T, T * math.exp(min(U, 700)))]
    return sorted(p for p in pts if 0.0 < p < U)


def _segments(region, norm, T, U):
    """Kink-aligned segments of ``[0, U]``, geometrically graded at the kinks."""
    kinks = _kinks(region, norm, T, U)
    grid = set(np.round(np.arange(0.0, U + SEGMENT / 2, SEGMENT), 12).tolist())
    grid.update(kinks)
    grid.add(float(U))
    graded = [0.0] + kinks if norm is Norm.EUCLIDEAN else []
    for k in graded:
        for i in range(1, 14):
            d = SEGMENT * 2.0 ** (-i)
            if k + d < U:
                grid.add(round(k + d, 15))
            if k - d > 0:
                grid.add(round(k - d, 15))
    pts = sorted(p for p in grid if 0.0 <= p <= U)
    return list(zip(pts[:-1], pts[1:]))


def _tube_integrand(region, norm, T, N, s, u, v):
    return (s + N) * np.exp(-(s + N) * (math.log(T) + u)) * v


def _planar_numeric(ev, s, tol):
    region, norm, T, N = ev.region, ev.norm, ev.T, ev.N
    D = ev.abscissa
    gap = s.real - D
    if math.isinf(D):
        rate = None
        U = U_REPR
    else:
        rate = gap
        scale = max(1.0, abs(N + D), abs(s.real + N))
        U = min(U_REPR / scale, math.log(1e3 * (1.0 + abs(s)) / (tol * gap)) / gap + 5.0)
    U = SEGMENT * math.ceil(U / SEGMENT)
    hi = lo = 0.0
    last = 0.0
    for u0, u1 in _segments(region, norm, T, U):
        uh, vh = _segment_volumes(region, norm, T, u0, u1, GL_HI)
        ul, vl = _segment_volumes(region, norm, T, u0, u1, GL_LO)
        half = 0.5 * (u1 - u0)
        hi += half * np.dot(_W_HI, _tube_integrand(region, norm, T, N, s, uh, vh))
        lo += half * np.dot(_W_LO, _tube_integrand(region, norm, T, N, s, ul, vl))
        if rate is None and vh[-1] == 0.0:
            U = u1
            break
    v_end = float(_volume_vec(region, norm, np.array([T * math.exp(U)]))[0])
    F_end = complex(_tube_integrand(region, norm, T, N, s, np.array([U]), np.array([v_end]))[0])
    tail = 0.0
    if rate is not None:
        # beyond U the volume follows its power law t**(N+D)
        tail = F_end / (s - D)
        last = abs(F_end) / gap
    V_T = float(_volume_vec(region, norm, np.array([T]))[0])
    boundary = math.exp(-(s.real + N) * math.log(T)) * np.exp(-1j * s.imag * math.log(T)) * V_T
    value = boundary - (hi + tail)
    err = abs(hi - lo) + 0.05 * last + 1e-15 * abs(value)
    return complex(value), float(err)


def _gl_piece(f, x0, x1, width):
    """Gauss-Legendre integral of ``f(x)`` over ``[x0, x0 + width]`` (vectorised over pieces)."""
    x = 0.5 * width[:, None] * (_X_HI[None, :] + 1.0) + x0[:, None]
    return 0.5 * width * np.sum(_W_HI[None, :] * f(x, x1), axis=1)


def _ic_piece_integrals(region, s, j, T=None):
    """``g(j) = ∫_{a_j}^{a_{j+1}} t**(-s-2) V(t) dt`` for real (possibly non-integer) ``j``.

    ``V = H(j+1) + (b_j - t)`` on ``[a_j, b_j]`` and ``H(j+1)`` on ``[b_j, a_{j+1}]``,
    with ``H`` the Hurwitz zeta function at ``β``. The ramp is integrated in the
    local variable ``t = a_j + τ l_j`` so ``b_j - t`` keeps full precision.
    """
    from scipy.special import zeta as hurwitz

    a, b = region.alpha, region.beta
    j = np.asarray(j, dtype=np.float64)
    logj = np.log(j)
    loga = a * logj
    # relative coordinates t = a_j (1 + ρ) avoid differences of huge numbers
    R = np.expm1(a * np.log1p(1.0 / j))
    rel_l = np.exp(-b * logj - loga)
    H = hurwitz(b, j + 1.0)
    rho0 = np.zeros_like(j) if T is None else np.maximum(T / np.exp(loga) - 1.0, 0.0)

    def power(log1p_rho):
        # t**(-s-2) * a_j as a function of log(1 + ρ)
        return np.exp(-(s + 2.0) * (loga[:, None] + log1p_rho) + loga[:, None])

    # constant part over [max(T, a_j), a_{j+1}]
    const = H * _gl_piece(lambda r, _: power(np.log1p(r)), rho0, None, R - rho0)
    # ramp b_j - t = l_j (1 - τ) over [max(T, a_j), b_j], t = a_j + τ l_j
    tau0 = np.clip(rho0 / rel_l, 0.0, 1.0)

    def ramp(tau, _):
        return (1.0 - tau) * power(np.log1p(tau * rel_l[:, None])) * rel_l[:, None]

    rmp = np.exp(-b * logj) * _gl_piece(ramp, tau0, None, 1.0 - tau0)
    return const + rmp


def _interval_chain_numeric(ev, s, tol):
    region, T = ev.region, ev.T
    a = region.alpha
    D = ev.abscissa
    # first index whose interval reaches past T
    k = int(math.floor(T ** (1.0 / a)))
    while float(region.left(k + 1)) <= T:
        k += 1
    while k > 1 and float(region.left(k)) > T:
        k -= 1
    J = k + IC_DIRECT
    # piece k may start at T
    head = _ic_piece_integrals(region, s, np.array([float(k)]), T=np.array([T]))[0]
    js = np.arange(k + 1, J, dtype=np.float64)
    body = np.sum(_ic_piece_integrals(region, s, js))

    def g(x):
        return _ic_piece_integrals(region, s, np.atleast_1d(np.asarray(x, dtype=np.float64)))

    # Euler-Maclaurin for Σ_{j>=J} g(j) with g smooth in j
    h = 0.5
    gJ = g(J)[0]
    d1 = (g(J - 2 * h)[0] - 8 * g(J - h)[0] + 8 * g(J + h)[0] - g(J + 2 * h)[0]) / (12 * h)
    # ∫_J^∞ g via x = J e**v with Gauss-Legendre on unit segments
    rate = a * (s.real - D)
    V = min(U_REPR / a, math.log(1e3 / (tol * max(rate, 1e-3))) / max(rate, 1e-3) + 5.0)
    V = math.ceil(V)
    edges = np.arange(0.0, V + 1.0)
    v0 = np.repeat(edges[:-1], GL_HI)
    v = v0 + 0.5 * (np.tile(_X_HI, len(edges) - 1) + 1.0)
    x = J * np.exp(v)
    gx = g(x)
    integral = 0.5 * np.sum(np.tile(_W_HI, len(edges) - 1) * gx * x)
    # remaining tail behaves like x**(-1 - rate)
    xe = J * math.exp(V)
    integral += complex(g(xe)[0]) * xe / (a * (s - D))
    tail = integral + 0.5 * gJ - d1 / 12.0
    N = 1
    V_T = float(interval_chain_volume(region, T))
    boundary = np.exp(-(s + N) * math.log(T)) * V_T
    value = boundary - (s + N) * (head + body + tail)
    err = abs(d1) * 1e-3 + abs(complex(g(xe)[0]) * xe) * 0.05 / max(rate, 1e-3) + 1e-14 * abs(value)
    return complex(value), float(err)


# ---------------------------------------------------------------------------
# Euclidean norm for stacked families (direct integration over the bands)

# beyond this multiple of a group's top edge the band expansion in (x2/x1)**2 is used
SERIES_RATIO = 64.0
DIRECT_COPIES = 4096


def _power_sums(O, H, M, qmax):
    """``Σ_{c<M} (O + c H)**q`` for ``q = 0..qmax``."""
    if M <= DIRECT_COPIES:
        o = O + H * np.arange(M, dtype=np.float64)
        return [float(np.sum(o ** q)) for q in range(qmax + 1)]
    if qmax > 3:
        raise ValueError("closed-form power sums only up to q = 3")
    M = float(M)
    S = [M, M * (M - 1) / 2, (M - 1) * M * (2 * M - 1) / 6, (M * (M - 1) / 2) ** 2]
    return [sum(math.comb(q, i) * O ** (q - i) * H ** i * S[i] for i in range(q + 1))
            for q in range(qmax + 1)]


def _band_near(g, s, X, x_lo, x_w):
    """``∫_start^X Σ_c ∫_band |x|**(-s-2) dx2 dx1`` by nested Gauss-Legendre."""
    if X <= g.start:
        return 0j
    edges = np.linspace(math.log(g.start), math.log(X),
                        max(1, math.ceil(math.log(X / g.start) / SEGMENT)) + 1)
    u0, u1 = edges[:-1], edges[1:]
    u = (0.5 * (u1 - u0)[:, None] * (x_lo[None, :] + 1.0) + u0[:, None]).ravel()
    wu = (0.5 * (u1 - u0)[:, None] * x_w[None, :]).ravel()
    x1 = np.exp(u)
    h = g.profile(x1)
    o = g.offset + g.height * np.arange(g.copies, dtype=np.float64)
    x2 = o[None, :, None] + 0.5 * h[:, None, None] * (_X_HI[None, None, :] + 1.0)
    f = np.exp(-0.5 * (s + 2.0) * np.log(x1[:, None, None] ** 2 + x2 ** 2))
    inner = 0.5 * h * np.sum(f * _W_HI[None, None, :], axis=(1, 2))
    return complex(np.sum(wu * x1 * inner))


def _band_far(g, s, X):
    """Same integral over ``[X, ∞)`` from the binomial expansion of ``(1 + (x2/x1)**2)**(-σ)``."""
    sigma = 0.5 * (s + 2.0)
    p, w = g.exponent, g.coef
    top = g.offset + g.copies * g.height
    nmax = 12 if g.copies <= DIRECT_COPIES else 1
    sums = _power_sums(g.offset, g.height, g.copies, 2 * nmax + 1)
    logX = math.log(X)
    total = 0j
    cn = 1.0 + 0j
    for n in range(nmax + 1):
        if n:
            cn *= (-sigma - n + 1) / n
        term = 0j
        for j in range(1, 2 * n + 2):
            e = s + 1.0 + 2 * n + j * p
            term += (math.comb(2 * n + 1, j) * sums[2 * n + 1 - j] * w ** j
                     * np.exp(-e * logX) / e)
        total += cn * term / (2 * n + 1)
        if abs(cn) * (top / X) ** (2 * n + 2) < 1e-18:
            break
    return complex(total)


def _stacked_groups(region):
    """Stacked components in order, without an area cutoff."""
    from .regions import Component

    if isinstance(region, StackedPower):
        offset = 0.0
        for k in range(1, 1000):
            w = 2.0 ** (-k) / k
            yield Component(offset, 1.0, w, 1.0 + 1.0 / k, 1, w)
            offset += w
    else:
        a, b = region.a, region.b
        # a**-m overflows near m = 700 / log(1/a)
        for m in range(1, int(700.0 / math.log(1.0 / a))):
            yield Component(region.level_offset(m), a ** (-m), 1.0, b, 2 ** (m - 1),
                            a ** (m * b))


def _stacked_euclidean(ev, s, tol):
    hi = lo = far = 0j
    prev = None
    tail = math.inf
    for i, g in enumerate(_stacked_groups(ev.region)):
        if i == 0 and ev.T > g.start:
            raise UnsupportedError("Euclidean evaluation of stacked regions needs T <= 1")
        top = g.offset + g.copies * g.height
        X = max(g.start, SERIES_RATIO * top)
        if X > g.start and g.copies > DIRECT_COPIES:
            raise UnsupportedError("too many stacked copies below the series radius")
        near = _band_near(g, s, X, _X_HI, _W_HI)
        lo += _band_near(g, s, X, _X_LO, _W_LO)
        c = near + _band_far(g, s, X)
        hi += near
        far += c - near
        if prev is not None and prev != 0:
            r = abs(c) / abs(prev)
            # groups decay geometrically; bound the rest by the ratio
            tail = abs(c) * r / (1.0 - r) if r < 1.0 else math.inf
            if i >= 4 and tail <= 1e-3 * tol * abs(hi + far):
                break
        prev = c
    value = hi + far
    err = abs(hi - lo) + tail + 1e-14 * abs(value)
    return complex(value), float(err)


def zeta_numeric_with_error(ev: ZetaEvaluator, s, tol: float = 1e-9, margin: float = 0.1):
    """Numeric zeta value and an error estimate from the tube identity.

    Parameters
    ----------
    ev : ZetaEvaluator
    s : complex
        Must satisfy ``Re s > D + margin``.
    tol : float
        Truncation tolerance for the integral over ``u``.

    Returns
    -------
    (complex, float)
    """
    s = complex(s)
    D = ev.abscissa
    if not s.real > D + margin:
        raise DomainError(f"Re s = {s.real} too close to or left of the abscissa {D} "
                          f"(margin {margin})")
    if isinstance(ev.region, IntervalChain):
        return _interval_chain_numeric(ev, s, tol)
    if ev.norm is Norm.EUCLIDEAN and isinstance(ev.region, (StackedPower, CantorDrum)):
        return _stacked_euclidean(ev, s, tol)
    if isinstance(ev.region, (PowerSubgraph, ExpSubgraph, StackedPower, CantorDrum)):
        return _planar_numeric(ev, s, tol)
    raise UnsupportedError(f"no tube evaluator for {type(ev.region).__name__}")


def zeta_numeric(ev: ZetaEvaluator, s, tol: float = 1e-9, margin: float = 0.1) -> complex:
    return zeta_numeric_with_error(ev, s, tol, margin)[0]


# ---------------------------------------------------------------------------
# checks


def annulus_integral(ev: ZetaEvaluator, s, T1: float, T2: float) -> complex:
    """``∫_{T1 <= |x| < T2, x ∈ Ω} |x|**(-s-N) dx`` by the tube identity on ``[T1, T2]``."""
    s = complex(s)
    if T2 < T1:
        raise DomainError("annulus needs T1 <= T2")
    if T2 == T1:
        return 0j
    region, norm, N = ev.region, ev.norm, ev.N
    U = math.log(T2 / T1)
    total = 0j
    if isinstance(region, IntervalChain):
        t_pts = sorted({T1, T2} | {float(x) for j in range(1, int(T2 ** (1 / region.alpha)) + 2)
                                   for x in (region.left(j), region.right(j)) if T1 < x < T2})
        for t0, t1 in zip(t_pts[:-1], t_pts[1:]):
            segs = [(t0, t1)]
            for a0, a1 in segs:
                x = 0.5 * (a1 - a0) * _X_HI + 0.5 * (a1 + a0)
                vals = np.exp(-(s + N + 1) * np.log(x)) * interval_chain_volume(region, x)
                total += 0.5 * (a1 - a0) * np.dot(_W_HI, vals)
        integral = total
    else:
        for u0, u1 in _segments(region, norm, T1, U):
            uh, vh = _segment_volumes(region, norm, T1, u0, u1, GL_HI)
            total += 0.5 * (u1 - u0) * np.dot(_W_HI, np.exp(-(s + N) * (math.log(T1) + uh)) * vh)
        integral = total
    V1 = float(_volume_vec(region, norm, np.array([T1]))[0])
    V2 = float(_volume_vec(region, norm, np.array([T2]))[0])
    b1 = np.exp(-(s + N) * math.log(T1)) * V1
    b2 = np.exp(-(s + N) * math.log(T2)) * V2
    return complex(b1 - b2 - (s + N) * integral)


def zeta_T_shift_check(ev: ZetaEvaluator, s, T1: float, T2: float) -> float:
    """Residual ``|ζ(s; T1) - ζ(s; T2) - annulus(T1, T2)|``."""
    if not 0 < T1 <= T2:
        raise DomainError("need 0 < T1 <= T2")
    if T1 == T2:
        return 0.0
    e1 = ZetaEvaluator(ev.region, ev.norm, T1, "numeric")
    e2 = ZetaEvaluator(ev.region, ev.norm, T2, "numeric")
    z1 = zeta_numeric(e1, s)
    z2 = zeta_numeric(e2, s)
    return float(abs(z1 - z2 - annulus_integral(e1, s, T1, T2)))


@dataclass(frozen=True)
class AbscissaReport:
    D: float
    epsilons: tuple
    values: tuple
    scaled: tuple
    simple_pole: bool
    onset_matches: bool
    mode: str


def abscissa_check(region, norm=Norm.SUP, D_hat: float | None = None,
                   epsilons=(0.2, 0.1, 0.05, 0.025)) -> AbscissaReport:
    """Growth of ``ζ(D + ε)`` as ``ε`` shrinks.

    Uses the closed form when one exists, otherwise the numeric route (with a
    margin below the smallest ``ε``). A simple pole shows as ``ε ζ(D + ε)``
    settling to a nonzero constant; an accumulation point of poles (stacked
    power) or a removable point shows as bounded ``ζ``.
    """
    norm = Norm.parse(norm)
    D = float(region.box_dimension) if D_hat is None else float(D_hat)
    mode = "closed_form" if has_closed_form(region, norm) else "numeric"
    ev = ZetaEvaluator(region, norm, None, mode)
    vals = []
    for e in epsilons:
        if mode == "closed_form":
            vals.append(complex(zeta_closed_form(ev, D + e)).real)
        else:
            vals.append(zeta_numeric(ev, D + e, margin=min(epsilons) / 2).real)
    scaled = tuple(e * v for e, v in zip(epsilons, vals))
    # simple pole: ε ζ(D + ε) varies by less than a third between the last two ε
    simple = abs(scaled[-1]) > 1e-3 and abs(scaled[-1] - scaled[-2]) < 0.34 * abs(scaled[-1])
    growing = abs(vals[-1]) > 1.5 * abs(vals[0])
    onset = (not growing) or abs(D - float(region.box_dimension)) <= 0.05 \
        if math.isfinite(region.box_dimension) else False
    return AbscissaReport(D, tuple(epsilons), tuple(vals), scaled, bool(simple and growing),
                          bool(onset), mode)
