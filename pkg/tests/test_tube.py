import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetainf import (
    CantorDrum,
    DomainError,
    ExpSubgraph,
    Generic,
    Grid,
    IntervalChain,
    Norm,
    PowerSubgraph,
    StackedPower,
    TubeScan,
    UnsupportedError,
    tube_scan,
    tube_volume_analytic,
    tube_volume_mc,
)
from zetainf.tube import volume_bound_check


def test_power_sup_volume_closed_form():
    r = PowerSubgraph(2.5)
    for t in (1.0, 1.7, 10.0, 1e4):
        v = tube_volume_analytic(r, t, Norm.SUP).volume
        assert v == pytest.approx(t ** -1.5 / 1.5, rel=1e-12)


def test_exp_sup_volume():
    assert tube_volume_analytic(ExpSubgraph(), 3.0, "sup").volume == pytest.approx(math.exp(-3))


def test_interval_chain_volume_hurwitz():
    r = IntervalChain(2, 3)
    # I_7 ends before 50.3 and I_8 starts after it
    assert tube_volume_analytic(r, 50.3).volume == pytest.approx(float(mpmath.zeta(3, 8)),
                                                                 rel=1e-14)
    # inside I_2 = (4, 4.125) the ramp is linear
    assert tube_volume_analytic(r, 4.1).volume == pytest.approx(
        0.025 + float(mpmath.zeta(3, 3)), rel=1e-14)


@pytest.mark.parametrize("t", [1.0, 1.3, 4.0, 25.0])
def test_power_euclidean_volume_vs_quadrature(t):
    mpmath.mp.dps = 30
    # columns x < t keep the part of [0, x**-2] above the circle; the
    # curves cross where x**-2 = sqrt(t**2 - x**2)
    gap = lambda x: x ** -2 - mpmath.sqrt(t * t - x * x)  # noqa: E731
    x0 = mpmath.mpf(1) if gap(1) >= 0 else mpmath.findroot(gap, (1, t), solver="anderson")
    near = mpmath.quad(gap, [x0, t])
    oracle = near + mpmath.quad(lambda x: x ** -2, [t, mpmath.inf])
    v = tube_volume_analytic(PowerSubgraph(2), t, "euclidean").volume
    assert v == pytest.approx(float(mpmath.re(oracle)), rel=1e-10)


def test_exp_euclidean_volume_underflows_cleanly():
    v = [tube_volume_analytic(ExpSubgraph(), t, "euclidean").volume for t in (100, 300, 800)]
    assert v[0] > v[1] >= v[2] >= 0


def test_stacked_sup_volume_series():
    t = 8.0
    expected = sum(2.0 ** -k * t ** (-1 / k) for k in range(1, 200))
    assert tube_volume_analytic(StackedPower(), t, "sup").volume == pytest.approx(expected)


@pytest.mark.parametrize("region,norm", [
    (PowerSubgraph(2), "sup"), (PowerSubgraph(2), "euclidean"), (IntervalChain(2, 3), "sup"),
    (StackedPower(), "sup"), (CantorDrum(1 / 3, 2), "sup"), (ExpSubgraph(), "euclidean"),
])
def test_mc_agrees_with_analytic(region, norm):
    for i, t in enumerate((1.5, 6.0, 40.0)):
        t = max(t, region.t_min)
        exact = tube_volume_analytic(region, t, norm).volume
        mc = tube_volume_mc(region, t, norm, 50_000, seed=i)
        assert abs(mc.volume - exact) <= 4 * mc.stderr + 1e-12 * exact


def test_mc_generic_subset():
    env = PowerSubgraph(2)
    g = Generic(2, lambda p: p[:, 1] < 0.5 * p[:, 0] ** -2.0, env)
    mc = tube_volume_mc(g, 2.0, "sup", 100_000, seed=3)
    # half of each column of the envelope
    assert abs(mc.volume - 0.25) <= 4 * mc.stderr


def test_analytic_unsupported_cases():
    with pytest.raises(UnsupportedError):
        tube_volume_analytic(CantorDrum(1 / 3, 2), 2.0, "euclidean")
    with pytest.raises(UnsupportedError):
        tube_volume_analytic(IntervalChain(0.5, 1.2), 1.1)
    with pytest.raises(DomainError):
        tube_volume_analytic(PowerSubgraph(2), -1.0)
    with pytest.raises(DomainError):
        tube_volume_mc(PowerSubgraph(2), 2.0, samples=10)


@pytest.mark.parametrize("args", [(0.0, 2.0, 4), (1.0, 1.0, 4), (1.0, 2.0, 0)])
def test_grid_validation(args):
    with pytest.raises(DomainError):
        Grid(*args)


def test_scan_below_t_min():
    with pytest.raises(UnsupportedError):
        tube_scan(IntervalChain(2, 3), "sup", Grid(0.5, 2, 4))


@pytest.mark.parametrize("region", [IntervalChain(2, 3), PowerSubgraph(2), StackedPower(),
                                    CantorDrum(0.4, 3), ExpSubgraph()])
def test_analytic_scan_monotone_and_bounded(region):
    scan = tube_scan(region, "sup", Grid(region.t_min, 2 ** 0.25, 64))
    assert np.all(np.diff(scan.volume) <= 0)
    assert volume_bound_check(region, scan)


@given(st.floats(1.0, 1e5), st.floats(1.0, 1e5))
@settings(max_examples=50, deadline=None)
def test_euclidean_volume_monotone(t1, t2):
    lo, hi = sorted((t1, t2))
    r = PowerSubgraph(2)
    assert (tube_volume_analytic(r, lo, "euclidean").volume
            >= tube_volume_analytic(r, hi, "euclidean").volume)


@given(st.floats(1.0, 1e4))
@settings(max_examples=50, deadline=None)
def test_norm_sandwich_analytic(t):
    # the sup ball of radius t contains the Euclidean ball and sits inside radius t*sqrt(2)
    r = PowerSubgraph(2)
    sup = tube_volume_analytic(r, t, "sup").volume
    euc = tube_volume_analytic(r, t, "euclidean").volume
    sup_small = tube_volume_analytic(r, max(t / math.sqrt(2), 1.0), "sup").volume
    assert sup <= euc * (1 + 1e-9) and euc <= sup_small * (1 + 1e-9)


def test_scan_serialisation_roundtrip():
    scan = tube_scan(CantorDrum(1 / 3, 2), "sup", Grid(1.0, 2.0, 8))
    back = TubeScan.from_csv(scan.to_csv(), scan.grid)
    assert np.array_equal(back.volume, scan.volume)
    assert np.array_equal(back.t, scan.t)
    again = TubeScan.from_json(scan.to_json())
    assert np.array_equal(again.volume, scan.volume)
    assert scan.to_csv().splitlines()[0] == "t,volume,stderr,norm"


def test_mc_scan_deterministic():
    r = StackedPower()
    a = tube_scan(r, "euclidean", Grid(1, 2, 5), "mc", 5000, seed=11)
    b = tube_scan(r, "euclidean", Grid(1, 2, 5), "mc", 5000, seed=11)
    c = tube_scan(r, "euclidean", Grid(1, 2, 5), "mc", 5000, seed=12)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv() != c.to_csv()
