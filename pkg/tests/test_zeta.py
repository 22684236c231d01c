import cmath
import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from zetainf import (
    CantorDrum,
    DomainError,
    ExpSubgraph,
    IntervalChain,
    PoleError,
    PowerSubgraph,
    StackedPower,
    UnsupportedError,
    ZetaEvaluator,
    abscissa_check,
    total_measure,
    zeta_closed_form,
    zeta_numeric,
    zeta_T_shift_check,
)
from zetainf.zeta import annulus_integral, stacked_power_series, zeta_numeric_with_error


@given(st.floats(-2.8, 3.0), st.floats(-20.0, 20.0))
@settings(max_examples=40, deadline=None)
def test_power_numeric_matches_closed_form(re, im):
    s = complex(re, im)
    ev = ZetaEvaluator(PowerSubgraph(2), "sup", 2.5)
    assert zeta_numeric(ev, s) == pytest.approx(zeta_closed_form(ev.with_mode("closed_form"), s),
                                                abs=1e-9)


@given(st.floats(-2.2, 1.0), st.floats(-15.0, 15.0))
@settings(max_examples=30, deadline=None)
def test_cantor_numeric_matches_closed_form(re, im):
    s = complex(re, im)
    ev = ZetaEvaluator(CantorDrum(1 / 3, 2), "sup", 2.0)
    assert zeta_numeric(ev, s) == pytest.approx(zeta_closed_form(ev.with_mode("closed_form"), s),
                                                abs=1e-9)


def test_interval_chain_closed_form_vs_direct_sum():
    # brute force: a million terms, then the leading j**(-2s-5) tail
    r = IntervalChain(2, 3)
    s = complex(-1.2, 0.7)
    j = np.arange(1, 10 ** 6, dtype=float)
    terms = np.exp(-2 * s * np.log(j)) * -np.expm1(-s * np.log1p(j ** -5.0)) / s
    direct = complex(math.fsum(terms.real), math.fsum(terms.imag))
    direct += complex(mpmath.zeta(2 * s + 5, 10 ** 6))
    ev = ZetaEvaluator(r, "sup", None, "closed_form")
    assert zeta_closed_form(ev, s) == pytest.approx(direct, abs=1e-12)
    # s = 0 is a removable point of the series
    at_zero = math.fsum(np.log1p(j ** -5.0)) + float(mpmath.zeta(5, 10 ** 6))
    assert zeta_closed_form(ev, 0.0) == pytest.approx(at_zero, abs=1e-12)


def test_power_euclidean_vs_mpmath_2d():
    mpmath.mp.dps = 15
    s = -2.5 + 0.4j
    f = lambda x: mpmath.quad(lambda y: (x * x + y * y) ** ((-s - 2) / 2), [0, x ** -2])  # noqa
    oracle = mpmath.quad(f, [1, 2, 10, mpmath.inf])
    z = zeta_numeric(ZetaEvaluator(PowerSubgraph(2), "euclidean"), s)
    assert z == pytest.approx(complex(oracle), abs=1e-9)


def test_stacked_euclidean_vs_scipy_2d():
    s = -1.5
    total, offset = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for k in range(1, 36):
            w = 2.0 ** -k / k
            total += integrate.dblquad(
                lambda y, x: (x * x + y * y) ** ((-s - 2) / 2), 1, math.inf,
                lambda x, o=offset: o, lambda x, o=offset, w=w, k=k: o + w * x ** (-1 - 1 / k),
                epsabs=1e-13, epsrel=1e-11)[0]
            offset += w
    z, err = zeta_numeric_with_error(ZetaEvaluator(StackedPower(), "euclidean"), s)
    assert z == pytest.approx(total, abs=1e-9)
    assert err < 1e-8


@pytest.mark.parametrize("region", [CantorDrum(1 / 3, 2), CantorDrum(0.4, 3),
                                    PowerSubgraph(2), ExpSubgraph()])
@pytest.mark.parametrize("norm", ["sup", "euclidean"])
def test_zeta_at_minus_N_is_measure(region, norm):
    # integrand is 1 at s = -N, and every point lies outside the unit ball.
    # The stacked set has its abscissa at -2 itself; its series value is tested below.
    z = zeta_numeric(ZetaEvaluator(region, norm), -2.0)
    assert z == pytest.approx(total_measure(region), abs=1e-9)


def test_stacked_series_value_and_poles():
    assert stacked_power_series(-2.0) == (1.0, pytest.approx(0, abs=1e-12))
    with pytest.raises(PoleError):
        stacked_power_series(-2.5)
    ev = ZetaEvaluator(StackedPower(), "sup", None, "closed_form")
    with pytest.raises(PoleError):
        zeta_closed_form(ev, -3.0)


@given(st.floats(-3.9, 2.0), st.floats(0.1, 30.0))
@settings(max_examples=40, deadline=None)
def test_conjugate_symmetry(re, im):
    s = complex(re, im)
    for ev in (ZetaEvaluator(PowerSubgraph(3), "euclidean"),
               ZetaEvaluator(CantorDrum(1 / 3, 2), "sup", None, "closed_form")):
        if re <= ev.abscissa + 0.1:
            continue
        a, b = ev(s.conjugate()), ev(s)
        assert abs(a - b.conjugate()) <= 1e-12 * max(1.0, abs(b))


@pytest.mark.parametrize("ev,s,T1,T2", [
    (ZetaEvaluator(PowerSubgraph(2), "euclidean"), -2.3 + 2j, 1.0, 7.0),
    (ZetaEvaluator(ExpSubgraph(), "euclidean"), -3.0, 1.0, 4.0),
    (ZetaEvaluator(StackedPower(), "sup"), -1.5 + 1j, 1.0, 9.0),
    (ZetaEvaluator(CantorDrum(0.4, 3), "sup"), -2.5, 1.5, 30.0),
])
def test_T_shift(ev, s, T1, T2):
    assert zeta_T_shift_check(ev, s, T1, T2) <= 1e-8


def test_annulus_of_power_subgraph():
    # sup norm: the annulus is the strip t in [T1, T2) of the subgraph
    ev = ZetaEvaluator(PowerSubgraph(2), "sup")
    s = -2.4
    exact = (2.0 ** -(s + 3) - 5.0 ** -(s + 3)) / (s + 3)
    assert annulus_integral(ev, s, 2.0, 5.0) == pytest.approx(exact, rel=1e-10)


def test_domain_errors():
    ev = ZetaEvaluator(PowerSubgraph(2), "sup")
    with pytest.raises(DomainError):
        zeta_numeric(ev, -3.0)
    with pytest.raises(DomainError):
        zeta_numeric(ev, -2.95)
    with pytest.raises(UnsupportedError):
        ZetaEvaluator(IntervalChain(0.5, 1.2), "sup", 1.0)
    with pytest.raises(DomainError):
        ZetaEvaluator(PowerSubgraph(2), "sup", 1.0, "magic")
    with pytest.raises(UnsupportedError):
        ZetaEvaluator(ExpSubgraph(), "sup", None, "closed_form")
    cf = ZetaEvaluator(CantorDrum(1 / 3, 2), "sup", 5.0, "closed_form")
    with pytest.raises(DomainError):
        zeta_closed_form(cf, -2.0)
    with pytest.raises(PoleError):
        zeta_closed_form(ZetaEvaluator(PowerSubgraph(2), "sup", None, "closed_form"), -3.0)


def test_power_closed_form_T_dependence():
    ev = ZetaEvaluator(PowerSubgraph(2), "sup", 3.0, "closed_form")
    s = -2.5 + 1j
    assert zeta_closed_form(ev, s) == pytest.approx(cmath.exp(-(s + 3) * math.log(3)) / (s + 3))


def test_abscissa_check():
    power = abscissa_check(PowerSubgraph(2))
    assert power.simple_pole and power.scaled[-1] == pytest.approx(1.0)
    stacked = abscissa_check(StackedPower())
    assert not stacked.simple_pole
    assert max(stacked.values) < 1.0


def test_evaluator_roundtrip():
    ev = ZetaEvaluator(CantorDrum(0.25, 2), "euclidean", 2.0)
    assert ZetaEvaluator.from_dict(ev.to_dict()) == ev


def test_numeric_deterministic():
    ev = ZetaEvaluator(CantorDrum(1 / 3, 2), "euclidean")
    assert zeta_numeric_with_error(ev, -2.1 + 3j) == zeta_numeric_with_error(ev, -2.1 + 3j)
    assert np.isfinite(zeta_numeric(ev, -2.1 + 3j))
