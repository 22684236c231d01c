import math

import pytest

from zetainf import (
    AccumulationBoundaryError,
    CantorDrum,
    DepthExhaustedError,
    DomainError,
    ExpSubgraph,
    IntervalChain,
    PowerSubgraph,
    StackedPower,
    UnsupportedError,
    WindowSpec,
    ZetaEvaluator,
    count_window,
    find_poles,
    principal_dimensions,
    residue_at,
    residue_content_check,
)


def closed(region, T=None):
    return ZetaEvaluator(region, "sup", T, "closed_form")


@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.7])
def test_power_single_pole(alpha):
    poles = find_poles(closed(PowerSubgraph(alpha), 2.0), WindowSpec(-6, 0, -3, 3))
    assert len(poles) == 1
    p = poles[0]
    assert p.location == pytest.approx(-1 - alpha, abs=1e-10)
    # T**-(s + alpha + 1) is 1 at the pole for any T
    assert p.residue == pytest.approx(1.0, abs=1e-10)
    assert p.order == 1


def test_stacked_poles_and_residues():
    poles = find_poles(closed(StackedPower()), WindowSpec(-3.1, -2.24, -1, 1))
    got = sorted(p.location.real for p in poles)
    assert got == pytest.approx([-3.0, -2.5, -2 - 1 / 3, -2.25], abs=1e-10)
    for p in poles:
        k = round(-1 / (p.location.real + 2))
        assert p.residue == pytest.approx(2.0 ** -k / k, abs=1e-10)


def test_cantor_real_pole():
    poles = find_poles(closed(CantorDrum(1 / 3, 2)), WindowSpec(-3.1, -2.9, -1, 1))
    assert len(poles) == 1
    assert poles[0].location == pytest.approx(-3.0, abs=1e-10)
    # 1 / (u (3**u - 2)) at u = 0
    assert poles[0].residue == pytest.approx(-1.0, abs=1e-10)


def test_cantor_principal_dimensions():
    period = 2 * math.pi / math.log(3)
    dims = principal_dimensions(closed(CantorDrum(1 / 3, 2)), 20)
    assert len(dims) == 7
    ims = sorted(p.location.imag for p in dims)
    gaps = [b - a for a, b in zip(ims, ims[1:])]
    assert gaps == pytest.approx([period] * 6, abs=1e-8)
    assert principal_dimensions(closed(StackedPower()), 5) == []


def test_general_cantor_lattice():
    region = CantorDrum(0.25, 2.5)
    D = region.box_dimension
    period = 2 * math.pi / math.log(4)
    poles = find_poles(closed(region), WindowSpec(D - 0.2, D + 0.2, -6, 6))
    assert sorted(p.location.imag for p in poles) == pytest.approx(
        [-period, 0.0, period], abs=1e-8)


def test_count_window():
    assert count_window(closed(PowerSubgraph(2)), WindowSpec(-4, -2, -1, 1)) == pytest.approx(-1)
    assert count_window(closed(PowerSubgraph(2)), WindowSpec(-2, 0, -1, 1)) == pytest.approx(0,
                                                                                          abs=1e-8)


def test_residue_at():
    ev = closed(CantorDrum(1 / 3, 2))
    D = CantorDrum(1 / 3, 2).box_dimension
    u = D + 3
    assert residue_at(ev, D) == pytest.approx(1 / (u * 2 * math.log(3)), abs=1e-12)
    with pytest.raises(DomainError):
        residue_at(ev, D + 0.5)


def test_accumulation_and_depth():
    ev = closed(StackedPower())
    with pytest.raises(AccumulationBoundaryError):
        find_poles(ev, WindowSpec(-2.2, -1.95, -1, 1))
    with pytest.raises(DepthExhaustedError):
        find_poles(closed(CantorDrum(1 / 3, 2)), WindowSpec(-2.5, -2.2, -12, 12, depth=1))


def test_pole_finding_unsupported():
    with pytest.raises(UnsupportedError):
        find_poles(ZetaEvaluator(IntervalChain(2, 3)), WindowSpec(-3, -1, -1, 1))
    with pytest.raises(UnsupportedError):
        find_poles(ZetaEvaluator(ExpSubgraph()), WindowSpec(-3, -1, -1, 1))


def test_window_validation():
    with pytest.raises(DomainError):
        WindowSpec(0, -1, 0, 1)


def test_residue_content_reports():
    power = residue_content_check(PowerSubgraph(2))
    assert power.passed and power.measurable
    assert power.residue == pytest.approx(-(2 - 3) * 1.0)
    other = residue_content_check(CantorDrum(0.4, 3))
    assert other.passed and not other.measurable
    exp = residue_content_check(ExpSubgraph())
    assert exp.skipped and not exp.passed
    assert residue_content_check(StackedPower()).to_dict()["skipped"]
