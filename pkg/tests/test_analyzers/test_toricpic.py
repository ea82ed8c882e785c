"""
Tests for Toric Picard Analyzer Module
"""

import logging
import math
from fractions import Fraction

import pytest

from src.analyzers.toricpic import (
    ClassGroupPresentation,
    class_group,
    complete_fan_2d,
    formula_quotient,
    hat_maps,
    local_chart,
    local_class_group,
    local_orders,
    picard_direct,
    picard_via_hat,
    restrict_class,
    restriction_matrix,
    weighted_projective_fan,
)
from src.core.defmat import Fan, ambient_fan, random_defining_matrix
from src.core.errors import DegenerateFanError, UnsupportedFanError
from src.core.exactlin import AbelianGroup, matmul, snf, to_lists


@pytest.fixture
def running_fan(running_example):
    return ambient_fan(running_example)


def test_running_example_class_group(running_fan):
    """Cl = Z x Z/4 with local orders 20, 1, 12."""
    assert class_group(running_fan) == AbelianGroup(1, (4,))
    assert local_orders(running_fan) == (20, 1, 12)
    assert local_class_group(running_fan, 1).is_trivial


def test_running_example_routes_agree(running_fan):
    direct = picard_direct(running_fan)
    hat = picard_via_hat(running_fan)
    assert direct.pic_index == hat.pic_index == 60
    assert direct.route == 'direct'
    assert hat.route == 'hat'
    assert direct.local_orders == hat.local_orders == (20, 1, 12)
    assert direct.check_product_identity()
    assert hat.check_product_identity()


def test_d8_fan_differs_from_local_quotient(d8_fan, caplog):
    """Pic index 2 while prod |K_sigma| / |Cl^tors| is 1."""
    data = picard_direct(d8_fan)
    assert data.class_group == AbelianGroup(1, (2,))
    assert data.pic_index == 2
    assert data.khat.is_trivial
    assert picard_via_hat(d8_fan).pic_index == 2
    with caplog.at_level(logging.WARNING):
        check = formula_quotient(d8_fan, data.pic_index)
    assert check.quotient == Fraction(1)
    assert not check.formula_holds
    assert "differs from the Picard index" in caplog.text


def test_p2235_fan(p2235_fan):
    """Local product 60 over |K_hat| = 2 gives index 30."""
    data = picard_direct(p2235_fan)
    assert data.pic_index == 30
    assert math.prod(data.local_orders) == 60
    assert data.khat.order == 2
    assert picard_via_hat(p2235_fan).pic_index == 30


@pytest.mark.parametrize('weights, index', [
    ((1, 1, 1), 1),
    ((1, 2, 3), 6),
    ((2, 3, 5), 30),
    ((1, 1, 2, 3), 6),
])
def test_weighted_projective_space_index_is_lcm(weights, index):
    fan = weighted_projective_fan(weights)
    data = picard_direct(fan)
    assert data.class_group == AbelianGroup(1)
    assert data.pic_index == index
    assert picard_via_hat(fan).pic_index == index
    assert formula_quotient(fan, index).formula_holds


def test_weighted_projective_local_orders():
    """The cone without ray i has local order w_i."""
    fan = weighted_projective_fan([1, 2, 3])
    assert local_orders(fan) == (3, 2, 1)
    data = picard_direct(fan)
    assert data.pic_group == AbelianGroup(1)
    assert [abs(g[0]) for g in data.pic_generators] == [6]


def test_weighted_projective_rejects_bad_weights():
    with pytest.raises(DegenerateFanError):
        weighted_projective_fan([2, 4])
    with pytest.raises(DegenerateFanError):
        weighted_projective_fan([1, 0, 2])


def test_complete_fan_2d_sorts_rays():
    fan = complete_fan_2d([(-1, -1), (0, 1), (1, 0)])
    assert fan.is_complete_2d()
    assert picard_direct(fan).pic_index == 1


def test_complete_fan_2d_rejects_half_plane():
    with pytest.raises(DegenerateFanError):
        complete_fan_2d([(1, 0), (0, 1), (-1, 0)])


def test_non_simplicial_cone_is_unsupported():
    """A square pyramid cone has four rays in dimension three."""
    rays = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1), (0, 0, -1)]
    cones = [(0, 1, 2, 3), (0, 1, 4), (1, 2, 4), (2, 3, 4), (0, 3, 4)]
    with pytest.raises(UnsupportedFanError):
        picard_direct(Fan.from_rays(rays, cones))


def test_hat_maps_satisfy_their_equations(running_fan):
    maps = hat_maps(running_fan)
    assert not (matmul(maps.alpha, maps.gamma) != 0).any()
    assert not (matmul(maps.beta, maps.delta) != 0).any()
    assert to_lists(matmul(maps.gamma, maps.Phat)) == to_lists(matmul(maps.block_P, maps.delta))


def test_restrictions_cut_out_the_picard_group(running_fan):
    """Classes vanishing on every chart form a subgroup of index 60 in Z x Z/4."""
    presentation = ClassGroupPresentation(running_fan)
    assert presentation.coordinate_moduli() == (0, 4)
    assert restriction_matrix(running_fan, 0, presentation).shape == (3, 2)
    assert restriction_matrix(running_fan, 1, presentation).shape == (2, 2)
    charts = []
    for cone in range(3):
        moduli = snf(local_chart(running_fan, cone).P_sigma.T).d
        images = [restrict_class(running_fan, cone, e, presentation) for e in ((1, 0), (0, 1))]
        charts.append((moduli, images))

    def image(chart, a, b):
        moduli, (x, y) = chart
        return tuple((a * u + b * v) % t for u, v, t in zip(x, y, moduli))

    # restriction onto each local class group is surjective
    for chart, order in zip(charts, (20, 1, 12)):
        assert len({image(chart, a, b) for a in range(order) for b in range(4)}) == order
    kernel = [(a, b) for a in range(60) for b in range(4) if not any(any(image(c, a, b)) for c in charts)]
    assert len(kernel) == 4
    for g in picard_direct(running_fan).pic_generators:
        assert all(not any(restrict_class(running_fan, cone, g, presentation)) for cone in range(3))


def test_routes_agree_on_random_surfaces(rng):
    for _ in range(25):
        fan = ambient_fan(random_defining_matrix(rng, max_r=2, max_n=2, max_l=5, max_d=5))
        direct = picard_direct(fan)
        assert picard_via_hat(fan).pic_index == direct.pic_index
        assert direct.check_product_identity()


def test_local_class_group_bad_index(p2_fan):
    with pytest.raises(IndexError):
        local_class_group(p2_fan, 3)
