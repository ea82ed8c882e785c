"""
Tests for Defining Matrix Module
"""

import pytest

from src.core.defmat import (
    ConeLabel,
    DefiningMatrix,
    Fan,
    ambient_cones,
    ambient_fan,
    assemble,
    elliptic_type,
    fixed_points,
    flip,
    normalize_shifts,
    random_defining_matrix,
    require_valid,
    sort_by_angle,
    validate,
)
from src.core.errors import DegenerateFanError, InputError
from src.core.exactlin import to_lists


def test_assemble_running_example(running_example):
    """Block 0 sits in every row, blocks 1..r on the diagonal."""
    assert to_lists(assemble(running_example)) == [
        [-1, -1, 8, 0],
        [-1, -1, 0, 4],
        [-1, -2, 7, 3],
    ]
    assert running_example.r == 2
    assert running_example.n == 4
    assert running_example.m == 0


def test_assemble_unit_columns():
    dm = DefiningMatrix.from_blocks('pp', [[1], [1]], [[0], [1]])
    assert to_lists(assemble(dm)) == [[-1, 1, 0, 0], [0, 1, 1, -1]]
    assert dm.column_labels == ('v01', 'v11', 'v+', 'v-')
    assert dm.column_index(0, 0) == 2
    assert dm.column_index(1, 2) == 3


def test_column_index_out_of_range(running_example):
    with pytest.raises(IndexError):
        running_example.column_index(0, 0)
    with pytest.raises(IndexError):
        running_example.column_index(3, 1)


def test_from_blocks_rejects_bad_input():
    with pytest.raises(InputError):
        DefiningMatrix.from_blocks('xx', [[1], [1]], [[0], [1]])
    with pytest.raises(InputError):
        DefiningMatrix.from_blocks('ee', [[1], ['a']], [[0], [1]])


def test_validate_accepts_running_example(running_example):
    assert validate(running_example) == []
    assert require_valid(running_example) is running_example


def test_validate_reports_each_violation():
    """Slope order, coprimality, positivity and spanning are all checked."""
    def kinds(dm):
        return {v.kind for v in validate(dm)}

    assert 'slope' in kinds(DefiningMatrix.from_blocks('ee', [[1, 1], [8], [4]], [[-2, -1], [7], [3]]))
    assert 'gcd' in kinds(DefiningMatrix.from_blocks('ee', [[2, 1], [8], [4]], [[-2, -2], [7], [3]]))
    assert 'positivity' in kinds(DefiningMatrix.from_blocks('ee', [[0, 1], [8], [4]], [[-1, -2], [7], [3]]))
    assert 'spanning' in kinds(DefiningMatrix.from_blocks('ee', [[1], [1], [1]], [[1], [1], [1]]))
    assert 'shape' in kinds(DefiningMatrix('ee', ((1,),), ((1,),)))
    with pytest.raises(InputError):
        require_valid(DefiningMatrix.from_blocks('ee', [[1], [1], [1]], [[1], [1], [1]]))


def test_ambient_cones_order(running_example):
    """sigma+, then tau_01, then sigma-."""
    cones = ambient_cones(running_example)
    assert [str(label) for label, _ in cones] == ['sigma+', 'tau01', 'sigma-']
    assert [cols for _, cols in cones] == [(0, 2, 3), (0, 1), (1, 2, 3)]


def test_ambient_cones_parabolic_source():
    dm = DefiningMatrix.from_blocks('pe', [[1], [1], [1]], [[0], [0], [-1]])
    labels = [str(label) for label, _ in ambient_cones(dm)]
    assert labels == ['tau00', 'tau10', 'tau20', 'sigma-']


def test_fixed_points_running_example(running_example):
    """Local class group orders 20, 1 and 12."""
    points = fixed_points(running_example)
    assert [p.name for p in points] == ['x+', 'x01', 'x-']
    assert [p.kind for p in points] == ['elliptic_plus', 'hyperbolic', 'elliptic_minus']
    assert [p.local_order for p in points] == [20, 1, 12]


def test_ambient_fan_is_valid(running_example):
    fan = ambient_fan(running_example)
    assert fan.validate() == []
    assert fan.is_simplicial()


def test_flip_is_an_involution(running_example):
    dm = DefiningMatrix.from_blocks('pe', [[2, 1], [3]], [[1, -1], [1]])
    assert flip(flip(dm)) == dm
    assert flip(dm).type == 'ep'
    assert validate(flip(running_example)) == []


def test_normalize_shifts_keeps_the_surface(running_example):
    shifted = DefiningMatrix.from_blocks('ee', [[1, 1], [8], [4]], [[-3, -4], [7], [5]])
    normal = normalize_shifts(shifted)
    assert normal.d[2] == (1,)
    assert all(0 <= normal.d[i][0] < normal.l[i][0] for i in (1, 2))
    assert [p.local_order for p in fixed_points(normal)] == [p.local_order for p in fixed_points(shifted)]


@pytest.mark.parametrize('ls, expected', [
    ((1, 7, 9), 'A'),
    ((5, 2, 2), 'D'),
    ((2, 2, 2), 'D'),
    ((3, 3, 2), 'E'),
    ((2, 5, 3), 'E'),
    ((1, 6, 3, 2), None),
    ((2, 2, 2, 2), None),
    ((3, 3, 3), None),
])
def test_elliptic_type(ls, expected):
    assert elliptic_type(ls) == expected


def test_sort_by_angle():
    rays = [(-1, -1), (0, 1), (1, 0), (-1, 0)]
    assert sort_by_angle(rays) == [2, 1, 3, 0]


def test_random_defining_matrix_is_valid(rng):
    for _ in range(30):
        dm = random_defining_matrix(rng)
        assert validate(dm) == []
        assert 1 <= dm.r <= 3
        assert all(1 <= len(b) <= 3 for b in dm.l)


def test_fan_validation(d8_fan):
    assert d8_fan.validate() == []
    bad = Fan.from_rays([(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)])
    kinds = {v.kind for v in bad.validate()}
    assert 'primitive' in kinds
    with pytest.raises(DegenerateFanError):
        bad.require_valid()


def test_fan_coverage():
    fan = Fan.from_rays([(1, 0), (0, 1), (-1, -1)], [(0, 1)])
    assert {v.kind for v in fan.validate()} == {'coverage'}


def test_complete_2d(p2_fan):
    assert p2_fan.is_complete_2d()
    assert not Fan.from_rays([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)]).is_complete_2d()


def test_cone_label_str():
    assert str(ConeLabel('tau', 1, 2)) == 'tau12'
    assert str(ConeLabel('sigma-')) == 'sigma-'
