"""
Tests for Serialization Module
"""

import json

import pytest

from src.analyzers.kstarindex import analyze
from src.analyzers.toricpic import formula_quotient, picard_direct
from src.core.errors import InputError
from src.utils.serialization import (
    SAFE_INT,
    decode_int,
    defining_matrix_from_json,
    dump_defining_matrix,
    encode_ints,
    fan_from_json,
    kstar_report_to_json,
    load_defining_matrix,
    load_fan,
    picard_data_to_json,
    write_json,
)


def test_large_integers_become_strings():
    """Values beyond 53 bits are written as decimal strings."""
    data = encode_ints({'small': SAFE_INT, 'large': [SAFE_INT + 1, -(2 ** 80)], 'flag': True})
    assert data == {'small': SAFE_INT, 'large': [str(SAFE_INT + 1), str(-(2 ** 80))], 'flag': True}


def test_decode_int():
    assert decode_int(" 12345678901234567890 ", 'x') == 12345678901234567890
    assert decode_int(-3, 'x') == -3
    for bad in (True, 1.5, "1e3", None):
        with pytest.raises(InputError):
            decode_int(bad, 'x')


def test_defining_matrix_accepts_string_entries():
    dm = defining_matrix_from_json({'type': 'ee', 'l': [[1, 1], ["8"], [4]], 'd': [[-1, -2], [7], ["3"]]})
    assert dm.l == ((1, 1), (8,), (4,))
    assert dm.d == ((-1, -2), (7,), (3,))


@pytest.mark.parametrize('data', [
    [1, 2],
    {'type': 'ee', 'l': [[1]]},
    {'type': 'ee', 'l': [1, 2], 'd': [[0], [1]]},
    {'type': 'qq', 'l': [[1], [1]], 'd': [[0], [1]]},
])
def test_defining_matrix_schema_errors(data):
    with pytest.raises(InputError):
        defining_matrix_from_json(data)


def test_round_trip_through_file(tmp_path, running_example):
    path = dump_defining_matrix(running_example, tmp_path / 'dm.json')
    assert load_defining_matrix(path) == running_example


def test_load_missing_or_broken_file(tmp_path):
    with pytest.raises(InputError):
        load_defining_matrix(tmp_path / 'missing.json')
    broken = tmp_path / 'broken.json'
    broken.write_text("{not json")
    with pytest.raises(InputError):
        load_fan(broken)


def test_fan_from_json(d8_fan):
    fan = fan_from_json(json.loads(json.dumps(d8_fan.to_dict())))
    assert fan == d8_fan
    with pytest.raises(InputError):
        fan_from_json({'rays': [[1, 0]]})


def test_picard_data_notes_formula_mismatch(d8_fan):
    data = picard_direct(d8_fan)
    out = picard_data_to_json(data, formula_quotient(d8_fan, data.pic_index))
    assert out['pic_index'] == 2
    assert out['class_group']['text'] == "Z x Z/2Z"
    assert out['formula_quotient'] == "1"
    assert out['formula_holds'] is False
    assert 'note' in out


def test_kstar_report_json(running_example, tmp_path):
    out = kstar_report_to_json(analyze(running_example))
    assert out['pic_index'] == {'formula': 60, 'hat': 60, 'direct': 60}
    assert [g['cone'] for g in out['local_groups']] == ['sigma+', 'tau01', 'sigma-']
    assert out['minors']['M_red_Phat'] == [12, 24, 28, 32]
    assert out['minors']['nu_hat']['0,1'] == -1
    path = write_json(out, tmp_path / 'report.json')
    assert json.loads(path.read_text())['formula_quotient'] == "60"
