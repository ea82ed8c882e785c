"""
Tests for Report Store Module
"""

import json

import pytest

from src.analyzers.classify import census, classify_fwpp, histogram
from src.core.errors import InputError
from src.core.report_store import CENSUS_HEADER, RECORD_HEADER, ReportStore, read_records


@pytest.fixture
def store(tmp_path):
    return ReportStore(tmp_path / 'out')


def test_default_output_dir_from_config(test_config):
    assert ReportStore().output_dir == test_config['output_dir']


def test_write_report(store):
    path = store.write_report('report.json', {'pic_index': 2 ** 60})
    assert path.parent == store.output_dir
    assert json.loads(path.read_text()) == {'pic_index': str(2 ** 60)}


def test_records_append_and_read_back(store):
    path = store.write_records('toric.csv', classify_fwpp(4))
    store.write_records(path, classify_fwpp(5), append=True)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(RECORD_HEADER)
    rows = read_records(path)
    assert len(rows) == len(classify_fwpp(4)) + len(classify_fwpp(5))
    assert {row.picard_index for row in rows} == {4, 5}
    assert all(row.case == 'toric' for row in rows)


def test_histogram_from_record_file(store):
    path = store.write_records('toric.csv', classify_fwpp(4) + classify_fwpp(6))
    rows = histogram(read_records(path))
    assert [row.picard_index for row in rows] == [4, 6]
    assert rows[0].counts['toric'] == len(classify_fwpp(4))
    out = store.write_histogram('hist.csv', rows)
    assert out.read_text().splitlines()[0].endswith(",total")


def test_census_file(store):
    path = store.write_census('census.csv', census(3))
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == CENSUS_HEADER
    assert len(lines) == 4


def test_read_records_rejects_other_files(store, tmp_path):
    other = tmp_path / 'other.csv'
    other.write_text("a,b\n1,2\n")
    with pytest.raises(InputError):
        read_records(other)
    with pytest.raises(InputError):
        read_records(tmp_path / 'missing.csv')


def test_write_failure(store, running_example):
    path = store.write_failure('invariant', running_example)
    assert path == store.output_dir / 'failures' / 'invariant.json'
    assert json.loads(path.read_text())['type'] == 'ee'
    assert store.write_failure('invariant', None) is None
