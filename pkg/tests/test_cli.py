"""
Tests for the Command-Line Entry Point
"""

import csv
import io
import json

import pytest

from main import EXIT_FAILURE, EXIT_INPUT, EXIT_OK, main
from src.core.errors import InvariantViolation


def _json_stdout(capsys):
    return json.loads(capsys.readouterr().out)


def _csv_stdout(capsys):
    return list(csv.reader(io.StringIO(capsys.readouterr().out)))


def test_analyze_running_example(test_config, running_example_json, capsys):
    assert main(['analyze', str(running_example_json)]) == EXIT_OK
    report = _json_stdout(capsys)
    assert report['pic_index'] == {'formula': 60, 'hat': 60, 'direct': 60}
    assert report['class_group']['text'] == "Z x Z/4Z"


def test_analyze_writes_report_file(test_config, running_example_json):
    assert main(['analyze', str(running_example_json), '--out', 'running.json']) == EXIT_OK
    report = json.loads((test_config['output_dir'] / 'running.json').read_text())
    assert report['minors']['gcd_P'] == 4


def test_toric_fan_with_formula_note(test_config, d8_fan_json, capsys):
    assert main(['toric', str(d8_fan_json)]) == EXIT_OK
    report = _json_stdout(capsys)
    assert report['pic_index'] == 2
    assert report['formula_holds'] is False
    assert 'note' in report


def test_toric_weights(test_config, capsys):
    assert main(['toric', '--weights', '2,3,5']) == EXIT_OK
    assert _json_stdout(capsys)['pic_index'] == 30


def test_classify_toric_to_stdout(test_config, capsys):
    assert main(['classify-toric', '--max-index', '10', '--threads', '1']) == EXIT_OK
    rows = _csv_stdout(capsys)
    assert rows[0][:2] == ['picard_index', 'case']
    assert len(rows) - 1 == 14
    assert {row[1] for row in rows[1:]} == {'toric'}


def test_classify_nontoric_cases(test_config, capsys):
    assert main(['classify-nontoric', '--max-index', '8', '--cases', 'eDp']) == EXIT_OK
    rows = _csv_stdout(capsys)
    assert [row[:3] for row in rows[1:]] == [['8', 'eDp', '4']]


def test_census_to_stdout(test_config, capsys):
    assert main(['census', '--max-index', '10']) == EXIT_OK
    rows = _csv_stdout(capsys)
    header, last = rows[0], rows[-1]
    cumulative = {name[len('cumulative_'):]: int(v) for name, v in zip(header, last) if name.startswith('cumulative_')}
    assert sum(cumulative.values()) == 35


def test_classify_resume_continues_file(test_config):
    out = test_config['output_dir'] / 'toric.csv'
    resume = test_config['output_dir'] / 'toric.resume'
    assert main(['classify-toric', '--max-index', '5', '--out', str(out), '--resume', str(resume)]) == EXIT_OK
    assert json.loads(resume.read_text())['max_completed_iota'] == 5
    assert main(['classify-toric', '--max-index', '10', '--out', str(out), '--resume', str(resume)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) - 1 == 14
    assert lines[0].startswith('picard_index')


def test_census_resume_keeps_cumulative_counts(test_config):
    out = test_config['output_dir'] / 'census.csv'
    resume = test_config['output_dir'] / 'census.resume'
    main(['census', '--max-index', '4', '--out', str(out), '--resume', str(resume)])
    main(['census', '--max-index', '10', '--out', str(out), '--resume', str(resume)])
    rows = list(csv.reader(out.open()))
    assert [row[0] for row in rows[1:]] == [str(i) for i in range(1, 11)]
    state = json.loads(resume.read_text())
    assert sum(state['cumulative'].values()) == 35


def test_histogram_of_record_file(test_config, capsys):
    out = test_config['output_dir'] / 'toric.csv'
    main(['classify-toric', '--max-index', '6', '--out', str(out)])
    assert main(['histogram', str(out)]) == EXIT_OK
    rows = _csv_stdout(capsys)
    assert rows[0][-1] == 'total'
    assert sum(int(row[-1]) for row in rows[1:]) == len(out.read_text().splitlines()) - 1


def test_verify_small_run(test_config, capsys):
    assert main(['verify', '--count', '3', '--seed', '11', '--suites', 'exactlin,weighted_projective']) == EXIT_OK
    report = _json_stdout(capsys)
    assert report['passed'] is True
    assert [s['suite'] for s in report['suites']] == ['exactlin', 'weighted_projective']


@pytest.mark.parametrize('argv', [
    ['analyze', 'missing.json'],
    ['toric'],
    ['toric', '--weights', '2,4'],
    ['classify-nontoric', '--max-index', '5', '--cases', 'eXeX'],
    ['classify-toric', '--max-index', '0'],
    ['classify-toric', '--max-index', '5', '--resume', 'r.json'],
    ['analyze', 'x.json', '--format', 'csv'],
    ['verify', '--suites', 'nothing'],
])
def test_invalid_input_exits_with_two(test_config, argv):
    assert main(argv) == EXIT_INPUT


def test_invalid_defining_matrix_exits_with_two(test_config, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'type': 'ee', 'l': [[1], [1], [1]], 'd': [[1], [1], [1]]}))
    assert main(['analyze', str(path)]) == EXIT_INPUT


def test_invariant_violation_exits_with_one(test_config, running_example, running_example_json, mocker):
    """The offending instance is saved under failures/."""
    mocker.patch('main.analyze', side_effect=InvariantViolation("routes disagree", running_example))
    assert main(['analyze', str(running_example_json)]) == EXIT_FAILURE
    saved = json.loads((test_config['output_dir'] / 'failures' / 'invariant.json').read_text())
    assert saved['l'] == [[1, 1], [8], [4]]


def test_usage_errors_exit_with_two(test_config):
    with pytest.raises(SystemExit) as excinfo:
        main(['classify-toric'])
    assert excinfo.value.code == 2
