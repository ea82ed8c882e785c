"""
Tests for Resume State Module
"""

import json

import pytest

from src.core.errors import InputError
from src.utils.resume import RESUME_VERSION, ResumeState


def test_fresh_state_starts_at_one(tmp_path):
    state = ResumeState(tmp_path / 'resume.json', 'census')
    assert state.next_iota == 1
    assert state.cumulative is None


def test_save_and_reload(tmp_path):
    path = tmp_path / 'nested' / 'resume.json'
    ResumeState(path, 'census').save(7, {'toric': 9})
    state = ResumeState(path, 'census')
    assert state.next_iota == 8
    assert state.cumulative == {'toric': 9}
    assert not list(path.parent.glob('*.tmp'))


def test_command_mismatch(tmp_path):
    path = tmp_path / 'resume.json'
    ResumeState(path, 'classify-toric').save(3)
    with pytest.raises(InputError):
        ResumeState(path, 'census')


@pytest.mark.parametrize('content', [
    "not json",
    json.dumps({'version': RESUME_VERSION + 1, 'command': 'census', 'max_completed_iota': 2}),
])
def test_invalid_resume_files(tmp_path, content):
    path = tmp_path / 'resume.json'
    path.write_text(content)
    with pytest.raises(InputError):
        ResumeState(path, 'census')
