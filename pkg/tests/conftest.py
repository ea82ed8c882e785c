"""
Test Configuration Module

This module provides common test fixtures and configuration.
"""

import pytest
import random
import json

from src.core.defmat import DefiningMatrix, Fan
from src.utils.config import reset_config


@pytest.fixture
def running_example():
    """Type ee surface with Cl = Z x Z/4 and Picard index 60."""
    return DefiningMatrix.from_blocks('ee', [[1, 1], [8], [4]], [[-1, -2], [7], [3]])


@pytest.fixture
def running_example_json(tmp_path, running_example):
    """Running example written as a defining matrix JSON file."""
    path = tmp_path / 'running_example.json'
    path.write_text(json.dumps(running_example.to_dict()))
    return path


@pytest.fixture
def d8_fan():
    """Surface fan whose Picard index is not the local order quotient."""
    return Fan.from_rays(
        [(1, 0, 0), (0, 1, 0), (1, 1, 2), (-3, -2, -2)],
        [(0, 1), (1, 2), (1, 3), (0, 2, 3)],
    )


@pytest.fixture
def d8_fan_json(tmp_path, d8_fan):
    path = tmp_path / 'd8.json'
    path.write_text(json.dumps(d8_fan.to_dict()))
    return path


@pytest.fixture
def p2235_fan():
    """Fan of P(2,2,3,5): every 3-subset of the four rays is a cone."""
    rays = [(1, 0, 1), (-1, 0, 0), (0, 5, 1), (0, -3, -1)]
    cones = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return Fan.from_rays(rays, cones)


@pytest.fixture
def p2_fan():
    return Fan.from_rays([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def rng():
    """Seeded generator so random instances reproduce."""
    return random.Random(20240101)


@pytest.fixture
def test_config(tmp_path, monkeypatch):
    """Test configuration with temporary directories."""
    config = {
        'output_dir': tmp_path / 'output',
        'log_dir': tmp_path / 'logs',
    }
    for path in config.values():
        path.mkdir(parents=True, exist_ok=True)
    monkeypatch.setenv('KSTAR_OUTPUT_DIR', str(config['output_dir']))
    monkeypatch.setenv('KSTAR_LOG_DIR', str(config['log_dir']))
    monkeypatch.setenv('KSTAR_THREADS', '1')
    monkeypatch.delenv('KSTAR_LOG', raising=False)
    reset_config()
    yield config
    reset_config()
