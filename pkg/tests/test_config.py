import logging
import os
from types import SimpleNamespace

import pytest
import sentry_sdk

from vacuum_friction.config import Config, LoggingConfig
from vacuum_friction.logger import setup_logging
from vacuum_friction.utils import SentryWrapper, atomic_write, validate_output_path

from .conftest import SCENARIO_DIR, scenario_text


def test_application_sections(scenario_file):
    path = scenario_file('[logging]\nlevel = DEBUG\nlog_numerics = true\n\n[misc]\nsentry_opt = out\n\n'
                         '[sphere]\nmaterial = yig\nradius_nm = 200\nrotation_ghz = 1\n\n'
                         '[interface]\nkind = none\n\n[environment]\nt0_k = 300\n')
    config = Config(path)
    config.load_from_config_file()
    assert config.logging == LoggingConfig(path='', level='DEBUG', log_numerics=True)
    assert config.sentry_opt == 'out'
    assert config.load_scenario().sphere_radius_m == pytest.approx(200e-9)
    assert 'sphere' in config.as_dict()


def test_flat_document_defaults(scenario_file):
    config = Config(scenario_file(scenario_text(slab='none')))
    config.load_from_config_file()
    assert config.logging.level == 'INFO'
    assert not config.logging.log_numerics
    assert config.sentry_dsn == ''


def test_bundled_scenarios_keep_reporting_off():
    config = Config(os.path.join(SCENARIO_DIR, 'yig_yig.cfg'))
    config.load_from_config_file()
    assert not SentryWrapper(config=config).enabled()


def test_numerics_logging_is_opt_in(tmp_path):
    quadrature = logging.getLogger('vacfric.quadrature')
    setup_logging(LoggingConfig(path=''), debug=True)
    assert logging.getLogger().level == logging.DEBUG
    assert quadrature.level == logging.INFO

    log_file = tmp_path / 'run.log'
    setup_logging(LoggingConfig(path='', log_numerics=True), log_path=str(log_file), debug=True)
    assert quadrature.level == logging.DEBUG
    logging.getLogger('vacfric.test').info('hello')
    assert 'vacfric.test - hello' in log_file.read_text()

    setup_logging(LoggingConfig(path=''))


def test_output_paths(tmp_path):
    validate_output_path(str(tmp_path / 'out.csv'))
    with pytest.raises(ValueError):
        validate_output_path(str(tmp_path / 'missing' / 'out.csv'))
    with pytest.raises(ValueError):
        validate_output_path('bad\0name.csv')

    target = tmp_path / 'out.csv'
    atomic_write(str(target), 'a,b\n1,2\n')
    assert target.read_bytes() == b'a,b\n1,2\n'
    assert [p.name for p in tmp_path.iterdir()] == ['out.csv']


def test_reporting_without_dsn_only_logs(monkeypatch, caplog):
    monkeypatch.setattr(sentry_sdk, 'capture_exception', lambda *args, **kwargs: pytest.fail('sent to sentry'))
    sentry = SentryWrapper(config=SimpleNamespace(sentry_opt='in', sentry_dsn=''))
    assert not sentry.enabled()
    try:
        raise RuntimeError('quadrature worker died')
    except RuntimeError:
        with caplog.at_level(logging.ERROR, logger='vacfric.utils'):
            sentry.captureException()
    assert 'quadrature worker died' in caplog.text
